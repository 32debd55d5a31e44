/* Copyright 2026 The Gasrec Authors */
/* SPDX-License-Identifier: Apache-2.0 */

/*
 * gasrec -- Ethereum gas price forecasting and recommendation library.
 *
 * C interface to the gasrec core. All functions returning gasrec_status
 * set a thread-local error message retrievable via gasrec_last_error()
 * on failure. Objects returned through out-parameters are owned by the
 * caller and must be released with the matching *_free function.
 */

#ifndef GASREC_H
#define GASREC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GASREC_API __declspec(dllexport)
#else
#define GASREC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gasrec_status {
    GASREC_OK = 0,
    GASREC_ERR_ARGUMENT = 1,  /* invalid arguments / precondition violated */
    GASREC_ERR_DATA = 2,      /* input data violates a domain invariant */
    GASREC_ERR_PARSE = 3,     /* malformed file content */
    GASREC_ERR_TRANSPORT = 4, /* RPC endpoint unreachable or protocol error */
    GASREC_ERR_TRAIN = 5,     /* training aborted */
    GASREC_ERR_IO = 6,        /* file read/write failure */
    GASREC_ERR_INTERNAL = 7
} gasrec_status;

/* Message describing the most recent failure on this thread. */
GASREC_API const char* gasrec_last_error(void);

GASREC_API const char* gasrec_version(void);

/* ------------------------------------------------------------------ */
/* Block traces                                                        */
/* ------------------------------------------------------------------ */

typedef struct gasrec_trace gasrec_trace;
typedef struct gasrec_eth_prices gasrec_eth_prices;

/* Fetches blocks [from_block, to_block] over JSON-RPC with up to
 * `parallelism` requests in flight (0 selects the default of 8). */
GASREC_API gasrec_status gasrec_trace_fetch(const char* rpc_url,
                                            uint64_t from_block,
                                            uint64_t to_block,
                                            uint32_t parallelism,
                                            gasrec_trace** out);

GASREC_API gasrec_status gasrec_trace_read_csv(const char* path, gasrec_trace** out);
GASREC_API gasrec_status gasrec_trace_write_csv(const gasrec_trace* trace, const char* path);
GASREC_API void gasrec_trace_free(gasrec_trace* trace);

GASREC_API uint64_t gasrec_trace_block_count(const gasrec_trace* trace);
GASREC_API uint64_t gasrec_trace_first_block(const gasrec_trace* trace);
GASREC_API uint64_t gasrec_trace_last_block(const gasrec_trace* trace);

/* ETH/USD price series (CSV import only). */
GASREC_API gasrec_status gasrec_eth_prices_read_csv(const char* path, gasrec_eth_prices** out);
GASREC_API void gasrec_eth_prices_free(gasrec_eth_prices* prices);

/* ------------------------------------------------------------------ */
/* Analytics                                                           */
/* ------------------------------------------------------------------ */

/* Writes the empirical-analysis report (per-block statistics, correlation
 * matrix, autocorrelation of interval-aggregated mean/min gas price) as a
 * sectioned CSV. max_lag is clamped to the aggregated series length. */
GASREC_API gasrec_status gasrec_analyze(const gasrec_trace* trace,
                                        uint32_t interval_seconds,
                                        uint32_t max_lag,
                                        const char* report_csv_path);

/* ------------------------------------------------------------------ */
/* Preprocessing                                                       */
/* ------------------------------------------------------------------ */

typedef struct gasrec_pipeline_config {
    uint32_t step_seconds;    /* aggregation step, default 300 */
    uint32_t lag_steps;       /* must equal 86400 / step_seconds */
    double outlier_k;         /* outlier cut in standard deviations, default 1.5 */
    double energy_threshold;  /* Fourier energy retention in (0, 1], default 0.95 */
    uint32_t input_window;    /* window length l, default 72 */
    uint32_t horizon;         /* forecast length s, default 12 */
    int smoothing;            /* nonzero applies per-window Fourier smoothing */
    double train_split;       /* chronological training fraction, default 0.7 */
} gasrec_pipeline_config;

GASREC_API void gasrec_pipeline_config_default(gasrec_pipeline_config* cfg);

/* Runs the full feature pipeline (aggregation, outlier removal on the
 * training prefix, 24h lag, normalization fit on the training prefix,
 * window assembly) and writes the window dataset file. */
GASREC_API gasrec_status gasrec_preprocess(const gasrec_trace* trace,
                                           const gasrec_eth_prices* prices,
                                           const gasrec_pipeline_config* cfg,
                                           const char* windows_out_path);

/* ------------------------------------------------------------------ */
/* Training                                                            */
/* ------------------------------------------------------------------ */

typedef struct gasrec_train_config {
    double learning_rate; /* default 1e-3 */
    double beta1;         /* default 0.9 */
    double beta2;         /* default 0.999 */
    double epsilon;       /* default 1e-8 */
    uint32_t epochs;
    uint32_t batch_size;  /* default 32 */
    uint64_t seed;
    double split_ratio;   /* chronological train fraction, default 0.7 */
    uint32_t hidden_size; /* default 64 */
    double grad_clip;     /* max gradient norm, 0 disables clipping */
    int slope_from_targets; /* nonzero fits the slope normalizer on true
                               training targets instead of predictions */
} gasrec_train_config;

GASREC_API void gasrec_train_config_default(gasrec_train_config* cfg);

typedef struct gasrec_train_stats {
    uint32_t epochs_run;
    uint32_t best_epoch;          /* 0-based, valid when epochs_run > 0 */
    double best_validation_loss;
    double final_training_loss;
    double wall_seconds;
} gasrec_train_stats;

/* Trains a forecaster on a window dataset file and writes the model file.
 * report_csv_path may be NULL; stats may be NULL. */
GASREC_API gasrec_status gasrec_train(const char* windows_path,
                                      const gasrec_train_config* cfg,
                                      const char* model_out_path,
                                      const char* report_csv_path,
                                      gasrec_train_stats* stats);

typedef struct gasrec_model gasrec_model;

GASREC_API gasrec_status gasrec_model_load(const char* path, gasrec_model** out);
GASREC_API void gasrec_model_free(gasrec_model* model);

/* ------------------------------------------------------------------ */
/* Recommendation                                                      */
/* ------------------------------------------------------------------ */

typedef struct gasrec_recommendation {
    double initial_price_gwei; /* 20th percentile of the forecast */
    double slope_gwei_per_step;
    double slope_normalized;   /* in [0, 1] */
    double coefficient;        /* in [e^-2, 1] */
    double urgency;
    double price_gwei;
    uint64_t price_wei;        /* rounded, floored at 1 wei */
} gasrec_recommendation;

/* Model-based recommendation at a block of the trace. The trace must hold
 * enough history before at_block to assemble the input window, and prices
 * must cover the aggregation grid. */
GASREC_API gasrec_status gasrec_recommend(const gasrec_model* model,
                                          const gasrec_trace* trace,
                                          const gasrec_eth_prices* prices,
                                          uint64_t at_block,
                                          double urgency,
                                          gasrec_recommendation* out);

typedef enum gasrec_strategy_kind {
    GASREC_STRATEGY_PROPOSED = 0,
    GASREC_STRATEGY_GETH = 1,
    GASREC_STRATEGY_EXPRESS = 2,
    GASREC_STRATEGY_LOOKAHEAD = 3,
    GASREC_STRATEGY_CONSTANT = 4
} gasrec_strategy_kind;

typedef enum gasrec_express_tier {
    GASREC_EXPRESS_SAFELOW = 0, /* 35th percentile */
    GASREC_EXPRESS_STANDARD = 1, /* 60th percentile */
    GASREC_EXPRESS_FAST = 2,     /* 90th percentile */
    GASREC_EXPRESS_FASTEST = 3   /* window maximum */
} gasrec_express_tier;

typedef struct gasrec_strategy {
    gasrec_strategy_kind kind;
    double urgency;              /* proposed */
    double scale;                /* geth */
    gasrec_express_tier tier;    /* express */
    uint32_t lookahead_blocks;   /* lookahead */
    uint64_t constant_price_wei; /* constant */
} gasrec_strategy;

/* Single-block price from a history-based baseline (geth / express /
 * lookahead / constant). Proposed requires gasrec_recommend. */
GASREC_API gasrec_status gasrec_recommend_baseline(const gasrec_trace* trace,
                                                   uint64_t at_block,
                                                   const gasrec_strategy* strategy,
                                                   uint64_t* price_wei_out);

/* ------------------------------------------------------------------ */
/* Backtesting                                                         */
/* ------------------------------------------------------------------ */

typedef struct gasrec_backtest_summary {
    char strategy[16];
    char parameter[24];
    uint64_t n_submitted;
    uint64_t n_included;
    uint64_t avg_price_wei;   /* over all submissions, integer floor */
    double avg_blocks_waited; /* over included transactions; NaN if none */
} gasrec_backtest_summary;

/* Simulates one transaction per block in [start_block, end_block] for each
 * strategy, draining pending transactions until last_block. model and
 * prices may be NULL when no proposed strategy is evaluated. Writes the
 * summary CSV when results_csv_path is non-NULL and fills summaries
 * (n_strategies entries) when non-NULL. */
GASREC_API gasrec_status gasrec_backtest(const gasrec_trace* trace,
                                         const gasrec_model* model,
                                         const gasrec_eth_prices* prices,
                                         uint64_t start_block,
                                         uint64_t end_block,
                                         uint64_t last_block,
                                         const gasrec_strategy* strategies,
                                         size_t n_strategies,
                                         const char* results_csv_path,
                                         gasrec_backtest_summary* summaries);

#ifdef __cplusplus
}
#endif

#endif /* GASREC_H */
