// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "gasrec.h"

#include <cstdio>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "analytics.hpp"
#include "backtest.hpp"
#include "block_trace.hpp"
#include "errors.hpp"
#include "features.hpp"
#include "model_io.hpp"
#include "recommend.hpp"
#include "rpc_client.hpp"
#include "training.hpp"
#include "wei.hpp"

struct gasrec_trace {
    gasrec::BlockTrace trace;
};

struct gasrec_eth_prices {
    std::vector<gasrec::EthPricePoint> prices;
};

struct gasrec_model {
    gasrec::ModelBundle bundle;
};

namespace {

thread_local std::string t_last_error;

// Runs the body and maps the exception taxonomy onto status codes.
template <typename F>
gasrec_status guarded(F&& body) noexcept {
    try {
        body();
        return GASREC_OK;
    } catch (const gasrec::ArgumentError& e) {
        t_last_error = e.what();
        return GASREC_ERR_ARGUMENT;
    } catch (const gasrec::ParseError& e) {  // before DataError: ParseError refines it
        t_last_error = e.what();
        return GASREC_ERR_PARSE;
    } catch (const gasrec::DataError& e) {
        t_last_error = e.what();
        return GASREC_ERR_DATA;
    } catch (const gasrec::TransportError& e) {
        t_last_error = e.what();
        return GASREC_ERR_TRANSPORT;
    } catch (const gasrec::TrainError& e) {
        t_last_error = e.what();
        return GASREC_ERR_TRAIN;
    } catch (const gasrec::IoError& e) {
        t_last_error = e.what();
        return GASREC_ERR_IO;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return GASREC_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown error";
        return GASREC_ERR_INTERNAL;
    }
}

void require(bool condition, const char* message) {
    if (!condition) {
        throw gasrec::ArgumentError(message);
    }
}

gasrec::PipelineConfig to_pipeline_config(const gasrec_pipeline_config& cfg) {
    gasrec::PipelineConfig out;
    out.step_seconds = cfg.step_seconds;
    out.lag_steps = cfg.lag_steps;
    out.outlier_k = cfg.outlier_k;
    out.energy_threshold = cfg.energy_threshold;
    out.input_window = cfg.input_window;
    out.horizon = cfg.horizon;
    out.smoothing = cfg.smoothing != 0;
    out.train_split = cfg.train_split;
    return out;
}

gasrec::TrainConfig to_train_config(const gasrec_train_config& cfg) {
    gasrec::TrainConfig out;
    out.learning_rate = cfg.learning_rate;
    out.beta1 = cfg.beta1;
    out.beta2 = cfg.beta2;
    out.epsilon = cfg.epsilon;
    out.epochs = cfg.epochs;
    out.batch_size = cfg.batch_size;
    out.seed = cfg.seed;
    out.split_ratio = cfg.split_ratio;
    out.hidden_size = cfg.hidden_size;
    out.grad_clip = cfg.grad_clip;
    out.slope_from_targets = cfg.slope_from_targets != 0;
    return out;
}

gasrec::ExpressTier to_express_tier(gasrec_express_tier tier) {
    switch (tier) {
        case GASREC_EXPRESS_SAFELOW:
            return gasrec::ExpressTier::kSafeLow;
        case GASREC_EXPRESS_STANDARD:
            return gasrec::ExpressTier::kStandard;
        case GASREC_EXPRESS_FAST:
            return gasrec::ExpressTier::kFast;
        case GASREC_EXPRESS_FASTEST:
            return gasrec::ExpressTier::kFastest;
    }
    throw gasrec::ArgumentError("unknown express tier");
}

gasrec::Strategy to_strategy(const gasrec_strategy& strategy) {
    switch (strategy.kind) {
        case GASREC_STRATEGY_PROPOSED:
            return gasrec::ProposedStrategy{strategy.urgency};
        case GASREC_STRATEGY_GETH:
            return gasrec::GethStrategy{strategy.scale};
        case GASREC_STRATEGY_EXPRESS:
            return gasrec::ExpressStrategy{to_express_tier(strategy.tier)};
        case GASREC_STRATEGY_LOOKAHEAD:
            return gasrec::LookAheadStrategy{strategy.lookahead_blocks};
        case GASREC_STRATEGY_CONSTANT:
            return gasrec::ConstantStrategy{gasrec::Wei(strategy.constant_price_wei)};
    }
    throw gasrec::ArgumentError("unknown strategy kind");
}

void copy_string(char* dst, size_t capacity, const std::string& src) {
    std::snprintf(dst, capacity, "%s", src.c_str());
}

std::span<const gasrec::EthPricePoint> price_span(const gasrec_eth_prices* prices) {
    if (prices == nullptr) {
        return {};
    }
    return prices->prices;
}

}  // namespace

extern "C" {

const char* gasrec_last_error(void) {
    return t_last_error.c_str();
}

const char* gasrec_version(void) {
    return "0.1.0";
}

gasrec_status gasrec_trace_fetch(const char* rpc_url, uint64_t from_block, uint64_t to_block,
                                 uint32_t parallelism, gasrec_trace** out) {
    return guarded([&] {
        require(rpc_url != nullptr, "rpc_url is NULL");
        require(out != nullptr, "out is NULL");
        gasrec::FetchOptions options;
        if (parallelism > 0) {
            options.parallelism = parallelism;
        }
        auto trace = gasrec::fetch_trace(rpc_url, from_block, to_block, options);
        *out = new gasrec_trace{std::move(trace)};
    });
}

gasrec_status gasrec_trace_read_csv(const char* path, gasrec_trace** out) {
    return guarded([&] {
        require(path != nullptr, "path is NULL");
        require(out != nullptr, "out is NULL");
        *out = new gasrec_trace{gasrec::read_trace_csv(path)};
    });
}

gasrec_status gasrec_trace_write_csv(const gasrec_trace* trace, const char* path) {
    return guarded([&] {
        require(trace != nullptr, "trace is NULL");
        require(path != nullptr, "path is NULL");
        gasrec::write_trace_csv(trace->trace, path);
    });
}

void gasrec_trace_free(gasrec_trace* trace) {
    delete trace;
}

uint64_t gasrec_trace_block_count(const gasrec_trace* trace) {
    return trace == nullptr ? 0 : trace->trace.size();
}

uint64_t gasrec_trace_first_block(const gasrec_trace* trace) {
    return trace == nullptr || trace->trace.empty() ? 0 : trace->trace.first_number();
}

uint64_t gasrec_trace_last_block(const gasrec_trace* trace) {
    return trace == nullptr || trace->trace.empty() ? 0 : trace->trace.last_number();
}

gasrec_status gasrec_eth_prices_read_csv(const char* path, gasrec_eth_prices** out) {
    return guarded([&] {
        require(path != nullptr, "path is NULL");
        require(out != nullptr, "out is NULL");
        *out = new gasrec_eth_prices{gasrec::read_eth_price_csv(path)};
    });
}

void gasrec_eth_prices_free(gasrec_eth_prices* prices) {
    delete prices;
}

gasrec_status gasrec_analyze(const gasrec_trace* trace, uint32_t interval_seconds,
                             uint32_t max_lag, const char* report_csv_path) {
    return guarded([&] {
        require(trace != nullptr, "trace is NULL");
        require(report_csv_path != nullptr, "report path is NULL");
        // Clamp the lag to what the aggregated series can support.
        const auto series = gasrec::aggregate_interval(
            trace->trace, gasrec::BlockField::kMinGasPrice, interval_seconds);
        size_t lag = max_lag;
        if (!series.points.empty() && lag >= series.points.size()) {
            lag = series.points.size() - 1;
        }
        gasrec::write_analysis_report(trace->trace, interval_seconds, lag, report_csv_path);
    });
}

void gasrec_pipeline_config_default(gasrec_pipeline_config* cfg) {
    if (cfg == nullptr) {
        return;
    }
    const gasrec::PipelineConfig defaults;
    cfg->step_seconds = static_cast<uint32_t>(defaults.step_seconds);
    cfg->lag_steps = static_cast<uint32_t>(defaults.lag_steps);
    cfg->outlier_k = defaults.outlier_k;
    cfg->energy_threshold = defaults.energy_threshold;
    cfg->input_window = static_cast<uint32_t>(defaults.input_window);
    cfg->horizon = static_cast<uint32_t>(defaults.horizon);
    cfg->smoothing = defaults.smoothing ? 1 : 0;
    cfg->train_split = defaults.train_split;
}

gasrec_status gasrec_preprocess(const gasrec_trace* trace, const gasrec_eth_prices* prices,
                                const gasrec_pipeline_config* cfg,
                                const char* windows_out_path) {
    return guarded([&] {
        require(trace != nullptr, "trace is NULL");
        require(prices != nullptr, "prices is NULL");
        require(cfg != nullptr, "config is NULL");
        require(windows_out_path != nullptr, "output path is NULL");
        const auto dataset =
            gasrec::preprocess(trace->trace, prices->prices, to_pipeline_config(*cfg));
        gasrec::save_windows(dataset, windows_out_path);
    });
}

void gasrec_train_config_default(gasrec_train_config* cfg) {
    if (cfg == nullptr) {
        return;
    }
    const gasrec::TrainConfig defaults;
    cfg->learning_rate = defaults.learning_rate;
    cfg->beta1 = defaults.beta1;
    cfg->beta2 = defaults.beta2;
    cfg->epsilon = defaults.epsilon;
    cfg->epochs = static_cast<uint32_t>(defaults.epochs);
    cfg->batch_size = static_cast<uint32_t>(defaults.batch_size);
    cfg->seed = defaults.seed;
    cfg->split_ratio = defaults.split_ratio;
    cfg->hidden_size = static_cast<uint32_t>(defaults.hidden_size);
    cfg->grad_clip = defaults.grad_clip;
    cfg->slope_from_targets = defaults.slope_from_targets ? 1 : 0;
}

gasrec_status gasrec_train(const char* windows_path, const gasrec_train_config* cfg,
                           const char* model_out_path, const char* report_csv_path,
                           gasrec_train_stats* stats) {
    return guarded([&] {
        require(windows_path != nullptr, "windows path is NULL");
        require(cfg != nullptr, "config is NULL");
        require(model_out_path != nullptr, "model output path is NULL");
        const auto dataset = gasrec::load_windows(windows_path);
        auto [bundle, report] = gasrec::train(dataset, to_train_config(*cfg));
        gasrec::save_model(bundle, model_out_path);
        if (report_csv_path != nullptr) {
            gasrec::write_train_report_csv(report, report_csv_path);
        }
        if (stats != nullptr) {
            stats->epochs_run = static_cast<uint32_t>(report.train_loss.size());
            stats->best_epoch = static_cast<uint32_t>(report.best_epoch);
            stats->best_validation_loss =
                report.val_loss.empty() ? 0.0 : report.val_loss[report.best_epoch];
            stats->final_training_loss =
                report.train_loss.empty() ? 0.0 : report.train_loss.back();
            stats->wall_seconds = report.wall_seconds;
        }
    });
}

gasrec_status gasrec_model_load(const char* path, gasrec_model** out) {
    return guarded([&] {
        require(path != nullptr, "path is NULL");
        require(out != nullptr, "out is NULL");
        *out = new gasrec_model{gasrec::load_model(path)};
    });
}

void gasrec_model_free(gasrec_model* model) {
    delete model;
}

gasrec_status gasrec_recommend(const gasrec_model* model, const gasrec_trace* trace,
                               const gasrec_eth_prices* prices, uint64_t at_block,
                               double urgency, gasrec_recommendation* out) {
    return guarded([&] {
        require(model != nullptr, "model is NULL");
        require(trace != nullptr, "trace is NULL");
        require(prices != nullptr, "prices is NULL");
        require(out != nullptr, "out is NULL");
        const auto rec = gasrec::recommend_proposed(model->bundle, trace->trace, prices->prices,
                                                    at_block, urgency);
        out->initial_price_gwei = rec.initial_price_gwei;
        out->slope_gwei_per_step = rec.slope_gwei_per_step;
        out->slope_normalized = rec.slope_normalized;
        out->coefficient = rec.coefficient;
        out->urgency = rec.urgency;
        out->price_gwei = rec.price_gwei;
        out->price_wei = gasrec::wei_to_u64(rec.price_wei);
    });
}

gasrec_status gasrec_recommend_baseline(const gasrec_trace* trace, uint64_t at_block,
                                        const gasrec_strategy* strategy,
                                        uint64_t* price_wei_out) {
    return guarded([&] {
        require(trace != nullptr, "trace is NULL");
        require(strategy != nullptr, "strategy is NULL");
        require(price_wei_out != nullptr, "out is NULL");
        require(strategy->kind != GASREC_STRATEGY_PROPOSED,
                "the proposed strategy needs a model; use gasrec_recommend");
        gasrec::Wei price;
        switch (strategy->kind) {
            case GASREC_STRATEGY_GETH:
                price = gasrec::recommend_geth(trace->trace, at_block, strategy->scale);
                break;
            case GASREC_STRATEGY_EXPRESS:
                price = gasrec::recommend_express(trace->trace, at_block,
                                                  to_express_tier(strategy->tier));
                break;
            case GASREC_STRATEGY_LOOKAHEAD:
                price = gasrec::recommend_lookahead(trace->trace, at_block,
                                                    strategy->lookahead_blocks);
                break;
            case GASREC_STRATEGY_CONSTANT:
                require(strategy->constant_price_wei >= 1,
                        "constant strategy price must be at least 1 wei");
                price = gasrec::Wei(strategy->constant_price_wei);
                break;
            default:
                throw gasrec::ArgumentError("unknown strategy kind");
        }
        *price_wei_out = gasrec::wei_to_u64(price);
    });
}

gasrec_status gasrec_backtest(const gasrec_trace* trace, const gasrec_model* model,
                              const gasrec_eth_prices* prices, uint64_t start_block,
                              uint64_t end_block, uint64_t last_block,
                              const gasrec_strategy* strategies, size_t n_strategies,
                              const char* results_csv_path,
                              gasrec_backtest_summary* summaries) {
    return guarded([&] {
        require(trace != nullptr, "trace is NULL");
        require(strategies != nullptr && n_strategies > 0, "no strategies given");
        std::vector<gasrec::Strategy> converted;
        converted.reserve(n_strategies);
        for (size_t i = 0; i < n_strategies; ++i) {
            converted.push_back(to_strategy(strategies[i]));
        }
        const gasrec::ModelBundle* bundle = model != nullptr ? &model->bundle : nullptr;
        const auto results = gasrec::compare(trace->trace, bundle, price_span(prices),
                                             start_block, end_block, last_block, converted);
        if (results_csv_path != nullptr) {
            gasrec::write_backtest_csv(results, results_csv_path);
        }
        if (summaries != nullptr) {
            for (size_t i = 0; i < results.size(); ++i) {
                gasrec_backtest_summary& out = summaries[i];
                copy_string(out.strategy, sizeof out.strategy, results[i].strategy);
                copy_string(out.parameter, sizeof out.parameter, results[i].parameter);
                out.n_submitted = results[i].n_submitted;
                out.n_included = results[i].n_included;
                out.avg_price_wei = gasrec::wei_to_u64(results[i].avg_price_wei);
                out.avg_blocks_waited = results[i].avg_blocks_waited;
            }
        }
    });
}

}  // extern "C"
