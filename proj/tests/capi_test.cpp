// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

// Exercises the shared library's C surface end to end: everything here goes
// through gasrec.h only, the way an external binding would.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

#include <gasrec.h>

namespace {

// Scratch directory under the system temp root, removed at process exit.
struct Scratch {
    std::filesystem::path dir;
    Scratch() {
        dir = std::filesystem::temp_directory_path() / "gasrec_capi_test";
        std::filesystem::remove_all(dir);
        std::filesystem::create_directory(dir);
    }
    ~Scratch() { std::filesystem::remove_all(dir); }
    std::string operator/(const char* name) const { return (dir / name).string(); }
};

Scratch scratch;

// Three days of blocks every 600 s with a daily price cycle, written straight
// in the trace CSV format.
std::string write_trace_fixture() {
    const std::string path = scratch / "trace.csv";
    std::FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs(
        "number,timestamp,min_gas_price_wei,max_gas_price_wei,avg_gas_price_wei,"
        "tx_count,gas_used,gas_limit\n",
        f);
    for (uint64_t i = 0; i < 432; ++i) {
        const double phase = 2.0 * 3.14159265358979 * static_cast<double>(i % 144) / 144.0;
        const uint64_t base = 20 + static_cast<uint64_t>(10.0 + 9.0 * std::sin(phase));
        const uint64_t min_wei = base * 1'000'000'000ull;
        std::fprintf(f, "%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu\n",
                     static_cast<unsigned long long>(1000 + i),
                     static_cast<unsigned long long>(600 * i),
                     static_cast<unsigned long long>(min_wei),
                     static_cast<unsigned long long>(min_wei + 2'000'000'000ull),
                     static_cast<unsigned long long>(min_wei + 1'000'000'000ull),
                     static_cast<unsigned long long>(1 + i % 4),
                     static_cast<unsigned long long>(4'000'000 + (i % 10) * 100'000),
                     static_cast<unsigned long long>(10'000'000));
    }
    std::fclose(f);
    return path;
}

std::string write_prices_fixture() {
    const std::string path = scratch / "usd.csv";
    std::FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs("timestamp,usd_price\n", f);
    for (uint64_t k = 0; k <= 40; ++k) {
        std::fprintf(f, "%llu,%s\n", static_cast<unsigned long long>(7200 * k),
                     (std::to_string(100.0 + 0.5 * static_cast<double>(k))).c_str());
    }
    std::fclose(f);
    return path;
}

}  // namespace

TEST_CASE("version and error text") {
    CHECK(gasrec_version() != nullptr);
    CHECK(std::string(gasrec_version()).find('.') != std::string::npos);
    // Before any failure the error text is empty but never null.
    CHECK(gasrec_last_error() != nullptr);
}

TEST_CASE("trace io round trip") {
    const auto path = write_trace_fixture();
    gasrec_trace* trace = nullptr;
    REQUIRE(gasrec_trace_read_csv(path.c_str(), &trace) == GASREC_OK);
    CHECK(gasrec_trace_block_count(trace) == 432);
    CHECK(gasrec_trace_first_block(trace) == 1000);
    CHECK(gasrec_trace_last_block(trace) == 1431);

    const auto copy_path = scratch / "copy.csv";
    REQUIRE(gasrec_trace_write_csv(trace, copy_path.c_str()) == GASREC_OK);
    gasrec_trace* copy = nullptr;
    REQUIRE(gasrec_trace_read_csv(copy_path.c_str(), &copy) == GASREC_OK);
    CHECK(gasrec_trace_block_count(copy) == 432);
    gasrec_trace_free(copy);
    gasrec_trace_free(trace);
}

TEST_CASE("status codes by failure class") {
    gasrec_trace* trace = nullptr;

    SUBCASE("argument errors") {
        CHECK(gasrec_trace_read_csv(nullptr, &trace) == GASREC_ERR_ARGUMENT);
        CHECK(gasrec_trace_read_csv("x.csv", nullptr) == GASREC_ERR_ARGUMENT);
        CHECK(std::string(gasrec_last_error()).size() > 0);
    }
    SUBCASE("io error for a missing file") {
        CHECK(gasrec_trace_read_csv((scratch / "absent.csv").c_str(), &trace) == GASREC_ERR_IO);
        CHECK(trace == nullptr);
    }
    SUBCASE("parse error for malformed content") {
        const auto bad = scratch / "bad.csv";
        std::FILE* f = std::fopen(bad.c_str(), "w");
        std::fputs("completely,wrong,header\n", f);
        std::fclose(f);
        CHECK(gasrec_trace_read_csv(bad.c_str(), &trace) == GASREC_ERR_PARSE);
    }
    SUBCASE("data error for invariant violations") {
        const auto bad = scratch / "invalid.csv";
        std::FILE* f = std::fopen(bad.c_str(), "w");
        std::fputs(
            "number,timestamp,min_gas_price_wei,max_gas_price_wei,avg_gas_price_wei,"
            "tx_count,gas_used,gas_limit\n"
            "1,1000,5,4,4,1,1,10\n",  // min > max
            f);
        std::fclose(f);
        CHECK(gasrec_trace_read_csv(bad.c_str(), &trace) == GASREC_ERR_DATA);
    }
    SUBCASE("transport error for an unreachable endpoint") {
        CHECK(gasrec_trace_fetch("http://127.0.0.1:9", 1, 2, 1, &trace) ==
              GASREC_ERR_TRANSPORT);
    }
}

TEST_CASE("full pipeline through the C surface") {
    const auto trace_path = write_trace_fixture();
    const auto prices_path = write_prices_fixture();

    gasrec_trace* trace = nullptr;
    gasrec_eth_prices* prices = nullptr;
    REQUIRE(gasrec_trace_read_csv(trace_path.c_str(), &trace) == GASREC_OK);
    REQUIRE(gasrec_eth_prices_read_csv(prices_path.c_str(), &prices) == GASREC_OK);

    SUBCASE("analysis report") {
        const auto report = scratch / "report.csv";
        REQUIRE(gasrec_analyze(trace, 3600, 12, report.c_str()) == GASREC_OK);
        CHECK(std::filesystem::file_size(report) > 100);
        // The promised max_lag clamp: a huge lag still succeeds.
        REQUIRE(gasrec_analyze(trace, 3600, 100000, report.c_str()) == GASREC_OK);
    }

    SUBCASE("preprocess, train, recommend, backtest") {
        gasrec_pipeline_config cfg;
        gasrec_pipeline_config_default(&cfg);
        CHECK(cfg.step_seconds == 300);
        CHECK(cfg.lag_steps == 288);
        cfg.step_seconds = 3600;
        cfg.lag_steps = 24;
        cfg.input_window = 6;
        cfg.horizon = 3;

        const auto windows = scratch / "windows.bin";
        REQUIRE(gasrec_preprocess(trace, prices, &cfg, windows.c_str()) == GASREC_OK);

        gasrec_train_config tcfg;
        gasrec_train_config_default(&tcfg);
        CHECK(tcfg.learning_rate == 1e-3);
        CHECK(tcfg.batch_size == 32);
        tcfg.epochs = 2;
        tcfg.hidden_size = 4;
        tcfg.seed = 11;

        const auto model_path = scratch / "model.bin";
        const auto report_path = scratch / "train.csv";
        gasrec_train_stats stats{};
        REQUIRE(gasrec_train(windows.c_str(), &tcfg, model_path.c_str(), report_path.c_str(),
                             &stats) == GASREC_OK);
        CHECK(stats.epochs_run == 2);
        CHECK(stats.best_validation_loss > 0.0);
        CHECK(std::filesystem::exists(report_path));

        gasrec_model* model = nullptr;
        REQUIRE(gasrec_model_load(model_path.c_str(), &model) == GASREC_OK);

        gasrec_recommendation rec{};
        REQUIRE(gasrec_recommend(model, trace, prices, 1431, 1.0, &rec) == GASREC_OK);
        CHECK(rec.urgency == 1.0);
        CHECK(rec.slope_normalized >= 0.0);
        CHECK(rec.slope_normalized <= 1.0);
        CHECK(rec.coefficient >= std::exp(-2.0) - 1e-12);
        CHECK(rec.coefficient <= 1.0 + 1e-12);
        CHECK(rec.price_gwei ==
              doctest::Approx(rec.initial_price_gwei * rec.coefficient * rec.urgency));
        CHECK(rec.price_wei >= 1);

        // Urgency scales the price linearly.
        gasrec_recommendation doubled{};
        REQUIRE(gasrec_recommend(model, trace, prices, 1431, 2.0, &doubled) == GASREC_OK);
        CHECK(doubled.price_gwei == doctest::Approx(2.0 * rec.price_gwei));

        // History-based baselines.
        gasrec_strategy strategy{};
        strategy.kind = GASREC_STRATEGY_GETH;
        strategy.scale = 1.0;
        uint64_t price = 0;
        REQUIRE(gasrec_recommend_baseline(trace, 1431, &strategy, &price) == GASREC_OK);
        CHECK(price > 0);

        strategy.kind = GASREC_STRATEGY_EXPRESS;
        strategy.tier = GASREC_EXPRESS_FASTEST;
        uint64_t fastest = 0;
        REQUIRE(gasrec_recommend_baseline(trace, 1431, &strategy, &fastest) == GASREC_OK);
        CHECK(fastest >= price);

        strategy.kind = GASREC_STRATEGY_LOOKAHEAD;
        strategy.lookahead_blocks = 5;
        CHECK(gasrec_recommend_baseline(trace, 1431, &strategy, &price) == GASREC_ERR_DATA);
        REQUIRE(gasrec_recommend_baseline(trace, 1400, &strategy, &price) == GASREC_OK);

        // Proposed cannot run through the baseline entry point.
        strategy.kind = GASREC_STRATEGY_PROPOSED;
        CHECK(gasrec_recommend_baseline(trace, 1431, &strategy, &price) ==
              GASREC_ERR_ARGUMENT);

        // Backtest over a tail range with two strategies.
        gasrec_strategy strategies[2]{};
        strategies[0].kind = GASREC_STRATEGY_PROPOSED;
        strategies[0].urgency = 1.0;
        strategies[1].kind = GASREC_STRATEGY_GETH;
        strategies[1].scale = 1.0;
        gasrec_backtest_summary summaries[2]{};
        const auto results = scratch / "results.csv";
        REQUIRE(gasrec_backtest(trace, model, prices, 1380, 1410, 1431, strategies, 2,
                                results.c_str(), summaries) == GASREC_OK);
        CHECK(std::string(summaries[0].strategy) == "proposed");
        CHECK(std::string(summaries[1].strategy) == "geth");
        CHECK(summaries[0].n_submitted == 31);
        CHECK(summaries[1].n_submitted == 31);
        CHECK(summaries[0].avg_price_wei > 0);
        CHECK(std::filesystem::exists(results));

        // Proposed without a model is an argument error.
        CHECK(gasrec_backtest(trace, nullptr, nullptr, 1380, 1410, 1431, strategies, 2,
                              nullptr, summaries) == GASREC_ERR_ARGUMENT);

        gasrec_model_free(model);
    }

    gasrec_eth_prices_free(prices);
    gasrec_trace_free(trace);
}
