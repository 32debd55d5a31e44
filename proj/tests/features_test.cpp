// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "features.hpp"
#include "testutil.hpp"

using namespace gasrec;
using namespace gasrec::testutil;

namespace {

// A flat ETH price series covering any test timestamp.
const std::vector<EthPricePoint> kFlatUsd{{0, 100.0}};

// lag defaults to one day of 300 s steps so aggregate_steps's config
// validation passes; pass a small lag only to helpers that take it directly.
PipelineConfig tiny_config(size_t lag = 288, size_t l = 3, size_t s = 2) {
    PipelineConfig config;
    config.step_seconds = 300;
    config.lag_steps = lag;
    config.input_window = l;
    config.horizon = s;
    config.smoothing = false;
    return config;
}

// Steps with explicit targets on a regular grid, all features mirroring the
// target so normalization effects are easy to predict.
std::vector<TimeStep> steps_from_targets(const std::vector<double>& targets) {
    std::vector<TimeStep> steps(targets.size());
    for (size_t i = 0; i < targets.size(); ++i) {
        steps[i].index = i;
        steps[i].start_ts = 300 * i;
        steps[i].target = targets[i];
        for (size_t f = 0; f < kFeatureCount; ++f) {
            steps[i].features[f] = targets[i];
        }
    }
    return steps;
}

}  // namespace

TEST_CASE("pipeline config validation") {
    PipelineConfig config;  // defaults
    CHECK_NOTHROW(config.validate());
    CHECK(config.lag_steps * config.step_seconds == 86400);

    SUBCASE("lag must equal one day of steps") {
        config.lag_steps = 100;
        CHECK_THROWS_AS(config.validate(), ArgumentError);
    }
    SUBCASE("step must divide a day") {
        config.step_seconds = 7;
        config.lag_steps = 86400 / 7;
        CHECK_THROWS_AS(config.validate(), ArgumentError);
    }
    SUBCASE("window lengths positive") {
        config.input_window = 0;
        CHECK_THROWS_AS(config.validate(), ArgumentError);
        config = PipelineConfig{};
        config.horizon = 0;
        CHECK_THROWS_AS(config.validate(), ArgumentError);
    }
    SUBCASE("threshold and split in range") {
        config.energy_threshold = 0.0;
        CHECK_THROWS_AS(config.validate(), ArgumentError);
        config = PipelineConfig{};
        config.energy_threshold = 1.5;
        CHECK_THROWS_AS(config.validate(), ArgumentError);
        config = PipelineConfig{};
        config.train_split = 0.0;
        CHECK_THROWS_AS(config.validate(), ArgumentError);
        config = PipelineConfig{};
        config.outlier_k = 0.0;
        CHECK_THROWS_AS(config.validate(), ArgumentError);
    }
}

TEST_CASE("step aggregation") {
    auto config = tiny_config();

    SUBCASE("means over the step's blocks") {
        // Three blocks inside [0,300): min prices 3,5,7 → target 5.
        auto trace = BlockTrace::from_records({
            make_block(1, 10, 3, 9, 6, 2),
            make_block(2, 150, 5, 15, 10, 4),
            make_block(3, 299, 7, 21, 14, 6),
            make_block(4, 300, 1, 1, 1, 1),  // next step
        });
        const auto steps = aggregate_steps(trace, kFlatUsd, config);
        REQUIRE(steps.size() == 2);
        CHECK(steps[0].start_ts == 0);
        CHECK(steps[0].target == doctest::Approx(5.0));
        CHECK(steps[0].features[kFeatMinPrice] == doctest::Approx(5.0));
        CHECK(steps[0].features[kFeatAvgPrice] == doctest::Approx(10.0));
        CHECK(steps[0].features[kFeatMaxPrice] == doctest::Approx(15.0));
        CHECK(steps[0].features[kFeatTxCount] == doctest::Approx(4.0));
        CHECK(steps[0].features[kFeatEthPrice] == doctest::Approx(100.0));
        CHECK_FALSE(steps[0].synthetic);
        CHECK(steps[1].start_ts == 300);
    }

    SUBCASE("grid is aligned to step multiples") {
        auto trace = BlockTrace::from_records({
            make_block(1, 650, 4, 4, 4, 1),
            make_block(2, 950, 6, 6, 6, 1),
        });
        const auto steps = aggregate_steps(trace, kFlatUsd, config);
        REQUIRE(steps.size() == 2);
        CHECK(steps[0].start_ts == 600);
        CHECK(steps[1].start_ts == 900);
    }

    SUBCASE("priceless steps interpolate and flag synthetic") {
        // Steps at 0 and 600 observed (targets 4 and 6); step 300 has one
        // empty block, so its prices interpolate to 5.
        auto trace = BlockTrace::from_records({
            make_block(1, 10, 4, 4, 4, 2),
            make_empty_block(2, 350),
            make_block(3, 610, 6, 6, 6, 4),
        });
        const auto steps = aggregate_steps(trace, kFlatUsd, config);
        REQUIRE(steps.size() == 3);
        CHECK(steps[1].target == doctest::Approx(5.0));
        CHECK(steps[1].features[kFeatMinPrice] == doctest::Approx(5.0));
        CHECK(steps[1].synthetic);
        // The empty block still counts as zero transactions, observed.
        CHECK(steps[1].features[kFeatTxCount] == doctest::Approx(0.0));
        CHECK_FALSE(steps[0].synthetic);
        CHECK_FALSE(steps[2].synthetic);
    }

    SUBCASE("steps with no blocks at all interpolate everything") {
        auto trace = BlockTrace::from_records({
            make_block(1, 10, 4, 4, 4, 2),
            make_block(2, 650, 6, 6, 6, 4),  // nothing lands in [300,600)
        });
        const auto steps = aggregate_steps(trace, kFlatUsd, config);
        REQUIRE(steps.size() == 3);
        CHECK(steps[1].synthetic);
        CHECK(steps[1].target == doctest::Approx(5.0));
        CHECK(steps[1].features[kFeatTxCount] == doctest::Approx(3.0));
    }

    SUBCASE("eth price is the carried-forward value at the step start") {
        const std::vector<EthPricePoint> usd{{0, 100.0}, {250, 140.0}, {300, 200.0}};
        auto trace = BlockTrace::from_records({
            make_block(1, 10, 4, 4, 4, 2),
            make_block(2, 400, 6, 6, 6, 4),
        });
        const auto steps = aggregate_steps(trace, usd, config);
        REQUIRE(steps.size() == 2);
        CHECK(steps[0].features[kFeatEthPrice] == doctest::Approx(100.0));
        CHECK(steps[1].features[kFeatEthPrice] == doctest::Approx(200.0));
    }

    SUBCASE("prices must cover the grid start") {
        const std::vector<EthPricePoint> late{{10'000, 100.0}};
        auto trace = BlockTrace::from_records({make_block(1, 10, 4, 4, 4, 2)});
        CHECK_THROWS_AS(aggregate_steps(trace, late, config), DataError);
    }

    SUBCASE("empty trace rejected") {
        CHECK_THROWS_AS(aggregate_steps(BlockTrace(), kFlatUsd, config), ArgumentError);
    }

    SUBCASE("all-empty trace has no target anywhere") {
        auto trace = BlockTrace::from_records({
            make_empty_block(1, 10),
            make_empty_block(2, 20),
        });
        CHECK_THROWS_AS(aggregate_steps(trace, kFlatUsd, config), DataError);
    }
}

TEST_CASE("lag feature") {
    // Targets 1..6; lag 2 drops the first two steps and each survivor's lag
    // feature is the average price from two steps earlier.
    auto steps = steps_from_targets({1, 2, 3, 4, 5, 6});
    const auto lagged = add_lag(steps, 2);
    REQUIRE(lagged.size() == 4);
    for (size_t i = 0; i < lagged.size(); ++i) {
        CHECK(lagged[i].index == i);  // re-indexed
        CHECK(lagged[i].target == doctest::Approx(3.0 + i));
        CHECK(lagged[i].features[kFeatAvgPriceLag] == doctest::Approx(1.0 + i));
        CHECK(lagged[i].features[kFeatAvgPrice] == doctest::Approx(3.0 + i));
    }

    SUBCASE("series shorter than the lag is rejected") {
        CHECK_THROWS_AS(add_lag(steps_from_targets({1, 2}), 2), ArgumentError);
        CHECK_THROWS_AS(add_lag(steps_from_targets({1, 2, 3}), 5), ArgumentError);
    }
}

TEST_CASE("outlier removal") {
    SUBCASE("population statistics decide the cut") {
        // 99 zeros and one 1000: mean 10, population std ≈ 99.499. With
        // k = 1.5 the spike (|1000-10| = 990 > 149.2) is deleted; zeros stay.
        std::vector<double> targets(100, 0.0);
        targets[50] = 1000.0;
        auto steps = steps_from_targets(targets);
        const auto cleaned = remove_outliers(steps, 1.5);
        REQUIRE(cleaned.size() == 100);
        CHECK(cleaned[50].target == doctest::Approx(0.0));
        CHECK(cleaned[50].synthetic);
        CHECK_FALSE(cleaned[49].synthetic);
    }

    SUBCASE("interior gaps interpolate linearly") {
        // {10, 10, 100, 13, 10}: mean 28.6, pop std ≈ 35.9; k=1 cuts 100.
        auto steps = steps_from_targets({10, 10, 100, 13, 10});
        const auto cleaned = remove_outliers(steps, 1.0);
        REQUIRE(cleaned.size() == 5);
        CHECK(cleaned[2].target == doctest::Approx(11.5));
        CHECK(cleaned[2].features[kFeatMinPrice] == doctest::Approx(11.5));
        CHECK(cleaned[2].synthetic);
    }

    SUBCASE("boundary deletions extend the nearest survivor") {
        // {100, 10, 11, 12, 10}: the leading 100 is the outlier.
        auto steps = steps_from_targets({100, 10, 11, 12, 10});
        const auto cleaned = remove_outliers(steps, 1.0);
        CHECK(cleaned[0].target == doctest::Approx(10.0));
        CHECK(cleaned[0].synthetic);
    }

    SUBCASE("huge k keeps everything untouched") {
        auto steps = steps_from_targets({5, 50, 500});
        const auto cleaned = remove_outliers(steps, 1e9);
        CHECK(cleaned == steps);
    }

    SUBCASE("all-outlier input cannot be repaired") {
        // Two points, both 1 std from the mean; k=0.5 deletes both.
        auto steps = steps_from_targets({0, 10});
        CHECK_THROWS_AS(remove_outliers(steps, 0.5), DataError);
    }

    SUBCASE("preconditions") {
        auto steps = steps_from_targets({1, 2, 3});
        CHECK_THROWS_AS(remove_outliers(steps, 0.0), ArgumentError);
        CHECK_THROWS_AS(remove_outliers(steps_from_targets({1}), 1.5), ArgumentError);
    }
}

TEST_CASE("normalization") {
    SUBCASE("fit and round trip") {
        auto steps = steps_from_targets({2, 4, 6, 10});
        const auto params = fit_normalizer(steps);
        CHECK(params.target_min == doctest::Approx(2.0));
        CHECK(params.target_max == doctest::Approx(10.0));

        const auto normalized = normalize(steps, params);
        CHECK(normalized[0].target == doctest::Approx(0.0));
        CHECK(normalized[3].target == doctest::Approx(1.0));
        CHECK(normalized[1].target == doctest::Approx(0.25));
        for (size_t i = 0; i < steps.size(); ++i) {
            CHECK(denormalize_target(normalized[i].target, params) ==
                  doctest::Approx(steps[i].target).epsilon(1e-12));
        }
    }

    SUBCASE("values beyond the training extremes clamp") {
        auto train = steps_from_targets({2, 4});
        const auto params = fit_normalizer(train);
        auto outside = steps_from_targets({0, 8});
        const auto normalized = normalize(outside, params);
        CHECK(normalized[0].target == 0.0);
        CHECK(normalized[1].target == 1.0);
        CHECK(normalized[1].features[kFeatAvgPrice] == 1.0);
        // The inverse map is affine, not clamped: it must still invert values
        // outside [0,1] that a forecaster may emit.
        CHECK(denormalize_target(1.5, params) == doctest::Approx(5.0));
    }

    SUBCASE("constant dimensions cannot be scaled") {
        auto steps = steps_from_targets({3, 3, 3});
        CHECK_THROWS_AS(fit_normalizer(steps), DataError);

        // Constant single feature with varying target: still rejected, and
        // the message names the offending feature.
        auto mixed = steps_from_targets({1, 2, 3});
        for (auto& step : mixed) {
            step.features[kFeatEthPrice] = 250.0;
        }
        try {
            fit_normalizer(mixed);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("eth_price") != std::string::npos);
        }
    }

    SUBCASE("needs two steps") {
        CHECK_THROWS_AS(fit_normalizer(steps_from_targets({1})), ArgumentError);
    }
}

TEST_CASE("window assembly") {
    auto config = tiny_config(/*lag=*/2, /*l=*/3, /*s=*/2);

    SUBCASE("counts") {
        // n = l + s → exactly one sample; below that, none.
        CHECK(make_windows(steps_from_targets({1, 2, 3, 4, 5}), config).size() == 1);
        CHECK(make_windows(steps_from_targets({1, 2, 3, 4}), config).empty());
        // n=10, l=3, s=2 → 6 samples.
        CHECK(make_windows(steps_from_targets({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), config).size() ==
              6);
    }

    SUBCASE("first sample covers steps 0..l-1 and targets l..l+s-1") {
        const auto windows = make_windows(steps_from_targets({1, 2, 3, 4, 5, 6}), config);
        REQUIRE(windows.size() == 2);
        const auto& first = windows[0];
        REQUIRE(first.inputs.rows() == 3);
        REQUIRE(first.inputs.cols() == 6);
        CHECK(first.inputs(0, kFeatAvgPrice) == doctest::Approx(1.0));
        CHECK(first.inputs(2, kFeatAvgPrice) == doctest::Approx(3.0));
        REQUIRE(first.targets.size() == 2);
        CHECK(first.targets(0) == doctest::Approx(4.0));
        CHECK(first.targets(1) == doctest::Approx(5.0));
        // Second sample shifts by one step.
        CHECK(windows[1].inputs(0, kFeatAvgPrice) == doctest::Approx(2.0));
        CHECK(windows[1].targets(0) == doctest::Approx(5.0));
    }

    SUBCASE("smoothing applies to inputs only") {
        auto smooth_config = config;
        smooth_config.smoothing = true;
        smooth_config.energy_threshold = 0.6;
        smooth_config.input_window = 8;
        smooth_config.horizon = 2;
        // A zig-zag input: smoothing must change inputs but never targets.
        std::vector<double> targets;
        for (size_t i = 0; i < 12; ++i) {
            targets.push_back(i % 2 == 0 ? 0.2 : 0.8);
        }
        auto steps = steps_from_targets(targets);
        const auto smoothed = make_windows(steps, smooth_config);
        auto raw_config = smooth_config;
        raw_config.smoothing = false;
        const auto raw = make_windows(steps, raw_config);
        REQUIRE(smoothed.size() == raw.size());
        REQUIRE(!smoothed.empty());
        CHECK(bitwise_equal(smoothed[0].targets, raw[0].targets));
        CHECK((smoothed[0].inputs - raw[0].inputs).cwiseAbs().maxCoeff() > 1e-6);
        // Smoothed inputs stay inside the normalized range.
        CHECK(smoothed[0].inputs.minCoeff() >= 0.0);
        CHECK(smoothed[0].inputs.maxCoeff() <= 1.0);
    }
}

TEST_CASE("full preprocessing pipeline") {
    // 2 days of 10-minute steps needs lag 144 at step 600; use a small grid:
    // step 300 with lag 288 needs a day of data — instead run a reduced config
    // through the invariant: lag_steps × step_seconds = 86400.
    PipelineConfig config;
    config.step_seconds = 3600;
    config.lag_steps = 24;
    config.input_window = 6;
    config.horizon = 3;
    config.smoothing = false;
    config.outlier_k = 3.0;
    config.train_split = 0.7;

    // Blocks every 600 s for 4 days, prices on a daily sine; tx counts vary so
    // every feature column has spread for the normalizer.
    std::vector<BlockRecord> records;
    const size_t n_blocks = 4 * 144;
    for (size_t i = 0; i < n_blocks; ++i) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(i % 144) / 144.0;
        const uint64_t price = 20 + static_cast<uint64_t>(10.0 * std::sin(phase) + 10.0);
        records.push_back(make_block(1000 + i, 600 * i, price, price + 10, price + 5, 1 + i % 5));
    }
    auto trace = BlockTrace::from_records(std::move(records));
    const auto usd = make_usd_series(0, 600 * n_blocks);

    const auto dataset = preprocess(trace, usd, config);
    CHECK(dataset.config == config);
    // 96 hourly steps minus lag 24 → 72 steps → 72 - 6 - 3 + 1 = 64 windows.
    CHECK(dataset.samples.size() == 64);
    for (const auto& sample : dataset.samples) {
        CHECK(sample.inputs.minCoeff() >= 0.0);
        CHECK(sample.inputs.maxCoeff() <= 1.0);
        CHECK(sample.targets.minCoeff() >= 0.0);
        CHECK(sample.targets.maxCoeff() <= 1.0);
    }

    SUBCASE("windows file round trip is exact") {
        TempDir dir;
        const auto path = (dir / "windows.bin").string();
        save_windows(dataset, path);
        const auto loaded = load_windows(path);
        CHECK(loaded.config == dataset.config);
        CHECK(loaded.params == dataset.params);
        REQUIRE(loaded.samples.size() == dataset.samples.size());
        for (size_t i = 0; i < dataset.samples.size(); ++i) {
            CHECK(bitwise_equal(loaded.samples[i].inputs, dataset.samples[i].inputs));
            CHECK(bitwise_equal(loaded.samples[i].targets, dataset.samples[i].targets));
        }
    }

    SUBCASE("truncated windows file fails cleanly") {
        TempDir dir;
        const auto path = (dir / "windows.bin").string();
        save_windows(dataset, path);
        auto bytes = read_file(path);
        write_file(path, bytes.substr(0, bytes.size() / 2));
        CHECK_THROWS_AS(load_windows(path), IoError);
        write_file(path, "GWOOPS" + bytes.substr(6));
        CHECK_THROWS_AS(load_windows(path), IoError);
    }

    SUBCASE("deterministic across runs") {
        const auto again = preprocess(trace, usd, config);
        REQUIRE(again.samples.size() == dataset.samples.size());
        for (size_t i = 0; i < dataset.samples.size(); ++i) {
            CHECK(bitwise_equal(again.samples[i].inputs, dataset.samples[i].inputs));
            CHECK(bitwise_equal(again.samples[i].targets, dataset.samples[i].targets));
        }
        CHECK(again.params == dataset.params);
    }
}

TEST_CASE("inference-side series") {
    PipelineConfig config;
    config.step_seconds = 3600;
    config.lag_steps = 24;
    config.input_window = 4;
    config.horizon = 2;
    config.smoothing = false;

    std::vector<BlockRecord> records;
    for (size_t i = 0; i < 2 * 144; ++i) {  // 2 days, one block per 600 s
        const uint64_t price = 10 + i % 7;
        // i % 5 is coprime with the 6 blocks per hourly step, so per-step
        // transaction counts vary and every feature column normalizes.
        records.push_back(make_block(1000 + i, 600 * i, price, price + 4, price + 2, 1 + i % 5));
    }
    auto trace = BlockTrace::from_records(std::move(records));
    const auto usd = make_usd_series(0, 600 * 2 * 144);
    auto steps = add_lag(aggregate_steps(trace, usd, config), config.lag_steps);
    const auto params = fit_normalizer(steps);

    const auto series = build_inference_steps(trace, usd, config, params);
    REQUIRE(series.steps.size() == 24);  // 48 hourly steps minus lag

    SUBCASE("completed-step bookkeeping never looks into the open interval") {
        const uint64_t first_start = series.steps.front().start_ts;
        // Before the first interval ends: nothing usable.
        CHECK_FALSE(last_completed_step(series, first_start).has_value());
        CHECK_FALSE(last_completed_step(series, first_start + 3599).has_value());
        // Exactly at the first interval's end: step 0 is complete.
        auto idx = last_completed_step(series, first_start + 3600);
        REQUIRE(idx.has_value());
        CHECK(*idx == 0);
        // Mid second interval: still step 0.
        idx = last_completed_step(series, first_start + 3600 + 1800);
        REQUIRE(idx.has_value());
        CHECK(*idx == 0);
        // Far beyond the last step: clamps to the final index.
        idx = last_completed_step(series, first_start + 1'000'000'000);
        REQUIRE(idx.has_value());
        CHECK(*idx == series.steps.size() - 1);
    }

    SUBCASE("window slices the trailing l steps") {
        const auto window = window_ending_at(series, 5);
        REQUIRE(window.rows() == 4);
        REQUIRE(window.cols() == 6);
        for (int r = 0; r < 4; ++r) {
            for (size_t f = 0; f < kFeatureCount; ++f) {
                CHECK(window(r, static_cast<int>(f)) ==
                      doctest::Approx(series.steps[2 + r].features[f]));
            }
        }
        CHECK_THROWS_AS(window_ending_at(series, 2), ArgumentError);
        CHECK_THROWS_AS(window_ending_at(series, series.steps.size()), ArgumentError);
    }
}
