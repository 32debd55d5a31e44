// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "binary_io.hpp"
#include "errors.hpp"
#include "fourier.hpp"
#include "wei.hpp"

namespace gasrec {

namespace {

constexpr char kWindowsMagic[8] = {'G', 'W', 'I', 'N', 'v', '1', '\0', '\0'};

double clamp01(double value) {
    return std::clamp(value, 0.0, 1.0);
}

// Linearly fills `values` at the positions where `observed` is false, using
// the nearest observed neighbours; boundary gaps take the nearest observed
// value. At least one position must be observed.
void interpolate_gaps(std::vector<double>& values, const std::vector<char>& observed) {
    const size_t n = values.size();
    size_t first = n, last = n;
    for (size_t i = 0; i < n; ++i) {
        if (observed[i]) {
            if (first == n) {
                first = i;
            }
            last = i;
        }
    }
    if (first == n) {
        throw DataError("cannot interpolate a series with no observed points");
    }
    for (size_t i = 0; i < first; ++i) {
        values[i] = values[first];
    }
    for (size_t i = last + 1; i < n; ++i) {
        values[i] = values[last];
    }
    size_t prev = first;
    for (size_t i = first + 1; i <= last; ++i) {
        if (!observed[i]) {
            continue;
        }
        for (size_t j = prev + 1; j < i; ++j) {
            const double w = static_cast<double>(j - prev) / static_cast<double>(i - prev);
            values[j] = values[prev] + w * (values[i] - values[prev]);
        }
        prev = i;
    }
}

void check_finite_positive_targets(std::span<const TimeStep> steps) {
    for (const auto& step : steps) {
        for (double f : step.features) {
            if (!std::isfinite(f)) {
                std::ostringstream msg;
                msg << "step " << step.index << ": non-finite feature";
                throw DataError(msg.str());
            }
        }
        if (!std::isfinite(step.target) || step.target <= 0) {
            std::ostringstream msg;
            msg << "step " << step.index << ": target must be positive and finite";
            throw DataError(msg.str());
        }
    }
}

// Smooths each input column in place and re-clamps to the normalized range;
// truncating the spectrum can overshoot [0,1] slightly (Gibbs ringing).
void smooth_inputs(Eigen::MatrixXd& inputs, double energy_threshold) {
    std::vector<double> column(static_cast<size_t>(inputs.rows()));
    for (Eigen::Index c = 0; c < inputs.cols(); ++c) {
        for (Eigen::Index r = 0; r < inputs.rows(); ++r) {
            column[static_cast<size_t>(r)] = inputs(r, c);
        }
        const std::vector<double> smoothed = fourier_smooth(column, energy_threshold);
        for (Eigen::Index r = 0; r < inputs.rows(); ++r) {
            inputs(r, c) = clamp01(smoothed[static_cast<size_t>(r)]);
        }
    }
}

std::vector<TimeStep> aggregate_lag_normalize(const BlockTrace& trace,
                                              std::span<const EthPricePoint> eth_prices,
                                              const PipelineConfig& config,
                                              const NormalizationParams& params) {
    auto steps = aggregate_steps(trace, eth_prices, config);
    steps = add_lag(std::move(steps), config.lag_steps);
    return normalize(std::move(steps), params);
}

}  // namespace

std::string_view feature_name(size_t index) {
    switch (index) {
        case kFeatAvgPrice:
            return "avg_gas_price";
        case kFeatAvgPriceLag:
            return "avg_gas_price_lag24h";
        case kFeatTxCount:
            return "tx_count";
        case kFeatMaxPrice:
            return "max_gas_price";
        case kFeatMinPrice:
            return "min_gas_price";
        case kFeatEthPrice:
            return "eth_price";
    }
    throw ArgumentError("feature index out of range");
}

void PipelineConfig::validate() const {
    if (step_seconds == 0) {
        throw ArgumentError("step_seconds must be positive");
    }
    if (lag_steps == 0) {
        throw ArgumentError("lag_steps must be positive");
    }
    if (lag_steps != 86400 / step_seconds || 86400 % step_seconds != 0) {
        std::ostringstream msg;
        msg << "lag_steps (" << lag_steps << ") must equal 86400 / step_seconds, one day of steps";
        throw ArgumentError(msg.str());
    }
    if (!(outlier_k > 0)) {
        throw ArgumentError("outlier_k must be positive");
    }
    if (!(energy_threshold > 0) || energy_threshold > 1) {
        throw ArgumentError("energy_threshold must lie in (0, 1]");
    }
    if (input_window < 2) {
        throw ArgumentError("input_window must be at least 2");
    }
    if (horizon == 0) {
        throw ArgumentError("horizon must be positive");
    }
    if (!(train_split > 0) || !(train_split < 1)) {
        throw ArgumentError("train_split must lie in (0, 1)");
    }
}

std::vector<TimeStep> aggregate_steps(const BlockTrace& trace,
                                      std::span<const EthPricePoint> eth_prices,
                                      const PipelineConfig& config) {
    config.validate();
    if (trace.empty()) {
        throw ArgumentError("trace is empty");
    }
    validate_eth_prices(eth_prices);
    if (eth_prices.empty()) {
        throw ArgumentError("ETH price series is empty");
    }

    const uint64_t step = config.step_seconds;
    const uint64_t first_start = trace.records().front().timestamp / step * step;
    const uint64_t last_start = trace.records().back().timestamp / step * step;
    const size_t n = static_cast<size_t>((last_start - first_start) / step) + 1;

    struct Bucket {
        double sum_avg{0}, sum_max{0}, sum_min{0};
        size_t priced{0};
        uint64_t tx_sum{0};
        size_t blocks{0};
    };
    std::vector<Bucket> buckets(n);
    for (const auto& record : trace.records()) {
        const size_t i = static_cast<size_t>((record.timestamp / step * step - first_start) / step);
        Bucket& bucket = buckets[i];
        ++bucket.blocks;
        bucket.tx_sum += record.tx_count;
        if (record.tx_count > 0) {
            ++bucket.priced;
            bucket.sum_avg += wei_to_gwei(*record.avg_gas_price);
            bucket.sum_max += wei_to_gwei(*record.max_gas_price);
            bucket.sum_min += wei_to_gwei(*record.min_gas_price);
        }
    }

    // Price-derived columns exist only where a step saw priced blocks; the
    // gaps are interpolated below and flagged synthetic. tx_count is real
    // whenever any block landed in the step.
    std::vector<double> avg(n), max(n), min(n), tx(n);
    std::vector<char> priced(n), has_blocks(n);
    for (size_t i = 0; i < n; ++i) {
        const Bucket& bucket = buckets[i];
        priced[i] = bucket.priced > 0;
        has_blocks[i] = bucket.blocks > 0;
        if (bucket.priced > 0) {
            avg[i] = bucket.sum_avg / static_cast<double>(bucket.priced);
            max[i] = bucket.sum_max / static_cast<double>(bucket.priced);
            min[i] = bucket.sum_min / static_cast<double>(bucket.priced);
        }
        if (bucket.blocks > 0) {
            tx[i] = static_cast<double>(bucket.tx_sum) / static_cast<double>(bucket.blocks);
        }
    }
    interpolate_gaps(avg, priced);
    interpolate_gaps(max, priced);
    interpolate_gaps(min, priced);
    interpolate_gaps(tx, has_blocks);

    std::vector<TimeStep> steps(n);
    for (size_t i = 0; i < n; ++i) {
        TimeStep& ts = steps[i];
        ts.index = i;
        ts.start_ts = first_start + static_cast<uint64_t>(i) * step;
        ts.features[kFeatAvgPrice] = avg[i];
        ts.features[kFeatAvgPriceLag] = 0;  // populated by add_lag
        ts.features[kFeatTxCount] = tx[i];
        ts.features[kFeatMaxPrice] = max[i];
        ts.features[kFeatMinPrice] = min[i];
        ts.features[kFeatEthPrice] = eth_price_at(eth_prices, ts.start_ts);
        ts.target = min[i];
        ts.synthetic = !priced[i];
    }
    check_finite_positive_targets(steps);
    return steps;
}

std::vector<TimeStep> add_lag(std::vector<TimeStep> steps, size_t lag_steps) {
    if (steps.size() <= lag_steps) {
        std::ostringstream msg;
        msg << "need more than " << lag_steps << " steps to lag by " << lag_steps << ", got "
            << steps.size();
        throw ArgumentError(msg.str());
    }
    std::vector<TimeStep> lagged;
    lagged.reserve(steps.size() - lag_steps);
    for (size_t i = lag_steps; i < steps.size(); ++i) {
        TimeStep step = steps[i];
        step.features[kFeatAvgPriceLag] = steps[i - lag_steps].features[kFeatAvgPrice];
        step.index = i - lag_steps;
        lagged.push_back(std::move(step));
    }
    return lagged;
}

std::vector<TimeStep> remove_outliers(std::vector<TimeStep> steps, double k) {
    if (!(k > 0)) {
        throw ArgumentError("outlier_k must be positive");
    }
    const size_t n = steps.size();
    if (n < 2) {
        throw ArgumentError("remove_outliers requires at least 2 steps");
    }
    double mean = 0;
    for (const auto& step : steps) {
        mean += step.target;
    }
    mean /= static_cast<double>(n);
    double variance = 0;
    for (const auto& step : steps) {
        const double d = step.target - mean;
        variance += d * d;
    }
    variance /= static_cast<double>(n);
    const double bound = k * std::sqrt(variance);

    std::vector<char> kept(n);
    size_t kept_count = 0;
    for (size_t i = 0; i < n; ++i) {
        kept[i] = std::abs(steps[i].target - mean) <= bound;
        kept_count += kept[i] ? 1 : 0;
    }
    if (kept_count == 0) {
        throw DataError("outlier removal would delete every step");
    }
    if (kept_count == n) {
        return steps;
    }

    // Deleted positions are re-filled column by column so the time grid stays
    // regular for windowing.
    std::vector<double> column(n);
    for (size_t f = 0; f < kFeatureCount; ++f) {
        for (size_t i = 0; i < n; ++i) {
            column[i] = steps[i].features[f];
        }
        interpolate_gaps(column, kept);
        for (size_t i = 0; i < n; ++i) {
            steps[i].features[f] = column[i];
        }
    }
    for (size_t i = 0; i < n; ++i) {
        column[i] = steps[i].target;
    }
    interpolate_gaps(column, kept);
    for (size_t i = 0; i < n; ++i) {
        steps[i].target = column[i];
        if (!kept[i]) {
            steps[i].synthetic = true;
        }
    }
    return steps;
}

NormalizationParams fit_normalizer(std::span<const TimeStep> training_steps) {
    if (training_steps.size() < 2) {
        throw ArgumentError("fit_normalizer requires at least 2 training steps");
    }
    NormalizationParams params;
    params.feature_min.fill(std::numeric_limits<double>::infinity());
    params.feature_max.fill(-std::numeric_limits<double>::infinity());
    params.target_min = std::numeric_limits<double>::infinity();
    params.target_max = -std::numeric_limits<double>::infinity();
    for (const auto& step : training_steps) {
        for (size_t f = 0; f < kFeatureCount; ++f) {
            params.feature_min[f] = std::min(params.feature_min[f], step.features[f]);
            params.feature_max[f] = std::max(params.feature_max[f], step.features[f]);
        }
        params.target_min = std::min(params.target_min, step.target);
        params.target_max = std::max(params.target_max, step.target);
    }
    for (size_t f = 0; f < kFeatureCount; ++f) {
        if (!(params.feature_max[f] > params.feature_min[f])) {
            throw DataError(std::string("feature '") + std::string(feature_name(f)) +
                            "' is constant in the training data; cannot normalize");
        }
    }
    if (!(params.target_max > params.target_min)) {
        throw DataError("target is constant in the training data; cannot normalize");
    }
    return params;
}

std::vector<TimeStep> normalize(std::vector<TimeStep> steps, const NormalizationParams& params) {
    for (auto& step : steps) {
        for (size_t f = 0; f < kFeatureCount; ++f) {
            step.features[f] = clamp01((step.features[f] - params.feature_min[f]) /
                                       (params.feature_max[f] - params.feature_min[f]));
        }
        step.target = normalize_target(step.target, params);
    }
    return steps;
}

double normalize_target(double value, const NormalizationParams& params) {
    return clamp01((value - params.target_min) / (params.target_max - params.target_min));
}

double denormalize_target(double value, const NormalizationParams& params) {
    return params.target_min + value * (params.target_max - params.target_min);
}

Eigen::VectorXd denormalize_targets(const Eigen::VectorXd& values,
                                    const NormalizationParams& params) {
    Eigen::VectorXd out(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        out[i] = denormalize_target(values[i], params);
    }
    return out;
}

std::vector<WindowSample> make_windows(std::span<const TimeStep> steps,
                                       const PipelineConfig& config) {
    const size_t l = config.input_window;
    const size_t s = config.horizon;
    const size_t n = steps.size();
    std::vector<WindowSample> samples;
    if (n < l + s) {
        return samples;
    }
    samples.reserve(n - l - s + 1);
    for (size_t end = l - 1; end + s < n; ++end) {
        WindowSample sample;
        sample.inputs.resize(static_cast<Eigen::Index>(l), kFeatureCount);
        for (size_t r = 0; r < l; ++r) {
            const TimeStep& step = steps[end - l + 1 + r];
            for (size_t c = 0; c < kFeatureCount; ++c) {
                sample.inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    step.features[c];
            }
        }
        if (config.smoothing) {
            smooth_inputs(sample.inputs, config.energy_threshold);
        }
        sample.targets.resize(static_cast<Eigen::Index>(s));
        for (size_t i = 0; i < s; ++i) {
            sample.targets[static_cast<Eigen::Index>(i)] = steps[end + 1 + i].target;
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

WindowDataset preprocess(const BlockTrace& trace, std::span<const EthPricePoint> eth_prices,
                         const PipelineConfig& config) {
    config.validate();
    auto steps = aggregate_steps(trace, eth_prices, config);
    steps = add_lag(std::move(steps), config.lag_steps);

    // Outlier bounds and normalization parameters come from the chronological
    // training prefix only; the validation tail must not leak into them.
    const size_t n_train = static_cast<size_t>(std::floor(
        config.train_split * static_cast<double>(steps.size())));
    if (n_train < 2) {
        throw ArgumentError("training split is too small to fit the pipeline");
    }
    std::vector<TimeStep> train_prefix(steps.begin(),
                                       steps.begin() + static_cast<ptrdiff_t>(n_train));
    train_prefix = remove_outliers(std::move(train_prefix), config.outlier_k);
    std::copy(train_prefix.begin(), train_prefix.end(), steps.begin());

    WindowDataset dataset;
    dataset.config = config;
    dataset.params = fit_normalizer(train_prefix);
    dataset.samples = make_windows(normalize(std::move(steps), dataset.params), config);
    return dataset;
}

void save_windows(const WindowDataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out.write(kWindowsMagic, sizeof kWindowsMagic);
    const PipelineConfig& cfg = dataset.config;
    bin::write_u64(out, cfg.step_seconds);
    bin::write_u64(out, cfg.lag_steps);
    bin::write_f64(out, cfg.outlier_k);
    bin::write_f64(out, cfg.energy_threshold);
    bin::write_u64(out, cfg.input_window);
    bin::write_u64(out, cfg.horizon);
    bin::write_u64(out, cfg.smoothing ? 1 : 0);
    bin::write_f64(out, cfg.train_split);
    for (size_t f = 0; f < kFeatureCount; ++f) {
        bin::write_f64(out, dataset.params.feature_min[f]);
        bin::write_f64(out, dataset.params.feature_max[f]);
    }
    bin::write_f64(out, dataset.params.target_min);
    bin::write_f64(out, dataset.params.target_max);
    bin::write_u64(out, dataset.samples.size());
    for (const auto& sample : dataset.samples) {
        for (Eigen::Index r = 0; r < sample.inputs.rows(); ++r) {
            for (Eigen::Index c = 0; c < sample.inputs.cols(); ++c) {
                bin::write_f64(out, sample.inputs(r, c));
            }
        }
        for (Eigen::Index i = 0; i < sample.targets.size(); ++i) {
            bin::write_f64(out, sample.targets[i]);
        }
    }
    if (!out.flush()) {
        throw IoError("failed writing '" + path + "'");
    }
}

WindowDataset load_windows(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    char magic[sizeof kWindowsMagic];
    bin::read_exact(in, magic, sizeof magic, "magic");
    if (std::memcmp(magic, kWindowsMagic, sizeof magic) != 0) {
        throw IoError("'" + path + "' is not a window dataset (bad magic)");
    }
    WindowDataset dataset;
    PipelineConfig& cfg = dataset.config;
    cfg.step_seconds = bin::read_u64(in, "step_seconds");
    cfg.lag_steps = bin::read_u64(in, "lag_steps");
    cfg.outlier_k = bin::read_f64(in, "outlier_k");
    cfg.energy_threshold = bin::read_f64(in, "energy_threshold");
    cfg.input_window = bin::read_u64(in, "input_window");
    cfg.horizon = bin::read_u64(in, "horizon");
    cfg.smoothing = bin::read_u64(in, "smoothing") != 0;
    cfg.train_split = bin::read_f64(in, "train_split");
    cfg.validate();
    for (size_t f = 0; f < kFeatureCount; ++f) {
        dataset.params.feature_min[f] = bin::read_f64(in, "feature_min");
        dataset.params.feature_max[f] = bin::read_f64(in, "feature_max");
    }
    dataset.params.target_min = bin::read_f64(in, "target_min");
    dataset.params.target_max = bin::read_f64(in, "target_max");
    const uint64_t count = bin::read_u64(in, "sample count");
    dataset.samples.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        WindowSample sample;
        sample.inputs.resize(static_cast<Eigen::Index>(cfg.input_window), kFeatureCount);
        for (Eigen::Index r = 0; r < sample.inputs.rows(); ++r) {
            for (Eigen::Index c = 0; c < sample.inputs.cols(); ++c) {
                sample.inputs(r, c) = bin::read_f64(in, "window inputs");
            }
        }
        sample.targets.resize(static_cast<Eigen::Index>(cfg.horizon));
        for (Eigen::Index t = 0; t < sample.targets.size(); ++t) {
            sample.targets[t] = bin::read_f64(in, "window targets");
        }
        dataset.samples.push_back(std::move(sample));
    }
    return dataset;
}

StepSeries build_inference_steps(const BlockTrace& trace,
                                 std::span<const EthPricePoint> eth_prices,
                                 const PipelineConfig& config,
                                 const NormalizationParams& params) {
    config.validate();
    StepSeries series;
    series.config = config;
    series.steps = aggregate_lag_normalize(trace, eth_prices, config, params);
    return series;
}

std::optional<size_t> last_completed_step(const StepSeries& series, uint64_t timestamp) {
    if (series.steps.empty()) {
        return std::nullopt;
    }
    const uint64_t step = series.config.step_seconds;
    const uint64_t first_start = series.steps.front().start_ts;
    if (timestamp < first_start + step) {
        return std::nullopt;
    }
    // The grid is regular, so the last completed step follows by arithmetic.
    const size_t index = static_cast<size_t>((timestamp - first_start) / step) - 1;
    return std::min(index, series.steps.size() - 1);
}

Eigen::MatrixXd window_ending_at(const StepSeries& series, size_t end_index) {
    const size_t l = series.config.input_window;
    if (end_index >= series.steps.size()) {
        throw ArgumentError("window end index outside the step series");
    }
    if (end_index + 1 < l) {
        throw ArgumentError("not enough history for an input window");
    }
    Eigen::MatrixXd inputs(static_cast<Eigen::Index>(l), kFeatureCount);
    for (size_t r = 0; r < l; ++r) {
        const TimeStep& step = series.steps[end_index + 1 - l + r];
        for (size_t c = 0; c < kFeatureCount; ++c) {
            inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = step.features[c];
        }
    }
    if (series.config.smoothing) {
        smooth_inputs(inputs, series.config.energy_threshold);
    }
    return inputs;
}

}  // namespace gasrec
