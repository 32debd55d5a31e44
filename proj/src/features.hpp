// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "block_trace.hpp"

namespace gasrec {

// Fixed layout of the model's feature vector d_t.
inline constexpr size_t kFeatureCount = 6;
inline constexpr size_t kFeatAvgPrice = 0;
inline constexpr size_t kFeatAvgPriceLag = 1;
inline constexpr size_t kFeatTxCount = 2;
inline constexpr size_t kFeatMaxPrice = 3;
inline constexpr size_t kFeatMinPrice = 4;
inline constexpr size_t kFeatEthPrice = 5;

std::string_view feature_name(size_t index);

// One aggregation interval: the feature vector (prices in Gwei, counts per
// block, ETH price in USD) and the target y (mean of per-block minimum
// prices). `synthetic` marks steps whose price data was interpolated rather
// than observed.
struct TimeStep {
    size_t index{0};
    uint64_t start_ts{0};
    std::array<double, kFeatureCount> features{};
    double target{0};
    bool synthetic{false};

    bool operator==(const TimeStep&) const = default;
};

struct PipelineConfig {
    uint64_t step_seconds{300};
    size_t lag_steps{288};  // 24 h of 5-minute steps
    double outlier_k{1.5};
    double energy_threshold{0.95};
    size_t input_window{72};  // l
    size_t horizon{12};       // s
    bool smoothing{true};
    // Fraction of steps (chronological prefix) used to fit outlier bounds and
    // normalization parameters.
    double train_split{0.7};

    void validate() const;

    bool operator==(const PipelineConfig&) const = default;
};

// Min-max scaling bounds, fit on training data only.
struct NormalizationParams {
    std::array<double, kFeatureCount> feature_min{};
    std::array<double, kFeatureCount> feature_max{};
    double target_min{0};
    double target_max{1};

    bool operator==(const NormalizationParams&) const = default;
};

// One training sample: l×6 normalized inputs for steps t-l+1..t and the s
// normalized targets for steps t+1..t+s.
struct WindowSample {
    Eigen::MatrixXd inputs;   // l rows × 6 columns
    Eigen::VectorXd targets;  // s entries
};

// ---------------------------------------------------------------------------
// Pipeline stages
// ---------------------------------------------------------------------------

// Reduces a trace to a regular step grid aligned to multiples of
// step_seconds. Per-step values are arithmetic means over the step's priced
// blocks; tx_count averages over all blocks; eth_price is the
// carried-forward USD price at the step start. Steps without priced blocks
// are filled by linear interpolation and flagged synthetic.
std::vector<TimeStep> aggregate_steps(const BlockTrace& trace,
                                      std::span<const EthPricePoint> eth_prices,
                                      const PipelineConfig& config);

// Populates the lag feature from lag_steps earlier and drops the first
// lag_steps entries (their lag source does not exist).
std::vector<TimeStep> add_lag(std::vector<TimeStep> steps, size_t lag_steps);

// Deletes steps whose target deviates more than k standard deviations from
// the mean (both computed once over the whole input, population form), then
// closes the gaps by linear interpolation so the grid stays regular.
std::vector<TimeStep> remove_outliers(std::vector<TimeStep> steps, double k);

NormalizationParams fit_normalizer(std::span<const TimeStep> training_steps);

// Applies min-max scaling and clamps to [0,1]; inference data may exceed the
// training extremes.
std::vector<TimeStep> normalize(std::vector<TimeStep> steps, const NormalizationParams& params);

double normalize_target(double value, const NormalizationParams& params);
double denormalize_target(double value, const NormalizationParams& params);
Eigen::VectorXd denormalize_targets(const Eigen::VectorXd& values,
                                    const NormalizationParams& params);

// Stride-1 sliding windows; (n - l - s + 1) samples, or none when the series
// is too short. With smoothing enabled each input column of each window is
// Fourier-smoothed independently (targets never are) and re-clamped to [0,1],
// since truncation can overshoot the normalized range.
std::vector<WindowSample> make_windows(std::span<const TimeStep> steps,
                                       const PipelineConfig& config);

// ---------------------------------------------------------------------------
// End-to-end preprocessing
// ---------------------------------------------------------------------------

struct WindowDataset {
    PipelineConfig config;
    NormalizationParams params;
    std::vector<WindowSample> samples;
};

// Full training-side pipeline: aggregate → lag → outlier-clean the training
// prefix → fit normalizer on it → normalize everything → window.
WindowDataset preprocess(const BlockTrace& trace, std::span<const EthPricePoint> eth_prices,
                         const PipelineConfig& config);

// Versioned binary persistence (GWIN format); load(save(d)) == d bitwise.
void save_windows(const WindowDataset& dataset, const std::string& path);
WindowDataset load_windows(const std::string& path);

// ---------------------------------------------------------------------------
// Inference-side series
// ---------------------------------------------------------------------------

// Steps prepared for forecasting at arbitrary points of a trace: aggregated,
// lagged, and normalized with the stored parameters. Never deletes points —
// outlier removal is a training-only transformation.
struct StepSeries {
    PipelineConfig config;
    std::vector<TimeStep> steps;
};

StepSeries build_inference_steps(const BlockTrace& trace,
                                 std::span<const EthPricePoint> eth_prices,
                                 const PipelineConfig& config,
                                 const NormalizationParams& params);

// Index of the latest step fully elapsed at `timestamp` (its interval end is
// ≤ timestamp), or nullopt if none is. Only completed steps may feed a
// forecast: later blocks can still land in an open interval.
std::optional<size_t> last_completed_step(const StepSeries& series, uint64_t timestamp);

// The l×6 input window whose last row is `end_index`, smoothed per config.
// Requires end_index ≥ l-1.
Eigen::MatrixXd window_ending_at(const StepSeries& series, size_t end_index);

}  // namespace gasrec
