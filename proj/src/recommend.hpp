// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "block_trace.hpp"
#include "features.hpp"
#include "gru.hpp"
#include "wei.hpp"

namespace gasrec {

// Slope extremes (Gwei per step) observed on training data; maps a fitted
// slope onto [0,1] for the pricing coefficient.
struct SlopeNormalizer {
    double min_slope{0};
    double max_slope{0};

    void validate() const;  // throws unless max > min

    bool operator==(const SlopeNormalizer&) const = default;
};

// Full decomposition of a model-driven recommendation. price_gwei is
// exactly initial_price_gwei × coefficient × urgency.
struct Recommendation {
    double initial_price_gwei{0};       // 20th percentile of the forecast
    double slope_gwei_per_step{0};      // least-squares trend over the forecast
    double slope_normalized{0};         // in [0,1]
    double coefficient{0};              // e^{2·slope_normalized − 2}
    double urgency{1};
    double price_gwei{0};
    Wei price_wei{0};                   // round(price_gwei × 1e9), floored at 1 wei
};

// ---------------------------------------------------------------------------
// Scalar pieces of the pricing algorithm
// ---------------------------------------------------------------------------

// Nearest-rank percentile: the ⌈fraction·n⌉-th smallest element (1-based).
double nearest_rank_percentile(std::span<const double> values, double fraction);

// 20th percentile of the forecast window: the recommendation's base price.
double initial_price(std::span<const double> predictions_gwei);

// Ordinary least-squares slope of the predictions against x = 1..s.
double fit_slope(std::span<const double> predictions_gwei);

// Extremes of fit_slope over a set of training-window forecasts.
SlopeNormalizer fit_slope_normalizer(std::span<const std::vector<double>> prediction_windows);

// Min-max scaling of a slope, clamped to [0,1] (inference slopes may leave
// the training range).
double normalize_slope(double slope, const SlopeNormalizer& normalizer);

// c = e^{2ã−2}, increasing from e^{-2} (steepest predicted fall) to 1
// (steepest rise): the faster prices are falling, the deeper the discount.
double coefficient(double normalized_slope);

// Composes the pieces above into a Recommendation from a denormalized
// forecast (Gwei).
Recommendation compose_recommendation(std::span<const double> predictions_gwei,
                                      const SlopeNormalizer& normalizer, double urgency);

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

struct ProposedStrategy {
    double urgency{1.0};
};
struct GethStrategy {
    double scale{1.0};  // multiplies the 60th-percentile price
};
enum class ExpressTier {
    kSafeLow,   // 35th percentile
    kStandard,  // 60th
    kFast,      // 90th
    kFastest,   // window maximum
};
struct ExpressStrategy {
    ExpressTier tier{ExpressTier::kStandard};
};
struct LookAheadStrategy {
    uint64_t max_blocks{30};  // looks at the next max_blocks blocks
};
struct ConstantStrategy {
    Wei price_wei{0};
};

using Strategy =
    std::variant<ProposedStrategy, GethStrategy, ExpressStrategy, LookAheadStrategy,
                 ConstantStrategy>;

std::string strategy_name(const Strategy& strategy);
// The strategy's tuning value as a display string (urgency, scale, tier, ...).
std::string strategy_parameter(const Strategy& strategy);

// Geth-style estimate for the block at `at_block`: nearest-rank 60th
// percentile of the minimum prices over up to 100 preceding blocks (empty
// blocks skipped), scaled by `scale`. Floored at 1 wei.
Wei recommend_geth(const BlockTrace& trace, uint64_t at_block, double scale);

// GasStation-Express estimate: tier percentile of the minimum prices over up
// to 200 preceding blocks; Fastest takes the maximum.
Wei recommend_express(const BlockTrace& trace, uint64_t at_block, ExpressTier tier);

// Oracle bound: the lowest minimum price among the next max_blocks blocks.
// Consumes future data — validation only.
Wei recommend_lookahead(const BlockTrace& trace, uint64_t at_block, uint64_t max_blocks);

// ---------------------------------------------------------------------------
// Model-driven recommendation against a trace
// ---------------------------------------------------------------------------

// A loaded model plus everything needed to run it on raw traces.
struct ModelBundle {
    GruModel model;
    PipelineConfig pipeline;
    NormalizationParams params;
    SlopeNormalizer slopes;
};

// Forecast-driven recommendation as of `at_block`: assembles the latest
// completed l-step window (no data after the block's timestamp is used),
// runs the GRU, denormalizes, and prices the result.
Recommendation recommend_proposed(const ModelBundle& bundle, const StepSeries& series,
                                  const BlockTrace& trace, uint64_t at_block, double urgency);

// Convenience wrapper building the StepSeries internally; prefer the
// StepSeries overload when recommending repeatedly over one trace.
Recommendation recommend_proposed(const ModelBundle& bundle, const BlockTrace& trace,
                                  std::span<const EthPricePoint> eth_prices, uint64_t at_block,
                                  double urgency);

Wei gwei_price_to_wei(double price_gwei);

}  // namespace gasrec
