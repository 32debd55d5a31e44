// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "recommend.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "format.hpp"

namespace gasrec {

namespace {

constexpr uint64_t kGethWindow = 100;
constexpr uint64_t kExpressWindow = 200;
constexpr double kGethPercentile = 0.60;

double express_tier_fraction(ExpressTier tier) {
    switch (tier) {
        case ExpressTier::kSafeLow:
            return 0.35;
        case ExpressTier::kStandard:
            return 0.60;
        case ExpressTier::kFast:
            return 0.90;
        case ExpressTier::kFastest:
            return 1.0;  // handled as the maximum, kept here for completeness
    }
    throw ArgumentError("unknown Express tier");
}

const char* express_tier_name(ExpressTier tier) {
    switch (tier) {
        case ExpressTier::kSafeLow:
            return "safelow";
        case ExpressTier::kStandard:
            return "standard";
        case ExpressTier::kFast:
            return "fast";
        case ExpressTier::kFastest:
            return "fastest";
    }
    throw ArgumentError("unknown Express tier");
}

// Minimum prices of up to `window` blocks preceding at_block (empty blocks
// skipped), in block order.
std::vector<Wei> preceding_min_prices(const BlockTrace& trace, uint64_t at_block,
                                      uint64_t window) {
    if (!trace.contains(at_block)) {
        std::ostringstream msg;
        msg << "block " << at_block << " outside trace";
        throw ArgumentError(msg.str());
    }
    std::vector<Wei> prices;
    const uint64_t first = trace.first_number();
    uint64_t from = at_block;
    if (at_block >= first + window) {
        from = at_block - window;
    } else {
        from = first;
    }
    for (uint64_t number = from; number < at_block; ++number) {
        const BlockRecord& record = trace.at(number);
        if (record.min_gas_price) {
            prices.push_back(*record.min_gas_price);
        }
    }
    if (prices.empty()) {
        std::ostringstream msg;
        msg << "no priced blocks precede block " << at_block;
        throw DataError(msg.str());
    }
    return prices;
}

// Nearest-rank selection over wei values.
Wei nearest_rank_wei(std::vector<Wei> values, double fraction) {
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    // ⌈fraction·n⌉ with a guard against cases like 0.6·100 landing a hair
    // above the exact integer in floating point.
    size_t rank = static_cast<size_t>(
        std::ceil(fraction * static_cast<double>(n) - 1e-9));
    rank = std::clamp<size_t>(rank, 1, n);
    return values[rank - 1];
}

Wei scale_wei(const Wei& value, double factor) {
    if (!(factor > 0) || !std::isfinite(factor)) {
        throw ArgumentError("scale factor must be positive and finite");
    }
    // Scale in Gwei-double space: ample precision for realistic prices, and
    // matches how the scaled recommendation would be submitted.
    return gwei_price_to_wei(wei_to_gwei(value) * factor);
}

}  // namespace

void SlopeNormalizer::validate() const {
    if (!(max_slope > min_slope)) {
        throw ArgumentError("slope normalizer requires max_slope > min_slope");
    }
    if (!std::isfinite(min_slope) || !std::isfinite(max_slope)) {
        throw ArgumentError("slope normalizer bounds must be finite");
    }
}

double nearest_rank_percentile(std::span<const double> values, double fraction) {
    if (values.empty()) {
        throw ArgumentError("percentile of an empty set");
    }
    if (!(fraction > 0) || fraction > 1) {
        throw ArgumentError("percentile fraction must lie in (0, 1]");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    size_t rank = static_cast<size_t>(
        std::ceil(fraction * static_cast<double>(n) - 1e-9));
    rank = std::clamp<size_t>(rank, 1, n);
    return sorted[rank - 1];
}

double initial_price(std::span<const double> predictions_gwei) {
    return nearest_rank_percentile(predictions_gwei, 0.20);
}

double fit_slope(std::span<const double> predictions_gwei) {
    const size_t s = predictions_gwei.size();
    if (s < 2) {
        throw ArgumentError("slope fit requires at least 2 predictions");
    }
    // OLS over x = 1..s: a = Σ(x−x̄)(y−ȳ) / Σ(x−x̄)².
    const double x_mean = static_cast<double>(s + 1) / 2.0;
    double y_mean = 0;
    for (double y : predictions_gwei) {
        y_mean += y;
    }
    y_mean /= static_cast<double>(s);
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < s; ++i) {
        const double dx = static_cast<double>(i + 1) - x_mean;
        sxy += dx * (predictions_gwei[i] - y_mean);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

SlopeNormalizer fit_slope_normalizer(std::span<const std::vector<double>> prediction_windows) {
    if (prediction_windows.size() < 2) {
        throw ArgumentError("slope normalizer needs at least 2 training windows");
    }
    SlopeNormalizer normalizer;
    normalizer.min_slope = std::numeric_limits<double>::infinity();
    normalizer.max_slope = -std::numeric_limits<double>::infinity();
    for (const auto& window : prediction_windows) {
        const double slope = fit_slope(window);
        normalizer.min_slope = std::min(normalizer.min_slope, slope);
        normalizer.max_slope = std::max(normalizer.max_slope, slope);
    }
    if (!(normalizer.max_slope > normalizer.min_slope)) {
        throw DataError("all training slopes are equal; cannot normalize slopes");
    }
    return normalizer;
}

double normalize_slope(double slope, const SlopeNormalizer& normalizer) {
    normalizer.validate();
    const double scaled =
        (slope - normalizer.min_slope) / (normalizer.max_slope - normalizer.min_slope);
    return std::clamp(scaled, 0.0, 1.0);
}

double coefficient(double normalized_slope) {
    if (!(normalized_slope >= 0) || normalized_slope > 1) {
        throw ArgumentError("normalized slope must lie in [0, 1]");
    }
    return std::exp(2.0 * normalized_slope - 2.0);
}

Wei gwei_price_to_wei(double price_gwei) {
    if (!std::isfinite(price_gwei)) {
        throw ArgumentError("price must be finite");
    }
    Wei wei = gwei_to_wei(price_gwei);
    if (wei < 1) {
        wei = 1;  // floor: a zero-price transaction is degenerate
    }
    return wei;
}

Recommendation compose_recommendation(std::span<const double> predictions_gwei,
                                      const SlopeNormalizer& normalizer, double urgency) {
    if (!(urgency > 0) || !std::isfinite(urgency)) {
        throw ArgumentError("urgency must be positive and finite");
    }
    Recommendation rec;
    rec.initial_price_gwei = initial_price(predictions_gwei);
    rec.slope_gwei_per_step = fit_slope(predictions_gwei);
    rec.slope_normalized = normalize_slope(rec.slope_gwei_per_step, normalizer);
    rec.coefficient = coefficient(rec.slope_normalized);
    rec.urgency = urgency;
    rec.price_gwei = rec.initial_price_gwei * rec.coefficient * rec.urgency;
    rec.price_wei = gwei_price_to_wei(rec.price_gwei);
    return rec;
}

std::string strategy_name(const Strategy& strategy) {
    struct Visitor {
        std::string operator()(const ProposedStrategy&) const { return "proposed"; }
        std::string operator()(const GethStrategy&) const { return "geth"; }
        std::string operator()(const ExpressStrategy&) const { return "express"; }
        std::string operator()(const LookAheadStrategy&) const { return "lookahead"; }
        std::string operator()(const ConstantStrategy&) const { return "constant"; }
    };
    return std::visit(Visitor{}, strategy);
}

std::string strategy_parameter(const Strategy& strategy) {
    struct Visitor {
        std::string operator()(const ProposedStrategy& s) const {
            return format_double(s.urgency);
        }
        std::string operator()(const GethStrategy& s) const { return format_double(s.scale); }
        std::string operator()(const ExpressStrategy& s) const {
            return express_tier_name(s.tier);
        }
        std::string operator()(const LookAheadStrategy& s) const {
            return std::to_string(s.max_blocks);
        }
        std::string operator()(const ConstantStrategy& s) const { return s.price_wei.str(); }
    };
    return std::visit(Visitor{}, strategy);
}

Wei recommend_geth(const BlockTrace& trace, uint64_t at_block, double scale) {
    auto prices = preceding_min_prices(trace, at_block, kGethWindow);
    const Wei percentile = nearest_rank_wei(std::move(prices), kGethPercentile);
    return scale_wei(percentile, scale);
}

Wei recommend_express(const BlockTrace& trace, uint64_t at_block, ExpressTier tier) {
    auto prices = preceding_min_prices(trace, at_block, kExpressWindow);
    if (tier == ExpressTier::kFastest) {
        return *std::max_element(prices.begin(), prices.end());
    }
    return nearest_rank_wei(std::move(prices), express_tier_fraction(tier));
}

Wei recommend_lookahead(const BlockTrace& trace, uint64_t at_block, uint64_t max_blocks) {
    if (max_blocks == 0) {
        throw ArgumentError("look-ahead horizon must be positive");
    }
    if (!trace.contains(at_block)) {
        std::ostringstream msg;
        msg << "block " << at_block << " outside trace";
        throw ArgumentError(msg.str());
    }
    if (at_block + max_blocks > trace.last_number()) {
        std::ostringstream msg;
        msg << "look-ahead needs " << max_blocks << " blocks after " << at_block
            << " but the trace ends at " << trace.last_number();
        throw DataError(msg.str());
    }
    std::optional<Wei> lowest;
    for (uint64_t number = at_block + 1; number <= at_block + max_blocks; ++number) {
        const BlockRecord& record = trace.at(number);
        if (record.min_gas_price && (!lowest || *record.min_gas_price < *lowest)) {
            lowest = *record.min_gas_price;
        }
    }
    if (!lowest) {
        std::ostringstream msg;
        msg << "no priced blocks within " << max_blocks << " blocks after " << at_block;
        throw DataError(msg.str());
    }
    return *lowest;
}

Recommendation recommend_proposed(const ModelBundle& bundle, const StepSeries& series,
                                  const BlockTrace& trace, uint64_t at_block, double urgency) {
    if (!trace.contains(at_block)) {
        std::ostringstream msg;
        msg << "block " << at_block << " outside trace";
        throw ArgumentError(msg.str());
    }
    const uint64_t now = trace.at(at_block).timestamp;
    const auto end_index = last_completed_step(series, now);
    if (!end_index) {
        std::ostringstream msg;
        msg << "no completed aggregation step at block " << at_block;
        throw ArgumentError(msg.str());
    }
    // window_ending_at rejects indices with fewer than l predecessors.
    const Eigen::MatrixXd window = window_ending_at(series, *end_index);
    const Eigen::VectorXd predicted = gru_forward(bundle.model, window);
    const Eigen::VectorXd gwei = denormalize_targets(predicted, bundle.params);
    std::vector<double> predictions(gwei.data(), gwei.data() + gwei.size());
    return compose_recommendation(predictions, bundle.slopes, urgency);
}

Recommendation recommend_proposed(const ModelBundle& bundle, const BlockTrace& trace,
                                  std::span<const EthPricePoint> eth_prices, uint64_t at_block,
                                  double urgency) {
    const StepSeries series =
        build_inference_steps(trace, eth_prices, bundle.pipeline, bundle.params);
    return recommend_proposed(bundle, series, trace, at_block, urgency);
}

}  // namespace gasrec
