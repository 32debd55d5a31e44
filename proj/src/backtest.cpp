// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "backtest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "format.hpp"

namespace gasrec {

namespace {

void check_range(const BlockTrace& trace, uint64_t start, uint64_t end, uint64_t last) {
    if (!(start <= end && end <= last)) {
        throw ArgumentError("backtest requires start <= end <= last");
    }
    if (trace.empty() || !trace.contains(start) || !trace.contains(last)) {
        std::ostringstream msg;
        msg << "trace does not cover blocks " << start << ".." << last;
        throw ArgumentError(msg.str());
    }
}

}  // namespace

std::vector<InclusionRecord> evaluate_recommender(const BlockTrace& trace, uint64_t start_block,
                                                  uint64_t end_block, uint64_t last_block,
                                                  const RecommendFn& recommend) {
    check_range(trace, start_block, end_block, last_block);

    std::vector<InclusionRecord> records;
    records.reserve(static_cast<size_t>(end_block - start_block) + 1);
    // Pending transactions keyed by (price, submit block): iteration order is
    // ascending price, ties drained oldest-first.
    std::set<std::pair<Wei, uint64_t>> pending;

    for (uint64_t block = start_block;
         block <= last_block && (block <= end_block || !pending.empty()); ++block) {
        const BlockRecord& record = trace.at(block);
        // An empty block has no observed floor; it accepts anything pending.
        const Wei min_price = record.min_gas_price ? *record.min_gas_price : Wei(0);

        auto it = pending.lower_bound({min_price, 0});
        while (it != pending.end()) {
            InclusionRecord& tx = records[it->second - start_block];
            tx.inclusion_block = block;
            tx.inclusion_price = min_price;
            tx.blocks_waited = block - tx.submit_block;
            it = pending.erase(it);
        }

        if (block <= end_block) {
            InclusionRecord tx;
            tx.submit_block = block;
            tx.recommended_price = recommend(block);
            if (tx.recommended_price < 1) {
                throw ArgumentError("recommended price must be at least 1 wei");
            }
            pending.insert({tx.recommended_price, block});
            records.push_back(std::move(tx));
        }
    }
    return records;
}

std::vector<InclusionRecord> evaluate_strategy(const BacktestContext& context,
                                               uint64_t start_block, uint64_t end_block,
                                               uint64_t last_block, const Strategy& strategy) {
    if (context.trace == nullptr) {
        throw ArgumentError("backtest context has no trace");
    }
    const BlockTrace& trace = *context.trace;

    struct Dispatcher {
        const BacktestContext& context;
        const BlockTrace& trace;

        RecommendFn operator()(const ProposedStrategy& s) const {
            if (context.bundle == nullptr || context.steps == nullptr) {
                throw ArgumentError("the proposed strategy needs a model and step series");
            }
            return [this, s](uint64_t block) {
                return recommend_proposed(*context.bundle, *context.steps, trace, block,
                                          s.urgency)
                    .price_wei;
            };
        }
        RecommendFn operator()(const GethStrategy& s) const {
            return [this, s](uint64_t block) { return recommend_geth(trace, block, s.scale); };
        }
        RecommendFn operator()(const ExpressStrategy& s) const {
            return [this, s](uint64_t block) { return recommend_express(trace, block, s.tier); };
        }
        RecommendFn operator()(const LookAheadStrategy& s) const {
            return [this, s](uint64_t block) {
                return recommend_lookahead(trace, block, s.max_blocks);
            };
        }
        RecommendFn operator()(const ConstantStrategy& s) const {
            if (s.price_wei < 1) {
                throw ArgumentError("constant strategy price must be at least 1 wei");
            }
            return [s](uint64_t) { return s.price_wei; };
        }
    };
    const RecommendFn recommend = std::visit(Dispatcher{context, trace}, strategy);
    return evaluate_recommender(trace, start_block, end_block, last_block, recommend);
}

BacktestSummary summarize(const Strategy& strategy, std::span<const InclusionRecord> records) {
    if (records.empty()) {
        throw ArgumentError("cannot summarize an empty backtest");
    }
    BacktestSummary summary;
    summary.strategy = strategy_name(strategy);
    summary.parameter = strategy_parameter(strategy);
    summary.n_submitted = records.size();

    Wei price_sum = 0;
    uint64_t wait_sum = 0;
    for (const auto& record : records) {
        price_sum += record.recommended_price;
        if (record.inclusion_block) {
            ++summary.n_included;
            wait_sum += *record.blocks_waited;
        }
    }
    summary.avg_price_wei = price_sum / summary.n_submitted;
    summary.avg_blocks_waited =
        summary.n_included > 0
            ? static_cast<double>(wait_sum) / static_cast<double>(summary.n_included)
            : std::numeric_limits<double>::quiet_NaN();
    return summary;
}

std::vector<BacktestSummary> compare(const BlockTrace& trace, const ModelBundle* bundle,
                                     std::span<const EthPricePoint> eth_prices,
                                     uint64_t start_block, uint64_t end_block,
                                     uint64_t last_block, std::span<const Strategy> strategies) {
    if (strategies.empty()) {
        throw ArgumentError("no strategies to compare");
    }
    BacktestContext context;
    context.trace = &trace;
    context.bundle = bundle;

    // The inference step series is strategy-independent; build it once if any
    // strategy needs the model.
    StepSeries steps;
    const bool needs_model = std::any_of(
        strategies.begin(), strategies.end(),
        [](const Strategy& s) { return std::holds_alternative<ProposedStrategy>(s); });
    if (needs_model) {
        if (bundle == nullptr) {
            throw ArgumentError("the proposed strategy needs a model");
        }
        steps = build_inference_steps(trace, eth_prices, bundle->pipeline, bundle->params);
        context.steps = &steps;
    }

    std::vector<BacktestSummary> summaries;
    summaries.reserve(strategies.size());
    for (const auto& strategy : strategies) {
        const auto records =
            evaluate_strategy(context, start_block, end_block, last_block, strategy);
        summaries.push_back(summarize(strategy, records));
    }
    return summaries;
}

void write_backtest_csv(std::span<const BacktestSummary> summaries, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << "strategy,parameter,n_submitted,n_included,avg_price_wei,avg_blocks_waited\n";
    for (const auto& summary : summaries) {
        out << summary.strategy << ',' << summary.parameter << ',' << summary.n_submitted << ','
            << summary.n_included << ',' << summary.avg_price_wei.str() << ','
            << format_double(summary.avg_blocks_waited) << '\n';
    }
    if (!out.flush()) {
        throw IoError("failed writing '" + path + "'");
    }
}

}  // namespace gasrec
