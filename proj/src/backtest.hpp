// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "block_trace.hpp"
#include "recommend.hpp"
#include "wei.hpp"

namespace gasrec {

// Outcome of one simulated transaction. Inclusion fields stay empty when the
// transaction was still pending at the simulation's last block.
struct InclusionRecord {
    uint64_t submit_block{0};
    Wei recommended_price{0};
    std::optional<uint64_t> inclusion_block;
    // The including block's minimum gas price (0 for an empty block, which
    // accepts anything).
    std::optional<Wei> inclusion_price;
    std::optional<uint64_t> blocks_waited;  // inclusion_block - submit_block
};

struct BacktestSummary {
    std::string strategy;
    std::string parameter;
    uint64_t n_submitted{0};
    uint64_t n_included{0};
    Wei avg_price_wei{0};         // over all submissions, floor division
    double avg_blocks_waited{0};  // over included transactions only; NaN if none
};

// Produces the price to submit at a given block; must not consult any block
// after it (the look-ahead oracle deliberately breaks this, validation only).
using RecommendFn = std::function<Wei(uint64_t block)>;

// The evaluation loop: walk blocks from `start`; at each block, every pending
// transaction whose price is at least the block's minimum gas price is
// included (drained in ascending price order), then — while the block is at
// most `end` — one new transaction is submitted at the recommended price.
// Past `end` the walk continues while transactions remain pending, up to
// `last` at the latest; whatever is still pending then is reported with empty
// inclusion fields. Empty blocks accept any pending transaction.
std::vector<InclusionRecord> evaluate_recommender(const BlockTrace& trace, uint64_t start_block,
                                                  uint64_t end_block, uint64_t last_block,
                                                  const RecommendFn& recommend);

// Everything strategy dispatch may need. `bundle` and `steps` are required
// only when a Proposed strategy runs; `steps` must come from
// build_inference_steps over the same trace with the bundle's parameters.
struct BacktestContext {
    const BlockTrace* trace{nullptr};
    const ModelBundle* bundle{nullptr};
    const StepSeries* steps{nullptr};
};

std::vector<InclusionRecord> evaluate_strategy(const BacktestContext& context,
                                               uint64_t start_block, uint64_t end_block,
                                               uint64_t last_block, const Strategy& strategy);

BacktestSummary summarize(const Strategy& strategy, std::span<const InclusionRecord> records);

// Runs every strategy over the identical block range and summarizes each.
std::vector<BacktestSummary> compare(const BlockTrace& trace, const ModelBundle* bundle,
                                     std::span<const EthPricePoint> eth_prices,
                                     uint64_t start_block, uint64_t end_block,
                                     uint64_t last_block, std::span<const Strategy> strategies);

// Table-style CSV: strategy,parameter,n_submitted,n_included,avg_price_wei,
// avg_blocks_waited.
void write_backtest_csv(std::span<const BacktestSummary> summaries, const std::string& path);

}  // namespace gasrec
