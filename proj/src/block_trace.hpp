// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wei.hpp"

namespace gasrec {

// One mined block's gas price statistics. Price fields are null exactly when
// the block contains no transactions.
struct BlockRecord {
    uint64_t number = 0;
    uint64_t timestamp = 0;
    std::optional<Wei> min_gas_price;
    std::optional<Wei> max_gas_price;
    std::optional<Wei> avg_gas_price;
    uint64_t tx_count = 0;
    uint64_t gas_used = 0;
    uint64_t gas_limit = 0;

    // Throws DataError when a per-block invariant is violated.
    void validate() const;

    double gas_utilization() const {
        return gas_limit == 0 ? 0.0 : static_cast<double>(gas_used) / static_cast<double>(gas_limit);
    }

    bool operator==(const BlockRecord&) const = default;
};

struct EthPricePoint {
    uint64_t timestamp = 0;
    double usd_price = 0.0;

    bool operator==(const EthPricePoint&) const = default;
};

// Contiguous, validated run of blocks. Immutable after construction.
class BlockTrace {
  public:
    BlockTrace() = default;

    // Validates per-record invariants, height contiguity and timestamp order.
    static BlockTrace from_records(std::vector<BlockRecord> records);

    const std::vector<BlockRecord>& records() const { return records_; }
    bool empty() const { return records_.empty(); }
    size_t size() const { return records_.size(); }

    uint64_t first_number() const { return records_.front().number; }
    uint64_t last_number() const { return records_.back().number; }
    bool contains(uint64_t number) const {
        return !records_.empty() && number >= first_number() && number <= last_number();
    }

    // Record by block height; the height must be inside the trace.
    const BlockRecord& at(uint64_t number) const;

    bool operator==(const BlockTrace&) const = default;

  private:
    std::vector<BlockRecord> records_;
};

// CSV persistence. Integer fields round-trip exactly; null prices serialize
// as empty fields.
void write_trace_csv(const BlockTrace& trace, const std::string& path);
BlockTrace read_trace_csv(const std::string& path);

std::vector<EthPricePoint> read_eth_price_csv(const std::string& path);
void write_eth_price_csv(std::span<const EthPricePoint> prices, const std::string& path);

// Throws ArgumentError unless timestamps are strictly increasing and prices
// positive.
void validate_eth_prices(std::span<const EthPricePoint> prices);

// Last-observation-carried-forward price at `timestamp`; requires the series
// to start at or before it.
double eth_price_at(std::span<const EthPricePoint> prices, uint64_t timestamp);

// Pairs every block with the ETH/USD price carried forward to its timestamp.
// Returned values align with trace.records().
std::vector<double> join_eth_price(const BlockTrace& trace, std::span<const EthPricePoint> prices);

}  // namespace gasrec
