// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "block_trace.hpp"
#include "rng.hpp"
#include "wei.hpp"

namespace gasrec::testutil {

// Scratch directory removed on scope exit.
class TempDir {
  public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0; attempt < 100; ++attempt) {
            auto candidate = base / ("gasrec_test_" + std::to_string(counter_++));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

  private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline BlockRecord make_block(uint64_t number, uint64_t timestamp, uint64_t min_gwei,
                              uint64_t max_gwei, uint64_t avg_gwei, uint64_t tx_count,
                              uint64_t gas_used = 5'000'000, uint64_t gas_limit = 10'000'000) {
    BlockRecord record;
    record.number = number;
    record.timestamp = timestamp;
    record.tx_count = tx_count;
    record.gas_used = gas_used;
    record.gas_limit = gas_limit;
    if (tx_count > 0) {
        const Wei gwei(1'000'000'000);
        record.min_gas_price = Wei(min_gwei) * gwei;
        record.max_gas_price = Wei(max_gwei) * gwei;
        record.avg_gas_price = Wei(avg_gwei) * gwei;
    }
    return record;
}

inline BlockRecord make_empty_block(uint64_t number, uint64_t timestamp) {
    return make_block(number, timestamp, 0, 0, 0, 0);
}

// Random valid trace: consecutive numbers, fixed timestamp spacing, and a
// configurable share of empty blocks. Prices are whole Gwei.
inline BlockTrace make_random_trace(Rng& rng, size_t n_blocks, uint64_t first_block = 100,
                                    uint64_t first_ts = 1'000'000, uint64_t spacing = 13,
                                    double empty_fraction = 0.0, uint64_t max_price_gwei = 50) {
    std::vector<BlockRecord> records;
    records.reserve(n_blocks);
    for (size_t i = 0; i < n_blocks; ++i) {
        const uint64_t number = first_block + i;
        const uint64_t ts = first_ts + spacing * i;
        if (empty_fraction > 0.0 && rng.uniform() < empty_fraction) {
            records.push_back(make_empty_block(number, ts));
            continue;
        }
        uint64_t a = 1 + rng.index(max_price_gwei);
        uint64_t b = 1 + rng.index(max_price_gwei);
        const uint64_t lo = std::min(a, b);
        const uint64_t hi = std::max(a, b);
        const uint64_t mid = lo + rng.index(hi - lo + 1);
        const uint64_t txs = 1 + rng.index(20);
        records.push_back(make_block(number, ts, lo, hi, mid, txs));
    }
    return BlockTrace::from_records(std::move(records));
}

// Strict elementwise equality for Eigen matrices/vectors.
template <typename A, typename B>
bool bitwise_equal(const A& a, const B& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        return false;
    }
    return (a.array() == b.array()).all();
}

// Gently rising ETH/USD series covering [first_ts, last_ts].
inline std::vector<EthPricePoint> make_usd_series(uint64_t first_ts, uint64_t last_ts,
                                                  uint64_t spacing = 3600, double base = 100.0) {
    std::vector<EthPricePoint> points;
    uint64_t t = first_ts;
    size_t i = 0;
    while (true) {
        points.push_back({t, base + 0.5 * static_cast<double>(i++)});
        if (t > last_ts) {
            break;
        }
        t += spacing;
    }
    return points;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace gasrec::testutil
