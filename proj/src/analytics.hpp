// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "block_trace.hpp"

namespace gasrec {

// Per-block variables the empirical analysis operates on. Price fields are
// null on empty blocks and skipped; tx_count and gas_utilization are defined
// for every block.
enum class BlockField {
    kAvgGasPrice,
    kMaxGasPrice,
    kMinGasPrice,
    kTxCount,
    kGasUtilization,
};

BlockField parse_block_field(std::string_view name);
std::string_view block_field_name(BlockField field);

// An interval-aggregated series: for each interval that contains at least one
// block with a defined value, the arithmetic mean of that value. Interval
// starts are aligned to multiples of interval_seconds since the epoch.
struct IntervalSeries {
    uint64_t interval_seconds{0};
    std::vector<std::pair<uint64_t, double>> points;  // (interval start, mean)
};

IntervalSeries aggregate_interval(const BlockTrace& trace, BlockField field,
                                  uint64_t interval_seconds);

struct DescriptiveStats {
    double mean{0};
    double median{0};
    double std_dev{0};  // sample standard deviation (n-1 denominator)
};

// Requires at least two values (the standard deviation is otherwise undefined).
DescriptiveStats descriptive_stats(std::span<const double> series);

// Pearson correlations over pairwise-complete observations. Entries that are
// undefined (a constant variable, or fewer than two complete pairs) are NaN;
// the diagonal is exactly 1.
struct CorrelationMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;
};

CorrelationMatrix correlation_matrix(const BlockTrace& trace);

// Autocorrelation function with the standard biased estimator, returning
// lags 0..max_lag inclusive. acf[0] is exactly 1.
std::vector<double> autocorrelation(std::span<const double> series, size_t max_lag);

// Writes the full empirical report: descriptive statistics per block variable,
// the correlation matrix, and ACF columns for the interval-mean average and
// minimum gas price series. Sections are bracket-tagged so each is
// independently machine-readable.
void write_analysis_report(const BlockTrace& trace, uint64_t interval_seconds, size_t max_lag,
                           const std::string& path);

}  // namespace gasrec
