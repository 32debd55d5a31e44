// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "errors.hpp"
#include "format.hpp"
#include "wei.hpp"

namespace gasrec {

namespace {

constexpr BlockField kAllFields[] = {
    BlockField::kAvgGasPrice, BlockField::kMaxGasPrice, BlockField::kMinGasPrice,
    BlockField::kTxCount,     BlockField::kGasUtilization,
};

// The block's value for a field, in Gwei for prices; nullopt where undefined.
std::optional<double> field_value(const BlockRecord& record, BlockField field) {
    switch (field) {
        case BlockField::kAvgGasPrice:
            if (!record.avg_gas_price) return std::nullopt;
            return wei_to_gwei(*record.avg_gas_price);
        case BlockField::kMaxGasPrice:
            if (!record.max_gas_price) return std::nullopt;
            return wei_to_gwei(*record.max_gas_price);
        case BlockField::kMinGasPrice:
            if (!record.min_gas_price) return std::nullopt;
            return wei_to_gwei(*record.min_gas_price);
        case BlockField::kTxCount:
            return static_cast<double>(record.tx_count);
        case BlockField::kGasUtilization:
            return record.gas_utilization();
    }
    throw ArgumentError("unknown block field");
}

double mean_of(std::span<const double> values) {
    double sum = 0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

// Pearson coefficient over two equal-length series; NaN when undefined.
double pearson(std::span<const double> x, std::span<const double> y) {
    const size_t n = x.size();
    if (n < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

BlockField parse_block_field(std::string_view name) {
    for (BlockField field : kAllFields) {
        if (name == block_field_name(field)) {
            return field;
        }
    }
    throw ArgumentError("unknown block field '" + std::string(name) + "'");
}

std::string_view block_field_name(BlockField field) {
    switch (field) {
        case BlockField::kAvgGasPrice:
            return "avg_gas_price";
        case BlockField::kMaxGasPrice:
            return "max_gas_price";
        case BlockField::kMinGasPrice:
            return "min_gas_price";
        case BlockField::kTxCount:
            return "tx_count";
        case BlockField::kGasUtilization:
            return "gas_utilization";
    }
    throw ArgumentError("unknown block field");
}

IntervalSeries aggregate_interval(const BlockTrace& trace, BlockField field,
                                  uint64_t interval_seconds) {
    if (interval_seconds == 0) {
        throw ArgumentError("interval_seconds must be positive");
    }
    if (trace.empty()) {
        throw ArgumentError("trace is empty");
    }
    IntervalSeries series;
    series.interval_seconds = interval_seconds;
    // Blocks arrive in non-decreasing timestamp order, so each interval's
    // contributions are contiguous.
    uint64_t current_start = 0;
    double sum = 0;
    size_t count = 0;
    auto flush = [&] {
        if (count > 0) {
            series.points.emplace_back(current_start, sum / static_cast<double>(count));
        }
        sum = 0;
        count = 0;
    };
    for (const auto& record : trace.records()) {
        const uint64_t start = record.timestamp / interval_seconds * interval_seconds;
        if (count > 0 && start != current_start) {
            flush();
        }
        current_start = start;
        if (auto value = field_value(record, field)) {
            sum += *value;
            ++count;
        }
    }
    flush();
    return series;
}

DescriptiveStats descriptive_stats(std::span<const double> series) {
    const size_t n = series.size();
    if (n < 2) {
        throw ArgumentError("descriptive_stats requires at least 2 values");
    }
    DescriptiveStats stats;
    stats.mean = mean_of(series);

    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    if (n % 2 == 1) {
        stats.median = sorted[n / 2];
    } else {
        stats.median = (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    }

    double ss = 0;
    for (double v : series) {
        const double d = v - stats.mean;
        ss += d * d;
    }
    stats.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
    return stats;
}

CorrelationMatrix correlation_matrix(const BlockTrace& trace) {
    size_t priced = 0;
    for (const auto& record : trace.records()) {
        if (record.tx_count > 0) {
            ++priced;
        }
    }
    if (priced < 2) {
        throw DataError("correlation matrix requires at least 2 priced blocks");
    }

    constexpr size_t kN = std::size(kAllFields);
    std::vector<std::vector<std::optional<double>>> columns(kN);
    for (size_t f = 0; f < kN; ++f) {
        columns[f].reserve(trace.size());
        for (const auto& record : trace.records()) {
            columns[f].push_back(field_value(record, kAllFields[f]));
        }
    }

    CorrelationMatrix matrix;
    for (BlockField field : kAllFields) {
        matrix.labels.emplace_back(block_field_name(field));
    }
    matrix.values.assign(kN, std::vector<double>(kN, std::numeric_limits<double>::quiet_NaN()));
    for (size_t i = 0; i < kN; ++i) {
        matrix.values[i][i] = 1.0;
        for (size_t j = i + 1; j < kN; ++j) {
            // Pairwise-complete observations: only blocks where both
            // variables are defined contribute.
            std::vector<double> x, y;
            for (size_t b = 0; b < trace.size(); ++b) {
                if (columns[i][b] && columns[j][b]) {
                    x.push_back(*columns[i][b]);
                    y.push_back(*columns[j][b]);
                }
            }
            const double r = pearson(x, y);
            matrix.values[i][j] = r;
            matrix.values[j][i] = r;
        }
    }
    return matrix;
}

std::vector<double> autocorrelation(std::span<const double> series, size_t max_lag) {
    const size_t n = series.size();
    if (max_lag >= n) {
        throw ArgumentError("max_lag must be smaller than the series length");
    }
    const double mean = mean_of(series);
    double var = 0;
    for (double v : series) {
        const double d = v - mean;
        var += d * d;
    }
    if (var == 0) {
        throw DataError("autocorrelation is undefined for a constant series");
    }
    std::vector<double> acf(max_lag + 1);
    acf[0] = 1.0;
    for (size_t k = 1; k <= max_lag; ++k) {
        double cov = 0;
        for (size_t t = k; t < n; ++t) {
            cov += (series[t] - mean) * (series[t - k] - mean);
        }
        acf[k] = cov / var;
    }
    return acf;
}

void write_analysis_report(const BlockTrace& trace, uint64_t interval_seconds, size_t max_lag,
                           const std::string& path) {
    if (trace.empty()) {
        throw ArgumentError("trace is empty");
    }
    size_t priced = 0;
    for (const auto& record : trace.records()) {
        if (record.tx_count > 0) {
            ++priced;
        }
    }
    if (priced < 2) {
        throw DataError("analysis requires at least 2 priced blocks");
    }

    // Assemble everything before touching the filesystem so a failed
    // computation never leaves a partial report behind.
    std::vector<std::pair<std::string, DescriptiveStats>> stats;
    for (BlockField field : kAllFields) {
        std::vector<double> values;
        for (const auto& record : trace.records()) {
            if (auto value = field_value(record, field)) {
                values.push_back(*value);
            }
        }
        stats.emplace_back(block_field_name(field), descriptive_stats(values));
    }

    const CorrelationMatrix matrix = correlation_matrix(trace);

    const IntervalSeries avg_series =
        aggregate_interval(trace, BlockField::kAvgGasPrice, interval_seconds);
    const IntervalSeries min_series =
        aggregate_interval(trace, BlockField::kMinGasPrice, interval_seconds);
    auto series_values = [](const IntervalSeries& s) {
        std::vector<double> values;
        values.reserve(s.points.size());
        for (const auto& [start, value] : s.points) {
            values.push_back(value);
        }
        return values;
    };
    const std::vector<double> avg_acf = autocorrelation(series_values(avg_series), max_lag);
    const std::vector<double> min_acf = autocorrelation(series_values(min_series), max_lag);

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << "[stats]\n";
    out << "variable,mean,median,std\n";
    for (const auto& [name, s] : stats) {
        out << name << ',' << format_double(s.mean) << ',' << format_double(s.median) << ','
            << format_double(s.std_dev) << '\n';
    }
    out << "\n[correlation]\n";
    out << "variable";
    for (const auto& label : matrix.labels) {
        out << ',' << label;
    }
    out << '\n';
    for (size_t i = 0; i < matrix.labels.size(); ++i) {
        out << matrix.labels[i];
        for (double value : matrix.values[i]) {
            out << ',' << format_double(value);
        }
        out << '\n';
    }
    out << "\n[acf]\n";
    out << "lag,avg_gas_price,min_gas_price\n";
    for (size_t k = 0; k < avg_acf.size(); ++k) {
        out << k << ',' << format_double(avg_acf[k]) << ',' << format_double(min_acf[k]) << '\n';
    }
    if (!out.flush()) {
        throw IoError("failed writing '" + path + "'");
    }
}

}  // namespace gasrec
