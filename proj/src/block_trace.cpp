// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "block_trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "format.hpp"

namespace gasrec {

namespace {

constexpr char kTraceHeader[] = "number,timestamp,min_gas_price_wei,max_gas_price_wei,avg_gas_price_wei,tx_count,gas_used,gas_limit";
constexpr char kPriceHeader[] = "timestamp,usd_price";

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

uint64_t parse_u64(std::string_view text, size_t line_no, const char* what) {
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        std::ostringstream msg;
        msg << "line " << line_no << ": invalid " << what << " '" << text << "'";
        throw ParseError(msg.str());
    }
    return value;
}

double parse_double(std::string_view text, size_t line_no, const char* what) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        std::ostringstream msg;
        msg << "line " << line_no << ": invalid " << what << " '" << text << "'";
        throw ParseError(msg.str());
    }
    return value;
}

std::optional<Wei> parse_optional_wei(std::string_view text, size_t line_no, const char* what) {
    if (text.empty()) {
        return std::nullopt;
    }
    try {
        return parse_wei(text);
    } catch (const ParseError&) {
        std::ostringstream msg;
        msg << "line " << line_no << ": invalid " << what << " '" << text << "'";
        throw ParseError(msg.str());
    }
}

}  // namespace

void BlockRecord::validate() const {
    const bool has_prices = min_gas_price && max_gas_price && avg_gas_price;
    const bool no_prices = !min_gas_price && !max_gas_price && !avg_gas_price;
    std::ostringstream msg;
    msg << "block " << number << ": ";
    if (!has_prices && !no_prices) {
        msg << "price fields must all be set or all be null";
        throw DataError(msg.str());
    }
    if (tx_count == 0 && !no_prices) {
        msg << "empty block carries gas prices";
        throw DataError(msg.str());
    }
    if (tx_count > 0 && !has_prices) {
        msg << "non-empty block missing gas prices";
        throw DataError(msg.str());
    }
    if (has_prices) {
        if (*min_gas_price < 0) {
            msg << "negative gas price";
            throw DataError(msg.str());
        }
        if (!(*min_gas_price <= *avg_gas_price && *avg_gas_price <= *max_gas_price)) {
            msg << "gas prices violate min <= avg <= max";
            throw DataError(msg.str());
        }
    }
    if (gas_used > gas_limit) {
        msg << "gas_used exceeds gas_limit";
        throw DataError(msg.str());
    }
}

BlockTrace BlockTrace::from_records(std::vector<BlockRecord> records) {
    for (const auto& record : records) {
        record.validate();
    }
    for (size_t i = 1; i < records.size(); ++i) {
        if (records[i].number != records[i - 1].number + 1) {
            std::ostringstream msg;
            msg << "non-contiguous block heights: " << records[i - 1].number << " followed by "
                << records[i].number;
            throw DataError(msg.str());
        }
        if (records[i].timestamp < records[i - 1].timestamp) {
            std::ostringstream msg;
            msg << "block " << records[i].number << ": timestamp decreases";
            throw DataError(msg.str());
        }
    }
    BlockTrace trace;
    trace.records_ = std::move(records);
    return trace;
}

const BlockRecord& BlockTrace::at(uint64_t number) const {
    if (!contains(number)) {
        std::ostringstream msg;
        msg << "block " << number << " outside trace";
        throw ArgumentError(msg.str());
    }
    return records_[number - first_number()];
}

void write_trace_csv(const BlockTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << kTraceHeader << '\n';
    for (const auto& record : trace.records()) {
        out << record.number << ',' << record.timestamp << ',';
        if (record.min_gas_price) {
            out << record.min_gas_price->str();
        }
        out << ',';
        if (record.max_gas_price) {
            out << record.max_gas_price->str();
        }
        out << ',';
        if (record.avg_gas_price) {
            out << record.avg_gas_price->str();
        }
        out << ',' << record.tx_count << ',' << record.gas_used << ',' << record.gas_limit << '\n';
    }
    if (!out.flush()) {
        throw IoError("failed writing '" + path + "'");
    }
}

BlockTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("'" + path + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kTraceHeader) {
        throw ParseError("'" + path + "': unexpected header '" + line + "'");
    }
    std::vector<BlockRecord> records;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != 8) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected 8 fields, got " << fields.size();
            throw ParseError(msg.str());
        }
        BlockRecord record;
        record.number = parse_u64(fields[0], line_no, "block number");
        record.timestamp = parse_u64(fields[1], line_no, "timestamp");
        record.min_gas_price = parse_optional_wei(fields[2], line_no, "min_gas_price_wei");
        record.max_gas_price = parse_optional_wei(fields[3], line_no, "max_gas_price_wei");
        record.avg_gas_price = parse_optional_wei(fields[4], line_no, "avg_gas_price_wei");
        record.tx_count = parse_u64(fields[5], line_no, "tx_count");
        record.gas_used = parse_u64(fields[6], line_no, "gas_used");
        record.gas_limit = parse_u64(fields[7], line_no, "gas_limit");
        records.push_back(std::move(record));
    }
    return BlockTrace::from_records(std::move(records));
}

std::vector<EthPricePoint> read_eth_price_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("'" + path + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kPriceHeader) {
        throw ParseError("'" + path + "': unexpected header '" + line + "'");
    }
    std::vector<EthPricePoint> prices;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != 2) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected 2 fields, got " << fields.size();
            throw ParseError(msg.str());
        }
        EthPricePoint point;
        point.timestamp = parse_u64(fields[0], line_no, "timestamp");
        point.usd_price = parse_double(fields[1], line_no, "usd_price");
        prices.push_back(point);
    }
    validate_eth_prices(prices);
    return prices;
}

void write_eth_price_csv(std::span<const EthPricePoint> prices, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << kPriceHeader << '\n';
    for (const auto& point : prices) {
        out << point.timestamp << ',' << format_double(point.usd_price) << '\n';
    }
    if (!out.flush()) {
        throw IoError("failed writing '" + path + "'");
    }
}

void validate_eth_prices(std::span<const EthPricePoint> prices) {
    for (size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i].usd_price > 0) || !std::isfinite(prices[i].usd_price)) {
            throw ArgumentError("ETH price series: usd_price must be positive and finite");
        }
        if (i > 0 && prices[i].timestamp <= prices[i - 1].timestamp) {
            throw ArgumentError("ETH price series: timestamps must be strictly increasing");
        }
    }
}

double eth_price_at(std::span<const EthPricePoint> prices, uint64_t timestamp) {
    if (prices.empty()) {
        throw ArgumentError("ETH price series is empty");
    }
    if (timestamp < prices.front().timestamp) {
        std::ostringstream msg;
        msg << "timestamp " << timestamp << " precedes first ETH price point at "
            << prices.front().timestamp;
        throw DataError(msg.str());
    }
    // Greatest point with timestamp <= the query.
    auto it = std::upper_bound(prices.begin(), prices.end(), timestamp,
                               [](uint64_t ts, const EthPricePoint& p) { return ts < p.timestamp; });
    return std::prev(it)->usd_price;
}

std::vector<double> join_eth_price(const BlockTrace& trace, std::span<const EthPricePoint> prices) {
    if (prices.empty()) {
        throw ArgumentError("ETH price series is empty");
    }
    validate_eth_prices(prices);
    std::vector<double> joined;
    joined.reserve(trace.size());
    for (const auto& record : trace.records()) {
        joined.push_back(eth_price_at(prices, record.timestamp));
    }
    return joined;
}

}  // namespace gasrec
