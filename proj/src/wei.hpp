// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace gasrec {

// Gas prices are kept as arbitrary-precision wei integers until they cross
// into the model side, where they become floating Gwei.
using Wei = boost::multiprecision::cpp_int;

inline constexpr double kWeiPerGwei = 1e9;

inline double wei_to_gwei(const Wei& wei) {
    return wei.convert_to<double>() / kWeiPerGwei;
}

// Rounds to the nearest wei.
inline Wei gwei_to_wei(double gwei) {
    if (!std::isfinite(gwei)) {
        throw ArgumentError("non-finite Gwei value");
    }
    long double scaled = std::roundl(static_cast<long double>(gwei) * 1e9L);
    return Wei(scaled);
}

// Parses a non-negative decimal integer.
inline Wei parse_wei(std::string_view text) {
    if (text.empty()) {
        throw ParseError("empty wei value");
    }
    for (char c : text) {
        if (c < '0' || c > '9') {
            throw ParseError("invalid wei value '" + std::string(text) + "'");
        }
    }
    return Wei(std::string(text));
}

// Parses an Ethereum JSON-RPC quantity ("0x"-prefixed hex).
inline Wei parse_hex_quantity(std::string_view text) {
    if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) {
        throw ParseError("invalid hex quantity '" + std::string(text) + "'");
    }
    for (char c : text.substr(2)) {
        if (!std::isxdigit(static_cast<unsigned char>(c))) {
            throw ParseError("invalid hex quantity '" + std::string(text) + "'");
        }
    }
    return Wei("0x" + std::string(text.substr(2)));
}

inline uint64_t wei_to_u64(const Wei& wei) {
    if (wei < 0 || wei > Wei(UINT64_MAX)) {
        throw ArgumentError("wei value out of uint64 range: " + wei.str());
    }
    return wei.convert_to<uint64_t>();
}

}  // namespace gasrec
