// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "errors.hpp"

// Little-endian primitives for the versioned binary artifacts (window and
// model files). Explicit byte order keeps files portable across hosts.
namespace gasrec::bin {

inline void write_u64(std::ostream& out, uint64_t value) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<unsigned char>(value >> (8 * i));
    }
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

inline void write_f64(std::ostream& out, double value) {
    uint64_t bits;
    std::memcpy(&bits, &value, 8);
    write_u64(out, bits);
}

inline void read_exact(std::istream& in, char* data, size_t size, const char* what) {
    in.read(data, static_cast<std::streamsize>(size));
    if (static_cast<size_t>(in.gcount()) != size) {
        throw IoError(std::string("unexpected end of file reading ") + what);
    }
}

inline uint64_t read_u64(std::istream& in, const char* what) {
    unsigned char bytes[8];
    read_exact(in, reinterpret_cast<char*>(bytes), 8, what);
    uint64_t value = 0;
    for (int i = 0; i < 8; ++i) {
        value |= static_cast<uint64_t>(bytes[i]) << (8 * i);
    }
    return value;
}

inline double read_f64(std::istream& in, const char* what) {
    const uint64_t bits = read_u64(in, what);
    double value;
    std::memcpy(&value, &bits, 8);
    return value;
}

}  // namespace gasrec::bin
