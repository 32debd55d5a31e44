// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gasrec {

// Seeded RNG with explicit distributions. std::mt19937_64 output is fixed by
// the standard, but <random> distributions are not; drawing doubles and
// shuffles by hand keeps trained models and golden files bit-identical
// across standard library versions.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform index in [0, n). Rejection sampling keeps it unbiased.
    size_t index(size_t n) {
        const uint64_t bound = UINT64_MAX - UINT64_MAX % n;
        uint64_t draw = gen_();
        while (draw >= bound) {
            draw = gen_();
        }
        return static_cast<size_t>(draw % n);
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[index(i)]);
        }
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace gasrec
