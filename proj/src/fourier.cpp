// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "fourier.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "errors.hpp"

namespace gasrec {

std::vector<double> fourier_smooth(std::span<const double> values, double energy_threshold) {
    if (!(energy_threshold > 0.0) || energy_threshold > 1.0) {
        throw ArgumentError("energy threshold must lie in (0, 1]");
    }
    const size_t n = values.size();
    if (n < 2) {
        throw ArgumentError("fourier_smooth requires at least 2 values");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ArgumentError("fourier_smooth input must be finite");
        }
    }

    // Real input: the spectrum is conjugate-symmetric, so bins 0..n/2 carry
    // everything. Bin k for 0 < k < n/2 stands for the conjugate pair
    // (k, n-k) and owns twice its own energy.
    const size_t half = n / 2;
    std::vector<std::complex<double>> spectrum(half + 1);
    for (size_t k = 0; k <= half; ++k) {
        double re = 0, im = 0;
        for (size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                                 static_cast<double>(t) / static_cast<double>(n);
            re += values[t] * std::cos(angle);
            im += values[t] * std::sin(angle);
        }
        spectrum[k] = {re, im};
    }

    std::vector<double> bin_energy(half + 1);
    double total = 0;
    for (size_t k = 0; k <= half; ++k) {
        double e = std::norm(spectrum[k]);
        const bool paired = k != 0 && !(n % 2 == 0 && k == half);
        if (paired) {
            e *= 2;
        }
        bin_energy[k] = e;
        total += e;
    }

    // Keep the minimal ascending-frequency prefix whose energy reaches the
    // threshold. DC is always kept so the mean survives.
    size_t kept_max = 0;
    double kept = bin_energy[0];
    while (kept < energy_threshold * total && kept_max < half) {
        ++kept_max;
        kept += bin_energy[kept_max];
    }
    // With every bin kept, `kept` equals `total` bitwise (identical summation
    // order), so the bound holds even at threshold 1.
    if (kept < energy_threshold * total) {
        throw Error("fourier_smooth energy bound violated");
    }

    std::vector<double> output(n);
    for (size_t t = 0; t < n; ++t) {
        double acc = spectrum[0].real();
        for (size_t k = 1; k <= kept_max; ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) *
                                 static_cast<double>(t) / static_cast<double>(n);
            const bool paired = !(n % 2 == 0 && k == half);
            const double contribution =
                spectrum[k].real() * std::cos(angle) - spectrum[k].imag() * std::sin(angle);
            acc += paired ? 2 * contribution : contribution;
        }
        output[t] = acc / static_cast<double>(n);
    }
    return output;
}

}  // namespace gasrec
