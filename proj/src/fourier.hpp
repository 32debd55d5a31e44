// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace gasrec {

// Low-pass smoothing via the discrete Fourier transform: keep the smallest
// prefix of the frequency ladder (DC first, then each conjugate pair in
// ascending frequency) whose cumulative squared magnitude reaches
// energy_threshold × total, zero the rest, and invert. The output is real and
// preserves the input mean exactly up to rounding (DC is always kept).
//
// Window sizes here are small (tens of samples), so the transform is the
// direct O(n²) sum on the real half-spectrum — simple, dependency-free, and
// fast enough by orders of magnitude.
std::vector<double> fourier_smooth(std::span<const double> values, double energy_threshold);

}  // namespace gasrec
