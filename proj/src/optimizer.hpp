// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gasrec {

struct AdamConfig {
    double learning_rate{1e-3};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
};

// Adam with bias correction over a flat parameter vector. The moment buffers
// are positional, so every step must pass the same parameter layout.
class Adam {
  public:
    Adam(const AdamConfig& config, size_t parameter_count);

    // Applies one update in place. Throws TrainError on a non-finite
    // gradient, leaving parameters and state untouched.
    void step(std::span<double> params, std::span<const double> grads);

    uint64_t steps_taken() const { return steps_; }

  private:
    AdamConfig config_;
    std::vector<double> m_;
    std::vector<double> v_;
    uint64_t steps_{0};
};

// Scales `grads` in place so its L2 norm is at most max_norm; no-op when
// max_norm <= 0 (clipping disabled) or the norm is already within bounds.
void clip_grad_norm(std::span<double> grads, double max_norm);

}  // namespace gasrec
