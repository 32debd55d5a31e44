// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "optimizer.hpp"

#include <cmath>

#include "errors.hpp"

namespace gasrec {

Adam::Adam(const AdamConfig& config, size_t parameter_count)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {
    if (!(config.learning_rate > 0)) {
        throw ArgumentError("learning_rate must be positive");
    }
    if (!(config.beta1 >= 0 && config.beta1 < 1) || !(config.beta2 >= 0 && config.beta2 < 1)) {
        throw ArgumentError("Adam betas must lie in [0, 1)");
    }
    if (!(config.epsilon > 0)) {
        throw ArgumentError("epsilon must be positive");
    }
}

void Adam::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw ArgumentError("parameter/gradient size does not match the optimizer state");
    }
    for (double g : grads) {
        if (!std::isfinite(g)) {
            throw TrainError("non-finite gradient encountered");
        }
    }
    const uint64_t t = steps_ + 1;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t));
    for (size_t i = 0; i < params.size(); ++i) {
        m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grads[i];
        v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grads[i] * grads[i];
        const double m_hat = m_[i] / bc1;
        const double v_hat = v_[i] / bc2;
        params[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
    steps_ = t;
}

void clip_grad_norm(std::span<double> grads, double max_norm) {
    if (max_norm <= 0) {
        return;
    }
    double ss = 0;
    for (double g : grads) {
        ss += g * g;
    }
    const double norm = std::sqrt(ss);
    if (norm <= max_norm) {
        return;
    }
    const double factor = max_norm / norm;
    for (double& g : grads) {
        g *= factor;
    }
}

}  // namespace gasrec
