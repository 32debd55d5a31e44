// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rng.hpp"

namespace gasrec {

// Single-layer gated recurrent unit with a linear output head mapping the
// final hidden state to the s-step forecast. Gate conventions:
//
//   z_t = sigmoid(W_z d_t + V_z h_{t-1} + b_z)            update gate
//   r_t = sigmoid(W_r d_t + V_r h_{t-1} + b_r)            reset gate
//   h~_t = tanh(W_h d_t + V_h (r_t ∘ h_{t-1}) + b_h)      candidate state
//   h_t = z_t ∘ h_{t-1} + (1 - z_t) ∘ h~_t
//   output = W_o h_l + b_o
struct GruModel {
    Eigen::Index input_size{0};
    Eigen::Index hidden_size{0};
    Eigen::Index horizon{0};

    Eigen::MatrixXd w_update, w_reset, w_cand;  // hidden × input
    Eigen::MatrixXd v_update, v_reset, v_cand;  // hidden × hidden
    Eigen::VectorXd b_update, b_reset, b_cand;  // hidden
    Eigen::MatrixXd w_out;                      // horizon × hidden
    Eigen::VectorXd b_out;                      // horizon

    // Zero-initialized parameters with the given dimensions.
    static GruModel zeros(Eigen::Index input_size, Eigen::Index hidden_size,
                          Eigen::Index horizon);
    // Weights drawn uniformly from ±1/√hidden_size, biases zero; drawing
    // order is fixed so a seed pins the model bitwise.
    static GruModel init(Eigen::Index input_size, Eigen::Index hidden_size, Eigen::Index horizon,
                         Rng& rng);

    // Shape consistency and finiteness; throws ArgumentError.
    void validate() const;
};

// Everything the backward pass needs from a forward pass.
struct GruCache {
    Eigen::MatrixXd inputs;                 // l × input_size
    std::vector<Eigen::VectorXd> z, r, h_cand;
    std::vector<Eigen::VectorXd> h;         // h[t] after step t; h[-1]=0 implied
    Eigen::VectorXd output;
};

// Runs the recurrence over the rows of `inputs` (h_0 = 0) and returns the
// forecast; fills `cache` when non-null.
Eigen::VectorXd gru_forward(const GruModel& model, const Eigen::MatrixXd& inputs,
                            GruCache* cache = nullptr);

// Parameter gradients; mirrors GruModel's fields.
struct GruGradients {
    Eigen::MatrixXd w_update, w_reset, w_cand;
    Eigen::MatrixXd v_update, v_reset, v_cand;
    Eigen::VectorXd b_update, b_reset, b_cand;
    Eigen::MatrixXd w_out;
    Eigen::VectorXd b_out;

    static GruGradients zeros_like(const GruModel& model);
    void accumulate(const GruGradients& other);
    void scale(double factor);
};

// Backpropagation through time over the cached sequence. `output_grad` is
// dLoss/dOutput at the head.
GruGradients gru_backward(const GruModel& model, const GruCache& cache,
                          const Eigen::VectorXd& output_grad);

double mse_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);
Eigen::VectorXd mse_grad(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

// Flat parameter views in a fixed documented block order (update, reset,
// candidate, output head; W, V, b within each gate). The optimizer and the
// model file both use this order.
size_t parameter_count(const GruModel& model);
std::vector<double> flatten(const GruModel& model);
std::vector<double> flatten(const GruGradients& grads);
void unflatten(std::span<const double> flat, GruModel& model);

}  // namespace gasrec
