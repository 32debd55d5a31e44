// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "gru.hpp"

#include <cmath>

#include "errors.hpp"

namespace gasrec {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& a) {
    return a.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

void check_shape(bool ok, const char* what) {
    if (!ok) {
        throw ArgumentError(std::string("GRU model shape mismatch: ") + what);
    }
}

// Applies f to every parameter block of a model-shaped aggregate, in the
// fixed serialization order.
template <typename ModelLike, typename F>
void for_each_block(ModelLike& m, F&& f) {
    f(m.w_update);
    f(m.v_update);
    f(m.b_update);
    f(m.w_reset);
    f(m.v_reset);
    f(m.b_reset);
    f(m.w_cand);
    f(m.v_cand);
    f(m.b_cand);
    f(m.w_out);
    f(m.b_out);
}

}  // namespace

GruModel GruModel::zeros(Eigen::Index input_size, Eigen::Index hidden_size,
                         Eigen::Index horizon) {
    if (input_size < 1 || hidden_size < 1 || horizon < 1) {
        throw ArgumentError("GRU dimensions must be positive");
    }
    GruModel model;
    model.input_size = input_size;
    model.hidden_size = hidden_size;
    model.horizon = horizon;
    model.w_update = Eigen::MatrixXd::Zero(hidden_size, input_size);
    model.w_reset = Eigen::MatrixXd::Zero(hidden_size, input_size);
    model.w_cand = Eigen::MatrixXd::Zero(hidden_size, input_size);
    model.v_update = Eigen::MatrixXd::Zero(hidden_size, hidden_size);
    model.v_reset = Eigen::MatrixXd::Zero(hidden_size, hidden_size);
    model.v_cand = Eigen::MatrixXd::Zero(hidden_size, hidden_size);
    model.b_update = Eigen::VectorXd::Zero(hidden_size);
    model.b_reset = Eigen::VectorXd::Zero(hidden_size);
    model.b_cand = Eigen::VectorXd::Zero(hidden_size);
    model.w_out = Eigen::MatrixXd::Zero(horizon, hidden_size);
    model.b_out = Eigen::VectorXd::Zero(horizon);
    return model;
}

GruModel GruModel::init(Eigen::Index input_size, Eigen::Index hidden_size, Eigen::Index horizon,
                        Rng& rng) {
    GruModel model = zeros(input_size, hidden_size, horizon);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
    auto fill = [&](Eigen::MatrixXd& weights) {
        for (Eigen::Index r = 0; r < weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < weights.cols(); ++c) {
                weights(r, c) = rng.uniform(-bound, bound);
            }
        }
    };
    // Biases stay zero; drawing order fixed for determinism.
    fill(model.w_update);
    fill(model.v_update);
    fill(model.w_reset);
    fill(model.v_reset);
    fill(model.w_cand);
    fill(model.v_cand);
    fill(model.w_out);
    return model;
}

void GruModel::validate() const {
    check_shape(input_size >= 1 && hidden_size >= 1 && horizon >= 1, "dimensions");
    check_shape(w_update.rows() == hidden_size && w_update.cols() == input_size, "w_update");
    check_shape(w_reset.rows() == hidden_size && w_reset.cols() == input_size, "w_reset");
    check_shape(w_cand.rows() == hidden_size && w_cand.cols() == input_size, "w_cand");
    check_shape(v_update.rows() == hidden_size && v_update.cols() == hidden_size, "v_update");
    check_shape(v_reset.rows() == hidden_size && v_reset.cols() == hidden_size, "v_reset");
    check_shape(v_cand.rows() == hidden_size && v_cand.cols() == hidden_size, "v_cand");
    check_shape(b_update.size() == hidden_size, "b_update");
    check_shape(b_reset.size() == hidden_size, "b_reset");
    check_shape(b_cand.size() == hidden_size, "b_cand");
    check_shape(w_out.rows() == horizon && w_out.cols() == hidden_size, "w_out");
    check_shape(b_out.size() == horizon, "b_out");
    bool finite = true;
    for_each_block(*this, [&](const auto& block) { finite = finite && block.allFinite(); });
    if (!finite) {
        throw ArgumentError("GRU model contains non-finite parameters");
    }
}

Eigen::VectorXd gru_forward(const GruModel& model, const Eigen::MatrixXd& inputs,
                            GruCache* cache) {
    model.validate();
    if (inputs.rows() < 1 || inputs.cols() != model.input_size) {
        throw ArgumentError("GRU input must be an l × input_size matrix with l >= 1");
    }
    if (!inputs.allFinite()) {
        throw ArgumentError("GRU input contains non-finite values");
    }
    const auto l = inputs.rows();
    if (cache) {
        cache->inputs = inputs;
        cache->z.resize(static_cast<size_t>(l));
        cache->r.resize(static_cast<size_t>(l));
        cache->h_cand.resize(static_cast<size_t>(l));
        cache->h.resize(static_cast<size_t>(l));
    }
    Eigen::VectorXd h = Eigen::VectorXd::Zero(model.hidden_size);
    for (Eigen::Index t = 0; t < l; ++t) {
        const Eigen::VectorXd d = inputs.row(t).transpose();
        const Eigen::VectorXd z = sigmoid(model.w_update * d + model.v_update * h + model.b_update);
        const Eigen::VectorXd r = sigmoid(model.w_reset * d + model.v_reset * h + model.b_reset);
        const Eigen::VectorXd h_cand =
            (model.w_cand * d + model.v_cand * (r.cwiseProduct(h)) + model.b_cand)
                .array()
                .tanh();
        h = z.cwiseProduct(h) + (Eigen::VectorXd::Ones(model.hidden_size) - z).cwiseProduct(h_cand);
        if (cache) {
            cache->z[static_cast<size_t>(t)] = z;
            cache->r[static_cast<size_t>(t)] = r;
            cache->h_cand[static_cast<size_t>(t)] = h_cand;
            cache->h[static_cast<size_t>(t)] = h;
        }
    }
    Eigen::VectorXd output = model.w_out * h + model.b_out;
    if (cache) {
        cache->output = output;
    }
    return output;
}

GruGradients GruGradients::zeros_like(const GruModel& model) {
    GruGradients grads;
    grads.w_update = Eigen::MatrixXd::Zero(model.hidden_size, model.input_size);
    grads.w_reset = Eigen::MatrixXd::Zero(model.hidden_size, model.input_size);
    grads.w_cand = Eigen::MatrixXd::Zero(model.hidden_size, model.input_size);
    grads.v_update = Eigen::MatrixXd::Zero(model.hidden_size, model.hidden_size);
    grads.v_reset = Eigen::MatrixXd::Zero(model.hidden_size, model.hidden_size);
    grads.v_cand = Eigen::MatrixXd::Zero(model.hidden_size, model.hidden_size);
    grads.b_update = Eigen::VectorXd::Zero(model.hidden_size);
    grads.b_reset = Eigen::VectorXd::Zero(model.hidden_size);
    grads.b_cand = Eigen::VectorXd::Zero(model.hidden_size);
    grads.w_out = Eigen::MatrixXd::Zero(model.horizon, model.hidden_size);
    grads.b_out = Eigen::VectorXd::Zero(model.horizon);
    return grads;
}

void GruGradients::accumulate(const GruGradients& other) {
    w_update += other.w_update;
    v_update += other.v_update;
    b_update += other.b_update;
    w_reset += other.w_reset;
    v_reset += other.v_reset;
    b_reset += other.b_reset;
    w_cand += other.w_cand;
    v_cand += other.v_cand;
    b_cand += other.b_cand;
    w_out += other.w_out;
    b_out += other.b_out;
}

void GruGradients::scale(double factor) {
    for_each_block(*this, [factor](auto& block) { block *= factor; });
}

GruGradients gru_backward(const GruModel& model, const GruCache& cache,
                          const Eigen::VectorXd& output_grad) {
    const auto l = cache.inputs.rows();
    if (l < 1 || static_cast<size_t>(l) != cache.h.size() ||
        cache.z.size() != cache.h.size() || cache.r.size() != cache.h.size() ||
        cache.h_cand.size() != cache.h.size() ||
        cache.inputs.cols() != model.input_size ||
        (!cache.h.empty() && cache.h.back().size() != model.hidden_size)) {
        throw Error("GRU cache does not match the model");
    }
    if (output_grad.size() != model.horizon) {
        throw ArgumentError("output gradient length must equal the horizon");
    }

    GruGradients grads = GruGradients::zeros_like(model);
    const Eigen::VectorXd& h_last = cache.h.back();
    grads.w_out = output_grad * h_last.transpose();
    grads.b_out = output_grad;

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(model.hidden_size);
    Eigen::VectorXd dh = model.w_out.transpose() * output_grad;
    for (Eigen::Index t = l - 1; t >= 0; --t) {
        const size_t ut = static_cast<size_t>(t);
        const Eigen::VectorXd& z = cache.z[ut];
        const Eigen::VectorXd& r = cache.r[ut];
        const Eigen::VectorXd& h_cand = cache.h_cand[ut];
        Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(model.hidden_size);
        if (t > 0) {
            h_prev = cache.h[ut - 1];
        }
        const Eigen::VectorXd d = cache.inputs.row(t).transpose();

        // h = z∘h_prev + (1−z)∘h~
        const Eigen::VectorXd dz = dh.cwiseProduct(h_prev - h_cand);
        const Eigen::VectorXd dh_cand = dh.cwiseProduct(ones - z);

        // Through the activations: σ' = σ(1−σ), tanh' = 1−tanh².
        const Eigen::VectorXd da_cand =
            dh_cand.cwiseProduct(ones - h_cand.cwiseProduct(h_cand));
        const Eigen::VectorXd da_update = dz.cwiseProduct(z).cwiseProduct(ones - z);

        grads.w_cand += da_cand * d.transpose();
        grads.v_cand += da_cand * (r.cwiseProduct(h_prev)).transpose();
        grads.b_cand += da_cand;

        const Eigen::VectorXd d_rh = model.v_cand.transpose() * da_cand;
        const Eigen::VectorXd dr = d_rh.cwiseProduct(h_prev);
        const Eigen::VectorXd da_reset = dr.cwiseProduct(r).cwiseProduct(ones - r);

        grads.w_reset += da_reset * d.transpose();
        grads.v_reset += da_reset * h_prev.transpose();
        grads.b_reset += da_reset;

        grads.w_update += da_update * d.transpose();
        grads.v_update += da_update * h_prev.transpose();
        grads.b_update += da_update;

        dh = dh.cwiseProduct(z) + d_rh.cwiseProduct(r) +
             model.v_update.transpose() * da_update + model.v_reset.transpose() * da_reset;
    }
    return grads;
}

double mse_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
    if (predicted.size() != actual.size() || predicted.size() == 0) {
        throw ArgumentError("mse_loss requires equal non-zero lengths");
    }
    return (predicted - actual).squaredNorm() / static_cast<double>(predicted.size());
}

Eigen::VectorXd mse_grad(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
    if (predicted.size() != actual.size() || predicted.size() == 0) {
        throw ArgumentError("mse_grad requires equal non-zero lengths");
    }
    return 2.0 / static_cast<double>(predicted.size()) * (predicted - actual);
}

size_t parameter_count(const GruModel& model) {
    size_t count = 0;
    for_each_block(model, [&](const auto& block) { count += static_cast<size_t>(block.size()); });
    return count;
}

namespace {

template <typename ModelLike>
std::vector<double> flatten_blocks(const ModelLike& m) {
    std::vector<double> flat;
    for_each_block(m, [&](const auto& block) {
        // Row-major within each block, matching the model file layout.
        for (Eigen::Index r = 0; r < block.rows(); ++r) {
            for (Eigen::Index c = 0; c < block.cols(); ++c) {
                flat.push_back(block(r, c));
            }
        }
    });
    return flat;
}

}  // namespace

std::vector<double> flatten(const GruModel& model) {
    return flatten_blocks(model);
}

std::vector<double> flatten(const GruGradients& grads) {
    return flatten_blocks(grads);
}

void unflatten(std::span<const double> flat, GruModel& model) {
    if (flat.size() != parameter_count(model)) {
        throw ArgumentError("flat parameter vector does not match the model size");
    }
    size_t i = 0;
    for_each_block(model, [&](auto& block) {
        for (Eigen::Index r = 0; r < block.rows(); ++r) {
            for (Eigen::Index c = 0; c < block.cols(); ++c) {
                block(r, c) = flat[i++];
            }
        }
    });
}

}  // namespace gasrec
