// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "model_io.hpp"

#include <cstring>
#include <fstream>

#include "binary_io.hpp"
#include "errors.hpp"

namespace gasrec {

namespace {

constexpr char kModelMagic[6] = {'G', 'R', 'E', 'C', 'v', '1'};
// Dimensions beyond this are sure signs of a corrupt file, not a real model.
constexpr uint64_t kMaxDimension = 1 << 20;

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            bin::write_f64(out, m(r, c));
        }
    }
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        bin::write_f64(out, v[i]);
    }
}

void read_matrix(std::istream& in, Eigen::MatrixXd& m, const char* what) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = bin::read_f64(in, what);
        }
    }
}

void read_vector(std::istream& in, Eigen::VectorXd& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = bin::read_f64(in, what);
    }
}

Eigen::Index checked_dimension(std::istream& in, const char* what) {
    const uint64_t value = bin::read_u64(in, what);
    if (value == 0 || value > kMaxDimension) {
        throw IoError(std::string("model file corrupt: implausible ") + what);
    }
    return static_cast<Eigen::Index>(value);
}

}  // namespace

void save_model(const ModelBundle& bundle, const std::string& path) {
    bundle.model.validate();
    bundle.pipeline.validate();
    bundle.slopes.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out.write(kModelMagic, sizeof kModelMagic);
    bin::write_u64(out, static_cast<uint64_t>(bundle.model.input_size));
    bin::write_u64(out, static_cast<uint64_t>(bundle.model.hidden_size));
    bin::write_u64(out, static_cast<uint64_t>(bundle.model.horizon));

    const PipelineConfig& cfg = bundle.pipeline;
    bin::write_u64(out, cfg.step_seconds);
    bin::write_u64(out, cfg.lag_steps);
    bin::write_f64(out, cfg.outlier_k);
    bin::write_f64(out, cfg.energy_threshold);
    bin::write_u64(out, cfg.input_window);
    bin::write_u64(out, cfg.horizon);
    bin::write_u64(out, cfg.smoothing ? 1 : 0);
    bin::write_f64(out, cfg.train_split);

    for (size_t f = 0; f < kFeatureCount; ++f) {
        bin::write_f64(out, bundle.params.feature_min[f]);
        bin::write_f64(out, bundle.params.feature_max[f]);
    }
    bin::write_f64(out, bundle.params.target_min);
    bin::write_f64(out, bundle.params.target_max);

    bin::write_f64(out, bundle.slopes.min_slope);
    bin::write_f64(out, bundle.slopes.max_slope);

    // Weight blocks in the canonical flatten() order.
    write_matrix(out, bundle.model.w_update);
    write_matrix(out, bundle.model.v_update);
    write_vector(out, bundle.model.b_update);
    write_matrix(out, bundle.model.w_reset);
    write_matrix(out, bundle.model.v_reset);
    write_vector(out, bundle.model.b_reset);
    write_matrix(out, bundle.model.w_cand);
    write_matrix(out, bundle.model.v_cand);
    write_vector(out, bundle.model.b_cand);
    write_matrix(out, bundle.model.w_out);
    write_vector(out, bundle.model.b_out);

    if (!out.flush()) {
        throw IoError("failed writing '" + path + "'");
    }
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    char magic[sizeof kModelMagic];
    bin::read_exact(in, magic, sizeof magic, "magic");
    if (std::memcmp(magic, kModelMagic, sizeof magic) != 0) {
        throw IoError("'" + path + "' is not a model file (bad magic)");
    }
    ModelBundle bundle;
    const Eigen::Index input_size = checked_dimension(in, "input_size");
    const Eigen::Index hidden_size = checked_dimension(in, "hidden_size");
    const Eigen::Index horizon = checked_dimension(in, "horizon");

    PipelineConfig& cfg = bundle.pipeline;
    cfg.step_seconds = bin::read_u64(in, "step_seconds");
    cfg.lag_steps = bin::read_u64(in, "lag_steps");
    cfg.outlier_k = bin::read_f64(in, "outlier_k");
    cfg.energy_threshold = bin::read_f64(in, "energy_threshold");
    cfg.input_window = bin::read_u64(in, "input_window");
    cfg.horizon = bin::read_u64(in, "horizon");
    cfg.smoothing = bin::read_u64(in, "smoothing") != 0;
    cfg.train_split = bin::read_f64(in, "train_split");
    try {
        cfg.validate();
        if (static_cast<uint64_t>(horizon) != cfg.horizon) {
            throw ArgumentError("model horizon disagrees with the pipeline horizon");
        }
        if (static_cast<size_t>(input_size) != kFeatureCount) {
            throw ArgumentError("model input size disagrees with the feature layout");
        }
    } catch (const ArgumentError& e) {
        throw IoError("model file corrupt: " + std::string(e.what()));
    }

    for (size_t f = 0; f < kFeatureCount; ++f) {
        bundle.params.feature_min[f] = bin::read_f64(in, "feature_min");
        bundle.params.feature_max[f] = bin::read_f64(in, "feature_max");
    }
    bundle.params.target_min = bin::read_f64(in, "target_min");
    bundle.params.target_max = bin::read_f64(in, "target_max");

    bundle.slopes.min_slope = bin::read_f64(in, "min_slope");
    bundle.slopes.max_slope = bin::read_f64(in, "max_slope");
    try {
        bundle.slopes.validate();
    } catch (const ArgumentError& e) {
        throw IoError("model file corrupt: " + std::string(e.what()));
    }

    bundle.model = GruModel::zeros(input_size, hidden_size, horizon);
    read_matrix(in, bundle.model.w_update, "w_update");
    read_matrix(in, bundle.model.v_update, "v_update");
    read_vector(in, bundle.model.b_update, "b_update");
    read_matrix(in, bundle.model.w_reset, "w_reset");
    read_matrix(in, bundle.model.v_reset, "v_reset");
    read_vector(in, bundle.model.b_reset, "b_reset");
    read_matrix(in, bundle.model.w_cand, "w_cand");
    read_matrix(in, bundle.model.v_cand, "v_cand");
    read_vector(in, bundle.model.b_cand, "b_cand");
    read_matrix(in, bundle.model.w_out, "w_out");
    read_vector(in, bundle.model.b_out, "b_out");

    try {
        bundle.model.validate();
    } catch (const ArgumentError& e) {
        throw IoError("model file corrupt: " + std::string(e.what()));
    }
    return bundle;
}

}  // namespace gasrec
