// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#include "training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "errors.hpp"
#include "format.hpp"

namespace gasrec {

namespace {

double mean_loss(const GruModel& model, std::span<const WindowSample> samples) {
    double sum = 0;
    for (const auto& sample : samples) {
        sum += mse_loss(gru_forward(model, sample.inputs), sample.targets);
    }
    return sum / static_cast<double>(samples.size());
}

// The pricing algorithm normalizes forecast slopes against the extremes seen
// in training; collect them from the trained model's own forecasts (or the
// raw targets, when configured).
SlopeNormalizer fit_slopes(const GruModel& model, const WindowDataset& dataset, size_t n_train,
                           bool from_targets) {
    std::vector<std::vector<double>> windows;
    windows.reserve(n_train);
    for (size_t i = 0; i < n_train; ++i) {
        Eigen::VectorXd normalized;
        if (from_targets) {
            normalized = dataset.samples[i].targets;
        } else {
            normalized = gru_forward(model, dataset.samples[i].inputs);
        }
        const Eigen::VectorXd gwei = denormalize_targets(normalized, dataset.params);
        windows.emplace_back(gwei.data(), gwei.data() + gwei.size());
    }
    return fit_slope_normalizer(windows);
}

}  // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0)) {
        throw ArgumentError("learning_rate must be positive");
    }
    if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
        throw ArgumentError("Adam betas must lie in [0, 1)");
    }
    if (!(epsilon > 0)) {
        throw ArgumentError("epsilon must be positive");
    }
    if (batch_size == 0) {
        throw ArgumentError("batch_size must be positive");
    }
    if (!(split_ratio > 0) || !(split_ratio < 1)) {
        throw ArgumentError("split_ratio must lie in (0, 1)");
    }
    if (hidden_size == 0) {
        throw ArgumentError("hidden_size must be positive");
    }
    if (grad_clip < 0) {
        throw ArgumentError("grad_clip must be non-negative (0 disables clipping)");
    }
}

std::pair<ModelBundle, TrainReport> train(const WindowDataset& dataset,
                                          const TrainConfig& config) {
    config.validate();
    dataset.config.validate();
    const auto start_time = std::chrono::steady_clock::now();

    const auto& samples = dataset.samples;
    const size_t total = samples.size();
    const size_t n_train =
        static_cast<size_t>(std::floor(config.split_ratio * static_cast<double>(total)));
    if (n_train < 1 || n_train >= total) {
        throw DataError(
            "dataset of " + std::to_string(total) +
            " windows leaves an empty training or validation set at split_ratio " +
            std::to_string(config.split_ratio));
    }
    const std::span<const WindowSample> val_samples(samples.data() + n_train, total - n_train);

    Rng rng(config.seed);
    GruModel model = GruModel::init(static_cast<Eigen::Index>(kFeatureCount),
                                    static_cast<Eigen::Index>(config.hidden_size),
                                    static_cast<Eigen::Index>(dataset.config.horizon), rng);

    TrainReport report;
    if (config.epochs > 0) {
        Adam adam({config.learning_rate, config.beta1, config.beta2, config.epsilon},
                  parameter_count(model));
        std::vector<size_t> order(n_train);
        std::iota(order.begin(), order.end(), size_t{0});

        std::vector<double> best_params;
        double best_val = std::numeric_limits<double>::infinity();

        for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
            rng.shuffle(order);
            double epoch_loss = 0;
            for (size_t begin = 0; begin < n_train; begin += config.batch_size) {
                const size_t end = std::min(begin + config.batch_size, n_train);
                GruGradients grads = GruGradients::zeros_like(model);
                for (size_t i = begin; i < end; ++i) {
                    const WindowSample& sample = samples[order[i]];
                    GruCache cache;
                    const Eigen::VectorXd predicted = gru_forward(model, sample.inputs, &cache);
                    epoch_loss += mse_loss(predicted, sample.targets);
                    grads.accumulate(gru_backward(model, cache,
                                                  mse_grad(predicted, sample.targets)));
                }
                grads.scale(1.0 / static_cast<double>(end - begin));
                std::vector<double> flat_grads = flatten(grads);
                clip_grad_norm(flat_grads, config.grad_clip);
                std::vector<double> flat_params = flatten(model);
                adam.step(flat_params, flat_grads);
                unflatten(flat_params, model);
            }
            report.train_loss.push_back(epoch_loss / static_cast<double>(n_train));
            const double val = mean_loss(model, val_samples);
            report.val_loss.push_back(val);
            if (val < best_val) {
                best_val = val;
                report.best_epoch = epoch;
                best_params = flatten(model);
            }
        }
        unflatten(best_params, model);
    }

    ModelBundle bundle;
    bundle.model = std::move(model);
    bundle.pipeline = dataset.config;
    bundle.params = dataset.params;
    bundle.slopes = fit_slopes(bundle.model, dataset, n_train, config.slope_from_targets);

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return {std::move(bundle), std::move(report)};
}

void write_train_report_csv(const TrainReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << "epoch,train_loss,val_loss\n";
    for (size_t epoch = 0; epoch < report.train_loss.size(); ++epoch) {
        out << epoch << ',' << format_double(report.train_loss[epoch]) << ','
            << format_double(report.val_loss[epoch]) << '\n';
    }
    if (!out.flush()) {
        throw IoError("failed writing '" + path + "'");
    }
}

}  // namespace gasrec
