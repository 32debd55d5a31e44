// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "features.hpp"
#include "gru.hpp"
#include "optimizer.hpp"
#include "recommend.hpp"

namespace gasrec {

struct TrainConfig {
    double learning_rate{1e-3};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
    size_t epochs{30};
    size_t batch_size{32};
    uint64_t seed{42};
    // Chronological fraction of the windows used for training; the rest is
    // the validation set.
    double split_ratio{0.7};
    size_t hidden_size{64};
    // Maximum gradient L2 norm; 0 disables clipping. BPTT over long windows
    // can spike, so the knob exists even though the default is off.
    double grad_clip{0};
    // Fit the slope normalizer on the true training targets instead of the
    // model's training predictions.
    bool slope_from_targets{false};

    void validate() const;
};

struct TrainReport {
    std::vector<double> train_loss;  // per epoch, mean over training samples
    std::vector<double> val_loss;    // per epoch, mean over validation samples
    size_t best_epoch{0};            // 0-based index into the loss vectors
    double wall_seconds{0};
};

// Trains a fresh GRU on the dataset's windows: chronological train/validation
// split, per-epoch seeded shuffling, mini-batch Adam, and selection of the
// epoch with the best validation loss. Deterministic given the seed. Also
// fits the slope normalizer the pricing algorithm needs, over the trained
// model's forecasts on the training windows (or the raw targets when
// configured). Zero epochs returns the freshly initialized model and an
// empty report.
std::pair<ModelBundle, TrainReport> train(const WindowDataset& dataset,
                                          const TrainConfig& config);

// Writes the per-epoch losses as CSV: epoch,train_loss,val_loss.
void write_train_report_csv(const TrainReport& report, const std::string& path);

}  // namespace gasrec
