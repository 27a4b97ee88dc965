// Copyright 2026 The qdenoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qdn/cnn.hpp"
#include "qdn/datasets.hpp"
#include "qdn/optim.hpp"

namespace qdn {

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  /// Throws ConfigError for non-positive epochs, batch size or learning rate.
  void validate() const;
  AdamConfig adam() const { return {lr, beta1, beta2, epsilon}; }

  bool operator==(const TrainConfig&) const = default;
};

struct TrainResult {
  CnnModel model;
  AdamState optimizer;
  /// One entry per epoch.
  std::vector<double> validation_accuracy;
  std::vector<double> train_loss;
};

/// (epoch index, mean training loss, validation accuracy)
using EpochCallback = std::function<void(std::size_t, double, double)>;

/// ceil(n / batch_size); the final short batch is kept.
std::size_t batches_per_epoch(std::size_t n, std::size_t batch_size);

/// Mini-batch Adam on mean cross-entropy. Epoch e visits the training set in
/// the order of a shuffle seeded with derive_seed(cfg.seed, e). Validation
/// accuracy is measured after every epoch. Throws ShapeError when an image is
/// not model.n x model.n and DomainError when either set is empty.
TrainResult train(CnnModel model, std::span<const LabeledExample> train_set,
                  std::span<const LabeledExample> validation_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});
TrainResult train(CnnModel model, const DatasetSplit& split, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Fraction of examples whose argmax prediction (ties -> 0) equals the label.
double accuracy(const CnnModel& model, std::span<const LabeledExample> examples);

}  // namespace qdn
