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

#include "qdn/train.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "qdn/error.hpp"
#include "qdn/random.hpp"

namespace qdn {

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("train: epochs must be positive");
  if (batch_size == 0) throw ConfigError("train: batch_size must be positive");
  if (!(lr > 0.0)) throw ConfigError("train: lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("train: betas must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("train: epsilon must be positive");
}

std::size_t batches_per_epoch(std::size_t n, std::size_t batch_size) { return (n + batch_size - 1) / batch_size; }

namespace {

struct Sample {
  Tensor input;
  int label;
};

std::vector<Sample> to_samples(const CnnModel& model, std::span<const LabeledExample> examples, const char* what) {
  std::vector<Sample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.image.width != model.n || ex.image.height != model.n) {
      throw ShapeError(std::string(what) + ": image is " + std::to_string(ex.image.width) + "x" +
                       std::to_string(ex.image.height) + ", model expects " + std::to_string(model.n) + "x" +
                       std::to_string(model.n));
    }
    if (ex.label != 0 && ex.label != 1) throw DomainError(std::string(what) + ": label must be 0 or 1");
    out.push_back({image_to_input(ex.image), ex.label});
  }
  return out;
}

double accuracy_of(const CnnModel& model, const std::vector<Sample>& samples) {
  std::size_t correct = 0;
  for (const auto& s : samples) correct += forward(model, s.input).label() == s.label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace

TrainResult train(CnnModel model, std::span<const LabeledExample> train_set,
                  std::span<const LabeledExample> validation_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw DomainError("train: empty training set");
  if (validation_set.empty()) throw DomainError("train: empty validation set");
  const auto train_samples = to_samples(model, train_set, "train");
  const auto val_samples = to_samples(model, validation_set, "validation");

  TrainResult result;
  result.optimizer = AdamState::for_params(model.params.tensors, cfg.adam());

  std::vector<std::size_t> order(train_samples.size());
  CnnParams grads = CnnParams::zeros(model.n);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      grads.fill(0.0);
      for (std::size_t k = start; k < stop; ++k) {
        const Sample& s = train_samples[order[k]];
        loss_sum += backward(model, forward_cached(model, s.input), s.label, grads);
      }
      grads.scale(1.0 / static_cast<double>(stop - start));
      adam_step(model.params.tensors, grads.tensors, result.optimizer);
    }

    const double mean_loss = loss_sum / static_cast<double>(train_samples.size());
    const double acc = accuracy_of(model, val_samples);
    result.train_loss.push_back(mean_loss);
    result.validation_accuracy.push_back(acc);
    if (on_epoch) on_epoch(epoch, mean_loss, acc);
  }
  result.model = std::move(model);
  return result;
}

TrainResult train(CnnModel model, const DatasetSplit& split, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  return train(std::move(model), split.train, split.validation, cfg, on_epoch);
}

double accuracy(const CnnModel& model, std::span<const LabeledExample> examples) {
  if (examples.empty()) throw DomainError("accuracy: no examples");
  return accuracy_of(model, to_samples(model, examples, "accuracy"));
}

}  // namespace qdn
