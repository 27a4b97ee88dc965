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

#include <benchmark/benchmark.h>

#include "qdn/cnn.hpp"
#include "qdn/denoiser.hpp"
#include "qdn/layers.hpp"
#include "qdn/metrics.hpp"
#include "qdn/noise.hpp"
#include "qdn/quantum_image.hpp"
#include "qdn/random.hpp"

namespace {

qdn::Image random_image(std::size_t side, std::uint64_t seed) {
  qdn::Rng rng(seed);
  qdn::Image img(side, side);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(1 + rng.below(255));
  return img;
}

qdn::Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
  qdn::Rng rng(seed);
  qdn::Tensor t(std::move(shape));
  for (auto& v : t.data()) v = rng.uniform() - 0.5;
  return t;
}

void BM_Conv2d(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto cin = static_cast<std::size_t>(state.range(1));
  const auto cout = static_cast<std::size_t>(state.range(2));
  const qdn::Tensor in = random_tensor({cin, side, side}, 1);
  const qdn::Tensor f = random_tensor({cout, cin, 3, 3}, 2);
  const qdn::Tensor b = random_tensor({cout}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(qdn::conv2d(in, f, b));
}
BENCHMARK(BM_Conv2d)->Args({28, 1, 32})->Args({14, 32, 64})->Args({12, 1, 32})->Args({6, 32, 64});

void BM_DepolarizeAll(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const qdn::QuantumImage q = qdn::encode(random_image(side, 4));
  for (auto _ : state) benchmark::DoNotOptimize(qdn::depolarize_all(q.state, 0.1));
  state.SetLabel(std::to_string(q.state.qubits()) + " qubits");
}
BENCHMARK(BM_DepolarizeAll)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const qdn::Image a = random_image(side, 5), b = random_image(side, 6);
  for (auto _ : state) benchmark::DoNotOptimize(qdn::ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(28)->Arg(128);

void BM_ForwardBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const qdn::CnnModel m = qdn::CnnModel::initialized(n, 7);
  const qdn::Tensor x = qdn::image_to_input(random_image(n, 8));
  for (auto _ : state) benchmark::DoNotOptimize(qdn::gradients(m, x, 1));
}
BENCHMARK(BM_ForwardBackward)->Arg(12)->Arg(28)->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const qdn::CnnModel m = qdn::CnnModel::initialized(n, 7);
  const qdn::Image img = random_image(n, 9);
  for (auto _ : state) benchmark::DoNotOptimize(qdn::forward(m, img));
}
BENCHMARK(BM_Forward)->Arg(12)->Arg(28);

void BM_DenoiseImage(benchmark::State& state) {
  const qdn::CnnModel m = qdn::CnnModel::initialized(12, 10);
  const qdn::Image img = random_image(28, 11);
  for (auto _ : state) benchmark::DoNotOptimize(qdn::denoise(img, m, qdn::DenoiseConfig{}));
}
BENCHMARK(BM_DenoiseImage)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
