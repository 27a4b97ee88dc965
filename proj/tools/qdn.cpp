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

// qdn: batch pipeline for quantum-noise image denoising experiments.
//
//   qdn generate --config run.json
//   qdn train    --config run.json
//   qdn tune     --config run.json [--checkpoint patch.ckpt]
//   qdn denoise  --config run.json [--checkpoint patch.ckpt] [--input a.pgm ...]
//   qdn evaluate --config run.json
//   qdn pipeline --config run.json [--seed N] [--out DIR]
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid config or usage.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qdn/error.hpp"
#include "qdn/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Run configuration (JSON)")->required();
  cmd->add_option("--seed", flags.seed, "Override the global seed");
  cmd->add_option("--out", flags.out, "Override the output directory");
}

// Precedence: flags > config file > built-in defaults.
qdn::RunConfig resolve_config(const CommonFlags& flags) {
  qdn::RunConfig cfg = qdn::load_run_config(flags.config);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.out) cfg.output_dir = *flags.out;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum image denoising laboratory"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string checkpoint;
  std::vector<std::string> inputs;

  auto* generate = app.add_subcommand("generate", "Build clean/noisy pairs, split them and write a manifest");
  auto* train = app.add_subcommand("train", "Train the image and patch classifiers");
  auto* tune = app.add_subcommand("tune", "Select the denoising threshold on the validation pairs");
  auto* denoise = app.add_subcommand("denoise", "Denoise images with the patch classifier");
  auto* evaluate = app.add_subcommand("evaluate", "Score noisy and denoised test images (MSE/PSNR/SSIM)");
  auto* pipeline = app.add_subcommand("pipeline", "generate -> train -> tune -> denoise -> evaluate");
  for (auto* cmd : {generate, train, tune, denoise, evaluate, pipeline}) add_common(cmd, flags);
  for (auto* cmd : {tune, denoise}) {
    cmd->add_option("--checkpoint", checkpoint, "Patch classifier checkpoint (default <out>/patch_classifier.ckpt)");
  }
  denoise->add_option("--input", inputs, "PGM files to denoise (default: noisy test images)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const qdn::RunConfig cfg = resolve_config(flags);
    const fs::path patch_ckpt = checkpoint.empty() ? qdn::layout_for(cfg).patch_checkpoint() : fs::path(checkpoint);

    if (generate->parsed()) {
      qdn::cmd_generate(cfg, std::cerr);
    } else if (train->parsed()) {
      qdn::cmd_train(cfg, std::cerr);
    } else if (tune->parsed()) {
      qdn::cmd_tune(cfg, patch_ckpt, std::cerr);
    } else if (denoise->parsed()) {
      const std::vector<fs::path> paths(inputs.begin(), inputs.end());
      qdn::cmd_denoise(cfg, patch_ckpt, paths, std::cerr);
    } else if (evaluate->parsed()) {
      qdn::cmd_evaluate(cfg, std::cerr);
    } else if (pipeline->parsed()) {
      qdn::cmd_pipeline(cfg, std::cerr);
    }
  } catch (const qdn::ConfigError& e) {
    std::cerr << "qdn: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "qdn: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
