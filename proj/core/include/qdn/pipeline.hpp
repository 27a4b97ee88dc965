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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdn/datasets.hpp"
#include "qdn/denoiser.hpp"
#include "qdn/metrics.hpp"
#include "qdn/noise.hpp"
#include "qdn/train.hpp"

namespace qdn {

/// One JSON document drives every command. Relative paths inside a config
/// file are resolved against the file's directory.
struct RunConfig {
  std::uint64_t seed = 0;

  std::filesystem::path source;       // IDX image file or directory of .pgm files
  std::string source_format = "idx";  // "idx" | "pgm_dir"
  std::size_t limit = 0;              // first N source images; 0 = all
  std::filesystem::path output_dir = "qdn-out";
  std::filesystem::path checkpoint;   // image classifier; default <out>/classifier.ckpt

  NoiseSpec noise;
  SplitRatios ratios;

  bool train_image_classifier = true;
  TrainConfig train;

  TrainConfig patch_train;
  std::size_t patches_per_image = 4;
  std::size_t patch_max_pairs = 0;  // 0 = every training pair

  DenoiseConfig denoise;
  ThresholdGrid grid = ThresholdGrid::standard();
  std::size_t tune_max_pairs = 0;   // 0 = every validation pair

  /// Throws ConfigError for out-of-range values or a missing source.
  void validate() const;

  /// Config echo written into artifacts (seeds of sub-stages are not stored;
  /// they are derived from `seed`).
  nlohmann::json to_json() const;
  /// Missing keys keep their defaults. Unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
};

/// Throws ConfigError when the file is missing or malformed.
RunConfig load_run_config(const std::filesystem::path& path);

/// Artifact locations inside the output directory.
struct RunLayout {
  std::filesystem::path root;
  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path images() const { return root / "images"; }
  std::filesystem::path accuracy_csv() const { return root / "accuracy.csv"; }
  std::filesystem::path patch_checkpoint() const { return root / "patch_classifier.ckpt"; }
  std::filesystem::path patch_accuracy_csv() const { return root / "patch_accuracy.csv"; }
  std::filesystem::path train_json() const { return root / "train.json"; }
  std::filesystem::path thresholds_csv() const { return root / "thresholds.csv"; }
  std::filesystem::path tune_json() const { return root / "tune.json"; }
  std::filesystem::path denoised() const { return root / "denoised"; }
  std::filesystem::path report_json() const { return root / "report.json"; }
  std::filesystem::path report_csv() const { return root / "report.csv"; }
};

RunLayout layout_for(const RunConfig& cfg);
std::filesystem::path image_checkpoint_path(const RunConfig& cfg);

struct ReportRow {
  std::string name;
  QualityReport noisy;     // noisy vs original
  QualityReport denoised;  // denoised vs original
};

struct RunReport {
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
  QualityReport mean_noisy;
  QualityReport mean_denoised;
  std::optional<double> threshold;
  std::vector<double> image_accuracy;
  std::vector<double> patch_accuracy;
  nlohmann::json config;
  std::map<std::string, double> timings_s;

  /// Report JSON; the "timings" object is the only non-deterministic field.
  nlohmann::json to_json() const;
};

/// Mean of each metric over rows (infinite PSNR propagates).
QualityReport mean_quality(const std::vector<ReportRow>& rows, bool denoised);

/// Source images -> corrupted pairs -> split -> PGMs + manifest.json.
/// Returns the number of manifest entries.
std::size_t cmd_generate(const RunConfig& cfg, std::ostream& log);

/// Trains the whole-image classifier (if enabled) and the patch classifier used
/// by the denoiser; writes checkpoints, accuracy CSVs and train.json.
void cmd_train(const RunConfig& cfg, std::ostream& log);

/// Threshold grid search on validation pairs; writes thresholds.csv and tune.json.
ThresholdSelection cmd_tune(const RunConfig& cfg, const std::filesystem::path& patch_checkpoint, std::ostream& log);

/// Denoises `inputs` (default: the noisy test images of the manifest) into
/// <out>/denoised/<file name>. The threshold comes from tune.json when present,
/// otherwise from cfg.denoise.threshold. Returns the written paths.
std::vector<std::filesystem::path> cmd_denoise(const RunConfig& cfg, const std::filesystem::path& patch_checkpoint,
                                               const std::vector<std::filesystem::path>& inputs, std::ostream& log);

/// Scores the noisy test images and their denoised versions against the
/// originals; writes report.json and report.csv.
RunReport cmd_evaluate(const RunConfig& cfg, std::ostream& log, const std::map<std::string, double>& timings = {});

/// generate -> train -> tune -> denoise -> evaluate.
RunReport cmd_pipeline(const RunConfig& cfg, std::ostream& log);

}  // namespace qdn
