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

#include "qdn/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "qdn/checkpoint.hpp"
#include "qdn/error.hpp"
#include "qdn/random.hpp"

namespace qdn {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kReportFormat = "qdn-report/1";

void check_keys(const json& obj, const char* section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string("config: '") + section + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(std::string("config: unknown key '") + key + "' in '" + section + "'");
  }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

json train_to_json(const TrainConfig& t) {
  return {{"epochs", t.epochs}, {"batch_size", t.batch_size}, {"lr", t.lr},
          {"beta1", t.beta1},   {"beta2", t.beta2},           {"epsilon", t.epsilon}};
}

void train_from_json(const json& j, TrainConfig& t) {
  read_opt(j, "epochs", t.epochs);
  read_opt(j, "batch_size", t.batch_size);
  read_opt(j, "lr", t.lr);
  read_opt(j, "beta1", t.beta1);
  read_opt(j, "beta2", t.beta2);
  read_opt(j, "epsilon", t.epsilon);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

json metric_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json quality_json(const QualityReport& q) {
  return {{"mse", q.mse}, {"psnr_db", metric_json(q.psnr_db)}, {"ssim", q.ssim}};
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s + '\n';
}

std::string seed_comment(std::uint64_t seed) { return "# seed=" + std::to_string(seed) + "\n"; }

std::string accuracy_csv(std::uint64_t seed, const TrainResult& r) {
  std::string s = seed_comment(seed) + "epoch,validation_accuracy,train_loss\n";
  for (std::size_t e = 0; e < r.validation_accuracy.size(); ++e) {
    s += csv_line({std::to_string(e + 1), format_metric(r.validation_accuracy[e]), format_metric(r.train_loss[e])});
  }
  return s;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<Image> load_sources(const RunConfig& cfg) {
  std::vector<Image> images;
  if (cfg.source_format == "idx") {
    images = read_idx_images(cfg.source);
  } else if (cfg.source_format == "pgm_dir") {
    images = read_pgm_dir(cfg.source);
  } else {
    throw ConfigError("config: unknown data.format '" + cfg.source_format + "'");
  }
  if (cfg.limit && images.size() > cfg.limit) images.resize(cfg.limit);
  if (images.empty()) throw IoError("no source images in " + cfg.source.string());
  return images;
}

/// Clean partner of every paired noisy example.
struct PairIndex {
  std::unordered_map<std::int64_t, const LabeledExample*> clean;

  explicit PairIndex(const DatasetSplit& s) {
    for (const auto* subset : {&s.train, &s.validation, &s.test})
      for (const auto& ex : *subset)
        if (ex.label == 0 && ex.pair >= 0) clean[ex.pair] = &ex;
  }

  std::vector<NoisyPair> pairs(const std::vector<LabeledExample>& subset, std::size_t max_pairs,
                               std::vector<const LabeledExample*>* noisy_out = nullptr) const {
    std::vector<NoisyPair> out;
    for (const auto& ex : subset) {
      if (ex.label != 1) continue;
      const auto it = clean.find(ex.pair);
      if (it == clean.end()) continue;
      out.push_back({ex.image, it->second->image});
      if (noisy_out) noisy_out->push_back(&ex);
      if (max_pairs && out.size() >= max_pairs) break;
    }
    return out;
  }
};

}  // namespace

// ---- RunConfig ----

void RunConfig::validate() const {
  if (source.empty()) throw ConfigError("config: data.source is required");
  if (!fs::exists(source)) throw ConfigError("config: data.source " + source.string() + " does not exist");
  if (source_format != "idx" && source_format != "pgm_dir") {
    throw ConfigError("config: data.format must be 'idx' or 'pgm_dir'");
  }
  try {
    noise.validate();
    ratios.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  train.validate();
  patch_train.validate();
  denoise.validate();
  if (patches_per_image == 0) throw ConfigError("config: patch_train.patches_per_image must be positive");
  if (grid.values.empty()) throw ConfigError("config: threshold grid is empty");
}

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["data"] = {{"source", source.generic_string()}, {"format", source_format}, {"limit", limit}};
  j["noise"] = {{"kind", std::string(to_string(noise.kind))},
                {"p", noise.p},
                {"mean", noise.mean},
                {"sigma", noise.sigma},
                {"density", noise.density}};
  j["split"] = {{"train", ratios.train}, {"validation", ratios.validation}, {"test", ratios.test}};
  j["train"] = train_to_json(train);
  j["train"]["enabled"] = train_image_classifier;
  j["patch_train"] = train_to_json(patch_train);
  j["patch_train"]["patches_per_image"] = patches_per_image;
  j["patch_train"]["max_pairs"] = patch_max_pairs;
  j["denoise"] = {{"patch_size", denoise.patch_size},
                  {"threshold", denoise.threshold},
                  {"estimator", std::string(to_string(denoise.estimator))}};
  j["tune"] = {{"grid", grid.values}, {"max_pairs", tune_max_pairs}};
  return j;
}

RunConfig RunConfig::from_json(const json& doc, const fs::path& base_dir) {
  RunConfig c;
  try {
    check_keys(doc, "root", {"seed", "data", "output_dir", "checkpoint", "noise", "split", "train", "patch_train",
                             "denoise", "tune"});
    read_opt(doc, "seed", c.seed);
    if (doc.contains("output_dir")) c.output_dir = resolve(base_dir, doc.at("output_dir").get<std::string>());
    if (doc.contains("checkpoint")) c.checkpoint = resolve(base_dir, doc.at("checkpoint").get<std::string>());
    if (doc.contains("data")) {
      const auto& d = doc.at("data");
      check_keys(d, "data", {"source", "format", "limit"});
      if (d.contains("source")) c.source = resolve(base_dir, d.at("source").get<std::string>());
      read_opt(d, "format", c.source_format);
      read_opt(d, "limit", c.limit);
    }
    if (doc.contains("noise")) {
      const auto& n = doc.at("noise");
      check_keys(n, "noise", {"kind", "p", "mean", "sigma", "density"});
      if (n.contains("kind")) c.noise.kind = parse_noise_kind(n.at("kind").get<std::string>());
      read_opt(n, "p", c.noise.p);
      read_opt(n, "mean", c.noise.mean);
      read_opt(n, "sigma", c.noise.sigma);
      read_opt(n, "density", c.noise.density);
    }
    if (doc.contains("split")) {
      const auto& s = doc.at("split");
      check_keys(s, "split", {"train", "validation", "test"});
      read_opt(s, "train", c.ratios.train);
      read_opt(s, "validation", c.ratios.validation);
      read_opt(s, "test", c.ratios.test);
    }
    if (doc.contains("train")) {
      const auto& t = doc.at("train");
      check_keys(t, "train", {"epochs", "batch_size", "lr", "beta1", "beta2", "epsilon", "enabled"});
      train_from_json(t, c.train);
      read_opt(t, "enabled", c.train_image_classifier);
    }
    if (doc.contains("patch_train")) {
      const auto& t = doc.at("patch_train");
      check_keys(t, "patch_train",
                 {"epochs", "batch_size", "lr", "beta1", "beta2", "epsilon", "patches_per_image", "max_pairs"});
      train_from_json(t, c.patch_train);
      read_opt(t, "patches_per_image", c.patches_per_image);
      read_opt(t, "max_pairs", c.patch_max_pairs);
    }
    if (doc.contains("denoise")) {
      const auto& d = doc.at("denoise");
      check_keys(d, "denoise", {"patch_size", "threshold", "estimator"});
      read_opt(d, "patch_size", c.denoise.patch_size);
      read_opt(d, "threshold", c.denoise.threshold);
      if (d.contains("estimator")) c.denoise.estimator = parse_estimator(d.at("estimator").get<std::string>());
    }
    if (doc.contains("tune")) {
      const auto& t = doc.at("tune");
      check_keys(t, "tune", {"grid", "max_pairs"});
      read_opt(t, "max_pairs", c.tune_max_pairs);
      if (t.contains("grid")) {
        const auto& g = t.at("grid");
        if (g.is_array()) {
          c.grid = ThresholdGrid::from(g.get<std::vector<double>>());
        } else {
          check_keys(g, "tune.grid", {"start", "stop", "step"});
          c.grid = ThresholdGrid::range(g.at("start").get<double>(), g.at("stop").get<double>(),
                                        g.at("step").get<double>());
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return RunConfig::from_json(doc, path.parent_path());
}

RunLayout layout_for(const RunConfig& cfg) { return RunLayout{cfg.output_dir}; }

fs::path image_checkpoint_path(const RunConfig& cfg) {
  return cfg.checkpoint.empty() ? cfg.output_dir / "classifier.ckpt" : cfg.checkpoint;
}

// ---- reports ----

QualityReport mean_quality(const std::vector<ReportRow>& rows, bool denoised) {
  QualityReport m{0.0, 0.0, 0.0};
  if (rows.empty()) return m;
  for (const auto& r : rows) {
    const auto& q = denoised ? r.denoised : r.noisy;
    m.mse += q.mse;
    m.psnr_db += q.psnr_db;
    m.ssim += q.ssim;
  }
  const double n = static_cast<double>(rows.size());
  m.mse /= n;
  m.psnr_db /= n;
  m.ssim /= n;
  return m;
}

json RunReport::to_json() const {
  json j;
  j["format"] = kReportFormat;
  j["seed"] = seed;
  j["config"] = config;
  j["threshold"] = threshold ? json(*threshold) : json(nullptr);
  j["accuracy"] = {{"image_classifier", image_accuracy}, {"patch_classifier", patch_accuracy}};
  j["aggregate"] = {{"images", rows.size()}, {"noisy", quality_json(mean_noisy)},
                    {"denoised", quality_json(mean_denoised)}};
  auto& out_rows = j["rows"] = json::array();
  for (const auto& r : rows) {
    out_rows.push_back({{"name", r.name}, {"noisy", quality_json(r.noisy)}, {"denoised", quality_json(r.denoised)}});
  }
  j["timings"] = timings_s;
  return j;
}

// ---- commands ----

std::size_t cmd_generate(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const RunLayout out = layout_for(cfg);
  const auto sources = load_sources(cfg);
  log << "generate: " << sources.size() << " source images, noise " << to_string(cfg.noise.kind) << '\n';

  auto examples = build_pairs(sources, cfg.noise, derive_seed(cfg.seed, "generate"));
  fs::create_directories(out.images());
  for (auto& ex : examples) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%06lld.pgm", ex.label == 0 ? "clean" : "noisy",
                  static_cast<long long>(ex.pair));
    ex.path = (fs::path("images") / name).generic_string();
    write_pgm(ex.image, out.root / ex.path);
  }
  const std::size_t total = examples.size();
  const DatasetSplit s = split(std::move(examples), cfg.ratios, derive_seed(cfg.seed, "split"));
  write_manifest(s, out.manifest(), json{{"config", cfg.to_json()}});
  log << "generate: " << total << " examples -> " << s.train.size() << "/" << s.validation.size() << "/"
      << s.test.size() << " (train/validation/test), manifest " << out.manifest().string() << '\n';
  return total;
}

void cmd_train(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const RunLayout out = layout_for(cfg);
  const DatasetSplit data = read_manifest(out.manifest());
  json summary;
  summary["seed"] = cfg.seed;
  summary["config"] = cfg.to_json();

  if (cfg.train_image_classifier) {
    if (data.train.empty() || data.validation.empty()) throw DomainError("train: manifest has an empty subset");
    const std::size_t n = data.train.front().image.width;
    if (data.train.front().image.height != n || n % 4 != 0) {
      throw ConfigError("train: whole-image classifier needs square images with side divisible by 4; set "
                        "train.enabled=false for other sizes");
    }
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.seed, "train");
    log << "train: image classifier n=" << n << " on " << data.train.size() << " examples\n";
    auto result = train(CnnModel::initialized(n, derive_seed(cfg.seed, "init")), data, tc,
                        [&log](std::size_t e, double loss, double acc) {
                          log << "  epoch " << e + 1 << " loss " << loss << " val_acc " << acc << '\n';
                        });
    save_checkpoint({result.model, result.optimizer, tc}, image_checkpoint_path(cfg));
    write_text(out.accuracy_csv(), accuracy_csv(cfg.seed, result));
    summary["image_classifier"] = {{"accuracy", result.validation_accuracy}, {"loss", result.train_loss}};
  }

  const PairIndex index(data);
  const auto train_pairs = index.pairs(data.train, cfg.patch_max_pairs);
  const auto val_pairs = index.pairs(data.validation, cfg.patch_max_pairs);
  if (train_pairs.empty() || val_pairs.empty()) {
    throw DomainError("train: need noisy/clean pairs in both the train and validation subsets");
  }
  const std::size_t k = cfg.denoise.patch_size;
  const auto train_patches = sample_patches(train_pairs, k, cfg.patches_per_image, derive_seed(cfg.seed, "patches"));
  const auto val_patches = sample_patches(val_pairs, k, cfg.patches_per_image, derive_seed(cfg.seed, "val_patches"));
  TrainConfig pc = cfg.patch_train;
  pc.seed = derive_seed(cfg.seed, "patch_train");
  log << "train: patch classifier k=" << k << " (input " << patch_model_side(k) << ") on " << train_patches.size()
      << " patches\n";
  auto patch = train(CnnModel::initialized(patch_model_side(k), derive_seed(cfg.seed, "patch_init")), train_patches,
                     val_patches, pc, [&log](std::size_t e, double loss, double acc) {
                       log << "  epoch " << e + 1 << " loss " << loss << " val_acc " << acc << '\n';
                     });
  save_checkpoint({patch.model, patch.optimizer, pc}, out.patch_checkpoint());
  write_text(out.patch_accuracy_csv(), accuracy_csv(cfg.seed, patch));
  summary["patch_classifier"] = {{"accuracy", patch.validation_accuracy}, {"loss", patch.train_loss}};
  write_text(out.train_json(), summary.dump(2) + "\n");
}

ThresholdSelection cmd_tune(const RunConfig& cfg, const fs::path& patch_checkpoint, std::ostream& log) {
  cfg.validate();
  const RunLayout out = layout_for(cfg);
  const DatasetSplit data = read_manifest(out.manifest());
  const auto model = load_checkpoint(patch_checkpoint).model;
  const auto pairs = PairIndex(data).pairs(data.validation, cfg.tune_max_pairs);
  if (pairs.empty()) throw DomainError("tune: no noisy/clean pairs in the validation subset");
  log << "tune: " << cfg.grid.values.size() << " thresholds over " << pairs.size() << " validation pairs\n";

  const auto sel = select_threshold(model, pairs, cfg.grid, cfg.denoise);
  std::string csv = seed_comment(cfg.seed) + "threshold,mean_mse\n";
  for (const auto& row : sel.table) csv += csv_line({format_metric(row.threshold), format_metric(row.mean_mse)});
  write_text(out.thresholds_csv(), csv);
  const json doc = {{"seed", cfg.seed},
                    {"config", cfg.to_json()},
                    {"threshold", sel.best_threshold},
                    {"mean_mse", sel.best_mse},
                    {"pairs", pairs.size()}};
  write_text(out.tune_json(), doc.dump(2) + "\n");
  log << "tune: T* = " << sel.best_threshold << " (mean MSE " << sel.best_mse << ")\n";
  return sel;
}

std::vector<fs::path> cmd_denoise(const RunConfig& cfg, const fs::path& patch_checkpoint,
                                  const std::vector<fs::path>& inputs, std::ostream& log) {
  cfg.validate();
  const RunLayout out = layout_for(cfg);
  const auto model = load_checkpoint(patch_checkpoint).model;
  DenoiseConfig dc = cfg.denoise;
  if (fs::exists(out.tune_json())) dc.threshold = read_json_file(out.tune_json()).at("threshold").get<double>();

  std::vector<std::pair<std::string, Image>> jobs;
  if (inputs.empty()) {
    const DatasetSplit data = read_manifest(out.manifest());
    for (const auto& ex : data.test) {
      if (ex.label == 1) jobs.emplace_back(fs::path(ex.path).filename().string(), ex.image);
    }
  } else {
    for (const auto& p : inputs) jobs.emplace_back(p.filename().string(), read_pgm(p));
  }
  log << "denoise: " << jobs.size() << " images at T = " << dc.threshold << '\n';

  std::vector<fs::path> written;
  for (const auto& [name, image] : jobs) {
    const fs::path dst = out.denoised() / name;
    write_pgm(denoise(image, model, dc), dst);
    written.push_back(dst);
  }
  return written;
}

RunReport cmd_evaluate(const RunConfig& cfg, std::ostream& log, const std::map<std::string, double>& timings) {
  Stopwatch clock;
  cfg.validate();
  const RunLayout out = layout_for(cfg);
  const DatasetSplit data = read_manifest(out.manifest());
  std::vector<const LabeledExample*> noisy;
  const auto pairs = PairIndex(data).pairs(data.test, 0, &noisy);
  if (pairs.empty()) throw DomainError("evaluate: no noisy/clean pairs in the test subset");

  RunReport report;
  report.seed = cfg.seed;
  report.config = cfg.to_json();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string name = fs::path(noisy[i]->path).filename().string();
    const fs::path denoised_path = out.denoised() / name;
    if (!fs::exists(denoised_path)) throw IoError("evaluate: missing denoised image " + denoised_path.string());
    const Image denoised = read_pgm(denoised_path);
    report.rows.push_back({name, assess(pairs[i].original, pairs[i].noisy), assess(pairs[i].original, denoised)});
  }
  report.mean_noisy = mean_quality(report.rows, false);
  report.mean_denoised = mean_quality(report.rows, true);
  if (fs::exists(out.tune_json())) report.threshold = read_json_file(out.tune_json()).at("threshold").get<double>();
  if (fs::exists(out.train_json())) {
    const json t = read_json_file(out.train_json());
    if (t.contains("image_classifier")) report.image_accuracy = t["image_classifier"]["accuracy"].get<std::vector<double>>();
    if (t.contains("patch_classifier")) report.patch_accuracy = t["patch_classifier"]["accuracy"].get<std::vector<double>>();
  }
  report.timings_s = timings;
  report.timings_s["evaluate"] = clock.seconds();

  write_text(out.report_json(), report.to_json().dump(2) + "\n");
  std::string csv = seed_comment(cfg.seed) +
                    "name,noisy_mse,noisy_psnr_db,noisy_ssim,denoised_mse,denoised_psnr_db,denoised_ssim\n";
  for (const auto& r : report.rows) {
    csv += csv_line({r.name, format_metric(r.noisy.mse), format_metric(r.noisy.psnr_db), format_metric(r.noisy.ssim),
                     format_metric(r.denoised.mse), format_metric(r.denoised.psnr_db),
                     format_metric(r.denoised.ssim)});
  }
  write_text(out.report_csv(), csv);
  log << "evaluate: " << report.rows.size() << " images, mean PSNR noisy " << format_metric(report.mean_noisy.psnr_db)
      << " dB -> denoised " << format_metric(report.mean_denoised.psnr_db) << " dB\n";
  return report;
}

RunReport cmd_pipeline(const RunConfig& cfg, std::ostream& log) {
  std::map<std::string, double> timings;
  const auto timed = [&timings](const char* stage, auto&& fn) {
    Stopwatch clock;
    fn();
    timings[stage] = clock.seconds();
  };
  const RunLayout out = layout_for(cfg);
  timed("generate", [&] { cmd_generate(cfg, log); });
  timed("train", [&] { cmd_train(cfg, log); });
  timed("tune", [&] { cmd_tune(cfg, out.patch_checkpoint(), log); });
  timed("denoise", [&] { cmd_denoise(cfg, out.patch_checkpoint(), {}, log); });
  return cmd_evaluate(cfg, log, timings);
}

}  // namespace qdn
