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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "qdn/checkpoint.hpp"
#include "qdn/error.hpp"
#include "test_util.hpp"

namespace qdn {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using testing::TempDir;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Dark 12x12 images each carrying one bright square.
void write_toy_idx(const fs::path& path, std::size_t count) {
  Rng rng(123);
  std::vector<Image> imgs;
  for (std::size_t i = 0; i < count; ++i) {
    Image img(12, 12, 10);
    const std::size_t x0 = rng.below(7), y0 = rng.below(7);
    for (std::size_t y = y0; y < y0 + 5; ++y)
      for (std::size_t x = x0; x < x0 + 5; ++x) img.at(x, y) = 220;
    imgs.push_back(img);
  }
  write_idx_images(imgs, path);
}

json toy_config() {
  return {
      {"seed", 5},
      {"data", {{"source", "toy-images"}, {"format", "idx"}, {"limit", 20}}},
      {"output_dir", "out"},
      {"noise", {{"kind", "salt_pepper"}, {"density", 0.1}}},
      {"train", {{"epochs", 1}, {"batch_size", 8}}},
      {"patch_train", {{"epochs", 1}, {"batch_size", 8}, {"patches_per_image", 2}}},
      {"denoise", {{"patch_size", 3}}},
      {"tune", {{"grid", {{"start", -1.0}, {"stop", 1.0}, {"step", 0.5}}}}},
  };
}

TEST(RunConfig, DefaultsOverridesAndRelativePaths) {
  TempDir dir("cfg");
  write_toy_idx(dir / "toy-images", 4);
  std::ofstream(dir / "run.json") << toy_config().dump();
  const RunConfig c = load_run_config(dir / "run.json");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.source, dir / "toy-images");
  EXPECT_EQ(c.output_dir, dir / "out");
  EXPECT_EQ(c.noise.kind, NoiseKind::salt_pepper);
  EXPECT_EQ(c.train.epochs, 1u);
  EXPECT_EQ(c.train.lr, 0.001);
  EXPECT_EQ(c.patches_per_image, 2u);
  EXPECT_EQ(c.grid.values, (std::vector<double>{-1, -0.5, 0, 0.5, 1}));
  EXPECT_EQ(c.ratios, SplitRatios{});
  EXPECT_NO_THROW(c.validate());

  // The echo parses back to the same settings.
  const RunConfig again = RunConfig::from_json(c.to_json());
  EXPECT_EQ(again.to_json(), c.to_json());
}

TEST(RunConfig, RejectsBadDocuments) {
  EXPECT_THROW(RunConfig::from_json({{"sed", 1}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"noise", {{"kind", "speckle"}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"train", {{"epochs", "ten"}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"tune", {{"grid", json::array()}}}}), ConfigError);
  EXPECT_THROW(load_run_config("/nonexistent/run.json"), ConfigError);

  RunConfig c;
  EXPECT_THROW(c.validate(), ConfigError);  // no source
  c.source = "/nonexistent/images";
  EXPECT_THROW(c.validate(), ConfigError);
  TempDir dir("cfg_bad");
  write_toy_idx(dir / "x", 1);
  c.source = dir / "x";
  c.ratios = {0.9, 0.9, 0.0};
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Pipeline, EndToEndArtifacts) {
  TempDir dir("pipe");
  write_toy_idx(dir / "toy-images", 30);
  std::ofstream(dir / "run.json") << toy_config().dump();
  const RunConfig cfg = load_run_config(dir / "run.json");
  std::ostringstream log;
  const RunReport report = cmd_pipeline(cfg, log);

  const RunLayout out = layout_for(cfg);
  for (const fs::path& p : {out.manifest(), out.accuracy_csv(), image_checkpoint_path(cfg), out.patch_checkpoint(),
                            out.patch_accuracy_csv(), out.train_json(), out.thresholds_csv(), out.tune_json(),
                            out.report_json(), out.report_csv()}) {
    EXPECT_TRUE(fs::exists(p)) << p;
  }

  // 40 examples -> 32/4/4; the test subset holds 2 noisy images.
  const DatasetSplit data = read_manifest(out.manifest());
  EXPECT_EQ(data.train.size(), 32u);
  EXPECT_EQ(data.test.size(), 4u);
  EXPECT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(std::distance(fs::directory_iterator(out.denoised()), fs::directory_iterator{}), 2);

  const json doc = json::parse(slurp(out.report_json()));
  EXPECT_EQ(doc.at("format"), "qdn-report/1");
  EXPECT_EQ(doc.at("seed"), 5);
  EXPECT_EQ(doc.at("config"), cfg.to_json());
  EXPECT_EQ(doc.at("accuracy").at("image_classifier").size(), 1u);
  EXPECT_TRUE(doc.at("timings").contains("train"));
  EXPECT_EQ(doc.at("rows").size(), 2u);

  const std::string csv = slurp(out.report_csv());
  EXPECT_EQ(csv.rfind("# seed=5\nname,noisy_mse,noisy_psnr_db,noisy_ssim,denoised_mse,denoised_psnr_db,denoised_ssim\n",
                      0),
            0u);
  EXPECT_EQ(slurp(out.thresholds_csv()).rfind("# seed=5\nthreshold,mean_mse\n-1,", 0), 0u);
  EXPECT_EQ(slurp(out.accuracy_csv()).rfind("# seed=5\nepoch,validation_accuracy,train_loss\n1,", 0), 0u);
  EXPECT_EQ(load_checkpoint(out.patch_checkpoint()).model.n, 4u);
  EXPECT_NE(log.str().find("evaluate:"), std::string::npos);
}

TEST(Pipeline, ExplicitDenoiseInputs) {
  TempDir dir("pipe2");
  write_toy_idx(dir / "toy-images", 30);
  json j = toy_config();
  j["train"]["enabled"] = false;
  std::ofstream(dir / "run.json") << j.dump();
  const RunConfig cfg = load_run_config(dir / "run.json");
  std::ostringstream log;
  cmd_generate(cfg, log);
  cmd_train(cfg, log);
  EXPECT_FALSE(fs::exists(image_checkpoint_path(cfg)));
  write_pgm(Image(7, 5, 100), dir / "extra.pgm");
  const auto written = cmd_denoise(cfg, layout_for(cfg).patch_checkpoint(), {dir / "extra.pgm"}, log);
  ASSERT_EQ(written.size(), 1u);
  const Image d = read_pgm(written[0]);
  EXPECT_EQ(d.width, 7u);
  EXPECT_EQ(d.height, 5u);
  EXPECT_THROW(cmd_evaluate(cfg, log), IoError);  // test images were never denoised
}

TEST(Pipeline, PgmDirectorySourceWithOddSizes) {
  TempDir dir("pipe_pgm");
  fs::create_directories(dir / "src");
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    Image img = testing::random_image(11, 9, rng);
    img.pixels[0] = 1;
    write_pgm(img, dir.path() / "src" / ("img" + std::to_string(100 + i) + ".pgm"));
  }
  json j = toy_config();
  j["data"] = {{"source", "src"}, {"format", "pgm_dir"}};
  j["train"]["enabled"] = false;
  std::ofstream(dir / "run.json") << j.dump();
  const RunConfig cfg = load_run_config(dir / "run.json");
  std::ostringstream log;
  const RunReport r = cmd_pipeline(cfg, log);
  EXPECT_EQ(r.rows.size(), 2u);
  EXPECT_TRUE(r.image_accuracy.empty());
  EXPECT_EQ(r.patch_accuracy.size(), 1u);

  j["train"]["enabled"] = true;
  std::ofstream(dir / "run.json") << j.dump();
  EXPECT_THROW(cmd_train(load_run_config(dir / "run.json"), log), ConfigError);
}

#ifdef QDN_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(QDN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  TempDir dir("cli");
  write_toy_idx(dir / "toy-images", 30);
  std::ofstream(dir / "run.json") << toy_config().dump();
  std::ofstream(dir / "typo.json") << R"({"seeed": 1})";
  const std::string cfg = (dir / "run.json").string();

  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("generate"), 2);
  EXPECT_EQ(run_cli("generate --config " + (dir / "typo.json").string()), 2);
  EXPECT_EQ(run_cli("generate --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("train --config " + cfg), 1);  // no manifest yet
  EXPECT_EQ(run_cli("generate --config " + cfg), 0);
  EXPECT_EQ(run_cli("generate --config " + cfg + " --seed 9 --out " + (dir / "alt").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "alt" / "manifest.json"));
  EXPECT_EQ(json::parse(slurp(dir / "alt" / "manifest.json")).at("seed"), derive_seed(9, "split"));
  EXPECT_EQ(run_cli("--help"), 0);
}
#endif

}  // namespace
}  // namespace qdn
