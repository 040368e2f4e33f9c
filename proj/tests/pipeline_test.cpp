/* Copyright 2026 The Leafcast Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <nlohmann/json.hpp>

#include "leafcast/csv.hpp"
#include "leafcast/error.hpp"
#include "leafcast/pipeline.hpp"
#include "oracles.hpp"

namespace leafcast::pipeline {
namespace {

namespace fs = std::filesystem;

TEST(Config, AppliesKnownKeys) {
  const auto c = load_config(R"({"model.units": [16, 8], "model.activations": ["tanh", "relu"],
      "model.dropout": [0.1, 0.0], "model.learning_rate": 0.01, "model.window": 5, "seed": 11,
      "data.holdout_tree": "T1", "features.indices": ["NDVI"], "features.weather": ["temperature_2m:t2m"],
      "paths.out": "x"})");
  ASSERT_EQ(c.layers.size(), 2u);
  EXPECT_EQ(c.layers[0].units, 16);
  EXPECT_EQ(c.layers[1].activation, nn::Activation::kRelu);
  EXPECT_DOUBLE_EQ(c.layers[0].dropout_rate, 0.1);
  EXPECT_DOUBLE_EQ(c.learning_rate, 0.01);
  EXPECT_EQ(c.window, 5);
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.holdout_tree, "T1");
  ASSERT_EQ(c.indices.size(), 1u);
  ASSERT_EQ(c.weather.size(), 1u);
  EXPECT_EQ(c.weather[0].rename, "t2m");
  EXPECT_EQ(c.pheno_path(), fs::path("x") / "data" / "pheno.csv");
  EXPECT_EQ(c.checkpoint_path(), fs::path("x") / "checkpoint.json");
  const auto m = c.model_config(4);
  EXPECT_EQ(m.window_size, 5u);
  EXPECT_EQ(m.feature_count, 4u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(load_config(R"({"model.colour": 1})"), UsageError);
  EXPECT_THROW(load_config(R"({"model.epochs": "ten"})"), UsageError);
  EXPECT_THROW(load_config(R"({"model.units": [8], "model.activations": ["relu", "tanh"]})"), UsageError);
  EXPECT_THROW(load_config("[1, 2]"), UsageError);
  EXPECT_THROW(load_config("{"), UsageError);
  RunConfig c;
  EXPECT_THROW(apply_setting(c, "features.indices", R"(["NDXI"])"), UsageError);
}

TEST(Config, CanonicalJsonAndHash) {
  RunConfig a, b;
  b.jobs = 8;
  EXPECT_EQ(config_json(a), config_json(b));
  b.seed = 8;
  EXPECT_NE(config_json(a), config_json(b));
  EXPECT_EQ(load_config(config_json(b)).seed, 8u);
  EXPECT_EQ(config_json(load_config(config_json(b))), config_json(b));
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(LEAFCAST_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodesAndDiagnostics) {
  const auto dir = testing::scratch_dir("cli_errors");
  const auto log = dir / "log.txt";
  EXPECT_EQ(run_cli("--version", log), 0);
  EXPECT_NE(read_file(log).find(kVersion), std::string::npos);
  EXPECT_EQ(run_cli("--no-such-flag ingest", log), 1);
  EXPECT_EQ(run_cli("", log), 1);
  EXPECT_EQ(run_cli("--out " + dir.string() + " ingest", log), 2);
  EXPECT_NE(read_file(log).find((dir / "data" / "pheno.csv").string()), std::string::npos);
  write_file(dir / "bad.json", R"({"model.nope": 1})");
  EXPECT_EQ(run_cli("--config " + (dir / "bad.json").string() + " train", log), 1);
}

class SmallRun : public ::testing::Test {
 protected:
  static RunConfig config(const fs::path& out) {
    auto c = load_config(R"({"synth.trees": 2, "synth.first_year": 2018, "synth.last_year": 2020,
        "model.units": [8], "model.activations": ["tanh"], "model.dropout": [0.0],
        "model.epochs": 2, "model.window": 5, "tune.max_epochs": 3, "tune.eta": 3, "seed": 3})");
    c.out = out;
    return c;
  }
};

TEST_F(SmallRun, EndToEnd) {
  const auto out = testing::scratch_dir("small_run");
  const auto c = config(out);
  cmd_synth(c);
  cmd_ingest(c);
  cmd_build_dataset(c);
  cmd_train(c);
  cmd_evaluate(c);
  cmd_predict(c);
  for (const char* name : {"synth", "ingest", "build-dataset", "train", "evaluate", "predict"}) {
    const auto manifest = nlohmann::json::parse(read_file(out / (std::string(name) + ".manifest.json")));
    EXPECT_EQ(manifest["command"], name);
    EXPECT_EQ(manifest["seed"], 3);
    EXPECT_EQ(manifest["config_hash"], fnv1a_hex(config_json(c)));
    for (const auto& p : manifest["outputs"]) {
      const auto file = p.get<std::string>();
      EXPECT_TRUE(fs::exists(out / file) || fs::exists(out / "data" / file)) << file;
    }
  }
  const auto rmse = csv::Table::parse(read_file(out / "rmse.csv"));
  ASSERT_GE(rmse.rows().size(), 2u);
  for (const auto& row : rmse.rows()) {
    for (std::size_t k = 2; k < row.fields.size(); ++k) EXPECT_TRUE(std::isfinite(std::stod(row.fields[k])));
  }
  EXPECT_TRUE(fs::exists(out / "rmse_truth.csv"));
  EXPECT_TRUE(fs::exists(out / "learning_curve_loss.svg"));
  const auto predictions = csv::Table::parse(read_file(out / "predictions.csv"));
  EXPECT_GT(predictions.rows().size(), 0u);
}

TEST_F(SmallRun, RerunIsBytewiseIdentical) {
  const auto a = testing::scratch_dir("rerun_a"), b = testing::scratch_dir("rerun_b");
  for (const auto& out : {a, b}) {
    auto c = config(out);
    cmd_synth(c);
    cmd_train(c);
  }
  EXPECT_EQ(read_file(a / "checkpoint.json"), read_file(b / "checkpoint.json"));
  EXPECT_EQ(read_file(a / "metrics.csv"), read_file(b / "metrics.csv"));
}

TEST_F(SmallRun, TuneWritesReport) {
  const auto out = testing::scratch_dir("small_tune");
  auto c = config(out);
  c.layers.clear();
  cmd_synth(c);
  cmd_tune(c);
  const auto report = csv::Table::parse(read_file(out / "tune_report.csv"));
  EXPECT_GT(report.rows().size(), 0u);
  EXPECT_TRUE(fs::exists(out / "best_checkpoint.json"));
}

TEST_F(SmallRun, MissingInputIsDataError) {
  const auto out = testing::scratch_dir("small_missing");
  EXPECT_THROW(cmd_ingest(config(out)), DataError);
}

}  // namespace
}  // namespace leafcast::pipeline
