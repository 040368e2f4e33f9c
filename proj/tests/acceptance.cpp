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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "leafcast/csv.hpp"
#include "leafcast/eval.hpp"
#include "leafcast/ingest.hpp"
#include "leafcast/nn/checkpoint.hpp"
#include "leafcast/nn/train.hpp"
#include "leafcast/pipeline.hpp"
#include "leafcast/raster.hpp"
#include "leafcast/tune.hpp"
#include "oracles.hpp"

namespace {

using namespace leafcast;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double objective(const nn::ModelConfig& c) {
  double loss = std::abs(std::log10(c.learning_rate) + 3.0) + c.layers[0].dropout_rate;
  for (const auto& l : c.layers) loss += std::abs(l.units - 160) / 512.0;
  return loss;
}

class StubEvaluator : public tune::TrialEvaluator {
 public:
  double advance(const tune::TrialConfig& trial, int) override { return objective(trial.config); }
};

Outcome rmse_oracle() {
  const auto start = eval::rmse_report(testing::reference_start_predicted(), testing::reference_start_actual());
  const auto end = eval::rmse_report(testing::reference_end_predicted(), testing::reference_end_actual());
  std::vector<int> both;
  for (std::size_t i = 0; i < start.years.size(); ++i) {
    both.push_back(start.years[i].start_diff);
    both.push_back(end.years[i].end_diff);
  }
  const double combined = eval::rmse(both);
  char buf[128];
  std::snprintf(buf, sizeof buf, "start %.4f end %.4f combined %.4f", start.rmse_start, end.rmse_end, combined);
  return {std::abs(start.rmse_start - 6.32) <= 0.01 && std::abs(end.rmse_end - 9.31) <= 0.01 &&
              std::abs(combined - 7.96) <= 0.01,
          buf};
}

Outcome gradient_check() {
  const auto r = testing::gradient_sweep(24, 2024);
  char buf[160];
  std::snprintf(buf, sizeof buf, "24 models, %zu components, max relative error %.3g (%s)", r.checked,
                r.max_relative_error, r.worst_tensor.c_str());
  return {r.max_relative_error < 1e-4, buf};
}

Outcome classification_oracle() {
  bool ok = true;
  const auto r = eval::classification_report({1, 1, 0, 0, 0}, {1, 0, 0, 0, 1});
  ok &= r.leaf_fall.precision == 0.5 && r.leaf_fall.recall == 0.5 && r.leaf_fall.f1 == 0.5;
  ok &= r.no_leaf_fall.precision == 2.0 / 3.0 && r.no_leaf_fall.recall == 2.0 / 3.0;
  ok &= r.accuracy == 3.0 / 5.0;
  ok &= std::abs(r.weighted.f1 - (2 * 0.5 + 3 * (2.0 / 3.0)) / 5.0) < 1e-15;
  ok &= std::abs(r.macro.f1 - (0.5 + 2.0 / 3.0) / 2.0) < 1e-15;
  const auto none = eval::classification_report({0, 0, 0, 0}, {0, 0, 0, 0});
  ok &= none.leaf_fall.precision == 0.0 && none.leaf_fall.recall == 0.0 && none.leaf_fall.f1 == 0.0;
  ok &= none.no_leaf_fall.f1 == 1.0 && none.warnings.size() == 2;
  const auto all_wrong = eval::classification_report({1, 0}, {0, 1});
  ok &= all_wrong.accuracy == 0.0 && all_wrong.macro.f1 == 0.0 && all_wrong.warnings.empty();
  Rng rng(17);
  for (int t = 0; t < 500 && ok; ++t) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<std::uint8_t> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.bernoulli(0.3), p[i] = rng.bernoulli(0.4);
    const auto c = testing::confusion(y, p);
    const auto q = eval::classification_report(y, p);
    const double w = (q.leaf_fall.f1 * static_cast<double>(c.tp + c.fn) +
                      q.no_leaf_fall.f1 * static_cast<double>(c.tn + c.fp)) / static_cast<double>(n);
    ok &= std::abs(q.weighted.f1 - w) < 1e-12 && std::abs(q.macro.f1 - (q.leaf_fall.f1 + q.no_leaf_fall.f1) / 2) < 1e-12;
    ok &= q.accuracy == static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
  }
  return {ok, "fixtures, zero denominators and 500 random averages"};
}

Outcome hyperband_oracle() {
  bool ok = true;
  const auto plans = tune::hyperband_schedule(27, 3);
  const auto ref = testing::reference_ladder(27, 3);
  std::string ladder;
  std::size_t k = 0;
  for (const auto& plan : plans) {
    ladder += "s=" + std::to_string(plan.bracket) + ":";
    for (const auto& round : plan.rounds) {
      ladder += " " + std::to_string(round.configs) + "@" + std::to_string(round.epochs);
      ok &= k < ref.size() && ref[k].bracket == plan.bracket && ref[k].configs == round.configs &&
            std::abs(ref[k].resource - round.resource) < 1e-9;
      ++k;
    }
    ladder += "; ";
  }
  ok &= k == ref.size();
  ok &= ladder == "s=3: 27@1 9@3 3@9 1@27; s=2: 12@3 4@9 1@27; s=1: 6@9 2@27; s=0: 4@27; ";
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    StubEvaluator stub;
    const auto result = tune::run_hyperband(tune::SearchSpace::leafcast_default(), stub, 27, 3, seed,
                                            nn::ModelConfig::leafcast_default(4));
    int best = -1;
    double best_loss = 0.0;
    for (const auto& r : result.report.records) {
      const double loss = objective(nn::config_from_json(r.config_json));
      if (best < 0 || loss < best_loss || (loss == best_loss && r.trial_id < best)) best = r.trial_id, best_loss = loss;
    }
    ok &= result.best.trial_id == best;
  }
  return {ok, ladder + "argmin over 5 seeds"};
}

Outcome wrangling_oracle() {
  bool ok = true;
  Rng rng(31);
  int fixtures = 0;
  for (int t = 0; t < 300; ++t, ++fixtures) {
    const int first = 2010 + static_cast<int>(rng.below(10));
    const ingest::YearRange years{first, first + static_cast<int>(rng.below(3))};
    const auto records = testing::random_pheno(rng, years, t % 3 != 0);
    ok &= ingest::to_daily_series(records, years).values == testing::brute_force_daily(records, years);
  }
  ok &= !ingest::is_leaf_fall_day(0.0) && !ingest::is_leaf_fall_day(100.0);
  ok &= ingest::is_leaf_fall_day(0.1) && ingest::is_leaf_fall_day(99.9) && ingest::is_leaf_fall_day(50.0);
  return {ok, std::to_string(fixtures) + " random fixtures equal the day-by-day oracle; boundary labels"};
}

Outcome overfit() {
  const auto data = testing::separable_set(20, 7, 3, 1);
  auto cfg = nn::ModelConfig::leafcast_default(3);
  cfg.seed = 3;
  auto session = nn::start_session(cfg, data.feature_names());
  const double initial = nn::evaluate(session.model, data).accuracy;
  double acc = 0.0;
  int epoch = 0;
  while (epoch < 200 && acc < 0.99) {
    nn::train_epochs(session, data, {}, 1);
    ++epoch;
    acc = nn::evaluate(session.model, data).accuracy;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "training accuracy %.3f -> %.3f after %d epochs", initial, acc, epoch);
  return {acc >= 0.99, buf};
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(LEAFCAST_CLI_PATH) + " " + args + " >> " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool end_to_end(const fs::path& out) {
  fs::remove_all(out);
  fs::create_directories(out);
  pipeline::write_file(out / "run.json", R"({"model.epochs": 25})");
  const std::string common = "--out " + out.string() + " --seed 7 --config " + (out / "run.json").string();
  for (const char* cmd : {"synth", "ingest", "build-dataset", "train", "evaluate"}) {
    if (run_cli(common + " " + cmd, out / "log.txt") != 0) {
      std::printf("  %s failed, see %s\n", cmd, (out / "log.txt").c_str());
      return false;
    }
  }
  return true;
}

const csv::Row* find_row(const csv::Table& t, const std::string& prefix) {
  for (const auto& r : t.rows()) {
    if (r.fields[0].rfind(prefix, 0) == 0) return &r;
  }
  return nullptr;
}

Outcome synthetic_run(const fs::path& out) {
  if (!end_to_end(out)) return {false, "pipeline command failed"};
  const auto rmse = csv::Table::parse(pipeline::read_file(out / "rmse_truth.csv"));
  const auto report = csv::Table::parse(pipeline::read_file(out / "classification_report.csv"));
  const auto* holdout = find_row(rmse, "holdout:");
  const auto* leaf = find_row(report, "leaf_fall");
  if (!holdout || !leaf) return {false, "missing rows in rmse_truth.csv or classification_report.csv"};
  const double start = std::stod(holdout->fields[2]), end = std::stod(holdout->fields[3]);
  const double f1 = std::stod(leaf->fields[3]);
  const auto* pooled = find_row(rmse, "all_trees");
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s start RMSE %.2f d (<= 10), end RMSE %.2f d (<= 14), leaf-fall F1 %.3f (>= 0.6); "
                "all trees start %.2f end %.2f",
                holdout->fields[0].c_str(), start, end, f1, pooled ? std::stod(pooled->fields[2]) : NAN,
                pooled ? std::stod(pooled->fields[3]) : NAN);
  return {start <= 10.0 && end <= 14.0 && f1 >= 0.6, buf};
}

Outcome determinism(const fs::path& first, const fs::path& second) {
  if (!end_to_end(second)) return {false, "pipeline command failed"};
  std::vector<std::string> differ;
  const char* files[] = {"checkpoint.json", "metrics.csv", "classification_report.csv", "periods.csv",
                         "rmse.csv", "periods_truth.csv", "rmse_truth.csv", "trajectory.csv",
                         "features.csv", "features.manifest.json", "daily_series.csv"};
  for (const char* f : files) {
    const fs::path a = first / f, b = second / f;
    if (!fs::exists(a) || !fs::exists(b) || pipeline::read_file(a) != pipeline::read_file(b)) differ.push_back(f);
  }
  std::string detail = std::to_string(std::size(files)) + " artifacts compared";
  for (const auto& d : differ) detail += ", differs: " + d;
  return {differ.empty(), detail};
}

fs::path find_artifact(const fs::path& root, const std::string& name) {
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.path().filename() == name) return e.path();
  }
  return {};
}

Outcome round_trips(const fs::path& run) {
  std::vector<std::string> failed;
  const auto ckpt_path = find_artifact(run, "checkpoint.json");
  if (ckpt_path.empty()) {
    failed.push_back("checkpoint missing");
  } else {
    const auto bytes = pipeline::read_file(ckpt_path);
    if (nn::save_checkpoint(nn::load_checkpoint(bytes)) != bytes) failed.push_back("checkpoint");
  }
  const auto daily_path = find_artifact(run, "daily_series.csv");
  if (daily_path.empty()) {
    failed.push_back("daily series missing");
  } else {
    const auto text = pipeline::read_file(daily_path);
    if (ingest::write_daily_csv(ingest::parse_daily_csv(text)) != text) failed.push_back("daily series");
  }
  const auto features_path = find_artifact(run, "features.csv");
  const auto manifest_path = find_artifact(run, "features.manifest.json");
  if (features_path.empty() || manifest_path.empty()) {
    failed.push_back("feature table missing");
  } else {
    const auto text = pipeline::read_file(features_path);
    const auto manifest = features::parse_manifest(pipeline::read_file(manifest_path));
    const auto table = features::parse_feature_csv(text, manifest);
    if (features::write_feature_csv(table) != text ||
        features::parse_feature_csv(features::write_feature_csv(table), manifest) != table) {
      failed.push_back("feature table");
    }
  }
  int grids = 0;
  for (const auto& e : fs::directory_iterator(run / "data" / "rasters")) {
    const auto text = pipeline::read_file(e.path());
    const auto g = raster::parse_ascii_grid(text);
    const auto back = raster::parse_ascii_grid(raster::write_ascii_grid(g));
    bool same = back.ncols == g.ncols && back.nrows == g.nrows && back.xll == g.xll && back.yll == g.yll &&
                back.cellsize == g.cellsize && back.cells.size() == g.cells.size();
    for (std::size_t i = 0; same && i < g.cells.size(); ++i) {
      same = std::isnan(g.cells[i]) ? std::isnan(back.cells[i]) : back.cells[i] == g.cells[i];
    }
    if (!same) {
      failed.push_back("grid " + e.path().filename().string());
      break;
    }
    ++grids;
  }
  std::string detail = "checkpoint, daily series, feature table and " + std::to_string(grids) + " grids";
  for (const auto& f : failed) detail += ", failed: " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  const fs::path root = testing::scratch_dir("acceptance");
  const fs::path run_a = root / "run_a", run_b = root / "run_b";
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "RMSE oracle", 1, rmse_oracle},
      {2, "gradient check", 30, gradient_check},
      {3, "classification report oracle", 1, classification_oracle},
      {4, "Hyperband schedule oracle", 5, hyperband_oracle},
      {5, "wrangling oracle", 5, wrangling_oracle},
      {6, "end-to-end synthetic run", 600, [&] { return synthetic_run(run_a); }},
      {7, "determinism", 600, [&] { return determinism(run_a, run_b); }},
      {8, "overfit sanity", 60, overfit},
      {9, "format round trips", 60, [&] { return round_trips(run_a); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %d %s: %s | %s | %.2f s (limit %.0f s%s)\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
