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

// leafcast command-line entry point.
#include <cstdio>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "leafcast/error.hpp"
#include "leafcast/kernels.hpp"
#include "leafcast/pipeline.hpp"

namespace {

using leafcast::pipeline::RunConfig;
using Command = std::vector<std::filesystem::path> (*)(const RunConfig&);

int run(int argc, char** argv) {
  CLI::App app{"Leaf-fall prediction pipeline: synthetic data, ingestion, LSTM training, tuning and evaluation."};
  app.set_version_flag("--version", std::string(leafcast::pipeline::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out, checkpoint;
  std::uint64_t seed = 0;
  int jobs = 0;
  app.add_option("--config", config_path, "JSON file of dotted keys, e.g. {\"model.epochs\": 10}");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--jobs", jobs, "Worker threads (tuning trials run concurrently)")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Output directory (default leafcast_out)");

  const std::map<std::string, Command> commands{
      {"synth", leafcast::pipeline::cmd_synth},
      {"ingest", leafcast::pipeline::cmd_ingest},
      {"build-dataset", leafcast::pipeline::cmd_build_dataset},
      {"train", leafcast::pipeline::cmd_train},
      {"tune", leafcast::pipeline::cmd_tune},
      {"evaluate", leafcast::pipeline::cmd_evaluate},
      {"predict", leafcast::pipeline::cmd_predict},
  };
  const std::map<std::string, std::string> help{
      {"synth", "Write a synthetic dataset to <out>/data"},
      {"ingest", "Build daily leaf-fall series and the raw feature table"},
      {"build-dataset", "Encode and scale features; write the feature manifest"},
      {"train", "Train the LSTM classifier and write a checkpoint"},
      {"tune", "Hyperband search; write the report and the best checkpoint"},
      {"evaluate", "Classification report, leaf-fall periods and RMSE on the holdout tree"},
      {"predict", "Per-day leaf-fall probabilities and labels"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    if (name == "evaluate" || name == "predict") {
      sub->add_option("--checkpoint", checkpoint, "Checkpoint file (default <out>/checkpoint.json)");
    }
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  RunConfig config;
  if (!config_path.empty()) {
    config = leafcast::pipeline::load_config(leafcast::pipeline::read_file(config_path));
  }
  if (!out.empty()) config.out = out;
  if (app.count("--seed")) config.seed = seed;
  if (jobs > 0) config.jobs = jobs;
  if (!checkpoint.empty()) config.checkpoint = checkpoint;
  leafcast::kernels::set_threads(config.jobs);

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    for (const auto& path : commands.at(name)(config)) std::printf("%s\n", path.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const leafcast::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const leafcast::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const leafcast::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
