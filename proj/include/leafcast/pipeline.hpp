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

#ifndef LEAFCAST_PIPELINE_HPP_
#define LEAFCAST_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "leafcast/features.hpp"
#include "leafcast/ingest.hpp"
#include "leafcast/nn/model.hpp"
#include "leafcast/raster.hpp"

namespace leafcast::pipeline {

inline constexpr std::string_view kVersion = "0.1.0";

// Everything a subcommand needs. Loaded from a JSON object with flat dotted
// keys (`model.learning_rate`); command-line flags are applied on top.
struct RunConfig {
  std::filesystem::path out = "leafcast_out";
  // Empty paths resolve to <out>/data/{pheno.csv,sites.csv,era5.csv,rasters,truth_periods.csv}.
  std::filesystem::path pheno;
  std::filesystem::path sites;
  std::filesystem::path era5;
  std::filesystem::path rasters;
  std::filesystem::path truth;
  std::filesystem::path checkpoint;  // defaults to <out>/checkpoint.json

  int first_year = 0;  // 0 = first year in the phenology file
  int last_year = 0;   // 0 = last year in the phenology file
  int val_year = 0;    // 0 = last_year
  std::string holdout_tree;  // empty = last tree id in sorted order

  std::vector<raster::IndexKind> indices{raster::kAllIndexKinds[0], raster::kAllIndexKinds[1],
                                         raster::kAllIndexKinds[2]};
  std::vector<ingest::FeatureSelection> weather{{"temperature_2m", {}},
                                                {"total_precipitation", {}},
                                                {"surface_solar_radiation_downwards", {}},
                                                {"volumetric_soil_water_layer_1", {}}};

  std::vector<nn::LayerSpec> layers;  // empty = default architecture
  double learning_rate = 1e-3;
  int window = 7;
  int epochs = 10;
  int batch_size = 32;
  double threshold = 0.5;

  int tune_max_epochs = 27;
  int tune_eta = 3;

  int synth_trees = 3;
  int synth_first_year = 2015;
  int synth_last_year = 2021;
  double synth_steepness = 3.0;
  double synth_index_noise = 0.01;
  double synth_cloud_probability = 0.15;
  double synth_temperature_noise = 1.0;
  double synth_tree_offset_sd = 0.3;

  std::uint64_t seed = 7;
  int jobs = 1;

  std::filesystem::path data_dir() const { return out / "data"; }
  std::filesystem::path pheno_path() const;
  std::filesystem::path sites_path() const;
  std::filesystem::path era5_path() const;
  std::filesystem::path raster_path() const;
  std::filesystem::path truth_path() const;
  std::filesystem::path checkpoint_path() const;

  nn::ModelConfig model_config(int feature_count) const;
};

// Applies one dotted key; throws UsageError for unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& json_value);
RunConfig load_config(std::string_view json_text, RunConfig base = {});
// Canonical JSON of every resolved field.
std::string config_json(const RunConfig& config);
// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

// Joined, encoded and windowed data for one run.
struct Dataset {
  ingest::YearRange years;
  int val_year = 0;
  std::string holdout_tree;
  std::vector<ingest::DailyLeafSeries> leaf;
  features::FeatureTable raw;      // joined sources + week of year
  features::FeatureTable encoded;  // one-hot species, min-max scaled
  features::FeatureManifest manifest;
  features::WindowedDataset windows;
  features::TemporalSplit split;
  std::vector<std::string> warnings;
};

// Reads and joins every source. With `manifest`, encodes with its fitted
// encoder and scaler instead of refitting on the training rows.
Dataset prepare_dataset(const RunConfig& config, const features::FeatureManifest* manifest = nullptr);

// Each returns the paths it wrote; every command also writes <cmd>.manifest.json.
std::vector<std::filesystem::path> cmd_synth(const RunConfig& config);
std::vector<std::filesystem::path> cmd_ingest(const RunConfig& config);
std::vector<std::filesystem::path> cmd_build_dataset(const RunConfig& config);
std::vector<std::filesystem::path> cmd_train(const RunConfig& config);
std::vector<std::filesystem::path> cmd_tune(const RunConfig& config);
std::vector<std::filesystem::path> cmd_evaluate(const RunConfig& config);
std::vector<std::filesystem::path> cmd_predict(const RunConfig& config);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace leafcast::pipeline

#endif  // LEAFCAST_PIPELINE_HPP_
