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

#ifndef LEAFCAST_SYNTH_HPP_
#define LEAFCAST_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "leafcast/eval.hpp"
#include "leafcast/ingest.hpp"
#include "leafcast/raster.hpp"

namespace leafcast::synth {

struct SynthConfig {
  std::uint64_t seed = 7;
  ingest::YearRange years{2015, 2021};
  int tree_count = 3;
  std::vector<std::string> species_pool{"ACRU", "QURU"};

  // Daily 2 m temperature (K): mean + amplitude * sin(2 pi (doy - 109) / 365)
  // + yearly anomaly + daily noise.
  double temperature_mean = 281.0;
  double temperature_amplitude = 12.0;
  double temperature_noise = 1.0;
  double year_anomaly_sd = 1.5;

  // Leaf-fall begins the first day on or after Sep 8 whose trailing
  // `smoothing_window`-day mean temperature drops below onset_threshold
  // (+ a per-tree offset), and never after Oct 20.
  double onset_threshold = 283.0;
  int smoothing_window = 7;
  double tree_threshold_sd = 0.3;
  double duration_mean = 45.0;
  double duration_sd = 5.0;
  double duration_min = 38.0;
  double duration_max = 60.0;
  double logistic_steepness = 3.0;

  double index_noise = 0.01;
  int revisit_days = 5;
  double cloud_probability = 0.15;

  double site_lat = 42.53;
  double site_lon = -72.19;
  double cellsize = 0.001;

  void validate() const;
};

struct SynthDataset {
  std::vector<ingest::PhenoRecord> pheno;
  std::vector<ingest::SiteCoordinate> sites;
  ingest::Era5Table weather;
  std::map<std::string, raster::BandGrid> rasters;  // file name -> grid
  std::map<std::string, std::vector<eval::PeriodSummary>> truth_periods;
  std::map<std::string, std::vector<double>> truth_daily;  // tree -> lfall per day of the range
};

// Deterministic given config.seed; per-tree streams are derived from it.
SynthDataset generate(const SynthConfig& config);

// Writes pheno.csv, sites.csv, era5.csv, truth_periods.csv and rasters/.
void write_dataset(const SynthDataset& data, const std::filesystem::path& dir);

inline const std::vector<std::string>& weather_columns() {
  static const std::vector<std::string> kColumns{"temperature_2m", "total_precipitation",
                                                 "surface_solar_radiation_downwards",
                                                 "volumetric_soil_water_layer_1"};
  return kColumns;
}

}  // namespace leafcast::synth

#endif  // LEAFCAST_SYNTH_HPP_
