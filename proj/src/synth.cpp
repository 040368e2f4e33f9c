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

#include "leafcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>

#include "leafcast/error.hpp"
#include "leafcast/nn/activation.hpp"
#include "leafcast/random.hpp"

namespace leafcast::synth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double seasonal(int doy, double phase) { return std::sin(kTwoPi * (doy - phase) / 365.0); }

// Normalised logistic ramp from 0 at tau = 0 to 100 at tau = 1.
double logistic_lfall(double tau, double k) {
  if (tau <= 0.0) return 0.0;
  if (tau >= 1.0) return 100.0;
  const double lo = nn::sigmoid(-k / 2.0), hi = nn::sigmoid(k / 2.0);
  return 100.0 * (nn::sigmoid(k * (tau - 0.5)) - lo) / (hi - lo);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

}  // namespace

void SynthConfig::validate() const {
  if (years.last - years.first + 1 < 2) throw UsageError("synth needs at least two years");
  if (tree_count < 1) throw UsageError("synth needs at least one tree");
  if (species_pool.empty()) throw UsageError("synth species pool is empty");
  if (!(duration_mean > 0.0) || duration_min > duration_max) throw UsageError("invalid duration settings");
  if (revisit_days < 1 || smoothing_window < 1) throw UsageError("invalid cadence settings");
  if (!(cloud_probability >= 0.0 && cloud_probability <= 1.0)) {
    throw UsageError("cloud probability must lie in [0, 1]");
  }
  if (index_noise < 0.0 || temperature_noise < 0.0 || tree_threshold_sd < 0.0 || year_anomaly_sd < 0.0) {
    throw UsageError("noise levels must be non-negative");
  }
  if (!(logistic_steepness > 0.0)) throw UsageError("logistic steepness must be positive");
}

SynthDataset generate(const SynthConfig& cfg) {
  cfg.validate();
  SynthDataset out;
  const Date start = Date::from_ymd(cfg.years.first, 1, 1);
  const Date end = Date::from_ymd(cfg.years.last, 12, 31);
  const std::size_t days = static_cast<std::size_t>(end - start) + 1;

  // Weather: one pixel shared by every tree.
  Rng weather_rng(Rng::derive(cfg.seed, 0));
  std::map<int, double> anomaly;
  for (int y = cfg.years.first; y <= cfg.years.last; ++y) anomaly[y] = weather_rng.normal(0.0, cfg.year_anomaly_sd);
  out.weather.feature_names = weather_columns();
  std::vector<double> temperature(days);
  for (std::size_t i = 0; i < days; ++i) {
    const Date d = start + static_cast<int>(i);
    const int doy = d.day_of_year();
    const double t = cfg.temperature_mean + cfg.temperature_amplitude * seasonal(doy, 109.0) +
                     anomaly[d.year()] + weather_rng.normal(0.0, cfg.temperature_noise);
    const double precip = weather_rng.bernoulli(0.4) ? weather_rng.uniform(0.0, 0.012) : 0.0;
    const double solar = std::max(0.0, 1.4e7 + 1.0e7 * seasonal(doy, 80.0) + weather_rng.normal(0.0, 1.5e6));
    const double soil = std::clamp(0.32 - 0.06 * seasonal(doy, 120.0) + weather_rng.normal(0.0, 0.01), 0.05, 0.6);
    temperature[i] = t;
    out.weather.records.push_back({d, {t, precip, solar, soil}});
  }

  // Raster layout: one tree per cell centre on a square-ish grid.
  const int ncols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.tree_count))));
  const int nrows = (cfg.tree_count + ncols - 1) / ncols;
  raster::BandGrid proto;
  proto.ncols = ncols;
  proto.nrows = nrows;
  proto.cellsize = cfg.cellsize;
  proto.xll = cfg.site_lon - ncols * cfg.cellsize / 2.0;
  proto.yll = cfg.site_lat - nrows * cfg.cellsize / 2.0;
  proto.cells.assign(static_cast<std::size_t>(ncols * nrows), std::nan(""));

  struct TreeState {
    std::string id;
    std::vector<double> lfall;
  };
  std::vector<TreeState> trees;
  for (int k = 0; k < cfg.tree_count; ++k) {
    Rng rng(Rng::derive(cfg.seed, 100 + static_cast<std::uint64_t>(k)));
    TreeState tree{"T" + std::to_string(k + 1), std::vector<double>(days, 0.0)};
    const std::string species = cfg.species_pool[static_cast<std::size_t>(k) % cfg.species_pool.size()];
    const int row = k / ncols, col = k % ncols;
    out.sites.push_back({tree.id, proto.yll + (nrows - row - 0.5) * cfg.cellsize,
                         proto.xll + (col + 0.5) * cfg.cellsize});
    const double threshold = cfg.onset_threshold + rng.normal(0.0, cfg.tree_threshold_sd);

    auto& truth = out.truth_periods[tree.id];
    for (int y = cfg.years.first; y <= cfg.years.last; ++y) {
      const Date earliest = Date::from_ymd(y, 9, 8);
      const Date latest = Date::from_ymd(y, 10, 20);
      Date onset = latest;
      for (Date d = earliest; d < latest; ++d) {
        double mean = 0.0;
        for (int j = 0; j < cfg.smoothing_window; ++j) mean += temperature[static_cast<std::size_t>(d - start - j)];
        if (mean / cfg.smoothing_window < threshold) {
          onset = d;
          break;
        }
      }
      const int duration = static_cast<int>(std::lround(
          std::clamp(rng.normal(cfg.duration_mean, cfg.duration_sd), cfg.duration_min, cfg.duration_max)));
      std::optional<eval::PeriodSummary> period;
      for (Date d = Date::from_ymd(y, 1, 1); d <= Date::from_ymd(y, 12, 31); ++d) {
        const double v = logistic_lfall(static_cast<double>(d - onset) / duration, cfg.logistic_steepness);
        tree.lfall[static_cast<std::size_t>(d - start)] = v;
        if (ingest::is_leaf_fall_day(v)) {
          if (!period) period = eval::PeriodSummary{y, d, d};
          period->end = d;
        }
      }
      if (period) truth.push_back(*period);

      // Weekly field observations from Sep 1 with +-1 day jitter.
      for (int week = 0;; ++week) {
        const int jitter = static_cast<int>(rng.below(3)) - 1;
        const Date d = Date::from_ymd(y, 9, 1) + 7 * week + (week == 0 ? std::max(jitter, 0) : jitter);
        if (d.year() != y) break;
        const double v = std::round(tree.lfall[static_cast<std::size_t>(d - start)] * 10.0) / 10.0;
        out.pheno.push_back({d, tree.id, species, v});
      }
    }
    out.truth_daily[tree.id] = tree.lfall;
    trees.push_back(std::move(tree));
  }
  std::stable_sort(out.pheno.begin(), out.pheno.end(),
                   [](const auto& a, const auto& b) { return a.date < b.date; });

  // Index scenes every revisit_days; clouds blank a whole scene. The first
  // scene of every year is kept clear so each year has usable samples.
  Rng scene_rng(Rng::derive(cfg.seed, 1));
  struct IndexShape {
    raster::IndexKind kind;
    double base, span;
  };
  const IndexShape shapes[] = {{raster::IndexKind::kNdvi, 0.2, 0.7},
                               {raster::IndexKind::kNdwi, -0.45, 0.3},
                               {raster::IndexKind::kNdmi, 0.0, 0.4}};
  int last_year = 0;
  for (Date d = start; d <= end; d = d + cfg.revisit_days) {
    const bool first_of_year = d.year() != last_year;
    last_year = d.year();
    const bool cloudy = !first_of_year && scene_rng.bernoulli(cfg.cloud_probability);
    for (const auto& shape : shapes) {
      raster::BandGrid grid = proto;
      for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        grid.cells[c] = cloudy ? std::nan("") : shape.base + shape.span * scene_rng.uniform(0.3, 1.0);
      }
      if (!cloudy) {
        for (int k = 0; k < cfg.tree_count; ++k) {
          const double green = 1.0 - trees[static_cast<std::size_t>(k)].lfall[static_cast<std::size_t>(d - start)] / 100.0;
          grid.cells[static_cast<std::size_t>(k)] =
              std::clamp(shape.base + shape.span * green + scene_rng.normal(0.0, cfg.index_noise), -1.0, 1.0);
        }
      }
      out.rasters.emplace(raster::to_string(shape.kind) + "_" + d.to_string() + ".asc", std::move(grid));
    }
  }
  return out;
}

void write_dataset(const SynthDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "rasters");
  write_text(dir / "pheno.csv", ingest::write_pheno_csv(data.pheno));
  write_text(dir / "sites.csv", ingest::write_sites_csv(data.sites));
  write_text(dir / "era5.csv", ingest::write_era5_csv(data.weather));
  write_text(dir / "truth_periods.csv", eval::write_truth_periods_csv(data.truth_periods));
  for (const auto& [name, grid] : data.rasters) {
    write_text(dir / "rasters" / name, raster::write_ascii_grid(grid));
  }
}

}  // namespace leafcast::synth
