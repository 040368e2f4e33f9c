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

#ifndef LEAFCAST_FEATURES_HPP_
#define LEAFCAST_FEATURES_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leafcast/date.hpp"
#include "leafcast/ingest.hpp"
#include "leafcast/raster.hpp"

namespace leafcast::features {

enum class ColumnKind { kNumeric, kOneHot };

// Per-tree per-day feature rows. Rows are grouped by tree, dates ascending.
class FeatureTable {
 public:
  std::size_t row_count() const { return dates_.size(); }
  std::size_t width() const { return names_.size(); }

  const std::vector<std::string>& feature_names() const { return names_; }
  const std::vector<ColumnKind>& column_kinds() const { return kinds_; }
  const std::vector<std::string>& tree_ids() const { return tree_ids_; }
  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<std::string>& species() const { return species_; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * width(), width()};
  }
  double at(std::size_t r, std::size_t c) const { return values_[r * width() + c]; }
  std::size_t column_index(std::string_view name) const;

  void add_row(std::string tree_id, Date date, std::string species, std::span<const double> row,
               bool label);
  void set_columns(std::vector<std::string> names, std::vector<ColumnKind> kinds);
  // Appends a column; `column` holds one value per existing row.
  void append_column(std::string name, ColumnKind kind, const std::vector<double>& column);

  bool operator==(const FeatureTable&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<ColumnKind> kinds_;
  std::vector<std::string> tree_ids_;
  std::vector<Date> dates_;
  std::vector<std::string> species_;
  std::vector<double> values_;
  std::vector<std::uint8_t> labels_;
};

struct ScalerParams {
  std::vector<std::string> names;
  std::vector<double> mins;
  std::vector<double> maxs;

  bool operator==(const ScalerParams&) const = default;
};

// Species codes seen on the fitting rows, lexicographically ordered.
struct SpeciesEncoder {
  std::vector<std::string> species;

  bool operator==(const SpeciesEncoder&) const = default;
};

struct Example {
  std::span<const double> window;  // window_size x feature_count, row-major, oldest first
  bool label = false;
  const std::string* tree_id = nullptr;
  Date target_date;
};

// Supervised examples: the `window` days strictly before `target_date` predict
// its label.
class WindowedDataset {
 public:
  WindowedDataset() = default;
  WindowedDataset(std::size_t window, std::vector<std::string> feature_names)
      : window_(window), names_(std::move(feature_names)) {}

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t window() const { return window_; }
  std::size_t feature_count() const { return names_.size(); }
  const std::vector<std::string>& feature_names() const { return names_; }

  Example operator[](std::size_t i) const;
  std::span<const double> window_values(std::size_t i) const {
    const std::size_t stride = window_ * feature_count();
    return {data_.data() + i * stride, stride};
  }
  bool label(std::size_t i) const { return labels_[i] != 0; }
  const std::string& tree_id(std::size_t i) const { return tree_ids_[i]; }
  Date target_date(std::size_t i) const { return dates_[i]; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }

  void push_back(std::span<const double> window, bool label, std::string tree_id, Date target);
  WindowedDataset subset(const std::vector<std::size_t>& indices) const;

  bool operator==(const WindowedDataset&) const = default;

 private:
  std::size_t window_ = 7;
  std::vector<std::string> names_;
  std::vector<double> data_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::string> tree_ids_;
  std::vector<Date> dates_;
};

struct TemporalSplit {
  WindowedDataset train;
  WindowedDataset val;
  WindowedDataset holdout;
  std::vector<std::string> warnings;
};

// Reproducibility sidecar for an exported feature table.
struct FeatureManifest {
  std::vector<std::string> feature_names;
  std::vector<ColumnKind> column_kinds;
  ScalerParams scaler;
  SpeciesEncoder species;
  std::map<std::string, std::string> species_by_tree;
  int window = 7;
};

// One row per (tree, day) of the leaf series. Columns: index kinds in `kinds`
// order, then weather features. Throws DataError listing uncovered
// (tree, date, source) triples.
FeatureTable join_sources(const std::vector<ingest::DailyLeafSeries>& leaf,
                          const std::map<std::string, std::map<raster::IndexKind,
                                                               raster::IndexSeries>>& indices,
                          const ingest::Era5Table& weather,
                          const std::vector<raster::IndexKind>& kinds = {
                              raster::IndexKind::kNdvi, raster::IndexKind::kNdwi,
                              raster::IndexKind::kNdmi});

// floor((day_of_year - 1) / 7) + 1, capped at 52.
int week_of_year(Date date);
FeatureTable add_week_of_year(FeatureTable table);

SpeciesEncoder fit_species(const FeatureTable& table, const std::vector<std::size_t>& fit_rows);
// Appends `species_<code>` one-hot columns. Rows with a species the encoder
// has not seen get all zeros and a warning.
FeatureTable one_hot_species(FeatureTable table, const SpeciesEncoder& encoder,
                             std::vector<std::string>* warnings = nullptr);

// Min and max of every numeric column over `fit_rows` only.
ScalerParams fit_minmax(const FeatureTable& table, const std::vector<std::size_t>& fit_rows);
FeatureTable apply_minmax(FeatureTable table, const ScalerParams& params);

WindowedDataset make_windows(const FeatureTable& table, std::size_t window = 7,
                             std::vector<std::string>* warnings = nullptr);

TemporalSplit split_temporal(const WindowedDataset& dataset, ingest::YearRange train_years,
                             int val_year, const std::string& holdout_tree);

// Rows whose tree is not `excluded_tree` and whose year lies in `years`.
std::vector<std::size_t> select_rows(const FeatureTable& table, ingest::YearRange years,
                                     const std::string& excluded_tree);

// Header `tree_id,date,<feature...>,label`.
std::string write_feature_csv(const FeatureTable& table);
FeatureTable parse_feature_csv(std::string_view text, const FeatureManifest& manifest);

std::string write_manifest(const FeatureManifest& manifest);
FeatureManifest parse_manifest(std::string_view text);

std::string to_string(ColumnKind kind);

}  // namespace leafcast::features

#endif  // LEAFCAST_FEATURES_HPP_
