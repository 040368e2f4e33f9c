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

#include "leafcast/features.hpp"

#include <algorithm>
#include <limits>
#include <nlohmann/json.hpp>

#include "leafcast/csv.hpp"
#include "leafcast/error.hpp"
#include "leafcast/kernels.hpp"

namespace leafcast::features {

using nlohmann::json;

std::string to_string(ColumnKind kind) {
  return kind == ColumnKind::kNumeric ? "numeric" : "one_hot";
}

namespace {

ColumnKind parse_kind(const std::string& s) {
  if (s == "numeric") return ColumnKind::kNumeric;
  if (s == "one_hot") return ColumnKind::kOneHot;
  throw DataError("unknown column kind '" + s + "'");
}

}  // namespace

std::size_t FeatureTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw DataError("feature table has no column '" + std::string(name) + "'");
}

void FeatureTable::set_columns(std::vector<std::string> names, std::vector<ColumnKind> kinds) {
  if (row_count() != 0) throw DataError("set_columns on a non-empty table");
  names_ = std::move(names);
  kinds_ = std::move(kinds);
}

void FeatureTable::add_row(std::string tree_id, Date date, std::string species,
                           std::span<const double> row, bool label) {
  if (row.size() != width()) throw DataError("row width does not match the table");
  tree_ids_.push_back(std::move(tree_id));
  dates_.push_back(date);
  species_.push_back(std::move(species));
  values_.insert(values_.end(), row.begin(), row.end());
  labels_.push_back(label ? 1 : 0);
}

void FeatureTable::append_column(std::string name, ColumnKind kind,
                                 const std::vector<double>& column) {
  if (column.size() != row_count()) throw DataError("column length does not match the table");
  const std::size_t old_width = width();
  std::vector<double> next;
  next.reserve(row_count() * (old_width + 1));
  for (std::size_t r = 0; r < row_count(); ++r) {
    next.insert(next.end(), values_.begin() + r * old_width, values_.begin() + (r + 1) * old_width);
    next.push_back(column[r]);
  }
  values_ = std::move(next);
  names_.push_back(std::move(name));
  kinds_.push_back(kind);
}

Example WindowedDataset::operator[](std::size_t i) const {
  return {window_values(i), label(i), &tree_ids_[i], dates_[i]};
}

void WindowedDataset::push_back(std::span<const double> window, bool label, std::string tree_id,
                                Date target) {
  data_.insert(data_.end(), window.begin(), window.end());
  labels_.push_back(label ? 1 : 0);
  tree_ids_.push_back(std::move(tree_id));
  dates_.push_back(target);
}

WindowedDataset WindowedDataset::subset(const std::vector<std::size_t>& indices) const {
  WindowedDataset out(window_, names_);
  for (std::size_t i : indices) out.push_back(window_values(i), label(i), tree_ids_[i], dates_[i]);
  return out;
}

FeatureTable join_sources(
    const std::vector<ingest::DailyLeafSeries>& leaf,
    const std::map<std::string, std::map<raster::IndexKind, raster::IndexSeries>>& indices,
    const ingest::Era5Table& weather, const std::vector<raster::IndexKind>& kinds) {
  FeatureTable table;
  std::vector<std::string> names;
  for (auto k : kinds) names.push_back(raster::to_string(k));
  names.insert(names.end(), weather.feature_names.begin(), weather.feature_names.end());
  table.set_columns(names, std::vector<ColumnKind>(names.size(), ColumnKind::kNumeric));

  std::map<Date, const ingest::Era5Record*> weather_by_date;
  for (const auto& rec : weather.records) weather_by_date[rec.date] = &rec;

  std::vector<std::string> missing;
  std::size_t missing_count = 0;
  auto note = [&](const std::string& tree, Date d, const std::string& source) {
    if (missing.size() < 10) missing.push_back("(" + tree + ", " + d.to_string() + ", " + source + ")");
    ++missing_count;
  };

  std::vector<double> row(names.size());
  for (const auto& series : leaf) {
    const auto tree_it = indices.find(series.tree_id);
    std::vector<const raster::IndexSeries*> idx(kinds.size(), nullptr);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      if (tree_it == indices.end()) break;
      if (auto it = tree_it->second.find(kinds[k]); it != tree_it->second.end()) idx[k] = &it->second;
    }
    for (std::size_t i = 0; i < series.values.size(); ++i) {
      const Date d = series.date_at(i);
      bool ok = true;
      for (std::size_t k = 0; k < kinds.size(); ++k) {
        const auto* s = idx[k];
        const int off = s ? d - s->start_date : -1;
        if (!s || off < 0 || off >= static_cast<int>(s->values.size())) {
          note(series.tree_id, d, raster::to_string(kinds[k]));
          ok = false;
        } else {
          row[k] = s->values[static_cast<std::size_t>(off)];
        }
      }
      auto w = weather_by_date.find(d);
      if (w == weather_by_date.end()) {
        note(series.tree_id, d, "weather");
        ok = false;
      } else {
        std::copy(w->second->values.begin(), w->second->values.end(), row.begin() + kinds.size());
      }
      if (ok) table.add_row(series.tree_id, d, series.species, row, series.labels[i]);
    }
  }
  if (missing_count) {
    std::string msg = "sources do not cover the leaf-fall date range; " +
                      std::to_string(missing_count) + " missing (tree, date, source):";
    for (const auto& m : missing) msg += " " + m;
    if (missing_count > missing.size()) msg += " ...";
    throw DataError(msg);
  }
  return table;
}

int week_of_year(Date date) { return std::min((date.day_of_year() - 1) / 7 + 1, 52); }

FeatureTable add_week_of_year(FeatureTable table) {
  std::vector<double> col(table.row_count());
  for (std::size_t r = 0; r < col.size(); ++r) col[r] = week_of_year(table.dates()[r]);
  table.append_column("week_of_year", ColumnKind::kNumeric, col);
  return table;
}

SpeciesEncoder fit_species(const FeatureTable& table, const std::vector<std::size_t>& fit_rows) {
  std::set<std::string> seen;
  for (std::size_t r : fit_rows) seen.insert(table.species()[r]);
  return {{seen.begin(), seen.end()}};
}

FeatureTable one_hot_species(FeatureTable table, const SpeciesEncoder& encoder,
                             std::vector<std::string>* warnings) {
  std::set<std::string> unseen;
  std::vector<std::vector<double>> cols(encoder.species.size(),
                                        std::vector<double>(table.row_count(), 0.0));
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    const auto& sp = table.species()[r];
    auto it = std::lower_bound(encoder.species.begin(), encoder.species.end(), sp);
    if (it != encoder.species.end() && *it == sp) {
      cols[static_cast<std::size_t>(it - encoder.species.begin())][r] = 1.0;
    } else {
      unseen.insert(sp);
    }
  }
  for (std::size_t s = 0; s < encoder.species.size(); ++s) {
    table.append_column("species_" + encoder.species[s], ColumnKind::kOneHot, cols[s]);
  }
  if (warnings) {
    for (const auto& sp : unseen) {
      warnings->push_back("species '" + sp + "' not seen while fitting; encoded as all zeros");
    }
  }
  return table;
}

ScalerParams fit_minmax(const FeatureTable& table, const std::vector<std::size_t>& fit_rows) {
  if (fit_rows.empty()) throw DataError("fit_minmax: no rows selected for fitting");
  ScalerParams params;
  for (std::size_t c = 0; c < table.width(); ++c) {
    if (table.column_kinds()[c] != ColumnKind::kNumeric) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t r : fit_rows) {
      lo = std::min(lo, table.at(r, c));
      hi = std::max(hi, table.at(r, c));
    }
    params.names.push_back(table.feature_names()[c]);
    params.mins.push_back(lo);
    params.maxs.push_back(hi);
  }
  return params;
}

FeatureTable apply_minmax(FeatureTable table, const ScalerParams& params) {
  const std::size_t width = table.width();
  std::vector<double> mins(width, 0.0), maxs(width, 0.0);
  std::vector<std::uint8_t> scaled(width, 0);
  for (std::size_t c = 0; c < width; ++c) {
    if (table.column_kinds()[c] != ColumnKind::kNumeric) continue;
    const auto& name = table.feature_names()[c];
    auto it = std::find(params.names.begin(), params.names.end(), name);
    if (it == params.names.end()) throw DataError("scaler has no parameters for column '" + name + "'");
    const auto p = static_cast<std::size_t>(it - params.names.begin());
    mins[c] = params.mins[p];
    maxs[c] = params.maxs[p];
    scaled[c] = 1;
  }
  kernels::minmax_apply(table.mutable_values(), width, mins, maxs, scaled);
  return table;
}

WindowedDataset make_windows(const FeatureTable& table, std::size_t window,
                             std::vector<std::string>* warnings) {
  if (window < 1) throw UsageError("window size must be at least 1");
  WindowedDataset out(window, table.feature_names());
  const std::size_t n = table.row_count();
  const std::size_t width = table.width();
  std::size_t begin = 0;
  while (begin < n) {
    // Extend a run of rows for one tree with consecutive dates.
    std::size_t end = begin + 1;
    while (end < n && table.tree_ids()[end] == table.tree_ids()[begin] &&
           table.dates()[end] == table.dates()[end - 1] + 1) {
      ++end;
    }
    const std::size_t len = end - begin;
    if (len < window + 1) {
      if (warnings) {
        warnings->push_back("tree " + table.tree_ids()[begin] + " run starting " +
                            table.dates()[begin].to_string() + " has " + std::to_string(len) +
                            " days, fewer than window + 1; no examples");
      }
    } else {
      for (std::size_t t = begin + window; t < end; ++t) {
        std::span<const double> rows(table.values().data() + (t - window) * width, window * width);
        out.push_back(rows, table.labels()[t] != 0, table.tree_ids()[t], table.dates()[t]);
      }
    }
    begin = end;
  }
  return out;
}

TemporalSplit split_temporal(const WindowedDataset& dataset, ingest::YearRange train_years,
                             int val_year, const std::string& holdout_tree) {
  std::vector<std::size_t> train, val, holdout;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int year = dataset.target_date(i).year();
    if (dataset.tree_id(i) == holdout_tree) {
      holdout.push_back(i);
    } else if (year == val_year) {
      val.push_back(i);
    } else if (train_years.contains(year)) {
      train.push_back(i);
    }
  }
  if (holdout.empty()) throw DataError("holdout tree '" + holdout_tree + "' has no examples");
  TemporalSplit split{dataset.subset(train), dataset.subset(val), dataset.subset(holdout), {}};
  if (val.empty()) {
    split.warnings.push_back("validation year " + std::to_string(val_year) + " has no examples");
  }
  return split;
}

std::vector<std::size_t> select_rows(const FeatureTable& table, ingest::YearRange years,
                                     const std::string& excluded_tree) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    if (table.tree_ids()[r] != excluded_tree && years.contains(table.dates()[r].year())) {
      rows.push_back(r);
    }
  }
  return rows;
}

std::string write_feature_csv(const FeatureTable& table) {
  std::vector<std::string> header{"tree_id", "date"};
  header.insert(header.end(), table.feature_names().begin(), table.feature_names().end());
  header.push_back("label");
  std::string out = csv::join(header) + '\n';
  std::vector<std::string> fields;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    fields.assign({table.tree_ids()[r], table.dates()[r].to_string()});
    for (double v : table.row(r)) fields.push_back(csv::format_double(v));
    fields.push_back(table.labels()[r] ? "1" : "0");
    out += csv::join(fields) + '\n';
  }
  return out;
}

FeatureTable parse_feature_csv(std::string_view text, const FeatureManifest& manifest) {
  const auto parsed = csv::Table::parse(text);
  std::vector<std::string> expected{"tree_id", "date"};
  expected.insert(expected.end(), manifest.feature_names.begin(), manifest.feature_names.end());
  expected.push_back("label");
  parsed.expect_header(expected);

  FeatureTable table;
  table.set_columns(manifest.feature_names, manifest.column_kinds);
  std::vector<double> row(manifest.feature_names.size());
  for (const auto& r : parsed.rows()) {
    Date date;
    try {
      date = Date::parse(r.fields[1]);
    } catch (const DataError& e) {
      throw ParseError(r.line, "date", e.what());
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = csv::parse_double(r.fields[c + 2], r.line, manifest.feature_names[c]);
    }
    const std::string& label = r.fields.back();
    if (label != "0" && label != "1") throw ParseError(r.line, "label", "expected 0 or 1");
    std::string species;
    if (auto it = manifest.species_by_tree.find(r.fields[0]); it != manifest.species_by_tree.end()) {
      species = it->second;
    }
    table.add_row(r.fields[0], date, species, row, label == "1");
  }
  return table;
}

std::string write_manifest(const FeatureManifest& m) {
  json j;
  j["feature_names"] = m.feature_names;
  std::vector<std::string> kinds;
  for (auto k : m.column_kinds) kinds.push_back(to_string(k));
  j["column_kinds"] = kinds;
  j["scaler"] = {{"names", m.scaler.names}, {"min", m.scaler.mins}, {"max", m.scaler.maxs}};
  j["species"] = m.species.species;
  j["species_by_tree"] = m.species_by_tree;
  j["window"] = m.window;
  return j.dump(2) + "\n";
}

FeatureManifest parse_manifest(std::string_view text) {
  try {
    const json j = json::parse(text);
    FeatureManifest m;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& k : j.at("column_kinds")) m.column_kinds.push_back(parse_kind(k.get<std::string>()));
    m.scaler.names = j.at("scaler").at("names").get<std::vector<std::string>>();
    m.scaler.mins = j.at("scaler").at("min").get<std::vector<double>>();
    m.scaler.maxs = j.at("scaler").at("max").get<std::vector<double>>();
    m.species.species = j.at("species").get<std::vector<std::string>>();
    m.species_by_tree = j.at("species_by_tree").get<std::map<std::string, std::string>>();
    m.window = j.at("window").get<int>();
    if (m.column_kinds.size() != m.feature_names.size()) {
      throw DataError("manifest column_kinds and feature_names differ in length");
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed feature manifest: ") + e.what());
  }
}

}  // namespace leafcast::features
