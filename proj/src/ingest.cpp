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

#include "leafcast/ingest.hpp"

#include <algorithm>
#include <set>

#include "leafcast/csv.hpp"
#include "leafcast/error.hpp"

namespace leafcast::ingest {
namespace {

Date parse_date_cell(const std::string& text, std::size_t line, const char* column) {
  try {
    return Date::parse(text);
  } catch (const DataError& e) {
    throw ParseError(line, column, e.what());
  }
}

bool in_autumn(Date d) { return d.month() >= 9; }

}  // namespace

int YearRange::day_count() const {
  int n = 0;
  for (int y = first; y <= last; ++y) n += days_in_year(y);
  return n;
}

std::vector<PhenoRecord> parse_pheno_csv(std::string_view text) {
  const auto table = csv::Table::parse(text);
  const std::size_t c_date = table.require("date");
  const std::size_t c_tree = table.require("tree_id");
  const std::size_t c_species = table.require("species");
  const std::size_t c_lfall = table.require("lfall");

  std::vector<PhenoRecord> out;
  out.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    PhenoRecord rec;
    rec.date = parse_date_cell(row.fields[c_date], row.line, "date");
    rec.tree_id = row.fields[c_tree];
    rec.species = row.fields[c_species];
    if (rec.tree_id.empty()) throw ParseError(row.line, "tree_id", "empty tree id");
    const std::string& cell = row.fields[c_lfall];
    if (!cell.empty() && cell != "NA") {
      const double v = csv::parse_double(cell, row.line, "lfall");
      if (!(v >= 0.0 && v <= 100.0)) {
        throw ParseError(row.line, "lfall", "value " + cell + " outside [0, 100]");
      }
      rec.lfall_pct = v;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string write_pheno_csv(const std::vector<PhenoRecord>& records) {
  std::string out = "date,tree_id,species,lfall\n";
  for (const auto& r : records) {
    out += csv::join({r.date.to_string(), r.tree_id, r.species,
                      r.lfall_pct ? csv::format_double(*r.lfall_pct) : std::string()});
    out += '\n';
  }
  return out;
}

std::vector<PhenoRecord> filter_years(const std::vector<PhenoRecord>& records, int first_year,
                                      int last_year) {
  std::vector<PhenoRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out), [&](const auto& r) {
    const int y = r.date.year();
    return first_year <= y && y <= last_year;
  });
  return out;
}

std::map<std::string, std::vector<PhenoRecord>> group_by_tree(
    const std::vector<PhenoRecord>& records) {
  std::map<std::string, std::vector<PhenoRecord>> out;
  for (const auto& r : records) out[r.tree_id].push_back(r);
  return out;
}

bool is_leaf_fall_day(double lfall_pct) { return lfall_pct > 0.0 && lfall_pct < 100.0; }

DailyLeafSeries derive_labels(DailyLeafSeries series) {
  series.labels.resize(series.values.size());
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    series.labels[i] = is_leaf_fall_day(series.values[i]);
  }
  return series;
}

DailyLeafSeries to_daily_series(const std::vector<PhenoRecord>& records, YearRange years) {
  if (years.first > years.last) throw DataError("year range is empty");
  DailyLeafSeries series;
  if (!records.empty()) {
    series.tree_id = records.front().tree_id;
    series.species = records.front().species;
  }

  std::map<Date, double> anchors;
  std::set<Date> seen;
  for (const auto& r : records) {
    if (r.tree_id != series.tree_id) {
      throw DataError("to_daily_series: mixed tree ids '" + series.tree_id + "' and '" +
                      r.tree_id + "'");
    }
    if (!seen.insert(r.date).second) {
      throw DataError("duplicate observation for tree " + r.tree_id + " on " +
                      r.date.to_string());
    }
    if (r.lfall_pct && in_autumn(r.date) && years.contains(r.date.year())) {
      anchors.emplace(r.date, *r.lfall_pct);
    }
  }

  series.start_date = Date::from_ymd(years.first, 1, 1);
  series.values.assign(static_cast<std::size_t>(years.day_count()), 0.0);

  for (int year = years.first; year <= years.last; ++year) {
    const Date aug31 = Date::from_ymd(year, 8, 31);
    const Date dec31 = Date::from_ymd(year, 12, 31);
    auto it = anchors.lower_bound(aug31 + 1);
    const auto stop = anchors.upper_bound(dec31);
    if (it == stop) {
      series.years_without_observations.push_back(year);
      continue;
    }
    Date prev_date = aug31;
    double prev_value = 0.0;
    auto index = [&](Date d) { return static_cast<std::size_t>(d - series.start_date); };
    for (; it != stop; ++it) {
      const auto [date, value] = *it;
      const double span = date - prev_date;
      for (Date d = prev_date + 1; d <= date; ++d) {
        const double t = (d - prev_date) / span;
        series.values[index(d)] = d == date ? value : prev_value + t * (value - prev_value);
      }
      prev_date = date;
      prev_value = value;
    }
    for (Date d = prev_date + 1; d <= dec31; ++d) series.values[index(d)] = prev_value;
  }
  for (double& v : series.values) v = std::clamp(v, 0.0, 100.0);
  return derive_labels(std::move(series));
}

std::vector<SiteCoordinate> parse_sites_csv(std::string_view text) {
  const auto table = csv::Table::parse(text);
  const std::size_t c_tree = table.require("tree_id");
  const std::size_t c_lat = table.require("lat");
  const std::size_t c_lon = table.require("lon");
  std::vector<SiteCoordinate> out;
  for (const auto& row : table.rows()) {
    SiteCoordinate s{row.fields[c_tree], csv::parse_double(row.fields[c_lat], row.line, "lat"),
                     csv::parse_double(row.fields[c_lon], row.line, "lon")};
    if (!(s.lat >= -90.0 && s.lat <= 90.0)) throw ParseError(row.line, "lat", "outside [-90, 90]");
    if (!(s.lon >= -180.0 && s.lon <= 180.0)) {
      throw ParseError(row.line, "lon", "outside [-180, 180]");
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string write_sites_csv(const std::vector<SiteCoordinate>& sites) {
  std::string out = "tree_id,lat,lon\n";
  for (const auto& s : sites) {
    out += csv::join({s.tree_id, csv::format_double(s.lat), csv::format_double(s.lon)}) + '\n';
  }
  return out;
}

CoordinateJoin attach_coordinates(const std::vector<std::string>& trees,
                                  const std::vector<SiteCoordinate>& sites) {
  std::map<std::string, SiteCoordinate> by_tree;
  for (const auto& s : sites) {
    if (!by_tree.emplace(s.tree_id, s).second) {
      throw DataError("site table lists tree " + s.tree_id + " more than once");
    }
  }
  CoordinateJoin join;
  for (const auto& tree : trees) {
    if (auto it = by_tree.find(tree); it != by_tree.end()) {
      join.located.emplace(tree, it->second);
    } else {
      join.dropped.push_back(tree);
    }
  }
  return join;
}

Era5Table parse_era5_csv(std::string_view text, const std::vector<FeatureSelection>& selected) {
  const auto table = csv::Table::parse(text);
  const std::size_t c_date = table.require("date");
  std::vector<std::size_t> columns;
  Era5Table out;
  for (const auto& sel : selected) {
    auto idx = table.find(sel.source);
    if (!idx) throw ParseError(1, sel.source, "selected weather feature not present in file");
    columns.push_back(*idx);
    out.feature_names.push_back(sel.rename.empty() ? sel.source : sel.rename);
  }
  for (const auto& row : table.rows()) {
    Era5Record rec;
    rec.date = parse_date_cell(row.fields[c_date], row.line, "date");
    if (!out.records.empty() && rec.date != out.records.back().date + 1) {
      throw ParseError(row.line, "date",
                       "weather dates not contiguous: " + out.records.back().date.to_string() +
                           " followed by " + rec.date.to_string());
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
      rec.values.push_back(
          csv::parse_double(row.fields[columns[i]], row.line, table.header()[columns[i]]));
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::string write_era5_csv(const Era5Table& table) {
  std::vector<std::string> header{"date"};
  header.insert(header.end(), table.feature_names.begin(), table.feature_names.end());
  std::string out = csv::join(header) + '\n';
  for (const auto& rec : table.records) {
    std::vector<std::string> fields{rec.date.to_string()};
    for (double v : rec.values) fields.push_back(csv::format_double(v));
    out += csv::join(fields) + '\n';
  }
  return out;
}

std::string write_daily_csv(const std::vector<DailyLeafSeries>& series) {
  std::string out = "tree_id,species,date,lfall,label\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      out += csv::join({s.tree_id, s.species, s.date_at(i).to_string(),
                        csv::format_double(s.values[i]), s.labels[i] ? "1" : "0"});
      out += '\n';
    }
  }
  return out;
}

std::vector<DailyLeafSeries> parse_daily_csv(std::string_view text) {
  const auto table = csv::Table::parse(text);
  table.expect_header({"tree_id", "species", "date", "lfall", "label"});
  std::vector<DailyLeafSeries> out;
  for (const auto& row : table.rows()) {
    const Date date = parse_date_cell(row.fields[2], row.line, "date");
    if (out.empty() || out.back().tree_id != row.fields[0]) {
      DailyLeafSeries s;
      s.tree_id = row.fields[0];
      s.species = row.fields[1];
      s.start_date = date;
      out.push_back(std::move(s));
    }
    auto& s = out.back();
    if (date != s.start_date + static_cast<int>(s.values.size())) {
      throw ParseError(row.line, "date", "daily series for " + s.tree_id + " is not contiguous");
    }
    const double v = csv::parse_double(row.fields[3], row.line, "lfall");
    const std::string& label = row.fields[4];
    if (label != "0" && label != "1") throw ParseError(row.line, "label", "expected 0 or 1");
    s.values.push_back(v);
    s.labels.push_back(label == "1");
  }
  return out;
}

}  // namespace leafcast::ingest
