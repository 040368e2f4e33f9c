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

#ifndef LEAFCAST_INGEST_HPP_
#define LEAFCAST_INGEST_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leafcast/date.hpp"

namespace leafcast::ingest {

// One ground-truth observation of a tree's autumn leaf-fall.
struct PhenoRecord {
  Date date;
  std::string tree_id;
  std::string species;
  std::optional<double> lfall_pct;  // percent of leaves fallen, [0, 100]

  bool operator==(const PhenoRecord&) const = default;
};

struct SiteCoordinate {
  std::string tree_id;
  double lat = 0.0;
  double lon = 0.0;
};

// One day of reanalysis weather; feature order follows Era5Table::feature_names.
struct Era5Record {
  Date date;
  std::vector<double> values;
};

struct Era5Table {
  std::vector<std::string> feature_names;
  std::vector<Era5Record> records;  // contiguous, ascending dates
};

// Selects a source column and names it in the output.
struct FeatureSelection {
  std::string source;
  std::string rename;  // empty keeps the source name
};

// Gap-free daily leaf-fall percentages for one tree, Jan 1 of the first year
// through Dec 31 of the last year.
struct DailyLeafSeries {
  std::string tree_id;
  std::string species;
  Date start_date;
  std::vector<double> values;
  std::vector<bool> labels;
  std::vector<int> years_without_observations;  // warning: filled with zeros

  Date date_at(std::size_t i) const { return start_date + static_cast<int>(i); }
  Date end_date() const { return start_date + static_cast<int>(values.size()) - 1; }

  bool operator==(const DailyLeafSeries& o) const {
    return tree_id == o.tree_id && species == o.species && start_date == o.start_date &&
           values == o.values && labels == o.labels;
  }
};

struct YearRange {
  int first = 0;
  int last = 0;

  bool contains(int year) const { return first <= year && year <= last; }
  int day_count() const;
};

struct CoordinateJoin {
  std::map<std::string, SiteCoordinate> located;
  std::vector<std::string> dropped;
};

// Header `date,tree_id,species,lfall`; empty lfall cells become std::nullopt.
std::vector<PhenoRecord> parse_pheno_csv(std::string_view text);
std::string write_pheno_csv(const std::vector<PhenoRecord>& records);

std::vector<PhenoRecord> filter_years(const std::vector<PhenoRecord>& records, int first_year,
                                      int last_year);

// Groups records by tree, preserving first-appearance order of tree ids.
std::map<std::string, std::vector<PhenoRecord>> group_by_tree(
    const std::vector<PhenoRecord>& records);

// Fills every day of `years`. Jan 1 - Aug 31 is zero. Autumn days are
// interpolated linearly between observations, starting from an implicit 0 on
// Aug 31 and holding the last observation through Dec 31. Observations outside
// Sep-Dec and missing values do not act as anchors.
DailyLeafSeries to_daily_series(const std::vector<PhenoRecord>& records, YearRange years);

// label[d] = 0 < value[d] < 100.
DailyLeafSeries derive_labels(DailyLeafSeries series);
bool is_leaf_fall_day(double lfall_pct);

std::vector<SiteCoordinate> parse_sites_csv(std::string_view text);
std::string write_sites_csv(const std::vector<SiteCoordinate>& sites);
CoordinateJoin attach_coordinates(const std::vector<std::string>& trees,
                                  const std::vector<SiteCoordinate>& sites);

// Header `date,<feature>,...`. Keeps only the selected columns, in selection
// order, and rejects missing days between the first and last date.
Era5Table parse_era5_csv(std::string_view text, const std::vector<FeatureSelection>& selected);
std::string write_era5_csv(const Era5Table& table);

// Header `tree_id,species,date,lfall,label`.
std::string write_daily_csv(const std::vector<DailyLeafSeries>& series);
std::vector<DailyLeafSeries> parse_daily_csv(std::string_view text);

}  // namespace leafcast::ingest

#endif  // LEAFCAST_INGEST_HPP_
