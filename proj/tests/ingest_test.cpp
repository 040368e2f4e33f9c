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

#include "leafcast/error.hpp"
#include "leafcast/ingest.hpp"
#include "oracles.hpp"

namespace leafcast::ingest {
namespace {

Date D(int y, int m, int d) { return Date::from_ymd(y, m, d); }

PhenoRecord obs(Date d, double v) { return {d, "T1", "ACRU", v}; }

std::size_t at(const DailyLeafSeries& s, Date d) { return static_cast<std::size_t>(d - s.start_date); }

TEST(ParsePheno, ReadsRows) {
  const auto r = parse_pheno_csv("date,tree_id,species,lfall\n2015-09-17,T1,ACRU,5.0\n2015-09-24,T1,ACRU,40.0\n");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].date, D(2015, 9, 17));
  EXPECT_EQ(r[0].tree_id, "T1");
  EXPECT_EQ(r[0].species, "ACRU");
  EXPECT_EQ(r[0].lfall_pct, 5.0);
  EXPECT_EQ(r[1].lfall_pct, 40.0);
}

TEST(ParsePheno, EmptyCellIsMissing) {
  const auto r = parse_pheno_csv("date,tree_id,species,lfall\n2015-09-17,T1,ACRU,\n2015-09-18,T1,ACRU,NA\n");
  EXPECT_FALSE(r[0].lfall_pct.has_value());
  EXPECT_FALSE(r[1].lfall_pct.has_value());
}

TEST(ParsePheno, OutOfRangeNamesRowAndColumn) {
  try {
    parse_pheno_csv("date,tree_id,species,lfall\n2015-09-17,T1,ACRU,105\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), "lfall");
  }
}

TEST(ParsePheno, RoundTrips) {
  const std::vector<PhenoRecord> in{obs(D(2015, 9, 3), 12.5), {D(2015, 9, 10), "T1", "ACRU", std::nullopt}};
  EXPECT_EQ(parse_pheno_csv(write_pheno_csv(in)), in);
}

TEST(FilterYears, DropsOutsideRange) {
  const auto out = filter_years({obs(D(2014, 11, 1), 1), obs(D(2015, 9, 1), 2)}, 2015, 2022);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].date, D(2015, 9, 1));
  EXPECT_TRUE(filter_years({}, 2015, 2022).empty());
  EXPECT_TRUE(filter_years({obs(D(2016, 9, 1), 2)}, 2015, 2015).empty());
}

TEST(DailySeries, MidpointOfLinearInterpolation) {
  const auto s = to_daily_series({obs(D(2015, 9, 1), 0), obs(D(2015, 9, 11), 100)}, {2015, 2015});
  EXPECT_EQ(s.values[at(s, D(2015, 9, 6))], 50.0);
}

TEST(DailySeries, YearWithoutObservationsIsZero) {
  const auto s = to_daily_series({obs(D(2015, 10, 1), 30)}, {2015, 2016});
  ASSERT_EQ(s.values.size(), 365u + 366u);
  for (Date d = D(2016, 1, 1); d <= D(2016, 12, 31); ++d) EXPECT_EQ(s.values[at(s, d)], 0.0);
  EXPECT_EQ(s.years_without_observations, std::vector<int>{2016});
}

TEST(DailySeries, HoldsAfterLastObservation) {
  const auto s = to_daily_series({obs(D(2015, 10, 20), 50), obs(D(2015, 11, 3), 100)}, {2015, 2015});
  for (Date d = D(2015, 11, 4); d <= D(2015, 12, 31); ++d) EXPECT_EQ(s.values[at(s, d)], 100.0);
}

TEST(DailySeries, RejectsDuplicatesAndMixedTrees) {
  EXPECT_THROW(to_daily_series({obs(D(2015, 9, 3), 1), obs(D(2015, 9, 3), 2)}, {2015, 2015}), DataError);
  PhenoRecord other = obs(D(2015, 9, 4), 1);
  other.tree_id = "T2";
  EXPECT_THROW(to_daily_series({obs(D(2015, 9, 3), 1), other}, {2015, 2015}), DataError);
}

TEST(DailySeries, MatchesBruteForceOnRandomFixtures) {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int first = 2012 + static_cast<int>(rng.below(6));
    const YearRange years{first, first + static_cast<int>(rng.below(4))};
    const auto records = testing::random_pheno(rng, years, trial % 2 == 0);
    const auto s = to_daily_series(records, years);
    ASSERT_EQ(s.values, testing::brute_force_daily(records, years)) << "trial " << trial;
  }
}

TEST(DailySeries, Invariants) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const YearRange years{2015, 2017};
    const auto records = testing::random_pheno(rng, years, true);
    const auto s = to_daily_series(records, years);
    ASSERT_EQ(s.values.size(), static_cast<std::size_t>(365 + 366 + 365));
    ASSERT_EQ(s.labels.size(), s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const Date d = s.start_date + static_cast<int>(i);
      if (d.month() < 9) {
        ASSERT_EQ(s.values[i], 0.0);
        ASSERT_FALSE(s.labels[i]);
      }
    }
    // Exact on observation dates; monotone inputs stay between neighbours.
    for (const auto& r : records) {
      if (!r.lfall_pct || r.date.month() < 9) continue;
      ASSERT_EQ(s.values[at(s, r.date)], *r.lfall_pct);
    }
    for (int y = 2015; y <= 2017; ++y) {
      for (Date d = D(y, 9, 2); d <= D(y, 12, 31); ++d) ASSERT_GE(s.values[at(s, d)], s.values[at(s, d - 1)]);
    }
    EXPECT_EQ(derive_labels(s).labels, s.labels);
  }
}

TEST(Labels, StrictInequalities) {
  DailyLeafSeries s;
  s.values = {0, 0, 50, 100};
  EXPECT_EQ(derive_labels(s).labels, (std::vector<bool>{false, false, true, false}));
  s.values = {0, 0.1, 99.9, 100};
  EXPECT_EQ(derive_labels(s).labels, (std::vector<bool>{false, true, true, false}));
  s.values.assign(365, 0.0);
  const auto all_zero = derive_labels(s).labels;
  EXPECT_TRUE(std::none_of(all_zero.begin(), all_zero.end(), [](bool b) { return b; }));
}

TEST(Coordinates, JoinAndDrop) {
  const auto j = attach_coordinates({"T1", "T2"}, {{"T1", 42.53, -72.19}});
  EXPECT_EQ(j.located.size(), 1u);
  EXPECT_EQ(j.located.at("T1").lat, 42.53);
  EXPECT_EQ(j.dropped, std::vector<std::string>{"T2"});
  EXPECT_EQ(attach_coordinates({"T1", "T2"}, {}).dropped.size(), 2u);
  EXPECT_THROW(attach_coordinates({"T1"}, {{"T1", 1, 1}, {"T1", 2, 2}}), DataError);
}

TEST(Era5, SelectsColumns) {
  const std::string text =
      "date,temperature_2m,total_precipitation\n2015-01-01,270,0.1\n2015-01-02,271,0\n2015-01-03,272,0.2\n";
  const auto t = parse_era5_csv(text, {{"temperature_2m", "temperature"}});
  ASSERT_EQ(t.records.size(), 3u);
  EXPECT_EQ(t.feature_names, std::vector<std::string>{"temperature"});
  EXPECT_EQ(t.records[2].values, std::vector<double>{272});
}

TEST(Era5, MissingColumnIsNamed) {
  try {
    parse_era5_csv("date,temperature_2m\n2015-01-01,270\n", {{"surface_pressure", {}}});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("surface_pressure"), std::string::npos);
  }
}

TEST(Era5, GapIsAnError) {
  EXPECT_THROW(parse_era5_csv("date,t\n2015-01-01,1\n2015-01-03,2\n2015-01-04,3\n", {{"t", {}}}), DataError);
}

TEST(DailyCsv, RoundTrips) {
  Rng rng(5);
  std::vector<DailyLeafSeries> all;
  for (int k = 0; k < 3; ++k) {
    auto s = to_daily_series(testing::random_pheno(rng, {2015, 2016}, k != 1), {2015, 2016});
    s.tree_id = "T" + std::to_string(k);
    s.species = k ? "QURU" : "ACRU";
    s.years_without_observations.clear();
    all.push_back(s);
  }
  auto back = parse_daily_csv(write_daily_csv(all));
  ASSERT_EQ(back.size(), all.size());
  for (std::size_t k = 0; k < all.size(); ++k) {
    EXPECT_EQ(back[k].tree_id, all[k].tree_id);
    EXPECT_EQ(back[k].species, all[k].species);
    EXPECT_EQ(back[k].start_date, all[k].start_date);
    EXPECT_EQ(back[k].values, all[k].values);
    EXPECT_EQ(back[k].labels, all[k].labels);
  }
}

}  // namespace
}  // namespace leafcast::ingest
