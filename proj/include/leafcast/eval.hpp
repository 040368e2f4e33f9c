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

#ifndef LEAFCAST_EVAL_HPP_
#define LEAFCAST_EVAL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leafcast/date.hpp"
#include "leafcast/ingest.hpp"
#include "leafcast/nn/train.hpp"

namespace leafcast::eval {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct AverageScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassificationReport {
  ClassScores no_leaf_fall;  // class 0
  ClassScores leaf_fall;     // class 1
  double accuracy = 0.0;
  AverageScores macro;
  AverageScores weighted;
  std::size_t total = 0;
  std::vector<std::string> warnings;  // zero-denominator cases
};

// Per-class precision, recall and F1 with 0 for zero denominators.
ClassificationReport classification_report(const std::vector<std::uint8_t>& y_true,
                                           const std::vector<std::uint8_t>& y_pred);
// Rows: no_leaf_fall, leaf_fall, accuracy, macro_avg, weighted_avg.
std::string write_classification_csv(const ClassificationReport& report);

struct PeriodSummary {
  int year = 0;
  Date start;
  Date end;

  bool operator==(const PeriodSummary&) const = default;
};

// First and last true day of every calendar year with at least one true day.
std::vector<PeriodSummary> extract_periods(const std::vector<Date>& dates,
                                           const std::vector<std::uint8_t>& labels);

struct YearDifference {
  int year = 0;
  PeriodSummary predicted;
  PeriodSummary actual;
  int start_diff = 0;  // |predicted - actual| in days
  int end_diff = 0;
};

struct RmseReport {
  std::vector<YearDifference> years;
  std::vector<int> excluded_years;  // present on only one side
  double rmse_start = 0.0;
  double rmse_end = 0.0;
  double rmse_overall = 0.0;
};

// Matches years present on both sides; throws DataError when none overlap.
RmseReport rmse_report(const std::vector<PeriodSummary>& predicted,
                       const std::vector<PeriodSummary>& actual);
// Pools several reports (e.g. one per tree) into one RMSE over every year.
RmseReport pool_reports(const std::vector<RmseReport>& reports);
double rmse(const std::vector<int>& differences);

struct LearningCurves {
  std::string csv;
  std::string accuracy_svg;
  std::string loss_svg;
};

LearningCurves export_learning_curves(const std::vector<nn::EpochMetrics>& metrics);

struct TrajectoryCurve {
  std::string species;
  std::vector<double> mean_lfall;  // index 0 is day 1; 365 days, Feb 29 folded into day 59
};

std::vector<TrajectoryCurve> trajectory_summary(const std::vector<ingest::DailyLeafSeries>& series);
// Header `species,day_of_year,mean_lfall`.
std::string write_trajectory_csv(const std::vector<TrajectoryCurve>& curves);
std::string trajectory_svg(const std::vector<TrajectoryCurve>& curves);

// 1..365 with Feb 29 mapped onto Feb 28 (day 59).
int folded_day_of_year(Date date);

// Header `tree_id,year,start,end`.
std::string write_truth_periods_csv(const std::map<std::string, std::vector<PeriodSummary>>& periods);
std::map<std::string, std::vector<PeriodSummary>> parse_truth_periods_csv(std::string_view text);

}  // namespace leafcast::eval

#endif  // LEAFCAST_EVAL_HPP_
