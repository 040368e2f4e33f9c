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

#include "leafcast/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "leafcast/csv.hpp"
#include "leafcast/error.hpp"
#include "leafcast/svg.hpp"

namespace leafcast::eval {
namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

}  // namespace

ClassificationReport classification_report(const std::vector<std::uint8_t>& y_true,
                                           const std::vector<std::uint8_t>& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw DataError("classification_report: label vectors differ in length");
  }
  if (y_true.empty()) throw DataError("classification_report: no examples");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] != 0, p = y_pred[i] != 0;
    tp += t && p;
    fp += !t && p;
    fn += t && !p;
    tn += !t && !p;
  }
  ClassificationReport r;
  r.total = y_true.size();
  auto scores = [&](std::size_t hit, std::size_t false_pos, std::size_t miss, const char* name) {
    ClassScores s;
    s.support = hit + miss;
    if (hit + false_pos == 0) r.warnings.push_back(std::string("precision of class ") + name + " undefined, set to 0");
    if (hit + miss == 0) r.warnings.push_back(std::string("recall of class ") + name + " undefined, set to 0");
    s.precision = safe_div(static_cast<double>(hit), static_cast<double>(hit + false_pos));
    s.recall = safe_div(static_cast<double>(hit), static_cast<double>(hit + miss));
    s.f1 = safe_div(2.0 * s.precision * s.recall, s.precision + s.recall);
    return s;
  };
  r.leaf_fall = scores(tp, fp, fn, "leaf_fall");
  r.no_leaf_fall = scores(tn, fn, fp, "no_leaf_fall");
  r.accuracy = static_cast<double>(tp + tn) / static_cast<double>(r.total);
  const ClassScores* cls[] = {&r.no_leaf_fall, &r.leaf_fall};
  for (const ClassScores* c : cls) {
    const double w = static_cast<double>(c->support) / static_cast<double>(r.total);
    r.macro.precision += c->precision / 2.0;
    r.macro.recall += c->recall / 2.0;
    r.macro.f1 += c->f1 / 2.0;
    r.weighted.precision += w * c->precision;
    r.weighted.recall += w * c->recall;
    r.weighted.f1 += w * c->f1;
  }
  return r;
}

std::string write_classification_csv(const ClassificationReport& r) {
  std::string out = "class,precision,recall,f1,support\n";
  auto row = [&](const std::string& name, double p, double rc, double f, std::size_t n) {
    out += csv::join({name, csv::format_double(p), csv::format_double(rc), csv::format_double(f),
                      std::to_string(n)}) + '\n';
  };
  row("no_leaf_fall", r.no_leaf_fall.precision, r.no_leaf_fall.recall, r.no_leaf_fall.f1, r.no_leaf_fall.support);
  row("leaf_fall", r.leaf_fall.precision, r.leaf_fall.recall, r.leaf_fall.f1, r.leaf_fall.support);
  out += "accuracy,,," + csv::format_double(r.accuracy) + "," + std::to_string(r.total) + "\n";
  row("macro_avg", r.macro.precision, r.macro.recall, r.macro.f1, r.total);
  row("weighted_avg", r.weighted.precision, r.weighted.recall, r.weighted.f1, r.total);
  return out;
}

std::vector<PeriodSummary> extract_periods(const std::vector<Date>& dates,
                                           const std::vector<std::uint8_t>& labels) {
  if (dates.size() != labels.size()) throw DataError("extract_periods: dates and labels differ in length");
  std::map<int, PeriodSummary> by_year;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (!labels[i]) continue;
    const int y = dates[i].year();
    auto [it, inserted] = by_year.try_emplace(y, PeriodSummary{y, dates[i], dates[i]});
    if (!inserted) {
      it->second.start = std::min(it->second.start, dates[i]);
      it->second.end = std::max(it->second.end, dates[i]);
    }
  }
  std::vector<PeriodSummary> out;
  for (auto& [_, p] : by_year) out.push_back(p);
  return out;
}

double rmse(const std::vector<int>& differences) {
  if (differences.empty()) return 0.0;
  double s = 0.0;
  for (int d : differences) s += static_cast<double>(d) * d;
  return std::sqrt(s / static_cast<double>(differences.size()));
}

namespace {

void finish(RmseReport& r) {
  std::vector<int> starts, ends, all;
  for (const auto& y : r.years) {
    starts.push_back(y.start_diff);
    ends.push_back(y.end_diff);
  }
  all = starts;
  all.insert(all.end(), ends.begin(), ends.end());
  r.rmse_start = rmse(starts);
  r.rmse_end = rmse(ends);
  r.rmse_overall = rmse(all);
}

}  // namespace

RmseReport rmse_report(const std::vector<PeriodSummary>& predicted,
                       const std::vector<PeriodSummary>& actual) {
  std::map<int, PeriodSummary> pred, act;
  for (const auto& p : predicted) pred[p.year] = p;
  for (const auto& a : actual) act[a.year] = a;
  RmseReport r;
  for (const auto& [year, p] : pred) {
    auto it = act.find(year);
    if (it == act.end()) {
      r.excluded_years.push_back(year);
      continue;
    }
    r.years.push_back({year, p, it->second, std::abs(p.start - it->second.start),
                       std::abs(p.end - it->second.end)});
  }
  for (const auto& [year, _] : act) {
    if (!pred.count(year)) r.excluded_years.push_back(year);
  }
  std::sort(r.excluded_years.begin(), r.excluded_years.end());
  if (r.years.empty()) throw DataError("rmse_report: predicted and actual periods share no year");
  finish(r);
  return r;
}

RmseReport pool_reports(const std::vector<RmseReport>& reports) {
  RmseReport pooled;
  for (const auto& r : reports) {
    pooled.years.insert(pooled.years.end(), r.years.begin(), r.years.end());
    pooled.excluded_years.insert(pooled.excluded_years.end(), r.excluded_years.begin(), r.excluded_years.end());
  }
  finish(pooled);
  return pooled;
}

LearningCurves export_learning_curves(const std::vector<nn::EpochMetrics>& metrics) {
  if (metrics.empty()) throw DataError("export_learning_curves: no epochs recorded");
  LearningCurves out;
  out.csv = nn::write_metrics_csv(metrics);
  std::vector<double> x, tl, ta, vl, va;
  for (const auto& m : metrics) {
    x.push_back(m.epoch);
    tl.push_back(m.train_loss);
    ta.push_back(m.train_accuracy);
    vl.push_back(m.val_loss);
    va.push_back(m.val_accuracy);
  }
  out.accuracy_svg = svg::line_chart("Accuracy per epoch", "epoch", "accuracy",
                                     {{"train", kPalette[0], x, ta}, {"validation", kPalette[1], x, va}});
  out.loss_svg = svg::line_chart("Loss per epoch", "epoch", "loss",
                                 {{"train", kPalette[0], x, tl}, {"validation", kPalette[1], x, vl}});
  return out;
}

int folded_day_of_year(Date date) {
  const int doy = date.day_of_year();
  if (is_leap_year(date.year()) && doy >= 60) return doy == 60 ? 59 : doy - 1;
  return doy;
}

std::vector<TrajectoryCurve> trajectory_summary(const std::vector<ingest::DailyLeafSeries>& series) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> acc;
  for (const auto& s : series) {
    auto& [sum, count] = acc[s.species];
    sum.resize(365, 0.0);
    count.resize(365, 0.0);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const auto d = static_cast<std::size_t>(folded_day_of_year(s.date_at(i)) - 1);
      sum[d] += s.values[i];
      count[d] += 1.0;
    }
  }
  std::vector<TrajectoryCurve> out;
  for (auto& [species, sc] : acc) {
    TrajectoryCurve c{species, std::vector<double>(365, 0.0)};
    for (std::size_t d = 0; d < 365; ++d) {
      c.mean_lfall[d] = sc.second[d] > 0 ? sc.first[d] / sc.second[d] : 0.0;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::string write_trajectory_csv(const std::vector<TrajectoryCurve>& curves) {
  std::string out = "species,day_of_year,mean_lfall\n";
  for (const auto& c : curves) {
    for (std::size_t d = 0; d < c.mean_lfall.size(); ++d) {
      out += csv::join({c.species, std::to_string(d + 1), csv::format_double(c.mean_lfall[d])}) + '\n';
    }
  }
  return out;
}

std::string trajectory_svg(const std::vector<TrajectoryCurve>& curves) {
  std::vector<svg::Series> series;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    std::vector<double> x(curves[k].mean_lfall.size());
    for (std::size_t d = 0; d < x.size(); ++d) x[d] = static_cast<double>(d + 1);
    series.push_back({curves[k].species, kPalette[k % std::size(kPalette)], x, curves[k].mean_lfall});
  }
  return svg::line_chart("Leaf-fall by species", "day of year", "mean leaf-fall (%)", series);
}

std::string write_truth_periods_csv(const std::map<std::string, std::vector<PeriodSummary>>& periods) {
  std::string out = "tree_id,year,start,end\n";
  for (const auto& [tree, list] : periods) {
    for (const auto& p : list) {
      out += csv::join({tree, std::to_string(p.year), p.start.to_string(), p.end.to_string()}) + '\n';
    }
  }
  return out;
}

std::map<std::string, std::vector<PeriodSummary>> parse_truth_periods_csv(std::string_view text) {
  const auto table = csv::Table::parse(text);
  table.expect_header({"tree_id", "year", "start", "end"});
  std::map<std::string, std::vector<PeriodSummary>> out;
  for (const auto& r : table.rows()) {
    PeriodSummary p;
    p.year = static_cast<int>(csv::parse_int(r.fields[1], r.line, "year"));
    try {
      p.start = Date::parse(r.fields[2]);
      p.end = Date::parse(r.fields[3]);
    } catch (const DataError& e) {
      throw ParseError(r.line, "start/end", e.what());
    }
    if (p.end < p.start) throw ParseError(r.line, "end", "period ends before it starts");
    out[r.fields[0]].push_back(p);
  }
  return out;
}

}  // namespace leafcast::eval
