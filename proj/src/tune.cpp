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

#include "leafcast/tune.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leafcast/csv.hpp"
#include "leafcast/error.hpp"
#include "leafcast/nn/checkpoint.hpp"

namespace leafcast::tune {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename T>
const T& pick(const std::vector<T>& values, Rng& rng) {
  return values[rng.below(values.size())];
}

long ipow(long base, int exp) {
  long r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace

SearchSpace SearchSpace::leafcast_default() {
  SearchSpace s;
  for (int u = 32; u <= 512; u += 32) s.units.push_back(u);
  return s;
}

bool SearchSpace::contains(const nn::ModelConfig& c) const {
  const int n = static_cast<int>(c.layers.size());
  if (n < min_layers || n > max_layers) return false;
  auto has = [](const auto& set, const auto& v) { return std::find(set.begin(), set.end(), v) != set.end(); };
  if (!has(learning_rates, c.learning_rate)) return false;
  for (int k = 0; k < n; ++k) {
    const auto& l = c.layers[static_cast<std::size_t>(k)];
    if (!has(units, l.units) || !has(activations, l.activation)) return false;
    if (k == 0 ? !has(dropout_rates, l.dropout_rate) : l.dropout_rate != 0.0) return false;
  }
  return true;
}

TrialConfig sample_config(const SearchSpace& space, Rng& rng, const nn::ModelConfig& base,
                          int trial_id) {
  TrialConfig trial;
  trial.trial_id = trial_id;
  trial.config = base;
  const int span = space.max_layers - space.min_layers + 1;
  const int layers = space.min_layers + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));
  trial.config.layers.clear();
  for (int k = 0; k < layers; ++k) {
    nn::LayerSpec l;
    l.units = pick(space.units, rng);
    l.activation = pick(space.activations, rng);
    trial.config.layers.push_back(l);
  }
  trial.config.learning_rate = pick(space.learning_rates, rng);
  trial.config.layers.front().dropout_rate = pick(space.dropout_rates, rng);
  trial.config.seed = rng.next();
  return trial;
}

std::vector<BracketPlan> hyperband_schedule(int max_epochs, int eta) {
  if (max_epochs < 1) throw UsageError("hyperband: R must be at least 1");
  if (eta < 2) throw UsageError("hyperband: eta must be at least 2");
  int s_max = 0;
  while (ipow(eta, s_max + 1) <= max_epochs) ++s_max;

  std::vector<BracketPlan> plans;
  for (int s = s_max; s >= 0; --s) {
    // n = ceil((s_max + 1) * eta^s / (s + 1)), exact in integers.
    const long num = static_cast<long>(s_max + 1) * ipow(eta, s);
    const long n = (num + s) / (s + 1);
    const double r = static_cast<double>(max_epochs) / static_cast<double>(ipow(eta, s));
    BracketPlan plan;
    plan.bracket = s;
    for (int i = 0; i <= s; ++i) {
      Round round;
      round.configs = static_cast<int>(n / ipow(eta, i));
      round.resource = r * static_cast<double>(ipow(eta, i));
      round.epochs = std::max(1, static_cast<int>(std::lround(round.resource)));
      plan.rounds.push_back(round);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

TuneResult run_hyperband(const SearchSpace& space, TrialEvaluator& evaluator, int max_epochs,
                         int eta, std::uint64_t seed, const nn::ModelConfig& base, int jobs) {
  const auto plans = hyperband_schedule(max_epochs, eta);
  Rng rng(seed);
  TuneResult result;
  auto& report = result.report;
  std::map<int, TrialConfig> trials;
  std::map<int, double> final_loss;
  std::map<int, int> trained;
  int next_id = 0;

  for (const auto& plan : plans) {
    std::vector<int> alive;
    for (int k = 0; k < plan.rounds.front().configs; ++k) {
      TrialConfig t = sample_config(space, rng, base, next_id++);
      alive.push_back(t.trial_id);
      trials.emplace(t.trial_id, std::move(t));
    }
    for (std::size_t i = 0; i < plan.rounds.size(); ++i) {
      const Round& round = plan.rounds[i];
      std::vector<double> losses(alive.size(), kInf);
      const long count = static_cast<long>(alive.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs)) if (jobs > 1)
      for (long k = 0; k < count; ++k) {
        try {
          losses[static_cast<std::size_t>(k)] = evaluator.advance(trials.at(alive[k]), round.epochs);
        } catch (const NumericError&) {
          losses[static_cast<std::size_t>(k)] = kInf;
        }
        if (std::isnan(losses[static_cast<std::size_t>(k)])) losses[static_cast<std::size_t>(k)] = kInf;
      }

      std::vector<std::size_t> order(alive.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (losses[a] != losses[b]) return losses[a] < losses[b];
        return alive[a] < alive[b];
      });
      const bool last = i + 1 == plan.rounds.size();
      const std::size_t keep = last ? alive.size() : alive.size() / static_cast<std::size_t>(eta);

      std::vector<int> survivors;
      std::vector<TrialRecord> records;
      for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const std::size_t k = order[rank];
        const int id = alive[k];
        const bool eliminated = rank >= keep;
        report.total_epochs_trained += round.epochs - trained[id];
        trained[id] = round.epochs;
        final_loss[id] = losses[k];
        records.push_back({id, plan.bracket, static_cast<int>(i), round.epochs,
                           nn::config_to_json(trials.at(id).config), losses[k], eliminated});
        if (eliminated || last) {
          evaluator.release(trials.at(id), losses[k]);
        }
        if (!eliminated) survivors.push_back(id);
      }
      std::sort(records.begin(), records.end(),
                [](const TrialRecord& a, const TrialRecord& b) { return a.trial_id < b.trial_id; });
      report.records.insert(report.records.end(), records.begin(), records.end());
      std::sort(survivors.begin(), survivors.end());
      alive = std::move(survivors);
      if (alive.empty()) break;
    }
  }

  for (const auto& [id, loss] : final_loss) {
    if (report.best_trial_id < 0 || loss < report.best_val_loss) {
      report.best_trial_id = id;
      report.best_val_loss = loss;
    }
  }
  result.best = trials.at(report.best_trial_id);
  return result;
}

double LstmTrialEvaluator::advance(const TrialConfig& trial, int total_epochs) {
  nn::TrainingSession* session = nullptr;
  {
    std::lock_guard lock(mu_);
    auto& slot = sessions_[trial.trial_id];
    if (!slot) {
      slot = std::make_unique<nn::TrainingSession>(
          nn::start_session(trial.config, train_.feature_names()));
    }
    session = slot.get();
  }
  const int more = total_epochs - session->epochs_done;
  nn::train_epochs(*session, train_, val_, more);
  {
    std::lock_guard lock(mu_);
    epochs_trained_ += std::max(0, more);
  }
  if (session->history.empty()) return kInf;
  const auto& last = session->history.back();
  return val_.empty() ? last.train_loss : last.val_loss;
}

void LstmTrialEvaluator::release(const TrialConfig& trial, double final_loss) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(trial.trial_id);
  if (it == sessions_.end()) return;
  const bool better = !best_ || final_loss < best_loss_ ||
                      (final_loss == best_loss_ && trial.trial_id < best_id_);
  if (better && std::isfinite(final_loss)) {
    best_ = std::move(*it->second);
    best_loss_ = final_loss;
    best_id_ = trial.trial_id;
  }
  sessions_.erase(it);
}

TuneResult run_hyperband(const SearchSpace& space, const features::WindowedDataset& train,
                         const features::WindowedDataset& val, int max_epochs, int eta,
                         std::uint64_t seed, const nn::ModelConfig& base, int jobs) {
  if (train.empty()) throw DataError("hyperband: training set is empty");
  LstmTrialEvaluator evaluator(train, val);
  return run_hyperband(space, evaluator, max_epochs, eta, seed, base, jobs);
}

std::string write_report_csv(const TuneReport& report) {
  std::string out = "trial_id,bracket,round,epochs,config_json,val_loss,eliminated\n";
  for (const auto& r : report.records) {
    out += csv::join({std::to_string(r.trial_id), std::to_string(r.bracket), std::to_string(r.round),
                      std::to_string(r.epochs), r.config_json, csv::format_double(r.val_loss),
                      r.eliminated ? "1" : "0"});
    out += '\n';
  }
  return out;
}

}  // namespace leafcast::tune
