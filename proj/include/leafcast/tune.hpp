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

#ifndef LEAFCAST_TUNE_HPP_
#define LEAFCAST_TUNE_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "leafcast/features.hpp"
#include "leafcast/nn/model.hpp"
#include "leafcast/nn/train.hpp"
#include "leafcast/random.hpp"

namespace leafcast::tune {

struct SearchSpace {
  int min_layers = 1;
  int max_layers = 3;
  std::vector<int> units;  // 32, 64, ..., 512
  std::vector<nn::Activation> activations{nn::Activation::kRelu, nn::Activation::kTanh,
                                          nn::Activation::kSigmoid};
  std::vector<double> learning_rates{0.01, 0.001, 0.0001};
  std::vector<double> dropout_rates{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};

  static SearchSpace leafcast_default();
  bool contains(const nn::ModelConfig& config) const;
};

struct TrialConfig {
  int trial_id = 0;
  nn::ModelConfig config;  // config.seed is the trial's training seed
};

// Uniform draw per dimension; units and activation independently per layer,
// dropout on the first layer only. Non-searched fields come from `base`.
TrialConfig sample_config(const SearchSpace& space, Rng& rng, const nn::ModelConfig& base,
                          int trial_id = 0);

struct Round {
  int configs = 0;        // n_i
  double resource = 0.0;  // r_i, epochs before rounding
  int epochs = 0;         // cumulative epochs each config has trained after the round
};

struct BracketPlan {
  int bracket = 0;  // s
  std::vector<Round> rounds;
};

// Brackets s = s_max..0 with s_max = floor(log_eta R), B = (s_max + 1) R,
// n = ceil((B / R) eta^s / (s + 1)), r = R eta^-s; round i has
// n_i = floor(n eta^-i) configs at r_i = r eta^i.
std::vector<BracketPlan> hyperband_schedule(int max_epochs, int eta);

// Trains trials on demand. Implementations must allow advance() to run
// concurrently for distinct trial ids.
class TrialEvaluator {
 public:
  virtual ~TrialEvaluator() = default;
  // Continues the trial until it has trained `total_epochs`; returns the
  // validation loss. May throw NumericError.
  virtual double advance(const TrialConfig& trial, int total_epochs) = 0;
  // The trial will not be advanced again; `final_loss` is its last loss.
  virtual void release(const TrialConfig& trial, double final_loss) { (void)trial, (void)final_loss; }
};

struct TrialRecord {
  int trial_id = 0;
  int bracket = 0;
  int round = 0;
  int epochs = 0;
  std::string config_json;
  double val_loss = 0.0;
  bool eliminated = false;
};

struct TuneReport {
  std::vector<TrialRecord> records;  // bracket order, then round, then trial id
  int best_trial_id = -1;
  double best_val_loss = 0.0;
  long total_epochs_trained = 0;
};

struct TuneResult {
  TrialConfig best;
  TuneReport report;
};

// Successive halving inside every bracket; survivors resume from their
// previous epoch count. Ranking is by validation loss, ties to the lower trial
// id; a trial that throws NumericError scores +inf. The winner is the trial
// with the lowest final validation loss over all brackets.
TuneResult run_hyperband(const SearchSpace& space, TrialEvaluator& evaluator, int max_epochs,
                         int eta, std::uint64_t seed, const nn::ModelConfig& base, int jobs = 1);

// Evaluator backed by real LSTM training sessions. Keeps the model of the best
// released trial.
class LstmTrialEvaluator : public TrialEvaluator {
 public:
  LstmTrialEvaluator(const features::WindowedDataset& train, const features::WindowedDataset& val)
      : train_(train), val_(val) {}

  double advance(const TrialConfig& trial, int total_epochs) override;
  void release(const TrialConfig& trial, double final_loss) override;

  const std::optional<nn::TrainingSession>& best_session() const { return best_; }
  long epochs_trained() const { return epochs_trained_; }

 private:
  const features::WindowedDataset& train_;
  const features::WindowedDataset& val_;
  std::mutex mu_;
  std::map<int, std::unique_ptr<nn::TrainingSession>> sessions_;
  std::optional<nn::TrainingSession> best_;
  double best_loss_ = 0.0;
  int best_id_ = -1;
  long epochs_trained_ = 0;
};

TuneResult run_hyperband(const SearchSpace& space, const features::WindowedDataset& train,
                         const features::WindowedDataset& val, int max_epochs, int eta,
                         std::uint64_t seed, const nn::ModelConfig& base, int jobs = 1);

// Header `trial_id,bracket,round,epochs,config_json,val_loss,eliminated`.
std::string write_report_csv(const TuneReport& report);

}  // namespace leafcast::tune

#endif  // LEAFCAST_TUNE_HPP_
