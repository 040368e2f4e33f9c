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

#include "leafcast/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "leafcast/csv.hpp"
#include "leafcast/error.hpp"
#include "leafcast/eval.hpp"
#include "leafcast/nn/checkpoint.hpp"
#include "leafcast/nn/train.hpp"
#include "leafcast/synth.hpp"
#include "leafcast/tune.hpp"

namespace leafcast::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

fs::path RunConfig::pheno_path() const { return pheno.empty() ? data_dir() / "pheno.csv" : pheno; }
fs::path RunConfig::sites_path() const { return sites.empty() ? data_dir() / "sites.csv" : sites; }
fs::path RunConfig::era5_path() const { return era5.empty() ? data_dir() / "era5.csv" : era5; }
fs::path RunConfig::raster_path() const { return rasters.empty() ? data_dir() / "rasters" : rasters; }
fs::path RunConfig::truth_path() const { return truth.empty() ? data_dir() / "truth_periods.csv" : truth; }
fs::path RunConfig::checkpoint_path() const {
  return checkpoint.empty() ? out / "checkpoint.json" : checkpoint;
}

nn::ModelConfig RunConfig::model_config(int feature_count) const {
  nn::ModelConfig m = nn::ModelConfig::leafcast_default(feature_count);
  if (!layers.empty()) m.layers = layers;
  m.learning_rate = learning_rate;
  m.window_size = window;
  m.epochs = epochs;
  m.batch_size = batch_size;
  m.threshold = threshold;
  m.seed = seed;
  m.validate();
  return m;
}

namespace {

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

int get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw UsageError("config key '" + key + "' must be an integer");
  return v.get<int>();
}

std::vector<nn::LayerSpec>& ensure_layers(RunConfig& c, std::size_t n) {
  if (c.layers.empty()) c.layers = nn::ModelConfig::leafcast_default(1).layers;
  if (c.layers.size() != n) c.layers.resize(n);
  return c.layers;
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& json_value) {
  json v;
  try {
    v = json::parse(json_value);
  } catch (const json::exception&) {
    throw UsageError("config key '" + key + "': value is not valid JSON");
  }
  if (key == "paths.out") c.out = get_as<std::string>(v, key);
  else if (key == "paths.pheno") c.pheno = get_as<std::string>(v, key);
  else if (key == "paths.sites") c.sites = get_as<std::string>(v, key);
  else if (key == "paths.era5") c.era5 = get_as<std::string>(v, key);
  else if (key == "paths.rasters") c.rasters = get_as<std::string>(v, key);
  else if (key == "paths.truth") c.truth = get_as<std::string>(v, key);
  else if (key == "paths.checkpoint") c.checkpoint = get_as<std::string>(v, key);
  else if (key == "data.first_year") c.first_year = get_int(v, key);
  else if (key == "data.last_year") c.last_year = get_int(v, key);
  else if (key == "data.val_year") c.val_year = get_int(v, key);
  else if (key == "data.holdout_tree") c.holdout_tree = get_as<std::string>(v, key);
  else if (key == "features.indices") {
    c.indices.clear();
    for (const auto& name : get_as<std::vector<std::string>>(v, key)) {
      try {
        c.indices.push_back(raster::parse_index_kind(name));
      } catch (const Error& e) {
        throw UsageError("config key '" + key + "': " + e.what());
      }
    }
  } else if (key == "features.weather") {
    // "source" or "source:rename"
    c.weather.clear();
    for (const auto& item : get_as<std::vector<std::string>>(v, key)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) c.weather.push_back({item, {}});
      else c.weather.push_back({item.substr(0, colon), item.substr(colon + 1)});
    }
  } else if (key == "model.units") {
    const auto units = get_as<std::vector<int>>(v, key);
    auto& layers = ensure_layers(c, units.size());
    for (std::size_t i = 0; i < units.size(); ++i) layers[i].units = units[i];
  } else if (key == "model.activations") {
    const auto names = get_as<std::vector<std::string>>(v, key);
    auto& layers = ensure_layers(c, names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
      try {
        layers[i].activation = nn::parse_activation(names[i]);
      } catch (const Error& e) {
        throw UsageError("config key '" + key + "': " + e.what());
      }
    }
  } else if (key == "model.dropout") {
    const auto rates = get_as<std::vector<double>>(v, key);
    auto& layers = ensure_layers(c, rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) layers[i].dropout_rate = rates[i];
  } else if (key == "model.learning_rate") c.learning_rate = get_as<double>(v, key);
  else if (key == "model.window") c.window = get_int(v, key);
  else if (key == "model.epochs") c.epochs = get_int(v, key);
  else if (key == "model.batch_size") c.batch_size = get_int(v, key);
  else if (key == "model.threshold") c.threshold = get_as<double>(v, key);
  else if (key == "tune.max_epochs") c.tune_max_epochs = get_int(v, key);
  else if (key == "tune.eta") c.tune_eta = get_int(v, key);
  else if (key == "synth.trees") c.synth_trees = get_int(v, key);
  else if (key == "synth.first_year") c.synth_first_year = get_int(v, key);
  else if (key == "synth.last_year") c.synth_last_year = get_int(v, key);
  else if (key == "synth.steepness") c.synth_steepness = get_as<double>(v, key);
  else if (key == "synth.index_noise") c.synth_index_noise = get_as<double>(v, key);
  else if (key == "synth.cloud_probability") c.synth_cloud_probability = get_as<double>(v, key);
  else if (key == "synth.temperature_noise") c.synth_temperature_noise = get_as<double>(v, key);
  else if (key == "synth.tree_offset_sd") c.synth_tree_offset_sd = get_as<double>(v, key);
  else if (key == "seed") {
    if (!v.is_number_unsigned()) throw UsageError("config key 'seed' must be a non-negative integer");
    c.seed = v.get<std::uint64_t>();
  } else if (key == "jobs") c.jobs = get_int(v, key);
  else throw UsageError("unknown config key '" + key + "'");
}

RunConfig load_config(std::string_view text, RunConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config must be a JSON object of dotted keys");
  std::optional<std::size_t> layer_count;
  for (const char* key : {"model.units", "model.activations", "model.dropout"}) {
    if (!doc.contains(key) || !doc[key].is_array()) continue;
    if (layer_count && *layer_count != doc[key].size()) {
      throw UsageError("model.units, model.activations and model.dropout must have the same length");
    }
    layer_count = doc[key].size();
  }
  for (const auto& [key, value] : doc.items()) apply_setting(base, key, value.dump());
  return base;
}

std::string config_json(const RunConfig& c) {
  json j = json::object();
  j["paths.out"] = c.out.string();
  j["paths.pheno"] = c.pheno_path().string();
  j["paths.sites"] = c.sites_path().string();
  j["paths.era5"] = c.era5_path().string();
  j["paths.rasters"] = c.raster_path().string();
  j["paths.truth"] = c.truth_path().string();
  j["paths.checkpoint"] = c.checkpoint_path().string();
  j["data.first_year"] = c.first_year;
  j["data.last_year"] = c.last_year;
  j["data.val_year"] = c.val_year;
  j["data.holdout_tree"] = c.holdout_tree;
  json indices = json::array();
  for (auto k : c.indices) indices.push_back(raster::to_string(k));
  j["features.indices"] = indices;
  json weather = json::array();
  for (const auto& w : c.weather) weather.push_back(w.rename.empty() ? w.source : w.source + ":" + w.rename);
  j["features.weather"] = weather;
  const auto layers = c.layers.empty() ? nn::ModelConfig::leafcast_default(1).layers : c.layers;
  json units = json::array(), acts = json::array(), drops = json::array();
  for (const auto& l : layers) {
    units.push_back(l.units);
    acts.push_back(nn::to_string(l.activation));
    drops.push_back(l.dropout_rate);
  }
  j["model.units"] = units;
  j["model.activations"] = acts;
  j["model.dropout"] = drops;
  j["model.learning_rate"] = c.learning_rate;
  j["model.window"] = c.window;
  j["model.epochs"] = c.epochs;
  j["model.batch_size"] = c.batch_size;
  j["model.threshold"] = c.threshold;
  j["tune.max_epochs"] = c.tune_max_epochs;
  j["tune.eta"] = c.tune_eta;
  j["synth.trees"] = c.synth_trees;
  j["synth.first_year"] = c.synth_first_year;
  j["synth.last_year"] = c.synth_last_year;
  j["synth.steepness"] = c.synth_steepness;
  j["synth.index_noise"] = c.synth_index_noise;
  j["synth.cloud_probability"] = c.synth_cloud_probability;
  j["synth.temperature_noise"] = c.synth_temperature_noise;
  j["synth.tree_offset_sd"] = c.synth_tree_offset_sd;
  j["seed"] = c.seed;
  return j.dump();  // keys sorted by nlohmann's std::map
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw DataError("missing input: " + p.string());
}

// jobs is deliberately left out of the hash: it never changes results.
fs::path write_manifest(const RunConfig& config, const std::string& command,
                        const std::vector<fs::path>& outputs, const std::vector<std::string>& warnings) {
  const std::string cfg = config_json(config);
  json j;
  j["command"] = command;
  j["version"] = std::string(kVersion);
  j["seed"] = config.seed;
  j["config_hash"] = fnv1a_hex(cfg);
  j["config"] = json::parse(cfg);
  json files = json::array();
  for (const auto& p : outputs) files.push_back(p.filename().string());
  j["outputs"] = files;
  j["warnings"] = warnings;
  const fs::path path = config.out / (command + ".manifest.json");
  write_file(path, j.dump(2) + "\n");
  return path;
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

std::string last_tree(const std::vector<ingest::DailyLeafSeries>& leaf) {
  std::string best;
  for (const auto& s : leaf) best = std::max(best, s.tree_id);
  return best;
}

}  // namespace

Dataset prepare_dataset(const RunConfig& config, const features::FeatureManifest* manifest) {
  Dataset d;
  require_file(config.pheno_path());
  require_file(config.sites_path());
  require_file(config.era5_path());
  require_file(config.raster_path());

  const auto pheno = ingest::parse_pheno_csv(read_file(config.pheno_path()));
  if (pheno.empty()) throw DataError("no phenology records in " + config.pheno_path().string());
  int data_first = pheno.front().date.year(), data_last = data_first;
  for (const auto& r : pheno) {
    data_first = std::min(data_first, r.date.year());
    data_last = std::max(data_last, r.date.year());
  }
  d.years = {config.first_year ? config.first_year : data_first, config.last_year ? config.last_year : data_last};
  if (d.years.first > d.years.last || d.years.first < data_first || d.years.last > data_last) {
    throw DataError("year range " + std::to_string(d.years.first) + "-" + std::to_string(d.years.last) +
                    " is outside the phenology data (" + std::to_string(data_first) + "-" +
                    std::to_string(data_last) + ")");
  }
  d.val_year = config.val_year ? config.val_year : d.years.last;
  if (!d.years.contains(d.val_year) || d.val_year == d.years.first) {
    throw UsageError("validation year must lie inside the range and after its first year");
  }

  const auto in_range = ingest::filter_years(pheno, d.years.first, d.years.last);
  const auto sites = ingest::parse_sites_csv(read_file(config.sites_path()));
  std::vector<std::string> tree_ids;
  for (const auto& [tree, records] : ingest::group_by_tree(in_range)) tree_ids.push_back(tree);
  const auto joined = ingest::attach_coordinates(tree_ids, sites);
  for (const auto& t : joined.dropped) d.warnings.push_back("tree " + t + " has no coordinates; dropped");

  for (const auto& [tree, records] : ingest::group_by_tree(in_range)) {
    if (!joined.located.count(tree)) continue;
    auto series = ingest::derive_labels(ingest::to_daily_series(records, d.years));
    for (int y : series.years_without_observations) {
      d.warnings.push_back("tree " + tree + " has no autumn observations in " + std::to_string(y));
    }
    d.leaf.push_back(std::move(series));
  }
  if (d.leaf.empty()) throw DataError("no tree has both phenology records and coordinates");
  std::sort(d.leaf.begin(), d.leaf.end(), [](const auto& a, const auto& b) { return a.tree_id < b.tree_id; });

  d.holdout_tree = config.holdout_tree.empty() ? last_tree(d.leaf) : config.holdout_tree;
  if (std::none_of(d.leaf.begin(), d.leaf.end(), [&](const auto& s) { return s.tree_id == d.holdout_tree; })) {
    throw DataError("holdout tree " + d.holdout_tree + " not found");
  }

  const auto samples = raster::load_index_samples(config.raster_path(), config.indices, joined.located);
  std::map<std::string, std::map<raster::IndexKind, raster::IndexSeries>> indices;
  for (const auto& [tree, by_kind] : samples) {
    for (const auto& [kind, list] : by_kind) {
      indices[tree][kind] = raster::build_index_series(list, d.years, tree);
    }
  }
  const auto weather = ingest::parse_era5_csv(read_file(config.era5_path()), config.weather);

  d.raw = features::add_week_of_year(features::join_sources(d.leaf, indices, weather, config.indices));

  if (manifest) {
    d.manifest = *manifest;
  } else {
    const auto fit_rows = features::select_rows(d.raw, {d.years.first, d.val_year - 1}, d.holdout_tree);
    if (fit_rows.empty()) throw DataError("no training rows to fit the encoder and scaler on");
    d.manifest.species = features::fit_species(d.raw, fit_rows);
  }
  d.encoded = features::one_hot_species(d.raw, d.manifest.species, &d.warnings);
  if (!manifest) {
    const auto fit_rows = features::select_rows(d.encoded, {d.years.first, d.val_year - 1}, d.holdout_tree);
    d.manifest.scaler = features::fit_minmax(d.encoded, fit_rows);
    d.manifest.feature_names = d.encoded.feature_names();
    d.manifest.column_kinds = d.encoded.column_kinds();
    d.manifest.window = config.window;
  } else if (d.encoded.feature_names() != manifest->feature_names) {
    throw DataError("features built from the inputs do not match the checkpoint's feature list");
  }
  for (std::size_t r = 0; r < d.encoded.row_count(); ++r) {
    d.manifest.species_by_tree[d.encoded.tree_ids()[r]] = d.encoded.species()[r];
  }
  d.encoded = features::apply_minmax(std::move(d.encoded), d.manifest.scaler);

  d.windows = features::make_windows(d.encoded, static_cast<std::size_t>(d.manifest.window), &d.warnings);
  d.split = features::split_temporal(d.windows, {d.years.first, d.val_year - 1}, d.val_year, d.holdout_tree);
  d.warnings.insert(d.warnings.end(), d.split.warnings.begin(), d.split.warnings.end());
  return d;
}

std::vector<fs::path> cmd_synth(const RunConfig& config) {
  synth::SynthConfig sc;
  sc.seed = config.seed;
  sc.tree_count = config.synth_trees;
  sc.years = {config.synth_first_year, config.synth_last_year};
  sc.logistic_steepness = config.synth_steepness;
  sc.index_noise = config.synth_index_noise;
  sc.cloud_probability = config.synth_cloud_probability;
  sc.temperature_noise = config.synth_temperature_noise;
  sc.tree_threshold_sd = config.synth_tree_offset_sd;
  const auto data = synth::generate(sc);
  synth::write_dataset(data, config.data_dir());
  std::vector<fs::path> outputs{config.data_dir() / "pheno.csv", config.data_dir() / "sites.csv",
                                config.data_dir() / "era5.csv", config.data_dir() / "truth_periods.csv",
                                config.data_dir() / "rasters"};
  outputs.push_back(write_manifest(config, "synth", outputs, {}));
  return outputs;
}

std::vector<fs::path> cmd_ingest(const RunConfig& config) {
  const auto d = prepare_dataset(config);
  warn_all(d.warnings);
  std::vector<fs::path> outputs{config.out / "daily_series.csv", config.out / "features_raw.csv"};
  write_file(outputs[0], ingest::write_daily_csv(d.leaf));
  write_file(outputs[1], features::write_feature_csv(d.raw));
  outputs.push_back(write_manifest(config, "ingest", outputs, d.warnings));
  return outputs;
}

std::vector<fs::path> cmd_build_dataset(const RunConfig& config) {
  const auto d = prepare_dataset(config);
  warn_all(d.warnings);
  std::vector<fs::path> outputs{config.out / "features.csv", config.out / "features.manifest.json"};
  write_file(outputs[0], features::write_feature_csv(d.encoded));
  write_file(outputs[1], features::write_manifest(d.manifest));
  outputs.push_back(write_manifest(config, "build-dataset", outputs, d.warnings));
  return outputs;
}

namespace {

std::vector<fs::path> write_curves(const RunConfig& config, const std::vector<nn::EpochMetrics>& metrics,
                                   const std::string& prefix) {
  const auto curves = eval::export_learning_curves(metrics);
  std::vector<fs::path> outputs{config.out / (prefix + "metrics.csv"),
                                config.out / (prefix + "learning_curve_accuracy.svg"),
                                config.out / (prefix + "learning_curve_loss.svg")};
  write_file(outputs[0], curves.csv);
  write_file(outputs[1], curves.accuracy_svg);
  write_file(outputs[2], curves.loss_svg);
  return outputs;
}

nn::Checkpoint load_checkpoint_file(const fs::path& path) {
  require_file(path);
  return nn::load_checkpoint(read_file(path));
}

}  // namespace

std::vector<fs::path> cmd_train(const RunConfig& config) {
  const auto d = prepare_dataset(config);
  warn_all(d.warnings);
  if (d.split.train.empty()) throw DataError("training set is empty");
  const auto model_config = config.model_config(static_cast<int>(d.manifest.feature_names.size()));
  auto session = nn::start_session(model_config, d.manifest.feature_names);
  nn::train_epochs(session, d.split.train, d.split.val, model_config.epochs);

  nn::Checkpoint ckpt{session.model, d.manifest, session.optimizer};
  std::vector<fs::path> outputs{config.checkpoint_path()};
  write_file(outputs[0], nn::save_checkpoint(ckpt));
  for (auto& p : write_curves(config, session.history, "")) outputs.push_back(p);
  outputs.push_back(write_manifest(config, "train", outputs, d.warnings));
  return outputs;
}

std::vector<fs::path> cmd_tune(const RunConfig& config) {
  const auto d = prepare_dataset(config);
  warn_all(d.warnings);
  if (d.split.train.empty()) throw DataError("training set is empty");
  const auto base = config.model_config(static_cast<int>(d.manifest.feature_names.size()));
  tune::LstmTrialEvaluator evaluator(d.split.train, d.split.val);
  const auto result = tune::run_hyperband(tune::SearchSpace::leafcast_default(), evaluator,
                                          config.tune_max_epochs, config.tune_eta, config.seed, base,
                                          config.jobs);
  std::vector<fs::path> outputs{config.out / "tune_report.csv", config.out / "best_checkpoint.json"};
  write_file(outputs[0], tune::write_report_csv(result.report));
  const auto& best = evaluator.best_session();
  if (!best) throw NumericError("no trial finished with a finite loss");
  write_file(outputs[1], nn::save_checkpoint({best->model, d.manifest, best->optimizer}));
  for (auto& p : write_curves(config, best->history, "best_")) outputs.push_back(p);
  outputs.push_back(write_manifest(config, "tune", outputs, d.warnings));
  return outputs;
}

namespace {

struct TreePredictions {
  std::string tree_id;
  std::vector<Date> dates;
  std::vector<std::uint8_t> truth;
  std::vector<std::uint8_t> predicted;
  std::vector<double> probability;
};

std::vector<TreePredictions> predict_by_tree(const nn::Model& model, const features::WindowedDataset& windows) {
  const auto predictions = nn::predict(model, windows, model.config.threshold);
  std::map<std::string, TreePredictions> by_tree;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    auto& t = by_tree[windows.tree_id(i)];
    t.tree_id = windows.tree_id(i);
    t.dates.push_back(windows.target_date(i));
    t.truth.push_back(windows.label(i));
    t.predicted.push_back(predictions[i].label);
    t.probability.push_back(predictions[i].probability);
  }
  std::vector<TreePredictions> out;
  for (auto& [tree, t] : by_tree) out.push_back(std::move(t));
  return out;
}

std::vector<eval::PeriodSummary> label_periods(const ingest::DailyLeafSeries& s) {
  std::vector<Date> dates;
  std::vector<std::uint8_t> labels;
  for (std::size_t i = 0; i < s.labels.size(); ++i) {
    dates.push_back(s.start_date + static_cast<int>(i));
    labels.push_back(s.labels[i]);
  }
  return eval::extract_periods(dates, labels);
}

std::string period_rows(const std::string& tree, const eval::RmseReport& report) {
  std::string out;
  for (const auto& y : report.years) {
    out += csv::join({tree, std::to_string(y.year), y.predicted.start.to_string(), y.predicted.end.to_string(),
                      y.actual.start.to_string(), y.actual.end.to_string(), std::to_string(y.start_diff),
                      std::to_string(y.end_diff)});
    out += '\n';
  }
  return out;
}

std::string rmse_row(const std::string& scope, const eval::RmseReport& r) {
  return csv::join({scope, std::to_string(r.years.size()), csv::format_double(r.rmse_start),
                    csv::format_double(r.rmse_end), csv::format_double(r.rmse_overall)}) +
         "\n";
}

constexpr std::string_view kRmseHeader = "scope,years,rmse_start,rmse_end,rmse_overall\n";
constexpr std::string_view kPeriodHeader =
    "tree_id,year,pred_start,pred_end,actual_start,actual_end,start_diff_days,end_diff_days\n";

}  // namespace

std::vector<fs::path> cmd_evaluate(const RunConfig& config) {
  const auto ckpt = load_checkpoint_file(config.checkpoint_path());
  const auto d = prepare_dataset(config, &ckpt.manifest);
  warn_all(d.warnings);
  const auto trees = predict_by_tree(ckpt.model, d.windows);

  std::map<std::string, std::vector<eval::PeriodSummary>> truth;
  const bool have_truth = fs::exists(config.truth_path());
  if (have_truth) truth = eval::parse_truth_periods_csv(read_file(config.truth_path()));

  std::vector<std::string> warnings = d.warnings;
  std::string periods(kPeriodHeader), periods_truth(kPeriodHeader);
  std::string rmse_csv(kRmseHeader), rmse_truth_csv(kRmseHeader);
  std::vector<eval::RmseReport> all, all_truth;
  std::optional<eval::ClassificationReport> report;
  for (const auto& t : trees) {
    const auto predicted = eval::extract_periods(t.dates, t.predicted);
    const auto& series = *std::find_if(d.leaf.begin(), d.leaf.end(), [&](const auto& s) { return s.tree_id == t.tree_id; });
    const bool holdout = t.tree_id == d.holdout_tree;
    if (holdout) report = eval::classification_report(t.truth, t.predicted);
    try {
      const auto r = eval::rmse_report(predicted, label_periods(series));
      all.push_back(r);
      if (holdout) {
        periods += period_rows(t.tree_id, r);
        rmse_csv += rmse_row("holdout:" + t.tree_id, r);
      }
    } catch (const DataError& e) {
      warnings.push_back("tree " + t.tree_id + ": " + e.what());
    }
    if (have_truth && truth.count(t.tree_id)) {
      std::vector<eval::PeriodSummary> actual;
      for (const auto& p : truth.at(t.tree_id)) {
        if (d.years.contains(p.year)) actual.push_back(p);
      }
      try {
        const auto r = eval::rmse_report(predicted, actual);
        all_truth.push_back(r);
        if (holdout) {
          periods_truth += period_rows(t.tree_id, r);
          rmse_truth_csv += rmse_row("holdout:" + t.tree_id, r);
        }
      } catch (const DataError& e) {
        warnings.push_back("tree " + t.tree_id + " against truth: " + e.what());
      }
    }
  }
  if (!report) throw DataError("no examples for holdout tree " + d.holdout_tree);
  warnings.insert(warnings.end(), report->warnings.begin(), report->warnings.end());
  if (!all.empty()) rmse_csv += rmse_row("all_trees", eval::pool_reports(all));

  std::vector<fs::path> outputs{config.out / "classification_report.csv", config.out / "periods.csv",
                                config.out / "rmse.csv", config.out / "trajectory.csv",
                                config.out / "trajectory.svg"};
  write_file(outputs[0], eval::write_classification_csv(*report));
  write_file(outputs[1], periods);
  write_file(outputs[2], rmse_csv);
  const auto curves = eval::trajectory_summary(d.leaf);
  write_file(outputs[3], eval::write_trajectory_csv(curves));
  write_file(outputs[4], eval::trajectory_svg(curves));
  if (have_truth) {
    if (!all_truth.empty()) rmse_truth_csv += rmse_row("all_trees", eval::pool_reports(all_truth));
    outputs.push_back(config.out / "periods_truth.csv");
    write_file(outputs.back(), periods_truth);
    outputs.push_back(config.out / "rmse_truth.csv");
    write_file(outputs.back(), rmse_truth_csv);
  }
  warn_all({warnings.begin() + static_cast<std::ptrdiff_t>(d.warnings.size()), warnings.end()});
  outputs.push_back(write_manifest(config, "evaluate", outputs, warnings));
  return outputs;
}

std::vector<fs::path> cmd_predict(const RunConfig& config) {
  const auto ckpt = load_checkpoint_file(config.checkpoint_path());
  const auto d = prepare_dataset(config, &ckpt.manifest);
  warn_all(d.warnings);
  std::string out = "tree_id,date,probability,label\n";
  for (const auto& t : predict_by_tree(ckpt.model, d.windows)) {
    for (std::size_t i = 0; i < t.dates.size(); ++i) {
      out += csv::join({t.tree_id, t.dates[i].to_string(), csv::format_double(t.probability[i]),
                        t.predicted[i] ? "1" : "0"});
      out += '\n';
    }
  }
  std::vector<fs::path> outputs{config.out / "predictions.csv"};
  write_file(outputs[0], out);
  outputs.push_back(write_manifest(config, "predict", outputs, d.warnings));
  return outputs;
}

}  // namespace leafcast::pipeline
