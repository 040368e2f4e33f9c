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

#include "leafcast/nn/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include "leafcast/error.hpp"

namespace leafcast::nn {

using nlohmann::json;

namespace {

json config_json(const ModelConfig& c) {
  json layers = json::array();
  for (const auto& l : c.layers) {
    layers.push_back({{"units", l.units}, {"activation", to_string(l.activation)}, {"dropout", l.dropout_rate}});
  }
  return {{"layers", layers},          {"learning_rate", c.learning_rate},
          {"window_size", c.window_size}, {"feature_count", c.feature_count},
          {"epochs", c.epochs},        {"batch_size", c.batch_size},
          {"seed", c.seed},            {"threshold", c.threshold}};
}

ModelConfig config_from(const json& j) {
  ModelConfig c;
  for (const auto& l : j.at("layers")) {
    c.layers.push_back({l.at("units").get<int>(), parse_activation(l.at("activation").get<std::string>()),
                        l.at("dropout").get<double>()});
  }
  c.learning_rate = j.at("learning_rate").get<double>();
  c.window_size = j.at("window_size").get<int>();
  c.feature_count = j.at("feature_count").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.threshold = j.at("threshold").get<double>();
  return c;
}

template <typename T>
json tensor_json(const std::string& name, const T& t) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(t.size()));
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.cols(); ++c) data.push_back(t(r, c));
  }
  return {{"name", name}, {"shape", {t.rows(), t.cols()}}, {"data", data}};
}

json tensors_json(const Parameters& p) {
  json out = json::array();
  p.for_each_tensor([&](const std::string& name, const auto& t) { out.push_back(tensor_json(name, t)); });
  return out;
}

// Fills the tensors of `p` (already shaped) from `arr` by name and order.
void fill_tensors(Parameters& p, const json& arr) {
  std::size_t i = 0;
  p.for_each_tensor([&](const std::string& name, auto& t) {
    if (i >= arr.size()) throw DataError("checkpoint is missing tensor " + name);
    const json& e = arr.at(i++);
    if (e.at("name").get<std::string>() != name) {
      throw DataError("checkpoint tensor order mismatch at " + name);
    }
    const auto shape = e.at("shape").get<std::vector<long>>();
    const auto data = e.at("data").get<std::vector<double>>();
    if (shape.size() != 2 || shape[0] != t.rows() || shape[1] != t.cols() ||
        data.size() != static_cast<std::size_t>(t.size())) {
      throw DataError("checkpoint tensor " + name + " has an inconsistent shape");
    }
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = data[k++];
    }
  });
  if (i != arr.size()) throw DataError("checkpoint has unexpected extra tensors");
}

Parameters shaped_like(const ModelConfig& config) {
  Parameters p;
  int inputs = config.feature_count;
  for (const auto& l : config.layers) {
    p.layers.push_back({Eigen::MatrixXd(4 * l.units, inputs), Eigen::MatrixXd(4 * l.units, l.units),
                        Eigen::VectorXd(4 * l.units)});
    inputs = l.units;
  }
  p.head_w = Eigen::VectorXd(inputs);
  p.head_b = Eigen::VectorXd(1);
  return p;
}

}  // namespace

std::string config_to_json(const ModelConfig& config) { return config_json(config).dump(); }

ModelConfig config_from_json(std::string_view text) {
  try {
    return config_from(json::parse(text));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model config: ") + e.what());
  }
}

std::string save_checkpoint(const Checkpoint& ckpt) {
  json j;
  j["magic"] = kCheckpointMagic;
  j["format_version"] = kCheckpointVersion;
  j["config"] = config_json(ckpt.model.config);
  j["feature_names"] = ckpt.model.feature_names;
  j["scaler"] = json::parse(features::write_manifest(ckpt.manifest));
  j["tensors"] = tensors_json(ckpt.model.params);
  if (ckpt.optimizer) {
    const auto& o = *ckpt.optimizer;
    j["optimizer"] = {{"step", o.step},   {"beta1", o.beta1}, {"beta2", o.beta2},
                      {"epsilon", o.epsilon}, {"m", tensors_json(o.m)}, {"v", tensors_json(o.v)}};
  }
  return j.dump(1) + "\n";
}

Checkpoint load_checkpoint(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint is truncated or not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("magic", std::string()) != kCheckpointMagic) {
      throw DataError("not a leafcast checkpoint (magic string mismatch)");
    }
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw DataError("unsupported checkpoint format_version " + std::to_string(version));
    }
    Checkpoint ckpt;
    ckpt.model.config = config_from(j.at("config"));
    ckpt.model.config.validate();
    ckpt.model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    ckpt.manifest = features::parse_manifest(j.at("scaler").dump());
    ckpt.model.params = shaped_like(ckpt.model.config);
    fill_tensors(ckpt.model.params, j.at("tensors"));
    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      OptimizerState s;
      s.step = o.at("step").get<long>();
      s.beta1 = o.at("beta1").get<double>();
      s.beta2 = o.at("beta2").get<double>();
      s.epsilon = o.at("epsilon").get<double>();
      s.m = shaped_like(ckpt.model.config);
      s.v = shaped_like(ckpt.model.config);
      fill_tensors(s.m, o.at("m"));
      fill_tensors(s.v, o.at("v"));
      ckpt.optimizer = std::move(s);
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("checkpoint holds an invalid config: ") + e.what());
  }
}

}  // namespace leafcast::nn
