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

#ifndef LEAFCAST_NN_CHECKPOINT_HPP_
#define LEAFCAST_NN_CHECKPOINT_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "leafcast/features.hpp"
#include "leafcast/nn/model.hpp"
#include "leafcast/nn/optim.hpp"

namespace leafcast::nn {

inline constexpr std::string_view kCheckpointMagic = "LEAFCAST-CKPT-1";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  features::FeatureManifest manifest;
  std::optional<OptimizerState> optimizer;
};

// JSON container: magic, format_version, config, feature_names, scaler (the
// feature manifest) and tensors as {name, shape, data} with row-major data.
std::string save_checkpoint(const Checkpoint& checkpoint);
// Throws DataError on a wrong magic string, version mismatch, truncation or
// inconsistent tensor shapes.
Checkpoint load_checkpoint(std::string_view bytes);

std::string config_to_json(const ModelConfig& config);
ModelConfig config_from_json(std::string_view text);

}  // namespace leafcast::nn

#endif  // LEAFCAST_NN_CHECKPOINT_HPP_
