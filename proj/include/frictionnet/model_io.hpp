// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "frictionnet/network.hpp"
#include "frictionnet/roadnet.hpp"

namespace frictionnet {

struct ModelConfig {
  std::optional<roadnet::CameraConfusionMatrix> camera;
  roadnet::WetnessBinning wetness;
  bool renormalize = true;
};

struct Model {
  bn::Network network;
  ModelConfig config;
  std::vector<roadnet::RenormWarning> warnings;  // emitted by the load-time pass
  std::vector<bn::Cpt> raw_cpts;                 // fractions, pre-renormalization
};

// Loads a network/model definition file (JSON). Keys: `units`
// ("percent"|"fraction"), `variables`, `cpts`, and the optional model
// sections `camera_confusion_matrix` (fractions), `wetness_thresholds`,
// `renormalize`. A variable named S_C with no CPT gets its table synthesized
// from the camera matrix.
Model load_model(const std::filesystem::path& path);

bn::Network load_network(const std::filesystem::path& path);

// Writes the model back out (units: fraction, shortest round-trip numbers).
// load(save(load(f))) yields a network identical to load(f).
void save_model(const Model& model, const std::filesystem::path& path);

}  // namespace frictionnet
