// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "frictionnet/model_io.hpp"
#include "frictionnet/network.hpp"
#include "frictionnet/replay.hpp"

namespace frictionnet::sim {

struct ScenarioSegment {
  double duration_s = 0.0;
  std::string pavement;       // R state label
  bool precipitation = false;
  double air_temp_c = 0.0;
  double speed_mps = 0.0;
};

struct Scenario {
  std::vector<ScenarioSegment> segments;
};

// JSON: {"segments": [{"duration_s", "pavement", "precipitation",
// "air_temp_c", "speed_mps"}, ...]}
Scenario load_scenario(const std::filesystem::path& path);

// Complete assignment drawn by sampling each node after its parents in
// topological order; clamped variables take their clamp instead of sampling
// (do-semantics: their CPT row is not consulted).
std::vector<int> ancestral_sample(const bn::Network& net, const bn::Evidence& clamped,
                                  std::mt19937_64& rng);
std::vector<int> ancestral_sample(const bn::Network& net, const bn::Evidence& clamped,
                                  std::uint64_t seed);

struct SimulatedDrive {
  std::vector<replay::SensorLogRecord> records;
  std::vector<replay::GroundTruthRecord> truth;
};

// Synthetic drive: per time step the roots are clamped from the active
// segment, everything else is freshly sampled (stress-test generator, no
// temporal model), and raw sensor values are rendered so they discretize
// back to the sampled classes. Deterministic per seed.
SimulatedDrive generate_drive(const bn::Network& net, const Scenario& scenario,
                              const ModelConfig& config, double sample_rate_hz,
                              std::uint64_t seed);

}  // namespace frictionnet::sim
