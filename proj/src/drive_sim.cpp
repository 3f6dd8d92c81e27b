// SPDX-License-Identifier: Apache-2.0
#include "frictionnet/drive_sim.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace frictionnet::sim {

namespace {

// Fixed excitation channels: sensitivities 0.75 / 0.375 keep the observer
// gate open at the default 0.1 threshold.
constexpr double kTireLoadN = 4000.0;
constexpr double kDfxPerMu = 3000.0;
constexpr double kDfyPerMu = 1500.0;

int sample_state(std::span<const double> row, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t s = 0; s < row.size(); ++s) {
    if (row[s] <= 0.0) continue;
    last_positive = static_cast<int>(s);
    acc += row[s];
    if (u < acc) return static_cast<int>(s);
  }
  return last_positive;  // guard against rounding at the top end
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
    Scenario scenario;
    for (const auto& js : doc.at("segments")) {
      ScenarioSegment seg;
      seg.duration_s = js.at("duration_s").get<double>();
      seg.pavement = js.at("pavement").get<std::string>();
      seg.precipitation = js.at("precipitation").get<bool>();
      seg.air_temp_c = js.at("air_temp_c").get<double>();
      seg.speed_mps = js.at("speed_mps").get<double>();
      scenario.segments.push_back(std::move(seg));
    }
    if (scenario.segments.empty())
      throw Error(ErrorCode::invalid_argument, "scenario needs at least one segment");
    for (const auto& seg : scenario.segments) {
      if (!(seg.duration_s > 0.0))
        throw Error(ErrorCode::invalid_argument, "segment durations must be > 0");
      if (!(seg.speed_mps >= 0.0))
        throw Error(ErrorCode::invalid_argument, "segment speeds must be >= 0");
      if (!std::isfinite(seg.air_temp_c))
        throw Error(ErrorCode::non_finite_input, "segment air temperature");
    }
    return scenario;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
}

std::vector<int> ancestral_sample(const bn::Network& net, const bn::Evidence& clamped,
                                  std::mt19937_64& rng) {
  std::vector<int> assignment(static_cast<std::size_t>(net.size()), -1);
  std::vector<int> clamp(static_cast<std::size_t>(net.size()), -1);
  for (const auto& [name, state] : clamped) {
    const int v = net.find(name);
    if (v < 0) throw Error(ErrorCode::invalid_clamp, name + " is not a network variable");
    if (state < 0 || state >= net.variable(v).cardinality())
      throw Error(ErrorCode::invalid_clamp, "clamp state for " + name);
    clamp[static_cast<std::size_t>(v)] = state;
  }
  for (int v : net.topological_order()) {
    const int c = clamp[static_cast<std::size_t>(v)];
    assignment[static_cast<std::size_t>(v)] =
        c >= 0 ? c : sample_state(net.cpt_row_for(v, assignment), rng);
  }
  return assignment;
}

std::vector<int> ancestral_sample(const bn::Network& net, const bn::Evidence& clamped,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return ancestral_sample(net, clamped, rng);
}

SimulatedDrive generate_drive(const bn::Network& net, const Scenario& scenario,
                              const ModelConfig& config, double sample_rate_hz,
                              std::uint64_t seed) {
  if (!(sample_rate_hz > 0.0))
    throw Error(ErrorCode::invalid_argument, "sample rate must be > 0");
  if (scenario.segments.empty())
    throw Error(ErrorCode::invalid_argument, "scenario needs at least one segment");
  config.wetness.validate();

  const int r_var = net.index_of(roadnet::node::pavement);
  const int w_var = net.index_of(roadnet::node::weather);
  const int mu_var = net.index_of(roadnet::node::friction);
  const int cam_var = net.index_of(roadnet::node::camera);
  const int rcs1_var = net.index_of(roadnet::node::rcs1);
  const int rcs2_var = net.index_of(roadnet::node::rcs2);
  const int fo_var = net.index_of(roadnet::node::observer);

  std::mt19937_64 rng(seed);
  SimulatedDrive drive;

  auto rcs_raw_for_class = [&](int cls) -> std::uint32_t {
    const auto& w = config.wetness;
    std::uint32_t lo = 0, hi = w.low;
    if (cls == 2) {
      lo = w.low + 1;
      hi = w.high;
    } else if (cls == 3) {
      lo = w.high + 1;
      hi = 65535;
    }
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
  };

  std::size_t step = 0;
  for (const auto& seg : scenario.segments) {
    const auto count = static_cast<std::size_t>(std::llround(seg.duration_s * sample_rate_hz));
    bn::Evidence clamp{
        {roadnet::node::pavement, net.state_index(r_var, seg.pavement)},
        {roadnet::node::precipitation, seg.precipitation ? 0 : 1},
        {roadnet::node::temp_sensor, roadnet::discretize_temperature(seg.air_temp_c) - 1}};
    for (std::size_t k = 0; k < count; ++k, ++step) {
      const double t = static_cast<double>(step) / sample_rate_hz;
      const auto a = ancestral_sample(net, clamp, rng);

      replay::SensorLogRecord rec;
      rec.t = t;
      rec.speed = seg.speed_mps;
      rec.air_temp = seg.air_temp_c;
      std::array<double, 7> scores{};
      scores[static_cast<std::size_t>(a[static_cast<std::size_t>(cam_var)])] = 1.0;
      rec.camera_scores = scores;
      rec.rcs1_raw = rcs_raw_for_class(a[static_cast<std::size_t>(rcs1_var)] + 1);
      rec.rcs2_raw = rcs_raw_for_class(a[static_cast<std::size_t>(rcs2_var)] + 1);
      rec.observer_mu =
          roadnet::friction_bin_midpoint(a[static_cast<std::size_t>(fo_var)] + 1);
      rec.dfx_dmu = std::array<double, 4>{kDfxPerMu, kDfxPerMu, kDfxPerMu, kDfxPerMu};
      rec.dfy_dmu = std::array<double, 4>{kDfyPerMu, kDfyPerMu, kDfyPerMu, kDfyPerMu};
      rec.fz = std::array<double, 4>{kTireLoadN, kTireLoadN, kTireLoadN, kTireLoadN};
      drive.records.push_back(std::move(rec));

      drive.truth.push_back(replay::GroundTruthRecord{
          t, a[static_cast<std::size_t>(r_var)], a[static_cast<std::size_t>(w_var)],
          a[static_cast<std::size_t>(mu_var)] + 1});
    }
  }
  return drive;
}

}  // namespace frictionnet::sim
