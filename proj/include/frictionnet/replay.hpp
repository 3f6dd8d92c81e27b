// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "frictionnet/model_io.hpp"
#include "frictionnet/network.hpp"

namespace frictionnet::replay {

// One timestamped row of raw sensor readings (real or simulated).
struct SensorLogRecord {
  double t = 0.0;         // seconds
  double speed = 0.0;     // m/s
  double air_temp = 0.0;  // degrees Celsius
  std::optional<std::array<double, 7>> camera_scores;
  std::optional<std::uint32_t> rcs1_raw;
  std::optional<std::uint32_t> rcs2_raw;
  std::optional<double> observer_mu;
  std::optional<std::array<double, 4>> dfx_dmu;  // N per unit mu, per tire
  std::optional<std::array<double, 4>> dfy_dmu;
  std::optional<std::array<double, 4>> fz;       // N, per tire
};

// Ground truth row accompanying a simulated drive (mu_class is 1-based).
struct GroundTruthRecord {
  double t = 0.0;
  int pavement = 0;
  int weather = 0;
  int mu_class = 1;
};

// CSV header: t,v,T_air,cam_s1..cam_s7,rcs1,rcs2,mu_obs,dFx1..dFx4,
// dFy1..dFy4,Fz1..Fz4. Empty fields mark absent readings.
std::vector<SensorLogRecord> load_log_csv(const std::filesystem::path& path);
void write_log_csv(std::span<const SensorLogRecord> records, const std::filesystem::path& path);

std::vector<GroundTruthRecord> load_truth_csv(const std::filesystem::path& path,
                                              const bn::Network& net);
void write_truth_csv(std::span<const GroundTruthRecord> truth, const bn::Network& net,
                     const std::filesystem::path& path);

struct ObserverGate {
  double threshold = 0.1;  // dimensionless sensitivity gate, > 0
};

// Camera classification lag: time for the imaged patch to reach the tires.
double camera_delay(double distance_m, double speed_mps);

// Relative tire-force change per unit friction coefficient.
double observer_sensitivity(double df_dmu, double fz);

// 1-based friction class when any per-tire sensitivity exceeds the gate and
// an observer estimate is present; nullopt otherwise (S_FO stays out of the
// evidence).
std::optional<int> gate_observer(const SensorLogRecord& record, const ObserverGate& gate);

struct ReplayConfig {
  roadnet::WetnessBinning wetness;
  ObserverGate gate;
  double camera_distance_m = 6.3;
};

// Evidence for one record: S_T from air temperature, RCS classes where raw
// levels are present, the delayed camera class when available, S_FO per the
// excitation gate. delayed_camera_state is a 0-based S_C state index.
bn::Evidence assemble_evidence(const SensorLogRecord& record, const ReplayConfig& config,
                               std::optional<int> delayed_camera_state);

struct PosteriorStep {
  double t = 0.0;
  bn::Distribution pavement;
  bn::Distribution weather;
  bn::Distribution friction;
  unsigned evidence_mask = 0;  // bit i = sweep::kSensorOrder[i] present
  std::optional<std::array<double, 7>> camera_scores;  // the delayed capture
};

struct PosteriorTimeSeries {
  std::vector<PosteriorStep> steps;
};

// Sequential replay with camera-delay bookkeeping: the camera evidence at
// time t is the capture whose effective time (capture + s/v) is the latest
// one <= t; at standstill the previous evidence is held.
PosteriorTimeSeries run_replay(const bn::Network& net, std::span<const SensorLogRecord> log,
                               const ReplayConfig& config);

struct ReplayReport {
  struct Row {
    double acc_pavement = 0.0;
    double acc_weather = 0.0;
    double hellinger_pavement = 0.0;
    double hellinger_weather = 0.0;
  };
  Row camera;
  Row bn;
  std::size_t n = 0;           // records with a camera classification
  std::size_t n_pavement = 0;  // after Nan exclusion
};

// Accuracy and mean Hellinger distance for pavement and weather, camera
// baseline vs fused posterior. Nan-labeled camera samples (Snow argmax) are
// excluded from both pavement accuracies.
ReplayReport replay_report(const PosteriorTimeSeries& series,
                           std::span<const GroundTruthRecord> truth);

// posterior CSV: t,R_1..R_3,W_1..W_3,mu_1..mu_8,evidence_flags
void write_posterior_csv(const PosteriorTimeSeries& series, const std::filesystem::path& path);
void write_report_csv(const ReplayReport& report, const std::filesystem::path& path);

}  // namespace frictionnet::replay
