// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "frictionnet/network.hpp"

namespace frictionnet::roadnet {

// Node names of the 10-node road-condition network.
namespace node {
inline constexpr const char* pavement = "R";
inline constexpr const char* temperature = "T";
inline constexpr const char* precipitation = "P";
inline constexpr const char* weather = "W";
inline constexpr const char* friction = "mu_max";
inline constexpr const char* camera = "S_C";
inline constexpr const char* temp_sensor = "S_T";
inline constexpr const char* rcs1 = "S_RCS1";
inline constexpr const char* rcs2 = "S_RCS2";
inline constexpr const char* observer = "S_FO";
}  // namespace node

// Camera classes, in CPT/state order.
inline constexpr int kCameraClasses = 7;
inline constexpr std::array<const char*, 7> kCameraClassLabels{"AD", "AW", "CD", "CW",
                                                               "CbD", "CbW", "S"};
inline constexpr std::array<int, 7> kCameraClassPavement{0, 0, 1, 1, 2, 2, -1};  // -1: none
inline constexpr std::array<int, 7> kCameraClassWeather{0, 1, 0, 1, 0, 1, 2};

// Combined camera class for (pavement, weather) with weather in {Dry, Wet}.
int camera_class_of(int pavement, int weather);

// Row-stochastic 7x7 matrix; rows are the true class, columns the predicted.
struct CameraConfusionMatrix {
  std::array<std::array<double, 7>, 7> rows{};

  void validate() const;  // rows sum to 1 within 1e-9, entries >= 0

  // Documented stand-in (the paper's figure carries no numerics): diagonal
  // 0.85; 0.06 to same-pavement-other-weather; 0.04 split over same-weather-
  // other-pavement; remaining 0.05 split evenly; the Snow row puts 0.15
  // evenly on the three Wet classes.
  static CameraConfusionMatrix default_standin();
};

struct WetnessBinning {
  std::uint32_t low = 1000;
  std::uint32_t high = 10000;

  void validate() const;  // low < high <= 65535
};

struct RenormWarning {
  std::string table;  // child variable name
  std::string row;    // parent assignment label, e.g. "R=Asphalt,W=Wet"
  double sum = 0.0;   // pre-normalization row sum
};

// Proportionally rescales a row to sum 1. Rows already within 1e-12 of unit
// sum are returned unchanged so that reloading a saved model is bit-stable.
// Appends a warning when |sum - 1| > 1e-6.
std::vector<double> renormalize_cpt_row(std::span<const double> row, std::string_view table,
                                        std::string_view row_label,
                                        std::vector<RenormWarning>* warnings);

// The ten variables in Table-1 order (R, T, P, W, mu_max, S_C, S_T, S_RCS1,
// S_RCS2, S_FO) with state labels and scales.
std::vector<bn::Variable> roadnet_variables();

// The paper's CPT constants in percent, verbatim, for every node except the
// camera (whose CPT comes from the confusion matrix). Root priors uniform.
std::vector<bn::Cpt> default_cpts_percent();

// Camera CPT rows (fractions) for parents (R, W): the confusion-matrix row of
// the combined class; every pavement shares the Snow row for w = Snow.
std::vector<std::vector<double>> camera_cpt_rows(const CameraConfusionMatrix& matrix);

// Builds the validated 10-node network from the paper tables plus the given
// camera matrix. Renormalization warnings (the three deficient paper rows)
// are appended to *warnings when provided.
bn::Network build_roadnet(const CameraConfusionMatrix& matrix,
                          std::vector<RenormWarning>* warnings = nullptr);

// ---- physical-value discretizers (1-based class indices) ----

// Air/pavement temperature classes: 1: t > 5; 2: 0 < t <= 5; 3: -21 < t <= 0;
// 4: t <= -21 (degrees Celsius).
int discretize_temperature(double celsius);

// Friction classes over [0, 1.2] in steps of 0.15; exact multiples belong to
// the upper class; values past 1.2 clamp to class 8.
int discretize_friction(double mu);

double friction_bin_midpoint(int cls);

// Wetness classes from the raw 16-bit level: 1 if raw <= low, 2 if
// low < raw <= high, else 3.
int discretize_wetness(std::uint32_t raw, const WetnessBinning& binning);

}  // namespace frictionnet::roadnet
