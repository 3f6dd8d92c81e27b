// SPDX-License-Identifier: Apache-2.0
#include "frictionnet/roadnet.hpp"

#include <cmath>

namespace frictionnet::roadnet {

namespace {

// Table 2: pavement temperature T given air-temperature class S_T (percent).
// Row S_T,1 sums to 98 in the source and is renormalized at build time.
constexpr double kTempTable[4][4] = {
    {95.05, 1.84, 0.87, 0.24},
    {41.46, 50.73, 7.54, 0.27},
    {5.07, 22.68, 71.72, 0.53},
    {10.15, 2.87, 51.40, 35.58},
};

// Table 3: road weather W given precipitation P and pavement temperature T.
constexpr double kWeatherTable[8][3] = {
    {5.00, 95.00, 0.00},  // true,  T1
    {5.00, 90.00, 5.00},  // true,  T2
    {5.00, 20.00, 75.00}, // true,  T3
    {5.00, 0.00, 95.00},  // true,  T4
    {95.00, 5.00, 0.00},  // false, T1
    {95.00, 2.50, 2.50},  // false, T2
    {95.00, 1.75, 3.25},  // false, T3
    {95.00, 0.00, 5.00},  // false, T4
};

// Table 4: maximum friction mu_max given pavement R and weather W. The
// Asphalt/Wet and Asphalt/Snow rows sum to 99 and 73 in the source.
constexpr double kFrictionTable[9][8] = {
    {0, 0, 0, 0, 0, 15, 76, 9},    // Asphalt, Dry
    {0, 0, 0, 11, 47, 36, 5, 0},   // Asphalt, Wet
    {7, 51, 3, 9, 2, 1, 0, 0},     // Asphalt, Snow
    {0, 0, 0, 0, 0, 7, 72, 21},    // Concrete, Dry
    {0, 0, 0, 0, 7, 87, 6, 0},     // Concrete, Wet
    {13, 42, 26, 11, 5, 2, 1, 0},  // Concrete, Snow
    {0, 0, 0, 3, 54, 42, 1, 0},    // Cobblestone, Dry
    {0, 9, 72, 18, 1, 0, 0, 0},    // Cobblestone, Wet
    {8, 73, 18, 1, 0, 0, 0, 0},    // Cobblestone, Snow
};

// Table 5: friction observer S_FO given mu_max.
constexpr double kObserverTable[8][8] = {
    {99.68, 0.02, 0.00, 0.00, 0.27, 0.00, 0.03, 0.00},
    {71.76, 20.7, 0.21, 0.01, 6.62, 0.00, 0.70, 0.00},
    {55.76, 0.15, 28.37, 9.55, 5.25, 0.00, 0.92, 0.00},
    {17.31, 0.04, 0.1, 56.31, 22.96, 2.85, 0.43, 0.00},
    {10.70, 0.02, 0.03, 0.54, 78.5, 8.91, 1.09, 0.21},
    {5.32, 0.01, 0.02, 0.21, 10.47, 75.01, 8.79, 0.17},
    {2.12, 0.01, 0.01, 0.05, 8.03, 7.84, 81.49, 0.45},
    {0.45, 0.02, 0.02, 0.03, 2.24, 2.59, 19.12, 75.53},
};

// Table 6: road condition sensor given weather, shared by asphalt/concrete
// and separate for cobblestone; both RCS nodes use the same table.
constexpr double kRcsAsphaltConcrete[3][3] = {
    {95.00, 5.00, 0.00},     // Dry
    {17.5, 26.25, 56.25},    // Wet
    {96.00, 4.00, 0.00},     // Snow
};
constexpr double kRcsCobblestone[3][3] = {
    {99.00, 1.00, 0.00},
    {99.00, 1.00, 0.00},
    {99.00, 1.00, 0.00},
};

std::vector<std::string> numbered_states(std::string_view prefix, int count) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) out.push_back(std::string(prefix) + std::to_string(i));
  return out;
}

}  // namespace

int camera_class_of(int pavement, int weather) {
  if (weather == 2) return 6;
  return pavement * 2 + weather;
}

void CameraConfusionMatrix::validate() const {
  for (int r = 0; r < 7; ++r) {
    double sum = 0.0;
    for (double v : rows[static_cast<std::size_t>(r)]) {
      if (!(v >= 0.0))
        throw Error(ErrorCode::invalid_argument,
                    "camera confusion matrix row " + std::to_string(r + 1) +
                        " has a negative entry");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      throw Error(ErrorCode::unnormalized_row, "camera confusion matrix row " +
                                                   std::to_string(r + 1) + " sums to " +
                                                   std::to_string(sum));
  }
}

CameraConfusionMatrix CameraConfusionMatrix::default_standin() {
  CameraConfusionMatrix m;
  for (int c = 0; c < 7; ++c) {
    auto& row = m.rows[static_cast<std::size_t>(c)];
    if (c == 6) {
      row[6] = 0.85;
      for (int j = 0; j < 6; ++j)
        if (kCameraClassWeather[static_cast<std::size_t>(j)] == 1) row[static_cast<std::size_t>(j)] = 0.15 / 3.0;
      continue;
    }
    row[static_cast<std::size_t>(c)] = 0.85;
    std::vector<int> rest;
    for (int j = 0; j < 7; ++j) {
      if (j == c) continue;
      if (j != 6 && kCameraClassPavement[static_cast<std::size_t>(j)] ==
                        kCameraClassPavement[static_cast<std::size_t>(c)]) {
        row[static_cast<std::size_t>(j)] = 0.06;  // same pavement, other weather
      } else if (j != 6 && kCameraClassWeather[static_cast<std::size_t>(j)] ==
                               kCameraClassWeather[static_cast<std::size_t>(c)]) {
        row[static_cast<std::size_t>(j)] = 0.04 / 2.0;
      } else {
        rest.push_back(j);
      }
    }
    for (int j : rest) row[static_cast<std::size_t>(j)] = 0.05 / static_cast<double>(rest.size());
  }
  return m;
}

void WetnessBinning::validate() const {
  if (!(low < high && high <= 65535))
    throw Error(ErrorCode::invalid_argument, "wetness thresholds need 0 <= low < high <= 65535");
}

std::vector<double> renormalize_cpt_row(std::span<const double> row, std::string_view table,
                                        std::string_view row_label,
                                        std::vector<RenormWarning>* warnings) {
  double sum = 0.0;
  for (double v : row) {
    if (!(v >= 0.0))
      throw Error(ErrorCode::invalid_argument,
                  std::string(table) + " row " + std::string(row_label) + " has a negative entry");
    sum += v;
  }
  if (sum == 0.0)
    throw Error(ErrorCode::all_zero_row,
                std::string(table) + " row " + std::string(row_label) + " is all zeros");
  if (warnings && std::fabs(sum - 1.0) > 1e-6)
    warnings->push_back(RenormWarning{std::string(table), std::string(row_label), sum});
  std::vector<double> out(row.begin(), row.end());
  if (std::fabs(sum - 1.0) <= 1e-12) return out;  // keep reloads bit-stable
  for (double& v : out) v /= sum;
  return out;
}

std::vector<bn::Variable> roadnet_variables() {
  using bn::Scale;
  return {
      {node::pavement, {"Asphalt", "Concrete", "Cobblestone"}, Scale::nominal},
      {node::temperature, numbered_states("T", 4), Scale::ordinal},
      {node::precipitation, {"true", "false"}, Scale::nominal},
      {node::weather, {"Dry", "Wet", "Snow"}, Scale::nominal},
      {node::friction, numbered_states("mu", 8), Scale::ordinal},
      {node::camera,
       {kCameraClassLabels.begin(), kCameraClassLabels.end()},
       Scale::nominal},
      {node::temp_sensor, numbered_states("S_T", 4), Scale::ordinal},
      {node::rcs1, numbered_states("", 3), Scale::ordinal},
      {node::rcs2, numbered_states("", 3), Scale::ordinal},
      {node::observer, numbered_states("S_FO", 8), Scale::ordinal},
  };
}

std::vector<bn::Cpt> default_cpts_percent() {
  auto row_of = [](const double* v, int n) { return std::vector<double>(v, v + n); };

  std::vector<bn::Cpt> cpts;
  cpts.push_back({node::pavement, {}, {{100.0 / 3.0, 100.0 / 3.0, 100.0 / 3.0}}});
  cpts.push_back({node::precipitation, {}, {{50.0, 50.0}}});
  cpts.push_back({node::temp_sensor, {}, {{25.0, 25.0, 25.0, 25.0}}});

  bn::Cpt temp{node::temperature, {node::temp_sensor}, {}};
  for (const auto& r : kTempTable) temp.rows.push_back(row_of(r, 4));
  cpts.push_back(std::move(temp));

  bn::Cpt weather{node::weather, {node::precipitation, node::temperature}, {}};
  for (const auto& r : kWeatherTable) weather.rows.push_back(row_of(r, 3));
  cpts.push_back(std::move(weather));

  bn::Cpt friction{node::friction, {node::pavement, node::weather}, {}};
  for (const auto& r : kFrictionTable) friction.rows.push_back(row_of(r, 8));
  cpts.push_back(std::move(friction));

  for (const char* rcs : {node::rcs1, node::rcs2}) {
    bn::Cpt cpt{rcs, {node::pavement, node::weather}, {}};
    for (int r = 0; r < 3; ++r)
      for (int w = 0; w < 3; ++w)
        cpt.rows.push_back(row_of(r < 2 ? kRcsAsphaltConcrete[w] : kRcsCobblestone[w], 3));
    cpts.push_back(std::move(cpt));
  }

  bn::Cpt observer{node::observer, {node::friction}, {}};
  for (const auto& r : kObserverTable) observer.rows.push_back(row_of(r, 8));
  cpts.push_back(std::move(observer));

  return cpts;
}

std::vector<std::vector<double>> camera_cpt_rows(const CameraConfusionMatrix& matrix) {
  matrix.validate();
  std::vector<std::vector<double>> rows;
  rows.reserve(9);
  for (int r = 0; r < 3; ++r)
    for (int w = 0; w < 3; ++w) {
      const auto& src = matrix.rows[static_cast<std::size_t>(camera_class_of(r, w))];
      rows.emplace_back(src.begin(), src.end());
    }
  return rows;
}

bn::Network build_roadnet(const CameraConfusionMatrix& matrix,
                          std::vector<RenormWarning>* warnings) {
  auto variables = roadnet_variables();
  auto percent = default_cpts_percent();

  // parent-combination label for warning records
  auto row_label = [&](const bn::Cpt& cpt, std::size_t row) {
    std::string label;
    std::size_t rem = row;
    std::vector<int> cards;
    for (const auto& pname : cpt.parents)
      for (const auto& v : variables)
        if (v.name == pname) cards.push_back(v.cardinality());
    std::vector<std::size_t> idx(cards.size(), 0);
    for (int p = static_cast<int>(cards.size()) - 1; p >= 0; --p) {
      idx[static_cast<std::size_t>(p)] = rem % static_cast<std::size_t>(cards[static_cast<std::size_t>(p)]);
      rem /= static_cast<std::size_t>(cards[static_cast<std::size_t>(p)]);
    }
    for (std::size_t p = 0; p < cpt.parents.size(); ++p) {
      for (const auto& v : variables)
        if (v.name == cpt.parents[p]) {
          if (!label.empty()) label += ",";
          label += cpt.parents[p] + "=" + v.states[idx[p]];
        }
    }
    return label.empty() ? std::string("prior") : label;
  };

  std::vector<bn::Cpt> cpts;
  for (auto& cpt : percent) {
    bn::Cpt out{cpt.child, cpt.parents, {}};
    for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
      std::vector<double> fraction(cpt.rows[r].size());
      for (std::size_t k = 0; k < fraction.size(); ++k) fraction[k] = cpt.rows[r][k] / 100.0;
      out.rows.push_back(renormalize_cpt_row(fraction, cpt.child, row_label(cpt, r), warnings));
    }
    cpts.push_back(std::move(out));
  }

  bn::Cpt camera{node::camera, {node::pavement, node::weather}, camera_cpt_rows(matrix)};
  for (std::size_t r = 0; r < camera.rows.size(); ++r)
    camera.rows[r] = renormalize_cpt_row(camera.rows[r], node::camera, row_label(camera, r), warnings);
  cpts.push_back(std::move(camera));

  return bn::Network::build(std::move(variables), std::move(cpts));
}

int discretize_temperature(double celsius) {
  if (!std::isfinite(celsius))
    throw Error(ErrorCode::non_finite_input, "temperature must be finite");
  if (celsius > 5.0) return 1;
  if (celsius > 0.0) return 2;
  if (celsius > -21.0) return 3;
  return 4;
}

int discretize_friction(double mu) {
  if (!(mu >= 0.0)) throw Error(ErrorCode::negative_friction, "friction coefficient < 0");
  const int cls = static_cast<int>(std::floor(mu / 0.15)) + 1;
  return cls > 8 ? 8 : cls;
}

double friction_bin_midpoint(int cls) {
  if (cls < 1 || cls > 8) throw Error(ErrorCode::out_of_range, "friction class");
  return 0.15 * (cls - 1) + 0.075;
}

int discretize_wetness(std::uint32_t raw, const WetnessBinning& binning) {
  binning.validate();
  if (raw > 65535) throw Error(ErrorCode::out_of_range, "wetness level exceeds 16 bits");
  if (raw <= binning.low) return 1;
  if (raw <= binning.high) return 2;
  return 3;
}

}  // namespace frictionnet::roadnet
