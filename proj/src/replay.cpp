// SPDX-License-Identifier: Apache-2.0
#include "frictionnet/replay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "frictionnet/domain_eval.hpp"
#include "frictionnet/inference.hpp"
#include "frictionnet/metrics.hpp"
#include "frictionnet/util.hpp"

namespace frictionnet::replay {

namespace {

const std::array<const char*, 25> kLogHeader{
    "t",    "v",    "T_air", "cam_s1", "cam_s2", "cam_s3", "cam_s4", "cam_s5", "cam_s6",
    "cam_s7", "rcs1", "rcs2",  "mu_obs", "dFx1",   "dFx2",   "dFx3",   "dFx4",   "dFy1",
    "dFy2", "dFy3", "dFy4",  "Fz1",    "Fz2",    "Fz3",    "Fz4"};

std::optional<std::array<double, 4>> parse_tire_group(const std::vector<std::string>& fields,
                                                      std::size_t first,
                                                      std::string_view group) {
  int present = 0;
  for (std::size_t k = 0; k < 4; ++k) present += fields[first + k].empty() ? 0 : 1;
  if (present == 0) return std::nullopt;
  if (present != 4)
    throw Error(ErrorCode::parse_error,
                std::string(group) + " columns must be all present or all empty");
  std::array<double, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) out[k] = util::parse_double(fields[first + k]);
  return out;
}

}  // namespace

std::vector<SensorLogRecord> load_log_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::parse_error, "empty log file");
  const auto header = util::split(line, ',');
  if (header.size() != kLogHeader.size())
    throw Error(ErrorCode::parse_error,
                "log header has " + std::to_string(header.size()) + " columns, expected " +
                    std::to_string(kLogHeader.size()));
  for (std::size_t i = 0; i < kLogHeader.size(); ++i)
    if (header[i] != kLogHeader[i])
      throw Error(ErrorCode::parse_error,
                  "log header column " + std::to_string(i + 1) + " is '" + header[i] +
                      "', expected '" + kLogHeader[i] + "'");

  std::vector<SensorLogRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = util::split(line, ',');
    if (fields.size() != kLogHeader.size())
      throw Error(ErrorCode::parse_error,
                  "log line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields");
    SensorLogRecord r;
    if (fields[0].empty() || fields[1].empty() || fields[2].empty())
      throw Error(ErrorCode::parse_error,
                  "log line " + std::to_string(line_no) + ": t, v and T_air are required");
    r.t = util::parse_double(fields[0]);
    r.speed = util::parse_double(fields[1]);
    r.air_temp = util::parse_double(fields[2]);

    int cam_present = 0;
    for (std::size_t k = 0; k < 7; ++k) cam_present += fields[3 + k].empty() ? 0 : 1;
    if (cam_present == 7) {
      std::array<double, 7> scores{};
      for (std::size_t k = 0; k < 7; ++k) scores[k] = util::parse_double(fields[3 + k]);
      r.camera_scores = scores;
    } else if (cam_present != 0) {
      throw Error(ErrorCode::parse_error,
                  "log line " + std::to_string(line_no) +
                      ": cam_s1..cam_s7 must be all present or all empty");
    }

    for (std::size_t k = 0; k < 2; ++k) {
      const auto& f = fields[10 + k];
      if (f.empty()) continue;
      const std::int64_t raw = util::parse_int(f);
      if (raw < 0 || raw > 65535)
        throw Error(ErrorCode::parse_error, "log line " + std::to_string(line_no) +
                                                ": rcs value out of 16-bit range");
      (k == 0 ? r.rcs1_raw : r.rcs2_raw) = static_cast<std::uint32_t>(raw);
    }
    if (!fields[12].empty()) r.observer_mu = util::parse_double(fields[12]);
    r.dfx_dmu = parse_tire_group(fields, 13, "dFx1..dFx4");
    r.dfy_dmu = parse_tire_group(fields, 17, "dFy1..dFy4");
    r.fz = parse_tire_group(fields, 21, "Fz1..Fz4");
    if (r.fz)
      for (double fz : *r.fz)
        if (!(fz > 0.0))
          throw Error(ErrorCode::parse_error,
                      "log line " + std::to_string(line_no) + ": Fz must be > 0 where present");

    if (!records.empty() && r.t < records.back().t)
      throw Error(ErrorCode::parse_error,
                  "log line " + std::to_string(line_no) + ": timestamps decrease");
    records.push_back(r);
  }
  return records;
}

void write_log_csv(std::span<const SensorLogRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  for (std::size_t i = 0; i < kLogHeader.size(); ++i)
    out << (i ? "," : "") << kLogHeader[i];
  out << "\n";
  auto fixed = [](double v) { return util::format_fixed(v, 6); };
  for (const auto& r : records) {
    out << fixed(r.t) << ',' << fixed(r.speed) << ',' << fixed(r.air_temp);
    for (std::size_t k = 0; k < 7; ++k) {
      out << ',';
      if (r.camera_scores) out << fixed((*r.camera_scores)[k]);
    }
    out << ',';
    if (r.rcs1_raw) out << *r.rcs1_raw;
    out << ',';
    if (r.rcs2_raw) out << *r.rcs2_raw;
    out << ',';
    if (r.observer_mu) out << fixed(*r.observer_mu);
    for (const auto* group : {&r.dfx_dmu, &r.dfy_dmu, &r.fz})
      for (std::size_t k = 0; k < 4; ++k) {
        out << ',';
        if (*group) out << fixed((**group)[k]);
      }
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

std::vector<GroundTruthRecord> load_truth_csv(const std::filesystem::path& path,
                                              const bn::Network& net) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || util::split(line, ',') !=
                                     std::vector<std::string>{"t", "R", "W", "mu_class"})
    throw Error(ErrorCode::parse_error, "unexpected ground-truth header in " + path.string());
  const int r_var = net.index_of(roadnet::node::pavement);
  const int w_var = net.index_of(roadnet::node::weather);
  std::vector<GroundTruthRecord> truth;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = util::split(line, ',');
    if (fields.size() != 4)
      throw Error(ErrorCode::parse_error, "ground-truth row needs 4 fields");
    GroundTruthRecord g;
    g.t = util::parse_double(fields[0]);
    g.pavement = net.state_index(r_var, fields[1]);
    g.weather = net.state_index(w_var, fields[2]);
    g.mu_class = static_cast<int>(util::parse_int(fields[3]));
    if (g.mu_class < 1 || g.mu_class > 8)
      throw Error(ErrorCode::parse_error, "mu_class must be 1..8");
    truth.push_back(g);
  }
  return truth;
}

void write_truth_csv(std::span<const GroundTruthRecord> truth, const bn::Network& net,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  const bn::Variable& r_var = net.variable(net.index_of(roadnet::node::pavement));
  const bn::Variable& w_var = net.variable(net.index_of(roadnet::node::weather));
  out << "t,R,W,mu_class\n";
  for (const auto& g : truth)
    out << util::format_fixed(g.t, 6) << ',' << r_var.states[static_cast<std::size_t>(g.pavement)]
        << ',' << w_var.states[static_cast<std::size_t>(g.weather)] << ',' << g.mu_class << "\n";
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

double camera_delay(double distance_m, double speed_mps) {
  if (!(distance_m > 0.0)) throw Error(ErrorCode::invalid_argument, "camera distance must be > 0");
  if (!(speed_mps > 0.0))
    throw Error(ErrorCode::zero_or_negative_speed, "camera delay undefined at standstill");
  return distance_m / speed_mps;
}

double observer_sensitivity(double df_dmu, double fz) {
  if (!(fz > 0.0)) throw Error(ErrorCode::non_positive_load, "vertical tire force must be > 0");
  return df_dmu / fz;
}

std::optional<int> gate_observer(const SensorLogRecord& record, const ObserverGate& gate) {
  if (!(gate.threshold > 0.0))
    throw Error(ErrorCode::invalid_argument, "gate threshold must be > 0");
  if (!record.observer_mu || !record.fz) return std::nullopt;
  bool excited = false;
  for (const auto* group : {&record.dfx_dmu, &record.dfy_dmu}) {
    if (!*group) continue;
    for (std::size_t k = 0; k < 4 && !excited; ++k)
      excited = observer_sensitivity((**group)[k], (*record.fz)[k]) > gate.threshold;
  }
  if (!excited) return std::nullopt;
  return roadnet::discretize_friction(*record.observer_mu);
}

bn::Evidence assemble_evidence(const SensorLogRecord& record, const ReplayConfig& config,
                               std::optional<int> delayed_camera_state) {
  bn::Evidence evidence;
  evidence.emplace(roadnet::node::temp_sensor,
                   roadnet::discretize_temperature(record.air_temp) - 1);
  if (record.rcs1_raw)
    evidence.emplace(roadnet::node::rcs1,
                     roadnet::discretize_wetness(*record.rcs1_raw, config.wetness) - 1);
  if (record.rcs2_raw)
    evidence.emplace(roadnet::node::rcs2,
                     roadnet::discretize_wetness(*record.rcs2_raw, config.wetness) - 1);
  if (delayed_camera_state) evidence.emplace(roadnet::node::camera, *delayed_camera_state);
  if (const auto fo = gate_observer(record, config.gate))
    evidence.emplace(roadnet::node::observer, *fo - 1);
  return evidence;
}

PosteriorTimeSeries run_replay(const bn::Network& net, std::span<const SensorLogRecord> log,
                               const ReplayConfig& config) {
  for (std::size_t i = 1; i < log.size(); ++i)
    if (log[i].t < log[i - 1].t)
      throw Error(ErrorCode::invalid_argument, "log timestamps must be non-decreasing");

  struct Capture {
    double effective_t;
    double capture_t;
    std::array<double, 7> scores;
  };
  std::vector<Capture> pending;
  std::optional<Capture> current;

  // posterior cache keyed by packed evidence (absent = extra radix value)
  std::unordered_map<std::size_t, std::array<bn::Distribution, 3>> cache;
  auto evidence_key = [&](const bn::Evidence& ev) {
    std::size_t key = 0;
    static constexpr std::array<const char*, 5> sensors = sweep::kSensorOrder;
    for (std::size_t i = 0; i < sensors.size(); ++i) {
      const auto it = ev.find(sensors[i]);
      const int card = net.variable(net.index_of(sensors[i])).cardinality();
      key = key * static_cast<std::size_t>(card + 1) +
            static_cast<std::size_t>(it == ev.end() ? 0 : it->second + 1);
    }
    return key;
  };

  PosteriorTimeSeries series;
  series.steps.reserve(log.size());
  for (const auto& record : log) {
    // promote the capture with the latest effective time <= t
    for (const auto& c : pending)
      if (c.effective_t <= record.t &&
          (!current || c.effective_t > current->effective_t ||
           (c.effective_t == current->effective_t && c.capture_t > current->capture_t)))
        current = c;
    std::erase_if(pending, [&](const Capture& c) { return c.effective_t <= record.t; });

    std::optional<int> camera_state;
    std::optional<std::array<double, 7>> camera_scores;
    if (current) {
      camera_scores = current->scores;
      int best = 0;
      for (int c = 1; c < 7; ++c)
        if (current->scores[static_cast<std::size_t>(c)] >
            current->scores[static_cast<std::size_t>(best)])
          best = c;
      camera_state = best;
    }

    const bn::Evidence evidence = assemble_evidence(record, config, camera_state);
    const std::size_t key = evidence_key(evidence);
    auto it = cache.find(key);
    if (it == cache.end()) {
      std::array<bn::Distribution, 3> posts{
          bn::posterior_ve(net, roadnet::node::pavement, evidence),
          bn::posterior_ve(net, roadnet::node::weather, evidence),
          bn::posterior_ve(net, roadnet::node::friction, evidence)};
      it = cache.emplace(key, std::move(posts)).first;
    }

    PosteriorStep step;
    step.t = record.t;
    step.pavement = it->second[0];
    step.weather = it->second[1];
    step.friction = it->second[2];
    step.camera_scores = camera_scores;
    for (std::size_t i = 0; i < sweep::kSensorOrder.size(); ++i)
      if (evidence.count(sweep::kSensorOrder[i])) step.evidence_mask |= 1u << i;
    series.steps.push_back(std::move(step));

    // queue this record's capture; at standstill the previous one is held
    if (record.camera_scores && record.speed > 0.0)
      pending.push_back(Capture{record.t + camera_delay(config.camera_distance_m, record.speed),
                                record.t, *record.camera_scores});
  }
  return series;
}

ReplayReport replay_report(const PosteriorTimeSeries& series,
                           std::span<const GroundTruthRecord> truth) {
  if (series.steps.size() != truth.size())
    throw Error(ErrorCode::length_mismatch,
                std::to_string(series.steps.size()) + " posterior steps vs " +
                    std::to_string(truth.size()) + " ground-truth rows");

  // slices: camera-present records; pavement additionally drops camera-Nan
  std::vector<int> cam_pav, cam_wea, bn_pav, bn_wea, truth_pav, truth_wea;
  std::vector<std::pair<bn::Distribution, bn::Distribution>> cam_pav_pairs, cam_wea_pairs,
      bn_pav_pairs, bn_wea_pairs;
  const bn::Variable pav_var{"pavement", {"Asphalt", "Concrete", "Cobblestone"},
                             bn::Scale::nominal};
  const bn::Variable wea_var{"weather", {"Dry", "Wet", "Snow"}, bn::Scale::nominal};

  for (std::size_t i = 0; i < series.steps.size(); ++i) {
    const auto& step = series.steps[i];
    if (!step.camera_scores) continue;
    const auto cam = metrics::camera_scores_to_marginals(*step.camera_scores);
    cam_wea.push_back(cam.weather_label);
    bn_wea.push_back(step.weather.argmax());
    truth_wea.push_back(truth[i].weather);
    cam_wea_pairs.emplace_back(bn::make_delta(wea_var, truth[i].weather), cam.weather);
    bn_wea_pairs.emplace_back(bn::make_delta(wea_var, truth[i].weather), step.weather);
    cam_pav_pairs.emplace_back(bn::make_delta(pav_var, truth[i].pavement), cam.pavement);
    bn_pav_pairs.emplace_back(bn::make_delta(pav_var, truth[i].pavement), step.pavement);
    if (cam.pavement_label != metrics::kNanLabel) {
      cam_pav.push_back(cam.pavement_label);
      bn_pav.push_back(step.pavement.argmax());
      truth_pav.push_back(truth[i].pavement);
    }
  }
  if (cam_wea.empty())
    throw Error(ErrorCode::empty_after_exclusion, "no records with a camera classification");
  if (cam_pav.empty())
    throw Error(ErrorCode::empty_after_exclusion, "every camera sample is Nan-labeled");

  ReplayReport report;
  report.n = cam_wea.size();
  report.n_pavement = cam_pav.size();
  report.camera.acc_pavement = metrics::accuracy(cam_pav, truth_pav, false);
  report.camera.acc_weather = metrics::accuracy(cam_wea, truth_wea, false);
  report.bn.acc_pavement = metrics::accuracy(bn_pav, truth_pav, false);
  report.bn.acc_weather = metrics::accuracy(bn_wea, truth_wea, false);
  report.camera.hellinger_pavement =
      metrics::mean_distance(cam_pav_pairs, metrics::MetricKind::hellinger).mean;
  report.camera.hellinger_weather =
      metrics::mean_distance(cam_wea_pairs, metrics::MetricKind::hellinger).mean;
  report.bn.hellinger_pavement =
      metrics::mean_distance(bn_pav_pairs, metrics::MetricKind::hellinger).mean;
  report.bn.hellinger_weather =
      metrics::mean_distance(bn_wea_pairs, metrics::MetricKind::hellinger).mean;
  return report;
}

void write_posterior_csv(const PosteriorTimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << "t,R_1,R_2,R_3,W_1,W_2,W_3,mu_1,mu_2,mu_3,mu_4,mu_5,mu_6,mu_7,mu_8,evidence_flags\n";
  for (const auto& step : series.steps) {
    out << util::format_fixed(step.t, 6);
    for (const auto* dist : {&step.pavement, &step.weather, &step.friction})
      for (double p : dist->p) out << ',' << util::format_fixed(p, 6);
    out << ',';
    std::string flags;
    for (std::size_t i = 0; i < sweep::kSensorOrder.size(); ++i)
      if ((step.evidence_mask >> i) & 1u) {
        if (!flags.empty()) flags += ';';
        flags += sweep::kSensorOrder[i];
      }
    out << flags << "\n";
  }
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

void write_report_csv(const ReplayReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << "algorithm,acc_pavement,acc_weather,hellinger_pavement,hellinger_weather,n,n_pavement\n";
  auto line = [&](const char* name, const ReplayReport::Row& row) {
    out << name << ',' << util::format_fixed(row.acc_pavement, 6) << ','
        << util::format_fixed(row.acc_weather, 6) << ','
        << util::format_fixed(row.hellinger_pavement, 6) << ','
        << util::format_fixed(row.hellinger_weather, 6) << ',' << report.n << ','
        << report.n_pavement << "\n";
  };
  line("camera", report.camera);
  line("bn", report.bn);
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

}  // namespace frictionnet::replay
