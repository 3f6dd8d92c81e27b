// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "frictionnet/drive_sim.hpp"
#include "frictionnet/inference.hpp"
#include "frictionnet/metrics.hpp"
#include "frictionnet/model_io.hpp"
#include "frictionnet/replay.hpp"
#include "test_helpers.hpp"

using namespace frictionnet;
using replay::ObserverGate;
using replay::ReplayConfig;
using replay::SensorLogRecord;

namespace {

const Model& model() {
  static const Model m = load_model(testutil::data_dir() / "roadnet.json");
  return m;
}

ReplayConfig default_config() {
  ReplayConfig config;
  config.wetness = model().config.wetness;
  return config;
}

#define CHECK_THROWS_CODE(expr, expected)                  \
  do {                                                     \
    try {                                                  \
      (void)(expr);                                        \
      FAIL("expected an error");                           \
    } catch (const Error& e) {                             \
      CHECK(e.code() == (expected));                       \
    }                                                      \
  } while (0)

double entropy(const bn::Distribution& d) {
  double h = 0.0;
  for (double p : d.p)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

}  // namespace

TEST_CASE("camera_delay") {
  CHECK(replay::camera_delay(6.3, 12.6) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(replay::camera_delay(6.3, 6.3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_CODE(replay::camera_delay(6.3, 0.0), ErrorCode::zero_or_negative_speed);
  CHECK_THROWS_CODE(replay::camera_delay(6.3, -1.0), ErrorCode::zero_or_negative_speed);
  CHECK_THROWS_CODE(replay::camera_delay(0.0, 1.0), ErrorCode::invalid_argument);
}

TEST_CASE("observer_sensitivity") {
  CHECK(replay::observer_sensitivity(3000.0, 4000.0) == doctest::Approx(0.75));
  CHECK(replay::observer_sensitivity(0.0, 4000.0) == 0.0);
  CHECK(replay::observer_sensitivity(4000.0, 4000.0) == doctest::Approx(1.0));
  CHECK_THROWS_CODE(replay::observer_sensitivity(100.0, 0.0), ErrorCode::non_positive_load);
}

TEST_CASE("gate_observer") {
  SensorLogRecord rec;
  rec.observer_mu = 0.9;
  rec.fz = std::array<double, 4>{4000, 4000, 4000, 4000};

  SUBCASE("below threshold gives no evidence") {
    rec.dfx_dmu = std::array<double, 4>{40, 40, 40, 40};  // sensitivity 0.01
    CHECK(!replay::gate_observer(rec, ObserverGate{0.1}).has_value());
  }
  SUBCASE("one excited tire enables evidence") {
    rec.dfx_dmu = std::array<double, 4>{40, 40, 3000, 40};  // 0.75 on one tire
    const auto cls = replay::gate_observer(rec, ObserverGate{0.1});
    REQUIRE(cls.has_value());
    CHECK(*cls == 7);  // 0.9 / 0.15 = 6 -> class 7
  }
  SUBCASE("no estimate means no evidence regardless of excitation") {
    rec.dfx_dmu = std::array<double, 4>{3000, 3000, 3000, 3000};
    rec.observer_mu.reset();
    CHECK(!replay::gate_observer(rec, ObserverGate{0.1}).has_value());
  }
  SUBCASE("lateral excitation counts too") {
    rec.dfy_dmu = std::array<double, 4>{40, 2000, 40, 40};  // 0.5
    CHECK(replay::gate_observer(rec, ObserverGate{0.1}).has_value());
  }
}

TEST_CASE("assemble_evidence") {
  const ReplayConfig config = default_config();

  SensorLogRecord minimal;
  minimal.air_temp = 10.0;
  const auto ev = replay::assemble_evidence(minimal, config, std::nullopt);
  REQUIRE(ev.size() == 1);
  CHECK(ev.at("S_T") == 0);

  SensorLogRecord full;
  full.air_temp = -5.0;
  full.rcs1_raw = 500;    // class 1
  full.rcs2_raw = 20000;  // class 3
  full.observer_mu = 0.5;
  full.dfx_dmu = std::array<double, 4>{3000, 3000, 3000, 3000};
  full.fz = std::array<double, 4>{4000, 4000, 4000, 4000};
  const auto ev_full = replay::assemble_evidence(full, config, 3);
  CHECK(ev_full.size() == 5);
  CHECK(ev_full.at("S_T") == 2);
  CHECK(ev_full.at("S_RCS1") == 0);
  CHECK(ev_full.at("S_RCS2") == 2);
  CHECK(ev_full.at("S_C") == 3);
  CHECK(ev_full.at("S_FO") == 3);  // 0.5 -> class 4

  // low excitation drops only S_FO
  full.dfx_dmu = std::array<double, 4>{4, 4, 4, 4};
  const auto ev_gated = replay::assemble_evidence(full, config, 3);
  CHECK(ev_gated.size() == 4);
  CHECK(ev_gated.count("S_FO") == 0);
}

TEST_CASE("run_replay camera-delay bookkeeping is exact") {
  // 1 Hz grid, v = 2 m/s, s = 6.3 m -> delay 3.15 s; the capture applied at
  // integer time t is the one from t' = floor(t - 3.15)
  ReplayConfig config = default_config();
  std::vector<SensorLogRecord> log;
  for (int t = 0; t < 20; ++t) {
    SensorLogRecord rec;
    rec.t = t;
    rec.speed = 2.0;
    rec.air_temp = 10.0;
    std::array<double, 7> scores{};
    scores[static_cast<std::size_t>(t % 7)] = 1.0;
    rec.camera_scores = scores;
    log.push_back(rec);
  }
  const auto series = replay::run_replay(model().network, log, config);
  REQUIRE(series.steps.size() == 20);
  for (int t = 0; t < 20; ++t) {
    const auto& step = series.steps[static_cast<std::size_t>(t)];
    const int expected_capture = static_cast<int>(std::floor(t - 3.15));
    if (expected_capture < 0) {
      CHECK(!step.camera_scores.has_value());
      CHECK((step.evidence_mask & 1u) == 0);
    } else {
      REQUIRE(step.camera_scores.has_value());
      CHECK((*step.camera_scores)[static_cast<std::size_t>(expected_capture % 7)] == 1.0);
      CHECK((step.evidence_mask & 1u) == 1);
    }
  }

  SUBCASE("standstill holds the previous classification") {
    auto frozen = log;
    for (int t = 10; t < 20; ++t) frozen[static_cast<std::size_t>(t)].speed = 0.0;
    const auto s2 = replay::run_replay(model().network, frozen, config);
    // captures from t >= 10 are never queued; the t=9 capture (effective
    // 12.15) is the last one ever applied
    for (int t = 14; t < 20; ++t) {
      REQUIRE(s2.steps[static_cast<std::size_t>(t)].camera_scores.has_value());
      CHECK((*s2.steps[static_cast<std::size_t>(t)].camera_scores)[9 % 7] == 1.0);
    }
  }
}

TEST_CASE("run_replay basics") {
  const ReplayConfig config = default_config();
  CHECK(replay::run_replay(model().network, {}, config).steps.empty());

  SUBCASE("decreasing timestamps are rejected") {
    std::vector<SensorLogRecord> log(2);
    log[0].t = 1.0;
    log[1].t = 0.5;
    log[0].air_temp = log[1].air_temp = 5.0;
    CHECK_THROWS_CODE(replay::run_replay(model().network, log, config),
                      ErrorCode::invalid_argument);
  }

  SUBCASE("replay is deterministic") {
    const auto scenario = sim::load_scenario(testutil::data_dir() / "track_scenario.json");
    const auto drive = sim::generate_drive(model().network, scenario, model().config, 5.0, 11);
    const auto a = replay::run_replay(model().network, drive.records, config);
    const auto b = replay::run_replay(model().network, drive.records, config);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      CHECK(a.steps[i].weather.p == b.steps[i].weather.p);
      CHECK(a.steps[i].friction.p == b.steps[i].friction.p);
      CHECK(a.steps[i].evidence_mask == b.steps[i].evidence_mask);
    }
  }
}

TEST_CASE("conflicting snow camera is overruled by temperature and wetness") {
  // the key fusion behavior: S_C = Snow with warm air and high RCS wetness
  const auto post = bn::posterior_ve(model().network, "W",
                                     {{"S_C", 6}, {"S_T", 0}, {"S_RCS1", 2}, {"S_RCS2", 2}});
  CHECK(post.argmax() == 1);  // Wet
  CHECK(post.p[2] < 0.01);    // Snow is effectively ruled out
}

TEST_CASE("replay weather accuracy matches the model-predicted rate") {
  // constant-conditions drive; compare the empirical argmax accuracy to the
  // exactly computed expected accuracy of the same decision rule, accounting
  // for the delayed camera being independent of the current weather sample
  const bn::Network& net = model().network;
  const ReplayConfig config = default_config();

  sim::Scenario scenario{{{100.0, "Asphalt", false, 12.0, 12.6}}};
  const auto drive = sim::generate_drive(net, scenario, model().config, 10.0, 99);
  const auto series = replay::run_replay(net, drive.records, config);
  REQUIRE(series.steps.size() == 1000);

  std::size_t hits = 0;
  for (std::size_t i = 0; i < series.steps.size(); ++i)
    hits += series.steps[i].weather.argmax() == drive.truth[i].weather ? 1 : 0;
  const double empirical = static_cast<double>(hits) / static_cast<double>(series.steps.size());

  // exact expected accuracy of the replay decision rule
  const int r0 = 0, p0 = 1, st0 = 0;  // Asphalt, no precipitation, S_T1
  const auto& t_rows = net.cpt(net.index_of("T")).rows;
  const auto& w_rows = net.cpt(net.index_of("W")).rows;
  const auto& mu_rows = net.cpt(net.index_of("mu_max")).rows;
  const auto& cam_rows = net.cpt(net.index_of("S_C")).rows;
  const auto& rcs_rows = net.cpt(net.index_of("S_RCS1")).rows;
  const auto& fo_rows = net.cpt(net.index_of("S_FO")).rows;

  std::array<double, 3> p_w{};  // P(W | roots)
  for (int t = 0; t < 4; ++t)
    for (int w = 0; w < 3; ++w)
      p_w[static_cast<std::size_t>(w)] +=
          t_rows[static_cast<std::size_t>(st0)][static_cast<std::size_t>(t)] *
          w_rows[static_cast<std::size_t>(p0 * 4 + t)][static_cast<std::size_t>(w)];

  std::array<double, 7> p_sc{};  // delayed camera, independent of current W
  for (int w = 0; w < 3; ++w)
    for (int sc = 0; sc < 7; ++sc)
      p_sc[static_cast<std::size_t>(sc)] +=
          p_w[static_cast<std::size_t>(w)] *
          cam_rows[static_cast<std::size_t>(r0 * 3 + w)][static_cast<std::size_t>(sc)];

  double expected = 0.0;
  for (int w = 0; w < 3; ++w) {
    if (p_w[static_cast<std::size_t>(w)] == 0.0) continue;
    std::array<double, 8> p_fo{};  // P(S_FO | roots, w)
    for (int mu = 0; mu < 8; ++mu)
      for (int fo = 0; fo < 8; ++fo)
        p_fo[static_cast<std::size_t>(fo)] +=
            mu_rows[static_cast<std::size_t>(r0 * 3 + w)][static_cast<std::size_t>(mu)] *
            fo_rows[static_cast<std::size_t>(mu)][static_cast<std::size_t>(fo)];
    for (int sc = 0; sc < 7; ++sc)
      for (int c1 = 0; c1 < 3; ++c1)
        for (int c2 = 0; c2 < 3; ++c2)
          for (int fo = 0; fo < 8; ++fo) {
            const double p_case =
                p_w[static_cast<std::size_t>(w)] * p_sc[static_cast<std::size_t>(sc)] *
                rcs_rows[static_cast<std::size_t>(r0 * 3 + w)][static_cast<std::size_t>(c1)] *
                rcs_rows[static_cast<std::size_t>(r0 * 3 + w)][static_cast<std::size_t>(c2)] *
                p_fo[static_cast<std::size_t>(fo)];
            if (p_case == 0.0) continue;
            const auto post = bn::posterior_ve(
                net, "W",
                {{"S_C", sc}, {"S_T", st0}, {"S_RCS1", c1}, {"S_RCS2", c2}, {"S_FO", fo}});
            if (post.argmax() == w) expected += p_case;
          }
  }
  CHECK(empirical >= expected - 0.03);
  CHECK(std::fabs(empirical - expected) < 0.03);
}

TEST_CASE("gating is conservative on average") {
  const bn::Network& net = model().network;
  sim::Scenario scenario{{{25.0, "Concrete", true, 8.0, 10.0},
                          {25.0, "Asphalt", false, 2.0, 10.0}}};
  const auto drive = sim::generate_drive(net, scenario, model().config, 10.0, 17);

  ReplayConfig with = default_config();
  ReplayConfig without = default_config();
  without.gate.threshold = 1e9;  // never passes -> S_FO never observed

  const auto a = replay::run_replay(net, drive.records, with);
  const auto b = replay::run_replay(net, drive.records, without);
  double h_with = 0.0, h_without = 0.0;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    h_with += entropy(a.steps[i].friction);
    h_without += entropy(b.steps[i].friction);
    CHECK((b.steps[i].evidence_mask & (1u << 4)) == 0);
  }
  CHECK(h_without >= h_with);
}

TEST_CASE("replay_report compares camera and fused posteriors") {
  const bn::Network& net = model().network;
  const ReplayConfig config = default_config();
  const auto scenario = sim::load_scenario(testutil::data_dir() / "track_scenario.json");
  auto drive = sim::generate_drive(net, scenario, model().config, 5.0, 123);

  SUBCASE("corrupted snow camera on a wet segment favors the network") {
    // overwrite camera scores with one-hot Snow on the wet-concrete segment
    for (std::size_t i = 600; i < 900; ++i) {
      std::array<double, 7> snow{};
      snow[6] = 1.0;
      drive.records[i].camera_scores = snow;
    }
    const auto series = replay::run_replay(net, drive.records, config);
    const auto report = replay::replay_report(series, drive.truth);
    CHECK(report.bn.acc_weather > report.camera.acc_weather + 0.10);
    CHECK(report.bn.hellinger_weather < report.camera.hellinger_weather);
  }

  SUBCASE("length mismatch and empty slices are reported") {
    const auto series = replay::run_replay(net, drive.records, config);
    CHECK_THROWS_CODE(
        replay::replay_report(series, std::span<const replay::GroundTruthRecord>(
                                          drive.truth.data(), drive.truth.size() - 1)),
        ErrorCode::length_mismatch);

    auto all_snow = drive;
    for (auto& rec : all_snow.records) {
      std::array<double, 7> snow{};
      snow[6] = 1.0;
      rec.camera_scores = snow;
    }
    const auto snow_series = replay::run_replay(net, all_snow.records, config);
    CHECK_THROWS_CODE(replay::replay_report(snow_series, all_snow.truth),
                      ErrorCode::empty_after_exclusion);
  }
}

TEST_CASE("log CSV round-trip preserves presence patterns") {
  const auto path = testutil::temp_file("log_roundtrip.csv");
  std::vector<SensorLogRecord> records(3);
  records[0].t = 0.0;
  records[0].speed = 5.0;
  records[0].air_temp = 7.5;
  records[1].t = 0.5;
  records[1].speed = 5.0;
  records[1].air_temp = 7.5;
  records[1].rcs1_raw = 1234;
  records[1].observer_mu = 0.525;
  records[1].dfx_dmu = std::array<double, 4>{1, 2, 3, 4};
  records[1].dfy_dmu = std::array<double, 4>{5, 6, 7, 8};
  records[1].fz = std::array<double, 4>{4000, 4100, 4200, 4300};
  records[2].t = 1.0;
  records[2].speed = 0.0;
  records[2].air_temp = 7.5;
  records[2].camera_scores = std::array<double, 7>{0, 0, 1, 0, 0, 0, 0};

  SUBCASE("nonpositive vertical loads are rejected") {
    auto bad = records;
    bad[1].fz = std::array<double, 4>{4000, 0, 4200, 4300};
    replay::write_log_csv(bad, path);
    CHECK_THROWS_CODE(replay::load_log_csv(path), ErrorCode::parse_error);
  }

  replay::write_log_csv(records, path);
  const auto loaded = replay::load_log_csv(path);
  REQUIRE(loaded.size() == 3);
  CHECK(!loaded[0].camera_scores);
  CHECK(!loaded[0].rcs1_raw);
  CHECK(loaded[1].rcs1_raw == 1234u);
  CHECK(!loaded[1].rcs2_raw);
  CHECK(loaded[1].observer_mu == doctest::Approx(0.525));
  CHECK(loaded[1].fz.has_value());
  CHECK((*loaded[1].fz)[3] == doctest::Approx(4300));
  CHECK(loaded[2].camera_scores.has_value());
  CHECK((*loaded[2].camera_scores)[2] == 1.0);
}
