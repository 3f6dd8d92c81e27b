// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "frictionnet/drive_sim.hpp"
#include "frictionnet/model_io.hpp"
#include "test_helpers.hpp"

using namespace frictionnet;

namespace {

const Model& model() {
  static const Model m = load_model(testutil::data_dir() / "roadnet.json");
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
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

}  // namespace

TEST_CASE("ancestral_sample honors clamps and the CPT rows") {
  const bn::Network& net = model().network;

  SUBCASE("clamping everything returns the clamp") {
    bn::Evidence clamp;
    for (int i = 0; i < net.size(); ++i) clamp[net.variable(i).name] = 1;
    const auto a = sim::ancestral_sample(net, clamp, 1u);
    for (int i = 0; i < net.size(); ++i) CHECK(a[static_cast<std::size_t>(i)] == 1);
  }

  SUBCASE("single-node frequencies converge to the prior") {
    const bn::Network one = bn::Network::build({{"A", {"a0", "a1"}}},
                                               {{"A", {}, {{0.3, 0.7}}}});
    std::mt19937_64 rng(2024);
    int hits = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) hits += sim::ancestral_sample(one, {}, rng)[0] == 1 ? 1 : 0;
    CHECK(std::fabs(static_cast<double>(hits) / n - 0.7) < 0.01);
  }

  SUBCASE("clamping S_T reproduces the pavement-temperature row") {
    std::mt19937_64 rng(77);
    const int t_var = net.index_of("T");
    std::array<int, 4> counts{};
    const int n = 100000;
    for (int k = 0; k < n; ++k)
      ++counts[static_cast<std::size_t>(
          sim::ancestral_sample(net, {{"S_T", 1}}, rng)[static_cast<std::size_t>(t_var)])];
    const std::array<double, 4> expected{0.4146, 0.5073, 0.0754, 0.0027};
    for (int s = 0; s < 4; ++s)
      CHECK(std::fabs(static_cast<double>(counts[static_cast<std::size_t>(s)]) / n -
                      expected[static_cast<std::size_t>(s)]) < 0.01);
  }

  SUBCASE("invalid clamps are rejected") {
    CHECK_THROWS_CODE(sim::ancestral_sample(net, {{"nope", 0}}, 1u), ErrorCode::invalid_clamp);
    CHECK_THROWS_CODE(sim::ancestral_sample(net, {{"R", 9}}, 1u), ErrorCode::invalid_clamp);
  }
}

TEST_CASE("generate_drive") {
  const bn::Network& net = model().network;

  SUBCASE("weather frequencies follow the (false, T1) row on a dry segment") {
    sim::Scenario scenario{{{10000.0, "Asphalt", false, 12.0, 20.0}}};
    const auto drive = sim::generate_drive(net, scenario, model().config, 10.0, 31);
    REQUIRE(drive.truth.size() == 100000);
    std::array<int, 3> counts{};
    for (const auto& g : drive.truth) ++counts[static_cast<std::size_t>(g.weather)];
    const std::array<double, 3> expected{0.95, 0.05, 0.0};  // Table-3 row (false, T1)
    for (int s = 0; s < 3; ++s)
      CHECK(std::fabs(static_cast<double>(counts[static_cast<std::size_t>(s)]) / 100000.0 -
                      expected[static_cast<std::size_t>(s)]) < 0.01);
  }

  SUBCASE("records and truth stay aligned with arithmetic timestamps") {
    sim::Scenario scenario{{{2.0, "Concrete", true, 3.0, 15.0},
                            {1.5, "Cobblestone", false, -2.0, 8.0}}};
    const auto drive = sim::generate_drive(net, scenario, model().config, 4.0, 7);
    REQUIRE(drive.records.size() == 14);  // 8 + 6 samples
    REQUIRE(drive.truth.size() == 14);
    for (std::size_t i = 0; i < drive.records.size(); ++i) {
      CHECK(drive.records[i].t == doctest::Approx(static_cast<double>(i) / 4.0));
      CHECK(drive.records[i].t == drive.truth[i].t);
    }
    CHECK(drive.records[0].speed == 15.0);
    CHECK(drive.records[13].speed == 8.0);

    // raw sensor values invert the discretizers
    for (const auto& r : drive.records) {
      CHECK(r.camera_scores.has_value());
      CHECK(r.rcs1_raw.has_value());
      CHECK(*r.rcs1_raw <= 65535);
      CHECK(r.observer_mu.has_value());
    }
  }

  SUBCASE("speed 0 still generates records") {
    sim::Scenario scenario{{{1.0, "Asphalt", false, 10.0, 0.0}}};
    const auto drive = sim::generate_drive(net, scenario, model().config, 10.0, 3);
    CHECK(drive.records.size() == 10);
    CHECK(drive.records[0].speed == 0.0);
  }

  SUBCASE("fixed seed is reproducible, different seeds differ") {
    sim::Scenario scenario{{{5.0, "Asphalt", true, 8.0, 10.0}}};
    const auto a = sim::generate_drive(net, scenario, model().config, 10.0, 5);
    const auto b = sim::generate_drive(net, scenario, model().config, 10.0, 5);
    const auto c = sim::generate_drive(net, scenario, model().config, 10.0, 6);
    REQUIRE(a.records.size() == b.records.size());
    bool same_ab = true, same_ac = true;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      same_ab = same_ab && a.records[i].rcs1_raw == b.records[i].rcs1_raw &&
                a.records[i].camera_scores == b.records[i].camera_scores;
      same_ac = same_ac && a.records[i].rcs1_raw == c.records[i].rcs1_raw;
    }
    CHECK(same_ab);
    CHECK(!same_ac);
  }
}

TEST_CASE("scenario files") {
  const auto scenario = sim::load_scenario(testutil::data_dir() / "track_scenario.json");
  REQUIRE(scenario.segments.size() == 4);
  CHECK(scenario.segments[0].pavement == "Asphalt");
  CHECK(scenario.segments[1].pavement == "Cobblestone");
  CHECK(scenario.segments[2].pavement == "Concrete");
  CHECK(!scenario.segments[0].precipitation);
  CHECK(scenario.segments[3].precipitation);

  const auto tmp = testutil::temp_file("bad_scenario.json");
  write_file(tmp, R"({"segments": []})");
  CHECK_THROWS_CODE(sim::load_scenario(tmp), ErrorCode::invalid_argument);
  write_file(tmp, R"({"segments": [{"duration_s": -1, "pavement": "Asphalt",
    "precipitation": false, "air_temp_c": 5, "speed_mps": 1}]})");
  CHECK_THROWS_CODE(sim::load_scenario(tmp), ErrorCode::invalid_argument);
  CHECK_THROWS_CODE(sim::load_scenario("/nonexistent.json"), ErrorCode::io_error);
}
