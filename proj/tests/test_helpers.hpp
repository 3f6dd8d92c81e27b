// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "frictionnet/inference.hpp"
#include "frictionnet/network.hpp"

namespace testutil {

inline std::filesystem::path data_dir() { return FRICTIONNET_DATA_DIR; }

inline std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "frictionnet_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline std::vector<double> random_row(std::mt19937_64& rng, int card) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  std::vector<double> row(static_cast<std::size_t>(card));
  double sum = 0.0;
  for (auto& v : row) sum += (v = dist(rng));
  for (auto& v : row) v /= sum;
  return row;
}

// Random DAG over <= max_nodes variables with <= max_states states each;
// parents drawn from earlier variables so the index order is topological.
inline frictionnet::bn::Network random_network(std::mt19937_64& rng, int max_nodes = 8,
                                               int max_states = 4) {
  using namespace frictionnet::bn;
  const int n = std::uniform_int_distribution<int>(2, max_nodes)(rng);
  std::vector<Variable> vars;
  std::vector<Cpt> cpts;
  for (int i = 0; i < n; ++i) {
    const int card = std::uniform_int_distribution<int>(2, max_states)(rng);
    Variable v;
    v.name = "X" + std::to_string(i);
    for (int s = 0; s < card; ++s) v.states.push_back("s" + std::to_string(s));
    v.scale = Scale::ordinal;
    vars.push_back(std::move(v));

    Cpt cpt;
    cpt.child = "X" + std::to_string(i);
    if (i > 0) {
      const int max_parents = std::min(i, 3);
      const int k = std::uniform_int_distribution<int>(0, max_parents)(rng);
      std::vector<int> pool(static_cast<std::size_t>(i));
      for (int p = 0; p < i; ++p) pool[static_cast<std::size_t>(p)] = p;
      std::shuffle(pool.begin(), pool.end(), rng);
      std::vector<int> chosen(pool.begin(), pool.begin() + k);
      std::sort(chosen.begin(), chosen.end());
      for (int p : chosen) cpt.parents.push_back("X" + std::to_string(p));
    }
    std::size_t rows = 1;
    for (const auto& pname : cpt.parents)
      for (const auto& v : vars)
        if (v.name == pname) rows *= static_cast<std::size_t>(v.cardinality());
    for (std::size_t r = 0; r < rows; ++r) cpt.rows.push_back(random_row(rng, card));
    cpts.push_back(std::move(cpt));
  }
  return Network::build(std::move(vars), std::move(cpts));
}

inline frictionnet::bn::Evidence random_evidence(std::mt19937_64& rng,
                                                 const frictionnet::bn::Network& net,
                                                 int exclude_var) {
  frictionnet::bn::Evidence ev;
  for (int i = 0; i < net.size(); ++i) {
    if (i == exclude_var) continue;
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.4)
      ev[net.variable(i).name] =
          std::uniform_int_distribution<int>(0, net.variable(i).cardinality() - 1)(rng);
  }
  return ev;
}

}  // namespace testutil
