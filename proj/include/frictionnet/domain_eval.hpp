// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "frictionnet/metrics.hpp"
#include "frictionnet/network.hpp"

namespace frictionnet::sweep {

// Canonical sensor order; subset masks use bit i for kSensorOrder[i].
inline constexpr std::array<const char*, 5> kSensorOrder{"S_C", "S_T", "S_RCS1", "S_RCS2",
                                                         "S_FO"};
inline constexpr std::array<const char*, 3> kTargetOrder{"R", "W", "mu_max"};

struct SensorSubset {
  unsigned mask = 0;

  static SensorSubset from_names(std::span<const std::string> names);
  static SensorSubset parse(std::string_view comma_or_semicolon_joined);  // "" = empty set
  std::string name() const;  // semicolon-joined, canonical order, "" for the empty set
  bool contains(std::size_t sensor) const { return (mask >> sensor) & 1u; }
};

std::vector<SensorSubset> all_subsets();  // the 32 subsets in mask order

struct EvalRow {
  SensorSubset subset;
  std::string variable;
  metrics::MetricKind metric = metrics::MetricKind::hellinger;
  double mean = 0.0;           // equal weight per domain combination
  double weighted_mean = 0.0;  // weighted by the combination's joint probability
  std::uint64_t n = 0;         // combinations with joint probability > 0
};

struct EvalResult {
  std::vector<EvalRow> rows;  // subsets in mask order, variables R, W, mu_max
};

struct EvalOptions {
  int threads = 0;        // 0: hardware concurrency
  bool memoize = true;    // spec contract; off only for the soundness test
  bn::Evidence domain_filter;  // fixes variables during enumeration (tests)
};

// Streams every complete assignment with joint probability > 0 in
// topological odometer order, with its joint probability.
void enumerate_domain(const bn::Network& net,
                      const std::function<void(std::span<const int>, double)>& visit,
                      const bn::Evidence& filter = {});

// Exhaustive evaluation over the domain for each sensor subset: posterior of
// R, W and mu_max given the combination's projection onto the subset,
// distance to the delta ground truth, averaged with equal weight per
// combination. Posteriors are memoized by projected evidence key; the memo
// behaves as a concurrent at-most-once map. Accumulation is compensated and
// chunk-ordered, so thread count does not affect the result.
EvalResult evaluate_subsets(const bn::Network& net, std::span<const SensorSubset> subsets,
                            const EvalOptions& options = {});

// CSV: subset,variable,metric,mean,n[,weighted_mean]; shortest round-trip
// number formatting; deterministic row order.
void emit_report(const EvalResult& result, const std::filesystem::path& path,
                 bool include_weighted);
EvalResult load_report(const std::filesystem::path& path);

}  // namespace frictionnet::sweep
