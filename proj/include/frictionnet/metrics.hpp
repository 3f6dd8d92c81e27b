// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "frictionnet/network.hpp"
#include "frictionnet/roadnet.hpp"

namespace frictionnet::metrics {

enum class MetricKind { wasserstein1, hellinger };

const char* to_string(MetricKind kind);
MetricKind metric_kind_from(std::string_view name);

struct MetricReport {
  std::string variable;
  MetricKind kind = MetricKind::hellinger;
  double mean = 0.0;
  std::size_t n = 0;
};

// Sum of absolute CDF differences with unit class spacing. Refused for
// nominal variables (no class order to integrate over).
double wasserstein1(const bn::Distribution& p, const bn::Distribution& q);

// (1/sqrt(2)) * || sqrt(p) - sqrt(q) ||_2, in [0, 1].
double hellinger(const bn::Distribution& p, const bn::Distribution& q);

// Arithmetic mean of per-sample distances, equal weight per sample.
MetricReport mean_distance(
    std::span<const std::pair<bn::Distribution, bn::Distribution>> samples, MetricKind kind);

// Label used where the camera gives no pavement information (Snow argmax).
inline constexpr int kNanLabel = -1;

// Fraction of matching labels. With exclude_nan, kNanLabel predictions are
// removed from numerator and denominator; otherwise they count as incorrect.
double accuracy(std::span<const int> predictions, std::span<const int> truths, bool exclude_nan);

struct CameraMarginals {
  bn::Distribution pavement;  // Asphalt, Concrete, Cobblestone
  bn::Distribution weather;   // Dry, Wet, Snow
  int pavement_label = kNanLabel;  // kNanLabel when the argmax class is Snow
  int weather_label = 0;
};

// Splits SqueezeNet-style class scores (AD, AW, CD, CW, CbD, CbW, S) into
// pavement and weather marginals; the Snow score spreads evenly over the
// three pavements.
CameraMarginals camera_scores_to_marginals(std::span<const double> scores);

}  // namespace frictionnet::metrics
