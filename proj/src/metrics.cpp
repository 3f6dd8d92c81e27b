// SPDX-License-Identifier: Apache-2.0
#include "frictionnet/metrics.hpp"

#include <cmath>

#include "frictionnet/kernels.hpp"

namespace frictionnet::metrics {

const char* to_string(MetricKind kind) {
  return kind == MetricKind::wasserstein1 ? "wasserstein1" : "hellinger";
}

MetricKind metric_kind_from(std::string_view name) {
  if (name == "wasserstein1") return MetricKind::wasserstein1;
  if (name == "hellinger") return MetricKind::hellinger;
  throw Error(ErrorCode::parse_error, "unknown metric " + std::string(name));
}

namespace {

void check_dimensions(const bn::Distribution& p, const bn::Distribution& q) {
  if (p.p.size() != q.p.size())
    throw Error(ErrorCode::dimension_mismatch,
                p.variable + " has " + std::to_string(p.p.size()) + " states, " + q.variable +
                    " has " + std::to_string(q.p.size()));
}

}  // namespace

double wasserstein1(const bn::Distribution& p, const bn::Distribution& q) {
  check_dimensions(p, q);
  if (p.scale != bn::Scale::ordinal || q.scale != bn::Scale::ordinal)
    throw Error(ErrorCode::non_ordinal_variable,
                "Wasserstein-1 needs ordinal variables (got " + p.variable + " / " + q.variable + ")");
  return kernels::wasserstein1(p.p, q.p);
}

double hellinger(const bn::Distribution& p, const bn::Distribution& q) {
  check_dimensions(p, q);
  return kernels::hellinger(p.p, q.p);
}

MetricReport mean_distance(
    std::span<const std::pair<bn::Distribution, bn::Distribution>> samples, MetricKind kind) {
  if (samples.empty()) throw Error(ErrorCode::empty_sample_set, "mean over zero samples");
  const std::size_t dim = samples.front().first.p.size();
  double sum = 0.0, comp = 0.0;  // Neumaier
  for (const auto& [truth, estimate] : samples) {
    if (truth.p.size() != dim || estimate.p.size() != dim)
      throw Error(ErrorCode::dimension_mismatch, "sample dimensions differ across the set");
    const double d = kind == MetricKind::hellinger ? hellinger(truth, estimate)
                                                   : wasserstein1(truth, estimate);
    const double t = sum + d;
    comp += std::fabs(sum) >= std::fabs(d) ? (sum - t) + d : (d - t) + sum;
    sum = t;
  }
  MetricReport report;
  report.variable = samples.front().first.variable;
  report.kind = kind;
  report.n = samples.size();
  report.mean = (sum + comp) / static_cast<double>(samples.size());
  return report;
}

double accuracy(std::span<const int> predictions, std::span<const int> truths, bool exclude_nan) {
  if (predictions.size() != truths.size())
    throw Error(ErrorCode::length_mismatch,
                std::to_string(predictions.size()) + " predictions vs " +
                    std::to_string(truths.size()) + " truths");
  std::size_t correct = 0, total = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (exclude_nan && predictions[i] == kNanLabel) continue;
    ++total;
    if (predictions[i] == truths[i]) ++correct;
  }
  if (total == 0) throw Error(ErrorCode::empty_after_exclusion, "no samples left to score");
  return static_cast<double>(correct) / static_cast<double>(total);
}

CameraMarginals camera_scores_to_marginals(std::span<const double> scores) {
  if (scores.size() != 7)
    throw Error(ErrorCode::dimension_mismatch, "camera score vector must have 7 entries");
  double sum = 0.0;
  for (double s : scores) {
    if (!(s >= 0.0))
      throw Error(ErrorCode::unnormalized_scores, "camera scores must be nonnegative");
    sum += s;
  }
  if (std::fabs(sum - 1.0) > 1e-6)
    throw Error(ErrorCode::unnormalized_scores,
                "camera scores sum to " + std::to_string(sum));

  CameraMarginals out;
  out.pavement = bn::Distribution{"pavement", bn::Scale::nominal, std::vector<double>(3, 0.0)};
  out.weather = bn::Distribution{"weather", bn::Scale::nominal, std::vector<double>(3, 0.0)};
  for (int c = 0; c < 7; ++c) {
    out.weather.p[static_cast<std::size_t>(roadnet::kCameraClassWeather[static_cast<std::size_t>(c)])] +=
        scores[static_cast<std::size_t>(c)];
    const int pav = roadnet::kCameraClassPavement[static_cast<std::size_t>(c)];
    if (pav >= 0) out.pavement.p[static_cast<std::size_t>(pav)] += scores[static_cast<std::size_t>(c)];
  }
  for (int pav = 0; pav < 3; ++pav)
    out.pavement.p[static_cast<std::size_t>(pav)] += scores[6] / 3.0;

  int best = 0;
  for (int c = 1; c < 7; ++c)
    if (scores[static_cast<std::size_t>(c)] > scores[static_cast<std::size_t>(best)]) best = c;
  out.pavement_label = roadnet::kCameraClassPavement[static_cast<std::size_t>(best)];
  out.weather_label = roadnet::kCameraClassWeather[static_cast<std::size_t>(best)];
  return out;
}

}  // namespace frictionnet::metrics
