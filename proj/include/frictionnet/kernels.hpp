// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

namespace frictionnet::kernels {

// Arithmetic inner loops behind the metrics and the domain sweep. A scalar
// reference implementation always exists; on x86-64 an AVX2 variant is
// selected at runtime when the CPU supports it. Variants are equivalence-
// tested against each other; no function here validates its inputs.
enum class Backend { scalar, avx2 };

struct Ops {
  double (*sum)(const double*, std::size_t);
  void (*scale)(double*, std::size_t, double);
  // (1/sqrt(2)) * || sqrt(p) - sqrt(q) ||_2, clamped to [0, 1]
  double (*hellinger)(const double*, const double*, std::size_t);
  // sum_x |F_p(x) - F_q(x)| with unit class spacing
  double (*wasserstein1)(const double*, const double*, std::size_t);
  // out[j] = distance(delta_j, q) for every class j
  void (*hellinger_to_delta)(const double*, double*, std::size_t);
  void (*wasserstein1_to_delta)(const double*, double*, std::size_t);
};

bool supported(Backend backend);
const Ops& ops(Backend backend);  // throws if unsupported

Backend active_backend();
void set_active_backend(Backend backend);  // throws if unsupported

// dispatched entry points
double sum(std::span<const double> x);
void scale(std::span<double> x, double factor);
double hellinger(std::span<const double> p, std::span<const double> q);
double wasserstein1(std::span<const double> p, std::span<const double> q);
void hellinger_to_delta(std::span<const double> q, std::span<double> out);
void wasserstein1_to_delta(std::span<const double> q, std::span<double> out);

}  // namespace frictionnet::kernels
