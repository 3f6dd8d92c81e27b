// SPDX-License-Identifier: Apache-2.0
#include "frictionnet/kernels.hpp"

#include <atomic>
#include <cmath>

#include "frictionnet/error.hpp"

namespace frictionnet::kernels {

namespace scalar {

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void scale(double* x, std::size_t n, double factor) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= factor;
}

double hellinger(const double* p, const double* q, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    acc += d * d;
  }
  const double h = std::sqrt(0.5 * acc);
  return h > 1.0 ? 1.0 : h;
}

double wasserstein1(const double* p, const double* q, std::size_t n) {
  // prefix sums carry a sequential dependence; shared by both backends
  double fp = 0.0, fq = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fp += p[i];
    fq += q[i];
    acc += std::fabs(fp - fq);
  }
  return acc;
}

void hellinger_to_delta(const double* q, double* out, std::size_t n) {
  // H(delta_j, q) = sqrt(1 - sqrt(q_j)): the cross terms of the squared
  // difference collapse because the delta has a single unit entry.
  for (std::size_t i = 0; i < n; ++i) {
    const double v = 1.0 - std::sqrt(q[i]);
    out[i] = std::sqrt(v > 0.0 ? v : 0.0);
  }
}

void wasserstein1_to_delta(const double* q, double* out, std::size_t n) {
  // W1(delta_j, q) = sum_{x<j} F(x) + sum_{x>=j} (1 - F(x))
  double f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f += q[i];
    out[i] = f;  // stash F
  }
  double suffix = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    suffix += 1.0 - out[i];
    out[i] = suffix;  // now sum_{x>=i} (1 - F(x))
  }
  double running_f = 0.0, below = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] += below;
    running_f += q[j];
    below += running_f;
  }
}

}  // namespace scalar

namespace {

constexpr Ops kScalarOps{scalar::sum,        scalar::scale,
                         scalar::hellinger,  scalar::wasserstein1,
                         scalar::hellinger_to_delta, scalar::wasserstein1_to_delta};

Backend detect() {
#if defined(FRICTIONNET_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#endif
  return Backend::scalar;
}

std::atomic<const Ops*> g_active{nullptr};
std::atomic<Backend> g_active_backend{Backend::scalar};

const Ops* init_active() {
  const Backend b = detect();
  const Ops* o = &ops(b);
  g_active_backend.store(b, std::memory_order_relaxed);
  g_active.store(o, std::memory_order_release);
  return o;
}

inline const Ops& active() {
  const Ops* o = g_active.load(std::memory_order_acquire);
  return o ? *o : *init_active();
}

}  // namespace

#if defined(FRICTIONNET_HAVE_AVX2)
extern const Ops kAvx2Ops;  // defined in kernels_avx2.cpp
#endif

bool supported(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(FRICTIONNET_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const Ops& ops(Backend backend) {
  if (!supported(backend))
    throw Error(ErrorCode::invalid_argument, "kernel backend not supported on this CPU");
  switch (backend) {
    case Backend::scalar:
      return kScalarOps;
    case Backend::avx2:
#if defined(FRICTIONNET_HAVE_AVX2)
      return kAvx2Ops;
#else
      break;
#endif
  }
  return kScalarOps;
}

Backend active_backend() {
  active();
  return g_active_backend.load(std::memory_order_relaxed);
}

void set_active_backend(Backend backend) {
  const Ops* o = &ops(backend);
  g_active_backend.store(backend, std::memory_order_relaxed);
  g_active.store(o, std::memory_order_release);
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

void scale(std::span<double> x, double factor) { active().scale(x.data(), x.size(), factor); }

double hellinger(std::span<const double> p, std::span<const double> q) {
  return active().hellinger(p.data(), q.data(), p.size());
}

double wasserstein1(std::span<const double> p, std::span<const double> q) {
  return active().wasserstein1(p.data(), q.data(), p.size());
}

void hellinger_to_delta(std::span<const double> q, std::span<double> out) {
  active().hellinger_to_delta(q.data(), out.data(), q.size());
}

void wasserstein1_to_delta(std::span<const double> q, std::span<double> out) {
  active().wasserstein1_to_delta(q.data(), out.data(), q.size());
}

}  // namespace frictionnet::kernels
