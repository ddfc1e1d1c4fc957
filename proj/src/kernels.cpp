#include "ecoepi/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ecoepi/model.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ecoepi::kernels {

Backend default_backend() {
#ifdef _OPENMP
  return Backend::openmp;
#else
  return Backend::serial;
#endif
}

bool openmp_compiled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

inline std::size_t chunk_count(std::size_t n) {
  return (n + kChunk - 1) / kChunk;
}

// Reduction helper: evaluates `partial(lo, hi)` over fixed chunks and folds
// the partials in chunk order with `combine`. The fold order is identical on
// both backends, which makes the result independent of the thread count.
template <typename PartialFn, typename CombineFn>
double chunked_reduce(Backend be, std::size_t n, double init,
                      PartialFn partial, CombineFn combine) {
  if (n == 0) return init;
  const std::size_t chunks = chunk_count(n);
  std::vector<double> partials(chunks);
  auto run_chunk = [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(lo + kChunk, n);
    partials[c] = partial(lo, hi);
  };
  if (be == Backend::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(chunks); ++c)
      run_chunk(static_cast<std::size_t>(c));
#else
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
#endif
  } else {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  }
  double acc = init;
  for (std::size_t c = 0; c < chunks; ++c) acc = combine(acc, partials[c]);
  return acc;
}

template <typename BodyFn>
void parallel_nodes(Backend be, std::size_t n, BodyFn body) {
  if (be == Backend::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      body(static_cast<std::size_t>(i));
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace

void imex_rhs_full(Backend be, const Parameters& p, double inv_dt,
                   std::span<const double> S, std::span<const double> I,
                   std::span<const double> P, std::span<double> rS,
                   std::span<double> rI, std::span<double> rP) {
  const std::size_t n = S.size();
  parallel_nodes(be, n, [&](std::size_t i) {
    const Rates f = reaction_terms(S[i], I[i], P[i], p);
    rS[i] = inv_dt * S[i] + f.f1;
    rI[i] = inv_dt * I[i] + f.f2;
    rP[i] = inv_dt * P[i] + f.f3;
  });
}

void imex_rhs_pair(Backend be, const PairParams& p, double inv_dt,
                   std::span<const double> u, std::span<const double> v,
                   std::span<double> ru, std::span<double> rv) {
  const std::size_t n = u.size();
  parallel_nodes(be, n, [&](std::size_t i) {
    ru[i] = inv_dt * u[i] + p.b * (p.a - u[i]) * u[i] - p.c * u[i] * v[i];
    rv[i] = inv_dt * v[i] + p.k * (u[i] - p.h) * v[i];
  });
}

double min_value(Backend be, std::span<const double> u) {
  return chunked_reduce(
      be, u.size(), std::numeric_limits<double>::infinity(),
      [&](std::size_t lo, std::size_t hi) {
        double m = u[lo];
        for (std::size_t i = lo + 1; i < hi; ++i) m = std::fmin(m, u[i]);
        return m;
      },
      [](double a, double b) { return std::fmin(a, b); });
}

double max_value(Backend be, std::span<const double> u) {
  return chunked_reduce(
      be, u.size(), -std::numeric_limits<double>::infinity(),
      [&](std::size_t lo, std::size_t hi) {
        double m = u[lo];
        for (std::size_t i = lo + 1; i < hi; ++i) m = std::fmax(m, u[i]);
        return m;
      },
      [](double a, double b) { return std::fmax(a, b); });
}

double max_pair_sum(Backend be, std::span<const double> a,
                    std::span<const double> b) {
  return chunked_reduce(
      be, a.size(), -std::numeric_limits<double>::infinity(),
      [&](std::size_t lo, std::size_t hi) {
        double m = a[lo] + b[lo];
        for (std::size_t i = lo + 1; i < hi; ++i)
          m = std::fmax(m, a[i] + b[i]);
        return m;
      },
      [](double x, double y) { return std::fmax(x, y); });
}

double sup_distance(Backend be, std::span<const double> a,
                    std::span<const double> b) {
  return chunked_reduce(
      be, a.size(), 0.0,
      [&](std::size_t lo, std::size_t hi) {
        double m = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
          m = std::fmax(m, std::fabs(a[i] - b[i]));
        return m;
      },
      [](double x, double y) { return std::fmax(x, y); });
}

bool all_finite(Backend be, std::span<const double> u) {
  const double flag = chunked_reduce(
      be, u.size(), 1.0,
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
          if (!std::isfinite(u[i])) return 0.0;
        return 1.0;
      },
      [](double x, double y) { return std::fmin(x, y); });
  return flag > 0.5;
}

double trapezoid(Backend be, double h, std::span<const double> u,
                 bool halve_ends) {
  if (u.empty()) return 0.0;
  const double total = chunked_reduce(
      be, u.size(), 0.0,
      [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += u[i];
        return s;
      },
      [](double x, double y) { return x + y; });
  const double end_correction =
      halve_ends ? 0.5 * (u.front() + u.back()) : 0.0;
  return h * (total - end_correction);
}

}  // namespace ecoepi::kernels
