#include "ecoepi/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ecoepi/linalg.hpp"

namespace ecoepi {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kRayleighTol = 1e-12;
constexpr double kResidualTol = 1e-10;

struct Operator {
  double t;  // diffusivity / h^2
  std::span<const double> q;

  // y = (-d Lap_h + q) x, zero boundary values.
  void apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double left = (i == 0) ? 0.0 : x[i - 1];
      const double right = (i + 1 == n) ? 0.0 : x[i + 1];
      y[i] = t * (2.0 * x[i] - left - right) + q[i] * x[i];
    }
  }
};

}  // namespace

EigenResult principal_eigenvalue(const Grid& g, double diffusivity,
                                 std::span<const double> q) {
  if (g.bc() != Bc::Dirichlet)
    throw SolverError("principal eigenvalue is defined on Dirichlet grids");
  if (!(diffusivity > 0.0))
    throw SolverError("diffusivity must be strictly positive");
  g.check_conforming(q);

  const std::size_t n = g.nodes();
  const double t = diffusivity / (g.h() * g.h());
  const Operator op{t, q};

  const double qmin = *std::min_element(q.begin(), q.end());
  const double shift = std::fmax(0.0, -qmin) + 1.0;

  std::vector<double> sub(n, -t), sup(n, -t), diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = 2.0 * t + q[i] + shift;
  sub[0] = 0.0;
  sup[n - 1] = 0.0;
  const TridiagonalLU factor(sub, diag, sup);

  Field v(n, 1.0), w(n), av(n);
  double lambda_prev = std::numeric_limits<double>::infinity();
  double lambda = 0.0;
  double best_residual = std::numeric_limits<double>::infinity();
  Field best_phi;
  double best_lambda = 0.0;
  int stagnant = 0;
  int iter = 0;

  for (iter = 1; iter <= kMaxIterations; ++iter) {
    factor.solve(v, w);
    const double wmax = *std::max_element(w.begin(), w.end());
    if (!(wmax > 0.0) || !std::isfinite(wmax))
      throw SolverError("inverse iteration lost positivity");
    for (double& x : w) x /= wmax;
    v = w;

    op.apply(v, av);
    double num = 0.0, den = 0.0, res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += v[i] * av[i];
      den += v[i] * v[i];
    }
    lambda = num / den;
    for (std::size_t i = 0; i < n; ++i)
      res = std::fmax(res, std::fabs(av[i] - lambda * v[i]));

    if (res < best_residual) {
      best_residual = res;
      best_phi = v;
      best_lambda = lambda;
      stagnant = 0;
    } else {
      ++stagnant;
    }

    const bool rayleigh_done =
        std::fabs(lambda - lambda_prev) <= kRayleighTol * (1.0 + std::fabs(lambda));
    lambda_prev = lambda;

    if (rayleigh_done && best_residual <= kResidualTol) break;
    // Once the Rayleigh quotient has settled, a non-improving residual means
    // the float floor of the stencil arithmetic has been reached.
    if (rayleigh_done && stagnant >= 10) break;
  }
  if (iter > kMaxIterations)
    throw SolverError("inverse power iteration hit the iteration cap (" +
                      std::to_string(kMaxIterations) + ")");

  EigenResult out;
  out.lambda = best_lambda;
  out.phi = std::move(best_phi);
  out.iterations = iter;
  out.residual = best_residual;
  if (*std::min_element(out.phi.begin(), out.phi.end()) <= 0.0)
    throw SolverError("principal eigenfunction lost interior positivity");
  return out;
}

EigenResult principal_eigenvalue(const Grid& g, double diffusivity,
                                 double q_constant) {
  Field q(g.nodes(), q_constant);
  return principal_eigenvalue(g, diffusivity, q);
}

double lambda0(const Grid& g, double diffusivity) {
  return principal_eigenvalue(g, diffusivity, 0.0).lambda;
}

}  // namespace ecoepi
