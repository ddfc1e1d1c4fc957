#include "ecoepi/grid.hpp"

#include <cmath>
#include <string>

#include "ecoepi/kernels.hpp"

namespace ecoepi {

Grid::Grid(double length, int interior, Bc bc)
    : length_(length), interior_(interior), bc_(bc) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw ConfigError("grid length must be positive and finite");
  if (interior < 3)
    throw ConfigError("grid needs at least 3 interior nodes, got " +
                      std::to_string(interior));
  h_ = length_ / static_cast<double>(interior_ + 1);
}

void Grid::check_conforming(std::span<const double> u) const {
  if (u.size() != nodes())
    throw SolverError("field of size " + std::to_string(u.size()) +
                      " does not conform to grid with " +
                      std::to_string(nodes()) + " nodes");
}

Field apply_laplacian(const Grid& g, std::span<const double> u) {
  g.check_conforming(u);
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const std::size_t n = u.size();
  Field out(n);
  if (g.bc() == Bc::Dirichlet) {
    for (std::size_t i = 0; i < n; ++i) {
      const double left = (i == 0) ? 0.0 : u[i - 1];
      const double right = (i + 1 == n) ? 0.0 : u[i + 1];
      out[i] = (left - 2.0 * u[i] + right) * inv_h2;
    }
  } else {
    out[0] = 2.0 * (u[1] - u[0]) * inv_h2;
    for (std::size_t i = 1; i + 1 < n; ++i)
      out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2;
    out[n - 1] = 2.0 * (u[n - 2] - u[n - 1]) * inv_h2;
  }
  return out;
}

double trapezoid(const Grid& g, std::span<const double> u) {
  g.check_conforming(u);
  return kernels::trapezoid(kernels::Backend::serial, g.h(), u,
                            g.bc() == Bc::Neumann);
}

HelmholtzSolver::HelmholtzSolver(const Grid& g, double diffusivity,
                                 double shift)
    : grid_(g) {
  if (!(diffusivity > 0.0))
    throw SolverError("diffusivity must be strictly positive");
  if (g.bc() == Bc::Neumann && !(shift > 0.0))
    throw SolverError(
        "Neumann Helmholtz operator is singular at zero shift (constants lie "
        "in the kernel of the Laplacian)");
  if (shift < 0.0)
    throw SolverError("negative shift is outside the solver contract");

  const double t = diffusivity / (g.h() * g.h());
  const std::size_t n = g.nodes();
  std::vector<double> diag(n, shift + 2.0 * t);
  lower_.assign(n, -t);
  upper_.assign(n, -t);
  if (g.bc() == Bc::Neumann) {
    // Reflected ghost nodes double the off-diagonal entries in the end rows.
    upper_[0] = -2.0 * t;
    lower_[n - 1] = -2.0 * t;
  }
  lower_[0] = 0.0;
  upper_[n - 1] = 0.0;

  // Thomas LU. The matrix is strictly diagonally dominant for shift > 0 and
  // irreducibly dominant for the Dirichlet shift = 0 case, so no pivoting.
  pivot_.resize(n);
  pivot_[0] = diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower_[i] / pivot_[i - 1];
    lower_[i] = w;
    pivot_[i] = diag[i] - w * upper_[i - 1];
  }
}

void HelmholtzSolver::solve(std::span<const double> rhs,
                            std::span<double> out) const {
  grid_.check_conforming(rhs);
  grid_.check_conforming(out);
  const std::size_t n = rhs.size();
  out[0] = rhs[0];
  for (std::size_t i = 1; i < n; ++i) out[i] = rhs[i] - lower_[i] * out[i - 1];
  out[n - 1] /= pivot_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    out[i] = (out[i] - upper_[i] * out[i + 1]) / pivot_[i];
}

Field HelmholtzSolver::solve(std::span<const double> rhs) const {
  Field out(rhs.size());
  solve(rhs, out);
  return out;
}

Field solve_helmholtz(const Grid& g, double diffusivity, double shift,
                      std::span<const double> rhs) {
  return HelmholtzSolver(g, diffusivity, shift).solve(rhs);
}

}  // namespace ecoepi
