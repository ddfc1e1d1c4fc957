#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecoepi/errors.hpp"

namespace ecoepi {

enum class Bc { Neumann, Dirichlet };

using Field = std::vector<double>;

// Uniform discretization of the interval (0, length) with n interior nodes
// and spacing h = length/(n+1).
//
// Storage convention: Dirichlet fields hold interior nodes only (boundary
// values are identically zero); Neumann fields hold all n+2 nodes including
// both endpoints.
class Grid {
 public:
  Grid(double length, int interior, Bc bc);

  double length() const { return length_; }
  int interior() const { return interior_; }
  Bc bc() const { return bc_; }
  double h() const { return h_; }

  std::size_t nodes() const {
    return bc_ == Bc::Neumann ? static_cast<std::size_t>(interior_) + 2
                              : static_cast<std::size_t>(interior_);
  }

  // Coordinate of stored node i.
  double x(std::size_t i) const {
    return bc_ == Bc::Neumann ? static_cast<double>(i) * h_
                              : static_cast<double>(i + 1) * h_;
  }

  Field make_field(double value = 0.0) const { return Field(nodes(), value); }

  void check_conforming(std::span<const double> u) const;

 private:
  double length_;
  int interior_;
  Bc bc_;
  double h_;
};

// Second-order central-difference Laplacian. Dirichlet: ghost values are
// zero. Neumann: zero flux by reflection (ghost equals the first interior
// neighbour), which keeps the stencil second order at the ends.
Field apply_laplacian(const Grid& g, std::span<const double> u);

// Trapezoid quadrature over (0, length). Dirichlet fields get implicit zero
// boundary values, so the rule reduces to h * sum(interior).
double trapezoid(const Grid& g, std::span<const double> u);

// Prefactored solver for (shift - diffusivity * Lap_h) u = rhs.
// The Neumann operator is singular at shift = 0 (constants in the kernel).
class HelmholtzSolver {
 public:
  HelmholtzSolver(const Grid& g, double diffusivity, double shift);

  void solve(std::span<const double> rhs, std::span<double> out) const;
  Field solve(std::span<const double> rhs) const;

  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  std::vector<double> lower_;   // multipliers from the LU sweep
  std::vector<double> pivot_;   // modified diagonal
  std::vector<double> upper_;
};

// One-shot convenience wrapper around HelmholtzSolver.
Field solve_helmholtz(const Grid& g, double diffusivity, double shift,
                      std::span<const double> rhs);

}  // namespace ecoepi
