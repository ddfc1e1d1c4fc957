#pragma once

#include <span>

#include "ecoepi/grid.hpp"

namespace ecoepi {

// Principal eigenpair of -d Lap + q(x) with zero boundary values.
struct EigenResult {
  double lambda = 0.0;
  Field phi;            // positive eigenfunction, normalized to max = 1
  int iterations = 0;
  double residual = 0.0;  // sup norm of (-d Lap + q) phi - lambda phi
};

// Inverse power iteration on (-d Lap_h + q + s)^{-1} with the positivity
// shift s = max(0, -min q) + 1. The shifted operator is an M-matrix, so the
// iterates stay positive and converge to the positive principal mode from
// the all-ones start. The factorization is built once and reused.
EigenResult principal_eigenvalue(const Grid& g, double diffusivity,
                                 std::span<const double> q);
EigenResult principal_eigenvalue(const Grid& g, double diffusivity,
                                 double q_constant);

// Principal eigenvalue of -d Lap with zero potential.
double lambda0(const Grid& g, double diffusivity);

}  // namespace ecoepi
