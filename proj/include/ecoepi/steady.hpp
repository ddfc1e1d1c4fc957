#pragma once

#include <array>
#include <optional>
#include <span>

#include "ecoepi/eigen.hpp"
#include "ecoepi/grid.hpp"
#include "ecoepi/model.hpp"

namespace ecoepi::steady {

// Shared Newton policy for the elliptic solvers.
struct NewtonOptions {
  int max_outer = 50;
  int max_halvings = 30;
  double residual_target = 1e-11;  // aim for this, limited by the float floor
  double accept_residual = 1e-9;   // hard contract; worse means divergence
  // Positive-branch test: min(u) > positivity_ratio * max(u).
  double positivity_ratio = 1e-12;
};

// ---- Scalar logistic problem: -d Lap u = r(x) u - kappa u^2, u = 0 on the
// boundary. A positive solution exists iff lambda1_d(-r) < 0.

struct LogisticReport {
  bool exists_predicted = false;
  double lambda_indicator = 0.0;  // lambda1_d(-r); existence iff negative
  std::optional<Field> solution;
  int newton_iterations = 0;
  double residual = 0.0;
};

LogisticReport solve_logistic(const Grid& g, double diffusivity,
                              std::span<const double> r, double kappa);
LogisticReport solve_logistic(const Grid& g, double diffusivity, double r,
                              double kappa);

// Prey-only profile S*: r = a - b, kappa = c.
LogisticReport solve_S_star(const Grid& g, const Parameters& p);

// ---- Predator-free pair (S~, I~): exists iff S* exists and
// lambda1_d(b - (k-c) S*) < 0. Built from the sum identity S~ + I~ = S*:
// I~ solves the logistic problem with r = (k-c) S* - b, kappa = k.

struct SIReport {
  bool exists_predicted = false;
  EigenvalueBundle eig;
  std::optional<Field> S;
  std::optional<Field> I;
  int newton_iterations = 0;
  double residual = 0.0;        // sup norm over both equations
  double identity_error = 0.0;  // sup |S + I - S*|
};

SIReport solve_SI(const Grid& g, const Parameters& p);

// ---- Disease-free pair (S^, P^) of the prey-predator subsystem: exists iff
// S* exists and lambda1_D(rho - theta S*) < 0. Coupled Newton from the
// bifurcation-mode initial guess, with a parameter ramp in theta as a
// fallback when the plain solve fails.

struct PreyPredatorReport {
  bool exists_predicted = false;
  EigenvalueBundle eig;
  std::optional<Field> S;
  std::optional<Field> P;
  int newton_iterations = 0;
  double residual = 0.0;
  bool used_continuation = false;
};

PreyPredatorReport solve_prey_predator(const Grid& g, const Parameters& p);

// ---- Full three-species profile. Exists iff additionally
// lambda1_d(b - (k-c) S^ + ell P^) < 0. Constructed through the identities
// S + I = S^, P = P^ with I solving the logistic problem with
// r = (k-c) S^ - b - ell P^, kappa = k.

struct FullReport {
  bool exists_predicted = false;
  EigenvalueBundle eig;
  std::optional<Field> S;
  std::optional<Field> I;
  std::optional<Field> P;
  int newton_iterations = 0;
  double residual = 0.0;
  double identity_error_prey = 0.0;      // sup |S + I - S^|
  double identity_error_predator = 0.0;  // sup |P - P^|
};

FullReport solve_full(const Grid& g, const Parameters& p);

// Eigenvalue thresholds for the grid at hand. Entries that need S* or
// (S^, P^) stay empty when those profiles do not exist.
EigenvalueBundle existence_conditions(const Grid& g, const Parameters& p);

// ---- Discrete residuals evaluated through apply_laplacian and the model
// reaction terms. These are deliberately independent of the Newton
// machinery; reports and tests verify solutions against them.

Field logistic_residual(const Grid& g, double diffusivity,
                        std::span<const double> r, double kappa,
                        std::span<const double> u);
std::array<Field, 2> si_residual(const Grid& g, const Parameters& p,
                                 std::span<const double> S,
                                 std::span<const double> I);
std::array<Field, 2> prey_predator_residual(const Grid& g,
                                            const Parameters& p,
                                            std::span<const double> S,
                                            std::span<const double> P);
std::array<Field, 3> full_residual(const Grid& g, const Parameters& p,
                                   std::span<const double> S,
                                   std::span<const double> I,
                                   std::span<const double> P);

// ---- Pointwise reaction Jacobians (row major) backing the Newton solvers.
// Unit tests check them against central finite differences.

inline double logistic_reaction_derivative(double r, double kappa, double u) {
  return r - 2.0 * kappa * u;
}
std::array<double, 4> si_reaction_jacobian(const Parameters& p, double S,
                                           double I);
std::array<double, 4> prey_predator_reaction_jacobian(const Parameters& p,
                                                      double S, double P);
std::array<double, 9> full_reaction_jacobian(const Parameters& p, double S,
                                             double I, double P);

// ---- Direct coupled Newton routes from caller-supplied starts. Used by the
// uniqueness probes and as a cross-check of the identity-based construction.
// Returns the positive solution, or nothing when the iteration diverges or
// leaves the positive branch.

std::optional<std::array<Field, 2>> newton_SI_direct(
    const Grid& g, const Parameters& p, std::array<Field, 2> init,
    int* iterations = nullptr, double* residual = nullptr);
std::optional<std::array<Field, 2>> newton_prey_predator_direct(
    const Grid& g, const Parameters& p, std::array<Field, 2> init,
    int* iterations = nullptr, double* residual = nullptr);
std::optional<std::array<Field, 3>> newton_full_direct(
    const Grid& g, const Parameters& p, std::array<Field, 3> init,
    int* iterations = nullptr, double* residual = nullptr);
std::optional<Field> newton_logistic_direct(const Grid& g, double diffusivity,
                                            std::span<const double> r,
                                            double kappa, Field init,
                                            int* iterations = nullptr,
                                            double* residual = nullptr);

}  // namespace ecoepi::steady
