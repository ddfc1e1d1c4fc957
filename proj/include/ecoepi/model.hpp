#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecoepi/grid.hpp"
#include "ecoepi/params.hpp"

namespace ecoepi {

// Pointwise reaction rates of the three-species system.
struct Rates {
  double f1;  // susceptible prey
  double f2;  // infected prey
  double f3;  // predator
};

inline Rates reaction_terms(double S, double I, double P,
                            const Parameters& p) {
  const double total = S + I;
  return {p.a * total - p.b * S - p.c * total * S - p.k * I * S -
              p.ell * S * P,
          p.k * I * S - p.b * I - p.c * total * I - p.gamma * I * P,
          p.theta * S * P + p.sigma * I * P - p.rho * P};
}

// One spatially constant equilibrium with its existence condition.
struct Equilibrium {
  std::string label;
  bool exists = false;
  double S = 0.0;
  double I = 0.0;
  double P = 0.0;
  std::string condition;  // the defining threshold inequality
};

// The five constant equilibria. E0 and E1 always exist; the others carry
// their threshold conditions.
struct EquilibriumSet {
  Equilibrium E0;
  Equilibrium E1;
  Equilibrium EI;     // disease-free, predator present
  Equilibrium EP;     // predator-free, disease present
  Equilibrium Estar;  // endemic coexistence

  const Equilibrium* find(const std::string& label) const;
  std::vector<const Equilibrium*> all() const;
};

EquilibriumSet equilibria(const Parameters& p);

enum class Attractor {
  E0,
  E1,
  EI,
  EP,
  Estar,
  Extinction,      // (0,0,0) under hostile boundary
  Sstar00,         // (S*,0,0) under hostile boundary
  StildeItilde0,   // (S~,I~,0) under hostile boundary
  Unresolved,
};

std::string attractor_label(Attractor a);

// A signed distance to one decision threshold, with a scale for judging
// relative closeness.
struct Margin {
  std::string name;
  double value;
  double scale;
  double relative() const;
};

struct RegimePrediction {
  Attractor attractor = Attractor::Unresolved;
  std::string justification;
  bool boundary_case = false;
  std::vector<Margin> margins;

  // Smallest relative margin among the thresholds that decided the regime.
  double min_relative_margin() const;
};

// Long-time regime under zero-flux boundary conditions, decided by closed
// form threshold arithmetic on the parameters. Requires the symmetric
// predation case; diffusivities play no role here.
RegimePrediction classify_neumann(const Parameters& p,
                                  double boundary_rtol = 1e-12);

// Principal-eigenvalue thresholds of the hostile-boundary problems.
// lam_b_minus_a is exactly lambda0_d + (b - a). Downstream entries are
// absent when their prerequisites (S*, then the prey-predator pair) do not
// exist.
struct EigenvalueBundle {
  double lambda0_d = 0.0;
  double lam_b_minus_a = 0.0;
  std::optional<double> lam_SI;    // potential b - (k-c) S*
  std::optional<double> lam_P;     // potential rho - theta S*, diffusivity D
  std::optional<double> lam_full;  // potential b - (k-c) Shat + ell Phat
};

// Long-time regime under hostile boundary conditions given the eigenvalue
// bundle computed on the target grid. Returns Unresolved in the predator
// coexistence regime, where no convergence claim is made.
RegimePrediction classify_dirichlet(const Parameters& p,
                                    const EigenvalueBundle& eig,
                                    double boundary_rtol = 1e-12);

// A-priori bounds along trajectories, computed from the initial data.
struct BoundConstants {
  double prey_bound;  // sup of S and of I for all time
  double delta;       // min(ell/theta, gamma/sigma)
  double mass_bound;  // bound on integral of S + I + delta P
  // Pointwise predator bound available when d == D.
  std::optional<double> predator_bound_equal_diffusion;
};

BoundConstants bound_constants(const Grid& g, const Parameters& p,
                               std::span<const double> S0,
                               std::span<const double> I0,
                               std::span<const double> P0);

}  // namespace ecoepi
