#include "ecoepi/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ecoepi {

const Equilibrium* EquilibriumSet::find(const std::string& label) const {
  for (const Equilibrium* e : all())
    if (e->label == label) return e;
  return nullptr;
}

std::vector<const Equilibrium*> EquilibriumSet::all() const {
  return {&E0, &E1, &EI, &EP, &Estar};
}

EquilibriumSet equilibria(const Parameters& p) {
  validate(p);
  EquilibriumSet set;

  set.E0 = {"E0", true, 0.0, 0.0, 0.0, "always"};
  set.E1 = {"E1", true, (p.a - p.b) / p.c, 0.0, 0.0, "always (a > b)"};

  const double predation_cap = p.b + p.c * p.rho / p.theta;
  set.EI = {"EI",
            p.a > predation_cap,
            p.rho / p.theta,
            0.0,
            (p.a - p.b - p.c * p.rho / p.theta) / p.ell,
            "a > b + c*rho/theta"};

  const bool infective = p.k > p.c && p.a > p.b * p.k / (p.k - p.c);
  set.EP = {"EP",
            infective,
            p.a / p.k,
            (p.a * (p.k - p.c) - p.b * p.k) / (p.k * p.c),
            0.0,
            "k > c and a > b*k/(k-c)"};

  const double infection_cap = p.k * p.rho / p.theta;
  set.Estar = {"Estar",
               p.a > predation_cap && p.a < infection_cap,
               p.a / p.k,
               (p.k * p.rho - p.a * p.theta) / (p.k * p.theta),
               (p.a - p.b - p.c * p.rho / p.theta) / p.ell,
               "b + c*rho/theta < a < k*rho/theta"};

  // Non-existing equilibria must not leak negative component values.
  for (Equilibrium* e : {&set.EI, &set.EP, &set.Estar})
    if (!e->exists) e->S = e->I = e->P = 0.0;

  return set;
}

std::string attractor_label(Attractor a) {
  switch (a) {
    case Attractor::E0: return "E0";
    case Attractor::E1: return "E1";
    case Attractor::EI: return "EI";
    case Attractor::EP: return "EP";
    case Attractor::Estar: return "Estar";
    case Attractor::Extinction: return "extinction";
    case Attractor::Sstar00: return "Sstar00";
    case Attractor::StildeItilde0: return "StildeItilde0";
    case Attractor::Unresolved: return "unresolved";
  }
  return "unresolved";
}

double Margin::relative() const {
  return std::fabs(value) / std::fmax(scale, 1e-300);
}

double RegimePrediction::min_relative_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const Margin& margin : margins) m = std::fmin(m, margin.relative());
  return m;
}

namespace {

bool any_boundary(const std::vector<Margin>& margins, double rtol) {
  return std::any_of(margins.begin(), margins.end(),
                     [rtol](const Margin& m) { return m.relative() <= rtol; });
}

}  // namespace

RegimePrediction classify_neumann(const Parameters& p, double boundary_rtol) {
  validate(p);
  require_special_case(p, "classify_neumann");

  const double predation_cap = p.b + p.c * p.rho / p.theta;
  const double infection_cap = p.k * p.rho / p.theta;

  RegimePrediction out;
  if (p.a > predation_cap) {
    // Predator invades the disease-free prey state. Whether infection also
    // persists is decided by a against k*rho/theta.
    out.margins = {
        {"a vs b+c*rho/theta", p.a - predation_cap,
         std::fmax(p.a, predation_cap)},
        {"a vs k*rho/theta", p.a - infection_cap,
         std::fmax(p.a, infection_cap)},
    };
    if (p.a >= infection_cap) {
      out.attractor = Attractor::EI;
      out.justification =
          "a > b + c*rho/theta and a >= k*rho/theta: predator persists and "
          "suppresses infection";
    } else {
      out.attractor = Attractor::Estar;
      out.justification =
          "b + c*rho/theta < a < k*rho/theta: endemic coexistence state "
          "exists and attracts";
    }
  } else {
    // Predator dies out. Infection persists only when k > c and prey growth
    // clears b*k/(k-c); for k <= c that condition is vacuous and the
    // disease-free logistic cap attracts.
    out.margins = {
        {"a vs b+c*rho/theta", p.a - predation_cap,
         std::fmax(p.a, predation_cap)},
        {"k vs c", p.k - p.c, std::fmax(p.k, p.c)},
    };
    const bool infection_dies =
        p.k <= p.c || p.a <= p.b * p.k / (p.k - p.c);
    if (p.k > p.c) {
      const double invade_cap = p.b * p.k / (p.k - p.c);
      out.margins.push_back(
          {"a vs b*k/(k-c)", p.a - invade_cap, std::fmax(p.a, invade_cap)});
    }
    if (infection_dies) {
      out.attractor = Attractor::E1;
      out.justification =
          "a <= b + c*rho/theta and infection cannot invade (k <= c or "
          "a <= b*k/(k-c)): logistic prey cap attracts";
    } else {
      out.attractor = Attractor::EP;
      out.justification =
          "a <= b + c*rho/theta, k > c and a > b*k/(k-c): predator-free "
          "endemic state attracts";
    }
  }
  out.boundary_case = any_boundary(out.margins, boundary_rtol);
  return out;
}

RegimePrediction classify_dirichlet(const Parameters& p,
                                    const EigenvalueBundle& eig,
                                    double boundary_rtol) {
  validate(p);
  require_special_case(p, "classify_dirichlet");

  RegimePrediction out;
  const double growth_margin = -eig.lam_b_minus_a;  // (a-b) - lambda0_d
  out.margins = {{"a-b vs lambda0_d", growth_margin,
                  std::fmax(p.a - p.b, eig.lambda0_d)}};

  if (eig.lam_b_minus_a >= 0.0) {
    out.attractor = Attractor::Extinction;
    out.justification =
        "lambda1_d(b-a) >= 0: boundary losses dominate prey growth, all "
        "densities vanish";
    out.boundary_case = any_boundary(out.margins, boundary_rtol);
    return out;
  }

  if (!eig.lam_SI || !eig.lam_P) {
    out.attractor = Attractor::Unresolved;
    out.justification =
        "eigenvalue bundle incomplete: secondary thresholds unavailable";
    return out;
  }

  // Scales for the 2% boundary rule: compare eigenvalue margins against the
  // natural size of the shifted operators rather than against zero.
  out.margins.push_back(
      {"lambda1_D(rho-theta*Sstar)", *eig.lam_P, p.rho + eig.lambda0_d});
  out.margins.push_back(
      {"lambda1_d(b-(k-c)*Sstar)", *eig.lam_SI, p.b + eig.lambda0_d});

  if (*eig.lam_P > 0.0) {
    if (*eig.lam_SI > 0.0) {
      out.attractor = Attractor::Sstar00;
      out.justification =
          "predator and infection both fail to invade S*: disease-free "
          "prey-only profile attracts";
    } else if (*eig.lam_SI < 0.0) {
      out.attractor = Attractor::StildeItilde0;
      out.justification =
          "infection invades S* (lambda1_d(b-(k-c)S*) < 0) while the "
          "predator cannot: endemic predator-free profile attracts";
    } else {
      out.attractor = Attractor::Unresolved;
      out.justification = "infection threshold exactly critical";
    }
  } else {
    out.attractor = Attractor::Unresolved;
    out.justification =
        "predator can invade S* (lambda1_D(rho-theta*S*) <= 0): no "
        "convergence claim in the coexistence regime";
  }
  out.boundary_case = any_boundary(out.margins, boundary_rtol);
  return out;
}

BoundConstants bound_constants(const Grid& g, const Parameters& p,
                               std::span<const double> S0,
                               std::span<const double> I0,
                               std::span<const double> P0) {
  validate(p);
  g.check_conforming(S0);
  g.check_conforming(I0);
  g.check_conforming(P0);

  BoundConstants out{};
  double sup_prey0 = 0.0;
  double sup_w0 = 0.0;
  out.delta = std::fmin(p.ell / p.theta, p.gamma / p.sigma);
  for (std::size_t i = 0; i < S0.size(); ++i) {
    sup_prey0 = std::fmax(sup_prey0, S0[i] + I0[i]);
    sup_w0 = std::fmax(sup_w0, S0[i] + I0[i] + out.delta * P0[i]);
  }
  out.prey_bound = std::fmax(sup_prey0, (p.a - p.b) / p.c);

  const double source_cap = (p.a + p.rho - p.b) * (p.a + p.rho - p.b) /
                            (4.0 * p.c);
  const double mass0 = trapezoid(g, S0) + trapezoid(g, I0) +
                       out.delta * trapezoid(g, P0);
  out.mass_bound = mass0 + source_cap * g.length() / p.rho;

  if (std::fabs(p.d - p.D) <= 1e-12 * std::fmax(p.d, p.D))
    out.predator_bound_equal_diffusion =
        std::fmax(sup_w0, source_cap / p.rho) / out.delta;

  return out;
}

}  // namespace ecoepi
