#pragma once

#include <cmath>
#include <string>

#include "ecoepi/errors.hpp"

namespace ecoepi {

// Model constants for the three-species system (susceptible prey S,
// infected prey I, predator P). All rates are strictly positive and the
// prey birth rate must exceed the death rate.
struct Parameters {
  double a;      // prey birth rate            [1/time]
  double b;      // prey death rate            [1/time]
  double c;      // crowding coefficient       [1/(density*time)]
  double k;      // infection coefficient      [1/(density*time)]
  double ell;    // predation rate on S        [1/(density*time)]
  double gamma;  // predation rate on I        [1/(density*time)]
  double theta;  // predator gain from S       [1/(density*time)]
  double sigma;  // predator gain from I       [1/(density*time)]
  double rho;    // predator death rate        [1/time]
  double d;      // prey diffusivity           [length^2/time]
  double D;      // predator diffusivity       [length^2/time]
};

inline void validate(const Parameters& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("parameter '") + name +
                        "' must be strictly positive and finite");
  };
  positive(p.a, "a");
  positive(p.b, "b");
  positive(p.c, "c");
  positive(p.k, "k");
  positive(p.ell, "ell");
  positive(p.gamma, "gamma");
  positive(p.theta, "theta");
  positive(p.sigma, "sigma");
  positive(p.rho, "rho");
  positive(p.d, "d");
  positive(p.D, "D");
  if (!(p.a > p.b))
    throw ConfigError("parameter 'a' (prey birth rate) must exceed 'b'");
}

// The classifiers and steady-state solvers cover only the symmetric
// predation case gamma == ell, sigma == theta.
inline bool is_special_case(const Parameters& p, double rtol = 1e-12) {
  auto close = [rtol](double x, double y) {
    return std::fabs(x - y) <= rtol * std::fmax(std::fabs(x), std::fabs(y));
  };
  return close(p.gamma, p.ell) && close(p.sigma, p.theta);
}

inline void require_special_case(const Parameters& p, const char* who) {
  if (!is_special_case(p))
    throw ConfigError(std::string(who) +
                      " requires gamma == ell and sigma == theta");
}

// Constants of the auxiliary two-species prey-predator system
//   u_t - d Lap u = b(a - u)u - c u v
//   v_t - D Lap v = k(u - h)v
struct PairParams {
  double a;
  double b;
  double c;
  double k;
  double h;
  double d;
  double D;
};

inline void validate(const PairParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("pair parameter '") + name +
                        "' must be strictly positive and finite");
  };
  positive(p.a, "a");
  positive(p.b, "b");
  positive(p.c, "c");
  positive(p.k, "k");
  positive(p.h, "h");
  positive(p.d, "d");
  positive(p.D, "D");
}

// Predator coexistence level of the pair system, defined for h < a.
inline double pair_coexistence_v(const PairParams& p) {
  return p.b * (p.a - p.h) / p.c;
}

}  // namespace ecoepi
