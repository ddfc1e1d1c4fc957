#include "ecoepi/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ecoepi/linalg.hpp"

namespace ecoepi::steady {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::fmax(m, std::fabs(x));
  return m;
}

double field_max(std::span<const double> v) {
  return *std::max_element(v.begin(), v.end());
}

double field_min(std::span<const double> v) {
  return *std::min_element(v.begin(), v.end());
}

bool positive_branch(std::span<const double> v, double ratio) {
  return field_min(v) > ratio * field_max(v);
}

// Achievable residual floor of the stencil arithmetic.
double residual_floor(const Grid& g, double dmax, double umax) {
  return 32.0 * kEps * (2.0 * dmax / (g.h() * g.h()) + 1.0) *
         std::fmax(1.0, umax);
}

// ---- Generic damped Newton for K coupled fields with zero boundary values.
// System: -diff[k] Lap u_k = f_k(u). Steps are limited to keep every field
// strictly positive (fraction-to-the-boundary), then halved until the
// residual decreases.

template <int K, typename ResidFn, typename JacFn>
std::optional<std::array<Field, K>> newton_coupled(
    const Grid& g, const std::array<double, K>& diff, ResidFn resid,
    JacFn jac, std::array<Field, K> u, const NewtonOptions& opt,
    int* iterations, double* residual_out) {
  for (const Field& f : u) g.check_conforming(f);
  const std::size_t n = g.nodes();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const double dmax = *std::max_element(diff.begin(), diff.end());

  auto sup_residual = [&](const std::array<Field, K>& fields) {
    const std::array<Field, K> F = resid(fields);
    double m = 0.0;
    for (const Field& f : F) m = std::fmax(m, sup_norm(f));
    return m;
  };

  double res = sup_residual(u);
  int outer = 0;
  for (; outer < opt.max_outer; ++outer) {
    double umax = 0.0;
    for (const Field& f : u) umax = std::fmax(umax, field_max(f));
    if (!std::isfinite(res) || !std::isfinite(umax)) {
      if (iterations) *iterations = outer;
      return std::nullopt;
    }
    const double tol =
        std::fmax(opt.residual_target, residual_floor(g, dmax, umax));
    if (res <= tol) break;

    // Assemble the block-tridiagonal Jacobian of the residual.
    BlockTridiagonal<K> J(n);
    std::vector<std::array<double, K>> rhs(n);
    const std::array<Field, K> F = resid(u);
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, K> ui;
      for (int k = 0; k < K; ++k) ui[k] = u[k][i];
      const std::array<double, K * K> fj = jac(ui);
      for (int k = 0; k < K; ++k) {
        for (int m = 0; m < K; ++m)
          J.diag[i][k * K + m] =
              (k == m ? 2.0 * diff[k] * inv_h2 : 0.0) - fj[k * K + m];
        if (i > 0) J.lower[i][k * K + k] = -diff[k] * inv_h2;
        if (i + 1 < n) J.upper[i][k * K + k] = -diff[k] * inv_h2;
        rhs[i][k] = -F[k][i];
      }
    }
    std::vector<std::array<double, K>> delta;
    solve_block_tridiagonal<K>(J, rhs, delta);

    // Keep the iterate strictly inside the positive cone.
    double alpha = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (int k = 0; k < K; ++k)
        if (delta[i][k] < 0.0)
          alpha = std::fmin(alpha, 0.95 * u[k][i] / -delta[i][k]);

    bool accepted = false;
    for (int halving = 0; halving <= opt.max_halvings; ++halving) {
      std::array<Field, K> trial = u;
      for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < K; ++k) trial[k][i] += alpha * delta[i][k];
      const double trial_res = sup_residual(trial);
      if (trial_res < res) {
        u = std::move(trial);
        res = trial_res;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }

  if (iterations) *iterations = outer;
  if (residual_out) *residual_out = res;
  if (!(res <= opt.accept_residual)) return std::nullopt;
  for (const Field& f : u)
    if (!positive_branch(f, opt.positivity_ratio)) return std::nullopt;
  return u;
}

Field pointwise_potential(std::span<const double> base, double scale,
                          double offset) {
  Field q(base.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = offset + scale * base[i];
  return q;
}

}  // namespace

// ---- Residuals through the independent Laplacian path.

Field logistic_residual(const Grid& g, double diffusivity,
                        std::span<const double> r, double kappa,
                        std::span<const double> u) {
  Field lap = apply_laplacian(g, u);
  Field out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = -diffusivity * lap[i] - r[i] * u[i] + kappa * u[i] * u[i];
  return out;
}

std::array<Field, 2> si_residual(const Grid& g, const Parameters& p,
                                 std::span<const double> S,
                                 std::span<const double> I) {
  Field lapS = apply_laplacian(g, S);
  Field lapI = apply_laplacian(g, I);
  std::array<Field, 2> out{Field(S.size()), Field(S.size())};
  for (std::size_t i = 0; i < S.size(); ++i) {
    const Rates f = reaction_terms(S[i], I[i], 0.0, p);
    out[0][i] = -p.d * lapS[i] - f.f1;
    out[1][i] = -p.d * lapI[i] - f.f2;
  }
  return out;
}

std::array<Field, 2> prey_predator_residual(const Grid& g,
                                            const Parameters& p,
                                            std::span<const double> S,
                                            std::span<const double> P) {
  Field lapS = apply_laplacian(g, S);
  Field lapP = apply_laplacian(g, P);
  std::array<Field, 2> out{Field(S.size()), Field(S.size())};
  for (std::size_t i = 0; i < S.size(); ++i) {
    const Rates f = reaction_terms(S[i], 0.0, P[i], p);
    out[0][i] = -p.d * lapS[i] - f.f1;
    out[1][i] = -p.D * lapP[i] - f.f3;
  }
  return out;
}

std::array<Field, 3> full_residual(const Grid& g, const Parameters& p,
                                   std::span<const double> S,
                                   std::span<const double> I,
                                   std::span<const double> P) {
  Field lapS = apply_laplacian(g, S);
  Field lapI = apply_laplacian(g, I);
  Field lapP = apply_laplacian(g, P);
  std::array<Field, 3> out{Field(S.size()), Field(S.size()), Field(S.size())};
  for (std::size_t i = 0; i < S.size(); ++i) {
    const Rates f = reaction_terms(S[i], I[i], P[i], p);
    out[0][i] = -p.d * lapS[i] - f.f1;
    out[1][i] = -p.d * lapI[i] - f.f2;
    out[2][i] = -p.D * lapP[i] - f.f3;
  }
  return out;
}

// ---- Reaction Jacobians.

std::array<double, 4> si_reaction_jacobian(const Parameters& p, double S,
                                           double I) {
  return {p.a - p.b - 2.0 * p.c * S - (p.c + p.k) * I,
          p.a - (p.c + p.k) * S,
          (p.k - p.c) * I,
          (p.k - p.c) * S - p.b - 2.0 * p.c * I};
}

std::array<double, 4> prey_predator_reaction_jacobian(const Parameters& p,
                                                      double S, double P) {
  return {p.a - p.b - 2.0 * p.c * S - p.ell * P, -p.ell * S,
          p.theta * P, p.theta * S - p.rho};
}

std::array<double, 9> full_reaction_jacobian(const Parameters& p, double S,
                                             double I, double P) {
  return {p.a - p.b - 2.0 * p.c * S - (p.c + p.k) * I - p.ell * P,
          p.a - (p.c + p.k) * S,
          -p.ell * S,
          (p.k - p.c) * I,
          (p.k - p.c) * S - p.b - 2.0 * p.c * I - p.ell * P,
          -p.ell * I,
          p.theta * P,
          p.theta * P,
          p.theta * (S + I) - p.rho};
}

// ---- Direct Newton entry points.

std::optional<Field> newton_logistic_direct(const Grid& g, double diffusivity,
                                            std::span<const double> r,
                                            double kappa, Field init,
                                            int* iterations,
                                            double* residual) {
  g.check_conforming(r);
  g.check_conforming(init);
  const NewtonOptions opt;
  const std::size_t n = g.nodes();
  const double inv_h2 = diffusivity / (g.h() * g.h());

  Field u = std::move(init);
  auto resid = [&](const Field& w) {
    return logistic_residual(g, diffusivity, r, kappa, w);
  };
  double res = sup_norm(resid(u));
  int outer = 0;
  for (; outer < opt.max_outer; ++outer) {
    const double umax = field_max(u);
    if (!std::isfinite(res) || !std::isfinite(umax)) {
      if (iterations) *iterations = outer;
      return std::nullopt;
    }
    const double tol = std::fmax(opt.residual_target,
                                 residual_floor(g, diffusivity, umax));
    if (res <= tol) break;

    std::vector<double> sub(n, -inv_h2), sup(n, -inv_h2), diag(n), rhs(n);
    const Field F = resid(u);
    for (std::size_t i = 0; i < n; ++i) {
      diag[i] = 2.0 * inv_h2 -
                logistic_reaction_derivative(r[i], kappa, u[i]);
      rhs[i] = -F[i];
    }
    sub[0] = 0.0;
    sup[n - 1] = 0.0;
    Field delta(n);
    solve_tridiagonal_pivoting(std::move(sub), std::move(diag),
                               std::move(sup), std::move(rhs), delta);

    double alpha = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (delta[i] < 0.0) alpha = std::fmin(alpha, 0.95 * u[i] / -delta[i]);

    bool accepted = false;
    for (int halving = 0; halving <= opt.max_halvings; ++halving) {
      Field trial(n);
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + alpha * delta[i];
      const double trial_res = sup_norm(resid(trial));
      if (trial_res < res) {
        u = std::move(trial);
        res = trial_res;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }

  if (iterations) *iterations = outer;
  if (residual) *residual = res;
  if (!(res <= opt.accept_residual)) return std::nullopt;
  if (!positive_branch(u, opt.positivity_ratio)) return std::nullopt;
  return u;
}

std::optional<std::array<Field, 2>> newton_SI_direct(const Grid& g,
                                                     const Parameters& p,
                                                     std::array<Field, 2> init,
                                                     int* iterations,
                                                     double* residual) {
  return newton_coupled<2>(
      g, {p.d, p.d},
      [&](const std::array<Field, 2>& u) {
        return si_residual(g, p, u[0], u[1]);
      },
      [&](const std::array<double, 2>& u) {
        return si_reaction_jacobian(p, u[0], u[1]);
      },
      std::move(init), NewtonOptions{}, iterations, residual);
}

std::optional<std::array<Field, 2>> newton_prey_predator_direct(
    const Grid& g, const Parameters& p, std::array<Field, 2> init,
    int* iterations, double* residual) {
  return newton_coupled<2>(
      g, {p.d, p.D},
      [&](const std::array<Field, 2>& u) {
        return prey_predator_residual(g, p, u[0], u[1]);
      },
      [&](const std::array<double, 2>& u) {
        return prey_predator_reaction_jacobian(p, u[0], u[1]);
      },
      std::move(init), NewtonOptions{}, iterations, residual);
}

std::optional<std::array<Field, 3>> newton_full_direct(
    const Grid& g, const Parameters& p, std::array<Field, 3> init,
    int* iterations, double* residual) {
  return newton_coupled<3>(
      g, {p.d, p.d, p.D},
      [&](const std::array<Field, 3>& u) {
        return full_residual(g, p, u[0], u[1], u[2]);
      },
      [&](const std::array<double, 3>& u) {
        return full_reaction_jacobian(p, u[0], u[1], u[2]);
      },
      std::move(init), NewtonOptions{}, iterations, residual);
}

// ---- Wrappers with existence prediction.

LogisticReport solve_logistic(const Grid& g, double diffusivity,
                              std::span<const double> r, double kappa) {
  if (g.bc() != Bc::Dirichlet)
    throw SolverError("logistic steady states are Dirichlet problems");
  if (!(kappa > 0.0)) throw SolverError("kappa must be strictly positive");
  g.check_conforming(r);

  Field neg_r(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) neg_r[i] = -r[i];
  const EigenResult mode = principal_eigenvalue(g, diffusivity, neg_r);

  LogisticReport out;
  out.lambda_indicator = mode.lambda;
  out.exists_predicted = mode.lambda < 0.0;
  if (!out.exists_predicted) return out;

  // Bifurcation-mode initial guess with amplitude -lambda / kappa.
  const double amp = -mode.lambda / kappa;
  Field init(r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    init[i] = std::fmax(amp * mode.phi[i], 1e-8 * amp);

  auto u = newton_logistic_direct(g, diffusivity, r, kappa, std::move(init),
                                  &out.newton_iterations, &out.residual);
  if (!u)
    throw SolverError(
        "logistic Newton diverged although a positive solution is "
        "predicted (indicator " +
        std::to_string(mode.lambda) + ")");
  out.solution = std::move(*u);
  return out;
}

LogisticReport solve_logistic(const Grid& g, double diffusivity, double r,
                              double kappa) {
  Field rf(g.nodes(), r);
  return solve_logistic(g, diffusivity, rf, kappa);
}

LogisticReport solve_S_star(const Grid& g, const Parameters& p) {
  validate(p);
  return solve_logistic(g, p.d, p.a - p.b, p.c);
}

SIReport solve_SI(const Grid& g, const Parameters& p) {
  validate(p);
  SIReport out;
  out.eig.lambda0_d = lambda0(g, p.d);
  out.eig.lam_b_minus_a = out.eig.lambda0_d + (p.b - p.a);
  if (out.eig.lam_b_minus_a >= 0.0) return out;  // no S*, hence no pair

  const LogisticReport sstar = solve_S_star(g, p);
  const Field& S_star = *sstar.solution;
  out.newton_iterations = sstar.newton_iterations;

  // I~ solves the logistic problem with r = (k-c) S* - b; the indicator of
  // that solve is exactly the invasion eigenvalue lambda1_d(b - (k-c) S*).
  const Field r = pointwise_potential(S_star, p.k - p.c, -p.b);
  const LogisticReport itilde = solve_logistic(g, p.d, r, p.k);
  out.eig.lam_SI = itilde.lambda_indicator;
  out.exists_predicted = itilde.exists_predicted;
  if (!out.exists_predicted) return out;

  out.newton_iterations += itilde.newton_iterations;
  Field I = *itilde.solution;
  Field S(I.size());
  for (std::size_t i = 0; i < I.size(); ++i) S[i] = S_star[i] - I[i];
  if (!positive_branch(S, 1e-12))
    throw SolverError(
        "solve_SI produced a nonpositive susceptible profile, contradicting "
        "the sum decomposition");

  const auto F = si_residual(g, p, S, I);
  out.residual = std::fmax(sup_norm(F[0]), sup_norm(F[1]));
  double ident = 0.0;
  for (std::size_t i = 0; i < I.size(); ++i)
    ident = std::fmax(ident, std::fabs(S[i] + I[i] - S_star[i]));
  out.identity_error = ident;
  out.S = std::move(S);
  out.I = std::move(I);
  return out;
}

PreyPredatorReport solve_prey_predator(const Grid& g, const Parameters& p) {
  validate(p);
  PreyPredatorReport out;
  out.eig.lambda0_d = lambda0(g, p.d);
  out.eig.lam_b_minus_a = out.eig.lambda0_d + (p.b - p.a);
  if (out.eig.lam_b_minus_a >= 0.0) return out;

  const LogisticReport sstar = solve_S_star(g, p);
  const Field& S_star = *sstar.solution;
  out.newton_iterations = sstar.newton_iterations;

  auto predator_mode = [&](double theta) {
    const Field q = pointwise_potential(S_star, -theta, p.rho);
    return principal_eigenvalue(g, p.D, q);
  };
  const EigenResult mode = predator_mode(p.theta);
  out.eig.lam_P = mode.lambda;
  out.exists_predicted = mode.lambda < 0.0;
  if (!out.exists_predicted) return out;

  const double eps_amp = 0.1 * field_max(S_star);
  auto make_init = [&](const Field& phi, double amp) {
    std::array<Field, 2> init{S_star, Field(phi.size())};
    for (std::size_t i = 0; i < phi.size(); ++i)
      init[1][i] = std::fmax(amp * phi[i], 1e-10 * amp);
    return init;
  };

  int iters = 0;
  auto solution = newton_prey_predator_direct(
      g, p, make_init(mode.phi, eps_amp), &iters, &out.residual);
  out.newton_iterations += iters;

  if (!solution) {
    // Ramp theta up from its critical value, warm-starting each step.
    out.used_continuation = true;
    double lo = 0.0, hi = p.theta;
    for (int it = 0; it < 70; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (predator_mode(mid).lambda > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double theta_c = hi;
    std::array<Field, 2> guess{};
    bool have_guess = false;
    constexpr int kRampSteps = 8;
    for (int j = 1; j <= kRampSteps; ++j) {
      Parameters pj = p;
      pj.theta = theta_c + (p.theta - theta_c) * j / kRampSteps;
      std::array<Field, 2> init =
          have_guess ? guess
                     : make_init(predator_mode(pj.theta).phi,
                                 eps_amp * j / kRampSteps);
      auto step = newton_prey_predator_direct(g, pj, std::move(init), &iters,
                                              &out.residual);
      out.newton_iterations += iters;
      if (!step)
        throw SolverError(
            "prey-predator Newton diverged during the theta ramp at theta=" +
            std::to_string(pj.theta));
      guess = std::move(*step);
      have_guess = true;
    }
    solution = std::move(guess);
  }

  const auto F = prey_predator_residual(g, p, (*solution)[0], (*solution)[1]);
  out.residual = std::fmax(sup_norm(F[0]), sup_norm(F[1]));
  out.S = std::move((*solution)[0]);
  out.P = std::move((*solution)[1]);
  return out;
}

FullReport solve_full(const Grid& g, const Parameters& p) {
  validate(p);
  require_special_case(p, "solve_full");

  FullReport out;
  PreyPredatorReport pair = solve_prey_predator(g, p);
  out.eig = pair.eig;
  out.newton_iterations = pair.newton_iterations;
  if (!pair.S) return out;

  const Field& S_hat = *pair.S;
  const Field& P_hat = *pair.P;

  // I solves the logistic problem with r = (k-c) S^ - b - ell P^; the
  // indicator is the remaining existence threshold.
  Field r(S_hat.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = (p.k - p.c) * S_hat[i] - p.b - p.ell * P_hat[i];
  const LogisticReport ilog = solve_logistic(g, p.d, r, p.k);
  out.eig.lam_full = ilog.lambda_indicator;
  out.exists_predicted = ilog.exists_predicted;
  if (!out.exists_predicted) return out;

  out.newton_iterations += ilog.newton_iterations;
  Field I = *ilog.solution;
  Field S(I.size());
  for (std::size_t i = 0; i < I.size(); ++i) S[i] = S_hat[i] - I[i];
  if (!positive_branch(S, 1e-12))
    throw SolverError(
        "solve_full produced a nonpositive susceptible profile, "
        "contradicting the sum decomposition");

  const auto F = full_residual(g, p, S, I, P_hat);
  out.residual =
      std::fmax(sup_norm(F[0]), std::fmax(sup_norm(F[1]), sup_norm(F[2])));
  double ident_prey = 0.0;
  for (std::size_t i = 0; i < I.size(); ++i)
    ident_prey = std::fmax(ident_prey, std::fabs(S[i] + I[i] - S_hat[i]));
  out.identity_error_prey = ident_prey;
  out.identity_error_predator = 0.0;  // P is taken from the pair solve
  out.S = std::move(S);
  out.I = std::move(I);
  out.P = P_hat;
  return out;
}

EigenvalueBundle existence_conditions(const Grid& g, const Parameters& p) {
  validate(p);
  EigenvalueBundle out;
  out.lambda0_d = lambda0(g, p.d);
  out.lam_b_minus_a = out.lambda0_d + (p.b - p.a);
  if (out.lam_b_minus_a >= 0.0) return out;

  const LogisticReport sstar = solve_S_star(g, p);
  const Field& S_star = *sstar.solution;
  out.lam_SI =
      principal_eigenvalue(g, p.d,
                           pointwise_potential(S_star, -(p.k - p.c), p.b))
          .lambda;
  out.lam_P =
      principal_eigenvalue(g, p.D, pointwise_potential(S_star, -p.theta, p.rho))
          .lambda;
  if (*out.lam_P < 0.0) {
    const PreyPredatorReport pair = solve_prey_predator(g, p);
    if (pair.S) {
      Field q(pair.S->size());
      for (std::size_t i = 0; i < q.size(); ++i)
        q[i] = p.b - (p.k - p.c) * (*pair.S)[i] + p.ell * (*pair.P)[i];
      out.lam_full = principal_eigenvalue(g, p.d, q).lambda;
    }
  }
  return out;
}

}  // namespace ecoepi::steady
