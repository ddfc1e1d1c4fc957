#include "ecoepi/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ecoepi/model.hpp"

namespace ecoepi {

namespace {

constexpr double kNegativityAbort = -1e-10;

long long step_count(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0))
    throw SolverError("integration horizon and dt must be positive");
  const long long n = std::llround(T / dt);
  return std::max<long long>(n, 1);
}

// Snapshot schedule: dense early (ten linear samples up to t = 1), then
// geometric with ratio 1.3, plus the initial and final steps.
std::vector<long long> snapshot_steps(long long nsteps, double dt) {
  std::vector<long long> steps{0, nsteps};
  const double T = static_cast<double>(nsteps) * dt;
  const double lead = std::fmin(1.0, T);
  for (int j = 1; j <= 10; ++j)
    steps.push_back(std::llround(lead * j / 10.0 / dt));
  for (double t = 1.0; t < T; t *= 1.3)
    steps.push_back(std::llround(t / dt));
  for (long long& s : steps) s = std::clamp<long long>(s, 0, nsteps);
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

void require_positive_interior(const Grid& g, std::span<const double> f,
                               const char* name) {
  g.check_conforming(f);
  for (double x : f)
    if (!(x > 0.0))
      throw SolverError(std::string("initial ") + name +
                        " must be strictly positive at every stored node");
}

void check_step_health(kernels::Backend be, std::span<const double> f,
                       const char* name, double t) {
  if (!kernels::all_finite(be, f))
    throw SolverError(std::string("field ") + name +
                      " became non-finite at t=" + std::to_string(t));
  const double m = kernels::min_value(be, f);
  if (m <= kNegativityAbort)
    throw PositivityError(std::string("field ") + name + " reached " +
                              std::to_string(m) + " at t=" +
                              std::to_string(t) +
                              "; the time step is too large for the "
                              "explicit reaction",
                          t, m);
}

}  // namespace

double lyapunov_V(const Grid& g, const PairParams& p,
                  std::span<const double> u, std::span<const double> v) {
  g.check_conforming(u);
  g.check_conforming(v);
  Field integrand(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0))
      throw SolverError("lyapunov_V needs u > 0 everywhere");
    integrand[i] =
        u[i] - p.a - p.a * std::log(u[i] / p.a) + (p.c / p.k) * v[i];
  }
  return trapezoid(g, integrand);
}

double lyapunov_F(const Grid& g, const PairParams& p,
                  std::span<const double> u, std::span<const double> v) {
  g.check_conforming(u);
  g.check_conforming(v);
  if (!(p.h < p.a))
    throw SolverError("lyapunov_F is defined only for h < a");
  const double vt = pair_coexistence_v(p);
  Field integrand(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0) || !(v[i] > 0.0))
      throw SolverError("lyapunov_F needs u, v > 0 everywhere");
    integrand[i] = u[i] - p.h - p.h * std::log(u[i] / p.h) +
                   (p.c / p.k) *
                       (v[i] - vt - vt * std::log(v[i] / vt));
  }
  return trapezoid(g, integrand);
}

double recommended_max_dt(const Grid& g, const Parameters& p,
                          const State& init) {
  const BoundConstants bounds = bound_constants(g, p, init.S, init.I, init.P);
  double p_bound = kernels::max_value(kernels::Backend::serial, init.P);
  double w_sup = 0.0;
  for (std::size_t i = 0; i < init.S.size(); ++i)
    w_sup = std::fmax(w_sup, init.S[i] + init.I[i] +
                                 bounds.delta * init.P[i]);
  p_bound = std::fmax(
      p_bound, std::fmax(w_sup, (p.a + p.rho - p.b) * (p.a + p.rho - p.b) /
                                    (4.0 * p.c * p.rho)) /
                   bounds.delta);
  const double rate =
      p.a + p.k * bounds.prey_bound + p.ell * p_bound + p.rho;
  return 0.2 / rate;
}

Trajectory integrate(const Grid& g, const Parameters& p, const State& init,
                     const IntegrateOptions& opt) {
  validate(p);
  require_positive_interior(g, init.S, "S");
  require_positive_interior(g, init.I, "I");
  require_positive_interior(g, init.P, "P");
  if (opt.sample_every < 1)
    throw SolverError("sample_every must be at least 1");

  const long long nsteps = step_count(opt.T, opt.dt);
  const double inv_dt = 1.0 / opt.dt;
  const HelmholtzSolver stepS(g, p.d, inv_dt);
  const HelmholtzSolver stepI(g, p.d, inv_dt);
  const HelmholtzSolver stepP(g, p.D, inv_dt);
  const double delta = std::fmin(p.ell / p.theta, p.gamma / p.sigma);
  const kernels::Backend be = opt.backend;

  State s = init;
  Field rS = g.make_field(), rI = g.make_field(), rP = g.make_field();

  Trajectory traj;
  const std::vector<long long> snaps = snapshot_steps(nsteps, opt.dt);
  std::size_t next_snap = 0;

  auto record_monitor = [&](double t) {
    MonitorRecord m;
    m.t = t;
    m.minS = kernels::min_value(be, s.S);
    m.minI = kernels::min_value(be, s.I);
    m.minP = kernels::min_value(be, s.P);
    m.preySup = kernels::max_pair_sum(be, s.S, s.I);
    m.massW = kernels::trapezoid(be, g.h(), s.S, g.bc() == Bc::Neumann) +
              kernels::trapezoid(be, g.h(), s.I, g.bc() == Bc::Neumann) +
              delta *
                  kernels::trapezoid(be, g.h(), s.P, g.bc() == Bc::Neumann);
    traj.monitors.push_back(m);
  };
  auto record_snapshot = [&](long long step, double t) {
    if (next_snap < snaps.size() && snaps[next_snap] == step) {
      traj.times.push_back(t);
      traj.snapshots.push_back(s);
      ++next_snap;
    }
  };

  record_monitor(0.0);
  record_snapshot(0, 0.0);

  for (long long step = 1; step <= nsteps; ++step) {
    const double t = static_cast<double>(step) * opt.dt;
    kernels::imex_rhs_full(be, p, inv_dt, s.S, s.I, s.P, rS, rI, rP);
    stepS.solve(rS, s.S);
    stepI.solve(rI, s.I);
    stepP.solve(rP, s.P);
    check_step_health(be, s.S, "S", t);
    check_step_health(be, s.I, "I", t);
    check_step_health(be, s.P, "P", t);
    if (step % opt.sample_every == 0) record_monitor(t);
    record_snapshot(step, t);
  }
  return traj;
}

PairTrajectory integrate(const Grid& g, const PairParams& p,
                         const PairState& init, const IntegrateOptions& opt) {
  validate(p);
  require_positive_interior(g, init.u, "u");
  require_positive_interior(g, init.v, "v");
  if (opt.sample_every < 1)
    throw SolverError("sample_every must be at least 1");

  const long long nsteps = step_count(opt.T, opt.dt);
  const double inv_dt = 1.0 / opt.dt;
  const HelmholtzSolver stepU(g, p.d, inv_dt);
  const HelmholtzSolver stepV(g, p.D, inv_dt);
  const kernels::Backend be = opt.backend;

  PairState s = init;
  Field ru = g.make_field(), rv = g.make_field();

  PairTrajectory traj;
  const std::vector<long long> snaps = snapshot_steps(nsteps, opt.dt);
  std::size_t next_snap = 0;

  auto record_monitor = [&](double t) {
    MonitorRecord m;
    m.t = t;
    const double umin = kernels::min_value(be, s.u);
    const double vmin = kernels::min_value(be, s.v);
    m.minS = umin;
    m.minI = vmin;
    m.preySup = kernels::max_value(be, s.u);
    if (umin > 0.0) m.V = lyapunov_V(g, p, s.u, s.v);
    if (p.h < p.a && umin > 0.0 && vmin > 0.0)
      m.F = lyapunov_F(g, p, s.u, s.v);
    traj.monitors.push_back(m);
  };
  auto record_snapshot = [&](long long step, double t) {
    if (next_snap < snaps.size() && snaps[next_snap] == step) {
      traj.times.push_back(t);
      traj.snapshots.push_back(s);
      ++next_snap;
    }
  };

  record_monitor(0.0);
  record_snapshot(0, 0.0);

  for (long long step = 1; step <= nsteps; ++step) {
    const double t = static_cast<double>(step) * opt.dt;
    kernels::imex_rhs_pair(be, p, inv_dt, s.u, s.v, ru, rv);
    stepU.solve(ru, s.u);
    stepV.solve(rv, s.v);
    check_step_health(be, s.u, "u", t);
    check_step_health(be, s.v, "v", t);
    if (step % opt.sample_every == 0) record_monitor(t);
    record_snapshot(step, t);
  }
  return traj;
}

double sup_distance(const State& a, const State& b) {
  const kernels::Backend be = kernels::Backend::serial;
  return std::fmax(kernels::sup_distance(be, a.S, b.S),
                   std::fmax(kernels::sup_distance(be, a.I, b.I),
                             kernels::sup_distance(be, a.P, b.P)));
}

ConvergenceReport detect_convergence(const Trajectory& traj,
                                     const State& target, double tol,
                                     int window) {
  if (traj.snapshots.empty())
    throw SolverError("detect_convergence needs at least one snapshot");
  if (window < 1) throw SolverError("window must be at least 1");

  std::vector<double> dist(traj.snapshots.size());
  for (std::size_t j = 0; j < dist.size(); ++j)
    dist[j] = sup_distance(traj.snapshots[j], target);

  ConvergenceReport out;
  out.terminal_distance = dist.back();
  for (std::size_t j = 0; j < dist.size(); ++j)
    if (dist[j] <= tol) {
      out.first_passage_time = traj.times[j];
      break;
    }

  const std::size_t m =
      std::min<std::size_t>(static_cast<std::size_t>(window), dist.size());
  const std::size_t lo = dist.size() - m;
  bool ok = true;
  for (std::size_t j = lo; j < dist.size(); ++j) {
    if (dist[j] > tol) ok = false;
    if (j > lo && dist[j] > 1.1 * dist[j - 1] + 1e-9 * tol) ok = false;
  }
  out.converged = ok;
  return out;
}

}  // namespace ecoepi
