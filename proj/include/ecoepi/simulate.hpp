#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ecoepi/grid.hpp"
#include "ecoepi/kernels.hpp"
#include "ecoepi/params.hpp"

namespace ecoepi {

// Nodal values of the three densities on a common grid.
struct State {
  Field S;
  Field I;
  Field P;
};

// State of the auxiliary two-species system.
struct PairState {
  Field u;
  Field v;
};

// Runtime monitors sampled along a trajectory. Entries that do not apply to
// the variant being integrated stay empty (and export as empty CSV cells).
struct MonitorRecord {
  double t = 0.0;
  std::optional<double> minS, minI, minP;
  std::optional<double> preySup;  // sup of S + I
  std::optional<double> massW;    // integral of S + I + delta P
  std::optional<double> V;        // pair-system functional toward (a, 0)
  std::optional<double> F;        // pair-system functional toward (h, b(a-h)/c)
};

struct Trajectory {
  std::vector<double> times;       // snapshot times, strictly increasing
  std::vector<State> snapshots;    // sparse states, geometric after t = 1
  std::vector<MonitorRecord> monitors;  // every sample_every-th step

  const State& terminal() const { return snapshots.back(); }
};

struct PairTrajectory {
  std::vector<double> times;
  std::vector<PairState> snapshots;
  std::vector<MonitorRecord> monitors;

  const PairState& terminal() const { return snapshots.back(); }
};

struct IntegrateOptions {
  double T = 1.0;
  double dt = 1e-3;
  int sample_every = 100;
  kernels::Backend backend = kernels::default_backend();
};

// Semi-implicit stepping: diffusion by backward Euler (one prefactored
// tridiagonal solve per field per step), reaction explicit at the current
// state. Positivity is preserved for admissible dt; a negative interior
// minimum below -1e-10 aborts with PositivityError rather than clamping.
Trajectory integrate(const Grid& g, const Parameters& p, const State& init,
                     const IntegrateOptions& opt);
PairTrajectory integrate(const Grid& g, const PairParams& p,
                         const PairState& init, const IntegrateOptions& opt);

// Explicit-reaction stability heuristic for the three-species system.
double recommended_max_dt(const Grid& g, const Parameters& p,
                          const State& init);

// Energy-style functionals of the pair system, by trapezoid quadrature.
// V vanishes at (a, 0); F vanishes at (h, b(a-h)/c) and needs h < a.
double lyapunov_V(const Grid& g, const PairParams& p,
                  std::span<const double> u, std::span<const double> v);
double lyapunov_F(const Grid& g, const PairParams& p,
                  std::span<const double> u, std::span<const double> v);

double sup_distance(const State& a, const State& b);

struct ConvergenceReport {
  bool converged = false;
  double terminal_distance = 0.0;
  std::optional<double> first_passage_time;  // first sample within tol
};

// Converged when the last `window` snapshot distances to the target are all
// within tol and do not grow beyond 10% between consecutive samples.
ConvergenceReport detect_convergence(const Trajectory& traj,
                                     const State& target, double tol,
                                     int window);

}  // namespace ecoepi
