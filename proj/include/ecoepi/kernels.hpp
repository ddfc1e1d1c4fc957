#pragma once

#include <cstddef>
#include <span>

#include "ecoepi/params.hpp"

namespace ecoepi::kernels {

// Every kernel has a serial reference path and an OpenMP path. Both perform
// the identical arithmetic per node, and reductions combine fixed-size chunk
// partials in chunk order, so the two backends agree bit for bit. The serial
// path is the reference the tests compare against.
enum class Backend { serial, openmp };

// openmp when compiled with OpenMP support, serial otherwise.
Backend default_backend();

bool openmp_compiled();
int max_threads();

// Chunk width of the deterministic reduction tree. Fixed independently of
// the thread count so results do not depend on the parallel schedule.
inline constexpr std::size_t kChunk = 1024;

// rX <- inv_dt * X + fX(S, I, P) nodewise, for the three-species reaction.
void imex_rhs_full(Backend be, const Parameters& p, double inv_dt,
                   std::span<const double> S, std::span<const double> I,
                   std::span<const double> P, std::span<double> rS,
                   std::span<double> rI, std::span<double> rP);

// Same for the auxiliary two-species system.
void imex_rhs_pair(Backend be, const PairParams& p, double inv_dt,
                   std::span<const double> u, std::span<const double> v,
                   std::span<double> ru, std::span<double> rv);

double min_value(Backend be, std::span<const double> u);
double max_value(Backend be, std::span<const double> u);

// sup over nodes of a_i + b_i (prey total supremum).
double max_pair_sum(Backend be, std::span<const double> a,
                    std::span<const double> b);

// sup over nodes of |a_i - b_i|.
double sup_distance(Backend be, std::span<const double> a,
                    std::span<const double> b);

// False as soon as any entry is NaN or infinite. min/max ignore NaN by
// design (fmin/fmax semantics), so overflow detection goes through here.
bool all_finite(Backend be, std::span<const double> u);

// Trapezoid sum h * (sum(u) - (u_front + u_back)/2 if halve_ends).
// halve_ends is set for Neumann storage which includes boundary nodes.
double trapezoid(Backend be, double h, std::span<const double> u,
                 bool halve_ends);

}  // namespace ecoepi::kernels
