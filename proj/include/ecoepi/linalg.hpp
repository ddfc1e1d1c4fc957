#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ecoepi/errors.hpp"

namespace ecoepi {

// Reusable LU of a tridiagonal matrix without pivoting. Callers must pass a
// diagonally dominant matrix (every use here is a shifted M-matrix).
class TridiagonalLU {
 public:
  // sub[0] and sup[n-1] are ignored.
  TridiagonalLU(std::span<const double> sub, std::span<const double> diag,
                std::span<const double> sup);

  void solve(std::span<const double> rhs, std::span<double> out) const;
  std::size_t size() const { return pivot_.size(); }

 private:
  std::vector<double> mult_;
  std::vector<double> pivot_;
  std::vector<double> sup_;
};

// One-shot tridiagonal solve with partial pivoting, safe for the possibly
// indefinite Jacobians met away from a Newton solution. Consumes its inputs.
void solve_tridiagonal_pivoting(std::vector<double> sub,
                                std::vector<double> diag,
                                std::vector<double> sup,
                                std::vector<double> rhs,
                                std::span<double> out);

// Block-tridiagonal system with K x K blocks (row-major within a block):
//   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]
// Coupled elliptic Jacobians land in this form when the unknowns of one
// node are kept adjacent: the Laplacian couples neighbouring nodes through
// diagonal blocks and the reaction couples fields within a node.
template <int K>
struct BlockTridiagonal {
  using Block = std::array<double, K * K>;
  using Vec = std::array<double, K>;

  std::vector<Block> lower;
  std::vector<Block> diag;
  std::vector<Block> upper;

  explicit BlockTridiagonal(std::size_t n)
      : lower(n, Block{}), diag(n, Block{}), upper(n, Block{}) {}

  std::size_t size() const { return diag.size(); }
};

// Solves in place by block forward elimination and back substitution.
// Block pivots are inverted with partial pivoting; the dominant Laplacian
// contribution keeps them comfortably nonsingular away from bifurcations.
// Destroys the matrix. Throws SolverError on a singular pivot.
template <int K>
void solve_block_tridiagonal(BlockTridiagonal<K>& A,
                             std::vector<std::array<double, K>>& rhs,
                             std::vector<std::array<double, K>>& x);

extern template void solve_block_tridiagonal<2>(
    BlockTridiagonal<2>&, std::vector<std::array<double, 2>>&,
    std::vector<std::array<double, 2>>&);
extern template void solve_block_tridiagonal<3>(
    BlockTridiagonal<3>&, std::vector<std::array<double, 3>>&,
    std::vector<std::array<double, 3>>&);

}  // namespace ecoepi
