#include "ecoepi/linalg.hpp"

#include <cmath>
#include <utility>

namespace ecoepi {

TridiagonalLU::TridiagonalLU(std::span<const double> sub,
                             std::span<const double> diag,
                             std::span<const double> sup) {
  const std::size_t n = diag.size();
  if (sub.size() != n || sup.size() != n)
    throw SolverError("tridiagonal band size mismatch");
  mult_.assign(n, 0.0);
  pivot_.assign(diag.begin(), diag.end());
  sup_.assign(sup.begin(), sup.end());
  for (std::size_t i = 1; i < n; ++i) {
    if (pivot_[i - 1] == 0.0)
      throw SolverError("zero pivot in tridiagonal factorization");
    mult_[i] = sub[i] / pivot_[i - 1];
    pivot_[i] = diag[i] - mult_[i] * sup_[i - 1];
  }
  if (n > 0 && pivot_[n - 1] == 0.0)
    throw SolverError("zero pivot in tridiagonal factorization");
}

void TridiagonalLU::solve(std::span<const double> rhs,
                          std::span<double> out) const {
  const std::size_t n = size();
  if (rhs.size() != n || out.size() != n)
    throw SolverError("tridiagonal solve size mismatch");
  out[0] = rhs[0];
  for (std::size_t i = 1; i < n; ++i) out[i] = rhs[i] - mult_[i] * out[i - 1];
  out[n - 1] /= pivot_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    out[i] = (out[i] - sup_[i] * out[i + 1]) / pivot_[i];
}

void solve_tridiagonal_pivoting(std::vector<double> sub,
                                std::vector<double> diag,
                                std::vector<double> sup,
                                std::vector<double> rhs,
                                std::span<double> out) {
  const std::size_t n = diag.size();
  if (sub.size() != n || sup.size() != n || rhs.size() != n ||
      out.size() != n)
    throw SolverError("tridiagonal solve size mismatch");
  // Gaussian elimination with row interchanges fills one extra superdiagonal.
  std::vector<double> sup2(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::fabs(diag[i]) >= std::fabs(sub[i + 1])) {
      if (diag[i] == 0.0)
        throw SolverError("singular tridiagonal system");
      const double fact = sub[i + 1] / diag[i];
      diag[i + 1] -= fact * sup[i];
      rhs[i + 1] -= fact * rhs[i];
      sup2[i] = 0.0;
    } else {
      const double fact = diag[i] / sub[i + 1];
      diag[i] = sub[i + 1];
      const double tmp = diag[i + 1];
      diag[i + 1] = sup[i] - fact * tmp;
      if (i + 2 < n) {
        sup2[i] = sup[i + 1];
        sup[i + 1] = -fact * sup[i + 1];
      }
      sup[i] = tmp;
      std::swap(rhs[i], rhs[i + 1]);
      rhs[i + 1] -= fact * rhs[i];
    }
  }
  if (diag[n - 1] == 0.0) throw SolverError("singular tridiagonal system");
  out[n - 1] = rhs[n - 1] / diag[n - 1];
  if (n >= 2)
    out[n - 2] = (rhs[n - 2] - sup[n - 2] * out[n - 1]) / diag[n - 2];
  for (std::size_t i = n - 2; i-- > 0;)
    out[i] = (rhs[i] - sup[i] * out[i + 1] - sup2[i] * out[i + 2]) / diag[i];
}

namespace {

template <int K>
using Block = std::array<double, K * K>;
template <int K>
using Vec = std::array<double, K>;

// Dense LU with partial pivoting on a K x K block, K <= 3.
template <int K>
struct BlockLU {
  Block<K> lu;
  std::array<int, K> perm;

  explicit BlockLU(const Block<K>& a) : lu(a) {
    for (int col = 0; col < K; ++col) {
      int piv = col;
      double best = std::fabs(lu[col * K + col]);
      for (int r = col + 1; r < K; ++r) {
        const double v = std::fabs(lu[r * K + col]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (!(best > 0.0))
        throw SolverError("singular block pivot in block-tridiagonal solve");
      perm[col] = piv;
      if (piv != col)
        for (int c = 0; c < K; ++c)
          std::swap(lu[col * K + c], lu[piv * K + c]);
      const double inv = 1.0 / lu[col * K + col];
      for (int r = col + 1; r < K; ++r) {
        const double m = lu[r * K + col] * inv;
        lu[r * K + col] = m;
        for (int c = col + 1; c < K; ++c)
          lu[r * K + c] -= m * lu[col * K + c];
      }
    }
  }

  Vec<K> solve(Vec<K> b) const {
    for (int col = 0; col < K; ++col) {
      if (perm[col] != col) std::swap(b[col], b[perm[col]]);
      for (int r = col + 1; r < K; ++r) b[r] -= lu[r * K + col] * b[col];
    }
    for (int r = K - 1; r >= 0; --r) {
      for (int c = r + 1; c < K; ++c) b[r] -= lu[r * K + c] * b[c];
      b[r] /= lu[r * K + r];
    }
    return b;
  }

  // Column-by-column solve of LU X = B for a block right-hand side.
  Block<K> solve(const Block<K>& b) const {
    Block<K> out;
    for (int c = 0; c < K; ++c) {
      Vec<K> col;
      for (int r = 0; r < K; ++r) col[r] = b[r * K + c];
      col = solve(col);
      for (int r = 0; r < K; ++r) out[r * K + c] = col[r];
    }
    return out;
  }
};

template <int K>
Block<K> multiply(const Block<K>& a, const Block<K>& b) {
  Block<K> out{};
  for (int r = 0; r < K; ++r)
    for (int c = 0; c < K; ++c) {
      double s = 0.0;
      for (int m = 0; m < K; ++m) s += a[r * K + m] * b[m * K + c];
      out[r * K + c] = s;
    }
  return out;
}

template <int K>
Vec<K> multiply(const Block<K>& a, const Vec<K>& v) {
  Vec<K> out{};
  for (int r = 0; r < K; ++r) {
    double s = 0.0;
    for (int m = 0; m < K; ++m) s += a[r * K + m] * v[m];
    out[r] = s;
  }
  return out;
}

}  // namespace

template <int K>
void solve_block_tridiagonal(BlockTridiagonal<K>& A,
                             std::vector<std::array<double, K>>& rhs,
                             std::vector<std::array<double, K>>& x) {
  const std::size_t n = A.size();
  if (rhs.size() != n)
    throw SolverError("block-tridiagonal rhs size mismatch");
  x.resize(n);

  // Forward sweep: diag[i] <- diag[i] - lower[i] * inv(diag[i-1]) * upper[i-1]
  // with the modified blocks stored as upper[i-1] <- inv(diag[i-1]) upper[i-1].
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const Block<K> lu_prod = multiply<K>(A.lower[i], A.upper[i - 1]);
      for (int e = 0; e < K * K; ++e) A.diag[i][e] -= lu_prod[e];
      const Vec<K> lr = multiply<K>(A.lower[i], rhs[i - 1]);
      for (int e = 0; e < K; ++e) rhs[i][e] -= lr[e];
    }
    BlockLU<K> lu(A.diag[i]);
    if (i + 1 < n) A.upper[i] = lu.solve(A.upper[i]);
    rhs[i] = lu.solve(rhs[i]);
  }

  x[n - 1] = rhs[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    const Vec<K> ux = multiply<K>(A.upper[i], x[i + 1]);
    for (int e = 0; e < K; ++e) x[i][e] = rhs[i][e] - ux[e];
  }
}

template void solve_block_tridiagonal<2>(BlockTridiagonal<2>&,
                                         std::vector<std::array<double, 2>>&,
                                         std::vector<std::array<double, 2>>&);
template void solve_block_tridiagonal<3>(BlockTridiagonal<3>&,
                                         std::vector<std::array<double, 3>>&,
                                         std::vector<std::array<double, 3>>&);

}  // namespace ecoepi
