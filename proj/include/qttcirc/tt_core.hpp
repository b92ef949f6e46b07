#pragma once

// Quantized tensor trains over binary modes.
//
// A length-2^L vector x is stored as L cores G_k of shape r_{k-1} x 2 x r_k,
// with x_i = G_1(i_1) G_2(i_2) ... G_L(i_L) and i = sum_k 2^{L-k} i_k, so the
// first core carries the most significant bit. A 2^L x 2^L matrix uses the
// same layout with a combined mode s_k = 2 i_k + j_k of size four.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qttcirc/errors.hpp"

namespace qttcirc {

/// One TT core, indexed (left rank, mode, right rank), row-major.
struct Core {
  std::size_t left = 1;
  std::size_t mode = 2;
  std::size_t right = 1;
  std::vector<cd> data;

  Core() : data(2) {}
  Core(std::size_t l, std::size_t n, std::size_t r) : left(l), mode(n), right(r), data(l * n * r) {}

  cd& operator()(std::size_t a, std::size_t s, std::size_t b) { return data[(a * mode + s) * right + b]; }
  const cd& operator()(std::size_t a, std::size_t s, std::size_t b) const {
    return data[(a * mode + s) * right + b];
  }

  /// Matrix-mode convenience: s = 2 i + j.
  cd& operator()(std::size_t a, std::size_t i, std::size_t j, std::size_t b) {
    return (*this)(a, 2 * i + j, b);
  }
  const cd& operator()(std::size_t a, std::size_t i, std::size_t j, std::size_t b) const {
    return (*this)(a, 2 * i + j, b);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Bond dimensions r_1..r_{L-1}.
struct RankVector {
  std::vector<std::size_t> ranks;

  std::size_t max() const { return ranks.empty() ? 1 : *std::max_element(ranks.begin(), ranks.end()); }
  std::size_t size() const { return ranks.size(); }
  std::size_t operator[](std::size_t k) const { return ranks[k]; }
  bool operator==(const RankVector&) const = default;
};

inline std::string to_string(const RankVector& r) {
  std::string s = "(";
  for (std::size_t k = 0; k < r.ranks.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(r.ranks[k]);
  }
  return s + ")";
}

/// Immutable tensor train with a fixed mode size (2 for vectors, 4 for matrices).
template <std::size_t Mode>
class TensorTrain {
 public:
  static constexpr std::size_t mode_size = Mode;

  TensorTrain() = default;

  explicit TensorTrain(std::vector<Core> cores) : cores_(std::move(cores)) {
    detail::require(!cores_.empty(), "tensor train needs at least one core");
    detail::require(cores_.size() < 64, "tensor train depth must stay below 64");
    for (std::size_t k = 0; k < cores_.size(); ++k) {
      const Core& c = cores_[k];
      detail::require(c.mode == Mode, "core " + std::to_string(k) + " has wrong mode size");
      detail::require(c.left >= 1 && c.right >= 1, "core ranks must be positive");
      detail::require(c.data.size() == c.left * c.mode * c.right, "core storage size mismatch");
      if (k > 0) {
        detail::require(cores_[k - 1].right == c.left,
                        "rank mismatch between cores " + std::to_string(k - 1) + " and " + std::to_string(k));
      }
    }
    detail::require(cores_.front().left == 1 && cores_.back().right == 1, "boundary ranks must be 1");
  }

  std::size_t levels() const { return cores_.size(); }
  const std::vector<Core>& cores() const { return cores_; }
  const Core& core(std::size_t k) const { return cores_.at(k); }

  RankVector ranks() const {
    RankVector r;
    for (std::size_t k = 0; k + 1 < cores_.size(); ++k) r.ranks.push_back(cores_[k].right);
    return r;
  }
  std::size_t max_rank() const { return ranks().max(); }

  /// Largest stored magnitude over all cores.
  double max_abs_entry() const {
    double m = 0.0;
    for (const auto& c : cores_) m = std::max(m, c.max_abs());
    return m;
  }

 private:
  std::vector<Core> cores_;
};

using QttVector = TensorTrain<2>;
using QttMatrix = TensorTrain<4>;

/// Materialization caps for dense conversion.
struct DenseLimits {
  std::size_t vector_levels = 14;
  std::size_t matrix_levels = 12;
};

namespace detail {

using Mat = Eigen::MatrixXcd;

inline Mat core_left_unfolding(const Core& c) {
  Mat m(c.left * c.mode, c.right);
  for (std::size_t a = 0; a < c.left; ++a)
    for (std::size_t s = 0; s < c.mode; ++s)
      for (std::size_t b = 0; b < c.right; ++b) m(a * c.mode + s, b) = c(a, s, b);
  return m;
}

inline Core core_from_left_unfolding(const Mat& m, std::size_t left, std::size_t mode) {
  Core c(left, mode, static_cast<std::size_t>(m.cols()));
  for (std::size_t a = 0; a < left; ++a)
    for (std::size_t s = 0; s < mode; ++s)
      for (std::size_t b = 0; b < c.right; ++b) c(a, s, b) = m(a * mode + s, b);
  return c;
}

inline Mat core_right_unfolding(const Core& c) {
  Mat m(c.left, c.mode * c.right);
  for (std::size_t a = 0; a < c.left; ++a)
    for (std::size_t s = 0; s < c.mode; ++s)
      for (std::size_t b = 0; b < c.right; ++b) m(a, s * c.right + b) = c(a, s, b);
  return m;
}

inline Core core_from_right_unfolding(const Mat& m, std::size_t mode, std::size_t right) {
  Core c(static_cast<std::size_t>(m.rows()), mode, right);
  for (std::size_t a = 0; a < c.left; ++a)
    for (std::size_t s = 0; s < mode; ++s)
      for (std::size_t b = 0; b < right; ++b) c(a, s, b) = m(a, s * right + b);
  return c;
}

/// Smallest rank whose discarded singular value tail has Frobenius norm <= budget.
inline std::size_t truncation_rank(const Eigen::VectorXd& sigma, double budget) {
  const auto n = static_cast<std::size_t>(sigma.size());
  double tail = 0.0;
  std::size_t r = n;
  while (r > 1) {
    const double next = tail + sigma[static_cast<Eigen::Index>(r - 1)] * sigma[static_cast<Eigen::Index>(r - 1)];
    if (std::sqrt(next) > budget) break;
    tail = next;
    --r;
  }
  return std::max<std::size_t>(r, 1);
}

inline std::uint64_t ipow(std::uint64_t base, std::size_t e) {
  std::uint64_t r = 1;
  for (std::size_t k = 0; k < e; ++k) r *= base;
  return r;
}

/// Mode-ordered flat vector (s_1 most significant) to a TT by sequential SVD.
template <std::size_t Mode>
TensorTrain<Mode> tt_svd(const Eigen::VectorXcd& flat, std::size_t levels, double tol) {
  const double norm = flat.norm();
  const double budget = levels > 1 ? tol * norm / std::sqrt(static_cast<double>(levels - 1)) : 0.0;
  const double floor = std::numeric_limits<double>::epsilon() * norm;

  std::vector<Core> cores;
  std::size_t rank = 1;
  std::uint64_t rest = ipow(Mode, levels - 1);
  Mat current(static_cast<Eigen::Index>(Mode), static_cast<Eigen::Index>(rest));
  for (std::size_t s = 0; s < Mode; ++s)
    for (std::uint64_t t = 0; t < rest; ++t) current(s, t) = flat[static_cast<Eigen::Index>(s * rest + t)];

  for (std::size_t k = 0; k + 1 < levels; ++k) {
    Eigen::BDCSVD<Mat> svd(current, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const std::size_t r = truncation_rank(svd.singularValues(), std::max(budget, floor));
    const Mat u = svd.matrixU().leftCols(r);
    const Mat sv = svd.singularValues().head(r).asDiagonal() * svd.matrixV().leftCols(r).adjoint();
    cores.push_back(core_from_left_unfolding(u, rank, Mode));
    rank = r;
    rest /= Mode;
    Mat next(static_cast<Eigen::Index>(rank * Mode), static_cast<Eigen::Index>(rest));
    for (std::size_t b = 0; b < rank; ++b)
      for (std::size_t s = 0; s < Mode; ++s)
        for (std::uint64_t t = 0; t < rest; ++t)
          next(b * Mode + s, t) = sv(b, s * rest + t);
    current = std::move(next);
  }
  cores.push_back(core_from_left_unfolding(current, rank, Mode));
  return TensorTrain<Mode>(std::move(cores));
}

/// Full contraction into the mode-ordered flat vector.
template <std::size_t Mode>
Eigen::VectorXcd contract_all(const TensorTrain<Mode>& x) {
  Mat acc = Mat::Ones(1, 1);  // rows: flat prefix index, cols: open rank
  for (const Core& c : x.cores()) {
    Mat next = Mat::Zero(acc.rows() * static_cast<Eigen::Index>(Mode), static_cast<Eigen::Index>(c.right));
    for (Eigen::Index p = 0; p < acc.rows(); ++p)
      for (std::size_t s = 0; s < Mode; ++s)
        for (std::size_t a = 0; a < c.left; ++a) {
          const cd v = acc(p, a);
          if (v == cd(0.0)) continue;
          for (std::size_t b = 0; b < c.right; ++b) next(p * Mode + s, b) += v * c(a, s, b);
        }
    acc = std::move(next);
  }
  return acc.col(0);
}

template <std::size_t Mode>
std::vector<Core> right_orthogonalized(const TensorTrain<Mode>& x, double* last_step_scale = nullptr) {
  std::vector<Core> cores = x.cores();
  if (last_step_scale) *last_step_scale = 0.0;
  for (std::size_t k = cores.size(); k-- > 1;) {
    // C_k = R^H Q^H with Q^H having orthonormal rows.
    const Mat ch = core_right_unfolding(cores[k]).adjoint();
    Eigen::HouseholderQR<Mat> qr(ch);
    const auto r = std::min<Eigen::Index>(ch.rows(), ch.cols());
    const Mat q = qr.householderQ() * Mat::Identity(ch.rows(), r);
    const Mat rmat = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
    cores[k] = core_from_right_unfolding(q.adjoint(), Mode, cores[k].right);
    const Mat left = core_left_unfolding(cores[k - 1]);
    const Mat prev = left * rmat.adjoint();
    // magnitude of the terms summed in the final contraction
    if (k == 1 && last_step_scale) *last_step_scale = (left.cwiseAbs() * rmat.adjoint().cwiseAbs()).norm();
    cores[k - 1] = core_from_left_unfolding(prev, cores[k - 1].left, Mode);
  }
  return cores;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Element access and dense conversion

inline cd element(const QttVector& x, std::uint64_t i) {
  const std::size_t L = x.levels();
  detail::require(L >= 64 || i < (std::uint64_t{1} << L), "vector index out of range");
  Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Ones(1);
  for (std::size_t k = 0; k < L; ++k) {
    const Core& c = x.core(k);
    const std::size_t bit = (i >> (L - 1 - k)) & 1U;
    Eigen::RowVectorXcd next = Eigen::RowVectorXcd::Zero(static_cast<Eigen::Index>(c.right));
    for (std::size_t a = 0; a < c.left; ++a)
      for (std::size_t b = 0; b < c.right; ++b) next[b] += acc[a] * c(a, bit, b);
    acc = std::move(next);
  }
  return acc[0];
}

inline cd element(const QttMatrix& m, std::uint64_t i, std::uint64_t j) {
  const std::size_t L = m.levels();
  detail::require(L >= 64 || (i < (std::uint64_t{1} << L) && j < (std::uint64_t{1} << L)),
                  "matrix index out of range");
  Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Ones(1);
  for (std::size_t k = 0; k < L; ++k) {
    const Core& c = m.core(k);
    const std::size_t ib = (i >> (L - 1 - k)) & 1U;
    const std::size_t jb = (j >> (L - 1 - k)) & 1U;
    Eigen::RowVectorXcd next = Eigen::RowVectorXcd::Zero(static_cast<Eigen::Index>(c.right));
    for (std::size_t a = 0; a < c.left; ++a)
      for (std::size_t b = 0; b < c.right; ++b) next[b] += acc[a] * c(a, ib, jb, b);
    acc = std::move(next);
  }
  return acc[0];
}

inline Eigen::VectorXcd to_dense(const QttVector& x, DenseLimits limits = {}) {
  detail::require(x.levels() <= limits.vector_levels,
                  "vector materialization cap exceeded (L = " + std::to_string(x.levels()) + ")");
  return detail::contract_all(x);
}

/// Row/column indices of the interleaved mode vector entry `flat`.
inline std::pair<std::uint64_t, std::uint64_t> split_matrix_index(std::uint64_t flat, std::size_t levels) {
  std::uint64_t i = 0, j = 0;
  for (std::size_t k = 0; k < levels; ++k) {
    const std::uint64_t s = (flat >> (2 * (levels - 1 - k))) & 3U;
    i = (i << 1) | (s >> 1);
    j = (j << 1) | (s & 1U);
  }
  return {i, j};
}

inline Eigen::MatrixXcd to_dense(const QttMatrix& m, DenseLimits limits = {}) {
  const std::size_t L = m.levels();
  detail::require(L <= limits.matrix_levels, "matrix materialization cap exceeded (L = " + std::to_string(L) + ")");
  const Eigen::VectorXcd flat = detail::contract_all(m);
  const auto n = static_cast<Eigen::Index>(std::uint64_t{1} << L);
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index f = 0; f < flat.size(); ++f) {
    const auto [i, j] = split_matrix_index(static_cast<std::uint64_t>(f), L);
    out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = flat[f];
  }
  return out;
}

namespace detail {

inline std::size_t level_of(std::uint64_t n, const char* what) {
  require(n >= 2 && (n & (n - 1)) == 0, std::string(what) + " size must be a power of two >= 2");
  std::size_t L = 0;
  while ((std::uint64_t{1} << L) < n) ++L;
  return L;
}

inline Eigen::VectorXcd interleave(const Eigen::MatrixXcd& a, std::size_t L) {
  Eigen::VectorXcd flat(a.size());
  for (Eigen::Index f = 0; f < flat.size(); ++f) {
    const auto [i, j] = split_matrix_index(static_cast<std::uint64_t>(f), L);
    flat[f] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return flat;
}

}  // namespace detail

/// TT-SVD of a dense vector. `tol` is a relative Frobenius tolerance.
inline QttVector from_dense(const Eigen::VectorXcd& v, double tol) {
  detail::require(tol >= 0.0, "tolerance must be non-negative");
  const std::size_t L = detail::level_of(static_cast<std::uint64_t>(v.size()), "vector");
  return detail::tt_svd<2>(v, L, tol);
}

inline QttMatrix from_dense(const Eigen::MatrixXcd& a, double tol) {
  detail::require(tol >= 0.0, "tolerance must be non-negative");
  detail::require(a.rows() == a.cols(), "matrix must be square");
  const std::size_t L = detail::level_of(static_cast<std::uint64_t>(a.rows()), "matrix");
  return detail::tt_svd<4>(detail::interleave(a, L), L, tol);
}

// ---------------------------------------------------------------------------
// Linear algebra

template <std::size_t Mode>
TensorTrain<Mode> qtt_scale(const TensorTrain<Mode>& x, cd c) {
  std::vector<Core> cores = x.cores();
  for (auto& v : cores.back().data) v *= c;
  return TensorTrain<Mode>(std::move(cores));
}

/// c1 x1 + c2 x2 with block layout: first core concatenated, middle cores
/// block diagonal, last core stacked and scaled. Ranks add.
template <std::size_t Mode>
TensorTrain<Mode> qtt_sum(const TensorTrain<Mode>& x1, const TensorTrain<Mode>& x2, cd c1, cd c2) {
  const std::size_t L = x1.levels();
  detail::require(L == x2.levels(), "qtt_sum: level mismatch");
  if (L == 1) {
    Core c(1, Mode, 1);
    for (std::size_t s = 0; s < Mode; ++s) c(0, s, 0) = c1 * x1.core(0)(0, s, 0) + c2 * x2.core(0)(0, s, 0);
    return TensorTrain<Mode>({c});
  }
  std::vector<Core> cores;
  cores.reserve(L);
  for (std::size_t k = 0; k < L; ++k) {
    const Core& a = x1.core(k);
    const Core& b = x2.core(k);
    const bool first = k == 0;
    const bool last = k + 1 == L;
    const std::size_t left = first ? 1 : a.left + b.left;
    const std::size_t right = last ? 1 : a.right + b.right;
    Core c(left, Mode, right);
    const std::size_t lo_b = first ? 0 : a.left;
    const std::size_t ro_b = last ? 0 : a.right;
    const cd sa = last ? c1 : cd(1.0);
    const cd sb = last ? c2 : cd(1.0);
    for (std::size_t s = 0; s < Mode; ++s) {
      for (std::size_t i = 0; i < a.left; ++i)
        for (std::size_t j = 0; j < a.right; ++j) c(i, s, j) = sa * a(i, s, j);
      for (std::size_t i = 0; i < b.left; ++i)
        for (std::size_t j = 0; j < b.right; ++j) c(lo_b + i, s, ro_b + j) = sb * b(i, s, j);
    }
    cores.push_back(std::move(c));
  }
  return TensorTrain<Mode>(std::move(cores));
}

/// Matrix-vector product; result ranks are products of input ranks.
inline QttVector qtt_matvec(const QttMatrix& a, const QttVector& x) {
  const std::size_t L = a.levels();
  detail::require(L == x.levels(), "qtt_matvec: level mismatch");
  std::vector<Core> cores;
  cores.reserve(L);
  for (std::size_t k = 0; k < L; ++k) {
    const Core& ca = a.core(k);
    const Core& cx = x.core(k);
    Core c(ca.left * cx.left, 2, ca.right * cx.right);
    for (std::size_t al = 0; al < ca.left; ++al)
      for (std::size_t xl = 0; xl < cx.left; ++xl)
        for (std::size_t i = 0; i < 2; ++i)
          for (std::size_t ar = 0; ar < ca.right; ++ar)
            for (std::size_t xr = 0; xr < cx.right; ++xr) {
              cd v = 0.0;
              for (std::size_t j = 0; j < 2; ++j) v += ca(al, i, j, ar) * cx(xl, j, xr);
              c(al * cx.left + xl, i, ar * cx.right + xr) = v;
            }
    cores.push_back(std::move(c));
  }
  return QttVector(std::move(cores));
}

/// Elementwise product (ranks multiply).
template <std::size_t Mode>
TensorTrain<Mode> qtt_hadamard(const TensorTrain<Mode>& x, const TensorTrain<Mode>& y) {
  const std::size_t L = x.levels();
  detail::require(L == y.levels(), "qtt_hadamard: level mismatch");
  std::vector<Core> cores;
  for (std::size_t k = 0; k < L; ++k) {
    const Core& a = x.core(k);
    const Core& b = y.core(k);
    Core c(a.left * b.left, Mode, a.right * b.right);
    for (std::size_t al = 0; al < a.left; ++al)
      for (std::size_t bl = 0; bl < b.left; ++bl)
        for (std::size_t s = 0; s < Mode; ++s)
          for (std::size_t ar = 0; ar < a.right; ++ar)
            for (std::size_t br = 0; br < b.right; ++br)
              c(al * b.left + bl, s, ar * b.right + br) = a(al, s, ar) * b(bl, s, br);
    cores.push_back(std::move(c));
  }
  return TensorTrain<Mode>(std::move(cores));
}

/// sum_i conj(x_i) y_i by left-to-right transfer matrices.
template <std::size_t Mode>
cd qtt_dot(const TensorTrain<Mode>& x, const TensorTrain<Mode>& y) {
  detail::require(x.levels() == y.levels(), "qtt_dot: level mismatch");
  detail::Mat t = detail::Mat::Ones(1, 1);
  for (std::size_t k = 0; k < x.levels(); ++k) {
    const Core& a = x.core(k);
    const Core& b = y.core(k);
    detail::Mat next = detail::Mat::Zero(static_cast<Eigen::Index>(a.right), static_cast<Eigen::Index>(b.right));
    for (std::size_t s = 0; s < Mode; ++s) {
      detail::Mat ga(a.left, a.right), gb(b.left, b.right);
      for (std::size_t i = 0; i < a.left; ++i)
        for (std::size_t j = 0; j < a.right; ++j) ga(i, j) = a(i, s, j);
      for (std::size_t i = 0; i < b.left; ++i)
        for (std::size_t j = 0; j < b.right; ++j) gb(i, j) = b(i, s, j);
      next += ga.adjoint() * t * gb;
    }
    t = std::move(next);
  }
  return t(0, 0);
}

/// Frobenius norm via right-to-left orthogonalization. For a difference of
/// nearly equal trains the error is ~eps times the parts, not eps times their
/// squares over the result as with sqrt(qtt_dot(x, x)).
template <std::size_t Mode>
double qtt_norm(const TensorTrain<Mode>& x) {
  const auto cores = detail::right_orthogonalized(x);
  double s = 0.0;
  for (const auto& v : cores.front().data) s += std::norm(v);
  return std::sqrt(s);
}

/// TT-SVD recompression: right-to-left orthogonalization, then left-to-right
/// truncation with per-bond budget tol * |x| / sqrt(L - 1).
template <std::size_t Mode>
TensorTrain<Mode> qtt_round(const TensorTrain<Mode>& x, double tol) {
  detail::require(tol >= 0.0, "tolerance must be non-negative");
  const std::size_t L = x.levels();
  double last_scale = 0.0;
  std::vector<Core> cores = detail::right_orthogonalized(x, &last_scale);
  double norm = 0.0;
  for (const auto& v : cores.front().data) norm += std::norm(v);
  norm = std::sqrt(norm);
  if (L == 1) return TensorTrain<Mode>(std::move(cores));
  // A norm at the rounding level of the terms in the last contraction is
  // cancellation noise (x1 - x1, say) and rounds to zero.
  const double noise = 16.0 * static_cast<double>(L) * std::numeric_limits<double>::epsilon() * last_scale;
  if (norm <= noise) {
    std::vector<Core> zero;
    for (std::size_t k = 0; k < L; ++k) zero.emplace_back(1, Mode, 1);
    return TensorTrain<Mode>(std::move(zero));
  }
  const double budget = std::max(tol * norm / std::sqrt(static_cast<double>(L - 1)),
                                 std::numeric_limits<double>::epsilon() * norm);
  for (std::size_t k = 0; k + 1 < L; ++k) {
    const detail::Mat m = detail::core_left_unfolding(cores[k]);
    Eigen::BDCSVD<detail::Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const std::size_t r = detail::truncation_rank(svd.singularValues(), budget);
    const detail::Mat u = svd.matrixU().leftCols(r);
    const detail::Mat sv = svd.singularValues().head(r).asDiagonal() * svd.matrixV().leftCols(r).adjoint();
    const std::size_t left = cores[k].left;
    cores[k] = detail::core_from_left_unfolding(u, left, Mode);
    const detail::Mat next = sv * detail::core_right_unfolding(cores[k + 1]);
    cores[k + 1] = detail::core_from_right_unfolding(next, Mode, cores[k + 1].right);
  }
  return TensorTrain<Mode>(std::move(cores));
}

// ---------------------------------------------------------------------------
// Unfolding ranks

/// Numerical ranks of the QTT unfoldings of a dense 2^L x 2^L matrix: rows
/// group the paired bits (i_1 j_1 ... i_k j_k), columns the remaining pairs.
/// Singular values below tol * sigma_max are discarded.
inline RankVector unfolding_ranks_dense(const Eigen::MatrixXcd& a, double tol, DenseLimits limits = {}) {
  detail::require(a.rows() == a.cols(), "matrix must be square");
  const std::size_t L = detail::level_of(static_cast<std::uint64_t>(a.rows()), "matrix");
  detail::require(L <= limits.matrix_levels, "matrix materialization cap exceeded");
  const Eigen::VectorXcd flat = detail::interleave(a, L);
  RankVector out;
  for (std::size_t k = 1; k < L; ++k) {
    const std::uint64_t cols = detail::ipow(4, L - k);
    const std::uint64_t rows = detail::ipow(4, k);
    detail::Mat unf(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint64_t r = 0; r < rows; ++r)
      for (std::uint64_t c = 0; c < cols; ++c)
        unf(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[static_cast<Eigen::Index>(r * cols + c)];
    Eigen::BDCSVD<detail::Mat> svd(unf);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double smax = sigma.size() ? sigma[0] : 0.0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
      if (sigma[i] > tol * smax) ++rank;
    out.ranks.push_back(std::max<std::size_t>(rank, 1));
  }
  return out;
}

inline RankVector unfolding_ranks(const QttMatrix& a, double tol, DenseLimits limits = {}) {
  return unfolding_ranks_dense(to_dense(a, limits), tol, limits);
}

// ---------------------------------------------------------------------------
// Core-matrix view and the strong Kronecker product

/// Block matrix whose blocks are square and share one size.
struct BlockMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t block_size = 2;
  std::vector<Eigen::MatrixXcd> blocks;  // row-major (alpha, beta)

  BlockMatrix() = default;
  BlockMatrix(std::size_t p, std::size_t q, std::size_t d)
      : rows(p), cols(q), block_size(d),
        blocks(p * q, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))) {}

  Eigen::MatrixXcd& operator()(std::size_t a, std::size_t b) { return blocks[a * cols + b]; }
  const Eigen::MatrixXcd& operator()(std::size_t a, std::size_t b) const { return blocks[a * cols + b]; }

  /// Assemble into a single (rows*d) x (cols*d) matrix.
  Eigen::MatrixXcd assemble() const {
    const auto d = static_cast<Eigen::Index>(block_size);
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows) * d, static_cast<Eigen::Index>(cols) * d);
    for (std::size_t a = 0; a < rows; ++a)
      for (std::size_t b = 0; b < cols; ++b)
        out.block(static_cast<Eigen::Index>(a) * d, static_cast<Eigen::Index>(b) * d, d, d) = (*this)(a, b);
    return out;
  }
};

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// (A |x| B)_{ab} = sum_g A_{ag} (x) B_{gb}.
inline BlockMatrix strong_kron(const BlockMatrix& a, const BlockMatrix& b) {
  detail::require(a.cols == b.rows, "strong_kron: inner block dimension mismatch (" + std::to_string(a.cols) +
                                        " vs " + std::to_string(b.rows) + ")");
  BlockMatrix out(a.rows, b.cols, a.block_size * b.block_size);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j)
      for (std::size_t g = 0; g < a.cols; ++g) out(i, j) += kron(a(i, g), b(g, j));
  return out;
}

/// Core matrix Q_k: block (alpha, beta) is the 2x2 slice G(alpha, :, :, beta).
inline BlockMatrix core_matrix(const Core& c) {
  detail::require(c.mode == 4, "core_matrix needs a matrix core");
  BlockMatrix q(c.left, c.right, 2);
  for (std::size_t a = 0; a < c.left; ++a)
    for (std::size_t b = 0; b < c.right; ++b)
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) q(a, b)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c(a, i, j, b);
  return q;
}

inline Core core_from_matrix(const BlockMatrix& q) {
  detail::require(q.block_size == 2, "core_from_matrix needs 2x2 blocks");
  Core c(q.rows, 4, q.cols);
  for (std::size_t a = 0; a < q.rows; ++a)
    for (std::size_t b = 0; b < q.cols; ++b)
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) c(a, i, j, b) = q(a, b)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return c;
}

/// Q_1 |x| Q_2 |x| ... |x| Q_L, assembled densely. Independent of to_dense.
inline Eigen::MatrixXcd strong_kron_chain(const QttMatrix& m, DenseLimits limits = {}) {
  detail::require(m.levels() <= limits.matrix_levels, "matrix materialization cap exceeded");
  BlockMatrix acc = core_matrix(m.core(0));
  for (std::size_t k = 1; k < m.levels(); ++k) acc = strong_kron(acc, core_matrix(m.core(k)));
  return acc(0, 0);
}

}  // namespace qttcirc
