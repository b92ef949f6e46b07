#pragma once

// Closed-form first column of the inverse of a band circulant.
//
// With z_k the roots of g inside the unit circle (multiplicity p_k) and w_k
// those of h (multiplicity q_k),
//
//   b_j = sum_k sum_{p'<p_k} c_{g,k,p'} (N+n-1-j)^{(p')} z_k^{N+n-1-j-p'}
//       + sum_k sum_{q'<q_k} c_{h,k,q'} (j+m-2)^{(q')}   w_k^{j+m-2-q'}
//
// where x^{(r)} is the falling factorial and the coefficients combine
// derivatives of 1/g_k and 1/(1 - z^N) at the root. Both exponents are
// non-negative for 0 <= j < N, so only powers of bases inside the unit circle
// ever appear.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qttcirc/circulant.hpp"
#include "qttcirc/errors.hpp"
#include "qttcirc/jet.hpp"
#include "qttcirc/powers.hpp"
#include "qttcirc/roots.hpp"

namespace qttcirc {

/// M (M-1) ... (M-r+1); 1 for r = 0.
inline double falling_factorial(std::int64_t big_m, unsigned r) {
  double v = 1.0;
  for (unsigned k = 0; k < r; ++k) v *= static_cast<double>(big_m - static_cast<std::int64_t>(k));
  return v;
}

inline double binomial(unsigned n, unsigned k) {
  if (k > n) return 0.0;
  double v = 1.0;
  for (unsigned i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
  return v;
}

/// d^r/dz^r z^E at the base: E^{(r)} base^{E-r}, zero once r > E.
inline cd monomial_derivative(const Base& base, std::uint64_t e, unsigned r) {
  if (r > e) return 0.0;
  return falling_factorial(static_cast<std::int64_t>(e), r) * pow_base(base, e - r);
}

struct ColumnTerm {
  Base root;
  unsigned order = 0;  // p' (or q')
  cd coeff{0.0};
};

/// Evaluator for the first column of A^{-1}.
struct ColumnModel {
  std::uint64_t size = 0;
  std::size_t m = 0;  // of the symbol actually inverted (after any shift)
  std::size_t n = 0;
  /// 1 when the input had m = 1 and was premultiplied by z; evaluation then
  /// reads the shifted column one position back.
  unsigned rotation = 0;
  std::vector<ColumnTerm> g_terms;
  std::vector<ColumnTerm> h_terms;

  bool simple() const {
    for (const auto& t : g_terms)
      if (t.order) return false;
    for (const auto& t : h_terms)
      if (t.order) return false;
    return true;
  }
};

namespace detail {

/// Series of 1/(1 - z^N) about the base.
inline Jet inverse_one_minus_power(const Base& base, std::uint64_t N, std::size_t order) {
  Jet j(order, one_minus_pow(base, N));
  double binom = 1.0;
  for (std::size_t r = 1; r <= order; ++r) {
    binom *= static_cast<double>(N - (r - 1)) / static_cast<double>(r);
    j[r] = r > N ? cd(0.0) : -binom * pow_base(base, N - r);
  }
  return j.reciprocal();
}

/// Series of 1/g_k about root k, g_k = lead * prod_{l != k} (z - z_l)^{p_l}.
inline Jet inverse_cofactor(const std::vector<RootCluster>& all, std::size_t k, cd lead, std::size_t order) {
  Jet acc(order, lead);
  for (std::size_t l = 0; l < all.size(); ++l) {
    if (l == k) continue;
    Jet lin(order, base_diff(all[k].center, all[l].center));
    if (order >= 1) lin[1] = 1.0;
    acc = acc * lin.pow(static_cast<unsigned>(all[l].multiplicity));
  }
  return acc.reciprocal();
}

inline std::vector<RootCluster> all_clusters(const RootSystem& rs) {
  std::vector<RootCluster> all = rs.inside;
  all.insert(all.end(), rs.outside.begin(), rs.outside.end());
  return all;
}

inline std::vector<ColumnTerm> side_terms(const RootSystem& rs, cd lead, std::uint64_t N) {
  const auto all = all_clusters(rs);
  std::vector<ColumnTerm> terms;
  for (std::size_t k = 0; k < rs.inside.size(); ++k) {
    const auto P = static_cast<unsigned>(rs.inside[k].multiplicity - 1);
    const Jet inv_g = inverse_cofactor(all, k, lead, P);
    const Jet inv_pow = inverse_one_minus_power(rs.inside[k].center, N, P);
    double fact = 1.0;
    for (unsigned i = 2; i <= P; ++i) fact *= i;
    for (unsigned pp = 0; pp <= P; ++pp) {
      cd c = 0.0;
      for (unsigned p = pp; p <= P; ++p)
        c += binomial(P, p) * binomial(p, pp) * inv_g.derivative(P - p) * inv_pow.derivative(p - pp);
      terms.push_back({rs.inside[k].center, pp, c / fact});
    }
  }
  return terms;
}

struct Shifted {
  std::size_t m, n;
  unsigned rotation;
};

inline Shifted shifted_shape(const BandSymbol& s) {
  require(s.width() >= 2, "closed-form inverse needs m + n >= 2");
  if (s.m() >= 2) return {s.m(), s.n(), 0};
  // z f(z): same g and h, one more upper and one fewer lower coefficient.
  return {s.m() + 1, s.n() - 1, 1};
}

inline void check_roots(const BandSymbol& s, const SymbolRoots& r) {
  require(r.g.degree == s.width() - 1 && r.h.degree == s.width() - 1,
          "root systems do not match the symbol degree m + n - 1");
}

}  // namespace detail

inline ColumnModel build_column_model(const BandSymbol& s, const SymbolRoots& roots, std::uint64_t N) {
  detail::require_no_wrap(s, N);
  detail::check_roots(s, roots);
  const auto shape = detail::shifted_shape(s);
  const auto p = gh_polynomials(s);
  ColumnModel model;
  model.size = N;
  model.m = shape.m;
  model.n = shape.n;
  model.rotation = shape.rotation;
  model.g_terms = detail::side_terms(roots.g, p.g.back(), N);
  model.h_terms = detail::side_terms(roots.h, p.h.back(), N);
  return model;
}

inline ColumnModel build_column_model(const BandSymbol& s, std::uint64_t N, const RootOptions& opt = {}) {
  return build_column_model(s, analyze_roots(s, opt), N);
}

inline cd eval_column(const ColumnModel& model, std::uint64_t j) {
  const std::uint64_t N = model.size;
  detail::require(j < N, "eval_column: index out of range");
  const std::uint64_t jj = (j + N - model.rotation) % N;
  cd b = 0.0;
  const std::uint64_t eg = N + model.n - 1 - jj;
  for (const auto& t : model.g_terms) b += t.coeff * monomial_derivative(t.root, eg, t.order);
  const std::uint64_t eh = jj + model.m - 2;
  for (const auto& t : model.h_terms) b += t.coeff * monomial_derivative(t.root, eh, t.order);
  return b;
}

inline std::vector<cd> eval_column_all(const ColumnModel& model) {
  std::vector<cd> b(model.size);
  for (std::uint64_t j = 0; j < model.size; ++j) b[j] = eval_column(model, j);
  return b;
}

/// Simple-root formula, evaluated directly without series arithmetic.
inline cd eval_column_simple(const BandSymbol& s, const SymbolRoots& roots, std::uint64_t N, std::uint64_t j) {
  detail::require_no_wrap(s, N);
  detail::check_roots(s, roots);
  detail::require(j < N, "eval_column_simple: index out of range");
  if (!roots.g.inside_simple() || !roots.h.inside_simple())
    throw ValidationError("eval_column_simple: repeated inside root, use the general model");
  const auto shape = detail::shifted_shape(s);
  const auto p = gh_polynomials(s);
  const std::uint64_t jj = (j + N - shape.rotation) % N;
  auto side = [&](const RootSystem& rs, cd lead, std::uint64_t e) {
    const auto all = detail::all_clusters(rs);
    cd acc = 0.0;
    for (std::size_t k = 0; k < rs.inside.size(); ++k) {
      cd gk = lead;
      for (std::size_t l = 0; l < all.size(); ++l)
        if (l != k) gk *= std::pow(base_diff(all[k].center, all[l].center), all[l].multiplicity);
      acc += pow_base(all[k].center, e) / (gk * one_minus_pow(all[k].center, N));
    }
    return acc;
  };
  return side(roots.g, p.g.back(), N + shape.n - 1 - jj) + side(roots.h, p.h.back(), jj + shape.m - 2);
}

/// Trapezoidal rule for (1 / 2 pi i) \oint_{|z|=1} z^{-j-1} / f(z) dz, the
/// (j, 0) entry of the biinfinite Toeplitz inverse.
inline cd contour_oracle(const BandSymbol& s, std::int64_t j, std::uint64_t points) {
  detail::require(points >= 4 * s.width(), "contour_oracle: need at least 4 (m + n) points");
  cd acc = 0.0;
  const auto q = static_cast<std::int64_t>(points);
  for (std::int64_t k = 0; k < q; ++k) {
    const cd z = detail::unit_root(k, points);
    const std::int64_t e = ((-j % q) * k) % q;
    acc += detail::unit_root(e, points) / laurent_eval(s, z);
  }
  return acc / static_cast<double>(points);
}

/// sum_{|l| <= terms} B_{j - N l, 0}: the periodization that yields the circulant inverse.
/// The Q-point rule returns the alias sum sum_r B_{j' + rQ}, so shifts with
/// |j'| > Q/2 are skipped; they would re-add the large entries near j' = 0.
inline cd periodized_contour(const BandSymbol& s, std::uint64_t N, std::uint64_t j, std::uint64_t points,
                             int terms = 30) {
  cd acc = 0.0;
  const auto half = static_cast<std::int64_t>(points / 2);
  for (int l = -terms; l <= terms; ++l) {
    const std::int64_t jj = static_cast<std::int64_t>(j) - static_cast<std::int64_t>(N) * l;
    if (jj > half || jj < -half) continue;
    acc += contour_oracle(s, jj, points);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Worked closed forms

/// (A_M^{-1})_{j,0} for A_M = circ(4, 1, 0, ..., 0, 1).
inline double mass_inverse_column(std::uint64_t N, std::uint64_t j) {
  detail::require(N >= 3 && j < N, "mass_inverse_column: need N >= 3 and j < N");
  const double r3 = std::numbers::sqrt3;
  const double z = r3 - 2.0;
  const double zn = pow_int(z, N).real();
  return (pow_int(z, N - j).real() + pow_int(z, j).real()) / (2.0 * r3 * (1.0 - zn));
}

/// ((A_S + s I)^{-1})_{j,0}.
inline double shifted_stiffness_inverse_column(double shift, std::uint64_t N, std::uint64_t j) {
  detail::require(shift > 0.0, "shifted_stiffness_inverse_column: shift must be positive");
  detail::require(N >= 3 && j < N, "shifted_stiffness_inverse_column: need N >= 3 and j < N");
  // 1 + s/2 - sqrt(s^2/4 + s), written without cancellation.
  const double z1 = 1.0 / (1.0 + 0.5 * shift + std::sqrt(0.25 * shift * shift + shift));
  const double zn = pow_int(z1, N).real();
  return (pow_int(z1, N - j).real() + pow_int(z1, j).real()) / (std::sqrt(shift * shift + 4.0 * shift) * (1.0 - zn));
}

/// (A_S^+)_{i,0} = (6 i^2 - 6 N i + N^2 - 1) / (12 N).
inline double stiffness_pseudoinverse_column(std::uint64_t N, std::uint64_t i) {
  detail::require(N >= 3 && i < N, "stiffness_pseudoinverse_column: need N >= 3 and i < N");
  const auto n = static_cast<double>(N);
  const auto x = static_cast<double>(i);
  return (6.0 * x * x - 6.0 * n * x + n * n - 1.0) / (12.0 * n);
}

}  // namespace qttcirc
