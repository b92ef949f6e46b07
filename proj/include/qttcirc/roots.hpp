#pragma once

// Roots of the symbol polynomials g and h, grouped into numerical
// multiplicities and split by the unit circle.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "qttcirc/circulant.hpp"
#include "qttcirc/errors.hpp"
#include "qttcirc/powers.hpp"

namespace qttcirc {

struct RootOptions {
  double cluster_radius = 1e-7;
  double margin = 1e-9;
  /// Roots with |z - 1| below this carry an accurate offset from 1 when the
  /// symbol provides its Taylor coefficients about 1.
  double near_one = 1e-4;
};

struct RootCluster {
  Base center;
  int multiplicity = 1;
};

struct RootSystem {
  std::vector<RootCluster> inside;
  std::vector<RootCluster> outside;
  std::size_t degree = 0;
  /// Two distinct clusters sit within ten cluster radii of each other, so the
  /// multiplicity split is not well determined.
  bool ambiguous = false;

  int inside_multiplicity() const {
    int s = 0;
    for (const auto& c : inside) s += c.multiplicity;
    return s;
  }
  bool inside_simple() const {
    return std::all_of(inside.begin(), inside.end(), [](const RootCluster& c) { return c.multiplicity == 1; });
  }
};

namespace detail {

inline void sort_roots(std::vector<cd>& r) {
  std::sort(r.begin(), r.end(), [](cd a, cd b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma < mb;
    return std::arg(a) < std::arg(b);
  });
}

inline cd poly_derivative_eval(const std::vector<cd>& c, cd z) {
  cd v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * z + static_cast<double>(k) * c[k];
  return v;
}

inline double poly_scale(const std::vector<cd>& c, cd z) {
  double s = 0.0;
  const double r = std::abs(z);
  for (std::size_t k = c.size(); k-- > 0;) s = s * r + std::abs(c[k]);
  return s;
}

/// log of the distance-signed quantity |z| - 1, accurate in offset form.
inline double unit_distance(const Base& b) {
  if (b.offset) {
    const cd d = *b.offset;
    const double t = 2.0 * d.real() + std::norm(d);  // |1+d|^2 - 1
    return t / (std::abs(b.value) + 1.0);
  }
  return std::abs(b.value) - 1.0;
}

}  // namespace detail

/// All roots of c_0 + c_1 z + ... + c_d z^d: companion-matrix eigenvalues,
/// then Newton polishing.
inline std::vector<cd> find_roots(const std::vector<cd>& coeffs) {
  detail::require(coeffs.size() >= 2, "find_roots: degree must be >= 1");
  detail::require(coeffs.front() != cd(0.0) && coeffs.back() != cd(0.0),
                  "find_roots: leading and trailing coefficients must be nonzero");
  const auto d = static_cast<Eigen::Index>(coeffs.size() - 1);
  std::vector<cd> roots;
  if (d == 1) {
    roots.push_back(-coeffs[0] / coeffs[1]);
  } else {
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) comp(i, d - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw NumericalError("find_roots: eigenvalue iteration did not converge");
    for (Eigen::Index i = 0; i < d; ++i) roots.push_back(es.eigenvalues()[i]);
  }
  for (cd& z : roots) {
    double res = std::abs(poly_eval(coeffs, z));
    for (int it = 0; it < 30 && res > 0.0; ++it) {
      const cd dp = detail::poly_derivative_eval(coeffs, z);
      if (dp == cd(0.0)) break;
      const cd znew = z - poly_eval(coeffs, z) / dp;
      const double rnew = std::abs(poly_eval(coeffs, znew));
      if (!(rnew < res)) break;
      z = znew;
      res = rnew;
    }
    if (!(res <= 1e-10 * detail::poly_scale(coeffs, z)))
      throw NumericalError("find_roots: polishing did not reach the residual bound");
  }
  detail::sort_roots(roots);
  return roots;
}

/// Groups roots whose pairwise distances chain within `radius`; centers are
/// arithmetic means.
inline std::vector<RootCluster> cluster_multiplicities(const std::vector<cd>& roots, double radius) {
  const std::size_t n = roots.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(roots[i] - roots[j]) <= radius) parent[find(i)] = find(j);

  std::vector<RootCluster> out;
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    const std::size_t root = find(i);
    cd sum = 0.0;
    int count = 0;
    for (std::size_t j = i; j < n; ++j) {
      if (!used[j] && find(j) == root) {
        used[j] = true;
        sum += roots[j];
        ++count;
      }
    }
    out.push_back({Base(sum / static_cast<double>(count)), count});
  }
  return out;
}

/// Splits clusters by |z| = 1; anything within `margin` of the circle is an error.
inline RootSystem classify_unit_circle(const std::vector<RootCluster>& clusters, double margin) {
  RootSystem rs;
  for (const auto& c : clusters) {
    const double dist = detail::unit_distance(c.center);
    if (std::abs(dist) <= margin) throw RootOnUnitCircle(c.center.value);
    (dist < 0 ? rs.inside : rs.outside).push_back(c);
    rs.degree += static_cast<std::size_t>(c.multiplicity);
  }
  for (const auto& c : clusters)
    if (c.center.value == cd(0.0)) throw NumericalError("classify_unit_circle: zero root");
  return rs;
}

namespace detail {

inline bool clusters_crowded(const std::vector<RootCluster>& cl, double radius) {
  for (std::size_t i = 0; i < cl.size(); ++i)
    for (std::size_t j = i + 1; j < cl.size(); ++j)
      if (std::abs(base_diff(cl[i].center, cl[j].center)) < 10.0 * radius) return true;
  return false;
}

inline std::vector<cd> derivative_coeffs(const std::vector<cd>& c, int order) {
  std::vector<cd> d = c;
  for (int r = 0; r < order && d.size() > 1; ++r) {
    for (std::size_t k = 1; k < d.size(); ++k) d[k - 1] = static_cast<double>(k) * d[k];
    d.pop_back();
  }
  return d;
}

/// A p-fold cluster mean is only accurate to about eps^{1/p}; the (p-1)-th
/// derivative has a simple root there, so Newton on it recovers full accuracy.
/// Steps that leave the cluster radius are rejected.
inline cd refine_multiple_root(const std::vector<cd>& coeffs, cd z0, int multiplicity, double radius) {
  if (multiplicity < 2) return z0;
  const auto d = derivative_coeffs(coeffs, multiplicity - 1);
  const auto dd = derivative_coeffs(d, 1);
  cd z = z0;
  for (int it = 0; it < 8; ++it) {
    const cd den = poly_eval(dd, z);
    if (den == cd(0.0)) break;
    const cd step = poly_eval(d, z) / den;
    if (!(std::abs(z - step - z0) <= radius)) break;
    z -= step;
    if (std::abs(step) <= 1e-16 * std::abs(z)) break;
  }
  return z;
}

}  // namespace detail

/// Roots of a polynomial given by its Taylor coefficients about z = 1; the
/// returned values are the offsets z - 1, accurate relative to their size.
inline std::vector<cd> find_root_offsets(const std::vector<cd>& shifted) {
  detail::require(shifted.size() >= 2 && shifted.back() != cd(0.0), "find_root_offsets: bad coefficients");
  if (shifted.front() == cd(0.0))
    throw RootOnUnitCircle(cd(1.0));
  return find_roots(shifted);
}

/// find -> cluster -> classify for one polynomial. With `shifted` given, roots
/// are computed as offsets from 1 and clustered in that coordinate.
inline RootSystem analyze_polynomial(const std::vector<cd>& coeffs, const RootOptions& opt,
                                     const std::vector<cd>* shifted = nullptr) {
  std::vector<RootCluster> clusters;
  if (shifted) {
    const auto offsets = find_root_offsets(*shifted);
    for (auto& c : cluster_multiplicities(offsets, opt.cluster_radius)) {
      const cd d = detail::refine_multiple_root(*shifted, c.center.value, c.multiplicity, opt.cluster_radius);
      c.center = std::abs(d) < opt.near_one ? Base::near_one(d) : Base(cd(1.0) + d);
      clusters.push_back(c);
    }
  } else {
    clusters = cluster_multiplicities(find_roots(coeffs), opt.cluster_radius);
    for (auto& c : clusters)
      c.center = Base(detail::refine_multiple_root(coeffs, c.center.value, c.multiplicity, opt.cluster_radius));
  }
  RootSystem rs = classify_unit_circle(clusters, opt.margin);
  rs.ambiguous = detail::clusters_crowded(clusters, opt.cluster_radius);
  return rs;
}

struct SymbolRoots {
  RootSystem g;
  RootSystem h;
};

inline SymbolRoots analyze_roots(const BandSymbol& s, const RootOptions& opt = {}) {
  detail::require(s.width() >= 2, "symbol has no roots (m + n = 1)");
  const auto p = gh_polynomials(s);
  const auto& shift = s.unit_shift();
  return {analyze_polynomial(p.g, opt, shift ? &shift->g : nullptr),
          analyze_polynomial(p.h, opt, shift ? &shift->h : nullptr)};
}

}  // namespace qttcirc
