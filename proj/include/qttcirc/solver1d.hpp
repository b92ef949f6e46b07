#pragma once

// Periodic convection-reaction-diffusion test problem
//
//   -u'' + u' + u = f on (0, 1),  u(0) = u(1),  u = cos(2 pi x),
//
// discretized with forward differences for u' on h = 2^{-L}: A_h u_h = h^2 f_h
// with A_h = circ(2 - h + h^2, -1, 0, ..., 0, -1 + h). The inverse is built
// from its closed-form column and applied in QTT form, so no step touches a
// vector of length 2^L.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qttcirc/circulant.hpp"
#include "qttcirc/errors.hpp"
#include "qttcirc/inverse_model.hpp"
#include "qttcirc/qtt_build.hpp"
#include "qttcirc/roots.hpp"
#include "qttcirc/tt_core.hpp"

namespace qttcirc {

struct Experiment1DConfig {
  std::size_t L_min = 5;
  std::size_t L_max = 40;
  double round_tol = 1e-11;
  std::string output_path;

  void validate() const {
    detail::require(L_min >= 3 && L_min <= L_max && L_max <= 50, "need 3 <= L_min <= L_max <= 50");
    detail::require(round_tol > 0.0 && round_tol < 1.0, "round_tol must lie in (0, 1)");
  }
};

struct Record1D {
  std::size_t L = 0;
  double rel_l2_error = 0.0;
  std::size_t max_rank = 0;  // of the QTT inverse
  double wall_time_s = 0.0;
};

inline double grid_step(std::size_t L) { return std::ldexp(1.0, -static_cast<int>(L)); }

/// a_{-1} = -1 + h, a_0 = 2 - h + h^2, a_1 = -1, with exact Taylor data about 1:
/// g(1 + d) = h^2 + (h^2 - h) d - d^2 and h(1 + d) = h^2 + (h + h^2) d + (h - 1) d^2.
inline BandSymbol assemble_symbol_1d(std::size_t L) {
  detail::require(L >= 3 && L <= 62, "assemble_symbol_1d: L must lie in [3, 62]");
  const double h = grid_step(L);
  const double h2 = h * h;
  BandSymbol s(1, 2, {-1.0 + h, 2.0 - h + h2, -1.0});
  return s.with_unit_shift({{h2, h2 - h, -1.0}, {h2, h + h2, h - 1.0}});
}

/// Root options matched to the problem: the two roots of g sit sqrt(5) h
/// apart next to z = 1, far below the default cluster radius for large L.
inline RootOptions root_options_1d(std::size_t L) {
  RootOptions opt;
  opt.cluster_radius = 1e-3 * grid_step(L);
  opt.margin = 0.0;
  return opt;
}

namespace detail {

inline cd rhs_plus_coeff() { return {0.5 * (4.0 * std::numbers::pi * std::numbers::pi + 1.0), std::numbers::pi}; }

}  // namespace detail

/// h^2 f(x_j) as c+ e+ + c- e- with e+- = exp(+-2 pi i x) and
/// c+- = (4 pi^2 + 1)/2 +- i pi.
inline QttVector rhs_qtt_1d(std::size_t L) {
  detail::require(L >= 3 && L <= 62, "rhs_qtt_1d: L must lie in [3, 62]");
  const double h = grid_step(L);
  const cd c = detail::rhs_plus_coeff();
  return qtt_sum(fourier_vector_qtt(L, 1), fourier_vector_qtt(L, -1), h * h * c, h * h * std::conj(c));
}

inline QttVector exact_solution_qtt_1d(std::size_t L) {
  return qtt_sum(fourier_vector_qtt(L, 1), fourier_vector_qtt(L, -1), 0.5, 0.5);
}

/// h^2 f(x_j) evaluated pointwise.
inline double rhs_point_1d(std::size_t L, std::uint64_t j) {
  const double h = grid_step(L);
  const double x = static_cast<double>(j) * h;
  const double tp = 2.0 * std::numbers::pi;
  return h * h * ((tp * std::numbers::pi * 2.0 + 1.0) * std::cos(tp * x) - tp * std::sin(tp * x));
}

/// QTT inverse of A_h via roots, the closed-form column and the stable cores.
inline QttMatrix inverse_qtt_1d(std::size_t L) {
  const BandSymbol s = assemble_symbol_1d(L);
  const SymbolRoots roots = analyze_roots(s, root_options_1d(L));
  if (roots.g.inside.size() != 1 || roots.h.inside.size() != 1 || !roots.g.inside_simple() ||
      !roots.h.inside_simple())
    throw NumericalError("inverse_qtt_1d: expected one simple inside root for each of g and h");
  const ColumnModel model = build_column_model(s, roots, std::uint64_t{1} << L);
  return circulant_qtt_stable(column_model_to_spec(model));
}

/// One level of the experiment. `solution` receives the rounded QTT solution.
inline Record1D solve_level_1d(std::size_t L, double round_tol, QttVector* solution = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  const QttMatrix inv = inverse_qtt_1d(L);
  const QttVector u = qtt_round(qtt_matvec(inv, rhs_qtt_1d(L)), round_tol);
  const QttVector exact = exact_solution_qtt_1d(L);
  const double err = qtt_norm(qtt_sum(u, exact, 1.0, -1.0)) / qtt_norm(exact);
  const auto t1 = std::chrono::steady_clock::now();
  if (solution) *solution = u;
  return {L, err, inv.max_rank(), std::chrono::duration<double>(t1 - t0).count()};
}

inline std::vector<Record1D> solve_1d(const Experiment1DConfig& config) {
  config.validate();
  std::vector<Record1D> out;
  for (std::size_t L = config.L_min; L <= config.L_max; ++L) out.push_back(solve_level_1d(L, config.round_tol));
  return out;
}

/// Dense LU reference solution, L <= 12.
inline Eigen::VectorXcd dense_solve_1d(std::size_t L) {
  detail::require(L >= 3 && L <= 12, "dense_solve_1d: L must lie in [3, 12]");
  const std::uint64_t N = std::uint64_t{1} << L;
  const Eigen::MatrixXcd a = materialize(assemble_symbol_1d(L), N);
  Eigen::VectorXcd rhs(static_cast<Eigen::Index>(N));
  for (std::uint64_t j = 0; j < N; ++j) rhs[static_cast<Eigen::Index>(j)] = rhs_point_1d(L, j);
  return a.partialPivLu().solve(rhs);
}

inline const char* csv_header_1d() { return "L,rel_l2_error,max_rank,wall_time_s"; }

inline void write_csv_1d(std::ostream& os, const std::vector<Record1D>& records) {
  os << csv_header_1d() << '\n';
  for (const auto& r : records) {
    std::ostringstream line;
    line.imbue(std::locale::classic());
    line << r.L << ',' << std::setprecision(10) << std::scientific << r.rel_l2_error << ',' << r.max_rank << ','
         << std::setprecision(6) << r.wall_time_s;
    os << line.str() << '\n';
  }
}

}  // namespace qttcirc
