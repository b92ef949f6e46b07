#pragma once

// Command-line front end. Exit codes: 0 success, 2 bad input or usage,
// 3 numerical failure (root on the unit circle, non-convergence).

#include <CLI11.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qttcirc/circulant.hpp"
#include "qttcirc/errors.hpp"
#include "qttcirc/inverse_model.hpp"
#include "qttcirc/qtt_build.hpp"
#include "qttcirc/roots.hpp"
#include "qttcirc/solver1d.hpp"
#include "qttcirc/tt_core.hpp"
#include "qttcirc/tt_json.hpp"

namespace qttcirc {

enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_numerical = 3 };

namespace detail {

inline void print_roots(std::ostream& out, const char* name, const RootSystem& rs) {
  auto list = [&](const char* side, const std::vector<RootCluster>& cl) {
    out << name << '.' << side << ':';
    if (cl.empty()) out << " (none)";
    for (const auto& c : cl) {
      out << ' ' << format_complex(c.center.value);
      if (c.multiplicity > 1) out << "^" << c.multiplicity;
    }
    out << '\n';
  };
  list("inside", rs.inside);
  list("outside", rs.outside);
  if (rs.ambiguous) out << name << ".ambiguous: true\n";
}

inline std::uint64_t power_of_two_levels(std::uint64_t N) {
  require(N >= 2 && (N & (N - 1)) == 0, "N must be a power of two here");
  return static_cast<std::uint64_t>(std::countr_zero(N));
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  require(static_cast<bool>(f), "cannot open '" + path + "' for writing");
  f << text;
  require(static_cast<bool>(f), "write to '" + path + "' failed");
}

inline double max_abs_diff(const std::vector<cd>& a, const std::vector<cd>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

inline double max_abs(const std::vector<cd>& a) {
  double d = 0.0;
  for (const cd& v : a) d = std::max(d, std::abs(v));
  return d;
}

inline int cmd_invert(std::ostream& out, const std::string& text, std::uint64_t N, const std::string& json_path) {
  const BandSymbol s = parse_symbol(text);
  const SymbolRoots roots = analyze_roots(s);
  const ColumnModel model = build_column_model(s, roots, N);
  out << "symbol: " << format_symbol(s) << '\n';
  out << "N: " << N << '\n';
  print_roots(out, "g", roots.g);
  print_roots(out, "h", roots.h);
  out << "rank_bound: " << s.width() << '\n';
  out << std::setprecision(17);
  for (std::uint64_t j = 0; j < N; ++j) out << "b[" << j << "] = " << format_complex(eval_column(model, j)) << '\n';
  if (!json_path.empty()) {
    power_of_two_levels(N);
    write_text(json_path, to_json(circulant_qtt_stable(column_model_to_spec(model))).dump(1) + "\n");
    out << "json_cores: " << json_path << '\n';
  }
  return exit_ok;
}

inline int cmd_ranks(std::ostream& out, const std::string& text, std::uint64_t N, double tol) {
  const BandSymbol s = parse_symbol(text);
  power_of_two_levels(N);
  require(N <= 4096, "ranks: N must not exceed 4096 (dense unfoldings)");
  const auto col = eval_column_all(build_column_model(s, N));
  const RankVector r = unfolding_ranks_dense(circulant_from_column(col), tol);
  out << "symbol: " << format_symbol(s) << '\n';
  out << "N: " << N << '\n';
  out << "tol: " << tol << '\n';
  out << "ranks: " << to_string(r) << '\n';
  out << "max_rank: " << r.max() << '\n';
  out << "rank_bound: " << s.width() << '\n';
  return exit_ok;
}

inline int cmd_solve1d(std::ostream& out, std::size_t lmin, std::size_t lmax, double tol, const std::string& path) {
  Experiment1DConfig cfg{lmin, lmax, tol, path};
  cfg.validate();
  const auto records = solve_1d(cfg);
  if (path.empty()) {
    write_csv_1d(out, records);
  } else {
    std::ostringstream csv;
    write_csv_1d(csv, records);
    write_text(path, csv.str());
    out << "wrote " << records.size() << " rows to " << path << '\n';
  }
  return exit_ok;
}

inline int cmd_oracle(std::ostream& out, const std::string& text, std::uint64_t N) {
  const BandSymbol s = parse_symbol(text);
  require(N <= 4096, "oracle: N must not exceed 4096 (dense checks)");
  const auto model_col = eval_column_all(build_column_model(s, N));
  const double scale = max_abs(model_col);
  const auto dft = dft_inverse_column(s, N);

  const Eigen::MatrixXcd a = materialize(s, N);
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N));
  e0[0] = 1.0;
  // QR: partial-pivot LU can suffer exponential growth on wrapped bands
  const Eigen::VectorXcd qr = a.householderQr().solve(e0);
  const std::vector<cd> dense_col(qr.data(), qr.data() + qr.size());

  const std::uint64_t points = std::max<std::uint64_t>(512, 4 * s.width());
  std::vector<cd> contour(N);
  for (std::uint64_t j = 0; j < N; ++j) contour[j] = periodized_contour(s, N, j, points);

  const Eigen::Map<const Eigen::VectorXcd> b(model_col.data(), static_cast<Eigen::Index>(N));
  const double residual = (a * b - e0).cwiseAbs().maxCoeff();

  out << "symbol: " << format_symbol(s) << '\n';
  out << "N: " << N << '\n';
  out << std::setprecision(3) << std::scientific;
  out << "rel_dev_dft: " << max_abs_diff(model_col, dft) / scale << '\n';
  out << "rel_dev_dense: " << max_abs_diff(model_col, dense_col) / scale << '\n';
  out << "rel_dev_contour: " << max_abs_diff(model_col, contour) / scale << '\n';
  out << "residual_Ab_minus_e0: " << residual << '\n';
  out << "condition_number: " << spectrum(s, N).condition_number() << '\n';
  return exit_ok;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-form inverses of band circulants and their QTT cores"};
  app.require_subcommand(1);

  std::string symbol;
  std::uint64_t N = 0;
  std::string json_path;
  double tol = 1e-8;
  std::size_t lmin = 5, lmax = 40;
  double round_tol = 1e-11;
  std::string out_path;

  auto* inv = app.add_subcommand("invert", "roots, closed-form column and rank bound of circ(symbol)^{-1}");
  inv->add_option("--symbol", symbol, "\"a_{-n} .. a_{-1} | a_0 .. a_{m-1}\"")->required();
  inv->add_option("--N", N, "matrix size")->required();
  inv->add_option("--json-cores", json_path, "write the stable QTT cores of the inverse (N = 2^L)");

  auto* rk = app.add_subcommand("ranks", "unfolding ranks of circ(symbol)^{-1}");
  rk->add_option("--symbol", symbol)->required();
  rk->add_option("--N", N, "matrix size, a power of two <= 4096")->required();
  rk->add_option("--tol", tol, "relative singular value threshold");

  auto* sv = app.add_subcommand("solve1d", "periodic convection-reaction-diffusion sweep, CSV output");
  sv->add_option("--lmin", lmin);
  sv->add_option("--lmax", lmax);
  sv->add_option("--tol", round_tol, "QTT rounding tolerance");
  sv->add_option("--out", out_path, "CSV path (stdout when omitted)");

  auto* orc = app.add_subcommand("oracle", "cross-check the closed form against DFT, dense solve and contour oracles");
  orc->add_option("--symbol", symbol)->required();
  orc->add_option("--N", N)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_validation;
  }

  try {
    if (inv->parsed()) return detail::cmd_invert(out, symbol, N, json_path);
    if (rk->parsed()) return detail::cmd_ranks(out, symbol, N, tol);
    if (sv->parsed()) return detail::cmd_solve1d(out, lmin, lmax, round_tol, out_path);
    if (orc->parsed()) return detail::cmd_oracle(out, symbol, N);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_validation;
}

}  // namespace qttcirc
