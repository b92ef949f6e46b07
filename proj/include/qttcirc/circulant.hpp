#pragma once

// Band circulants circ(a_0, ..., a_{m-1}, 0, ..., 0, a_{-n}, ..., a_{-1}) and
// their Laurent symbols f(z) = sum_{k=-n}^{m-1} a_k z^k.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qttcirc/errors.hpp"

namespace qttcirc {

/// Exact Taylor coefficients of g and h about z = 1, for symbols whose roots
/// crowd the point 1 (ascending powers of z - 1).
struct UnitShift {
  std::vector<cd> g;
  std::vector<cd> h;
};

/// Generator of a band circulant. Coefficients run a_{-n}, ..., a_{m-1}.
class BandSymbol {
 public:
  BandSymbol(std::size_t lower, std::size_t upper, std::vector<cd> coeffs)
      : n_(lower), m_(upper), coeffs_(std::move(coeffs)) {
    detail::require(m_ >= 1, "band symbol needs m >= 1");
    detail::require(coeffs_.size() == m_ + n_, "band symbol needs exactly m + n coefficients");
    detail::require(coeffs_.front() != cd(0.0), "leading lower coefficient a_{-n} must be nonzero");
    detail::require(coeffs_.back() != cd(0.0), "trailing upper coefficient a_{m-1} must be nonzero");
  }

  /// From the two halves: lower = (a_{-n}, ..., a_{-1}), upper = (a_0, ..., a_{m-1}).
  static BandSymbol from_parts(const std::vector<cd>& lower, const std::vector<cd>& upper) {
    std::vector<cd> c = lower;
    c.insert(c.end(), upper.begin(), upper.end());
    return BandSymbol(lower.size(), upper.size(), std::move(c));
  }

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t width() const { return m_ + n_; }
  const std::vector<cd>& coeffs() const { return coeffs_; }

  /// a_k for k in [-n, m-1]; zero outside the band.
  cd at(long k) const {
    const long lo = -static_cast<long>(n_);
    const long hi = static_cast<long>(m_) - 1;
    if (k < lo || k > hi) return 0.0;
    return coeffs_[static_cast<std::size_t>(k - lo)];
  }

  bool is_symmetric(double tol = 0.0) const {
    if (m_ != n_ + 1) return false;
    for (std::size_t k = 1; k <= n_; ++k)
      if (std::abs(at(static_cast<long>(k)) - at(-static_cast<long>(k))) > tol) return false;
    return true;
  }

  const std::optional<UnitShift>& unit_shift() const { return shift_; }
  BandSymbol with_unit_shift(UnitShift s) const {
    BandSymbol out = *this;
    out.shift_ = std::move(s);
    return out;
  }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<cd> coeffs_;
  std::optional<UnitShift> shift_;
};

inline BandSymbol identity_symbol() { return BandSymbol(0, 1, {1.0}); }
/// circ(4, 1, 0, ..., 0, 1)
inline BandSymbol mass_symbol() { return BandSymbol(1, 2, {1.0, 4.0, 1.0}); }
/// circ(2 + s, -1, 0, ..., 0, -1); s = 0 is the singular stiffness matrix.
inline BandSymbol stiffness_symbol(double shift = 0.0) { return BandSymbol(1, 2, {-1.0, 2.0 + shift, -1.0}); }

/// f(z) = sum a_k z^k.
inline cd laurent_eval(const BandSymbol& s, cd z) {
  if (z == cd(0.0)) {
    detail::require(s.n() == 0, "laurent_eval: z = 0 with negative powers");
    return s.at(0);
  }
  // z^{-n} g(z) with g evaluated by Horner.
  cd g = 0.0;
  const auto& c = s.coeffs();
  for (std::size_t k = c.size(); k-- > 0;) g = g * z + c[k];
  for (std::size_t k = 0; k < s.n(); ++k) g /= z;
  return g;
}

/// g(z) = sum a_k z^{k+n} and h(z) = z^{m+n-1} g(1/z), ascending powers.
struct SymbolPolynomials {
  std::vector<cd> g;
  std::vector<cd> h;
};

inline SymbolPolynomials gh_polynomials(const BandSymbol& s) {
  SymbolPolynomials p;
  p.g = s.coeffs();
  p.h.assign(p.g.rbegin(), p.g.rend());
  return p;
}

/// Horner evaluation of an ascending coefficient list.
inline cd poly_eval(const std::vector<cd>& c, cd z) {
  cd v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * z + c[k];
  return v;
}

struct CirculantSpectrum {
  std::uint64_t size = 0;
  std::vector<cd> eigenvalues;

  /// Eigenvalues are evaluated at rounded roots of unity, so an exact zero of
  /// f shows up as |lambda| ~ eps * max|lambda|; such values count as zero.
  bool invertible(double rel_tol = 1e-13) const { return min_abs() > rel_tol * max_abs(); }
  double min_abs() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& l : eigenvalues) v = std::min(v, std::abs(l));
    return v;
  }
  double max_abs() const {
    double v = 0.0;
    for (const auto& l : eigenvalues) v = std::max(v, std::abs(l));
    return v;
  }
  /// max|lambda| / min|lambda|; infinite when singular.
  double condition_number() const {
    const double lo = min_abs();
    return lo == 0.0 ? std::numeric_limits<double>::infinity() : max_abs() / lo;
  }
};

namespace detail {

inline cd unit_root(std::int64_t num, std::uint64_t den) {
  // e^{2 pi i num/den}, reduced first so the angle stays small.
  const auto d = static_cast<std::int64_t>(den);
  std::int64_t r = num % d;
  if (r < 0) r += d;
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(den);
  return std::polar(1.0, theta);
}

inline void require_no_wrap(const BandSymbol& s, std::uint64_t N) {
  require(N >= s.width(), "band wraps onto itself: N = " + std::to_string(N) + " < m + n = " + std::to_string(s.width()));
}

}  // namespace detail

/// lambda_s = f(e^{-2 pi i s / N}).
inline CirculantSpectrum spectrum(const BandSymbol& s, std::uint64_t N) {
  detail::require_no_wrap(s, N);
  CirculantSpectrum sp;
  sp.size = N;
  sp.eigenvalues.resize(N);
  for (std::uint64_t k = 0; k < N; ++k)
    sp.eigenvalues[k] = laurent_eval(s, detail::unit_root(-static_cast<std::int64_t>(k), N));
  return sp;
}

/// First column of A^{-1} from b_j = (1/N) sum_s lambda_s^{-1} e^{2 pi i s j / N}.
inline std::vector<cd> dft_inverse_column(const BandSymbol& s, std::uint64_t N) {
  const CirculantSpectrum sp = spectrum(s, N);
  if (!sp.invertible()) throw NumericalError("dft_inverse_column: singular spectrum (condition number " + std::to_string(sp.condition_number()) + ")");
  std::vector<cd> inv(N);
  for (std::uint64_t k = 0; k < N; ++k) inv[k] = cd(1.0) / sp.eigenvalues[k];
  std::vector<cd> b(N);
  if ((N & (N - 1)) == 0) {
    // Eigen's inverse transform includes the 1/N factor.
    Eigen::FFT<double> fft;
    fft.inv(b, inv);
  } else {
    for (std::uint64_t j = 0; j < N; ++j) {
      cd acc = 0.0;
      for (std::uint64_t k = 0; k < N; ++k)
        acc += inv[k] * detail::unit_root(static_cast<std::int64_t>((k * j) % N), N);
      b[j] = acc / static_cast<double>(N);
    }
  }
  return b;
}

/// Dense N x N circulant. A_{ij} = a_d with d = (i - j) mod N folded into [-n, m-1].
inline Eigen::MatrixXcd materialize(const BandSymbol& s, std::uint64_t N, std::uint64_t cap = 4096) {
  detail::require_no_wrap(s, N);
  detail::require(N <= cap, "materialize: N exceeds cap");
  const auto n = static_cast<Eigen::Index>(N);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (long k = -static_cast<long>(s.n()); k < static_cast<long>(s.m()); ++k) {
      const Eigen::Index i = ((j + k) % n + n) % n;
      a(i, j) = s.at(k);
    }
  }
  return a;
}

/// Dense circulant with first column b.
inline Eigen::MatrixXcd circulant_from_column(const std::vector<cd>& b) {
  const auto n = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = b[static_cast<std::size_t>(((i - j) % n + n) % n)];
  return a;
}

/// Symbol of circ(sa) circ(sb): the Cauchy product of the coefficients, with
/// n = n_A + n_B and m = m_A + m_B - 1 (highest power m_A + m_B - 2).
inline BandSymbol laurent_product(const BandSymbol& sa, const BandSymbol& sb, std::uint64_t N) {
  detail::require(N >= sa.width() + sb.width(), "laurent_product: N must be >= m_A + n_A + m_B + n_B");
  const auto& a = sa.coeffs();
  const auto& b = sb.coeffs();
  std::vector<cd> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return BandSymbol(sa.n() + sb.n(), sa.m() + sb.m() - 1, std::move(c));
}

// ---------------------------------------------------------------------------
// Text form: "circ: a_{-n} ... a_{-1} | a_0 ... a_{m-1}" (prefix optional).

/// Parses a decimal real or a complex literal such as 1.5-2j, -3j, 2e-3+1e1j.
inline cd parse_complex(std::string_view tok) {
  auto fail = [&] { return ValidationError("bad complex literal '" + std::string(tok) + "'"); };
  if (tok.empty()) throw fail();
  auto parse_real = [&](std::string_view t) {
    double v = 0.0;
    if (t == "+" || t.empty()) return 1.0;
    if (t == "-") return -1.0;
    if (t.front() == '+') t.remove_prefix(1);
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw fail();
    return v;
  };
  if (tok.back() != 'j' && tok.back() != 'i') return parse_real(tok);
  std::string_view body = tok.substr(0, tok.size() - 1);
  // The split point is the last sign that is not part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string_view::npos) return {0.0, parse_real(body)};
  return {parse_real(body.substr(0, split)), parse_real(body.substr(split))};
}

inline BandSymbol parse_symbol(std::string_view text) {
  std::string s(text);
  if (const auto p = s.find(':'); p != std::string::npos) {
    std::string head = s.substr(0, p);
    head.erase(std::remove_if(head.begin(), head.end(), ::isspace), head.end());
    detail::require(head == "circ", "symbol prefix must be 'circ:'");
    s = s.substr(p + 1);
  }
  const auto bar = s.find('|');
  detail::require(bar != std::string::npos, "symbol needs '|' between a_{-n}..a_{-1} and a_0..a_{m-1}");
  detail::require(s.find('|', bar + 1) == std::string::npos, "symbol has more than one '|'");
  auto split = [](const std::string& part) {
    std::vector<cd> out;
    std::istringstream in(part);
    std::string tok;
    while (in >> tok) out.push_back(parse_complex(tok));
    return out;
  };
  return BandSymbol::from_parts(split(s.substr(0, bar)), split(s.substr(bar + 1)));
}

inline std::string format_complex(cd v) {
  std::ostringstream o;
  o.precision(17);
  if (v.imag() == 0.0) {
    o << v.real();
  } else {
    o << v.real() << (v.imag() < 0 ? "" : "+") << v.imag() << "j";
  }
  return o.str();
}

inline std::string format_symbol(const BandSymbol& s) {
  std::string out = "circ:";
  for (std::size_t k = 0; k < s.n(); ++k) out += " " + format_complex(s.coeffs()[k]);
  out += " |";
  for (std::size_t k = s.n(); k < s.width(); ++k) out += " " + format_complex(s.coeffs()[k]);
  return out;
}

}  // namespace qttcirc
