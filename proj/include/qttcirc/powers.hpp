#pragma once

// Large integer powers z^M with M up to 2^63.
//
// Bases close to 1 are the hard case: z = 1 + d is rounded before it is ever
// raised, and z^M = exp(M log(1 + d)) amplifies that rounding by M. A Base
// therefore optionally carries the offset d = z - 1 computed at full relative
// precision, and powers of such bases go through log1p/exp instead.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>

#include "qttcirc/errors.hpp"

namespace qttcirc {

/// A power base, optionally with an accurate offset from 1.
struct Base {
  cd value{0.0};
  std::optional<cd> offset;  // value - 1, accurate

  Base() = default;
  Base(cd v) : value(v) {}  // NOLINT(google-explicit-constructor)
  static Base near_one(cd delta) {
    Base b(cd(1.0) + delta);
    b.offset = delta;
    return b;
  }
};

/// log(1 + d) for complex d, accurate when |d| is small.
inline cd log1p(cd d) {
  if (d.imag() == 0.0 && d.real() > -1.0) return {std::log1p(d.real()), 0.0};
  const double re = d.real();
  const double im = d.imag();
  // |1 + d|^2 - 1 = 2 re + re^2 + im^2
  const double t = 2.0 * re + (re * re + im * im);
  return {0.5 * std::log1p(t), std::atan2(im, 1.0 + re)};
}

/// exp(d) - 1 for complex d.
inline cd expm1(cd d) {
  if (d.imag() == 0.0) return {std::expm1(d.real()), 0.0};
  // e^{a+ib} - 1 = (e^a - 1) cos b + (cos b - 1) + i e^a sin b
  const double em1 = std::expm1(d.real());
  const double half = std::sin(0.5 * d.imag());
  const double cosm1 = -2.0 * half * half;
  return {em1 * std::cos(d.imag()) + cosm1, std::exp(d.real()) * std::sin(d.imag())};
}

/// |z|^M below this underflows to exact zero.
inline constexpr double underflow_log = -690.0;  // ~ log(1e-300)

/// z^M by repeated squaring. 0^0 = 1.
inline cd pow_int(cd z, std::uint64_t m) {
  if (m == 0) return {1.0, 0.0};
  const double mag = std::abs(z);
  if (mag == 0.0) return {0.0, 0.0};
  if (mag < 1.0 && static_cast<double>(m) * std::log(mag) < underflow_log) return {0.0, 0.0};
  cd result{1.0, 0.0};
  cd sq = z;
  while (m) {
    if (m & 1U) result *= sq;
    m >>= 1U;
    if (m) sq *= sq;
  }
  return result;
}

/// base^M, using the offset form when present.
inline cd pow_base(const Base& b, std::uint64_t m) {
  if (m == 0) return {1.0, 0.0};
  if (!b.offset) return pow_int(b.value, m);
  const cd e = static_cast<double>(m) * log1p(*b.offset);
  if (e.real() < underflow_log) return {0.0, 0.0};
  return std::exp(e);
}

/// 1 - base^M, accurate even when base^M is close to 1.
inline cd one_minus_pow(const Base& b, std::uint64_t m) {
  if (!b.offset) return cd(1.0) - pow_int(b.value, m);
  return -expm1(static_cast<double>(m) * log1p(*b.offset));
}

/// Difference of two bases, exact in the offsets when both carry one.
inline cd base_diff(const Base& a, const Base& b) {
  if (a.offset && b.offset) return *a.offset - *b.offset;
  return a.value - b.value;
}

/// z^M for z = 1 - g1 h + g2 h^2, without ever rounding z itself.
///
/// The quadratic term shifts z^M by O(h) when M = 1/h, but it falls below the
/// unit roundoff of z once h^2 < eps; forming log1p(-g1 h + g2 h^2) directly
/// keeps it.
inline double stable_pow(double gamma1, double gamma2, double h, std::uint64_t m) {
  const double x = h * (gamma2 * h - gamma1);
  if (!(std::abs(x) < 1.0)) throw ValidationError("stable_pow: |-g1 h + g2 h^2| must be < 1");
  if (m == 0 || x == 0.0) return 1.0;
  return std::exp(static_cast<double>(m) * std::log1p(x));
}

/// The same power computed the obvious way, for comparison.
inline double naive_pow(double gamma1, double gamma2, double h, std::uint64_t m) {
  const double z = 1.0 - gamma1 * h + gamma2 * h * h;
  return pow_int(cd(z), m).real();
}

}  // namespace qttcirc
