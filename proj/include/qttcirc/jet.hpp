#pragma once

#include <cstddef>
#include <vector>

#include "qttcirc/errors.hpp"

namespace qttcirc {

/// Truncated Taylor series d_0 + d_1 t + ... + d_P t^P about a fixed point,
/// with d_r = f^{(r)}(z0) / r!.
class Jet {
 public:
  explicit Jet(std::size_t order) : d_(order + 1, 0.0) {}
  Jet(std::size_t order, cd value) : d_(order + 1, 0.0) { d_[0] = value; }

  /// The identity function z at z0.
  static Jet variable(std::size_t order, cd z0) {
    Jet j(order, z0);
    if (order >= 1) j.d_[1] = 1.0;
    return j;
  }

  std::size_t order() const { return d_.size() - 1; }
  cd operator[](std::size_t r) const { return d_[r]; }
  cd& operator[](std::size_t r) { return d_[r]; }
  const std::vector<cd>& coeffs() const { return d_; }

  /// f^{(r)}(z0).
  cd derivative(std::size_t r) const {
    double f = 1.0;
    for (std::size_t k = 2; k <= r; ++k) f *= static_cast<double>(k);
    return d_.at(r) * f;
  }

  Jet& operator+=(const Jet& o) {
    check(o);
    for (std::size_t k = 0; k < d_.size(); ++k) d_[k] += o.d_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check(o);
    for (std::size_t k = 0; k < d_.size(); ++k) d_[k] -= o.d_[k];
    return *this;
  }
  Jet& operator*=(cd c) {
    for (auto& v : d_) v *= c;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, cd c) { return a *= c; }
  friend Jet operator*(cd c, Jet a) { return a *= c; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check(b);
    Jet out(a.order());
    for (std::size_t i = 0; i < a.d_.size(); ++i)
      for (std::size_t k = 0; i + k < a.d_.size(); ++k) out.d_[i + k] += a.d_[i] * b.d_[k];
    return out;
  }

  /// 1/f by recursive division; requires f(z0) != 0.
  Jet reciprocal() const {
    if (d_[0] == cd(0.0)) throw NumericalError("Jet::reciprocal of a series vanishing at its center");
    Jet out(order());
    out.d_[0] = cd(1.0) / d_[0];
    for (std::size_t r = 1; r < d_.size(); ++r) {
      cd acc = 0.0;
      for (std::size_t k = 1; k <= r; ++k) acc += d_[k] * out.d_[r - k];
      out.d_[r] = -acc / d_[0];
    }
    return out;
  }

  Jet pow(unsigned e) const {
    Jet out(order(), 1.0);
    Jet sq = *this;
    while (e) {
      if (e & 1U) out = out * sq;
      e >>= 1U;
      if (e) sq = sq * sq;
    }
    return out;
  }

 private:
  void check(const Jet& o) const { detail::require(o.d_.size() == d_.size(), "Jet order mismatch"); }

  std::vector<cd> d_;
};

}  // namespace qttcirc
