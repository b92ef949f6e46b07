#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qttcirc {

using cd = std::complex<double>;

/// Bad input: shape mismatches, violated preconditions, malformed text.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The input was well formed but the numerics could not produce an answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A root of g or h lies within the classification margin of |z| = 1, so the
/// closed-form inverse does not apply (the matrix may still be invertible).
class RootOnUnitCircle : public NumericalError {
 public:
  explicit RootOnUnitCircle(cd root)
      : NumericalError("RootOnUnitCircle: root (" + std::to_string(root.real()) + ", " +
                       std::to_string(root.imag()) + ") has |z| = " +
                       std::to_string(std::abs(root))),
        root_(root) {}

  cd root() const noexcept { return root_; }

 private:
  cd root_;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace detail
}  // namespace qttcirc
