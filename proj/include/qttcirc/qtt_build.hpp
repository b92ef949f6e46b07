#pragma once

// Explicit QTT cores for permutation powers and exponential-sum circulants.
//
// Block notation follows the core-matrix view: I is the 2x2 identity,
// H = [[0,1],[1,0]], J = [[0,1],[0,0]] and J' = [[0,0],[1,0]]. The first core
// carries the most significant bit of both row and column indices.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qttcirc/circulant.hpp"
#include "qttcirc/errors.hpp"
#include "qttcirc/inverse_model.hpp"
#include "qttcirc/powers.hpp"
#include "qttcirc/roots.hpp"
#include "qttcirc/tt_core.hpp"

namespace qttcirc {

struct ExpTerm {
  cd coeff{0.0};
  Base base;
};

/// b_j = sum_t alpha_t w_t^j + sum_t beta_t z_t^{2^L - j}, j in [0, 2^L).
struct ExponentialSumSpec {
  std::size_t levels = 0;
  std::vector<ExpTerm> forward;   // (alpha_t, w_t)
  std::vector<ExpTerm> backward;  // (beta_t, z_t)

  std::size_t rank() const { return forward.size() + backward.size() + 1; }
};

/// Direct evaluation of the spec's column entry.
inline cd spec_column(const ExponentialSumSpec& spec, std::uint64_t j) {
  const std::uint64_t N = std::uint64_t{1} << spec.levels;
  detail::require(j < N, "spec_column: index out of range");
  cd b = 0.0;
  for (const auto& t : spec.forward) b += t.coeff * pow_base(t.base, j);
  for (const auto& t : spec.backward) b += t.coeff * pow_base(t.base, N - j);
  return b;
}

namespace detail {

using Block = Eigen::Matrix2cd;

inline Block blk_i() { return Block::Identity(); }
inline Block blk_h() {
  Block b;
  b << 0.0, 1.0, 1.0, 0.0;
  return b;
}
inline Block blk_j() {
  Block b;
  b << 0.0, 1.0, 0.0, 0.0;
  return b;
}
inline Block blk_jp() {
  Block b;
  b << 0.0, 0.0, 1.0, 0.0;
  return b;
}

struct BlockCore {
  std::size_t rows, cols;
  std::vector<Block> b;
  BlockCore(std::size_t r, std::size_t c) : rows(r), cols(c), b(r * c, Block::Zero()) {}
  Block& at(std::size_t i, std::size_t j) { return b[i * cols + j]; }
};

inline Core to_core(const BlockCore& q) {
  Core c(q.rows, 4, q.cols);
  for (std::size_t a = 0; a < q.rows; ++a)
    for (std::size_t s = 0; s < q.cols; ++s)
      for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j)
          c(a, static_cast<std::size_t>(i), static_cast<std::size_t>(j), s) = q.b[a * q.cols + s](i, j);
  return c;
}

inline void require_levels(std::size_t L, const char* what) {
  require(L >= 1 && L <= 62, std::string(what) + ": L must lie in [1, 62]");
}

/// q_{t,k} = w^{2^{L-k}} and q_{t,k}^{2^k - 2} = w^{2^L - 2^{L-k+1}}, k 1-based.
struct LevelPowers {
  cd q, q2, qk;
};

inline LevelPowers level_powers(const Base& w, std::size_t L, std::size_t k) {
  const std::uint64_t e = std::uint64_t{1} << (L - k);
  return {pow_base(w, e), pow_base(w, 2 * e), pow_base(w, (std::uint64_t{1} << L) - 2 * e)};
}

inline bool strictly_inside(const Base& b) { return unit_distance(b) < 0.0; }

inline QttMatrix dense_circulant_qtt(const std::vector<cd>& col) {
  return from_dense(circulant_from_column(col), 1e-15);
}

}  // namespace detail

/// P^i for the cyclic down-shift P (P e_j = e_{j+1 mod 2^L}); ranks (2, ..., 2).
inline QttMatrix perm_power_qtt(std::size_t L, std::uint64_t i) {
  detail::require(L >= 2 && L <= 62, "perm_power_qtt: L must lie in [2, 62]");
  detail::require(i < (std::uint64_t{1} << L), "perm_power_qtt: exponent out of range");
  using namespace detail;
  auto bit = [&](std::size_t k) { return (i >> (L - 1 - k)) & 1U; };  // k = 0 is the MSB
  std::vector<Core> cores;
  BlockCore u(1, 2);
  u.at(0, 0) = bit(0) ? blk_h() : blk_i();
  u.at(0, 1) = bit(0) ? blk_i() : blk_h();
  cores.push_back(to_core(u));
  for (std::size_t k = 1; k + 1 < L; ++k) {
    BlockCore v(2, 2);
    if (bit(k)) {
      v.at(0, 0) = blk_jp();
      v.at(1, 0) = blk_j();
      v.at(1, 1) = blk_i();
    } else {
      v.at(0, 0) = blk_i();
      v.at(0, 1) = blk_jp();
      v.at(1, 1) = blk_j();
    }
    cores.push_back(to_core(v));
  }
  BlockCore w(2, 1);
  if (bit(L - 1)) {
    w.at(0, 0) = blk_jp();
    w.at(1, 0) = blk_j();
  } else {
    w.at(0, 0) = blk_i();
  }
  cores.push_back(to_core(w));
  return QttMatrix(std::move(cores));
}

/// Rank-1 QTT of (z^j)_{j < 2^L}; core k holds (1, z^{2^{L-k}}).
inline QttVector exponential_vector_qtt(std::size_t L, const Base& z) {
  detail::require_levels(L, "exponential_vector_qtt");
  std::vector<Core> cores;
  for (std::size_t k = 1; k <= L; ++k) {
    Core c(1, 2, 1);
    c(0, 0, 0) = 1.0;
    c(0, 1, 0) = pow_base(z, std::uint64_t{1} << (L - k));
    cores.push_back(std::move(c));
  }
  return QttVector(std::move(cores));
}

/// Rank-1 QTT of (e^{2 pi i freq j / 2^L})_j. Each core phase is formed from
/// freq mod 2^k directly, never by squaring a rounded root of unity.
inline QttVector fourier_vector_qtt(std::size_t L, std::int64_t freq) {
  detail::require_levels(L, "fourier_vector_qtt");
  std::vector<Core> cores;
  for (std::size_t k = 1; k <= L; ++k) {
    Core c(1, 2, 1);
    c(0, 0, 0) = 1.0;
    c(0, 1, 0) = detail::unit_root(freq, std::uint64_t{1} << k);
    cores.push_back(std::move(c));
  }
  return QttVector(std::move(cores));
}

/// circ(b) with b_j = sum_t alpha_t w_t^j; ranks (2, r+1, ..., r+1).
inline QttMatrix circulant_qtt_sum_z(std::size_t L, const std::vector<ExpTerm>& terms) {
  detail::require(L > 2 && L <= 62, "circulant_qtt_sum_z: L must lie in [3, 62]");
  detail::require(!terms.empty(), "circulant_qtt_sum_z: need at least one term");
  using namespace detail;
  const std::size_t r = terms.size();
  const std::uint64_t N = std::uint64_t{1} << L;
  std::vector<Core> cores;

  BlockCore q1(1, 2);
  q1.at(0, 0) = blk_i();
  q1.at(0, 1) = blk_h();
  cores.push_back(to_core(q1));

  for (std::size_t k = 2; k < L; ++k) {
    const std::size_t rows = k == 2 ? 2 : r + 1;
    BlockCore q(rows, r + 1);
    q.at(0, 0) = blk_i();
    for (std::size_t t = 0; t < r; ++t) {
      const auto p = level_powers(terms[t].base, L, k);
      q.at(0, 1 + t) = blk_jp() + p.qk * blk_j();
      q.at(k == 2 ? 1 : 1 + t, 1 + t) = p.q * blk_i() + p.q2 * blk_jp() + blk_j();
    }
    cores.push_back(to_core(q));
  }

  BlockCore last(r + 1, 1);
  cd g1 = 0.0, g2 = 0.0, g3 = 0.0;
  for (std::size_t t = 0; t < r; ++t) {
    const auto& w = terms[t].base;
    const cd a = terms[t].coeff;
    g1 += a;
    g2 += a * w.value;
    g3 += a * pow_base(w, N - 1);
    const auto p = level_powers(w, L, L);
    last.at(1 + t, 0) = a * w.value * (p.q * blk_i() + p.q2 * blk_jp() + blk_j());
  }
  last.at(0, 0) = g1 * blk_i() + g2 * blk_jp() + g3 * blk_j();
  cores.push_back(to_core(last));
  return QttMatrix(std::move(cores));
}

/// circ(b) with b_j = sum alpha_t w_t^j + sum beta_t z_t^{2^L - j}; every
/// stored power has a non-negative exponent, so nothing grows with L.
/// Ranks (2, r1 + r2 + 1, ..., r1 + r2 + 1). L <= 2 goes through a dense build.
inline QttMatrix circulant_qtt_stable(const ExponentialSumSpec& spec) {
  const std::size_t L = spec.levels;
  detail::require_levels(L, "circulant_qtt_stable");
  detail::require(!spec.forward.empty() || !spec.backward.empty(), "circulant_qtt_stable: empty spec");
  for (const auto& t : spec.forward)
    detail::require(detail::strictly_inside(t.base), "circulant_qtt_stable: forward base must satisfy |w| < 1");
  for (const auto& t : spec.backward)
    detail::require(detail::strictly_inside(t.base), "circulant_qtt_stable: backward base must satisfy |z| < 1");
  const std::uint64_t N = std::uint64_t{1} << L;
  if (L <= 2) {
    std::vector<cd> col(N);
    for (std::uint64_t j = 0; j < N; ++j) col[j] = spec_column(spec, j);
    return detail::dense_circulant_qtt(col);
  }
  using namespace detail;
  const std::size_t r1 = spec.forward.size();
  const std::size_t r = r1 + spec.backward.size();
  std::vector<Core> cores;

  BlockCore q1(1, 2);
  q1.at(0, 0) = blk_i();
  q1.at(0, 1) = blk_h();
  cores.push_back(to_core(q1));

  auto fill = [&](BlockCore& q, std::size_t k, bool second) {
    q.at(0, 0) = blk_i();
    for (std::size_t t = 0; t < r; ++t) {
      const bool fw = t < r1;
      const auto p = level_powers(fw ? spec.forward[t].base : spec.backward[t - r1].base, L, k);
      const std::size_t row = second ? 1 : 1 + t;
      if (fw) {
        q.at(0, 1 + t) = blk_jp() + p.qk * blk_j();
        q.at(row, 1 + t) = p.q * blk_i() + p.q2 * blk_jp() + blk_j();
      } else {
        q.at(0, 1 + t) = p.qk * blk_jp() + blk_j();
        q.at(row, 1 + t) = p.q * blk_i() + blk_jp() + p.q2 * blk_j();
      }
    }
  };
  for (std::size_t k = 2; k < L; ++k) {
    BlockCore q(k == 2 ? 2 : r + 1, r + 1);
    fill(q, k, k == 2);
    cores.push_back(to_core(q));
  }

  BlockCore last(r + 1, 1);
  cd g1 = 0.0, g2 = 0.0, g3 = 0.0;
  for (std::size_t t = 0; t < r1; ++t) {
    const auto& w = spec.forward[t].base;
    const cd a = spec.forward[t].coeff;
    g1 += a;
    g2 += a * w.value;
    g3 += a * pow_base(w, N - 1);
    last.at(1 + t, 0) = a * w.value * (w.value * blk_i() + w.value * w.value * blk_jp() + blk_j());
  }
  for (std::size_t t = 0; t < spec.backward.size(); ++t) {
    const auto& z = spec.backward[t].base;
    const cd b = spec.backward[t].coeff;
    g1 += b * pow_base(z, N);
    g2 += b * pow_base(z, N - 1);
    g3 += b * z.value;
    last.at(1 + r1 + t, 0) = b * z.value * (z.value * blk_i() + blk_jp() + z.value * z.value * blk_j());
  }
  last.at(0, 0) = g1 * blk_i() + g2 * blk_jp() + g3 * blk_j();
  cores.push_back(to_core(last));
  return QttMatrix(std::move(cores));
}

/// Simple-root column model as an exponential sum: h-side terms run forward
/// (alpha = c w^{m-2}), g-side terms run backward (beta = c z^{n-1}).
inline ExponentialSumSpec column_model_to_spec(const ColumnModel& model) {
  const std::uint64_t N = model.size;
  detail::require(N >= 2 && (N & (N - 1)) == 0, "column_model_to_spec: N must be a power of two");
  detail::require(model.simple(), "column_model_to_spec: multiple roots have no explicit stable cores");
  detail::require(model.rotation == 0, "column_model_to_spec: shifted (m = 1) models are not exponential sums in j");
  ExponentialSumSpec spec;
  spec.levels = static_cast<std::size_t>(std::countr_zero(N));
  for (const auto& t : model.h_terms) spec.forward.push_back({t.coeff * pow_base(t.root, model.m - 2), t.root});
  // n = 0 leaves z^{N-1-j} = z^{-1} z^{N-j}; z != 0 since a_0 != 0
  for (const auto& t : model.g_terms) {
    const cd beta = model.n >= 1 ? t.coeff * pow_base(t.root, model.n - 1) : t.coeff / t.root.value;
    spec.backward.push_back({beta, t.root});
  }
  return spec;
}

}  // namespace qttcirc
