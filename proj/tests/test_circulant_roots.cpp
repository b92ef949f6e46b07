#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "qttcirc/circulant.hpp"
#include "qttcirc/jet.hpp"
#include "qttcirc/powers.hpp"
#include "qttcirc/roots.hpp"
#include "qttcirc/solver1d.hpp"
#include "test_support.hpp"

namespace {

using namespace qttcirc;
using namespace qttcirc::testing;
using Mat = Eigen::MatrixXcd;
using mp = boost::multiprecision::cpp_bin_float_50;

const double sqrt3 = std::numbers::sqrt3;

BandSymbol counterexample() { return BandSymbol(0, 2, {1.0, 1.0}); }
BandSymbol double_root_symbol() { return BandSymbol(1, 3, {-0.75, 3.25, -4.0, 1.0}); }

// ---------------------------------------------------------------------------
// Symbols

TEST(BandSymbol, Validation) {
  EXPECT_THROW(BandSymbol(1, 0, {1.0}), ValidationError);
  EXPECT_THROW(BandSymbol(1, 2, {1.0, 2.0}), ValidationError);
  EXPECT_THROW(BandSymbol(1, 2, {0.0, 2.0, 1.0}), ValidationError);
  EXPECT_THROW(BandSymbol(1, 2, {1.0, 2.0, 0.0}), ValidationError);
  const auto s = BandSymbol::from_parts({1.0}, {4.0, 1.0});
  EXPECT_EQ(s.n(), 1u);
  EXPECT_EQ(s.m(), 2u);
  EXPECT_EQ(s.at(-1), cd(1.0));
  EXPECT_EQ(s.at(0), cd(4.0));
  EXPECT_EQ(s.at(2), cd(0.0));
  EXPECT_TRUE(s.is_symmetric());
  EXPECT_FALSE(double_root_symbol().is_symmetric());
}

TEST(LaurentEval, KnownValues) {
  EXPECT_EQ(laurent_eval(mass_symbol(), 1.0), cd(6.0));
  EXPECT_EQ(laurent_eval(counterexample(), -1.0), cd(0.0));
  // -1/i + 2 - i = i + 2 - i
  EXPECT_LE(std::abs(laurent_eval(stiffness_symbol(), cd(0.0, 1.0)) - 2.0), 1e-15);
  EXPECT_THROW(laurent_eval(mass_symbol(), 0.0), ValidationError);
  EXPECT_EQ(laurent_eval(counterexample(), 0.0), cd(1.0));
}

TEST(GhPolynomials, CoefficientsAndReversal) {
  const auto m = gh_polynomials(mass_symbol());
  EXPECT_EQ(m.g, (std::vector<cd>{1.0, 4.0, 1.0}));
  EXPECT_EQ(m.g, m.h);
  const auto d = gh_polynomials(double_root_symbol());
  EXPECT_EQ(d.g, (std::vector<cd>{-0.75, 3.25, -4.0, 1.0}));
  EXPECT_EQ(d.h, (std::vector<cd>{1.0, -4.0, 3.25, -0.75}));
}

TEST(Spectrum, CounterexampleInvertibleAtThreeSingularAtFour) {
  const auto s3 = spectrum(counterexample(), 3);
  EXPECT_TRUE(s3.invertible());
  EXPECT_GT(s3.min_abs(), 0.5);
  const auto s4 = spectrum(counterexample(), 4);
  EXPECT_FALSE(s4.invertible());
  EXPECT_LE(std::abs(s4.eigenvalues[2]), 1e-15);
  EXPECT_TRUE(std::isinf(spectrum(stiffness_symbol(), 8).condition_number()));
  EXPECT_EQ(spectrum(stiffness_symbol(), 8).eigenvalues[0], cd(0.0));
}

TEST(Spectrum, WrapRejected) {
  EXPECT_THROW(spectrum(double_root_symbol(), 3), ValidationError);
}

TEST(Spectrum, ConditionNumberOfMass) {
  // eigenvalues 4 + 2 cos(theta): extremes 6 and 2 at N even
  EXPECT_NEAR(spectrum(mass_symbol(), 8).condition_number(), 3.0, 1e-14);
}

TEST(Spectrum, DeterminantIsEigenvalueProduct) {
  std::mt19937_64 rng(21);
  for (std::uint64_t N : {8u, 16u, 64u}) {
    const BandSymbol s = random_symbol(rng, 5, 1e-2);
    const auto sp = spectrum(s, N);
    cd prod = 1.0;
    for (const cd& l : sp.eigenvalues) prod *= l;
    const cd det = materialize(s, N).determinant();
    EXPECT_LE(std::abs(prod - det) / std::abs(det), 1e-8) << N;
  }
}

TEST(DftInverse, IdentityAndCounterexample) {
  const auto e = dft_inverse_column(identity_symbol(), 8);
  for (std::size_t j = 0; j < 8; ++j) EXPECT_LE(std::abs(e[j] - (j == 0 ? 1.0 : 0.0)), 1e-15);
  const auto c = dft_inverse_column(counterexample(), 3);
  EXPECT_LE(std::abs(c[0] - 0.5), 1e-15);
  EXPECT_LE(std::abs(c[1] + 0.5), 1e-15);
  EXPECT_LE(std::abs(c[2] - 0.5), 1e-15);
  EXPECT_THROW(dft_inverse_column(counterexample(), 4), NumericalError);
  EXPECT_THROW(dft_inverse_column(stiffness_symbol(), 8), NumericalError);
}

TEST(DftInverse, MatchesDenseLu) {
  EXPECT_LE(rel_max_dev(dft_inverse_column(mass_symbol(), 8), dense_inverse_column(mass_symbol(), 8)), 1e-13);
  EXPECT_LE(rel_max_dev(dft_inverse_column(mass_symbol(), 12), dense_inverse_column(mass_symbol(), 12)), 1e-13);
  std::mt19937_64 rng(22);
  for (std::uint64_t N : {8u, 32u, 256u, 1024u}) {
    for (int t = 0; t < 3; ++t) {
      const BandSymbol s = random_symbol(rng, 6, 1e-2);
      EXPECT_LE(rel_max_dev(dft_inverse_column(s, N), dense_inverse_column(s, N)), 1e-10) << N;
    }
  }
}

TEST(Materialize, Layout) {
  EXPECT_EQ((materialize(identity_symbol(), 4) - Mat::Identity(4, 4)).norm(), 0.0);
  Mat c(3, 3);
  c << 1, 0, 1, 1, 1, 0, 0, 1, 1;
  EXPECT_EQ((materialize(counterexample(), 3) - c).norm(), 0.0);
  Mat m(4, 4);
  m << 4, 1, 0, 1, 1, 4, 1, 0, 0, 1, 4, 1, 1, 0, 1, 4;
  EXPECT_EQ((materialize(mass_symbol(), 4) - m).norm(), 0.0);
  EXPECT_THROW(materialize(mass_symbol(), 2), ValidationError);
  EXPECT_THROW(materialize(mass_symbol(), 5000), ValidationError);
}

TEST(Materialize, ForwardDifferenceRowLayout) {
  // (A u)_i = a_0 u_i + a_1 u_{i-1} + a_{-1} u_{i+1}
  const BandSymbol s(1, 2, {7.0, 2.0, 3.0});
  const Mat a = materialize(s, 5);
  EXPECT_EQ(a(2, 2), cd(2.0));
  EXPECT_EQ(a(2, 1), cd(3.0));
  EXPECT_EQ(a(2, 3), cd(7.0));
  EXPECT_EQ(a(0, 4), cd(3.0));
}

TEST(LaurentProduct, IdentityIsNeutral) {
  const auto p = laurent_product(double_root_symbol(), identity_symbol(), 8);
  EXPECT_EQ(p.coeffs(), double_root_symbol().coeffs());
  EXPECT_EQ(p.n(), 1u);
  EXPECT_EQ(p.m(), 3u);
}

TEST(LaurentProduct, StiffnessSquared) {
  const auto p = laurent_product(stiffness_symbol(), stiffness_symbol(), 8);
  EXPECT_EQ(p.coeffs(), (std::vector<cd>{1.0, -4.0, 6.0, -4.0, 1.0}));
  EXPECT_EQ(p.m(), 3u);
  EXPECT_EQ(p.n(), 2u);
  const Mat a = materialize(stiffness_symbol(), 8);
  EXPECT_EQ((a * a - materialize(p, 8)).norm(), 0.0);
}

TEST(LaurentProduct, MassTimesStiffnessDense) {
  const auto p = laurent_product(mass_symbol(), stiffness_symbol(), 16);
  const Mat d = materialize(mass_symbol(), 16) * materialize(stiffness_symbol(), 16);
  EXPECT_LE((d - materialize(p, 16)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(LaurentProduct, CommutativeAssociativeAndSizeChecked) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_symbol(rng, 3, 0.0, 1), b = random_symbol(rng, 3, 0.0, 1), c = random_symbol(rng, 3, 0.0, 1);
    const std::uint64_t N = 32;
    const auto ab = laurent_product(a, b, N), ba = laurent_product(b, a, N);
    ASSERT_EQ(ab.n(), ba.n());
    for (std::size_t k = 0; k < ab.width(); ++k) EXPECT_LE(std::abs(ab.coeffs()[k] - ba.coeffs()[k]), 1e-13);
    const auto l = laurent_product(ab, c, N), r = laurent_product(a, laurent_product(b, c, N), N);
    ASSERT_EQ(l.n(), r.n());
    ASSERT_EQ(l.m(), r.m());
    for (std::size_t k = 0; k < l.width(); ++k) EXPECT_LE(std::abs(l.coeffs()[k] - r.coeffs()[k]), 1e-13);
  }
  EXPECT_THROW(laurent_product(mass_symbol(), stiffness_symbol(), 5), ValidationError);
}

TEST(SymbolText, ParseAndFormat) {
  const auto s = parse_symbol("circ: 1 | 4 1");
  EXPECT_EQ(s.coeffs(), mass_symbol().coeffs());
  EXPECT_EQ(s.n(), 1u);
  const auto t = parse_symbol(" | 1 1");
  EXPECT_EQ(t.n(), 0u);
  EXPECT_EQ(t.m(), 2u);
  EXPECT_EQ(parse_complex("1.5-2j"), cd(1.5, -2.0));
  EXPECT_EQ(parse_complex("-3j"), cd(0.0, -3.0));
  EXPECT_EQ(parse_complex("2e-3+1e1j"), cd(2e-3, 10.0));
  EXPECT_EQ(parse_complex("j"), cd(0.0, 1.0));
  EXPECT_EQ(parse_complex("+4"), cd(4.0));
  EXPECT_THROW(parse_complex("1..2"), ValidationError);
  EXPECT_THROW(parse_symbol("1 4 1"), ValidationError);
  EXPECT_THROW(parse_symbol("1 | 4 | 1"), ValidationError);
  EXPECT_THROW(parse_symbol("toeplitz: 1 | 4 1"), ValidationError);
  EXPECT_THROW(parse_symbol("1 |"), ValidationError);
  const BandSymbol c(1, 2, {cd(0.5, -1.25), 3.0, cd(0.0, 2.0)});
  const auto back = parse_symbol(format_symbol(c));
  EXPECT_EQ(back.coeffs(), c.coeffs());
  EXPECT_EQ(back.n(), c.n());
}

// ---------------------------------------------------------------------------
// Roots

TEST(FindRoots, MassRoots) {
  const auto r = find_roots({1.0, 4.0, 1.0});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_LE(std::abs(r[0] - (-2.0 + sqrt3)), 1e-15);
  EXPECT_LE(std::abs(r[1] - (-2.0 - sqrt3)), 1e-14);
}

TEST(FindRoots, DoubleRootCluster) {
  const auto r = find_roots({-0.75, 3.25, -4.0, 1.0});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_LE(std::abs(r[0] - 0.5), 1e-7);
  EXPECT_LE(std::abs(r[1] - 0.5), 1e-7);
  EXPECT_LE(std::abs(r[2] - 3.0), 1e-13);
}

TEST(FindRoots, ScaledRootsOfUnity) {
  const double c = 0.3;
  const auto r = find_roots({c, 0.0, 0.0, 0.0, 0.0, 1.0});
  const double rad = std::pow(c, 0.2);
  for (const cd& z : r) {
    EXPECT_NEAR(std::abs(z), rad, 1e-14);
    const double k = (std::arg(z) - std::numbers::pi / 5.0) / (2.0 * std::numbers::pi / 5.0);
    EXPECT_NEAR(k, std::round(k), 1e-12);
  }
}

TEST(FindRoots, ResidualsAndErrors) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_symbol(rng, 9, 0.0);
    const auto& c = s.coeffs();
    for (const cd& z : find_roots(c)) {
      double scale = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) scale += std::abs(c[k]) * std::pow(std::abs(z), k);
      EXPECT_LE(std::abs(poly_eval(c, z)), 1e-10 * scale);
    }
  }
  EXPECT_THROW(find_roots({1.0}), ValidationError);
  EXPECT_THROW(find_roots({0.0, 1.0}), ValidationError);
  EXPECT_THROW(find_roots({1.0, 0.0}), ValidationError);
}

TEST(ClusterMultiplicities, Grouping) {
  const auto a = cluster_multiplicities({0.25, 0.25 + 1e-14}, 1e-7);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].multiplicity, 2);
  EXPECT_EQ(cluster_multiplicities(find_roots({1.0, 4.0, 1.0}), 1e-7).size(), 2u);
  const auto rs = analyze_roots(double_root_symbol()).g;
  ASSERT_EQ(rs.inside.size(), 1u);
  ASSERT_EQ(rs.outside.size(), 1u);
  EXPECT_EQ(rs.inside[0].multiplicity, 2);
  EXPECT_LE(std::abs(rs.inside[0].center.value - 0.5), 1e-15);
  EXPECT_EQ(rs.outside[0].multiplicity, 1);
  EXPECT_LE(std::abs(rs.outside[0].center.value - 3.0), 1e-14);
}

TEST(ClusterMultiplicities, ChainsTransitively) {
  const auto c = cluster_multiplicities({0.0, 0.6e-7, 1.2e-7, 5.0}, 1e-7);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].multiplicity + c[1].multiplicity, 4);
  EXPECT_EQ(std::max(c[0].multiplicity, c[1].multiplicity), 3);
}

TEST(ClassifyUnitCircle, CounterexampleRejected) {
  try {
    (void)analyze_roots(counterexample());
    FAIL() << "expected RootOnUnitCircle";
  } catch (const RootOnUnitCircle& e) {
    EXPECT_LE(std::abs(e.root() + 1.0), 1e-15);
  }
}

TEST(ClassifyUnitCircle, MassAndShiftedStiffness) {
  const auto m = analyze_roots(mass_symbol());
  ASSERT_EQ(m.g.inside.size(), 1u);
  EXPECT_LE(std::abs(m.g.inside[0].center.value - (-2.0 + sqrt3)), 1e-15);
  EXPECT_LE(std::abs(m.g.outside[0].center.value - (-2.0 - sqrt3)), 1e-14);
  for (double s : {0.1, 1.0, 10.0}) {
    const auto r = analyze_roots(stiffness_symbol(s));
    const double z1 = 1.0 + s / 2.0 - std::sqrt(s * s / 4.0 + s);
    ASSERT_EQ(r.g.inside.size(), 1u);
    EXPECT_NEAR(r.g.inside[0].center.value.real(), z1, 1e-14);
    EXPECT_NEAR(r.g.outside[0].center.value.real(), 1.0 / z1, 1e-12 / z1);
  }
}

TEST(ClassifyUnitCircle, MarginIsHonoured) {
  const std::vector<RootCluster> c{{Base(cd(1.0 + 5e-10)), 1}};
  EXPECT_THROW(classify_unit_circle(c, 1e-9), RootOnUnitCircle);
  EXPECT_NO_THROW(classify_unit_circle(c, 1e-10));
}

TEST(RootSystem, ReciprocityReconstructionDeterminism) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 40; ++t) {
    const auto s = random_symbol(rng, 9, 1e-3);
    const auto r = analyze_roots(s);
    EXPECT_EQ(r.g.degree, s.width() - 1);
    EXPECT_EQ(r.g.inside.size(), r.h.outside.size());
    for (const auto& zi : r.g.inside) {
      double best = 1e300;
      for (const auto& wo : r.h.outside) best = std::min(best, std::abs(1.0 / zi.center.value - wo.center.value));
      EXPECT_LE(best, 1e-8 * std::max(1.0, 1.0 / std::abs(zi.center.value)));
    }
    // prod (z - z_k)^{p_k} times the leading coefficient rebuilds g
    std::vector<cd> poly{s.coeffs().back()};
    for (const auto* side : {&r.g.inside, &r.g.outside})
      for (const auto& c : *side)
        for (int p = 0; p < c.multiplicity; ++p) {
          std::vector<cd> next(poly.size() + 1, 0.0);
          for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k + 1] += poly[k];
            next[k] -= c.center.value * poly[k];
          }
          poly = next;
        }
    ASSERT_EQ(poly.size(), s.width());
    double bound = std::abs(s.coeffs().back());
    for (const auto* side : {&r.g.inside, &r.g.outside})
      for (const auto& c : *side) bound *= std::pow(1.0 + std::abs(c.center.value), c.multiplicity);
    for (std::size_t k = 0; k < poly.size(); ++k) EXPECT_LE(std::abs(poly[k] - s.coeffs()[k]), 1e-10 * bound);
    const auto again = analyze_roots(s);
    for (std::size_t k = 0; k < r.g.inside.size(); ++k) EXPECT_EQ(again.g.inside[k].center.value, r.g.inside[k].center.value);
  }
}

TEST(RootSystem, AmbiguousSeparationFlagged) {
  // roots 0.5 and 0.5 + 4e-7: distinct at the default radius but closer than ten radii
  const cd a = 0.5, b = 0.5 + 4e-7, c = 3.0;
  const std::vector<cd> g{-a * b * c, a * b + a * c + b * c, -(a + b + c), 1.0};
  const auto r = analyze_polynomial(g, RootOptions{});
  EXPECT_TRUE(r.ambiguous);
  EXPECT_FALSE(analyze_roots(mass_symbol()).g.ambiguous);
}

TEST(RootOffsets, NearOneRootsKeepRelativeAccuracy) {
  for (std::size_t L : {10u, 20u, 40u, 50u}) {
    const double h = grid_step(L);
    const auto r = analyze_roots(assemble_symbol_1d(L), root_options_1d(L));
    ASSERT_EQ(r.g.inside.size(), 1u);
    ASSERT_EQ(r.g.outside.size(), 1u);
    // d^2 - (h^2 - h) d - h^2 = 0
    const double b = h * h - h;
    const double disc = std::sqrt(b * b + 4.0 * h * h);
    const double d_in = (b - disc) / 2.0;
    const double d_out = -h * h / d_in;
    const auto& in = r.g.inside[0].center;
    const auto& out = r.g.outside[0].center;
    const cd din = in.offset ? *in.offset : in.value - 1.0;
    const cd dout = out.offset ? *out.offset : out.value - 1.0;
    // without an offset the value 1 + d carries absolute error eps
    const double tol_in = in.offset ? 1e-13 : 1e-15 / std::abs(d_in);
    const double tol_out = out.offset ? 1e-13 : 1e-15 / std::abs(d_out);
    EXPECT_LE(std::abs(din - d_in) / std::abs(d_in), tol_in) << L;
    EXPECT_LE(std::abs(dout - d_out) / std::abs(d_out), tol_out) << L;
    EXPECT_EQ(in.offset.has_value(), L >= 14);
  }
}

// ---------------------------------------------------------------------------
// Powers

TEST(Powers, IntegerPowerConventions) {
  EXPECT_EQ(pow_int(0.0, 0), cd(1.0));
  EXPECT_EQ(pow_int(0.0, 5), cd(0.0));
  EXPECT_EQ(pow_int(0.5, std::uint64_t{1} << 40), cd(0.0));
  EXPECT_LE(std::abs(pow_int(cd(0.3, 0.8), 17) - std::pow(cd(0.3, 0.8), 17)), 1e-14);
}

TEST(Powers, OffsetBaseMatchesExtendedPrecision) {
  const double d = -1.618e-12;
  const std::uint64_t M = std::uint64_t{1} << 40;
  const double ref = static_cast<double>(boost::multiprecision::exp(mp(M) * boost::multiprecision::log1p(mp(d))));
  EXPECT_LE(std::abs(pow_base(Base::near_one(d), M).real() / ref - 1.0), 1e-14);
  const double ref1m = static_cast<double>(1 - boost::multiprecision::exp(mp(M) * boost::multiprecision::log1p(mp(d))));
  EXPECT_LE(std::abs(one_minus_pow(Base::near_one(d), M).real() / ref1m - 1.0), 1e-13);
  EXPECT_LE(std::abs(base_diff(Base::near_one(1e-13), Base::near_one(-2e-13)) - 3e-13), 1e-28);
}

TEST(Powers, ComplexLog1pExpm1SmallArguments) {
  const cd d(1e-12, -3e-12);
  EXPECT_LE(std::abs(qttcirc::log1p(d) - (d - d * d / 2.0)) / std::abs(d), 1e-15);
  EXPECT_LE(std::abs(qttcirc::expm1(d) - (d + d * d / 2.0)) / std::abs(d), 1e-15);
  const cd big(0.3, 0.4);
  EXPECT_LE(std::abs(qttcirc::log1p(big) - std::log(1.0 + big)), 1e-15);
  EXPECT_LE(std::abs(qttcirc::expm1(big) - (std::exp(big) - 1.0)), 1e-15);
}

double ref_pow(int g1, int g2, int e) {
  const mp h = boost::multiprecision::ldexp(mp(1), -e);
  const mp z = mp(1) - mp(g1) * h + mp(g2) * h * h;
  return static_cast<double>(boost::multiprecision::exp(boost::multiprecision::ldexp(mp(1), e) * boost::multiprecision::log(z)));
}

TEST(StablePow, DecayWithoutQuadraticTerm) {
  const double h = std::ldexp(1.0, -20);
  const double v = stable_pow(1.0, 0.0, h, std::uint64_t{1} << 20);
  EXPECT_LE(std::abs(v / ref_pow(1, 0, 20) - 1.0), 1e-14);
  // leading correction e^{-1}(1 - h/2); the next term is O(h^2)
  EXPECT_LE(std::abs(v / (std::exp(-1.0) * (1.0 - h / 2.0)) - 1.0), 1e-12);
}

TEST(StablePow, TrivialAndInvalid) {
  EXPECT_EQ(stable_pow(0.0, 0.0, 1e-3, 1000), 1.0);
  EXPECT_THROW(stable_pow(2000.0, 0.0, 1e-3, 1000), ValidationError);
}

TEST(StablePow, KeepsQuadraticTermTheNaivePowerLoses) {
  const int e = 30;
  const double h = std::ldexp(1.0, -e);
  const std::uint64_t M = std::uint64_t{1} << e;
  const double ref = ref_pow(1, 1, e);
  EXPECT_LE(std::abs(stable_pow(1.0, 1.0, h, M) / ref - 1.0), 1e-13);
  EXPECT_GE(std::abs(naive_pow(1.0, 1.0, h, M) / ref - 1.0), 1e-9);
}

// ---------------------------------------------------------------------------
// Jets

TEST(Jet, ProductReciprocalPower) {
  // (1 + t)(1 - t) = 1 - t^2
  Jet a(3, 1.0), b(3, 1.0);
  a[1] = 1.0;
  b[1] = -1.0;
  const Jet p = a * b;
  EXPECT_EQ(p[0], cd(1.0));
  EXPECT_EQ(p[1], cd(0.0));
  EXPECT_EQ(p[2], cd(-1.0));
  EXPECT_EQ(p[3], cd(0.0));
  // 1/(1 - t) = 1 + t + t^2 + t^3
  const Jet r = b.reciprocal();
  for (std::size_t k = 0; k <= 3; ++k) EXPECT_EQ(r[k], cd(1.0));
  // (1 + t)^3
  const Jet c = a.pow(3);
  EXPECT_EQ(c[1], cd(3.0));
  EXPECT_EQ(c[2], cd(3.0));
  EXPECT_EQ(c[3], cd(1.0));
  EXPECT_EQ(Jet::variable(2, 5.0).derivative(1), cd(1.0));
  EXPECT_EQ(c.derivative(3), cd(6.0));
  EXPECT_THROW(Jet(2).reciprocal(), NumericalError);
  EXPECT_THROW(Jet(2) + Jet(3), ValidationError);
}

/// r-th derivative by the trapezoid rule on a small circle about z.
cd cauchy_derivative(const std::function<cd(cd)>& f, cd z, int order, double radius = 0.25, int points = 128) {
  cd acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const cd u = std::polar(1.0, 2.0 * std::numbers::pi * k / points);
    acc += f(z + radius * u) / std::pow(u, order);
  }
  return std::tgamma(order + 1.0) * acc / (static_cast<double>(points) * std::pow(radius, order));
}

TEST(Jet, DerivativesMatchCauchyIntegrals) {
  const cd z0(0.4, 0.1), z1(2.0, -0.5), z2(-1.5, 0.7);
  const std::uint64_t N = 16;
  const std::size_t P = 3;
  Jet g = Jet(P, 2.0) * (Jet::variable(P, z0) - Jet(P, z1)).pow(2) * (Jet::variable(P, z0) - Jet(P, z2));
  const Jet inv_g = g.reciprocal();
  Jet zn(P, pow_int(z0, N));
  zn[1] = static_cast<double>(N) * pow_int(z0, N - 1);
  zn[2] = static_cast<double>(N * (N - 1) / 2) * pow_int(z0, N - 2);
  zn[3] = static_cast<double>(N * (N - 1) * (N - 2) / 6) * pow_int(z0, N - 3);
  const Jet inv_p = (Jet(P, 1.0) - zn).reciprocal();
  auto fg = [&](cd z) { return 1.0 / (2.0 * (z - z1) * (z - z1) * (z - z2)); };
  auto fp = [&](cd z) { return 1.0 / (1.0 - std::pow(z, static_cast<int>(N))); };
  for (int r = 0; r <= 3; ++r) {
    const cd a = cauchy_derivative(fg, z0, r);
    const cd b = cauchy_derivative(fp, z0, r);
    EXPECT_LE(std::abs(inv_g.derivative(r) - a) / std::abs(a), 1e-10) << r;
    EXPECT_LE(std::abs(inv_p.derivative(r) - b) / std::abs(b), 1e-10) << r;
  }
}

}  // namespace
