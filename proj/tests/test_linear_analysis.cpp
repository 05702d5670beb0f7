#include "pngopt/linear_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace pngopt {
namespace {

using testing::rel_err;

// Reference values from tests/oracles/expected_values.py (numpy.poly / eigvals / Cardano).
constexpr double kB15 = 4.03834709983e-3;
constexpr double kC15 = 3.136534838085e-6;
constexpr double kSlow15 = 0.032393916773;
constexpr double kFast15 = 0.054671576307;
constexpr double kRcrit15 = 3.86899607451e-4;
constexpr double kPeriod15 = 159.106014845;
constexpr double kConcavitySpeed = 33.7458994741;
constexpr double kConcavitySpeedTwiceP0 = 44.0131414673;

bool has_root(const EigenSet& e, Complex s, double tol = 1e-12) {
  return std::any_of(e.begin(), e.end(), [&](const Complex& z) { return std::abs(z - s) < tol; });
}

TEST(Jacobian, Structure) {
  const Jacobian4 j = jacobian(25.0, 3e-4);
  EXPECT_NEAR(j(0, 0), -0.0123364485981, 1e-12);
  EXPECT_EQ(j.trace(), 0.0);
  EXPECT_EQ(j(0, 0), -j(2, 2));
  EXPECT_EQ(j(2, 1), j(3, 0));
  EXPECT_DOUBLE_EQ(j(1, 3), -1.0 / 3e-4);
  EXPECT_THROW((void)jacobian(0.0, 3e-4), std::domain_error);
  EXPECT_THROW((void)jacobian(15.0, 0.0), std::domain_error);
}

TEST(CharPoly, MatchesReferenceAtCruise) {
  const EvenQuartic q = char_poly(jacobian(15.0, 3e-4));
  EXPECT_LT(rel_err(q.b, kB15), 1e-9);
  EXPECT_LT(rel_err(q.c, kC15), 1e-9);
}

TEST(CharPoly, DeterminantIdentity) {
  // det(sI - A) by cofactor expansion against the returned polynomial.
  const Jacobian4 a = jacobian(15.0, 3e-4);
  const EvenQuartic q = char_poly(a);
  testing::Sampler rng(5);
  for (int k = 0; k < 5; ++k) {
    const Complex s{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
    std::array<std::array<Complex, 4>, 4> m;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m[i][j] = (i == j ? s : Complex{}) - a(i, j);
    const auto det3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
      return m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) -
             m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0]) +
             m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0]);
    };
    const Complex det = m[0][0] * det3(1, 2, 3, 1, 2, 3) - m[0][1] * det3(1, 2, 3, 0, 2, 3) +
                        m[0][2] * det3(1, 2, 3, 0, 1, 3) - m[0][3] * det3(1, 2, 3, 0, 1, 2);
    EXPECT_LT(std::abs(det - q(s)), 1e-9 * std::max(1e-12, std::abs(det))) << k;
  }
}

TEST(CharPoly, LargeJerkWeightLimit) {
  Jacobian4 j = jacobian(15.0, 3e-4);
  j(1, 3) = 0.0;
  const double a = -j(0, 0);
  const EvenQuartic q = char_poly(j);
  EXPECT_LT(rel_err(q.b, -a * a), 1e-9);
  EXPECT_NEAR(q.c, 0.0, 1e-20);
  const EigenSet e = eigenvalues(q);
  EXPECT_TRUE(has_root(e, Complex{a}, 1e-9));
  EXPECT_EQ(classify(e), ModeClass::Unstable);
}

TEST(CharPoly, RejectsNonHamiltonianMatrix) {
  Jacobian4 j = jacobian(15.0, 3e-4);
  j(1, 1) = 0.01;
  EXPECT_THROW((void)char_poly(j), StructuralError);
}

TEST(CharPoly, PrintedFormDisagrees) {
  const EvenQuartic num = char_poly(jacobian(15.0, 3e-4));
  const EvenQuartic printed = char_poly_printed(15.0, 3e-4);
  EXPECT_GT(rel_err(printed.b, num.b), 1e-6);
  EXPECT_GT(rel_err(printed.c, num.c), 1e-6);
  EXPECT_EQ(std::signbit(printed.c), std::signbit(num.c));

  // As R grows the printed b tends to +a^2, the numeric one to -a^2.
  const double a = -jacobian(15.0, 1.0)(0, 0);
  EXPECT_NEAR(char_poly_printed(15.0, 1e12).b, a * a, 1e-9 * a * a);
  EXPECT_NEAR(char_poly(jacobian(15.0, 1e12)).b, -a * a, 1e-9 * a * a);
}

TEST(Eigenvalues, ClosedFormExamples) {
  const Complex i{0.0, 1.0};
  const EigenSet osc = eigenvalues({5.0, 4.0});
  for (Complex s : {i, -i, 2.0 * i, -2.0 * i}) EXPECT_TRUE(has_root(osc, s)) << s;
  const EigenSet real = eigenvalues({-5.0, 4.0});
  for (Complex s : {1.0, -1.0, 2.0, -2.0}) EXPECT_TRUE(has_root(real, s)) << s;
  const EigenSet mixed = eigenvalues({0.0, -4.0});
  const double r2 = std::sqrt(2.0);
  for (Complex s : {Complex{r2}, Complex{-r2}, r2 * i, -r2 * i}) EXPECT_TRUE(has_root(mixed, s)) << s;
}

TEST(Eigenvalues, NegationSymmetric) {
  const EigenSet e = eigenvalues({0.3, -2.0});
  EXPECT_EQ(e[1], -e[0]);
  EXPECT_EQ(e[3], -e[2]);
}

TEST(Eigenvalues, CruiseFrequencies) {
  const auto w = pair_frequencies(eigenvalues(char_poly(jacobian(15.0, 3e-4))));
  EXPECT_LT(rel_err(w[0], kSlow15), 1e-9);
  EXPECT_LT(rel_err(w[1], kFast15), 1e-9);
}

TEST(Eigenvalues, AberthAgreesWithClosedForm) {
  testing::Sampler rng(3);
  for (int k = 0; k < 50; ++k) {
    const double v = rng.uniform(2.0, 33.0);
    const double r = rng.log_uniform(1e-7, 10.0);
    const EvenQuartic q = char_poly(jacobian(v, r));
    const EigenSet closed = eigenvalues(q);
    const EigenSet generic = quartic_roots({1.0, 0.0, q.b, 0.0, q.c});
    for (const Complex& s : closed) {
      double best = 1e300;
      for (const Complex& g : generic) best = std::min(best, std::abs(g - s));
      EXPECT_LT(best, 1e-8 * std::abs(s)) << "v=" << v << " R=" << r;
    }
  }
}

TEST(Eigenvalues, AberthGenericQuartic) {
  // (s - 1)(s + 2)(s^2 + 1) = s^4 + s^3 - s^2 + s - 2
  const EigenSet e = quartic_roots({1.0, 1.0, -1.0, 1.0, -2.0});
  for (Complex s : {Complex{1.0}, Complex{-2.0}, Complex{0.0, 1.0}, Complex{0.0, -1.0}}) {
    EXPECT_TRUE(has_root(e, s, 1e-12)) << s;
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(eigenvalues({5.0, 4.0})), ModeClass::Oscillatory);
  EXPECT_EQ(classify(eigenvalues({-5.0, 4.0})), ModeClass::Unstable);
  EXPECT_EQ(classify(eigenvalues({0.0, -4.0})), ModeClass::Unstable);
  EXPECT_EQ(classify(EigenSet{}), ModeClass::Degenerate);
  // Complex quartet off both axes
  EXPECT_EQ(classify(eigenvalues({1.0, 4.0})), ModeClass::Unstable);
  EXPECT_STREQ(to_string(ModeClass::Oscillatory), "Oscillatory");
}

TEST(Classify, ToleranceScalesWithMagnitude) {
  // Rounding-level real parts on a large root stay oscillatory.
  EigenSet e{Complex{1e-6, 1e3}, Complex{-1e-6, -1e3}, Complex{0.0, 2e3}, Complex{0.0, -2e3}};
  EXPECT_EQ(classify(e), ModeClass::Oscillatory);
  e[0] = Complex{1e-3, 1e3};
  e[1] = -e[0];
  EXPECT_EQ(classify(e), ModeClass::Unstable);
}

TEST(Classify, InvariantUnderScaling) {
  const EvenQuartic q = char_poly(jacobian(15.0, 3e-4));
  for (double k : {1e-2, 1.0, 1e2}) {
    // Roots of s^4 + k^2 b s^2 + k^4 c are k times the originals.
    EXPECT_EQ(classify(eigenvalues({k * k * q.b, k * k * k * k * q.c})), ModeClass::Oscillatory) << k;
  }
}

TEST(RootLocus, DichotomyAt25) {
  const auto locus = root_locus(25.0, log_grid(1e-6, 1e2, 200));
  EXPECT_EQ(locus.front().mode, ModeClass::Oscillatory);
  EXPECT_EQ(locus.back().mode, ModeClass::Unstable);
  EXPECT_EQ(oscillatory_transitions(locus), 1u);
}

TEST(RootLocus, AllUnstableAt35) {
  for (const auto& pt : root_locus(35.0, log_grid(1e-6, 1e2, 200))) {
    EXPECT_EQ(pt.mode, ModeClass::Unstable) << pt.r_value;
  }
}

TEST(RootLocus, SmallWeightLimits) {
  const auto lo = pair_frequencies(locus_point(25.0, 1e-6).eigenvalues);
  const auto hi = pair_frequencies(locus_point(25.0, 1e-4).eigenvalues);
  EXPECT_GT(lo[1] / hi[1], 3.0);
  EXPECT_LT(std::abs(lo[0] / hi[0] - 1.0), 0.1);
}

TEST(RootLocus, RejectsUnsortedGrid) {
  EXPECT_THROW((void)root_locus(15.0, {1e-3, 1e-4}), std::invalid_argument);
  EXPECT_THROW((void)root_locus(15.0, {0.0, 1e-4}), std::invalid_argument);
}

TEST(RootLocus, LogGrid) {
  const auto g = log_grid(1e-8, 1e2, 11);
  EXPECT_EQ(g.front(), 1e-8);
  EXPECT_EQ(g.back(), 1e2);
  EXPECT_NEAR(g[5], 1e-3, 1e-15);
}

TEST(CriticalWeight, At15) {
  const CriticalResult r = find_r_crit(15.0);
  EXPECT_LT(rel_err(r.r_crit, kRcrit15), 1e-5);
  EXPECT_NEAR(r.r_crit, 4.0e-4, 0.3e-4);
  EXPECT_LT(rel_err(r.period_at_crit, kPeriod15), 1e-4);
  EXPECT_DOUBLE_EQ(r.period_at_crit, 2.0 * std::numbers::pi / r.omega_at_crit);
  // The working weight of the optimization example is inside the oscillatory region.
  EXPECT_TRUE(is_oscillatory(15.0, 3e-4, {}, {}));
}

TEST(CriticalWeight, DiscriminantVanishes) {
  for (double v : {5.0, 15.0, 30.0}) {
    const CriticalResult r = find_r_crit(v);
    const auto disc = [&](double rr) {
      const EvenQuartic q = char_poly(jacobian(v, rr));
      return q.b * q.b - 4.0 * q.c;
    };
    EXPECT_GE(disc(r.r_crit), 0.0);
    EXPECT_LT(disc(r.r_crit * (1 + 1e-6)), 0.0);
    EXPECT_TRUE(is_oscillatory(v, r.r_crit * (1 - 1e-6), {}, {}));
    EXPECT_FALSE(is_oscillatory(v, r.r_crit * (1 + 1e-6), {}, {}));
  }
}

TEST(CriticalWeight, NotCapableAboveCriticalSpeed) {
  EXPECT_THROW((void)find_r_crit(35.0), NotPngCapable);
  EXPECT_FALSE(png_capable(35.0));
}

TEST(CriticalWeight, SweepTwoToThirtyTwo) {
  std::vector<double> grid;
  for (int v = 2; v <= 32; ++v) grid.push_back(v);
  const auto sweep = rcrit_sweep(grid);
  ASSERT_EQ(sweep.size(), grid.size());
  for (const auto& e : sweep) {
    ASSERT_TRUE(e.result.has_value()) << e.v << ": " << e.error;
    EXPECT_LT(e.result->r_crit, 1.0);
    EXPECT_GT(e.result->period_at_crit, 0.0);
  }
}

TEST(CriticalWeight, SweepMarksGaps) {
  const auto sweep = rcrit_sweep({15.0, 36.0});
  EXPECT_TRUE(sweep[0].result.has_value());
  EXPECT_FALSE(sweep[1].result.has_value());
  EXPECT_FALSE(sweep[1].error.empty());
}

TEST(CriticalSpeed, AgreesWithConcavityOracle) {
  const double v = find_v_crit();
  EXPECT_GE(v, 33.0);
  EXPECT_LE(v, 34.5);
  EXPECT_LT(std::abs(v - kConcavitySpeed), 0.5);
  EXPECT_LT(rel_err(concavity_speed(), kConcavitySpeed), 1e-9);
}

TEST(CriticalSpeed, ConcavityOracleMovesWithEngineSweetSpot) {
  BsfcParams b;
  b.p0 *= 2.0;
  EXPECT_LT(rel_err(concavity_speed({}, b), kConcavitySpeedTwiceP0), 1e-9);
  EXPECT_GT(concavity_speed({}, b), concavity_speed());
}

TEST(CriticalSpeed, CapabilityCanHaveGaps) {
  BsfcParams b;
  b.p0 = 45000.0;
  EXPECT_TRUE(png_capable(20.0, {}, b));
  EXPECT_FALSE(png_capable(30.0, {}, b));
  EXPECT_TRUE(png_capable(39.0, {}, b));
  EXPECT_FALSE(png_capable(40.0, {}, b));
}

bool oscillatory_coefficients(const EvenQuartic& q) {
  return q.b > 0.0 && q.c > 0.0 && q.b * q.b >= 4.0 * q.c;
}

TEST(CriticalSpeed, CapabilityEndsWhereACoefficientConditionFails) {
  // Near the concavity speed b ~ -h22 / R shrinks until b^2 < 4c; with a
  // doubled p0, c turns negative well before that.
  for (double p0 : {30000.0, 60000.0}) {
    BsfcParams b;
    b.p0 = p0;
    double lo = 2.0, hi = 40.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (png_capable(mid, {}, b) ? lo : hi) = mid;
    }
    EXPECT_TRUE(oscillatory_coefficients(char_poly(jacobian(lo - 0.01, 1e-8, {}, b)))) << p0;
    const EvenQuartic above = char_poly(jacobian(hi + 0.01, 1e-8, {}, b));
    EXPECT_FALSE(oscillatory_coefficients(above)) << p0;
    if (p0 == 30000.0) {
      EXPECT_LT(std::abs(lo - kConcavitySpeed), 0.05);
    } else {
      EXPECT_LT(above.c, 0.0);
      EXPECT_LT(lo, kConcavitySpeedTwiceP0 - 10.0);
    }
  }
}

TEST(CriticalSpeed, ConcavityCrossCheckCanReject) {
  BsfcParams b;
  b.p0 *= 2.0;
  EXPECT_THROW((void)find_v_crit({}, b), BracketError);
}

TEST(CriticalSpeed, BadBracket) {
  EXPECT_THROW((void)find_v_crit({}, {}, 36.0, 40.0), BracketError);
  EXPECT_THROW((void)find_v_crit({}, {}, 2.0, 20.0), BracketError);
}

} // namespace
} // namespace pngopt
