#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "choquard/params.hpp"
#include "oracles.hpp"

using namespace choquard;

namespace {

ProblemParams make(int N, double s, double mu, double q, double p, double alpha = 0.0, double c = 1.0) {
  ProblemParams pr;
  pr.N = N;
  pr.s = s;
  pr.mu = mu;
  pr.q = q;
  pr.p = p;
  pr.alpha = alpha;
  pr.c = c;
  return pr;
}

}  // namespace

TEST(Params, GammaAtTwoInThreeDimensions) {
  EXPECT_DOUBLE_EQ(gamma(2.0, make(3, 0.5, 1.0, 2.0, 3.0)), 0.5);
}

TEST(Params, GammaVanishesAtLowerHlsExponent) {
  for (const auto& pr : {make(1, 0.4, 0.5, 2, 3), make(2, 0.7, 1.2, 2, 3), make(3, 0.75, 1.0, 2, 3)}) {
    EXPECT_NEAR(gamma((2.0 * pr.N - pr.mu) / pr.N, pr), 0.0, 1e-15);
  }
}

TEST(Params, GammaTimesExponentIsOneAtL2Critical) {
  for (const auto& pr : {make(1, 0.4, 0.5, 2, 3), make(2, 0.7, 1.2, 2, 3), make(3, 0.75, 1.0, 2, 3)}) {
    const double r = l2_critical_exponent(pr);
    EXPECT_NEAR(r * gamma(r, pr), 1.0, 1e-14);
  }
}

TEST(Params, GammaStrictlyIncreasingInExponent) {
  for (const auto& pr : {make(1, 0.4, 0.5, 2, 3), make(2, 0.3, 1.7, 2, 3), make(3, 0.9, 2.5, 2, 3)}) {
    const double lo = (2.0 * pr.N - pr.mu) / pr.N;
    const double hi = (2.0 * pr.N - pr.mu) / (pr.N - 2.0 * pr.s);
    double prev = gamma(lo, pr);
    for (int i = 1; i <= 1000; ++i) {
      const double r = lo + (hi - lo) * i / 1000.0;
      const double g = gamma(r, pr);
      EXPECT_GT(g, prev) << "r = " << r;
      prev = g;
    }
  }
}

TEST(Params, RieszConstantMatchesGammaRatio) {
  for (int N = 1; N <= 3; ++N) {
    for (double mu : {0.1, 0.5, 0.9 * N, 0.5 * N}) {
      EXPECT_NEAR(riesz_constant(N, mu) / oracle::riesz_constant(N, mu), 1.0, 1e-13) << N << " " << mu;
    }
  }
  EXPECT_NEAR(riesz_constant(1, 0.5), 1.0 / std::sqrt(2.0 * M_PI), 1e-15);
}

TEST(Params, RieszConstantStaysFiniteForLargeArguments) {
  // Ratio of gamma functions at arguments where tgamma alone overflows.
  const double A = riesz_constant(3, 2.999999);
  EXPECT_TRUE(std::isfinite(A));
  EXPECT_GT(A, 0.0);
}

TEST(Params, ClassifyExamples) {
  EXPECT_EQ(classify_regime(make(3, 0.75, 1.0, 2.0, 3.0)), Regime::CaseI);
  EXPECT_EQ(classify_regime(make(3, 0.75, 1.0, 13.0 / 6.0, 3.0)), Regime::CaseII);
  EXPECT_EQ(classify_regime(make(3, 0.75, 1.0, 1.8, 2.1)), Regime::CaseIV);
  EXPECT_EQ(classify_regime(make(3, 0.75, 1.0, 2.2, 3.0)), Regime::CaseIII);
}

TEST(Params, ClassifyRejectsBoundaryExponents) {
  const auto pr = make(3, 0.75, 1.0, 2.0, 3.0);
  const double lo = (2.0 * 3 - 1.0) / 3.0;
  const double hi = (2.0 * 3 - 1.0) / (3 - 1.5);
  EXPECT_THROW(classify_regime(make(3, 0.75, 1.0, lo, 3.0)), DomainError);
  EXPECT_THROW(classify_regime(make(3, 0.75, 1.0, 2.0, hi)), DomainError);
  EXPECT_THROW(classify_regime(make(3, 0.75, 1.0, 3.0, 2.5)), DomainError);
  EXPECT_NO_THROW(classify_regime(pr));
}

TEST(Params, ClassifyErrorNamesInequality) {
  try {
    classify_regime(make(3, 0.75, 1.0, 5.0 / 3.0, 3.0));
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("q > (2N-mu)/N"), std::string::npos);
  }
}

TEST(Params, ClassifyPartitionsAdmissibleRectangle) {
  std::mt19937_64 rng(7);
  for (const auto& base : {make(1, 0.4, 0.5, 2, 3), make(2, 0.6, 1.0, 2, 3), make(3, 0.75, 1.0, 2, 3)}) {
    const double lo = (2.0 * base.N - base.mu) / base.N;
    const double hi = (2.0 * base.N - base.mu) / (base.N - 2.0 * base.s);
    const double crit = l2_critical_exponent(base);
    std::uniform_real_distribution<double> U(lo + 1e-6, hi - 1e-6);
    for (int i = 0; i < 2000; ++i) {
      double q = U(rng), p = U(rng);
      if (q > p) std::swap(q, p);
      if (p - q < 1e-9) continue;
      auto pr = base;
      pr.q = q;
      pr.p = p;
      const Regime r = classify_regime(pr);
      int matches = 0;
      matches += (q < crit && crit < p);
      matches += (q > crit);
      matches += (p <= crit);
      EXPECT_EQ(matches, 1);
      if (q < crit && crit < p) {
        EXPECT_EQ(r, Regime::CaseI);
      }
      if (q > crit) {
        EXPECT_EQ(r, Regime::CaseIII);
      }
      if (p <= crit) {
        EXPECT_EQ(r, Regime::CaseIV);
      }
    }
  }
}

TEST(Params, ValidateRejectsBadInputs) {
  EXPECT_THROW(make(4, 0.5, 1.0, 2, 3).validate(), DomainError);
  EXPECT_THROW(make(1, 0.5, 0.5, 2, 3).validate(), DomainError);
  EXPECT_THROW(make(1, 0.4, 1.0, 2, 3).validate(), DomainError);
  EXPECT_THROW(make(1, 0.4, 0.5, 2, 3, -1.0).validate(), DomainError);
  EXPECT_THROW(make(1, 0.4, 0.5, 2, 3, 0.0, 0.0).validate(), DomainError);
}

// Independent evaluation for N=3, s=3/4, mu=1, q=2, p=3, c=1, C_q=C_p=1:
// gamma_q=1/3, gamma_p=8/9, so alpha1 = (3/16)^{1/5} * 5/2 and alpha2 = (5/3) 2^{-1/5}.
TEST(Params, AlphaThresholdsMatchHandEvaluation) {
  const auto pr = make(3, 0.75, 1.0, 2.0, 3.0);
  EXPECT_NEAR(alpha1(pr, 1.0, 1.0), 1.7887113513815693, 1e-13);
  EXPECT_NEAR(alpha2(pr, 1.0, 1.0), 1.4509176054935402, 1e-13);
}

TEST(Params, Alpha1DecreasesMonotonicallyInMass) {
  auto pr = make(1, 0.4, 0.5, 2.0, 3.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double c = 0.1; c < 100.0; c *= 1.3) {
    pr.c = c;
    const double a = alpha1(pr, 1.0, 1.0);
    EXPECT_LT(a, prev);
    prev = a;
  }
  pr.c = 1e6;
  EXPECT_LT(alpha1(pr, 1.0, 1.0), 1e-6);
}

TEST(Params, DoublingCqHalvesAlpha1) {
  const auto pr = make(1, 0.4, 0.5, 2.0, 3.0);
  EXPECT_NEAR(alpha1(pr, 2.0, 1.3) / alpha1(pr, 1.0, 1.3), 0.5, 1e-14);
}

TEST(Params, Alpha2EqualsBruteForceMaximumOfPhi) {
  for (const auto& pr : {make(1, 0.4, 0.5, 2.0, 3.0, 0, 1.0), make(3, 0.75, 1.0, 2.0, 3.0, 0, 0.7),
                         make(2, 0.6, 1.0, 1.9, 2.8, 0, 2.0)}) {
    const double Cq = 0.9, Cp = 1.2;
    const double ts = phi_argmax(pr, Cq, Cp);
    // 10^4 log-spaced points over eight decades around t_*, then golden refinement of the best bracket.
    const int n = 10000;
    double best = -INFINITY;
    int ibest = 0;
    auto t_of = [&](int i) { return ts * std::pow(10.0, -4.0 + 8.0 * i / (n - 1)); };
    for (int i = 0; i < n; ++i) {
      const double v = phi(t_of(i), pr, Cq, Cp);
      if (v > best) {
        best = v;
        ibest = i;
      }
    }
    double lo = t_of(std::max(0, ibest - 1)), hi = t_of(std::min(n - 1, ibest + 1));
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int k = 0; k < 200; ++k) {
      const double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      if (phi(x1, pr, Cq, Cp) > phi(x2, pr, Cq, Cp)) hi = x2; else lo = x1;
    }
    best = std::max(best, phi(0.5 * (lo + hi), pr, Cq, Cp));
    const double gq = gamma(pr.q, pr);
    const double brute = best / std::pow(pr.c, 2.0 * pr.q * (1.0 - gq));
    EXPECT_NEAR(alpha2(pr, Cq, Cp) / brute, 1.0, 1e-8);
  }
}

TEST(Params, Alpha2MassScalingLaw) {
  auto pr = make(1, 0.4, 0.5, 2.0, 3.0);
  const double gq = gamma(pr.q, pr), gp = gamma(pr.p, pr);
  const double qg = pr.q * gq, pg = pr.p * gp;
  const double base = alpha2(pr, 1.1, 0.8);
  for (double lam : {0.5, 2.0, 7.0}) {
    pr.c = lam;
    const double expected = std::pow(lam, -2.0 * pr.q * (1.0 - gq)) *
                            std::pow(lam, 2.0 * pr.p * (1.0 - gp) * (1.0 - qg) / (1.0 - pg));
    EXPECT_NEAR(alpha2(pr, 1.1, 0.8) / base, expected, 1e-12 * expected);
  }
}

TEST(Params, ThresholdsRejectWrongRegime) {
  EXPECT_THROW(alpha1(make(3, 0.75, 1.0, 2.2, 3.0), 1.0, 1.0), DomainError);
  EXPECT_THROW(alpha2(make(3, 0.75, 1.0, 1.8, 2.1), 1.0, 1.0), DomainError);
  EXPECT_THROW(alpha1(make(3, 0.75, 1.0, 2.0, 3.0), 0.0, 1.0), DomainError);
}

TEST(Params, MassConditionExamples) {
  auto pr = make(3, 0.75, 1.0, 13.0 / 6.0, 3.0);
  EXPECT_TRUE(l2_critical_mass_condition(pr, 1.0));
  pr.alpha = 1e12;
  EXPECT_FALSE(l2_critical_mass_condition(pr, 1.0));
  // alpha with (alpha/2q) C_q c^{..} = 1/2 exactly at c = 1.
  pr.alpha = pr.q;
  EXPECT_DOUBLE_EQ(l2_critical_mass_lhs(pr, 1.0), 0.5);
  EXPECT_FALSE(l2_critical_mass_condition(pr, 1.0));
  EXPECT_THROW(l2_critical_mass_condition(make(3, 0.75, 1.0, 2.0, 3.0), 1.0), DomainError);
}

TEST(Params, CbarExamples) {
  const auto pr = make(3, 0.75, 1.0, 1.8, 2.1);
  EXPECT_NEAR(cbar(pr, pr.p).value, 1.0, 1e-15);
  const auto tiny = cbar(pr, 1e-300);
  EXPECT_TRUE(tiny.overflow || tiny.value > 1e100);
  EXPECT_FALSE(cbar(pr, 1.0).overflow);
  EXPECT_THROW(cbar(make(3, 0.75, 1.0, 2.0, 3.0), 1.0), DomainError);
}

// N=3, s=3/4, mu=1, p=21/10: 2p(1 - gamma_p) = 37/15.
TEST(Params, CbarByHand) {
  const auto pr = make(3, 0.75, 1.0, 1.9, 2.1);
  ASSERT_NEAR(gamma(2.1, pr), 1.3 / 3.15, 1e-15);
  ASSERT_EQ(classify_regime(pr), Regime::CaseIV);
  EXPECT_NEAR(cbar(pr, 1.0).value / std::pow(2.1, 15.0 / 37.0), 1.0, 1e-14);
}
