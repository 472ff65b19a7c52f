#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "hetnet/errors.hpp"
#include "hetnet/xform.hpp"
#include "oracles.hpp"

using namespace hetnet;
using oracle::Wide;

namespace {

double rel_err(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

// Raw j-th derivative of exp(-a s^(2/alpha)) by the finite-difference oracle.
double fd_exp_stable(double a, double alpha, double s, int j) {
  const double delta = 2.0 / alpha;
  return oracle::fd_derivative([&](const Wide& x) { return Wide(exp(-a * pow(x, Wide(delta)))); }, s, j,
                               0.05 * s);
}

}  // namespace

TEST(CAlpha, KnownValues) {
  EXPECT_NEAR(c_alpha(4.0), std::numbers::pi * std::numbers::pi / 2.0, 1e-14);
  EXPECT_NEAR(c_alpha(4.0), 4.934802, 1e-6);
  EXPECT_NEAR(c_alpha(3.0), 4.0 * std::numbers::pi * std::numbers::pi / (3.0 * std::sqrt(3.0)), 1e-13);
  EXPECT_NEAR(c_alpha(3.0), 7.5976, 1e-4);
}

TEST(CAlpha, MatchesShotNoiseIntegral) {
  // C_alpha = pi * integral_0^inf du / (1 + u^(alpha/2)).
  boost::math::quadrature::exp_sinh<double> integrator;
  for (const double alpha : {2.5, 3.0, 3.5, 4.0, 5.0, 6.0}) {
    const double integral =
        integrator.integrate([&](double u) { return 1.0 / (1.0 + std::pow(u, alpha / 2.0)); });
    EXPECT_NEAR(c_alpha(alpha), std::numbers::pi * integral, 1e-8 * c_alpha(alpha)) << alpha;
  }
}

TEST(CAlpha, PoleRejected) {
  EXPECT_THROW(c_alpha(2.0), DomainError);
  EXPECT_THROW(c_alpha(1.5), DomainError);
  EXPECT_TRUE(std::isfinite(c_alpha(2.0 + 1e-9)));
}

TEST(ExpStable, ZeroAmplitudeIsConstant) {
  const DerivativeArray d = exp_stable_derivatives(0.0, 4.0, 1.0, 5);
  ASSERT_EQ(d.order(), 5);
  EXPECT_EQ(d.derivative(0), 1.0);
  for (int j = 1; j <= 5; ++j) EXPECT_EQ(d.derivative(j), 0.0);
}

TEST(ExpStable, FirstDerivativeClosedForm) {
  const DerivativeArray d = exp_stable_derivatives(1.0, 4.0, 1.0, 1);
  EXPECT_NEAR(d.derivative(0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(d.derivative(1), -0.5 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(d.derivative(1), -0.18394, 1e-5);
}

TEST(ExpStable, NonPositiveArgumentRejected) {
  EXPECT_THROW(exp_stable_derivatives(1.0, 4.0, 0.0, 3), DomainError);
  EXPECT_THROW(exp_stable_derivatives(1.0, 4.0, -1.0, 3), DomainError);
}

TEST(ExpStable, MatchesFiniteDifferencesThroughOrderTen) {
  struct Case {
    double a, alpha, s;
  };
  for (const Case c : {Case{1.0, 4.0, 1.0}, Case{0.3, 3.0, 2.5}, Case{2.0, 5.0, 0.4},
                       Case{0.05, 4.0, 30.0}, Case{1.5, 2.5, 1.2}}) {
    const DerivativeArray d = exp_stable_derivatives(c.a, c.alpha, c.s, 10);
    for (int j = 0; j <= 10; ++j) {
      const double want = fd_exp_stable(c.a, c.alpha, c.s, j);
      EXPECT_LT(rel_err(d.derivative(j), want), 1e-6)
          << "a=" << c.a << " alpha=" << c.alpha << " s=" << c.s << " j=" << j;
    }
  }
}

TEST(Rational, ClosedFormValues) {
  EXPECT_NEAR(rational_derivatives(1.0, 0.0, 2).derivative(2), 2.0, 1e-14);
  EXPECT_NEAR(rational_derivatives(2.0, 0.5, 3).derivative(3), -3.0, 1e-13);
  const DerivativeArray zero = rational_derivatives(0.0, 0.7, 4);
  EXPECT_EQ(zero.derivative(0), 1.0);
  for (int j = 1; j <= 4; ++j) EXPECT_EQ(zero.derivative(j), 0.0);
}

TEST(Rational, GeneralClosedForm) {
  for (const double c : {0.1, 1.0, 7.0}) {
    for (const double s : {0.2, 1.0, 9.0}) {
      const DerivativeArray d = rational_derivatives(c, s, 12);
      for (int n = 0; n <= 12; ++n) {
        const double want = std::pow(-c, n) * std::tgamma(n + 1.0) * std::pow(1.0 + c * s, -(n + 1.0));
        EXPECT_LT(rel_err(d.derivative(n), want), 1e-12) << c << " " << s << " " << n;
      }
    }
  }
}

TEST(Product, IdentityLeavesInputUnchanged) {
  const DerivativeArray x = exp_stable_derivatives(0.7, 3.0, 1.3, 8);
  const DerivativeArray one = constant_derivatives(1.3, 8);
  const DerivativeArray y = multiply(x, one);
  for (int j = 0; j <= 8; ++j) EXPECT_LT(rel_err(y.derivative(j), x.derivative(j)), 1e-15);
}

TEST(Product, ExpStableFactorsMerge) {
  const double a1 = 0.4, a2 = 1.1, alpha = 3.5, s = 2.0;
  const DerivativeArray p = multiply(exp_stable_derivatives(a1, alpha, s, 20),
                                     exp_stable_derivatives(a2, alpha, s, 20));
  const DerivativeArray m = exp_stable_derivatives(a1 + a2, alpha, s, 20);
  for (int j = 0; j <= 20; ++j) EXPECT_LT(rel_err(p.derivative(j), m.derivative(j)), 1e-10) << j;
}

TEST(Product, ExpTimesRationalMatchesFiniteDifferences) {
  const double a = 0.8, alpha = 4.0, c = 0.6, s = 1.0;
  const DerivativeArray p =
      multiply(exp_stable_derivatives(a, alpha, s, 10), rational_derivatives(c, s, 10));
  for (int j = 0; j <= 10; ++j) {
    const double want = oracle::fd_derivative(
        [&](const Wide& x) { return Wide(exp(-a * sqrt(x)) / (1 + c * x)); }, s, j, 0.05);
    EXPECT_LT(rel_err(p.derivative(j), want), 1e-6) << j;
  }
}

TEST(Product, ThreeFactorsAssociative) {
  const double s = 1.7;
  const DerivativeArray x = exp_stable_derivatives(0.5, 3.0, s, 30);
  const DerivativeArray y = rational_derivatives(2.0, s, 30);
  const DerivativeArray z = power(rational_derivatives(0.3, s, 30), 4);
  const DerivativeArray left = multiply(multiply(x, y), z);
  const DerivativeArray right = multiply(x, multiply(y, z));
  const std::vector<DerivativeArray> all{x, y, z};
  const DerivativeArray folded = product_derivatives(std::span<const DerivativeArray>(all));
  for (int j = 0; j <= 30; ++j) {
    EXPECT_LT(rel_err(left.derivative(j), right.derivative(j)), 1e-12) << j;
    EXPECT_LT(rel_err(folded.derivative(j), left.derivative(j)), 1e-12) << j;
  }
}

TEST(Product, PowerMatchesRepeatedMultiply) {
  const DerivativeArray base = rational_derivatives(0.9, 2.0, 15);
  DerivativeArray repeated = constant_derivatives(2.0, 15);
  for (int i = 0; i < 7; ++i) repeated = multiply(repeated, base);
  const DerivativeArray fast = power(base, 7);
  for (int j = 0; j <= 15; ++j) EXPECT_LT(rel_err(fast.derivative(j), repeated.derivative(j)), 1e-13);
  // (1 + c s)^-k has derivatives (-c)^n (k)_n (1 + c s)^-(k+n).
  for (int n = 0; n <= 15; ++n) {
    const double rising = std::tgamma(7.0 + n) / std::tgamma(7.0);
    const double want = std::pow(-0.9, n) * rising * std::pow(1.0 + 0.9 * 2.0, -(7.0 + n));
    EXPECT_LT(rel_err(fast.derivative(n), want), 1e-12) << n;
  }
}

TEST(Product, MismatchedArraysRejected) {
  EXPECT_THROW(multiply(constant_derivatives(1.0, 4), constant_derivatives(2.0, 4)), std::invalid_argument);
  EXPECT_THROW(multiply(constant_derivatives(1.0, 4), constant_derivatives(1.0, 5)), std::invalid_argument);
}

TEST(Product, CompleteMonotonicityProperty) {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double s = std::exp(-3.0 + 8.0 * unit(gen));
    const int order = 1 + static_cast<int>(unit(gen) * 60);
    DerivativeArray d = exp_stable_derivatives(5.0 * unit(gen), 2.1 + 4.0 * unit(gen), s, order);
    const int rationals = static_cast<int>(unit(gen) * 4);
    for (int i = 0; i < rationals; ++i) {
      d = multiply(d, power(rational_derivatives(3.0 * unit(gen), s, order), 1 + static_cast<int>(unit(gen) * 10)));
    }
    ASSERT_GT(d.derivative(0), 0.0);
    ASSERT_LE(d.derivative(0), 1.0 + 1e-15);
    for (int j = 0; j <= order; ++j) {
      const double v = static_cast<double>(d.coeffs[j]);
      if (v == 0.0) continue;
      ASSERT_EQ(std::signbit(v), j % 2 == 1) << "trial " << trial << " j " << j;
    }
  }
}

TEST(GammaTail, SingleTermIsTransformValue) {
  const DerivativeArray d = exp_stable_derivatives(0.9, 4.0, 2.0, 5);
  EXPECT_NEAR(gamma_tail_sum(d, 1).value, std::exp(-0.9 * std::sqrt(2.0)), 1e-15);
}

TEST(GammaTail, DegenerateExponentialExamples) {
  EXPECT_NEAR(gamma_tail_sum(degenerate_exponential_derivatives(1.0, 1.0, 1), 2).value, 2.0 / std::exp(1.0),
              1e-15);
  EXPECT_NEAR(gamma_tail_sum(degenerate_exponential_derivatives(0.5, 10.0, 9), 10).value, 0.96817, 5e-6);
}

TEST(GammaTail, MatchesRegularizedIncompleteGamma) {
  double worst = 0.0;
  for (int n = 1; n <= 64; ++n) {
    for (double x = 0.05; x <= 50.0; x *= 1.25) {
      // L(s) = exp(-b s) at s = 1, b = x.
      const DerivativeArray d = degenerate_exponential_derivatives(x, 1.0, n - 1);
      const double got = gamma_tail_sum(d, n).value;
      const double want = boost::math::gamma_q(static_cast<double>(n), x);
      worst = std::max(worst, rel_err(got, want));
      ASSERT_LT(rel_err(got, want), 1e-8) << "n=" << n << " x=" << x;
    }
  }
  RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(GammaTail, TermCountOutOfRange) {
  const DerivativeArray d = constant_derivatives(1.0, 3);
  EXPECT_THROW(gamma_tail_sum(d, 0), std::invalid_argument);
  EXPECT_THROW(gamma_tail_sum(d, 5), std::invalid_argument);
}

TEST(GammaTail, CancellationRaisesAndExtendedPathResolves) {
  DerivativeArray d;
  d.s = 1.0;
  d.step = 1.0;
  d.coeffs = {1e10 + 0.5, 1e10};
  d.abs_err = {0.0, 0.0};
  EXPECT_THROW(gamma_tail_sum(d, 2), AccuracyError);
  const TailSum raw = gamma_tail_sum_raw(d, 2);
  EXPECT_GT(raw.error_estimate, 1e-6);
  const TailSum wide = gamma_tail_sum(d.convert<ExtendedReal>(), 2);
  EXPECT_DOUBLE_EQ(wide.value, 0.5);
  EXPECT_LT(wide.error_estimate, 1e-18);
}

TEST(GammaTail, OutOfRangeBeyondErrorRaises) {
  DerivativeArray d;
  d.s = 1.0;
  d.step = 1.0;
  d.coeffs = {0.5, 0.75};
  d.abs_err = {0.0, 0.0};
  EXPECT_THROW(gamma_tail_sum(d, 2), AccuracyError);
}

TEST(GammaTail, ExtendedAgreesWithDouble) {
  const double s = 40.0;
  const auto dbl = multiply(exp_stable_derivatives<double>(0.3, 4.0, s, 199),
                            power(rational_derivatives<double>(0.02, s, 199), 9));
  const auto ext = multiply(exp_stable_derivatives<ExtendedReal>(0.3, 4.0, s, 199),
                            power(rational_derivatives<ExtendedReal>(0.02, s, 199), 9));
  const TailSum a = gamma_tail_sum(dbl, 200);
  const TailSum b = gamma_tail_sum(ext, 200);
  EXPECT_NEAR(a.value, b.value, 1e-12);
  EXPECT_LT(a.error_estimate, 1e-10);
}

TEST(GammaTailBound, SingleTermEqualsTransform) {
  auto laplace = [](double s) { return std::exp(-std::sqrt(s)); };
  EXPECT_DOUBLE_EQ(gamma_tail_bound(laplace, 4.0, 1), laplace(4.0));
}

TEST(GammaTailBound, DirectEvaluation) {
  auto laplace = [](double s) { return std::exp(-std::sqrt(s)); };
  double want = 0.0;
  for (int n = 0; n < 3; ++n) {
    want += std::pow(4.0, n) / std::tgamma(n + 1.0) * std::exp(-std::sqrt(4.0 - n / std::exp(1.0)));
  }
  EXPECT_NEAR(gamma_tail_bound(laplace, 4.0, 3), want, 1e-14);
}

TEST(GammaTailBound, NegativeShiftNamesTerm) {
  auto laplace = [](double s) { return std::exp(-std::sqrt(s)); };
  try {
    gamma_tail_bound(laplace, 1.0, 5);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("n = 3"), std::string::npos) << e.what();
  }
  EXPECT_NEAR(gamma_tail_bound_min_s(5), 4.0 / std::exp(1.0), 1e-15);
  EXPECT_EQ(gamma_tail_bound_min_s(1), 0.0);
}

TEST(GammaTailBound, DominatesExactSumOnGrid) {
  for (const double a : {0.1, 0.5, 2.0}) {
    for (const int n : {1, 2, 4, 8, 16}) {
      for (double s = gamma_tail_bound_min_s(n) + 0.01; s < 60.0; s *= 1.7) {
        auto laplace = [&](double x) { return std::exp(-a * std::sqrt(x)); };
        const double exact = gamma_tail_sum(exp_stable_derivatives(a, 4.0, s, n - 1), n).value;
        EXPECT_GE(gamma_tail_bound(laplace, s, n), exact) << a << " " << n << " " << s;
      }
    }
  }
}

TEST(RationalMixture, MatchesSimpsonOracle) {
  const double radius = 100.0, power_level = 0.005;
  const RadialDensity density(RadialDensity::Kind::mue_radial, radius);
  auto inv_rate = [&](double x) { return std::pow(x, 4.0) / power_level; };
  for (const double s : {1e5, 1e8, 3e9}) {
    const DerivativeArray d = rational_mixture_derivatives(inv_rate, density, s, 6);
    for (int n = 0; n <= 6; ++n) {
      // d^n/ds^n (1 + s/Y)^-1 = (-1)^n n! Y / (Y + s)^(n+1)
      const double want = oracle::simpson(
          [&](long double x) {
            const long double y = std::pow(x, 4.0L) / power_level;
            const long double sign = n % 2 == 0 ? 1.0L : -1.0L;
            return sign * std::tgamma(n + 1.0L) * y / std::pow(y + s, n + 1.0L) * 2.0L * x /
                   (radius * radius);
          },
          0.0L, radius, 400000);
      EXPECT_LT(rel_err(d.derivative(n), want), 1e-7) << "s=" << s << " n=" << n;
    }
    EXPECT_LT(rel_err(rational_mixture_value(inv_rate, density, s), d.derivative(0)), 1e-10);
  }
}
