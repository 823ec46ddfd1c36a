#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <random>

#include "dispcert/errors.hpp"
#include "dispcert/samples.hpp"
#include "dispcert/special.hpp"
#include "dispcert/step_cdf.hpp"
#include "dispcert/weight.hpp"

using namespace dispcert;

TEST(Samples, OrderStatisticsSortAndKeepTies) {
  EXPECT_EQ(order_statistics(LossSamples({3.0, 1.0, 2.0})).sorted(), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(order_statistics(LossSamples({5.0})).sorted(), (std::vector<double>{5.0}));
  EXPECT_EQ(order_statistics(LossSamples({2.0, 2.0, 1.0})).sorted(), (std::vector<double>{1.0, 2.0, 2.0}));
}

TEST(Samples, Validation) {
  EXPECT_THROW(LossSamples({}), ValidationError);
  EXPECT_THROW(LossSamples({1.0, NAN}), ValidationError);
  EXPECT_THROW(LossSamples({1.0, INFINITY}), ValidationError);
  EXPECT_THROW(LossSamples({-1.0}, {}, std::nullopt, true), ValidationError);
  EXPECT_THROW(LossSamples({2.0}, {}, 1.0), ValidationError);
  EXPECT_THROW(LossSamples({1.0, 2.0}, {"a"}), ValidationError);
  EXPECT_THROW(OrderStats(std::vector<double>{}), ValidationError);
}

TEST(Samples, Groups) {
  LossSamples s({1.0, 2.0, 3.0, 4.0}, {"b", "a", "b", "a"}, 5.0, true);
  EXPECT_EQ(s.group_labels(), (std::vector<std::string>{"a", "b"}));
  const LossSamples a = s.group("a");
  EXPECT_EQ(a.values(), (std::vector<double>{2.0, 4.0}));
  EXPECT_EQ(a.support_max(), 5.0);
  EXPECT_TRUE(a.nonneg());
}

TEST(StepCdf, InverseExamples) {
  const StepCdf f(0.0, {1.0, 2.0}, {0.5, 1.0});
  EXPECT_EQ(step_inverse(f, 0.5), 1.0);
  EXPECT_EQ(step_inverse(f, 0.7), 2.0);
  EXPECT_EQ(step_inverse(f, 1.0), 2.0);
  EXPECT_EQ(step_inverse(f, 0.1), 1.0);
  const StepCdf open(0.0, {1.0}, {0.4});
  EXPECT_EQ(step_inverse(open, 0.5), kInf);
  const StepCdf high(0.3, {1.0}, {1.0});
  EXPECT_EQ(step_inverse(high, 0.2), -kInf);
}

TEST(StepCdf, CanonicalFormDropsRepeats) {
  const StepCdf a(0.0, {1.0, 2.0, 3.0}, {0.5, 0.5, 1.0});
  const StepCdf b(0.0, {1.0, 3.0}, {0.5, 1.0});
  EXPECT_EQ(a, b);
  EXPECT_THROW(StepCdf(0.0, {2.0, 1.0}, {0.5, 1.0}), ValidationError);
  EXPECT_THROW(StepCdf(0.0, {1.0, 2.0}, {0.6, 0.5}), ValidationError);
  EXPECT_THROW(StepCdf(0.0, {1.0}, {1.5}), ValidationError);
}

TEST(StepCdf, InverseMonotoneAndGalois) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> bp, lv;
    double x = 0.0, level = u(rng) * 0.2;
    const double before = level;
    for (int j = 0; j < 20; ++j) {
      x += 0.1 + u(rng);
      level = std::min(1.0, level + u(rng) * 0.1);
      bp.push_back(x);
      lv.push_back(level);
    }
    const StepCdf f(before, bp, lv);
    double prev = -kInf;
    for (int k = 1; k <= 1000; ++k) {
      const double p = k / 1000.0;
      const double q = step_inverse(f, p);
      EXPECT_GE(q, prev);
      prev = q;
    }
    for (double b : f.breakpoints()) EXPECT_LE(step_inverse(f, std::max(f(b), 1e-300)), b);
  }
}

TEST(StepCdf, QuantilePiecesCoverUnitInterval) {
  const StepCdf f(0.0, {1.0, 2.0}, {0.25, 1.0});
  const auto pieces = quantile_pieces(f);
  ASSERT_EQ(pieces.size(), 2u);
  EXPECT_DOUBLE_EQ(pieces[0].p_lo, 0.0);
  EXPECT_DOUBLE_EQ(pieces[0].p_hi, 0.25);
  EXPECT_EQ(pieces[0].value, 1.0);
  EXPECT_DOUBLE_EQ(pieces[1].p_hi, 1.0);
  EXPECT_EQ(pieces[1].value, 2.0);
}

TEST(Weight, IntegralExamples) {
  EXPECT_NEAR(weight_integral(WeightFunction::cvar(0.75), 0.8, 0.9), 0.4, 1e-15);
  EXPECT_NEAR(weight_integral(WeightFunction::linear(), 0.2, 0.6), 0.16, 1e-15);
  EXPECT_DOUBLE_EQ(weight_integral(WeightFunction::constant_one(), 0.0, 1.0), 1.0);
  EXPECT_THROW(weight_integral(WeightFunction::constant_one(), 0.6, 0.5), ValidationError);
  EXPECT_THROW(WeightFunction::cvar(1.0), ValidationError);
}

TEST(Weight, AdditiveForEveryKind) {
  const std::vector<WeightFunction> kinds = {
      WeightFunction::constant_one(),
      WeightFunction::cvar(0.3),
      WeightFunction::interval_uniform(0.2, 0.7),
      WeightFunction::linear(),
      WeightFunction::smoothed_median(0.5, 0.01),
      WeightFunction::smoothed_median(0.3, 0.1),
      WeightFunction::power_tail(2.5),
      WeightFunction::piecewise_poly({{0.0, 0.5, {0.0, 2.0}}, {0.5, 1.0, {1.0, 0.0, -1.0}}}),
  };
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& w : kinds) {
    for (int rep = 0; rep < 200; ++rep) {
      double v[3] = {u(rng), u(rng), u(rng)};
      std::sort(v, v + 3);
      EXPECT_NEAR(w.integral(v[0], v[1]) + w.integral(v[1], v[2]), w.integral(v[0], v[2]), 1e-12) << w.name();
    }
  }
}

TEST(Weight, IntegralMatchesQuadratureOfValue) {
  const std::vector<WeightFunction> kinds = {
      WeightFunction::cvar(0.3), WeightFunction::interval_uniform(0.2, 0.7), WeightFunction::linear(),
      WeightFunction::smoothed_median(0.5, 0.05), WeightFunction::power_tail(3.0),
      WeightFunction::piecewise_poly({{0.0, 1.0, {1.0, -3.0, 2.0}}})};
  for (const auto& w : kinds) {
    // Composite Simpson on a fine grid, split at the kinds' kinks.
    const int m = 200000;
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = double(i) / m, b = double(i + 1) / m;
      s += (b - a) / 6.0 * (w.value(a) + 4.0 * w.value(0.5 * (a + b)) + w.value(b));
    }
    EXPECT_NEAR(w.integral(0.0, 1.0), s, 1e-4) << w.name();
  }
}

TEST(Weight, SmoothedMedianMass) {
  EXPECT_NEAR(WeightFunction::smoothed_median(0.5, 0.01).integral(0.0, 1.0), 1.0, 1e-10);
  EXPECT_NEAR(WeightFunction::smoothed_median(0.2, 0.01).integral(0.0, 1.0), 1.0, 1e-10);
  // Untruncated Gaussian leakage on both sides.
  for (double beta : {0.2, 0.5, 0.8}) {
    for (double a : {0.01, 0.05, 0.1}) {
      const double leak = 0.5 * std::erfc(beta / a) + 0.5 * std::erfc((1.0 - beta) / a);
      EXPECT_NEAR(WeightFunction::smoothed_median(beta, a).integral(0.0, 1.0), 1.0 - leak, 1e-14);
    }
  }
}

TEST(Weight, SignedParts) {
  const WeightFunction w = WeightFunction::piecewise_poly({{0.0, 1.0, {-1.0, 2.0}}});
  EXPECT_FALSE(w.nonnegative());
  const WeightFunction pos = w.positive_part(), neg = w.negative_part();
  EXPECT_TRUE(pos.nonnegative());
  EXPECT_TRUE(neg.nonnegative());
  for (double p = 0.0; p <= 1.0; p += 0.01) EXPECT_NEAR(pos.value(p) - neg.value(p), w.value(p), 1e-12);
  EXPECT_NEAR(pos.integral(0.0, 1.0), 0.25, 1e-12);
  EXPECT_NEAR(neg.integral(0.0, 1.0), 0.25, 1e-12);
}

TEST(Special, IncbetaMatchesBoost) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 2000; ++rep) {
    const double a = 0.2 + 300.0 * u(rng) * u(rng), b = 0.2 + 300.0 * u(rng) * u(rng), x = u(rng);
    const double want = boost::math::ibeta(a, b, x);
    EXPECT_NEAR(incbeta(a, b, x), want, 1e-12 + 1e-11 * want) << a << " " << b << " " << x;
  }
}

TEST(Special, IncbetaInverseMatchesBoost) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 2000; ++rep) {
    const double a = 1.0 + std::floor(500.0 * u(rng)), b = 1.0 + std::floor(500.0 * u(rng));
    const double p = std::pow(u(rng), 4.0);
    const double want = boost::math::ibeta_inv(a, b, p);
    EXPECT_NEAR(incbeta_inv(a, b, p), want, 1e-12 + 1e-10 * want) << a << " " << b << " " << p;
  }
  EXPECT_EQ(incbeta_inv(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(incbeta_inv(2.0, 3.0, 1.0), 1.0);
  EXPECT_NEAR(incbeta_inv(1.0, 1.0, 0.05), 0.05, 1e-15);
}
