#include <gtest/gtest.h>

#include <random>

#include "dispcert/errors.hpp"
#include "dispcert/optimizer.hpp"

using namespace dispcert;

namespace {

OptimizerConfig quick() {
  OptimizerConfig c;
  c.stage1_epochs = 20000;
  c.stage2_max_epochs = 300;
  return c;
}

const RealFn id = [](double x) { return x; };

}  // namespace

TEST(Parameterize, ZeroNetworkGivesEvenSpacing) {
  OptimizerConfig c;
  BoundModel model(c, 2);
  model.network().params().setZero();
  const auto L = model.bounds();
  EXPECT_NEAR(L[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(L[1], 2.0 / 3.0, 1e-15);
  BoundModel big(c, 9);
  big.network().params().setZero();
  const auto M = big.bounds();
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(M[i], (i + 1) / 10.0, 1e-15);
}

TEST(Parameterize, StrictlyIncreasingInUnitInterval) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    OptimizerConfig c;
    c.rng_seed = seed;
    BoundModel model(c, 30);
    model.network().params() *= 3.0;
    const auto L = model.bounds();
    EXPECT_GT(L.front(), 0.0);
    EXPECT_LT(L.back(), 1.0);
    for (std::size_t i = 1; i < L.size(); ++i) EXPECT_GT(L[i], L[i - 1]);
  }
}

TEST(CumulativeSoftmax, BackwardMatchesDifferences) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::RowVectorXd phi(6);
  for (int i = 0; i < 6; ++i) phi[i] = g(rng);
  std::vector<double> w(6);
  for (auto& x : w) x = g(rng);
  auto f = [&](const Eigen::RowVectorXd& p) {
    const auto L = cumulative_softmax(p);
    double s = 0.0;
    for (int i = 0; i < 6; ++i) s += w[i] * L[i];
    return s;
  };
  const Eigen::RowVectorXd d = cumulative_softmax_backward(phi, w);
  for (int i = 0; i < 6; ++i) {
    Eigen::RowVectorXd a = phi, b = phi;
    a[i] += 1e-6;
    b[i] -= 1e-6;
    EXPECT_NEAR(d[i], (f(a) - f(b)) / 2e-6, 1e-8);
  }
}

TEST(Stage1, RealizableTarget) {
  OptimizerConfig c = quick();
  const std::size_t m = 10;
  std::vector<double> t(m);
  for (std::size_t i = 0; i < m; ++i) t[i] = (i + 1) / double(m + 1);
  const Stage1Result r = stage1_fit(c, BoundVector(t, 0.0, BandMethod::optimized));
  EXPECT_LE(r.mse, 1e-8);
}

TEST(Stage1, BerkJonesTargetAndDeterminism) {
  OptimizerConfig c;
  const BoundVector target = calibrate_berk_jones(50, 0.05);
  const Stage1Result a = stage1_fit(c, target);
  EXPECT_LE(a.mse, 1e-6);
  const Stage1Result b = stage1_fit(c, target);
  EXPECT_EQ(a.loss_curve, b.loss_curve);
  EXPECT_EQ(a.theta, b.theta);
}

TEST(Stage2, GradientMatchesDifferences) {
  OptimizerConfig c;
  c.rng_seed = 3;
  std::mt19937_64 rng(5);
  std::vector<double> x(12);
  for (auto& v : x) v = std::uniform_real_distribution<double>(0, 1)(rng);
  const OrderStats stats(x);
  BoundModel model(c, 12);
  const auto objective = qbrm_upper_objective(WeightFunction::linear(), id, 1.0);
  const double delta = 0.1;
  // A large weight keeps the hinge active so both parts are exercised.
  const double lambda = 2.0;
  Eigen::VectorXd grad;
  penalized_objective(model, *objective, stats, delta, lambda, &grad);
  ASSERT_GT(1.0 - delta - noncrossing_probability(model.bounds()), 0.0);
  std::uniform_int_distribution<Eigen::Index> pick(0, grad.size() - 1);
  int checked = 0;
  while (checked < 10) {
    const Eigen::Index k = pick(rng);
    const double h = 1e-6;
    BoundModel a = model, b = model;
    a.network().params()[k] += h;
    b.network().params()[k] -= h;
    const double fd = (penalized_objective(a, *objective, stats, delta, lambda, nullptr) -
                       penalized_objective(b, *objective, stats, delta, lambda, nullptr)) / (2 * h);
    if (std::fabs(fd) < 1e-7 && std::fabs(grad[k]) < 1e-7) continue;  // dead rectifier
    EXPECT_NEAR(grad[k], fd, 1e-3 * std::fabs(fd) + 1e-9) << k;
    ++checked;
  }
}

TEST(Stage2, ConstantObjective) {
  OptimizerConfig c = quick();
  const OrderStats stats(std::vector<double>{0.1, 0.4, 0.8, 0.9});
  BoundModel model(c, 4);
  const Stage2Result r = stage2_optimize(c, model.network().params(), *constant_objective(0.7), stats, 0.1);
  EXPECT_EQ(r.best_bound, 0.7);
  EXPECT_GE(noncrossing_probability(r.L_hat), 0.9);
}

TEST(EnforceConstraint, Examples) {
  const ShiftResult feasible = enforce_constraint(calibrate_dkw(20, 0.1).values(), 0.1);
  EXPECT_EQ(feasible.gamma_star, 0.0);
  const ShiftResult s = enforce_constraint(std::vector<double>{0.2, 0.5}, 0.1);
  // Root of 1 - 2a - b^2 + 2ab = 0.9 with a = 0.2 - g, b = 0.5 - g, solved independently.
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    const double g = 0.5 * (lo + hi), a = std::max(0.2 - g, 0.0), b = 0.5 - g;
    ((1 - 2 * a - b * b + 2 * a * b) >= 0.9 ? hi : lo) = g;
  }
  EXPECT_NEAR(s.gamma_star, 0.195, 5e-3);
  EXPECT_GE(s.gamma_star, hi);
  EXPECT_LE(s.gamma_star, hi + 1e-6 + 1e-9);
  EXPECT_GE(noncrossing_probability(s.shifted), 0.9);
  const std::vector<double> L{0.3, 0.6, 0.9};
  std::vector<double> zero(3);
  for (std::size_t i = 0; i < 3; ++i) zero[i] = std::max(L[i] - L.back(), 0.0);
  EXPECT_NEAR(noncrossing_probability(zero), 1.0, 1e-12);
  EXPECT_LE(enforce_constraint(L, 0.05).gamma_star, 0.9);
}

TEST(Split, ErrorsAndDeterminism) {
  OptimizerConfig c = quick();
  const auto objective = qbrm_upper_objective(WeightFunction::constant_one(), id, 1.0);
  EXPECT_THROW(split_optimize_apply(LossSamples({0.5}, {}, 1.0, true), *objective, 0.1, c), ValidationError);
  std::mt19937_64 rng(2);
  std::vector<double> v(41);
  for (auto& x : v) x = std::uniform_real_distribution<double>(0, 1)(rng);
  const LossSamples s(v, {}, 1.0, true);
  Stage1Cache cache;
  const SplitResult a = split_optimize_apply(s, *objective, 0.1, c, &cache);
  const SplitResult b = split_optimize_apply(s, *objective, 0.1, c, &cache);
  EXPECT_EQ(a.final_bound, b.final_bound);
  EXPECT_EQ(a.trained.L_hat.n(), 20u);
  EXPECT_EQ(a.applied.n(), 21u);
  EXPECT_EQ(a.held_out.n(), 21u);
  EXPECT_GE(noncrossing_probability(a.trained.L_hat), 0.9);
  EXPECT_GE(noncrossing_probability(a.applied), 0.9);
  double mean = 0.0;
  for (double x : a.held_out.sorted()) mean += x / 21.0;
  EXPECT_GE(a.final_bound, mean);
  EXPECT_EQ(seeded_permutation(10, 4), seeded_permutation(10, 4));
}
