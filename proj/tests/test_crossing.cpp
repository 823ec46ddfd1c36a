#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "dispcert/crossing.hpp"
#include "dispcert/errors.hpp"

using namespace dispcert;

namespace {

std::vector<double> random_sorted(std::mt19937_64& rng, std::size_t n, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> L(n);
  for (auto& x : L) x = scale * u(rng);
  std::sort(L.begin(), L.end());
  return L;
}

// Independent closed forms.
double p1(double a) { return 1.0 - a; }
double p2(double a, double b) { return 1.0 - 2.0 * a - b * b + 2.0 * a * b; }

}  // namespace

TEST(Crossing, ClosedForms) {
  EXPECT_NEAR(noncrossing_probability(std::vector<double>{0.3}), 0.7, 1e-15);
  EXPECT_NEAR(noncrossing_probability(std::vector<double>{0.2, 0.5}), 0.55, 1e-15);
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const auto L1 = random_sorted(rng, 1, 1.0);
    EXPECT_NEAR(noncrossing_probability(L1), p1(L1[0]), 1e-12);
    const auto L2 = random_sorted(rng, 2, 1.0);
    EXPECT_NEAR(noncrossing_probability(L2), p2(L2[0], L2[1]), 1e-12);
  }
}

TEST(Crossing, ZerosGiveOne) {
  for (std::size_t n : {1u, 5u, 100u, 700u}) EXPECT_NEAR(noncrossing_probability(std::vector<double>(n, 0.0)), 1.0, 1e-12);
}

TEST(Crossing, DanielsLineOracle) {
  // P(U_(i) >= c i / n for all i) = 1 - c.
  for (std::size_t n : {3u, 10u, 50u, 200u, 600u}) {
    for (double c : {0.1, 0.5, 0.9}) {
      std::vector<double> L(n);
      for (std::size_t i = 0; i < n; ++i) L[i] = c * double(i + 1) / double(n);
      EXPECT_NEAR(noncrossing_probability(L), 1.0 - c, 1e-10) << n << " " << c;
    }
  }
}

TEST(Crossing, ConstantBoundOracle) {
  for (std::size_t n : {2u, 20u, 300u}) {
    EXPECT_NEAR(noncrossing_probability(std::vector<double>(n, 0.01)), std::pow(0.99, double(n)), 1e-12);
  }
}

TEST(Crossing, MonotoneInEachCoordinate) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    auto L = random_sorted(rng, 12, 0.8);
    const double p = noncrossing_probability(L);
    const std::size_t i = rep % 12;
    L[i] = i + 1 < L.size() ? 0.5 * (L[i] + L[i + 1]) : 0.5 * (L[i] + 1.0);
    EXPECT_LE(noncrossing_probability(L), p + 1e-15);
  }
}

TEST(Crossing, RejectsInvalid) {
  EXPECT_THROW(noncrossing_probability(std::vector<double>{0.5, 0.2}), ValidationError);
  EXPECT_THROW(noncrossing_probability(std::vector<double>{-0.1}), ValidationError);
  EXPECT_THROW(noncrossing_probability(std::vector<double>{1.1}), ValidationError);
  EXPECT_THROW(calibrate_dkw(10, 0.0), ValidationError);
  EXPECT_THROW(calibrate_berk_jones(10, 1.0), ValidationError);
  EXPECT_THROW(calibrate_truncated_bj(10, 0.1, 0.55, 0.58), ValidationError);
}

TEST(Crossing, EqualEntriesAreFine) {
  EXPECT_NEAR(noncrossing_probability(std::vector<double>{0.2, 0.2}), p2(0.2, 0.2), 1e-14);
  const std::vector<double> L{0.1, 0.3, 0.3, 0.3, 0.6};
  const McEstimate mc = mc_noncrossing_oracle(L, 200000, 4);
  EXPECT_NEAR(noncrossing_probability(L), mc.estimate, 4 * mc.std_error + 1e-9);
}

TEST(Crossing, GradientExamples) {
  const auto g = noncrossing_gradient(std::vector<double>{0.2, 0.5});
  EXPECT_NEAR(g.probability, 0.55, 1e-15);
  EXPECT_NEAR(g.gradient[0], -1.0, 1e-14);
  EXPECT_NEAR(g.gradient[1], -0.6, 1e-14);
  EXPECT_NEAR(noncrossing_gradient(std::vector<double>{0.0}).gradient[0], -1.0, 1e-15);
}

TEST(Crossing, GradientLargeNAgreesWithDifferences) {
  std::mt19937_64 rng(9);
  const auto L = random_sorted(rng, 300, 0.3);
  const auto g = noncrossing_gradient(L);
  for (std::size_t i : {0u, 77u, 150u, 299u}) {
    auto a = L, b = L;
    const double h = 1e-6;
    a[i] += h;
    b[i] -= h;
    if (i + 1 < L.size()) a[i] = std::min(a[i], L[i + 1]);
    if (i > 0) b[i] = std::max(b[i], L[i - 1]);
    const double fd = (noncrossing_probability(a) - noncrossing_probability(b)) / (a[i] - b[i]);
    EXPECT_NEAR(g.gradient[i], fd, 1e-4 * std::fabs(fd) + 1e-7);
  }
}

TEST(Crossing, DkwExample) {
  const BoundVector L = calibrate_dkw(100, 0.05);
  const double r = std::sqrt(std::log(2.0 / 0.05) / 200.0);
  EXPECT_NEAR(r, 0.135811, 1e-6);
  EXPECT_EQ(L[49], 0.5 - r);
  EXPECT_NEAR(L[49], 0.364189, 1e-6);
  EXPECT_EQ(L[9], 0.0);
  const BoundVector wider = calibrate_dkw(100, 0.2);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_GE(wider[i], L[i]);
}

TEST(Crossing, BerkJonesSmall) {
  EXPECT_NEAR(calibrate_berk_jones(1, 0.05)[0], 0.05, 1e-9);
  const BoundVector L = calibrate_berk_jones(100, 0.05);
  const double p = noncrossing_probability(L);
  EXPECT_GE(p, 0.95);
  EXPECT_LE(p, 0.95 + 1e-9);
}

TEST(Crossing, TruncatedStructure) {
  const BoundVector full = calibrate_berk_jones(100, 0.05);
  const BoundVector same = calibrate_truncated_bj(100, 0.05, 0.0, 1.0);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_NEAR(full[i], same[i], 1e-7);
  const BoundVector t = calibrate_truncated_bj(100, 0.05, 0.5, 0.9);
  for (std::size_t i = 1; i <= 49; ++i) EXPECT_EQ(t[i - 1], 0.0);
  for (std::size_t i = 91; i <= 100; ++i) EXPECT_EQ(t[i - 1], t[89]);
  for (std::size_t i = 50; i <= 90; ++i) EXPECT_GT(t[i - 1], full[i - 1]);
  const double p = noncrossing_probability(t);
  EXPECT_GE(p, 0.95);
  EXPECT_LE(p, 0.95 + 1e-6);
}

TEST(Crossing, McOracle) {
  const std::vector<double> zeros(7, 0.0);
  const McEstimate z = mc_noncrossing_oracle(zeros, 1000, 1);
  EXPECT_EQ(z.estimate, 1.0);
  EXPECT_EQ(z.std_error, 0.0);
  const McEstimate a = mc_noncrossing_oracle(std::vector<double>{0.2, 0.5}, 1000000, 2);
  EXPECT_NEAR(a.estimate, 0.55, 3 * a.std_error);
  const McEstimate b = mc_noncrossing_oracle(std::vector<double>{0.2, 0.5}, 1000000, 2);
  EXPECT_EQ(a.estimate, b.estimate);
}

TEST(Crossing, Runtime200) {
  std::mt19937_64 rng(3);
  const auto L = random_sorted(rng, 200, 0.5);
  const auto t0 = std::chrono::steady_clock::now();
  noncrossing_probability(L);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(s, 1.0);
}
