#include <gtest/gtest.h>

#include <random>

#include "dispcert/errors.hpp"
#include "dispcert/functional.hpp"
#include "dispcert/measures.hpp"
#include "dispcert/multidim.hpp"
#include "dispcert/selection.hpp"

using namespace dispcert;

namespace {

ObjectiveTerm term(MeasureSpec::Kind kind, ObjectiveTerm::Scope scope, double coefficient) {
  ObjectiveTerm t;
  t.measure.kind = kind;
  t.scope = scope;
  t.coefficient = coefficient;
  return t;
}

}  // namespace

TEST(CorrectedDelta, Examples) {
  EXPECT_NEAR(corrected_delta(0.05, 50, 4), 0.00025, 1e-18);
  EXPECT_EQ(corrected_delta(0.05, 1, 1), 0.05);
  EXPECT_THROW(corrected_delta(0.05, 0, 1), ValidationError);
}

TEST(EvaluateObjective, MeanOnExactBand) {
  ObjectiveSpec spec{{term(MeasureSpec::Kind::mean, ObjectiveTerm::Scope::population, 1.0)}};
  BandSet set;
  set.population = exact_plugin_band(Distribution::uniform());
  EXPECT_NEAR(evaluate_objective(spec, set).total_upper, 0.5, 1e-3);
}

TEST(EvaluateObjective, IdenticalGroupsGiveIntervalWidth) {
  const LossSamples s({0.1, 0.2, 0.4, 0.5, 0.7, 0.9}, {}, 1.0, true);
  const CdfBand band = build_band(s, BandMethod::berk_jones, 0.1);
  ObjectiveSpec spec{{term(MeasureSpec::Kind::mean, ObjectiveTerm::Scope::expectation, 1.0),
                      term(MeasureSpec::Kind::smoothed_median, ObjectiveTerm::Scope::max_pairwise_diff, 1.0)}};
  BandSet set;
  set.groups.emplace("a", band);
  set.groups.emplace("b", band);
  set.weights = {{"a", 0.5}, {"b", 0.5}};
  const auto eval = evaluate_objective(spec, set);
  const WeightFunction sm = WeightFunction::smoothed_median(0.5, 0.01);
  const RealFn id = [](double x) { return x; };
  const double width = qbrm_upper(band, sm, id) - qbrm_lower(band, sm, id);
  ASSERT_EQ(eval.per_term.size(), 2u);
  EXPECT_NEAR(eval.per_term[1].value, width, 1e-12);
  EXPECT_NEAR(eval.per_term[0].value, mean_upper(band), 1e-12);
}

TEST(EvaluateObjective, AdditiveBreakdown) {
  const CdfBand band = exact_plugin_band(Distribution::beta(2, 5));
  ObjectiveSpec spec{{term(MeasureSpec::Kind::mean, ObjectiveTerm::Scope::population, 1.0),
                      term(MeasureSpec::Kind::gini, ObjectiveTerm::Scope::population, 0.2)}};
  BandSet set;
  set.population = band;
  const auto eval = evaluate_objective(spec, set);
  EXPECT_NEAR(eval.total_upper, mean_upper(band) + 0.2 * gini_upper(band), 1e-12);
  EXPECT_EQ(eval.per_term.size(), 2u);
}

TEST(EvaluateObjective, MissingSupportNamesTerm) {
  const CdfBand open = build_band(LossSamples({0.1, 0.5, 0.9}), BandMethod::berk_jones, 0.1);
  ObjectiveSpec spec{{term(MeasureSpec::Kind::mean, ObjectiveTerm::Scope::population, 1.0)}};
  BandSet set;
  set.population = open;
  try {
    evaluate_objective(spec, set);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("mean"), std::string::npos);
  }
}

TEST(EmpiricalMeasure, Examples) {
  MeasureSpec mean;
  EXPECT_NEAR(empirical_measure(LossSamples({1.0, 2.0, 3.0}), mean), 2.0, 1e-15);
  MeasureSpec gini;
  gini.kind = MeasureSpec::Kind::gini;
  EXPECT_EQ(empirical_measure(LossSamples({2.0, 2.0, 2.0}, {}, std::nullopt, true), gini), 0.0);
  EXPECT_NEAR(empirical_measure(LossSamples({0.0, 1.0}, {}, std::nullopt, true), gini), 0.5, 1e-15);
}

TEST(Select, SingleAndDominance) {
  std::mt19937_64 rng(3);
  std::vector<double> h1(60), h2(60);
  for (std::size_t i = 0; i < 60; ++i) {
    h1[i] = std::uniform_real_distribution<double>(0, 1)(rng);
    h2[i] = h1[i] + 1.0;
  }
  ObjectiveSpec spec{{term(MeasureSpec::Kind::mean, ObjectiveTerm::Scope::population, 1.0)}};
  const HypothesisLossTable one({"only"}, {h1}, {}, 3.0, true);
  EXPECT_EQ(select_hypothesis(one, spec, 0.1, {}).selected, 0u);
  const HypothesisLossTable two({"h2", "h1"}, {h2, h1}, {}, 3.0, true);
  const SelectionReport r = select_hypothesis(two, spec, 0.1, {});
  EXPECT_EQ(r.selected, 1u);
  EXPECT_NEAR(r.delta_corrected, 0.05, 1e-15);
  for (const auto& h : r.hypotheses) EXPECT_GE(h.total_upper, h.empirical[0].value);
}

TEST(Select, TiesGoToLowerIndexAndFailuresAreLocal) {
  std::vector<double> h(20);
  for (std::size_t i = 0; i < 20; ++i) h[i] = i / 20.0;
  ObjectiveSpec spec{{term(MeasureSpec::Kind::mean, ObjectiveTerm::Scope::population, 1.0)}};
  const HypothesisLossTable tie({"a", "b"}, {h, h}, {}, 1.0, true);
  EXPECT_EQ(select_hypothesis(tie, spec, 0.1, {}).selected, 0u);
  // The lower band of a small sample reaches zero, so eps > 1 fails for every hypothesis.
  ObjectiveSpec atk{{term(MeasureSpec::Kind::atkinson, ObjectiveTerm::Scope::population, 1.0)}};
  atk.terms[0].measure.eps = 2.0;
  std::vector<double> pos(20, 0.5);
  const HypothesisLossTable mixed({"zeros", "pos"}, {h, pos}, {}, 1.0, true);
  const SelectionReport r = select_hypothesis(mixed, atk, 0.1, {});
  for (const auto& hr : r.hypotheses) {
    EXPECT_FALSE(hr.feasible);
    EXPECT_NE(hr.error.find("atkinson"), std::string::npos);
  }
  EXPECT_FALSE(r.selected.has_value());
}

TEST(Select, MoreHypothesesNeverTighten) {
  std::mt19937_64 rng(4);
  std::vector<double> h(40);
  for (auto& x : h) x = std::uniform_real_distribution<double>(0, 1)(rng);
  ObjectiveSpec spec{{term(MeasureSpec::Kind::mean, ObjectiveTerm::Scope::population, 1.0)}};
  const double one = select_hypothesis(HypothesisLossTable({"a"}, {h}, {}, 1.0, true), spec, 0.1, {})
                         .hypotheses[0].total_upper;
  const double three = select_hypothesis(HypothesisLossTable({"a", "b", "c"}, {h, h, h}, {}, 1.0, true), spec, 0.1, {})
                           .hypotheses[0].total_upper;
  EXPECT_GE(three, one);
}

TEST(Select, GroupCorrectionCountsDistributions) {
  std::vector<double> h(40);
  std::vector<std::string> g(40);
  for (std::size_t i = 0; i < 40; ++i) {
    h[i] = (i % 7) / 7.0;
    g[i] = i % 2 ? "x" : "y";
  }
  ObjectiveSpec spec{{term(MeasureSpec::Kind::mean, ObjectiveTerm::Scope::expectation, 1.0)}};
  const SelectionReport r = select_hypothesis(HypothesisLossTable({"a", "b"}, {h, h}, g, 1.0, true), spec, 0.1, {});
  EXPECT_NEAR(r.delta_corrected, 0.1 / 4.0, 1e-15);
  spec.terms.push_back(term(MeasureSpec::Kind::mean, ObjectiveTerm::Scope::population, 1.0));
  const SelectionReport s = select_hypothesis(HypothesisLossTable({"a", "b"}, {h, h}, g, 1.0, true), spec, 0.1, {});
  EXPECT_NEAR(s.delta_corrected, 0.1 / 6.0, 1e-15);
}

TEST(Multidim, Ecdf) {
  const std::vector<Point> pts{{0.0, 0.0}, {1.0, 1.0}};
  EXPECT_EQ(multidim_ecdf(pts, {-1.0, -1.0}), 0.0);
  EXPECT_EQ(multidim_ecdf(pts, {2.0, 2.0}), 1.0);
  EXPECT_EQ(multidim_ecdf(pts, {0.5, 0.5}), 0.5);
  EXPECT_THROW(multidim_ecdf(pts, {0.5}), ValidationError);
}

TEST(Multidim, RadiusAndFrechet) {
  EXPECT_NEAR(multidim_dkw_radius(100, 2, 0.05), 0.20376, 5e-6);
  EXPECT_NEAR(multidim_dkw_radius(100, 2, 0.05), std::sqrt(std::log(2.0 * 101.0 / 0.05) / 200.0), 1e-15);
  // Exact marginals with F1(x1) = 0.7 and F2(x2) = 0.8.
  const std::vector<CdfBand> marg{exact_plugin_band(Distribution::discrete({0.0, 1.0}, {0.7, 0.3})),
                                  exact_plugin_band(Distribution::discrete({0.0, 1.0}, {0.8, 0.2}))};
  std::vector<Point> pts(100000, Point{0.0, 0.0});
  for (std::size_t i = 0; i < 50000; ++i) pts[i] = {1.0, 1.0};
  const ValueInterval v = multidim_band_query(pts, marg, 0.05, {0.5, 0.5});
  EXPECT_GE(v.lo, 0.5);
  EXPECT_LE(v.hi, 0.7);
  EXPECT_LE(v.lo, v.hi);
}

TEST(Multidim, SplitConventionIsWider) {
  EXPECT_GT(multidim_dkw_radius(100, 2, 0.05, DeltaConvention::split), multidim_dkw_radius(100, 2, 0.05));
  EXPECT_NEAR(multidim_marginal_delta(0.05, 2), 0.025, 1e-15);
  EXPECT_NEAR(multidim_marginal_delta(0.05, 2, DeltaConvention::split), 0.0125, 1e-15);
}
