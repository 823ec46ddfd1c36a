#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dispcert/band.hpp"
#include "dispcert/interval.hpp"
#include "dispcert/objective.hpp"
#include "dispcert/optimizer.hpp"
#include "dispcert/weight.hpp"

namespace dispcert {

struct MeasureSpec {
  enum class Kind { mean, qbrm, gini, atkinson, cvar, var, smoothed_median };
  Kind kind = Kind::mean;
  double beta = 0.5;  // cvar, var, smoothed_median
  double a = 0.01;    // smoothed_median spread
  double eps = 0.5;   // atkinson
  std::optional<WeightFunction> psi;  // qbrm

  std::string name() const;
};

struct ObjectiveTerm {
  enum class Scope { population, expectation, max_pairwise_diff };
  MeasureSpec measure;
  Scope scope = Scope::population;
  double coefficient = 1.0;

  std::string label() const;
};

struct ObjectiveSpec {
  std::vector<ObjectiveTerm> terms;

  // Throws ValidationError when empty or a coefficient is negative or not finite.
  void validate() const;
  bool needs_population() const;
  bool needs_groups() const;
  // True when every term only needs the lower CDF side (no gini, no pairwise differences).
  bool one_sided() const;
};

// Certified [lower, upper] for one measure from one band.
ValueInterval measure_interval(const CdfBand& band, const MeasureSpec& measure);

// Plug-in value from the empirical CDF.
double empirical_measure(const LossSamples& samples, const MeasureSpec& measure);

struct BandSet {
  std::optional<CdfBand> population;
  std::map<std::string, CdfBand> groups;
  std::map<std::string, double> weights;
};

struct TermValue {
  std::string label;
  double value;
};

struct ObjectiveEvaluation {
  double total_upper;
  std::vector<TermValue> per_term;  // coefficient already applied
};

ObjectiveEvaluation evaluate_objective(const ObjectiveSpec& spec, const BandSet& bands);

double corrected_delta(double delta, std::size_t num_hypotheses, std::size_t num_groups);

// One loss column per hypothesis over shared examples.
class HypothesisLossTable {
 public:
  // Throws ValidationError on mismatched column sizes or empty input.
  HypothesisLossTable(std::vector<std::string> labels, std::vector<std::vector<double>> columns,
                      std::vector<std::string> groups = {}, std::optional<double> support_max = std::nullopt,
                      bool nonneg = false);

  std::size_t num_hypotheses() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  LossSamples column(std::size_t h) const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> columns_;
  std::vector<std::string> groups_;
  std::optional<double> support_max_;
  bool nonneg_;
};

struct SelectionOptions {
  BandMethod method = BandMethod::berk_jones;
  BandOptions band;
  OptimizerConfig optimizer;
};

struct HypothesisResult {
  std::string label;
  bool feasible;
  std::string error;
  double total_upper;
  std::vector<TermValue> per_term;
  std::vector<TermValue> empirical;
};

struct SelectionReport {
  std::optional<std::size_t> selected;
  double delta;
  double delta_corrected;
  BandMethod method;
  std::vector<HypothesisResult> hypotheses;
};

// Builds one band per (hypothesis, distribution) at the Bonferroni-corrected
// level, evaluates the objective bound, and picks the smallest (lowest index on ties).
SelectionReport select_hypothesis(const HypothesisLossTable& table, const ObjectiveSpec& spec, double delta,
                                  const SelectionOptions& options, Stage1Cache* cache = nullptr);

// The objective NN-Opt trains for one distribution: the population terms when
// `population`, else the group terms with the group's weight. Max-difference
// terms contribute the interval width.
ObjectivePtr optimizer_objective(const ObjectiveSpec& spec, bool population, double group_weight, double B,
                                 double floor);

// Bands for one loss column under the given method and per-distribution delta.
BandSet build_band_set(const LossSamples& samples, const ObjectiveSpec& spec, double delta_each,
                       const SelectionOptions& options, Stage1Cache* cache = nullptr);

}  // namespace dispcert
