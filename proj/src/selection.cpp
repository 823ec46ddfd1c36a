#include "dispcert/selection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dispcert/errors.hpp"
#include "dispcert/functional.hpp"
#include "dispcert/measures.hpp"

namespace dispcert {
namespace {

const RealFn kIdentity = [](double x) { return x; };

WeightFunction weight_of(const MeasureSpec& m) {
  switch (m.kind) {
    case MeasureSpec::Kind::mean: return WeightFunction::constant_one();
    case MeasureSpec::Kind::cvar: return WeightFunction::cvar(m.beta);
    case MeasureSpec::Kind::smoothed_median: return WeightFunction::smoothed_median(m.beta, m.a);
    case MeasureSpec::Kind::qbrm:
      if (!m.psi) throw ValidationError("qbrm measure needs a weight");
      return *m.psi;
    default: throw ValidationError("measure '" + m.name() + "' has no weight");
  }
}

}  // namespace

ObjectivePtr optimizer_objective(const ObjectiveSpec& spec, bool population, double group_weight, double B,
                                 double floor) {
  auto upper = [&](const MeasureSpec& m) -> ObjectivePtr {
    if (m.kind == MeasureSpec::Kind::gini) return gini_upper_objective(B);
    const WeightFunction w = weight_of(m);
    if (!w.nonnegative()) throw ValidationError("optimizer needs a nonnegative weight for '" + m.name() + "'");
    return qbrm_upper_objective(w, kIdentity, B, m.name());
  };
  auto lower = [&](const MeasureSpec& m) -> ObjectivePtr {
    if (m.kind == MeasureSpec::Kind::gini) return gini_lower_objective(B);
    return qbrm_lower_objective(weight_of(m), kIdentity, floor, m.name());
  };
  std::vector<WeightedObjective> parts;
  for (const auto& t : spec.terms) {
    if (t.measure.kind == MeasureSpec::Kind::atkinson || t.measure.kind == MeasureSpec::Kind::var) {
      throw ValidationError("measure '" + t.measure.name() + "' is not supported by the optimizer");
    }
    switch (t.scope) {
      case ObjectiveTerm::Scope::population:
        if (population) parts.push_back({t.coefficient, upper(t.measure)});
        break;
      case ObjectiveTerm::Scope::expectation:
        if (!population) parts.push_back({t.coefficient * group_weight, upper(t.measure)});
        break;
      case ObjectiveTerm::Scope::max_pairwise_diff:
        if (!population) {
          parts.push_back({t.coefficient, upper(t.measure)});
          parts.push_back({-t.coefficient, lower(t.measure)});
        }
        break;
    }
  }
  if (parts.empty()) return constant_objective(0.0);
  return linear_objective(std::move(parts));
}

namespace {

CdfBand band_for(const LossSamples& samples, double delta, const SelectionOptions& options, const ObjectiveSpec& spec,
                 bool population, double group_weight, Stage1Cache* cache) {
  if (options.method != BandMethod::optimized) return build_band(samples, options.method, delta, options.band);
  const double B = samples.support_max().value_or(kInf);
  const ObjectivePtr objective = optimizer_objective(spec, population, group_weight, B, samples.nonneg() ? 0.0 : -kInf);
  const SplitResult split = split_optimize_apply(samples, *objective, 0.5 * delta, options.optimizer, cache);
  return band_from_bounds(split.held_out, split.applied, B, samples.nonneg());
}

}  // namespace

std::string MeasureSpec::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::mean: return "mean";
    case Kind::qbrm: return "qbrm(" + (psi ? psi->name() : std::string("?")) + ")";
    case Kind::gini: return "gini";
    case Kind::atkinson: os << "atkinson(" << eps << ")"; break;
    case Kind::cvar: os << "cvar(" << beta << ")"; break;
    case Kind::var: os << "var(" << beta << ")"; break;
    case Kind::smoothed_median: os << "smoothed_median(" << beta << "," << a << ")"; break;
  }
  return os.str();
}

std::string ObjectiveTerm::label() const {
  switch (scope) {
    case Scope::population: return measure.name();
    case Scope::expectation: return "E_g[" + measure.name() + "]";
    case Scope::max_pairwise_diff: return "max_pairwise_diff[" + measure.name() + "]";
  }
  return measure.name();
}

void ObjectiveSpec::validate() const {
  if (terms.empty()) throw ValidationError("objective needs at least one term");
  for (const auto& t : terms) {
    if (!(t.coefficient >= 0.0 && std::isfinite(t.coefficient))) {
      throw ValidationError("objective coefficients must be finite and >= 0");
    }
    if (t.measure.kind == MeasureSpec::Kind::qbrm && !t.measure.psi) throw ValidationError("qbrm term needs a weight");
  }
}

bool ObjectiveSpec::needs_population() const {
  return std::any_of(terms.begin(), terms.end(),
                     [](const auto& t) { return t.scope == ObjectiveTerm::Scope::population; });
}

bool ObjectiveSpec::needs_groups() const {
  return std::any_of(terms.begin(), terms.end(),
                     [](const auto& t) { return t.scope != ObjectiveTerm::Scope::population; });
}

bool ObjectiveSpec::one_sided() const {
  return std::none_of(terms.begin(), terms.end(), [](const auto& t) {
    return t.scope == ObjectiveTerm::Scope::max_pairwise_diff || t.measure.kind == MeasureSpec::Kind::gini;
  });
}

ValueInterval measure_interval(const CdfBand& band, const MeasureSpec& m) {
  switch (m.kind) {
    case MeasureSpec::Kind::gini: return make_interval(gini_lower(band), gini_upper(band));
    case MeasureSpec::Kind::atkinson:
      return make_interval(std::min(atkinson_lower(band, m.eps), atkinson_upper(band, m.eps)),
                           atkinson_upper(band, m.eps));
    case MeasureSpec::Kind::var: return var_bounds(band, m.beta);
    default: {
      const WeightFunction w = weight_of(m);
      if (!w.nonnegative()) return signed_weight_bounds(band, w, kIdentity);
      return make_interval(qbrm_lower(band, w, kIdentity), qbrm_upper(band, w, kIdentity));
    }
  }
}

double empirical_measure(const LossSamples& samples, const MeasureSpec& measure) {
  const CdfBand band = empirical_band(samples);
  return measure_interval(band, measure).hi;
}

ObjectiveEvaluation evaluate_objective(const ObjectiveSpec& spec, const BandSet& bands) {
  spec.validate();
  ObjectiveEvaluation out{0.0, {}};
  for (const auto& t : spec.terms) {
    double value = 0.0;
    try {
      switch (t.scope) {
        case ObjectiveTerm::Scope::population:
          if (!bands.population) throw ValidationError("no population band");
          value = measure_interval(*bands.population, t.measure).hi;
          break;
        case ObjectiveTerm::Scope::expectation:
          if (bands.groups.empty()) throw ValidationError("no group bands");
          for (const auto& [g, band] : bands.groups) value += bands.weights.at(g) * measure_interval(band, t.measure).hi;
          break;
        case ObjectiveTerm::Scope::max_pairwise_diff: {
          std::vector<GroupBounds::Entry> entries;
          for (const auto& [g, band] : bands.groups) {
            entries.push_back({g, measure_interval(band, t.measure), bands.weights.at(g)});
          }
          value = max_pairwise_diff_upper(GroupBounds(std::move(entries)), DiffKind::abs);
          break;
        }
      }
    } catch (const DivergenceError& e) {
      throw DivergenceError("term " + t.label() + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("term " + t.label() + ": " + e.what());
    }
    out.per_term.push_back({t.label(), t.coefficient * value});
    out.total_upper += t.coefficient * value;
  }
  return out;
}

double corrected_delta(double delta, std::size_t num_hypotheses, std::size_t num_groups) {
  if (num_hypotheses < 1 || num_groups < 1) throw ValidationError("correction counts must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
  return delta / (static_cast<double>(num_hypotheses) * static_cast<double>(num_groups));
}

HypothesisLossTable::HypothesisLossTable(std::vector<std::string> labels, std::vector<std::vector<double>> columns,
                                         std::vector<std::string> groups, std::optional<double> support_max,
                                         bool nonneg)
    : labels_(std::move(labels)),
      columns_(std::move(columns)),
      groups_(std::move(groups)),
      support_max_(support_max),
      nonneg_(nonneg) {
  if (labels_.empty()) throw ValidationError("hypothesis table has no hypotheses");
  if (labels_.size() != columns_.size()) throw ValidationError("one column per hypothesis label is required");
  for (const auto& c : columns_) {
    if (c.size() != columns_.front().size()) throw ValidationError("hypothesis columns differ in length");
  }
  if (!groups_.empty() && groups_.size() != columns_.front().size()) {
    throw ValidationError("group labels must match the number of examples");
  }
  for (std::size_t h = 0; h < columns_.size(); ++h) column(h);
}

LossSamples HypothesisLossTable::column(std::size_t h) const {
  return LossSamples(columns_.at(h), groups_, support_max_, nonneg_);
}

BandSet build_band_set(const LossSamples& samples, const ObjectiveSpec& spec, double delta_each,
                       const SelectionOptions& options, Stage1Cache* cache) {
  BandSet set;
  if (spec.needs_population()) {
    set.population = band_for(samples, delta_each, options, spec, true, 1.0, cache);
  }
  if (spec.needs_groups()) {
    if (!samples.has_groups()) throw ValidationError("group-scoped terms need group labels");
    const double n = static_cast<double>(samples.size());
    for (const auto& g : samples.group_labels()) {
      const LossSamples part = samples.group(g);
      const double w = static_cast<double>(part.size()) / n;
      set.weights[g] = w;
      set.groups.emplace(g, band_for(part, delta_each, options, spec, false, w, cache));
    }
  }
  return set;
}

SelectionReport select_hypothesis(const HypothesisLossTable& table, const ObjectiveSpec& spec, double delta,
                                  const SelectionOptions& options, Stage1Cache* cache) {
  spec.validate();
  const LossSamples first = table.column(0);
  std::size_t distributions = 0;
  if (spec.needs_groups()) {
    if (!first.has_groups()) throw ValidationError("group-scoped terms need group labels");
    distributions += first.group_labels().size();
  }
  if (spec.needs_population()) distributions += 1;
  SelectionReport report{std::nullopt, delta, corrected_delta(delta, table.num_hypotheses(), distributions),
                         options.method, {}};
  Stage1Cache local;
  Stage1Cache& c = cache ? *cache : local;
  for (std::size_t h = 0; h < table.num_hypotheses(); ++h) {
    HypothesisResult r{table.labels()[h], false, "", kInf, {}, {}};
    try {
      const LossSamples samples = table.column(h);
      const BandSet bands = build_band_set(samples, spec, report.delta_corrected, options, &c);
      const ObjectiveEvaluation eval = evaluate_objective(spec, bands);
      r.total_upper = eval.total_upper;
      r.per_term = eval.per_term;
      for (const auto& t : spec.terms) {
        double v = 0.0;
        if (t.scope == ObjectiveTerm::Scope::population) {
          v = empirical_measure(samples, t.measure);
        } else {
          const double n = static_cast<double>(samples.size());
          std::vector<std::pair<std::string, double>> per_group;
          for (const auto& g : samples.group_labels()) {
            const LossSamples part = samples.group(g);
            per_group.emplace_back(g, empirical_measure(part, t.measure));
            if (t.scope == ObjectiveTerm::Scope::expectation) v += static_cast<double>(part.size()) / n * per_group.back().second;
          }
          if (t.scope == ObjectiveTerm::Scope::max_pairwise_diff) {
            for (const auto& a : per_group) {
              for (const auto& b : per_group) v = std::max(v, std::fabs(a.second - b.second));
            }
          }
        }
        r.empirical.push_back({t.label(), t.coefficient * v});
      }
      r.feasible = std::isfinite(r.total_upper);
      if (!r.feasible) r.error = "objective bound is not finite";
    } catch (const std::exception& e) {
      r.feasible = false;
      r.error = e.what();
    }
    if (r.feasible && (!report.selected || r.total_upper < report.hypotheses[*report.selected].total_upper)) {
      report.selected = h;
    }
    report.hypotheses.push_back(std::move(r));
  }
  return report;
}

}  // namespace dispcert
