#include "dispcert/report.hpp"

#include <cmath>

#include "dispcert/errors.hpp"
#include "dispcert/measures.hpp"

namespace dispcert {
namespace {

double num(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw ValidationError(std::string("missing number '") + key + "'");
  return j[key].get<double>();
}

double num_or(const Json& j, const char* key, double fallback) { return j.contains(key) ? num(j, key) : fallback; }

std::string str(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw ValidationError(std::string("missing string '") + key + "'");
  return j[key].get<std::string>();
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

WeightFunction weight_from_json(const Json& j) {
  const std::string kind = str(j, "kind");
  if (kind == "constant_one") return WeightFunction::constant_one();
  if (kind == "cvar") return WeightFunction::cvar(num(j, "beta"));
  if (kind == "interval_uniform") return WeightFunction::interval_uniform(num(j, "beta_min"), num(j, "beta_max"));
  if (kind == "linear") return WeightFunction::linear();
  if (kind == "smoothed_median") return WeightFunction::smoothed_median(num(j, "beta"), num_or(j, "a", 0.01));
  if (kind == "power_tail") return WeightFunction::power_tail(num(j, "nu"));
  if (kind == "piecewise_poly") {
    std::vector<PolySegment> segs;
    for (const auto& s : j.at("segments")) {
      segs.push_back({num(s, "lo"), num(s, "hi"), s.at("coeffs").get<std::vector<double>>()});
    }
    return WeightFunction::piecewise_poly(std::move(segs));
  }
  throw ValidationError("unknown weight kind '" + kind + "'");
}

Distribution distribution_from_json(const Json& j) {
  const std::string kind = str(j, "kind");
  if (kind == "uniform") return Distribution::uniform(num_or(j, "lo", 0.0), num_or(j, "hi", 1.0));
  if (kind == "beta") return Distribution::beta(num(j, "a"), num(j, "b"), num_or(j, "lo", 0.0), num_or(j, "hi", 1.0));
  if (kind == "exponential") return Distribution::exponential(num(j, "rate"), num(j, "support_max"));
  if (kind == "discrete") {
    std::vector<double> probs;
    if (j.contains("probs")) probs = j["probs"].get<std::vector<double>>();
    return Distribution::discrete(j.at("values").get<std::vector<double>>(), std::move(probs));
  }
  throw ValidationError("unknown distribution kind '" + kind + "'");
}

MeasureSpec measure_spec_from_json(const Json& j) {
  const std::string name = str(j, "name");
  MeasureSpec m;
  using K = MeasureSpec::Kind;
  if (name == "mean") {
    m.kind = K::mean;
  } else if (name == "qbrm") {
    m.kind = K::qbrm;
    m.psi = weight_from_json(j.at("weight"));
  } else if (name == "gini") {
    m.kind = K::gini;
  } else if (name == "atkinson") {
    m.kind = K::atkinson;
    m.eps = num(j, "eps");
  } else if (name == "cvar") {
    m.kind = K::cvar;
    m.beta = num(j, "beta");
  } else if (name == "var") {
    m.kind = K::var;
    m.beta = num(j, "beta");
  } else if (name == "smoothed_median") {
    m.kind = K::smoothed_median;
    m.beta = num_or(j, "beta", 0.5);
    m.a = num_or(j, "a", 0.01);
  } else {
    throw ValidationError("unknown objective measure '" + name + "'");
  }
  return m;
}

ObjectiveSpec objective_from_json(const Json& j) {
  ObjectiveSpec spec;
  for (const auto& t : j.at("terms")) {
    ObjectiveTerm term;
    term.measure = measure_spec_from_json(t.at("measure"));
    const std::string scope = t.contains("scope") ? str(t, "scope") : std::string("population");
    if (scope == "population") {
      term.scope = ObjectiveTerm::Scope::population;
    } else if (scope == "expectation") {
      term.scope = ObjectiveTerm::Scope::expectation;
    } else if (scope == "max_pairwise_diff") {
      term.scope = ObjectiveTerm::Scope::max_pairwise_diff;
    } else {
      throw ValidationError("unknown scope '" + scope + "'");
    }
    term.coefficient = num_or(t, "coefficient", 1.0);
    spec.terms.push_back(std::move(term));
  }
  spec.validate();
  return spec;
}

OptimizerConfig optimizer_config_from_json(const Json& j, OptimizerConfig c) {
  auto count = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_unsigned()) throw ValidationError(std::string("'") + key + "' must be a nonnegative integer");
    field = j[key].get<std::remove_reference_t<decltype(field)>>();
  };
  count("seed_dim", c.seed_dim);
  count("width", c.width);
  count("hidden_layers", c.hidden_layers);
  count("stage1_epochs", c.stage1_epochs);
  count("stage2_max_epochs", c.stage2_max_epochs);
  count("validate_every", c.validate_every);
  count("rng_seed", c.rng_seed);
  count("post_process_grid", c.post_process_grid);
  c.learning_rate = num_or(j, "learning_rate", c.learning_rate);
  c.constraint_weight = num_or(j, "constraint_weight", c.constraint_weight);
  c.stage1_tolerance = num_or(j, "stage1_tolerance", c.stage1_tolerance);
  c.validate();
  return c;
}

Json optimizer_config_to_json(const OptimizerConfig& c) {
  Json j;
  j["seed_dim"] = c.seed_dim;
  j["width"] = c.width;
  j["hidden_layers"] = c.hidden_layers;
  j["learning_rate"] = c.learning_rate;
  j["constraint_weight"] = c.constraint_weight;
  j["stage1_epochs"] = c.stage1_epochs;
  j["stage1_tolerance"] = c.stage1_tolerance;
  j["stage2_max_epochs"] = c.stage2_max_epochs;
  j["validate_every"] = c.validate_every;
  j["rng_seed"] = c.rng_seed;
  j["post_process_grid"] = c.post_process_grid;
  return j;
}

MeasureResult evaluate_measure(const CdfBand& band, const Json& request) {
  const std::string name = str(request, "name");
  MeasureResult r{name, Json::object(), std::nullopt, 0.0, {}};
  for (const auto& [k, v] : request.items()) {
    if (k != "name") r.params[k] = v;
  }
  const bool ratio = name == "gini" || name == "extended_gini" || name == "hoover" || name == "generalized_entropy" ||
                     name == "atkinson";
  if (ratio && band.nonneg() && mean_lower(band) <= 0.0) r.flags.push_back("degenerate-denominator");
  if (name == "extended_gini") {
    r.bound_hi = extended_gini_upper(band, num(request, "nu"));
  } else if (name == "atkinson") {
    const double eps = num(request, "eps");
    std::optional<double> x_min;
    if (request.contains("x_min")) x_min = num(request, "x_min");
    r.bound_hi = atkinson_upper(band, eps, x_min);
    r.bound_lo = std::min(atkinson_lower(band, eps, x_min), r.bound_hi);
  } else if (name == "hoover") {
    r.bound_hi = hoover_upper(band);
  } else if (name == "generalized_entropy") {
    r.bound_hi = generalized_entropy_upper(band, num(request, "alpha"));
  } else if (name == "mean_range") {
    const double k = num(request, "k");
    if (!(k >= 1.0 && k == std::floor(k))) throw ValidationError("mean_range k must be a positive integer");
    r.bound_hi = mean_range_upper(band, static_cast<unsigned>(k));
    r.flags.push_back("paper-formula-bound");
    r.extra["mc_mean_range"] = mean_range_mc(band, static_cast<unsigned>(k), 100000, 0);
  } else {
    const ValueInterval iv = measure_interval(band, measure_spec_from_json(request));
    r.bound_lo = iv.lo;
    r.bound_hi = iv.hi;
  }
  if (!std::isfinite(r.bound_hi)) r.flags.push_back("unbounded");
  return r;
}

MeasureBoundReport measure_report(const CdfBand& band, const Json& requests) {
  if (!requests.is_array() || requests.empty()) throw ValidationError("'measures' must be a nonempty array");
  MeasureBoundReport report{band.delta(), band.method(), band.n(), {}};
  for (const auto& req : requests) report.measures.push_back(evaluate_measure(band, req));
  return report;
}

Json to_json(const MeasureBoundReport& r) {
  Json out;
  out["delta_effective"] = r.delta_effective;
  out["method"] = to_string(r.method);
  out["n"] = r.n;
  Json list = Json::array();
  for (const auto& m : r.measures) {
    Json e;
    e["measure"] = m.measure;
    e["params"] = m.params;
    if (m.bound_lo) e["bound_lo"] = finite_or_null(*m.bound_lo);
    e["bound_hi"] = finite_or_null(m.bound_hi);
    e["delta_effective"] = r.delta_effective;
    e["method"] = to_string(r.method);
    e["n"] = r.n;
    e["flags"] = m.flags;
    for (const auto& [k, v] : m.extra.items()) e[k] = v;
    list.push_back(std::move(e));
  }
  out["measures"] = std::move(list);
  return out;
}

Json to_json(const SelectionReport& r) {
  Json out;
  out["selected"] = r.selected ? Json(r.hypotheses[*r.selected].label) : Json(nullptr);
  out["selected_index"] = r.selected ? Json(*r.selected) : Json(nullptr);
  out["delta"] = r.delta;
  out["delta_corrected"] = r.delta_corrected;
  out["method"] = to_string(r.method);
  Json hyps = Json::array();
  for (const auto& h : r.hypotheses) {
    Json e;
    e["label"] = h.label;
    e["feasible"] = h.feasible;
    e["total_upper"] = finite_or_null(h.total_upper);
    auto terms = [](const std::vector<TermValue>& v) {
      Json a = Json::array();
      for (const auto& t : v) a.push_back(Json{{"term", t.label}, {"value", finite_or_null(t.value)}});
      return a;
    };
    e["per_term"] = terms(h.per_term);
    e["empirical"] = terms(h.empirical);
    if (!h.error.empty()) e["error"] = h.error;
    hyps.push_back(std::move(e));
  }
  out["hypotheses"] = std::move(hyps);
  return out;
}

Json to_json(const CoverageReport& r) {
  Json out;
  out["trials"] = r.trials;
  out["covered"] = r.covered;
  out["coverage"] = r.coverage;
  out["std_error"] = r.std_error;
  return out;
}

Json to_json(const TrainedBound& t) {
  Json out;
  out["L_hat"] = t.L_hat.values();
  out["delta"] = t.L_hat.delta();
  out["gamma_star"] = t.gamma_star;
  out["objective_spec"] = t.objective_spec;
  Json log = Json::array();
  for (const auto& e : t.training_log) {
    log.push_back(Json{{"epoch", e.epoch},
                       {"objective", finite_or_null(e.objective)},
                       {"probability", e.probability},
                       {"gamma_star", e.gamma_star},
                       {"certified_bound", finite_or_null(e.certified_bound)}});
  }
  out["training_log"] = std::move(log);
  return out;
}

}  // namespace dispcert
