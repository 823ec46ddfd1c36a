#include "dispcert/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>

#include "dispcert/errors.hpp"
#include "dispcert/io.hpp"
#include "dispcert/measures.hpp"
#include "dispcert/report.hpp"

namespace dispcert {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string input;
  std::string band;
  std::string bounds;
  std::string config;
  std::string output;
  std::string predictions;
  std::string method = "berk_jones";
  double delta = 0.05;
  std::optional<std::uint64_t> seed;
};

Json load_config(const Options& o) {
  if (o.config.empty()) return Json::object();
  try {
    Json j = Json::parse(read_text(o.config));
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    throw ValidationError("cannot parse config '" + o.config + "': " + e.what());
  }
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.output.empty()) {
    out << text;
  } else {
    write_atomic(o.output, text);
  }
}

std::optional<double> support_max_of(const Json& cfg) {
  if (!cfg.contains("support_max") || cfg["support_max"].is_null()) return std::nullopt;
  return cfg["support_max"].get<double>();
}

bool nonneg_of(const Json& cfg) { return cfg.value("nonneg", false); }

LossSamples load_losses(const Options& o, const Json& cfg) {
  if (o.input.empty()) throw ValidationError("--input is required");
  return read_losses(o.input, support_max_of(cfg), nonneg_of(cfg));
}

BandOptions band_options(const Json& cfg) {
  BandOptions b;
  b.beta_min = cfg.value("beta_min", 0.0);
  b.beta_max = cfg.value("beta_max", 1.0);
  return b;
}

BoundVector load_bounds(const std::string& path, double delta) {
  const Json j = Json::parse(read_text(path));
  const Json& L = j.contains("applied") ? j["applied"] : j.at("L_hat");
  return BoundVector(L.get<std::vector<double>>(), delta, BandMethod::optimized);
}

// A band from, in order: --band, an exact plug-in distribution, or --input losses.
CdfBand obtain_band(const Options& o, const Json& cfg, const LossSamples* samples) {
  if (!o.band.empty()) return read_band(o.band);
  const BandMethod method = parse_band_method(o.method);
  if (method == BandMethod::exact_plugin) {
    if (!cfg.contains("distribution")) throw ValidationError("exact_plugin needs a 'distribution' in the config");
    return exact_plugin_band(distribution_from_json(cfg["distribution"]), cfg.value("points", std::size_t{10000}));
  }
  if (!samples) throw ValidationError("--input or --band is required");
  BandOptions b = band_options(cfg);
  if (method == BandMethod::optimized) {
    if (o.bounds.empty()) throw ValidationError("method optimized needs --bounds");
    b.bounds = load_bounds(o.bounds, o.delta);
  }
  return build_band(*samples, method, o.delta, b);
}

int cmd_band(const Options& o, std::ostream& out) {
  const Json cfg = load_config(o);
  std::optional<LossSamples> s;
  if (!o.input.empty()) s = load_losses(o, cfg);
  emit(o, out, band_to_string(obtain_band(o, cfg, s ? &*s : nullptr)));
  return 0;
}

int cmd_measure(const Options& o, std::ostream& out) {
  const Json cfg = load_config(o);
  if (!cfg.contains("measures")) throw ValidationError("config needs a 'measures' array");
  std::optional<LossSamples> s;
  if (!o.input.empty()) s = load_losses(o, cfg);
  const CdfBand band = obtain_band(o, cfg, s ? &*s : nullptr);
  emit(o, out, to_json(measure_report(band, cfg["measures"])).dump(2) + "\n");
  return 0;
}

int cmd_lorenz(const Options& o, std::ostream& out) {
  const Json cfg = load_config(o);
  std::optional<LossSamples> s;
  if (!o.input.empty()) s = load_losses(o, cfg);
  const CdfBand band = obtain_band(o, cfg, s ? &*s : nullptr);
  const std::size_t points = cfg.value("points_t", std::size_t{101});
  if (points < 2) throw ValidationError("points_t must be >= 2");
  std::vector<double> t;
  for (std::size_t i = 0; i < points; ++i) t.push_back(static_cast<double>(i) / static_cast<double>(points - 1));
  const auto curve = lorenz_band(band, t);
  std::vector<ValueInterval> emp;
  if (s) {
    emp = lorenz_band(empirical_band(*s), t);
  } else if (band.method() == BandMethod::exact_plugin) {
    emp = curve;
  }
  std::string csv = "t,lower,upper,empirical\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    csv += format_double(t[i]) + "," + format_double(curve[i].lo) + "," + format_double(curve[i].hi) + ",";
    if (!emp.empty()) csv += format_double(emp[i].hi);
    csv += "\n";
  }
  emit(o, out, csv);
  return 0;
}

int cmd_optimize(const Options& o, std::ostream& out) {
  const Json cfg = load_config(o);
  const LossSamples s = load_losses(o, cfg);
  OptimizerConfig oc = optimizer_config_from_json(cfg.value("optimizer", Json::object()));
  if (o.seed) oc.rng_seed = *o.seed;
  if (!cfg.contains("objective")) throw ValidationError("config needs an 'objective'");
  const ObjectiveSpec spec = objective_from_json(cfg["objective"]);
  if (spec.needs_groups()) throw ValidationError("optimize takes population-scope terms only; use select for groups");
  const double B = s.support_max().value_or(kInf);
  const ObjectivePtr objective = optimizer_objective(spec, true, 1.0, B, s.nonneg() ? 0.0 : -kInf);
  const double side_delta = spec.one_sided() ? o.delta : 0.5 * o.delta;
  const SplitResult r = split_optimize_apply(s, *objective, side_delta, oc);
  Json j;
  j["side_delta"] = side_delta;
  j["trained"] = to_json(r.trained);
  j["final_bound"] = std::isfinite(r.final_bound) ? Json(r.final_bound) : Json(nullptr);
  j["applied"] = r.applied.values();
  j["held_out_n"] = r.held_out.n();
  j["padding_reshifted"] = r.padding_reshifted;
  j["optimizer"] = optimizer_config_to_json(oc);
  emit(o, out, j.dump(2) + "\n");
  return 0;
}

int cmd_select(const Options& o, std::ostream& out) {
  const Json cfg = load_config(o);
  if (o.input.empty()) throw ValidationError("--input is required");
  const HypothesisLossTable table = read_hypothesis_table(o.input, support_max_of(cfg), nonneg_of(cfg));
  if (!cfg.contains("objective")) throw ValidationError("config needs an 'objective'");
  SelectionOptions so;
  so.method = parse_band_method(o.method);
  so.band = band_options(cfg);
  so.optimizer = optimizer_config_from_json(cfg.value("optimizer", Json::object()));
  if (o.seed) so.optimizer.rng_seed = *o.seed;
  const SelectionReport r = select_hypothesis(table, objective_from_json(cfg["objective"]), o.delta, so);
  emit(o, out, to_json(r).dump(2) + "\n");
  return 0;
}

int cmd_coverage(const Options& o, std::ostream& out) {
  const Json cfg = load_config(o);
  if (!cfg.contains("distribution")) throw ValidationError("config needs a 'distribution'");
  const Distribution dist = distribution_from_json(cfg["distribution"]);
  const std::size_t n = cfg.value("n", std::size_t{0});
  const std::size_t trials = cfg.value("trials", std::size_t{1000});
  BandOptions b = band_options(cfg);
  if (parse_band_method(o.method) == BandMethod::optimized) {
    if (o.bounds.empty()) throw ValidationError("method optimized needs --bounds");
    b.bounds = load_bounds(o.bounds, o.delta);
  }
  CoverageReport r = simulate_coverage(dist, parse_band_method(o.method), o.delta, n, trials, o.seed.value_or(0), b);
  Json j = to_json(r);
  j["method"] = o.method;
  j["delta"] = o.delta;
  j["n"] = n;
  emit(o, out, j.dump(2) + "\n");
  return 0;
}

int cmd_losses(const Options& o, std::ostream& out) {
  const Json cfg = load_config(o);
  if (o.predictions.empty()) throw ValidationError("--predictions is required");
  const LossMetric m = parse_loss_metric(cfg.value("metric", std::string("brier")), cfg.value("num_classes", 2u),
                                         cfg.value("alpha", 0.5));
  emit(o, out, losses_to_csv(compute_losses(read_text(o.predictions), m)));
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distribution-free bounds on dispersion measures of loss distributions", "dispcert"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub, bool with_method) {
    sub->add_option("-c,--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("-o,--output", o.output, "output path (stdout when omitted)");
    sub->add_option("-d,--delta", o.delta, "failure probability")->check(CLI::Range(0.0, 1.0));
    sub->add_option("-s,--seed", o.seed, "random seed");
    if (with_method) {
      sub->add_option("-m,--method", o.method, "dkw, berk_jones, truncated_bj, optimized or exact_plugin");
      sub->add_option("--bounds", o.bounds, "optimize output holding the bound vector")->check(CLI::ExistingFile);
    }
  };
  auto band_inputs = [&](CLI::App* sub) {
    sub->add_option("-i,--input", o.input, "losses (.csv or .jsonl)")->check(CLI::ExistingFile);
    sub->add_option("-b,--band", o.band, "band JSON")->check(CLI::ExistingFile);
  };
  CLI::App* band = app.add_subcommand("band", "build a CDF band and write it as JSON");
  common(band, true);
  band->add_option("-i,--input", o.input, "losses (.csv or .jsonl)")->check(CLI::ExistingFile);
  CLI::App* measure = app.add_subcommand("measure", "bound several measures from one band");
  common(measure, true);
  band_inputs(measure);
  CLI::App* lorenz = app.add_subcommand("lorenz", "Lorenz curve band as CSV");
  common(lorenz, true);
  band_inputs(lorenz);
  CLI::App* optimize = app.add_subcommand("optimize", "train a bound vector with the split protocol");
  common(optimize, false);
  optimize->add_option("-i,--input", o.input, "losses (.csv or .jsonl)")->required()->check(CLI::ExistingFile);
  CLI::App* select = app.add_subcommand("select", "pick the hypothesis with the smallest certified objective");
  common(select, true);
  select->add_option("-i,--input", o.input, "hypothesis loss table (.csv)")->required()->check(CLI::ExistingFile);
  CLI::App* coverage = app.add_subcommand("coverage", "simulate band coverage");
  common(coverage, true);
  CLI::App* losses = app.add_subcommand("losses", "per-example losses from predictions");
  common(losses, false);
  losses->add_option("-p,--predictions", o.predictions, "predictions CSV")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*band) return cmd_band(o, out);
    if (*measure) return cmd_measure(o, out);
    if (*lorenz) return cmd_lorenz(o, out);
    if (*optimize) return cmd_optimize(o, out);
    if (*select) return cmd_select(o, out);
    if (*coverage) return cmd_coverage(o, out);
    if (*losses) return cmd_losses(o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace dispcert
