#include "dispcert/measures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dispcert/errors.hpp"
#include "dispcert/functional.hpp"
#include "dispcert/weight.hpp"

namespace dispcert {
namespace {

// Quantile bounds of a band as constant pieces over (0,1].
struct Inverses {
  std::vector<QuantilePiece> hi;  // from the lower CDF side
  std::vector<QuantilePiece> lo;  // from the upper CDF side, floored
};

Inverses inverses(const CdfBand& band) {
  Inverses inv{quantile_pieces(band.lower()), quantile_pieces(band.upper())};
  for (auto& p : inv.hi) {
    if (p.value == -kInf) p.value = band.floor();
  }
  for (auto& p : inv.lo) {
    if (p.value == -kInf) p.value = band.floor();
  }
  return inv;
}

void require_nonneg(const CdfBand& band, const char* what) {
  if (!band.nonneg()) throw ValidationError(std::string(what) + " needs nonneg losses");
}

void require_finite(const std::vector<QuantilePiece>& pieces, const char* what) {
  for (const auto& p : pieces) {
    if (p.value == kInf && p.p_hi > p.p_lo) {
      throw DivergenceError(std::string(what) + ": upper bound diverges: supply support_max");
    }
  }
}

double integral(const std::vector<QuantilePiece>& pieces, const WeightFunction& psi, const RealFn& xi) {
  double acc = 0.0;
  for (const auto& p : pieces) {
    const double w = psi.integral(p.p_lo, p.p_hi);
    if (w != 0.0) acc += w * xi(p.value);
  }
  return acc;
}

double ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
  return num / den;
}

const RealFn kIdentity = [](double x) { return x; };

double mean_of(const std::vector<QuantilePiece>& pieces) {
  return integral(pieces, WeightFunction::constant_one(), kIdentity);
}

// Equally-distributed equivalent (power mean of order 1 - eps) over pieces.
double ede(const std::vector<QuantilePiece>& pieces, double eps, std::optional<double> x_min) {
  auto clamp_v = [&](double v) { return x_min ? std::max(v, *x_min) : v; };
  if (eps == 1.0) {
    double acc = 0.0;
    for (const auto& p : pieces) {
      const double w = p.p_hi - p.p_lo;
      if (w == 0.0) continue;
      const double v = clamp_v(p.value);
      if (v <= 0.0) return 0.0;
      acc += w * std::log(v);
    }
    return std::exp(acc);
  }
  const double r = 1.0 - eps;
  double acc = 0.0;
  for (const auto& p : pieces) {
    const double w = p.p_hi - p.p_lo;
    if (w == 0.0) continue;
    const double v = clamp_v(p.value);
    if (r < 0.0 && v <= 0.0) throw ValidationError("Atkinson eps>1 undefined at zero losses");
    acc += w * std::pow(v, r);
  }
  return std::pow(acc, 1.0 / r);
}

void check_eps(double eps, std::optional<double> x_min) {
  if (!(eps >= 0.0 && std::isfinite(eps))) throw ValidationError("Atkinson eps must be >= 0");
  if (x_min && !(*x_min > 0.0)) throw ValidationError("Atkinson x_min must be positive");
}

}  // namespace

double mean_lower(const CdfBand& band) { return mean_of(inverses(band).lo); }

double mean_upper(const CdfBand& band) {
  const Inverses inv = inverses(band);
  require_finite(inv.hi, "mean");
  return mean_of(inv.hi);
}

double gini_upper(const CdfBand& band) {
  require_nonneg(band, "gini");
  const Inverses inv = inverses(band);
  require_finite(inv.hi, "gini");
  const double num = 2.0 * integral(inv.hi, WeightFunction::linear(), kIdentity);
  const double den = mean_of(inv.lo);
  if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
  return num / den - 1.0;
}

double gini_lower(const CdfBand& band) {
  require_nonneg(band, "gini");
  const Inverses inv = inverses(band);
  bool open = false;
  for (const auto& p : inv.hi) open |= p.value == kInf;
  if (open) return 0.0;
  const double num = 2.0 * integral(inv.lo, WeightFunction::linear(), kIdentity);
  const double den = mean_of(inv.hi);
  if (den == 0.0) return 0.0;
  return std::max(0.0, num / den - 1.0);
}

double extended_gini_upper(const CdfBand& band, double nu) {
  require_nonneg(band, "extended gini");
  const Inverses inv = inverses(band);
  require_finite(inv.hi, "extended gini");
  const double num = integral(inv.lo, WeightFunction::power_tail(nu), kIdentity);
  const double den = mean_of(inv.hi);
  if (den == 0.0) return 0.0;
  return 1.0 - num / den;
}

double atkinson_upper(const CdfBand& band, double eps, std::optional<double> x_min) {
  require_nonneg(band, "atkinson");
  check_eps(eps, x_min);
  const Inverses inv = inverses(band);
  require_finite(inv.hi, "atkinson");
  const double mu = mean_of(inv.hi);
  if (mu == 0.0) return 0.0;
  return 1.0 - ede(inv.lo, eps, x_min) / mu;
}

double atkinson_lower(const CdfBand& band, double eps, std::optional<double> x_min) {
  require_nonneg(band, "atkinson");
  check_eps(eps, x_min);
  const Inverses inv = inverses(band);
  bool open = false;
  for (const auto& p : inv.hi) open |= p.value == kInf;
  if (open) return 0.0;
  const double mu = mean_of(inv.lo);
  if (mu == 0.0) return 0.0;
  return std::clamp(1.0 - ede(inv.hi, eps, x_min) / mu, 0.0, 1.0);
}

std::vector<double> atkinson_upper_family(const CdfBand& band, std::span<const double> eps,
                                          std::optional<double> x_min) {
  std::vector<double> out;
  out.reserve(eps.size());
  for (double e : eps) out.push_back(atkinson_upper(band, e, x_min));
  return out;
}

std::vector<ValueInterval> lorenz_band(const CdfBand& band, std::span<const double> t_grid) {
  require_nonneg(band, "lorenz");
  const Inverses inv = inverses(band);
  require_finite(inv.hi, "lorenz");
  const double mu_lo = mean_of(inv.lo), mu_hi = mean_of(inv.hi);
  std::vector<ValueInterval> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("Lorenz grid values must lie in [0,1]");
    auto partial = [t](const std::vector<QuantilePiece>& pieces) {
      double acc = 0.0;
      for (const auto& p : pieces) {
        const double hi = std::min(p.p_hi, t);
        if (hi > p.p_lo) acc += (hi - p.p_lo) * p.value;
      }
      return acc;
    };
    const double lo = ratio(partial(inv.lo), mu_hi);
    const double hi = ratio(partial(inv.hi), mu_lo);
    out.push_back(make_interval(lo, std::max(lo, hi)));
  }
  return out;
}

double hoover_upper(const CdfBand& band) {
  require_nonneg(band, "hoover");
  const Inverses inv = inverses(band);
  require_finite(inv.hi, "hoover");
  const double mu_lo = mean_of(inv.lo), mu_hi = mean_of(inv.hi);
  double num = 0.0;
  for (const auto& m : merge_pieces(inv.hi, inv.lo)) {
    num += (m.p_hi - m.p_lo) * std::max(std::fabs(m.a - mu_lo), std::fabs(m.b - mu_hi));
  }
  return ratio(num, 2.0 * mu_lo);
}

double generalized_entropy_upper(const CdfBand& band, double alpha) {
  require_nonneg(band, "generalized entropy");
  if (alpha == 0.0 || alpha == 1.0) throw ValidationError("generalized entropy at alpha in {0,1} is unsupported");
  if (!std::isfinite(alpha)) throw ValidationError("generalized entropy alpha must be finite");
  const Inverses inv = inverses(band);
  const double c = 1.0 / (alpha * (alpha - 1.0));
  double moment;
  if (alpha > 1.0) {
    require_finite(inv.hi, "generalized entropy");
    const double mu = mean_of(inv.lo);
    double acc = 0.0;
    for (const auto& p : inv.hi) acc += (p.p_hi - p.p_lo) * std::pow(p.value, alpha);
    if (mu == 0.0) return acc == 0.0 ? 0.0 : kInf;
    moment = acc / std::pow(mu, alpha);
  } else {
    require_finite(inv.hi, "generalized entropy");
    const double mu = mean_of(inv.hi);
    if (mu == 0.0) return 0.0;
    double acc = 0.0;
    for (const auto& p : inv.lo) {
      const double w = p.p_hi - p.p_lo;
      if (w == 0.0) continue;
      if (alpha < 0.0 && p.value <= 0.0) {
        throw DivergenceError("generalized entropy alpha<0 diverges at zero losses");
      }
      acc += w * std::pow(p.value / mu, alpha);
    }
    moment = acc;
  }
  return c * (moment - 1.0);
}

CdfBand extreme_cdf_bands(const CdfBand& band, unsigned k, Extreme which) {
  if (k < 1) throw ValidationError("extreme-observation bands need k >= 1");
  const double kk = static_cast<double>(k);
  auto g = [&](double l) { return which == Extreme::max ? std::pow(l, kk) : 1.0 - std::pow(1.0 - l, kk); };
  auto map = [&](const StepCdf& s) {
    std::vector<double> lv;
    for (double l : s.levels()) lv.push_back(g(l));
    if (!lv.empty() && s.levels().back() == 1.0) lv.back() = 1.0;
    return StepCdf(g(s.level_before()), s.breakpoints(), std::move(lv));
  };
  return CdfBand(map(band.lower()), map(band.upper()), band.delta(), band.method(), band.order_stats(),
                 band.bounds(), band.support_max(), band.nonneg());
}

double mean_range_upper(const CdfBand& band, unsigned k) {
  if (k < 1) throw ValidationError("mean range needs k >= 1");
  const Inverses inv = inverses(band);
  require_finite(inv.hi, "mean range");
  const double kk = static_cast<double>(k);
  auto outer = [&](double v) {
    if (v >= 1.0) return inv.hi.back().value;
    if (v <= 0.0) return inv.hi.front().value;
    return std::max(step_inverse(band.lower(), v), band.floor());
  };
  double acc = 0.0;
  for (const auto& m : merge_pieces(inv.hi, inv.lo)) {
    const double bracket =
        std::max(0.0, std::pow(band.upper()(m.a), kk - 1.0) - std::pow(band.lower()(m.b), kk));
    if (bracket == 0.0) continue;
    acc += (m.p_hi - m.p_lo) * outer(m.a) * bracket;
  }
  return kk * acc;
}

double mean_range_mc(const CdfBand& band, unsigned k, std::size_t trials, std::uint64_t seed) {
  if (k < 1 || trials < 1) throw ValidationError("mean range simulation needs k >= 1 and trials >= 1");
  const Inverses inv = inverses(band);
  require_finite(inv.hi, "mean range");
  std::mt19937_64 rng(seed);
  double acc = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    double lo = kInf, hi = -kInf;
    for (unsigned j = 0; j < k; ++j) {
      const double x = std::max(step_inverse(band.lower(), open_uniform(rng)), band.floor());
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    acc += hi - lo;
  }
  return acc / static_cast<double>(trials);
}

DiffKind parse_diff_kind(const std::string& name) {
  if (name == "abs") return DiffKind::abs;
  if (name == "square") return DiffKind::square;
  throw ValidationError("unknown difference kind '" + name + "'");
}

double group_diff_upper(ValueInterval a, ValueInterval b, DiffKind kind) {
  make_interval(a.lo, a.hi);
  make_interval(b.lo, b.hi);
  const double d = std::max(std::fabs(a.hi - b.lo), std::fabs(a.lo - b.hi));
  return kind == DiffKind::abs ? d : d * d;
}

GroupBounds::GroupBounds(std::vector<Entry> entries) : entries_(std::move(entries)) {
  double total = 0.0;
  for (const auto& e : entries_) {
    make_interval(e.interval.lo, e.interval.hi);
    if (!(e.weight >= 0.0)) throw ValidationError("group weights must be nonnegative");
    total += e.weight;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw ValidationError("group weights must sum to 1");
}

double max_pairwise_diff_upper(const GroupBounds& groups, DiffKind kind) {
  const auto& e = groups.entries();
  if (e.size() < 2) throw ValidationError("pairwise differences need at least two groups");
  double best = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      best = std::max(best, group_diff_upper(e[i].interval, e[j].interval, kind));
    }
  }
  return best;
}

double cvar_fairness_upper(const GroupBounds& groups, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("CVaR fairness needs alpha in (0,1)");
  double expected_lo = 0.0;
  for (const auto& e : groups.entries()) expected_lo += e.weight * e.interval.lo;
  double best = kInf;
  for (const auto& cand : groups.entries()) {
    const double rho = cand.interval.hi;
    double tail = 0.0;
    for (const auto& e : groups.entries()) tail += e.weight * std::max(0.0, e.interval.hi - rho);
    best = std::min(best, rho + tail / (1.0 - alpha));
  }
  return best - expected_lo;
}

double risk_uncertainty_variance_upper(const GroupBounds& groups) {
  double el = 0.0, eu = 0.0;
  for (const auto& e : groups.entries()) {
    if (e.interval.lo < 0.0) throw ValidationError("variance bound needs nonnegative intervals");
    el += e.weight * e.interval.lo;
    eu += e.weight * e.interval.hi;
  }
  double best = 0.0;
  for (double m : {el, eu}) {
    double acc = 0.0;
    for (const auto& e : groups.entries()) {
      const double a = e.interval.hi - m, b = m - e.interval.lo;
      acc += e.weight * std::max(a * a, b * b);
    }
    best = std::max(best, acc);
  }
  return best;
}

}  // namespace dispcert
