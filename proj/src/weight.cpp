#include "dispcert/weight.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dispcert/errors.hpp"

namespace dispcert {
namespace {

double poly_eval(const std::vector<double>& c, double p) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * p + *it;
  return acc;
}

double poly_antiderivative(const std::vector<double>& c, double p) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * p + c[k] / static_cast<double>(k + 1);
  return acc * p;
}

// Difference erf(u) - erf(l) for l <= u without cancellation in the tails.
double erf_diff(double l, double u) {
  if (l >= 0.0) return std::erfc(l) - std::erfc(u);
  if (u <= 0.0) return std::erfc(-u) - std::erfc(-l);
  return std::erf(u) - std::erf(l);
}

// Roots of the polynomial inside (lo, hi), found by sign scanning and bisection.
std::vector<double> sign_changes(const std::vector<double>& c, double lo, double hi) {
  constexpr int kGrid = 4096;
  std::vector<double> roots;
  double x0 = lo;
  double f0 = poly_eval(c, x0);
  for (int k = 1; k <= kGrid; ++k) {
    const double x1 = lo + (hi - lo) * k / kGrid;
    const double f1 = poly_eval(c, x1);
    if ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0)) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = poly_eval(c, m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    if (f1 != 0.0) {
      x0 = x1;
      f0 = f1;
    }
  }
  return roots;
}

std::vector<double> negated(std::vector<double> c) {
  for (double& v : c) v = -v;
  return c;
}

}  // namespace

WeightFunction::WeightFunction(Kind kind, std::vector<double> params, std::vector<PolySegment> segments)
    : kind_(kind), params_(std::move(params)), segments_(std::move(segments)) {}

WeightFunction WeightFunction::constant_one() { return {Kind::constant_one, {}}; }

WeightFunction WeightFunction::cvar(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("cvar weight needs beta in [0,1)");
  return {Kind::cvar, {beta}};
}

WeightFunction WeightFunction::interval_uniform(double beta_min, double beta_max) {
  if (!(beta_min >= 0.0 && beta_min < beta_max && beta_max <= 1.0)) {
    throw ValidationError("interval weight needs 0 <= beta_min < beta_max <= 1");
  }
  return {Kind::interval_uniform, {beta_min, beta_max}};
}

WeightFunction WeightFunction::linear() { return {Kind::linear, {}}; }

WeightFunction WeightFunction::smoothed_median(double beta, double a) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ValidationError("smoothed median needs beta in [0,1]");
  if (!(a > 0.0 && std::isfinite(a))) throw ValidationError("smoothed median needs a > 0");
  return {Kind::smoothed_median, {beta, a}};
}

WeightFunction WeightFunction::piecewise_poly(std::vector<PolySegment> segments) {
  double prev = 0.0;
  for (const auto& s : segments) {
    if (!(s.lo >= prev && s.lo < s.hi && s.hi <= 1.0)) {
      throw ValidationError("polynomial segments must be ordered, disjoint and inside [0,1]");
    }
    for (double c : s.coeffs) {
      if (!std::isfinite(c)) throw ValidationError("polynomial coefficient is not finite");
    }
    prev = s.hi;
  }
  return {Kind::piecewise_poly, {}, std::move(segments)};
}

WeightFunction WeightFunction::power_tail(double nu) {
  if (!(nu > 0.0 && std::isfinite(nu))) throw ValidationError("power tail weight needs nu > 0");
  return {Kind::power_tail, {nu}};
}

std::string WeightFunction::name() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::constant_one: return "constant_one";
    case Kind::cvar: os << "cvar(" << params_[0] << ")"; break;
    case Kind::interval_uniform: os << "interval_uniform(" << params_[0] << "," << params_[1] << ")"; break;
    case Kind::linear: return "linear";
    case Kind::smoothed_median: os << "smoothed_median(" << params_[0] << "," << params_[1] << ")"; break;
    case Kind::piecewise_poly: os << "piecewise_poly[" << segments_.size() << "]"; break;
    case Kind::power_tail: os << "power_tail(" << params_[0] << ")"; break;
  }
  return os.str();
}

double WeightFunction::value(double p) const {
  switch (kind_) {
    case Kind::constant_one: return 1.0;
    case Kind::cvar: return p >= params_[0] ? 1.0 / (1.0 - params_[0]) : 0.0;
    case Kind::interval_uniform:
      return (p >= params_[0] && p <= params_[1]) ? 1.0 / (params_[1] - params_[0]) : 0.0;
    case Kind::linear: return p;
    case Kind::smoothed_median: {
      const double z = (p - params_[0]) / params_[1];
      return std::exp(-z * z) / (params_[1] * std::sqrt(std::numbers::pi));
    }
    case Kind::piecewise_poly:
      for (const auto& s : segments_) {
        if (p >= s.lo && (p < s.hi || (p == 1.0 && s.hi == 1.0))) return poly_eval(s.coeffs, p);
      }
      return 0.0;
    case Kind::power_tail: return params_[0] * std::pow(1.0 - p, params_[0] - 1.0);
  }
  throw ValidationError("unknown weight kind");
}

double WeightFunction::integral(double a, double b) const {
  if (!(a <= b)) throw ValidationError("weight integral needs a <= b");
  if (a < 0.0 || b > 1.0) throw ValidationError("weight integral limits must lie in [0,1]");
  switch (kind_) {
    case Kind::constant_one: return b - a;
    case Kind::cvar: {
      const double beta = params_[0];
      return (std::max(b, beta) - std::max(a, beta)) / (1.0 - beta);
    }
    case Kind::interval_uniform: {
      const double lo = std::max(a, params_[0]);
      const double hi = std::min(b, params_[1]);
      return hi > lo ? (hi - lo) / (params_[1] - params_[0]) : 0.0;
    }
    case Kind::linear: return 0.5 * (b - a) * (b + a);
    case Kind::smoothed_median: {
      const double beta = params_[0], s = params_[1];
      return 0.5 * erf_diff((a - beta) / s, (b - beta) / s);
    }
    case Kind::piecewise_poly: {
      double acc = 0.0;
      for (const auto& s : segments_) {
        const double lo = std::max(a, s.lo);
        const double hi = std::min(b, s.hi);
        if (hi > lo) acc += poly_antiderivative(s.coeffs, hi) - poly_antiderivative(s.coeffs, lo);
      }
      return acc;
    }
    case Kind::power_tail: {
      const double nu = params_[0];
      return std::pow(1.0 - a, nu) - std::pow(1.0 - b, nu);
    }
  }
  throw ValidationError("unknown weight kind");
}

bool WeightFunction::nonnegative() const {
  if (kind_ != Kind::piecewise_poly) return true;
  // Bisected roots can leave slivers of rounding width.
  const WeightFunction neg = negative_part();
  for (const auto& s : neg.segments()) {
    if (s.hi - s.lo > 1e-9) return false;
  }
  return true;
}

WeightFunction WeightFunction::positive_part() const {
  if (kind_ != Kind::piecewise_poly) return *this;
  std::vector<PolySegment> pos;
  for (const auto& s : segments_) {
    std::vector<double> cuts{s.lo};
    for (double r : sign_changes(s.coeffs, s.lo, s.hi)) cuts.push_back(r);
    cuts.push_back(s.hi);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (cuts[k + 1] <= cuts[k]) continue;
      const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
      if (poly_eval(s.coeffs, mid) > 0.0) pos.push_back({cuts[k], cuts[k + 1], s.coeffs});
    }
  }
  return piecewise_poly(std::move(pos));
}

WeightFunction WeightFunction::negative_part() const {
  if (kind_ != Kind::piecewise_poly) return piecewise_poly({});
  std::vector<PolySegment> neg;
  for (const auto& s : segments_) {
    std::vector<double> cuts{s.lo};
    for (double r : sign_changes(s.coeffs, s.lo, s.hi)) cuts.push_back(r);
    cuts.push_back(s.hi);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (cuts[k + 1] <= cuts[k]) continue;
      const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
      if (poly_eval(s.coeffs, mid) < 0.0) neg.push_back({cuts[k], cuts[k + 1], negated(s.coeffs)});
    }
  }
  return piecewise_poly(std::move(neg));
}

double weight_integral(const WeightFunction& psi, double a, double b) { return psi.integral(a, b); }

}  // namespace dispcert
