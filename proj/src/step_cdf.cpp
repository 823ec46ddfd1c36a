#include "dispcert/step_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dispcert/errors.hpp"

namespace dispcert {
namespace {

constexpr double kLevelTol = 1e-12;

double clip_level(double v, const char* what) {
  if (std::isnan(v) || v < -kLevelTol || v > 1.0 + kLevelTol) {
    throw ValidationError(std::string(what) + " outside [0,1]");
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

StepCdf::StepCdf(double level_before, std::vector<double> breakpoints, std::vector<double> levels) {
  if (breakpoints.size() != levels.size()) {
    throw ValidationError("step function needs one level per breakpoint");
  }
  level_before_ = clip_level(level_before, "level_before");
  double prev = level_before_;
  double prev_x = -kInf;
  breakpoints_.reserve(breakpoints.size());
  levels_.reserve(levels.size());
  for (std::size_t j = 0; j < breakpoints.size(); ++j) {
    const double x = breakpoints[j];
    if (!std::isfinite(x)) throw ValidationError("breakpoints must be finite");
    if (!(x > prev_x)) throw ValidationError("breakpoints must be strictly increasing");
    prev_x = x;
    double level = clip_level(levels[j], "level");
    if (level < prev - kLevelTol) throw ValidationError("levels must be nondecreasing");
    level = std::max(level, prev);
    if (level == prev) continue;
    breakpoints_.push_back(x);
    levels_.push_back(level);
    prev = level;
  }
}

double StepCdf::operator()(double x) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  if (it == breakpoints_.begin()) return level_before_;
  return levels_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double step_inverse(const StepCdf& cdf, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("inverse query needs p in (0,1]");
  if (cdf.level_before() >= p) return -kInf;
  const auto& lv = cdf.levels();
  const auto it = std::lower_bound(lv.begin(), lv.end(), p);
  if (it == lv.end()) return kInf;
  return cdf.breakpoints()[static_cast<std::size_t>(it - lv.begin())];
}

std::vector<QuantilePiece> quantile_pieces(const StepCdf& cdf) {
  std::vector<QuantilePiece> out;
  double prev = 0.0;
  if (cdf.level_before() > 0.0) {
    out.push_back({0.0, cdf.level_before(), -kInf});
    prev = cdf.level_before();
  }
  for (std::size_t j = 0; j < cdf.levels().size(); ++j) {
    const double level = cdf.levels()[j];
    if (level > prev) {
      out.push_back({prev, level, cdf.breakpoints()[j]});
      prev = level;
    }
  }
  if (prev < 1.0) out.push_back({prev, 1.0, kInf});
  return out;
}

std::vector<MergedPiece> merge_pieces(std::span<const QuantilePiece> a,
                                      std::span<const QuantilePiece> b) {
  std::vector<MergedPiece> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double lo = 0.0;
  while (i < a.size() && j < b.size()) {
    const double hi = std::min(a[i].p_hi, b[j].p_hi);
    if (hi > lo) out.push_back({lo, hi, a[i].value, b[j].value});
    lo = std::max(lo, hi);
    if (a[i].p_hi <= hi) ++i;
    if (j < b.size() && b[j].p_hi <= hi) ++j;
  }
  return out;
}

}  // namespace dispcert
