#include "dispcert/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dispcert/errors.hpp"
#include "dispcert/special.hpp"

namespace dispcert {

Distribution Distribution::uniform(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw ValidationError("uniform needs lo < hi");
  return {Kind::uniform, {lo, hi}};
}

Distribution Distribution::beta(double a, double b, double lo, double hi) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("beta needs a, b > 0");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) throw ValidationError("beta needs lo < hi");
  return {Kind::beta, {a, b, lo, hi}};
}

Distribution Distribution::exponential(double rate, double support_max) {
  if (!(rate > 0.0 && std::isfinite(rate))) throw ValidationError("exponential needs rate > 0");
  if (!(support_max > 0.0 && std::isfinite(support_max))) {
    throw ValidationError("exponential needs a finite support_max > 0");
  }
  return {Kind::exponential, {rate, support_max}};
}

Distribution Distribution::discrete(std::vector<double> values, std::vector<double> probs) {
  if (values.empty()) throw ValidationError("discrete distribution needs at least one value");
  if (probs.empty()) probs.assign(values.size(), 1.0 / static_cast<double>(values.size()));
  if (probs.size() != values.size()) throw ValidationError("discrete distribution needs one probability per value");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return values[i] < values[j]; });
  Distribution d(Kind::discrete, {});
  double total = 0.0;
  for (std::size_t i : order) {
    if (!std::isfinite(values[i]) || !(probs[i] >= 0.0)) throw ValidationError("invalid discrete atom");
    total += probs[i];
    if (!d.atoms_.empty() && d.atoms_.back() == values[i]) {
      d.probs_.back() += probs[i];
    } else {
      d.atoms_.push_back(values[i]);
      d.probs_.push_back(probs[i]);
    }
  }
  if (std::fabs(total - 1.0) > 1e-9) throw ValidationError("discrete probabilities must sum to 1");
  double acc = 0.0;
  for (double p : d.probs_) d.cum_.push_back(acc += p);
  d.cum_.back() = 1.0;
  return d;
}

double Distribution::cdf(double x) const {
  switch (kind_) {
    case Kind::uniform: return std::clamp((x - params_[0]) / (params_[1] - params_[0]), 0.0, 1.0);
    case Kind::beta: {
      const double z = (x - params_[2]) / (params_[3] - params_[2]);
      if (z <= 0.0) return 0.0;
      if (z >= 1.0) return 1.0;
      return incbeta(params_[0], params_[1], z);
    }
    case Kind::exponential: {
      if (x <= 0.0) return 0.0;
      if (x >= params_[1]) return 1.0;
      return std::expm1(-params_[0] * x) / std::expm1(-params_[0] * params_[1]);
    }
    case Kind::discrete: {
      const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x);
      return it == atoms_.begin() ? 0.0 : cum_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
    }
  }
  return 0.0;
}

double Distribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile needs p in [0,1]");
  switch (kind_) {
    case Kind::uniform: return params_[0] + p * (params_[1] - params_[0]);
    case Kind::beta: return params_[2] + incbeta_inv(params_[0], params_[1], p) * (params_[3] - params_[2]);
    case Kind::exponential:
      return -std::log1p(p * std::expm1(-params_[0] * params_[1])) / params_[0];
    case Kind::discrete: {
      const auto it = std::lower_bound(cum_.begin(), cum_.end(), p);
      return atoms_[std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), atoms_.size() - 1)];
    }
  }
  return 0.0;
}

double Distribution::support_lo() const {
  switch (kind_) {
    case Kind::uniform: return params_[0];
    case Kind::beta: return params_[2];
    case Kind::exponential: return 0.0;
    case Kind::discrete: return atoms_.front();
  }
  return 0.0;
}

double Distribution::support_hi() const {
  switch (kind_) {
    case Kind::uniform: return params_[1];
    case Kind::beta: return params_[3];
    case Kind::exponential: return params_[1];
    case Kind::discrete: return atoms_.back();
  }
  return 0.0;
}

double Distribution::sample(std::mt19937_64& rng) const { return quantile(open_uniform(rng)); }

}  // namespace dispcert
