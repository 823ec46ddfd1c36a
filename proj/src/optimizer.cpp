#include "dispcert/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "dispcert/distribution.hpp"
#include "dispcert/errors.hpp"

namespace dispcert {
namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), purpose};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd gaussian_seeds(int dim, std::size_t m, std::uint64_t seed) {
  auto rng = stream(seed, 1);
  Eigen::MatrixXd g(dim, static_cast<Eigen::Index>(m));
  // Box-Muller on explicit 53-bit uniforms keeps the seeds identical across standard libraries.
  for (Eigen::Index k = 0; k < g.size(); k += 2) {
    const double u1 = open_uniform(rng), u2 = open_uniform(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    g.data()[k] = r * std::cos(2.0 * std::numbers::pi * u2);
    if (k + 1 < g.size()) g.data()[k + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
  }
  return g;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (seed_dim < 1 || width < 1 || hidden_layers < 0) throw ValidationError("optimizer: invalid network shape");
  if (!(learning_rate > 0.0) || !(constraint_weight >= 0.0)) {
    throw ValidationError("optimizer: learning_rate must be positive and constraint_weight nonnegative");
  }
  if (validate_every == 0) throw ValidationError("optimizer: validate_every must be positive");
  if (post_process_grid == 0) throw ValidationError("optimizer: post_process_grid must be positive");
}

BoundModel::BoundModel(const OptimizerConfig& config, std::size_t m)
    : net_(config.seed_dim, config.width, config.hidden_layers, stream(config.rng_seed, 2)()),
      seeds_(gaussian_seeds(config.seed_dim, m, config.rng_seed)) {
  if (m == 0) throw ValidationError("bound model needs m >= 1");
}

std::vector<double> BoundModel::bounds() const { return cumulative_softmax(net_.forward(seeds_)); }

BoundVector parameterize(const SeedNetwork& net, const Eigen::MatrixXd& seeds, double delta) {
  return BoundVector(cumulative_softmax(net.forward(seeds)), delta, BandMethod::optimized);
}

Stage1Result stage1_fit(const OptimizerConfig& config, const BoundVector& target) {
  config.validate();
  const std::size_t m = target.n();
  BoundModel model(config, m);
  Adam adam(model.network().params().size(), config.learning_rate);
  Stage1Result out{model.network().params(), std::numeric_limits<double>::infinity(), 0, {}};
  SeedNetwork::Cache cache;
  std::vector<double> dL(m);
  for (std::size_t epoch = 0; epoch < config.stage1_epochs; ++epoch) {
    const Eigen::RowVectorXd phi = model.network().forward(model.seeds(), &cache);
    const std::vector<double> L = cumulative_softmax(phi);
    double mse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = L[i] - target[i];
      mse += d * d;
      dL[i] = 2.0 * d / static_cast<double>(m);
    }
    mse /= static_cast<double>(m);
    out.loss_curve.push_back(mse);
    out.epochs = epoch + 1;
    if (mse < out.mse) {
      out.mse = mse;
      out.theta = model.network().params();
    }
    if (mse <= config.stage1_tolerance) break;
    const Eigen::VectorXd grad = model.network().backward(cache, cumulative_softmax_backward(phi, dL));
    adam.step(model.network().params(), grad);
  }
  return out;
}

double penalized_objective(const BoundModel& model, const BoundObjective& objective, const OrderStats& stats,
                           double delta, double constraint_weight, Eigen::VectorXd* grad) {
  SeedNetwork::Cache cache;
  const Eigen::RowVectorXd phi = model.network().forward(model.seeds(), grad ? &cache : nullptr);
  const std::vector<double> L = cumulative_softmax(phi);
  std::vector<double> dL(L.size());
  double value = objective.evaluate(L, stats, dL);
  const NoncrossingGradient ng = noncrossing_gradient(L);
  const double shortfall = (1.0 - delta) - ng.probability;
  if (shortfall > 0.0) {
    value += constraint_weight * shortfall;
    for (std::size_t i = 0; i < L.size(); ++i) dL[i] -= constraint_weight * ng.gradient[i];
  }
  if (grad) *grad = model.network().backward(cache, cumulative_softmax_backward(phi, dL));
  return value;
}

Stage2Result stage2_optimize(const OptimizerConfig& config, const Eigen::VectorXd& theta0,
                             const BoundObjective& objective, const OrderStats& stats, double delta) {
  config.validate();
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
  BoundModel model(config, stats.n());
  if (theta0.size() != model.network().params().size()) throw ValidationError("theta0 has the wrong size");
  model.network().params() = theta0;
  Adam adam(theta0.size(), config.learning_rate);

  Stage2Result out{theta0, BoundVector(), 0.0, std::numeric_limits<double>::infinity(), {}};
  bool have_best = false;
  auto validate = [&](std::size_t epoch) {
    const std::vector<double> L = model.bounds();
    const double raw = objective.evaluate(L, stats, {});
    const double p = noncrossing_probability(L);
    ShiftResult shift = enforce_constraint(L, delta, config.post_process_grid);
    const double certified = objective.evaluate(shift.shifted.values(), stats, {});
    out.log.push_back({epoch, raw, p, shift.gamma_star, certified});
    if (!have_best || certified < out.best_bound) {
      have_best = true;
      out.best_bound = certified;
      out.theta = model.network().params();
      out.L_hat = BoundVector(shift.shifted.values(), delta, BandMethod::optimized);
      out.gamma_star = shift.gamma_star;
    }
  };

  Eigen::VectorXd grad;
  for (std::size_t epoch = 0; epoch < config.stage2_max_epochs; ++epoch) {
    if (epoch % config.validate_every == 0) validate(epoch);
    penalized_objective(model, objective, stats, delta, config.constraint_weight, &grad);
    if (!grad.allFinite()) break;
    adam.step(model.network().params(), grad);
  }
  validate(config.stage2_max_epochs);
  return out;
}

ShiftResult enforce_constraint(std::span<const double> L, double delta, std::uint64_t grid) {
  validate_bounds(L);
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
  if (grid == 0) throw ValidationError("post-processing grid must be positive");
  const double target = 1.0 - delta;
  auto shifted = [&](double gamma) {
    std::vector<double> s(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) s[i] = std::max(L[i] - gamma, 0.0);
    return s;
  };
  if (noncrossing_probability(L) >= target) {
    return {0.0, BoundVector(std::vector<double>(L.begin(), L.end()), delta, BandMethod::optimized)};
  }
  const double top = L.empty() ? 0.0 : L.back();
  double lo = 0.0, hi = top;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (noncrossing_probability(shifted(mid)) >= target) hi = mid; else lo = mid;
  }
  const double g = static_cast<double>(grid);
  double gamma = std::min(std::ceil(hi * g) / g, top);
  while (gamma < top && noncrossing_probability(shifted(gamma)) < target) gamma = std::min(gamma + 1.0 / g, top);
  return {gamma, BoundVector(shifted(gamma), delta, BandMethod::optimized)};
}

const Eigen::VectorXd& Stage1Cache::get(const OptimizerConfig& c, std::size_t m, double delta) {
  std::ostringstream key;
  key.precision(17);
  key << m << '|' << delta << '|' << c.seed_dim << '|' << c.width << '|' << c.hidden_layers << '|' << c.learning_rate
      << '|' << c.stage1_epochs << '|' << c.stage1_tolerance << '|' << c.rng_seed;
  auto it = entries_.find(key.str());
  if (it == entries_.end()) {
    it = entries_.emplace(key.str(), stage1_fit(c, calibrate_berk_jones(m, delta)).theta).first;
  }
  return it->second;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  auto rng = stream(seed, 3);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
  return idx;
}

SplitResult split_optimize_apply(const LossSamples& samples, const BoundObjective& objective, double delta,
                                 const OptimizerConfig& config, Stage1Cache* cache) {
  const std::size_t n = samples.size();
  if (n < 2) throw ValidationError("split protocol needs at least 2 samples");
  const std::size_t m = n / 2;
  const std::vector<std::size_t> perm = seeded_permutation(n, config.rng_seed);
  std::vector<double> train, held;
  for (std::size_t k = 0; k < n; ++k) (k < m ? train : held).push_back(samples.values()[perm[k]]);
  const OrderStats train_stats(train);
  OrderStats held_stats(held);

  Stage1Cache local;
  Stage1Cache& c = cache ? *cache : local;
  const Eigen::VectorXd& theta0 = c.get(config, m, delta);
  Stage2Result s2 = stage2_optimize(config, theta0, objective, train_stats, delta);
  if (noncrossing_probability(s2.L_hat) < 1.0 - delta) {
    throw CalibrationError("post-processed bound failed re-verification");
  }

  std::vector<double> applied = s2.L_hat.values();
  applied.resize(held.size(), applied.back());
  bool reshifted = false;
  BoundVector applied_vec(applied, delta, BandMethod::optimized);
  if (held.size() > m && noncrossing_probability(applied_vec) < 1.0 - delta) {
    applied_vec = enforce_constraint(applied, delta, config.post_process_grid).shifted;
    reshifted = true;
  }
  const double final_bound = objective.evaluate(applied_vec.values(), held_stats, {});
  TrainedBound trained{s2.L_hat, s2.gamma_star, objective.describe(), std::move(s2.log)};
  return {std::move(trained), final_bound, std::move(applied_vec), std::move(held_stats), reshifted};
}

}  // namespace dispcert
