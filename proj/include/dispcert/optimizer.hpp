#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dispcert/crossing.hpp"
#include "dispcert/network.hpp"
#include "dispcert/objective.hpp"
#include "dispcert/samples.hpp"

namespace dispcert {

struct OptimizerConfig {
  int seed_dim = 32;
  int width = 64;
  int hidden_layers = 3;
  double learning_rate = 5e-5;
  double constraint_weight = 5e-5;
  std::size_t stage1_epochs = 100000;
  // Stage 1 stops early once the mean squared error reaches this value.
  double stage1_tolerance = 1e-8;
  std::size_t stage2_max_epochs = 10000;
  std::size_t validate_every = 25;
  std::uint64_t rng_seed = 0;
  std::uint64_t post_process_grid = 1000000;

  // Throws ValidationError on non-positive settings.
  void validate() const;
};

// The seeded network plus its fixed Gaussian seeds; outputs a bound vector of length m.
class BoundModel {
 public:
  BoundModel(const OptimizerConfig& config, std::size_t m);

  std::size_t m() const { return static_cast<std::size_t>(seeds_.cols()); }
  SeedNetwork& network() { return net_; }
  const SeedNetwork& network() const { return net_; }
  const Eigen::MatrixXd& seeds() const { return seeds_; }

  std::vector<double> bounds() const;

 private:
  SeedNetwork net_;
  Eigen::MatrixXd seeds_;
};

// Cumulative-softmax bound vector for the given network output.
BoundVector parameterize(const SeedNetwork& net, const Eigen::MatrixXd& seeds, double delta = 0.0);

struct Stage1Result {
  Eigen::VectorXd theta;
  double mse;
  std::size_t epochs;
  std::vector<double> loss_curve;
};

Stage1Result stage1_fit(const OptimizerConfig& config, const BoundVector& target);

struct TrainingLogEntry {
  std::size_t epoch;
  double objective;
  double probability;
  double gamma_star;
  double certified_bound;
};

struct Stage2Result {
  Eigen::VectorXd theta;
  BoundVector L_hat;
  double gamma_star;
  double best_bound;
  std::vector<TrainingLogEntry> log;
};

// objective(L) + constraint_weight * max(0, 1 - delta - P(L)) and its
// gradient with respect to the network parameters.
double penalized_objective(const BoundModel& model, const BoundObjective& objective, const OrderStats& stats,
                           double delta, double constraint_weight, Eigen::VectorXd* grad);

Stage2Result stage2_optimize(const OptimizerConfig& config, const Eigen::VectorXd& theta0,
                             const BoundObjective& objective, const OrderStats& stats, double delta);

struct ShiftResult {
  double gamma_star;
  BoundVector shifted;
};

// Smallest gamma >= 0 on the 1/grid lattice with P(max(L - gamma, 0)) >= 1 - delta.
ShiftResult enforce_constraint(std::span<const double> L, double delta, std::uint64_t grid = 1000000);

struct TrainedBound {
  BoundVector L_hat;
  double gamma_star;
  std::string objective_spec;
  std::vector<TrainingLogEntry> training_log;
};

// Stage-1 parameters keyed by everything they depend on.
class Stage1Cache {
 public:
  const Eigen::VectorXd& get(const OptimizerConfig& config, std::size_t m, double delta);

 private:
  std::map<std::string, Eigen::VectorXd> entries_;
};

struct SplitResult {
  TrainedBound trained;
  double final_bound;
  // L applied to the held-out half (padded when that half is longer).
  BoundVector applied;
  OrderStats held_out;
  bool padding_reshifted;
};

// Seeded shuffle, fit on the first floor(n/2) values, certify on the rest.
SplitResult split_optimize_apply(const LossSamples& samples, const BoundObjective& objective, double delta,
                                 const OptimizerConfig& config, Stage1Cache* cache = nullptr);

// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace dispcert
