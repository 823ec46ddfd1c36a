#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dispcert {

// Fully connected rectifier network mapping each seed column to a scalar.
class SeedNetwork {
 public:
  // Weights and biases drawn uniformly in +-1/sqrt(fan_in), seeded.
  SeedNetwork(int input_dim, int width, int hidden_layers, std::uint64_t seed);

  struct Cache {
    std::vector<Eigen::MatrixXd> pre;   // pre-activations per layer
    std::vector<Eigen::MatrixXd> post;  // inputs to each layer (post[0] is the seeds)
  };

  Eigen::RowVectorXd forward(const Eigen::MatrixXd& seeds, Cache* cache = nullptr) const;
  // Gradient of a loss with respect to the flat parameter vector, given dLoss/dOutput.
  Eigen::VectorXd backward(const Cache& cache, const Eigen::RowVectorXd& d_out) const;

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }
  int input_dim() const { return dims_.front(); }

 private:
  std::vector<int> dims_;
  std::vector<Eigen::Index> offsets_;  // start of W_l; b_l follows it
  Eigen::VectorXd params_;
};

// L_i = sum_{j<=i} e^{phi_j} / (1 + sum_j e^{phi_j}).
std::vector<double> cumulative_softmax(const Eigen::RowVectorXd& phi);
// Pulls dLoss/dL back to dLoss/dphi through cumulative_softmax.
Eigen::RowVectorXd cumulative_softmax_backward(const Eigen::RowVectorXd& phi, const std::vector<double>& d_L);

class Adam {
 public:
  explicit Adam(Eigen::Index size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  double p1_ = 1.0, p2_ = 1.0;
  Eigen::VectorXd m_, v_;
};

}  // namespace dispcert
