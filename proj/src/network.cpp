#include "dispcert/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dispcert/errors.hpp"

namespace dispcert {

SeedNetwork::SeedNetwork(int input_dim, int width, int hidden_layers, std::uint64_t seed) {
  if (input_dim < 1 || width < 1 || hidden_layers < 0) throw ValidationError("invalid network shape");
  dims_.push_back(input_dim);
  for (int l = 0; l < hidden_layers; ++l) dims_.push_back(width);
  dims_.push_back(1);
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(dims_[l + 1]) * (dims_[l] + 1);
  }
  params_.resize(total);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    const Eigen::Index count = static_cast<Eigen::Index>(dims_[l + 1]) * (dims_[l] + 1);
    for (Eigen::Index k = 0; k < count; ++k) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      params_[offsets_[l] + k] = (2.0 * u - 1.0) * bound;
    }
  }
}

Eigen::RowVectorXd SeedNetwork::forward(const Eigen::MatrixXd& seeds, Cache* cache) const {
  if (seeds.rows() != dims_.front()) throw ValidationError("seed dimension does not match the network");
  const std::size_t layers = dims_.size() - 1;
  Eigen::MatrixXd a = seeds;
  if (cache) {
    cache->pre.resize(layers);
    cache->post.resize(layers);
  }
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = dims_[l], out = dims_[l + 1];
    Eigen::Map<const Eigen::MatrixXd> W(params_.data() + offsets_[l], out, in);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + offsets_[l] + static_cast<Eigen::Index>(out) * in, out);
    Eigen::MatrixXd z = W * a;
    z.colwise() += b;
    if (cache) {
      cache->post[l] = a;
      cache->pre[l] = z;
    }
    a = l + 1 < layers ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return a.row(0);
}

Eigen::VectorXd SeedNetwork::backward(const Cache& cache, const Eigen::RowVectorXd& d_out) const {
  const std::size_t layers = dims_.size() - 1;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
  Eigen::MatrixXd dz = d_out;
  for (std::size_t l = layers; l-- > 0;) {
    const int in = dims_[l], out = dims_[l + 1];
    Eigen::Map<const Eigen::MatrixXd> W(params_.data() + offsets_[l], out, in);
    Eigen::Map<Eigen::MatrixXd> dW(grad.data() + offsets_[l], out, in);
    Eigen::Map<Eigen::VectorXd> db(grad.data() + offsets_[l] + static_cast<Eigen::Index>(out) * in, out);
    dW.noalias() = dz * cache.post[l].transpose();
    db = dz.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd da = W.transpose() * dz;
      dz = da.cwiseProduct((cache.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return grad;
}

std::vector<double> cumulative_softmax(const Eigen::RowVectorXd& phi) {
  const double shift = std::max(0.0, phi.maxCoeff());
  std::vector<double> out(static_cast<std::size_t>(phi.size()));
  double denom = std::exp(-shift);
  for (Eigen::Index j = 0; j < phi.size(); ++j) denom += std::exp(phi[j] - shift);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < phi.size(); ++j) {
    acc += std::exp(phi[j] - shift);
    out[static_cast<std::size_t>(j)] = std::min(acc / denom, 1.0);
  }
  return out;
}

Eigen::RowVectorXd cumulative_softmax_backward(const Eigen::RowVectorXd& phi, const std::vector<double>& d_L) {
  const std::vector<double> L = cumulative_softmax(phi);
  const double shift = std::max(0.0, phi.maxCoeff());
  double denom = std::exp(-shift);
  for (Eigen::Index j = 0; j < phi.size(); ++j) denom += std::exp(phi[j] - shift);
  double gL = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) gL += d_L[i] * L[i];
  Eigen::RowVectorXd out(phi.size());
  double suffix = 0.0;
  for (Eigen::Index j = phi.size(); j-- > 0;) {
    suffix += d_L[static_cast<std::size_t>(j)];
    out[j] = std::exp(phi[j] - shift) / denom * (suffix - gL);
  }
  return out;
}

Adam::Adam(Eigen::Index size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  p1_ *= beta1_;
  p2_ *= beta2_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 / (1.0 - p1_), c2 = 1.0 / (1.0 - p2_);
  params.array() -= lr_ * (m_.array() * c1) / ((v_.array() * c2).sqrt() + eps_);
}

}  // namespace dispcert
