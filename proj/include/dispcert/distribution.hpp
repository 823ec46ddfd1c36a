#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dispcert {

// Known loss distributions used for plug-in bands and coverage simulation.
class Distribution {
 public:
  enum class Kind { uniform, beta, exponential, discrete };

  static Distribution uniform(double lo = 0.0, double hi = 1.0);
  // Beta(a, b) rescaled to [lo, hi].
  static Distribution beta(double a, double b, double lo = 0.0, double hi = 1.0);
  // Exponential(rate) conditioned on X <= support_max.
  static Distribution exponential(double rate, double support_max);
  // Atoms with probabilities; equal weights when probs is empty.
  static Distribution discrete(std::vector<double> values, std::vector<double> probs = {});

  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& probs() const { return probs_; }

  double cdf(double x) const;
  // Left-continuous inverse inf{x : cdf(x) >= p}.
  double quantile(double p) const;
  double support_lo() const;
  double support_hi() const;

  // Inverse-transform draw from one 53-bit uniform.
  double sample(std::mt19937_64& rng) const;

 private:
  Distribution(Kind kind, std::vector<double> params) : kind_(kind), params_(std::move(params)) {}

  Kind kind_;
  std::vector<double> params_;
  std::vector<double> atoms_;
  std::vector<double> probs_;
  std::vector<double> cum_;
};

// Uniform on (0,1), never exactly 0.
inline double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace dispcert
