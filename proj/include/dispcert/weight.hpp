#pragma once

#include <string>
#include <vector>

namespace dispcert {

// psi(p) = sum_k coeffs[k] * p^k on [lo, hi), zero elsewhere.
struct PolySegment {
  double lo;
  double hi;
  std::vector<double> coeffs;
};

// A weight on [0,1] with a closed-form antiderivative.
class WeightFunction {
 public:
  enum class Kind {
    constant_one,
    cvar,
    interval_uniform,
    linear,
    smoothed_median,
    piecewise_poly,
    power_tail,
  };

  static WeightFunction constant_one();
  static WeightFunction cvar(double beta);
  static WeightFunction interval_uniform(double beta_min, double beta_max);
  static WeightFunction linear();
  // Gaussian bump exp(-(p-beta)^2/a^2) / (a sqrt(pi)), not renormalized to [0,1].
  static WeightFunction smoothed_median(double beta, double a = 0.01);
  // Segments must lie in [0,1], be ordered, and not overlap. Signs are free.
  static WeightFunction piecewise_poly(std::vector<PolySegment> segments);
  // nu (1-p)^(nu-1), the extended Gini weight.
  static WeightFunction power_tail(double nu);

  Kind kind() const { return kind_; }
  double param(int i) const { return params_[i]; }
  const std::vector<PolySegment>& segments() const { return segments_; }
  std::string name() const;

  double value(double p) const;
  // Exact integral over [a,b] with 0 <= a <= b <= 1.
  double integral(double a, double b) const;
  bool nonnegative() const;

  // Split of a piecewise polynomial into nonnegative parts with psi = pos - neg.
  // Other kinds are already nonnegative: positive_part is *this and
  // negative_part is zero.
  WeightFunction positive_part() const;
  WeightFunction negative_part() const;

 private:
  WeightFunction(Kind kind, std::vector<double> params, std::vector<PolySegment> segments = {});

  Kind kind_;
  std::vector<double> params_;
  std::vector<PolySegment> segments_;
};

double weight_integral(const WeightFunction& psi, double a, double b);

}  // namespace dispcert
