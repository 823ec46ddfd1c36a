#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dispcert/functional.hpp"
#include "dispcert/samples.hpp"
#include "dispcert/weight.hpp"

namespace dispcert {

// A bound value as a differentiable function of the bound vector L, for the
// order statistics it will be applied to.
class BoundObjective {
 public:
  virtual ~BoundObjective() = default;
  // Writes d(value)/dL into grad when grad is nonempty (same size as L).
  virtual double evaluate(std::span<const double> L, const OrderStats& stats, std::span<double> grad) const = 0;
  virtual std::string describe() const = 0;
};

using ObjectivePtr = std::shared_ptr<const BoundObjective>;

ObjectivePtr constant_objective(double c);

// sum_{i=1}^{n+1} xi(X_(i)) int_{L_{i-1}}^{L_i} psi, X_(n+1) = support_max.
ObjectivePtr qbrm_upper_objective(WeightFunction psi, RealFn xi, double support_max, std::string label = "qbrm");

// The matching lower bound through the upper CDF side; floor is X_(0).
ObjectivePtr qbrm_lower_objective(WeightFunction psi, RealFn xi, double floor, std::string label = "qbrm");

// 2 int p Q_hi / int Q_lo - 1 and its lower counterpart (clamped at 0 only in value).
ObjectivePtr gini_upper_objective(double support_max);
ObjectivePtr gini_lower_objective(double support_max);

struct WeightedObjective {
  double coefficient;
  ObjectivePtr objective;
};
ObjectivePtr linear_objective(std::vector<WeightedObjective> terms);

}  // namespace dispcert
