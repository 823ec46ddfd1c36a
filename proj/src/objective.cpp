#include "dispcert/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dispcert/errors.hpp"

namespace dispcert {
namespace {

void check(std::span<const double> L, const OrderStats& stats, std::span<double> grad) {
  if (L.size() != stats.n()) throw ValidationError("objective: bound vector size does not match the samples");
  if (!grad.empty() && grad.size() != L.size()) throw ValidationError("objective: gradient buffer has wrong size");
}

class Constant final : public BoundObjective {
 public:
  explicit Constant(double c) : c_(c) {}
  double evaluate(std::span<const double>, const OrderStats&, std::span<double> grad) const override {
    std::fill(grad.begin(), grad.end(), 0.0);
    return c_;
  }
  std::string describe() const override { return "constant(" + std::to_string(c_) + ")"; }

 private:
  double c_;
};

class QbrmUpper final : public BoundObjective {
 public:
  QbrmUpper(WeightFunction psi, RealFn xi, double B, std::string label)
      : psi_(std::move(psi)), xi_(std::move(xi)), B_(B), label_(std::move(label)) {}

  double evaluate(std::span<const double> L, const OrderStats& stats, std::span<double> grad) const override {
    check(L, stats, grad);
    const std::size_t n = L.size();
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 1; i <= n + 1; ++i) {
      const double cur = i <= n ? L[i - 1] : 1.0;
      const double w = psi_.integral(prev, cur);
      if (w != 0.0) {
        const double x = i <= n ? stats(i) : B_;
        const double v = xi_(x);
        if (std::isinf(v) && v > 0) {
          throw DivergenceError(label_ + ": upper bound diverges: supply support_max");
        }
        acc += w * v;
      }
      prev = cur;
    }
    if (!grad.empty()) {
      for (std::size_t i = 1; i <= n; ++i) {
        const double next = i < n ? xi_(stats(i + 1)) : xi_(B_);
        const double d = psi_.value(L[i - 1]);
        grad[i - 1] = d == 0.0 ? 0.0 : d * (xi_(stats(i)) - next);
      }
    }
    return acc;
  }
  std::string describe() const override { return label_ + "_upper[" + psi_.name() + "]"; }

 private:
  WeightFunction psi_;
  RealFn xi_;
  double B_;
  std::string label_;
};

class QbrmLower final : public BoundObjective {
 public:
  QbrmLower(WeightFunction psi, RealFn xi, double floor, std::string label)
      : psi_(std::move(psi)), xi_(std::move(xi)), floor_(floor), label_(std::move(label)) {}

  // sum_{i=0}^{n} xi(X_(i)) int_{1-L_{n-i+1}}^{1-L_{n-i}} psi with L_0 = 0, L_{n+1} = 1, X_(0) = floor.
  double evaluate(std::span<const double> L, const OrderStats& stats, std::span<double> grad) const override {
    check(L, stats, grad);
    const std::size_t n = L.size();
    auto Lk = [&](std::size_t k) { return k == 0 ? 0.0 : (k == n + 1 ? 1.0 : L[k - 1]); };
    auto X = [&](std::size_t i) { return i == 0 ? floor_ : stats(i); };
    double acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double w = psi_.integral(1.0 - Lk(n - i + 1), 1.0 - Lk(n - i));
      if (w != 0.0) acc += w * xi_(X(i));
    }
    if (!grad.empty()) {
      for (std::size_t k = 1; k <= n; ++k) {
        const double d = psi_.value(1.0 - L[k - 1]);
        grad[k - 1] = d == 0.0 ? 0.0 : d * (xi_(X(n - k + 1)) - xi_(X(n - k)));
      }
    }
    return acc;
  }
  std::string describe() const override { return label_ + "_lower[" + psi_.name() + "]"; }

 private:
  WeightFunction psi_;
  RealFn xi_;
  double floor_;
  std::string label_;
};

const RealFn kIdentity = [](double x) { return x; };

class GiniUpper final : public BoundObjective {
 public:
  explicit GiniUpper(double B)
      : num_(WeightFunction::linear(), kIdentity, B, "gini"),
        den_(WeightFunction::constant_one(), kIdentity, 0.0, "gini") {}

  double evaluate(std::span<const double> L, const OrderStats& stats, std::span<double> grad) const override {
    std::vector<double> gn(grad.size()), gd(grad.size());
    const double num = 2.0 * num_.evaluate(L, stats, gn);
    const double den = den_.evaluate(L, stats, gd);
    if (den == 0.0) {
      std::fill(grad.begin(), grad.end(), 0.0);
      return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = (2.0 * gn[i] * den - num * gd[i]) / (den * den);
    return num / den - 1.0;
  }
  std::string describe() const override { return "gini_upper"; }

 private:
  QbrmUpper num_;
  QbrmLower den_;
};

class GiniLower final : public BoundObjective {
 public:
  explicit GiniLower(double B)
      : num_(WeightFunction::linear(), kIdentity, 0.0, "gini"),
        den_(WeightFunction::constant_one(), kIdentity, B, "gini") {}

  double evaluate(std::span<const double> L, const OrderStats& stats, std::span<double> grad) const override {
    std::vector<double> gn(grad.size()), gd(grad.size());
    const double num = 2.0 * num_.evaluate(L, stats, gn);
    const double den = den_.evaluate(L, stats, gd);
    if (den == 0.0) {
      std::fill(grad.begin(), grad.end(), 0.0);
      return 0.0;
    }
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = (2.0 * gn[i] * den - num * gd[i]) / (den * den);
    return num / den - 1.0;
  }
  std::string describe() const override { return "gini_lower"; }

 private:
  QbrmLower num_;
  QbrmUpper den_;
};

class Linear final : public BoundObjective {
 public:
  explicit Linear(std::vector<WeightedObjective> terms) : terms_(std::move(terms)) {}

  double evaluate(std::span<const double> L, const OrderStats& stats, std::span<double> grad) const override {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<double> g(grad.size());
    double acc = 0.0;
    for (const auto& t : terms_) {
      if (t.coefficient == 0.0) continue;
      acc += t.coefficient * t.objective->evaluate(L, stats, g);
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += t.coefficient * g[i];
    }
    return acc;
  }
  std::string describe() const override {
    std::ostringstream os;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      if (k) os << " + ";
      os << terms_[k].coefficient << "*" << terms_[k].objective->describe();
    }
    return os.str();
  }

 private:
  std::vector<WeightedObjective> terms_;
};

}  // namespace

ObjectivePtr constant_objective(double c) { return std::make_shared<Constant>(c); }

ObjectivePtr qbrm_upper_objective(WeightFunction psi, RealFn xi, double support_max, std::string label) {
  return std::make_shared<QbrmUpper>(std::move(psi), std::move(xi), support_max, std::move(label));
}

ObjectivePtr qbrm_lower_objective(WeightFunction psi, RealFn xi, double floor, std::string label) {
  return std::make_shared<QbrmLower>(std::move(psi), std::move(xi), floor, std::move(label));
}

ObjectivePtr gini_upper_objective(double support_max) { return std::make_shared<GiniUpper>(support_max); }
ObjectivePtr gini_lower_objective(double support_max) { return std::make_shared<GiniLower>(support_max); }

ObjectivePtr linear_objective(std::vector<WeightedObjective> terms) {
  if (terms.empty()) throw ValidationError("linear objective needs at least one term");
  return std::make_shared<Linear>(std::move(terms));
}

}  // namespace dispcert
