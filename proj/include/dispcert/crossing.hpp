#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dispcert {

enum class BandMethod { dkw, berk_jones, truncated_bj, optimized, exact_plugin };

std::string to_string(BandMethod method);
// Throws ValidationError for unknown names.
BandMethod parse_band_method(const std::string& name);

// Lower bounds L_1 <= ... <= L_n in [0,1] on the uniform order statistics,
// with the miscoverage they were calibrated for.
class BoundVector {
 public:
  BoundVector() = default;
  // Throws ValidationError when L is unsorted or leaves [0,1], or delta is
  // outside [0,1).
  BoundVector(std::vector<double> L, double delta, BandMethod method);

  std::size_t n() const { return L_.size(); }
  const std::vector<double>& values() const { return L_; }
  double operator[](std::size_t i) const { return L_[i]; }
  double delta() const { return delta_; }
  BandMethod method() const { return method_; }

 private:
  std::vector<double> L_;
  double delta_ = 0.0;
  BandMethod method_ = BandMethod::dkw;
};

// Throws ValidationError unless L is nondecreasing inside [0,1].
void validate_bounds(std::span<const double> L);

// P(U_(i) >= L_i for all i) for n = L.size() i.i.d. uniforms.
double noncrossing_probability(std::span<const double> L);
inline double noncrossing_probability(const BoundVector& L) { return noncrossing_probability(L.values()); }

struct NoncrossingGradient {
  double probability;
  std::vector<double> gradient;  // dP/dL_i, all <= 0
};

// Probability and its exact gradient from one forward and one backward sweep.
NoncrossingGradient noncrossing_gradient(std::span<const double> L);
inline NoncrossingGradient noncrossing_gradient(const BoundVector& L) {
  return noncrossing_gradient(L.values());
}

BoundVector calibrate_dkw(std::size_t n, double delta);

inline constexpr double kDefaultCalibrationTol = 1e-9;

BoundVector calibrate_berk_jones(std::size_t n, double delta, double tol = kDefaultCalibrationTol);

// Beta-quantile bounds on the indices with i/n in [beta_min, beta_max] only.
BoundVector calibrate_truncated_bj(std::size_t n, double delta, double beta_min, double beta_max,
                                   double tol = kDefaultCalibrationTol);

struct McEstimate {
  double estimate;
  double std_error;
};

// Fraction of simulated uniform samples whose order statistics clear L.
McEstimate mc_noncrossing_oracle(std::span<const double> L, std::uint64_t trials, std::uint64_t seed);

}  // namespace dispcert
