#pragma once

#include <optional>
#include <span>

#include "dispcert/crossing.hpp"
#include "dispcert/distribution.hpp"
#include "dispcert/interval.hpp"
#include "dispcert/samples.hpp"
#include "dispcert/step_cdf.hpp"

namespace dispcert {

// Two-sided step band lower <= F <= upper holding with probability >= 1 - delta.
class CdfBand {
 public:
  // The lower side must already reach 1 at support_max (the completion is not
  // implied). Throws ValidationError if lower exceeds upper anywhere.
  CdfBand(StepCdf lower, StepCdf upper, double delta, BandMethod method, OrderStats stats, BoundVector L,
          double support_max, bool nonneg);

  const StepCdf& lower() const { return lower_; }
  const StepCdf& upper() const { return upper_; }
  double delta() const { return delta_; }
  BandMethod method() const { return method_; }
  const OrderStats& order_stats() const { return stats_; }
  const BoundVector& bounds() const { return L_; }
  std::size_t n() const { return stats_.n(); }
  // +inf when undeclared.
  double support_max() const { return support_max_; }
  bool nonneg() const { return nonneg_; }
  // Clamp for inverse queries that run off the bottom: 0 for nonneg losses.
  double floor() const { return nonneg_ ? 0.0 : -kInf; }

  bool operator==(const CdfBand& other) const;

 private:
  StepCdf lower_;
  StepCdf upper_;
  double delta_;
  BandMethod method_;
  OrderStats stats_;
  BoundVector L_;
  double support_max_;
  bool nonneg_;
};

StepCdf lower_band(const OrderStats& stats, std::span<const double> L, double support_max = kInf);
StepCdf upper_band(const OrderStats& stats, std::span<const double> L);

CdfBand band_from_bounds(const OrderStats& stats, const BoundVector& L, double support_max, bool nonneg);

struct BandOptions {
  double beta_min = 0.0;
  double beta_max = 1.0;
  double tol = kDefaultCalibrationTol;
  // Required for BandMethod::optimized.
  std::optional<BoundVector> bounds;
};

// L whose band holds on both sides jointly with probability >= 1 - delta. The
// DKW radius already covers both sides; berk_jones and truncated_bj calibrate
// each side at delta/2; an optimized vector must reach 1 - delta/2.
BoundVector two_sided_bounds(std::size_t n, BandMethod method, double delta, const BandOptions& options = {});

// Calibrates (or takes) L through two_sided_bounds and applies both completions. Use exact_plugin_band
// for BandMethod::exact_plugin.
CdfBand build_band(const LossSamples& samples, BandMethod method, double delta, const BandOptions& options = {});

// Band whose two sides both equal the distribution's CDF sampled on a grid of
// `points` evenly spaced values (continuous kinds) or at its atoms (discrete).
CdfBand exact_plugin_band(const Distribution& dist, std::size_t points = 10000);

// Band from the empirical CDF of the samples; both sides equal it.
CdfBand empirical_band(const LossSamples& samples);

// (lower bound, upper bound) on VaR_beta.
ValueInterval var_bounds(const CdfBand& band, double beta);

}  // namespace dispcert
