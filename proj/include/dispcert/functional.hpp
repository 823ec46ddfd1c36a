#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dispcert/band.hpp"
#include "dispcert/interval.hpp"
#include "dispcert/weight.hpp"

namespace dispcert {

using RealFn = std::function<double(double)>;

// Sum of psi-mass times xi(value) over inverse pieces. Pieces at -inf are
// evaluated at `floor`; a piece at +inf with mass and infinite xi(+inf) throws
// DivergenceError naming `what`.
double integrate_pieces(std::span<const QuantilePiece> pieces, const WeightFunction& psi, const RealFn& xi,
                        double floor, const char* what);

// Upper bound on the integral of psi(p) xi(F^-(p)) for nondecreasing xi, using
// the inverse of the lower CDF bound (closed at the band's support_max).
double qbrm_upper(const CdfBand& band, const WeightFunction& psi, const RealFn& xi);
// Lower bound using the inverse of the upper CDF bound, floored at 0 for nonneg losses.
double qbrm_lower(const CdfBand& band, const WeightFunction& psi, const RealFn& xi);

ValueInterval transform_abs(ValueInterval s);

struct PolyTerm {
  unsigned k;
  double alpha;
};
// Envelope of sum_k alpha_k s^k for s in the interval, term by term.
ValueInterval transform_polynomial(ValueInterval s, std::span<const PolyTerm> terms);

// xi = f1 - f2 on [0, B] with f1, f2 nondecreasing.
class BvDecomposition {
 public:
  static BvDecomposition from_pair(RealFn f1, RealFn f2, double support_max);
  // f1 is the running total variation of xi, found from the sign changes of
  // its derivative; f2 = f1 - xi. Needs a finite support_max.
  static BvDecomposition from_derivative(RealFn xi, RealFn dxi, double support_max);

  double f1(double x) const { return f1_(x); }
  double f2(double x) const { return f2_(x); }
  double xi(double x) const { return f1_(x) - f2_(x); }
  double support_max() const { return support_max_; }

  // Throws ValidationError if f1 or f2 decreases between grid points of
  // [0, min(B, probe_max)], or f1 - f2 departs from xi where xi is known.
  void validate(std::size_t grid = 1001, double probe_max = 1e6) const;

 private:
  BvDecomposition(RealFn f1, RealFn f2, RealFn xi, double support_max)
      : f1_(std::move(f1)), f2_(std::move(f2)), xi_(std::move(xi)), support_max_(support_max) {}

  RealFn f1_;
  RealFn f2_;
  RealFn xi_;
  double support_max_;
};

// p -> f1(upper quantile bound at p) - f2(lower quantile bound at p).
RealFn transform_bv(const CdfBand& band, const BvDecomposition& decomposition);

// Bounds for a weight of either sign, split as psi = psi+ - psi-.
ValueInterval signed_weight_bounds(const CdfBand& band, const WeightFunction& psi, const RealFn& xi);

}  // namespace dispcert
