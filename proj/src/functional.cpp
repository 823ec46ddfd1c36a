#include "dispcert/functional.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dispcert/errors.hpp"

namespace dispcert {
namespace {

double divergence_guard(double v, const char* what) {
  if (std::isinf(v) && v > 0) {
    throw DivergenceError(std::string(what) + ": upper bound diverges: supply support_max");
  }
  return v;
}

// Turning points of xi on [0, B] where its derivative changes sign.
std::vector<double> turning_points(const RealFn& dxi, double B) {
  constexpr int kGrid = 4096;
  std::vector<double> pts{0.0};
  double x0 = 0.0, d0 = dxi(0.0);
  for (int k = 1; k <= kGrid; ++k) {
    const double x1 = B * k / kGrid;
    const double d1 = dxi(x1);
    if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
      double a = x0, b = x1;
      const bool neg_a = d0 < 0.0;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, B); ++it) {
        const double m = 0.5 * (a + b);
        if ((dxi(m) < 0.0) == neg_a) a = m; else b = m;
      }
      pts.push_back(0.5 * (a + b));
    }
    if (d1 != 0.0) {
      x0 = x1;
      d0 = d1;
    }
  }
  pts.push_back(B);
  return pts;
}

}  // namespace

double integrate_pieces(std::span<const QuantilePiece> pieces, const WeightFunction& psi, const RealFn& xi,
                        double floor, const char* what) {
  double acc = 0.0;
  for (const auto& piece : pieces) {
    const double w = psi.integral(piece.p_lo, piece.p_hi);
    if (w == 0.0) continue;
    const double v = piece.value == -kInf ? floor : piece.value;
    const double fx = xi(v);
    if (v == kInf) divergence_guard(fx, what);
    acc += w * fx;
  }
  return acc;
}

double qbrm_upper(const CdfBand& band, const WeightFunction& psi, const RealFn& xi) {
  return integrate_pieces(quantile_pieces(band.lower()), psi, xi, band.floor(), "qbrm_upper");
}

double qbrm_lower(const CdfBand& band, const WeightFunction& psi, const RealFn& xi) {
  return integrate_pieces(quantile_pieces(band.upper()), psi, xi, band.floor(), "qbrm_lower");
}

ValueInterval transform_abs(ValueInterval s) {
  make_interval(s.lo, s.hi);
  const double lo = (s.lo >= 0.0 ? s.lo : 0.0) - (s.hi <= 0.0 ? s.hi : 0.0);
  return {lo, std::max(std::fabs(s.lo), std::fabs(s.hi))};
}

ValueInterval transform_polynomial(ValueInterval s, std::span<const PolyTerm> terms) {
  make_interval(s.lo, s.hi);
  const ValueInterval a = transform_abs(s);
  double lo = 0.0, hi = 0.0;
  for (const auto& t : terms) {
    const double k = static_cast<double>(t.k);
    double p_lo, p_hi;
    if (t.k == 0) {
      p_lo = p_hi = 1.0;
    } else if (t.k % 2 == 1) {
      p_lo = std::pow(s.lo, k);
      p_hi = std::pow(s.hi, k);
    } else {
      p_lo = std::pow(a.lo, k);
      p_hi = std::pow(a.hi, k);
    }
    if (t.alpha >= 0.0) {
      lo += t.alpha * p_lo;
      hi += t.alpha * p_hi;
    } else {
      lo += t.alpha * p_hi;
      hi += t.alpha * p_lo;
    }
  }
  return {lo, hi};
}

BvDecomposition BvDecomposition::from_pair(RealFn f1, RealFn f2, double support_max) {
  if (!(support_max > 0.0)) throw ValidationError("decomposition needs support_max > 0");
  return BvDecomposition(std::move(f1), std::move(f2), nullptr, support_max);
}

BvDecomposition BvDecomposition::from_derivative(RealFn xi, RealFn dxi, double support_max) {
  if (!(support_max > 0.0 && std::isfinite(support_max))) {
    throw ValidationError("derivative-based decomposition needs a finite support_max");
  }
  // Between turning points xi is monotone, so the variation is an exact difference.
  const std::vector<double> pts = turning_points(dxi, support_max);
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t k = 1; k < pts.size(); ++k) cum[k] = cum[k - 1] + std::fabs(xi(pts[k]) - xi(pts[k - 1]));
  auto variation = [xi, pts, cum](double x) {
    const double y = std::clamp(x, 0.0, pts.back());
    const std::size_t k = static_cast<std::size_t>(std::upper_bound(pts.begin(), pts.end(), y) - pts.begin()) - 1;
    const std::size_t kk = std::min(k, pts.size() - 1);
    return cum[kk] + std::fabs(xi(y) - xi(pts[kk]));
  };
  auto f2 = [variation, xi, support_max](double x) { return variation(x) - xi(std::clamp(x, 0.0, support_max)); };
  return BvDecomposition(variation, f2, xi, support_max);
}

void BvDecomposition::validate(std::size_t grid, double probe_max) const {
  const double top = std::min(support_max_, probe_max);
  double prev1 = f1_(0.0), prev2 = f2_(0.0);
  for (std::size_t k = 1; k <= grid; ++k) {
    const double x = top * static_cast<double>(k) / static_cast<double>(grid);
    const double a = f1_(x), b = f2_(x);
    const double tol = 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
    if (a < prev1 - tol || b < prev2 - tol) {
      throw ValidationError("decomposition part decreases near x = " + std::to_string(x));
    }
    if (xi_ && std::fabs(a - b - xi_(x)) > 1e-9 * std::max(1.0, std::fabs(xi_(x)))) {
      throw ValidationError("f1 - f2 differs from xi near x = " + std::to_string(x));
    }
    prev1 = a;
    prev2 = b;
  }
}

RealFn transform_bv(const CdfBand& band, const BvDecomposition& d) {
  return [band, d](double p) {
    const double hi = step_inverse(band.lower(), p);
    const double lo = std::max({step_inverse(band.upper(), p), band.floor(), 0.0});
    if (hi == kInf && std::isinf(d.f1(hi))) {
      throw DivergenceError("transform_bv: upper bound diverges: supply support_max");
    }
    return d.f1(hi) - d.f2(lo);
  };
}

ValueInterval signed_weight_bounds(const CdfBand& band, const WeightFunction& psi, const RealFn& xi) {
  const WeightFunction pos = psi.positive_part();
  const WeightFunction neg = psi.negative_part();
  const double hi = qbrm_upper(band, pos, xi) - qbrm_lower(band, neg, xi);
  const double lo = qbrm_lower(band, pos, xi) - qbrm_upper(band, neg, xi);
  return make_interval(lo, hi);
}

}  // namespace dispcert
