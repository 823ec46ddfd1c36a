#include "dispcert/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dispcert/errors.hpp"

namespace dispcert {
namespace {

// Continued fraction for I_x(a,b) (modified Lentz), valid for x < (a+1)/(a+b+2).
double beta_cf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw CalibrationError("incomplete beta continued fraction did not converge");
}

double log_front(double a, double b, double x) {
  return a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
}

}  // namespace

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double incbeta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("incomplete beta needs x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front(a, b, x)) * beta_cf(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front(a, b, x)) * beta_cf(b, a, 1.0 - x) / b;
}

double incbeta_inv(double a, double b, double p) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("inverse incomplete beta needs a, b > 0");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("inverse incomplete beta needs p in [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  if (a == 1.0) return -std::expm1(std::log1p(-p) / b);
  if (b == 1.0) return std::pow(p, 1.0 / a);

  // Starting point from the normal approximation (a, b >= 1) or the two
  // tail power laws otherwise.
  double x;
  if (a >= 1.0 && b >= 1.0) {
    const double pp = p < 0.5 ? p : 1.0 - p;
    const double t = std::sqrt(-2.0 * std::log(pp));
    double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    if (p < 0.5) z = -z;
    const double al = (z * z - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    const double w = z * std::sqrt(al + h) / h -
                     (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    x = a / (a + b * std::exp(2.0 * w));
  } else {
    const double lna = std::log(a / (a + b)), lnb = std::log(b / (a + b));
    const double t = std::exp(a * lna) / a, u = std::exp(b * lnb) / b, w = t + u;
    x = p < t / w ? std::pow(a * w * p, 1.0 / a) : 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
  }
  double lo = 0.0, hi = 1.0;
  if (!(x > 0.0 && x < 1.0)) x = 0.5;
  const double lbeta = log_beta(a, b);
  for (int it = 0; it < 300; ++it) {
    const double f = incbeta(a, b, x) - p;
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    const double dens = std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lbeta);
    double next = x;
    if (dens > 0.0 && std::isfinite(dens)) {
      const double step = f / dens;
      const double curv = (a - 1.0) / x - (b - 1.0) / (1.0 - x);
      const double halley = step / (1.0 - 0.5 * std::min(1.0, std::max(-1.0, step * curv)));
      next = x - halley;
    }
    if (!(next > lo && next < hi)) {
      next = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
      if (lo == 0.0) next = 0.5 * hi;
    }
    if (std::fabs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x) return next;
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * x) return x;
    x = next;
  }
  return x;
}

}  // namespace dispcert
