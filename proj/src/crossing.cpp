#include "dispcert/crossing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dispcert/errors.hpp"
#include "dispcert/special.hpp"

namespace dispcert {
namespace {

// Extended precision keeps the Poisson weights of large steps in range.
constexpr std::size_t kDoublePrecisionLimit = 500;

template <class T>
constexpr T kNegInf = -std::numeric_limits<T>::infinity();

template <class T>
T log_of(T v) {
  return v > 0 ? std::log(v) : kNegInf<T>;
}

// Sweeps of the rate-n Poisson embedding. With N(t) the number of points
// below t, the weight r(j) of "j points below the current boundary, every
// earlier constraint satisfied" evolves by convolution with lambda^m / m!,
// lambda = n * (step length). The e^{-lambda} factors are dropped, which turns
// r(j) / n^j into the volume of the matching ordered configurations; each
// step is rescaled by its maximum and the scale kept in logs.
template <class T>
class Sweeper {
 public:
  explicit Sweeper(std::span<const double> L) : L_(L), n_(L.size()), log_n_(std::log(static_cast<T>(n_))) {}

  // log of upsilon(L_1..L_{k-1}, L_k) for k = 1..n (index k-1), and log P.
  void forward(std::vector<T>* log_prefix, T* log_p) const {
    std::vector<T> r(n_ + 1, T(0));
    std::vector<T> pmf(n_ + 1);
    r[0] = 1;
    T log_scale = 0;
    T pos = 0;
    if (log_prefix) log_prefix->assign(n_, kNegInf<T>);
    for (std::size_t k = 1; k <= n_; ++k) {
      const T step = static_cast<T>(L_[k - 1]) - pos;
      if (step > 0) {
        fill_pmf(static_cast<T>(n_) * step, k - 1, pmf);
        for (std::size_t j = k; j-- > 0;) {
          T acc = 0;
          for (std::size_t i = 0; i <= j; ++i) acc += r[i] * pmf[j - i];
          r[j] = acc;
        }
        pos = static_cast<T>(L_[k - 1]);
      }
      log_scale += rescale(r, 0, k);
      if (log_prefix) {
        (*log_prefix)[k - 1] = log_of(r[k - 1]) + log_scale - static_cast<T>(k - 1) * log_n_;
      }
    }
    if (log_p) {
      const T lambda = static_cast<T>(n_) * (1 - pos);
      if (!(lambda > 0)) {
        *log_p = kNegInf<T>;
        return;
      }
      const T log_lambda = std::log(lambda);
      T m = kNegInf<T>;
      std::vector<T> terms(n_);
      for (std::size_t j = 0; j < n_; ++j) {
        const T rest = static_cast<T>(n_ - j);
        terms[j] = log_of(r[j]) + rest * log_lambda - std::lgamma(rest + 1);
        m = std::max(m, terms[j]);
      }
      T acc = 0;
      for (T t : terms) acc += std::exp(t - m);
      *log_p = std::lgamma(static_cast<T>(n_) + 1) - static_cast<T>(n_) * log_n_ + log_scale + m + std::log(acc);
    }
  }

  // log of upsilon(L_{i+1}..L_n, 1) for i = 0..n (index i).
  void backward(std::vector<T>* log_suffix) const {
    log_suffix->assign(n_ + 1, kNegInf<T>);
    (*log_suffix)[n_] = 0;
    // s(c): weight of "c points at or above the current boundary".
    std::vector<T> s(n_ + 1, T(0));
    std::vector<T> pmf(n_ + 1);
    s[0] = 1;
    std::size_t low = 0;
    T log_scale = 0;
    T pos = 1;
    for (std::size_t k = n_; k >= 1; --k) {
      const T step = pos - static_cast<T>(L_[k - 1]);
      if (step > 0) {
        fill_pmf(static_cast<T>(n_) * step, n_ - low, pmf);
        for (std::size_t c = n_ + 1; c-- > low;) {
          T acc = 0;
          for (std::size_t i = low; i <= c; ++i) acc += s[i] * pmf[c - i];
          s[c] = acc;
        }
        pos = static_cast<T>(L_[k - 1]);
      }
      const std::size_t need = n_ - k + 1;
      for (std::size_t c = low; c < need; ++c) s[c] = 0;
      low = need;
      const T scaled = rescale(s, low, n_ + 1);
      if (scaled == kNegInf<T>) return;
      log_scale += scaled;
      (*log_suffix)[k - 1] = log_of(s[need]) + log_scale - static_cast<T>(need) * log_n_;
    }
  }

 private:
  static void fill_pmf(T lambda, std::size_t max_m, std::vector<T>& pmf) {
    pmf[0] = 1;
    for (std::size_t m = 1; m <= max_m; ++m) pmf[m] = pmf[m - 1] * lambda / static_cast<T>(m);
  }

  // Divides v[lo, hi) by its maximum and returns the log of that maximum.
  static T rescale(std::vector<T>& v, std::size_t lo, std::size_t hi) {
    T m = 0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, v[i]);
    if (!(m > 0)) return kNegInf<T>;
    for (std::size_t i = lo; i < hi; ++i) v[i] /= m;
    return std::log(m);
  }

  std::span<const double> L_;
  std::size_t n_;
  T log_n_;
};

template <class T>
double probability_impl(std::span<const double> L) {
  T log_p;
  Sweeper<T>(L).forward(nullptr, &log_p);
  return std::clamp(static_cast<double>(std::exp(log_p)), 0.0, 1.0);
}

template <class T>
NoncrossingGradient gradient_impl(std::span<const double> L) {
  const std::size_t n = L.size();
  Sweeper<T> sw(L);
  std::vector<T> log_prefix, log_suffix;
  T log_p;
  sw.forward(&log_prefix, &log_p);
  sw.backward(&log_suffix);
  NoncrossingGradient out{std::clamp(static_cast<double>(std::exp(log_p)), 0.0, 1.0),
                          std::vector<double>(n)};
  const T log_fact = std::lgamma(static_cast<T>(n) + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    out.gradient[i - 1] = -static_cast<double>(std::exp(log_fact + log_prefix[i - 1] + log_suffix[i]));
  }
  return out;
}

std::vector<double> beta_quantiles(std::size_t n, double s, std::size_t i_lo, std::size_t i_hi) {
  std::vector<double> L(n, 0.0);
  for (std::size_t i = i_lo; i <= i_hi; ++i) {
    L[i - 1] = incbeta_inv(static_cast<double>(i), static_cast<double>(n - i + 1), s);
  }
  for (std::size_t i = i_hi + 1; i <= n; ++i) L[i - 1] = L[i_hi - 1];
  // Quantiles of successive order statistics are ordered; enforce it against rounding.
  for (std::size_t i = 1; i < n; ++i) L[i] = std::max(L[i], L[i - 1]);
  return L;
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
}

// Largest s (in the bisection sense) whose Beta-quantile vector keeps the
// noncrossing probability at least 1 - delta, to within tol.
BoundVector calibrate_window(std::size_t n, double delta, std::size_t i_lo, std::size_t i_hi, double tol,
                             BandMethod method) {
  check_delta(delta);
  if (!(tol > 0.0)) throw ValidationError("calibration tolerance must be positive");
  const double target = 1.0 - delta;
  auto prob = [&](double s) { return noncrossing_probability(beta_quantiles(n, s, i_lo, i_hi)); };

  // A union bound over the window makes s = delta / width feasible; shrink
  // further only to absorb rounding.
  double lo = delta / static_cast<double>(i_hi - i_lo + 1);
  double p_lo = prob(lo);
  for (int it = 0; p_lo < target; ++it) {
    if (it == 200) throw CalibrationError("calibration did not converge");
    lo *= 0.5;
    p_lo = prob(lo);
  }
  double hi = delta;
  if (hi > lo) {
    const double p_hi = prob(hi);
    if (p_hi >= target) {
      lo = hi;
      p_lo = p_hi;
    }
  }
  for (int it = 0; it < 200; ++it) {
    if (p_lo - target <= tol) return BoundVector(beta_quantiles(n, lo, i_lo, i_hi), delta, method);
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    const double p_mid = prob(mid);
    if (p_mid >= target) {
      lo = mid;
      p_lo = p_mid;
    } else {
      hi = mid;
    }
  }
  if (p_lo - target <= tol) return BoundVector(beta_quantiles(n, lo, i_lo, i_hi), delta, method);
  throw CalibrationError("calibration did not converge");
}

}  // namespace

std::string to_string(BandMethod method) {
  switch (method) {
    case BandMethod::dkw: return "dkw";
    case BandMethod::berk_jones: return "berk_jones";
    case BandMethod::truncated_bj: return "truncated_bj";
    case BandMethod::optimized: return "optimized";
    case BandMethod::exact_plugin: return "exact_plugin";
  }
  return "unknown";
}

BandMethod parse_band_method(const std::string& name) {
  for (BandMethod m : {BandMethod::dkw, BandMethod::berk_jones, BandMethod::truncated_bj,
                       BandMethod::optimized, BandMethod::exact_plugin}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown band method '" + name + "'");
}

void validate_bounds(std::span<const double> L) {
  double prev = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    if (std::isnan(L[i]) || L[i] < 0.0 || L[i] > 1.0) {
      throw ValidationError("bound L_" + std::to_string(i + 1) + " outside [0,1]");
    }
    if (L[i] < prev) throw ValidationError("bounds must be nondecreasing at L_" + std::to_string(i + 1));
    prev = L[i];
  }
}

BoundVector::BoundVector(std::vector<double> L, double delta, BandMethod method)
    : L_(std::move(L)), delta_(delta), method_(method) {
  validate_bounds(L_);
  if (!(delta_ >= 0.0 && delta_ < 1.0)) throw ValidationError("delta must lie in [0,1)");
}

double noncrossing_probability(std::span<const double> L) {
  validate_bounds(L);
  if (L.empty()) return 1.0;
  if (L.size() > kDoublePrecisionLimit) return probability_impl<long double>(L);
  return probability_impl<double>(L);
}

NoncrossingGradient noncrossing_gradient(std::span<const double> L) {
  validate_bounds(L);
  if (L.empty()) return {1.0, {}};
  if (L.size() > kDoublePrecisionLimit) return gradient_impl<long double>(L);
  return gradient_impl<double>(L);
}

BoundVector calibrate_dkw(std::size_t n, double delta) {
  if (n == 0) throw ValidationError("calibration needs n >= 1");
  check_delta(delta);
  const double radius = std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
  std::vector<double> L(n);
  for (std::size_t i = 1; i <= n; ++i) {
    L[i - 1] = std::max(0.0, static_cast<double>(i) / static_cast<double>(n) - radius);
  }
  return BoundVector(std::move(L), delta, BandMethod::dkw);
}

BoundVector calibrate_berk_jones(std::size_t n, double delta, double tol) {
  if (n == 0) throw ValidationError("calibration needs n >= 1");
  return calibrate_window(n, delta, 1, n, tol, BandMethod::berk_jones);
}

BoundVector calibrate_truncated_bj(std::size_t n, double delta, double beta_min, double beta_max, double tol) {
  if (n == 0) throw ValidationError("calibration needs n >= 1");
  if (!(beta_min >= 0.0 && beta_min < beta_max && beta_max <= 1.0)) {
    throw ValidationError("truncation window needs 0 <= beta_min < beta_max <= 1");
  }
  constexpr double kWindowTol = 1e-12;
  const double nd = static_cast<double>(n);
  std::size_t i_lo = 0, i_hi = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double q = static_cast<double>(i) / nd;
    if (q >= beta_min - kWindowTol && q <= beta_max + kWindowTol) {
      if (i_lo == 0) i_lo = i;
      i_hi = i;
    }
  }
  if (i_lo == 0) throw ValidationError("truncation window contains no order statistics");
  return calibrate_window(n, delta, i_lo, i_hi, tol, BandMethod::truncated_bj);
}

McEstimate mc_noncrossing_oracle(std::span<const double> L, std::uint64_t trials, std::uint64_t seed) {
  validate_bounds(L);
  if (trials == 0) throw ValidationError("trials must be >= 1");
  constexpr std::uint64_t kBlock = 1 << 16;
  const std::size_t n = L.size();
  std::vector<double> u(n);
  std::uint64_t hits = 0;
  for (std::uint64_t start = 0, block = 0; start < trials; start += kBlock, ++block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block)};
    std::mt19937_64 rng(seq);
    const std::uint64_t end = std::min(trials, start + kBlock);
    for (std::uint64_t t = start; t < end; ++t) {
      for (double& v : u) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      std::sort(u.begin(), u.end());
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) ok = u[i] >= L[i];
      hits += ok;
    }
  }
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

}  // namespace dispcert
