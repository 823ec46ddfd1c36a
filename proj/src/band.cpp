#include "dispcert/band.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dispcert/errors.hpp"

namespace dispcert {
namespace {

constexpr double kOrderTol = 1e-12;

void check_sizes(const OrderStats& stats, std::span<const double> L) {
  if (stats.n() != L.size()) throw ValidationError("bound vector size does not match the sample count");
  validate_bounds(L);
}

// Indices i (1-based) of the last order statistic in each run of ties.
std::vector<std::size_t> run_ends(const OrderStats& stats) {
  std::vector<std::size_t> ends;
  const auto& x = stats.sorted();
  for (std::size_t i = 1; i <= x.size(); ++i) {
    if (i == x.size() || x[i] != x[i - 1]) ends.push_back(i);
  }
  return ends;
}

std::vector<double> union_breakpoints(const StepCdf& a, const StepCdf& b) {
  std::vector<double> out;
  std::set_union(a.breakpoints().begin(), a.breakpoints().end(), b.breakpoints().begin(),
                 b.breakpoints().end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

ValueInterval make_interval(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi)) throw ValidationError("interval endpoint is NaN");
  if (lo > hi) throw ValidationError("interval has lo > hi");
  return {lo, hi};
}

CdfBand::CdfBand(StepCdf lower, StepCdf upper, double delta, BandMethod method, OrderStats stats, BoundVector L,
                 double support_max, bool nonneg)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      delta_(delta),
      method_(method),
      stats_(std::move(stats)),
      L_(std::move(L)),
      support_max_(support_max),
      nonneg_(nonneg) {
  if (lower_.level_before() > upper_.level_before() + kOrderTol) {
    throw ValidationError("band sides cross below the first breakpoint");
  }
  for (double x : union_breakpoints(lower_, upper_)) {
    if (lower_(x) > upper_(x) + kOrderTol) throw ValidationError("band sides cross at x = " + std::to_string(x));
  }
}

bool CdfBand::operator==(const CdfBand& o) const {
  return lower_ == o.lower_ && upper_ == o.upper_ && delta_ == o.delta_ && method_ == o.method_ &&
         stats_.sorted() == o.stats_.sorted() && L_.values() == o.L_.values() && L_.delta() == o.L_.delta() &&
         L_.method() == o.L_.method() && support_max_ == o.support_max_ && nonneg_ == o.nonneg_;
}

StepCdf lower_band(const OrderStats& stats, std::span<const double> L, double support_max) {
  check_sizes(stats, L);
  if (std::isnan(support_max) || support_max < stats(stats.n())) {
    throw ValidationError("support_max is below the largest sample");
  }
  std::vector<double> bp, lv;
  for (std::size_t i : run_ends(stats)) {
    bp.push_back(stats(i));
    lv.push_back(L[i - 1]);
  }
  if (std::isfinite(support_max)) {
    if (support_max > bp.back()) {
      bp.push_back(support_max);
      lv.push_back(1.0);
    } else {
      lv.back() = 1.0;
    }
  }
  return StepCdf(0.0, std::move(bp), std::move(lv));
}

StepCdf upper_band(const OrderStats& stats, std::span<const double> L) {
  check_sizes(stats, L);
  const std::size_t n = stats.n();
  std::vector<double> bp, lv;
  for (std::size_t i : run_ends(stats)) {
    bp.push_back(stats(i));
    lv.push_back(i == n ? 1.0 : 1.0 - L[n - i - 1]);
  }
  return StepCdf(1.0 - L[n - 1], std::move(bp), std::move(lv));
}

CdfBand band_from_bounds(const OrderStats& stats, const BoundVector& L, double support_max, bool nonneg) {
  return CdfBand(lower_band(stats, L.values(), support_max), upper_band(stats, L.values()), L.delta(), L.method(),
                 stats, L, support_max, nonneg);
}

BoundVector two_sided_bounds(std::size_t n, BandMethod method, double delta, const BandOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
  const double side = 0.5 * delta;
  switch (method) {
    case BandMethod::dkw: return calibrate_dkw(n, delta);
    case BandMethod::berk_jones: return BoundVector(calibrate_berk_jones(n, side, options.tol).values(), delta, method);
    case BandMethod::truncated_bj:
      return BoundVector(calibrate_truncated_bj(n, side, options.beta_min, options.beta_max, options.tol).values(), delta,
                         method);
    case BandMethod::optimized: {
      if (!options.bounds) throw ValidationError("optimized band needs a bound vector");
      if (options.bounds->n() != n) throw ValidationError("optimized bound vector size does not match the samples");
      const double p = noncrossing_probability(*options.bounds);
      if (p < 1.0 - side) {
        std::ostringstream os;
        os << "optimized bound vector has non-crossing probability " << p << " below 1 - delta/2 = " << 1.0 - side
           << "; train it at delta/2 for a two-sided band";
        throw ValidationError(os.str());
      }
      return BoundVector(options.bounds->values(), delta, method);
    }
    case BandMethod::exact_plugin: break;
  }
  throw ValidationError("exact_plugin bands are built from a distribution, not samples");
}

CdfBand build_band(const LossSamples& samples, BandMethod method, double delta, const BandOptions& options) {
  OrderStats stats = order_statistics(samples);
  const BoundVector L = two_sided_bounds(stats.n(), method, delta, options);
  return band_from_bounds(stats, L, samples.support_max().value_or(kInf), samples.nonneg());
}

CdfBand exact_plugin_band(const Distribution& dist, std::size_t points) {
  std::vector<double> bp, lv;
  if (dist.kind() == Distribution::Kind::discrete) {
    bp = dist.atoms();
    for (double x : bp) lv.push_back(dist.cdf(x));
  } else {
    if (points < 1) throw ValidationError("plug-in grid needs at least one point");
    const double lo = dist.support_lo(), hi = dist.support_hi();
    for (std::size_t j = 1; j <= points; ++j) {
      const double x = j == points ? hi : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points);
      bp.push_back(x);
      lv.push_back(j == points ? 1.0 : dist.cdf(x));
    }
  }
  lv.back() = 1.0;
  OrderStats grid(bp);
  StepCdf cdf(0.0, bp, lv);
  return CdfBand(cdf, cdf, 0.0, BandMethod::exact_plugin, std::move(grid), BoundVector({}, 0.0, BandMethod::exact_plugin),
                 dist.support_hi(), dist.support_lo() >= 0.0);
}

CdfBand empirical_band(const LossSamples& samples) {
  OrderStats stats = order_statistics(samples);
  const double n = static_cast<double>(stats.n());
  std::vector<double> bp, lv;
  for (std::size_t i : run_ends(stats)) {
    bp.push_back(stats(i));
    lv.push_back(static_cast<double>(i) / n);
  }
  lv.back() = 1.0;
  StepCdf cdf(0.0, std::move(bp), std::move(lv));
  return CdfBand(cdf, cdf, 0.0, BandMethod::exact_plugin, std::move(stats),
                 BoundVector({}, 0.0, BandMethod::exact_plugin), samples.support_max().value_or(kInf),
                 samples.nonneg());
}

ValueInterval var_bounds(const CdfBand& band, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("VaR level must lie in (0,1)");
  const double hi = step_inverse(band.lower(), beta);
  const double lo = std::max(step_inverse(band.upper(), beta), band.floor());
  return make_interval(lo, hi);
}

}  // namespace dispcert
