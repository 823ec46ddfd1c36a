#include "dispcert/coverage.hpp"

#include <cmath>
#include <random>

#include "dispcert/errors.hpp"

namespace dispcert {
namespace {

std::vector<double> check_grid(const Distribution& dist, std::size_t points) {
  std::vector<double> grid;
  const double lo = dist.support_lo(), hi = dist.support_hi();
  for (std::size_t j = 0; j < points; ++j) {
    const double t = points == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(points - 1);
    grid.push_back(lo + t * (hi - lo));
  }
  if (dist.kind() == Distribution::Kind::discrete) grid.insert(grid.end(), dist.atoms().begin(), dist.atoms().end());
  return grid;
}

}  // namespace

bool band_encloses(const CdfBand& band, const Distribution& dist, std::size_t grid_points, double tol) {
  for (double x : check_grid(dist, grid_points)) {
    const double F = dist.cdf(x);
    if (band.lower()(x) > F + tol || band.upper()(x) < F - tol) return false;
  }
  return true;
}

CoverageReport simulate_coverage(const Distribution& dist, BandMethod method, double delta, std::size_t n,
                                 std::size_t trials, std::uint64_t seed, const BandOptions& options) {
  if (n == 0) throw ValidationError("coverage needs n >= 1");
  if (trials == 0) throw ValidationError("coverage needs at least one trial");
  if (method == BandMethod::exact_plugin) throw ValidationError("exact_plugin bands carry no coverage claim");
  if (method == BandMethod::optimized && (!options.bounds || options.bounds->n() != n)) {
    throw ValidationError("optimized coverage needs a bound vector of size n");
  }
  const BoundVector L = method == BandMethod::optimized ? *options.bounds : two_sided_bounds(n, method, delta, options);
  const double B = dist.support_hi();
  const bool nonneg = dist.support_lo() >= 0.0;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::size_t covered = 0;
  std::vector<double> draws(n);
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& x : draws) x = dist.sample(rng);
    const CdfBand band = band_from_bounds(OrderStats(draws), L, B, nonneg);
    covered += band_encloses(band, dist);
  }
  const double p = static_cast<double>(covered) / static_cast<double>(trials);
  return {trials, covered, p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

}  // namespace dispcert
