#include "dispcert/multidim.hpp"

#include <algorithm>
#include <cmath>

#include "dispcert/errors.hpp"

namespace dispcert {
namespace {

std::size_t check_dimension(std::span<const Point> points, const Point& query) {
  const std::size_t k = query.size();
  if (k == 0) throw ValidationError("query dimension must be >= 1");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != k) {
      throw ValidationError("point " + std::to_string(i) + " has dimension " + std::to_string(points[i].size()) +
                            ", expected " + std::to_string(k));
    }
  }
  return k;
}

}  // namespace

double multidim_ecdf(std::span<const Point> points, const Point& query) {
  check_dimension(points, query);
  if (points.empty()) throw ValidationError("no points");
  std::size_t hits = 0;
  for (const auto& p : points) {
    bool below = true;
    for (std::size_t j = 0; j < query.size() && below; ++j) below = p[j] <= query[j];
    hits += below;
  }
  return static_cast<double>(hits) / static_cast<double>(points.size());
}

double multidim_marginal_delta(double delta, std::size_t k, DeltaConvention convention) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
  if (k == 0) throw ValidationError("dimension must be >= 1");
  const double d = convention == DeltaConvention::split ? delta / 2.0 : delta;
  return d / static_cast<double>(k);
}

double multidim_dkw_radius(std::size_t n, std::size_t k, double delta, DeltaConvention convention) {
  if (n == 0) throw ValidationError("no points");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
  const double d = convention == DeltaConvention::split ? delta / 2.0 : delta;
  const double nn = static_cast<double>(n);
  return std::sqrt(std::log(static_cast<double>(k) * (nn + 1.0) / d) / (2.0 * nn));
}

ValueInterval multidim_band_query(std::span<const Point> points, std::span<const CdfBand> marginal_bands,
                                  double delta, const Point& query, DeltaConvention convention) {
  const std::size_t k = check_dimension(points, query);
  if (marginal_bands.size() != k) {
    throw ValidationError("expected " + std::to_string(k) + " marginal bands, got " +
                          std::to_string(marginal_bands.size()));
  }
  const double ecdf = multidim_ecdf(points, query);
  const double r = multidim_dkw_radius(points.size(), k, delta, convention);
  double sum_lower = 0.0;
  double min_upper = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    sum_lower += marginal_bands[j].lower()(query[j]);
    min_upper = std::min(min_upper, marginal_bands[j].upper()(query[j]));
  }
  const double lo = std::max({0.0, 1.0 - static_cast<double>(k) + sum_lower, ecdf - r});
  const double hi = std::min({min_upper, ecdf + r, 1.0});
  // Off the coverage event the sides can cross; collapse to a point.
  return ValueInterval{std::min(lo, hi), hi};
}

}  // namespace dispcert
