#pragma once

#include <span>
#include <vector>

#include "dispcert/band.hpp"
#include "dispcert/interval.hpp"

namespace dispcert {

using Point = std::vector<double>;

// Fraction of points coordinatewise <= query.
double multidim_ecdf(std::span<const Point> points, const Point& query);

// How the failure budget is spent. full: DKW radius at delta and
// marginals at delta/k, simultaneous validity 1 - 2 delta. split: both halves
// at delta/2 so the combined interval holds with probability 1 - delta.
enum class DeltaConvention { full, split };

// Delta each marginal band should be calibrated at.
double multidim_marginal_delta(double delta, std::size_t k, DeltaConvention convention = DeltaConvention::full);

// sqrt(ln(k (n+1) / d) / (2n)) with d = delta (full) or delta / 2 (split).
double multidim_dkw_radius(std::size_t n, std::size_t k, double delta,
                           DeltaConvention convention = DeltaConvention::full);

// Intersection of the multivariate DKW interval with the Frechet-Hoeffding
// bounds from the marginal bands.
ValueInterval multidim_band_query(std::span<const Point> points, std::span<const CdfBand> marginal_bands, double delta,
                                  const Point& query, DeltaConvention convention = DeltaConvention::full);

}  // namespace dispcert
