#pragma once

#include <cstdint>

#include "dispcert/band.hpp"
#include "dispcert/distribution.hpp"

namespace dispcert {

struct CoverageReport {
  std::size_t trials;
  std::size_t covered;
  double coverage;
  double std_error;  // binomial
};

// Fraction of trials whose band encloses dist's CDF at 1001 evenly spaced
// points of its support (plus the atoms of a discrete distribution), 1e-12 slack.
// The bound vector is calibrated once; options.bounds is required for optimized.
CoverageReport simulate_coverage(const Distribution& dist, BandMethod method, double delta, std::size_t n,
                                 std::size_t trials, std::uint64_t seed, const BandOptions& options = {});

// True when lower <= cdf <= upper at every grid point.
bool band_encloses(const CdfBand& band, const Distribution& dist, std::size_t grid_points = 1001,
                   double tol = 1e-12);

}  // namespace dispcert
