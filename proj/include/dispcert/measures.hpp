#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dispcert/band.hpp"
#include "dispcert/interval.hpp"

namespace dispcert {

// Bounds on E[X]: lower from the upper CDF side, upper from the lower side.
double mean_lower(const CdfBand& band);
double mean_upper(const CdfBand& band);

// Ratio measures use 0/0 = 0; x/0 with x > 0 is +inf.
double gini_upper(const CdfBand& band);
double gini_lower(const CdfBand& band);
double extended_gini_upper(const CdfBand& band, double nu);

// For eps > 1 the lower quantile bound must stay positive; x_min is a
// declared lower bound on the losses used to clamp it.
double atkinson_upper(const CdfBand& band, double eps, std::optional<double> x_min = std::nullopt);
double atkinson_lower(const CdfBand& band, double eps, std::optional<double> x_min = std::nullopt);
std::vector<double> atkinson_upper_family(const CdfBand& band, std::span<const double> eps,
                                          std::optional<double> x_min = std::nullopt);

std::vector<ValueInterval> lorenz_band(const CdfBand& band, std::span<const double> t_grid);

double hoover_upper(const CdfBand& band);

// alpha not in {0, 1}.
double generalized_entropy_upper(const CdfBand& band, double alpha);

enum class Extreme { max, min };
// Band on the CDF of the max (or min) of k i.i.d. draws.
CdfBand extreme_cdf_bands(const CdfBand& band, unsigned k, Extreme which);

// Upper value of k * int Q(Q(p)) [F^{k-1}(Q(p)) - F^k(Q(p))] dp with the
// band's conservative substitutions. Arguments of the outer Q are clipped to [0,1].
double mean_range_upper(const CdfBand& band, unsigned k);
// Simulated E[max - min] of k draws from the upper quantile bound of the band.
double mean_range_mc(const CdfBand& band, unsigned k, std::size_t trials, std::uint64_t seed);

enum class DiffKind { abs, square };
DiffKind parse_diff_kind(const std::string& name);

double group_diff_upper(ValueInterval a, ValueInterval b, DiffKind kind);

// Per-group intervals for one functional, with group probabilities.
class GroupBounds {
 public:
  struct Entry {
    std::string group;
    ValueInterval interval;
    double weight;
  };
  // Throws ValidationError on negative weights, weights not summing to 1
  // within 1e-9, or invalid intervals.
  explicit GroupBounds(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
};

double max_pairwise_diff_upper(const GroupBounds& groups, DiffKind kind);
double cvar_fairness_upper(const GroupBounds& groups, double alpha);
double risk_uncertainty_variance_upper(const GroupBounds& groups);

}  // namespace dispcert
