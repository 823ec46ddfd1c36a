#include "dispcert/samples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dispcert/errors.hpp"

namespace dispcert {

LossSamples::LossSamples(std::vector<double> values, std::vector<std::string> groups,
                         std::optional<double> support_max, bool nonneg)
    : values_(std::move(values)),
      groups_(std::move(groups)),
      support_max_(support_max),
      nonneg_(nonneg) {
  if (values_.empty()) throw ValidationError("no samples");
  if (!groups_.empty() && groups_.size() != values_.size()) {
    throw ValidationError("group labels must match the number of values");
  }
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v)) {
      throw ValidationError("non-finite loss at index " + std::to_string(i));
    }
    if (nonneg_ && v < 0.0) {
      throw ValidationError("negative loss at index " + std::to_string(i) + " with nonneg set");
    }
    hi = std::max(hi, v);
  }
  if (support_max_) {
    if (std::isnan(*support_max_)) throw ValidationError("support_max is NaN");
    if (*support_max_ < hi) throw ValidationError("support_max is below the largest loss");
  }
}

std::vector<std::string> LossSamples::group_labels() const {
  std::set<std::string> labels(groups_.begin(), groups_.end());
  return {labels.begin(), labels.end()};
}

LossSamples LossSamples::group(const std::string& label) const {
  std::vector<double> picked;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i] == label) picked.push_back(values_[i]);
  }
  if (picked.empty()) throw ValidationError("group '" + label + "' has no samples");
  return LossSamples(std::move(picked), {}, support_max_, nonneg_);
}

LossSamples LossSamples::subset(std::span<const std::size_t> indices) const {
  std::vector<double> v;
  std::vector<std::string> g;
  v.reserve(indices.size());
  for (std::size_t i : indices) {
    v.push_back(values_.at(i));
    if (!groups_.empty()) g.push_back(groups_[i]);
  }
  return LossSamples(std::move(v), std::move(g), support_max_, nonneg_);
}

OrderStats::OrderStats(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw ValidationError("no samples");
  std::sort(sorted_.begin(), sorted_.end());
}

OrderStats order_statistics(const LossSamples& samples) { return OrderStats(samples.values()); }

}  // namespace dispcert
