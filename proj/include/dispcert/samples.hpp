#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dispcert {

// A finite multiset of losses with optional per-value group labels.
class LossSamples {
 public:
  // Throws ValidationError when values is empty, holds a non-finite entry,
  // violates the nonneg flag, or exceeds support_max.
  explicit LossSamples(std::vector<double> values,
                       std::vector<std::string> groups = {},
                       std::optional<double> support_max = std::nullopt,
                       bool nonneg = false);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& groups() const { return groups_; }
  bool has_groups() const { return !groups_.empty(); }
  std::optional<double> support_max() const { return support_max_; }
  bool nonneg() const { return nonneg_; }

  // Sorted, distinct group labels.
  std::vector<std::string> group_labels() const;
  // The values carrying `label`, keeping support_max and nonneg.
  LossSamples group(const std::string& label) const;
  // Subset by index, keeping group labels, support_max and nonneg.
  LossSamples subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> values_;
  std::vector<std::string> groups_;
  std::optional<double> support_max_;
  bool nonneg_;
};

class OrderStats {
 public:
  OrderStats() = default;
  // Sorts the input; throws ValidationError("no samples") when empty.
  explicit OrderStats(std::vector<double> values);

  std::size_t n() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }
  // One-based access matching X_(i).
  double operator()(std::size_t i) const { return sorted_[i - 1]; }

 private:
  std::vector<double> sorted_;
};

OrderStats order_statistics(const LossSamples& samples);

}  // namespace dispcert
