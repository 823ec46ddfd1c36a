#pragma once

#include <limits>
#include <span>
#include <vector>

namespace dispcert {

// Right-continuous nondecreasing step function with values in [0,1].
//
// The value is level_before on (-inf, x_1) and levels[j] on [x_j, x_{j+1}).
// The function is closed when its last level equals 1; otherwise it stays
// below 1 on every finite x and the terminal jump sits at +inf.
//
// Construction canonicalizes: levels are clipped into [0,1] when they stray
// by at most 1e-12, and breakpoints whose level equals the previous one are
// dropped so two functions are equal iff their representations are.
class StepCdf {
 public:
  StepCdf() = default;
  StepCdf(double level_before, std::vector<double> breakpoints, std::vector<double> levels);

  double operator()(double x) const;

  double level_before() const { return level_before_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& levels() const { return levels_; }
  double last_level() const { return levels_.empty() ? level_before_ : levels_.back(); }
  bool closed() const { return last_level() >= 1.0; }

  bool operator==(const StepCdf&) const = default;

 private:
  double level_before_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<double> levels_;
};

// inf{x : cdf(x) >= p} for p in (0,1]. Returns -inf when level_before >= p and
// +inf when the function is open and p exceeds its last level.
double step_inverse(const StepCdf& cdf, double p);

// The generalized inverse as a list of constant pieces: value on (p_lo, p_hi].
struct QuantilePiece {
  double p_lo;
  double p_hi;
  double value;
};

// Pieces cover (0,1] in order; zero-width pieces are omitted.
std::vector<QuantilePiece> quantile_pieces(const StepCdf& cdf);

// Merges the breakpoints of two piece lists over (0,1]; each merged piece
// carries the value of `a` in `value` and the value of `b` in `other`.
struct MergedPiece {
  double p_lo;
  double p_hi;
  double a;
  double b;
};
std::vector<MergedPiece> merge_pieces(std::span<const QuantilePiece> a,
                                      std::span<const QuantilePiece> b);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace dispcert
