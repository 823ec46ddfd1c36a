#pragma once

namespace dispcert {

// A certified range [lo, hi]; endpoints may be infinite when unbounded.
struct ValueInterval {
  double lo;
  double hi;

  double width() const { return hi - lo; }
  bool operator==(const ValueInterval&) const = default;
};

// Throws ValidationError when lo > hi or either endpoint is NaN.
ValueInterval make_interval(double lo, double hi);

}  // namespace dispcert
