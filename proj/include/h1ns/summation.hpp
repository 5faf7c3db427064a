#pragma once

#include <cmath>
#include <limits>

namespace h1ns {

/// Neumaier-compensated accumulator. Tracks the sum of absolute values so a
/// rigorous a-priori bound on the accumulated rounding error is available.
template <typename Real>
class CompensatedSum {
 public:
  void add(Real x) {
    const Real t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    abs_ += std::abs(x);
    ++count_;
  }

  CompensatedSum& operator+=(Real x) {
    add(x);
    return *this;
  }

  Real value() const { return sum_ + comp_; }
  Real abs_sum() const { return abs_; }
  long long count() const { return count_; }

  /// Bound on |value() - exact sum of the added terms|.
  Real error_bound() const {
    constexpr Real u = std::numeric_limits<Real>::epsilon() / 2;
    const Real n = static_cast<Real>(count_);
    return 2 * u * std::abs(value()) + 2 * n * n * u * u * abs_;
  }

 private:
  Real sum_{0};
  Real comp_{0};
  Real abs_{0};
  long long count_{0};
};

}  // namespace h1ns
