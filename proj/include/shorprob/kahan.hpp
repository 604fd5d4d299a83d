#pragma once

#include <cmath>

namespace shorprob {

/// Neumaier's variant of compensated summation. Terms are added in call
/// order, so a fixed iteration order gives a bit-reproducible result.
template <class T = double>
class KahanSum {
 public:
  constexpr KahanSum() = default;
  constexpr explicit KahanSum(T init) : sum_(init) {}

  constexpr KahanSum& operator+=(T x) noexcept {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  constexpr T value() const noexcept { return sum_ + comp_; }
  constexpr explicit operator T() const noexcept { return value(); }

 private:
  T sum_{0};
  T comp_{0};
};

template <class Range>
double kahan_total(const Range& values) {
  KahanSum<double> acc;
  for (double v : values) acc += v;
  return acc.value();
}

}  // namespace shorprob
