#pragma once

namespace dysonflow {

// Neumaier's variant of compensated summation; robust when a term exceeds the
// running sum in magnitude, which happens for the mixed-sign interaction sums.
class KahanSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace dysonflow
