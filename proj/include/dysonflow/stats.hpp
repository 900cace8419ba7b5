#pragma once

#include <span>
#include <vector>

namespace dysonflow {

double mean(std::span<const double> v);
// Unbiased sample variance; 0 for fewer than two values.
double variance(std::span<const double> v);
double median(std::vector<double> v);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least-squares line through (x, y).
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Trapezoid rule on a (possibly non-uniform) grid.
double trapezoid(std::span<const double> t, std::span<const double> f);

}  // namespace dysonflow
