#pragma once

#include <span>
#include <utility>

namespace rweld::stats {

struct Summary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
  std::size_t count = 0;
};

Summary summarize(std::span<const double> xs);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for `hits` successes out of `trials`, z = 1.96 by default.
Interval wilson(std::size_t hits, std::size_t trials, double z = 1.96);

/// Pearson correlation; returns 0 when either series is constant.
double correlation(std::span<const double> x, std::span<const double> y);

/// Large-sample standard error of a Pearson correlation r estimated from n pairs.
double correlation_std_error(double r, std::size_t n);

}  // namespace rweld::stats
