#pragma once

#include <cstddef>
#include <vector>

#include "rweld/chaos.hpp"

namespace rweld {

/// Piecewise-linear increasing map of [0, 1] onto itself with h(0) = 0 and
/// h(1) = 1, extended to R by h(t + 1) = h(t) + 1.
///
/// Besides the knots h(i/M) the per-cell increments are stored; local
/// differences and integrals are accumulated from the increments so that very
/// small cells (rough measures on fine grids) are not lost to cancellation.
class CircleHomeomorphism {
 public:
  CircleHomeomorphism() = default;

  /// From positive cell increments; they are normalized to sum to one.
  static CircleHomeomorphism from_increments(std::vector<double> increments);

  /// From knots h(0) = 0 < h(1/M) < ... < h(1) = 1.
  static CircleHomeomorphism from_knots(const std::vector<double>& knots);

  static CircleHomeomorphism identity(std::size_t cells);

  /// Lift x -> x + c (mod the grid: rotation by c on the circle).
  static CircleHomeomorphism rotation(std::size_t cells, double c);

  std::size_t cells() const noexcept { return increments_.size(); }
  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& increments() const noexcept { return increments_; }

  /// Lifted evaluation: any real t, with h(t + n) = h(t) + n.
  double evaluate(double t) const;

  /// Lifted inverse: any real s.
  double invert(double s) const;

  /// Integral of the lift over [0, x] for any real x.
  double integral(double x) const;

  /// Moments of the lift over [a, b], a <= b:
  ///   rise       = h(b) - h(a)
  ///   area_left  = integral of h(s) - h(a) over [a, b]
  ///   area_right = integral of h(b) - h(s) over [a, b]
  /// Short spans are accumulated cell by cell from non-negative terms.
  struct SpanMoments {
    double rise = 0.0;
    double area_left = 0.0;
    double area_right = 0.0;
  };
  SpanMoments span(double a, double b) const;

 private:
  void build_tables();

  std::vector<double> increments_;  // sum to 1
  std::vector<double> knots_;       // M + 1 entries
  std::vector<double> area_;        // integral of h over [0, i/M]
  double slope_scale_ = 0.0;        // M
  double shift_ = 0.0;              // constant added to the lift (rotations)
};

/// h(t) = tau([0, t)) / tau([0, 1)). Throws NumericError for zero total mass
/// or a non-positive cell.
CircleHomeomorphism build_homeo(const ChaosMeasure& measure);

struct HolderOptions {
  int min_level = 1;
};

/// Least-squares slope of -log2 max_i |h((i+1)2^-j) - h(i 2^-j)| against the
/// level j over min_level <= j <= depth. Throws ArgumentError when 2^depth
/// exceeds the grid.
double holder_exponent(const CircleHomeomorphism& h, int depth, HolderOptions opts = {});

/// Same estimator for a sampled closed curve (or any sequence) given at 2^K
/// equispaced parameters; increments are Euclidean distances.
double holder_exponent_samples(const std::vector<double>& xs, const std::vector<double>& ys,
                               int depth, HolderOptions opts = {});

}  // namespace rweld
