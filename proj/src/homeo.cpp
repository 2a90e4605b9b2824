#include "rweld/homeo.hpp"

#include <algorithm>
#include <cmath>

#include "rweld/error.hpp"
#include "rweld/stats.hpp"

namespace rweld {
namespace {

// Spans shorter than this many cells are accumulated cell by cell.
constexpr double walk_limit_cells = 512.0;

std::size_t wrap_index(long long cell, std::size_t m) {
  const auto mm = static_cast<long long>(m);
  long long r = cell % mm;
  if (r < 0) r += mm;
  return static_cast<std::size_t>(r);
}

}  // namespace

CircleHomeomorphism CircleHomeomorphism::from_increments(std::vector<double> increments) {
  if (increments.empty()) throw ArgumentError("homeo: no cells");
  double total = 0.0;
  for (double v : increments) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw NumericError("homeo: cell increments must be positive and finite");
    }
    total += v;
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericError("homeo: zero total mass");
  for (double& v : increments) v /= total;
  CircleHomeomorphism h;
  h.increments_ = std::move(increments);
  h.build_tables();
  return h;
}

CircleHomeomorphism CircleHomeomorphism::from_knots(const std::vector<double>& knots) {
  if (knots.size() < 2) throw ArgumentError("homeo: need at least two knots");
  if (knots.front() != 0.0 || knots.back() != 1.0) {
    throw ArgumentError("homeo: knots must start at 0 and end at 1");
  }
  std::vector<double> inc(knots.size() - 1);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) inc[i] = knots[i + 1] - knots[i];
  return from_increments(std::move(inc));
}

CircleHomeomorphism CircleHomeomorphism::identity(std::size_t cells) {
  return from_increments(std::vector<double>(cells, 1.0));
}

CircleHomeomorphism CircleHomeomorphism::rotation(std::size_t cells, double c) {
  auto h = identity(cells);
  h.shift_ = c;
  return h;
}

void CircleHomeomorphism::build_tables() {
  const std::size_t m = increments_.size();
  slope_scale_ = static_cast<double>(m);
  knots_.assign(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) knots_[i + 1] = knots_[i] + increments_[i];
  knots_[m] = 1.0;
  area_.assign(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    area_[i + 1] = area_[i] + 0.5 * (knots_[i] + knots_[i + 1]) / slope_scale_;
  }
}

double CircleHomeomorphism::evaluate(double t) const {
  const double n = std::floor(t);
  const double pos = (t - n) * slope_scale_;
  auto i = static_cast<std::size_t>(pos);
  if (i >= cells()) i = cells() - 1;
  const double frac = pos - static_cast<double>(i);
  return n + knots_[i] + frac * increments_[i] + shift_;
}

double CircleHomeomorphism::invert(double s) const {
  const double v0 = s - shift_;
  const double n = std::floor(v0);
  const double v = v0 - n;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), v);
  std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (i >= cells()) i = cells() - 1;
  const double frac = std::clamp((v - knots_[i]) / increments_[i], 0.0, 1.0);
  return n + (static_cast<double>(i) + frac) / slope_scale_;
}

double CircleHomeomorphism::integral(double x) const {
  const double n = std::floor(x);
  const double u = x - n;
  const double pos = u * slope_scale_;
  auto i = static_cast<std::size_t>(pos);
  if (i >= cells()) i = cells() - 1;
  const double frac = pos - static_cast<double>(i);
  const double within = (knots_[i] * frac + 0.5 * increments_[i] * frac * frac) / slope_scale_;
  const double base = n * area_[cells()] + 0.5 * n * (n - 1.0) + area_[i] + within + n * u;
  return base + shift_ * x;
}

CircleHomeomorphism::SpanMoments CircleHomeomorphism::span(double a, double b) const {
  SpanMoments out;
  if (b <= a) return out;
  const double width = b - a;
  if (width * slope_scale_ > walk_limit_cells) {
    const double ha = evaluate(a);
    const double hb = evaluate(b);
    const double area = integral(b) - integral(a);
    out.rise = hb - ha;
    out.area_left = area - ha * width;
    out.area_right = hb * width - area;
    return out;
  }
  // With h' = slope on each piece [s, e]:
  //   area_left  = sum slope * integral of (b - u) du
  //   area_right = sum slope * integral of (u - a) du
  auto cell = static_cast<long long>(std::floor(a * slope_scale_));
  double s = a;
  while (s < b) {
    const double e = std::min(b, static_cast<double>(cell + 1) / slope_scale_);
    const double w = e - s;
    if (w > 0.0) {
      const double slope = increments_[wrap_index(cell, cells())] * slope_scale_;
      out.rise += slope * w;
      out.area_left += slope * w * ((b - s) + (b - e)) * 0.5;
      out.area_right += slope * w * ((s - a) + (e - a)) * 0.5;
    }
    s = e;
    ++cell;
  }
  return out;
}

CircleHomeomorphism build_homeo(const ChaosMeasure& measure) {
  if (!(measure.total_mass > 0.0)) throw NumericError("build_homeo: zero total mass");
  return CircleHomeomorphism::from_increments(measure.cell_masses);
}

double holder_exponent(const CircleHomeomorphism& h, int depth, HolderOptions opts) {
  if (depth < opts.min_level + 1) throw ArgumentError("holder_exponent: need at least two levels");
  if (depth > 62 || (std::size_t{1} << depth) > h.cells()) {
    throw ArgumentError("holder_exponent: depth too large for the grid");
  }
  const auto& knots = h.knots();
  std::vector<double> levels, logs;
  for (int j = opts.min_level; j <= depth; ++j) {
    const std::size_t count = std::size_t{1} << j;
    const std::size_t stride = h.cells() / count;
    double biggest = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      biggest = std::max(biggest, knots[(i + 1) * stride] - knots[i * stride]);
    }
    levels.push_back(static_cast<double>(j));
    logs.push_back(-std::log2(biggest));
  }
  return stats::least_squares(levels, logs).slope;
}

double holder_exponent_samples(const std::vector<double>& xs, const std::vector<double>& ys,
                               int depth, HolderOptions opts) {
  const std::size_t n = xs.size();
  if (ys.size() != n || n == 0 || (n & (n - 1)) != 0) {
    throw ArgumentError("holder_exponent_samples: need 2^K paired samples");
  }
  if (depth < opts.min_level + 1) throw ArgumentError("holder_exponent: need at least two levels");
  if (depth > 62 || (std::size_t{1} << depth) > n) {
    throw ArgumentError("holder_exponent: depth too large for the sampling");
  }
  std::vector<double> levels, logs;
  for (int j = opts.min_level; j <= depth; ++j) {
    const std::size_t count = std::size_t{1} << j;
    const std::size_t stride = n / count;
    double biggest = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t a = i * stride;
      const std::size_t b = ((i + 1) * stride) % n;
      biggest = std::max(biggest, std::hypot(xs[b] - xs[a], ys[b] - ys[a]));
    }
    if (!(biggest > 0.0)) throw NumericError("holder_exponent: degenerate samples");
    levels.push_back(static_cast<double>(j));
    logs.push_back(-std::log2(biggest));
  }
  return stats::least_squares(levels, logs).slope;
}

}  // namespace rweld
