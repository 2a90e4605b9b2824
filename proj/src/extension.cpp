#include "rweld/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rweld/error.hpp"

namespace rweld {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double clip_level = 1.0 - 1e-6;
constexpr cplx I{0.0, 1.0};

Dilatation make_dilatation(cplx dz, cplx dzbar) {
  if (!(std::abs(dz) > 1e-300)) throw NumericError("dilatation: |df/dz| underflow");
  Dilatation d;
  d.mu = dzbar / dz;
  double a = std::abs(d.mu);
  if (!std::isfinite(a)) throw NumericError("dilatation: non-finite mu");
  if (a >= clip_level) {
    d.mu *= clip_level / a;
    a = clip_level;
    d.clipped = true;
  }
  d.K = distortion_from_mu(a);
  return d;
}

}  // namespace

DiskExtension::DiskExtension(CircleHomeomorphism h) : h_(std::move(h)) {}

MapJet DiskExtension::half_plane(double x, double y) const {
  if (!(y > 0.0)) throw ArgumentError("half_plane: y must be positive");
  const auto right = h_.span(x, x + y);
  const auto left = h_.span(x - y, x);
  const double hx = h_.evaluate(x);

  const double ax = right.rise / y;
  const double bx = left.rise / y;
  const double ay = right.area_right / (y * y);
  const double by = -left.area_left / (y * y);
  const cplx fx{0.5 * (ax + bx), ax - bx};
  const cplx fy{0.5 * (ay + by), ay - by};

  MapJet jet;
  jet.value = cplx{hx + 0.5 * (right.area_left - left.area_right) / y,
                   (right.area_left + left.area_right) / y};
  jet.dz = 0.5 * (fx - I * fy);
  jet.dzbar = 0.5 * (fx + I * fy);
  return jet;
}

MapJet DiskExtension::disk(cplx w) const {
  const double r = std::abs(w);
  if (!(r > 0.0) || r >= 1.0) throw ArgumentError("disk: point must satisfy 0 < |w| < 1");
  const double x = std::arg(w) / two_pi;
  const double y = -std::log(r) / two_pi;
  const MapJet up = half_plane(x, y);
  MapJet jet;
  jet.value = std::exp(two_pi * I * up.value);
  // f = E o F o E^{-1} with E(z) = exp(2 pi i z): df/dw = f F_z / w,
  // df/dwbar = -f F_zbar / conj(w).
  jet.dz = jet.value * up.dz / w;
  jet.dzbar = -jet.value * up.dzbar / std::conj(w);
  return jet;
}

cplx DiskExtension::operator()(cplx w) const {
  const double r = std::abs(w);
  if (r == 0.0) return {0.0, 0.0};
  if (r >= 1.0 - 1e-15) {
    const double t = std::arg(w) / two_pi;
    return std::exp(two_pi * I * h_.evaluate(t));
  }
  return disk(w).value;
}

Dilatation DiskExtension::dilatation(cplx w) const {
  if (w == cplx{0.0, 0.0}) return {};
  const auto jet = disk(w);
  return make_dilatation(jet.dz, jet.dzbar);
}

double DiskExtension::distortion(cplx w) const {
  const double r = std::abs(w);
  if (r >= 1.0 || r == 0.0) return 1.0;
  return dilatation(w).K;
}

cplx DiskExtension::inverse(cplx w) const {
  const double r = std::abs(w);
  if (!(r > 0.0) || r >= 1.0) throw ArgumentError("inverse: point must satisfy 0 < |w| < 1");
  const double tx = std::arg(w) / two_pi;
  const double ty = -std::log(r) / two_pi;

  auto residual = [&](double x, double y, MapJet& jet) {
    jet = half_plane(x, y);
    double dr = jet.value.real() - tx;
    dr -= std::round(dr);
    return cplx{dr, jet.value.imag() - ty};
  };

  double x = h_.invert(tx);
  double y = ty;
  MapJet jet;
  cplx res = residual(x, y, jet);
  for (int iter = 0; iter < 500; ++iter) {
    if (std::abs(res) < 1e-14) return std::exp(two_pi * I * cplx{x, y});
    const cplx fx = jet.dz + jet.dzbar;
    const cplx fy = I * (jet.dz - jet.dzbar);
    const double det = fx.real() * fy.imag() - fy.real() * fx.imag();
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
    const double sx = (fy.imag() * res.real() - fy.real() * res.imag()) / det;
    const double sy = (-fx.imag() * res.real() + fx.real() * res.imag()) / det;
    // Backtrack until the residual decreases and y stays positive.
    double damp = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k, damp *= 0.5) {
      const double nx = x - damp * sx;
      const double ny = y - damp * sy;
      if (!(ny > 0.0)) continue;
      MapJet trial;
      const cplx r = residual(nx, ny, trial);
      if (std::abs(r) < std::abs(res)) {
        x = nx;
        y = ny;
        res = r;
        jet = trial;
        moved = true;
        break;
      }
    }
    if (!moved) {
      if (std::abs(res) < 1e-11) return std::exp(two_pi * I * cplx{x, y});
      break;
    }
  }
  throw NumericError("inverse: Newton iteration did not converge");
}

DiskExtension beurling_ahlfors_extend(const CircleHomeomorphism& h) {
  const auto& inc = h.increments();
  if (inc.empty()) throw ArgumentError("beurling_ahlfors_extend: empty homeomorphism");
  for (double v : inc) {
    if (!(v > 0.0)) throw ArgumentError("beurling_ahlfors_extend: degenerate homeomorphism");
  }
  return DiskExtension(h);
}

Dilatation dilatation_fd(const std::function<cplx(cplx)>& map, cplx z, double step) {
  if (!(step > 0.0)) throw ArgumentError("dilatation_fd: step must be positive");
  const cplx fx = (map(z + step) - map(z - step)) / (2.0 * step);
  const cplx fy = (map(z + I * step) - map(z - I * step)) / (2.0 * step);
  return make_dilatation(0.5 * (fx - I * fy), 0.5 * (fx + I * fy));
}

BeltramiField extension_field(const DiskExtension& ext, std::size_t side, double half_width) {
  const double h = Lattice{side, half_width}.step();
  return BeltramiField::sample(side, half_width, [&](cplx z) -> cplx {
    const double r = std::abs(z);
    if (r == 0.0) return {0.0, 0.0};
    // Within two steps of the circle mu is continued radially from the last
    // interior ring; the lattice cannot resolve it there.
    const double inner = 1.0 - 2.0 * h;
    const cplx p = r > inner ? z * (inner / r) : z;
    const auto jet = ext.disk(p);
    if (!(std::abs(jet.dz) > 1e-300)) return {std::numeric_limits<double>::infinity(), 0.0};
    return jet.dzbar / jet.dz;
  });
}

DyadicInterval as_dyadic(double a, double b) {
  if (!(b > a) || a < 0.0 || b > 1.0) throw ArgumentError("as_dyadic: need 0 <= a < b <= 1");
  const double len = b - a;
  const int level = static_cast<int>(std::lround(-std::log2(len)));
  if (std::ldexp(1.0, -level) != len) throw ArgumentError("as_dyadic: length is not 2^-k");
  const double idx = a / len;
  if (idx != std::floor(idx)) throw ArgumentError("as_dyadic: interval is not dyadic-aligned");
  return {level, static_cast<std::size_t>(idx)};
}

double whitney_distortion_bound(const ChaosMeasure& measure, const DyadicInterval& interval) {
  const std::size_t m = measure.grid_size();
  if (interval.level < 0 || interval.level + 4 > 62) {
    throw ArgumentError("whitney_distortion_bound: bad level");
  }
  const std::size_t pieces = std::size_t{1} << (interval.level + 4);
  if (pieces > m) throw ArgumentError("whitney_distortion_bound: subintervals below grid cells");
  const std::size_t count = std::size_t{1} << interval.level;
  if (interval.index >= count) throw ArgumentError("whitney_distortion_bound: index out of range");

  const std::size_t cells_per_piece = m / pieces;
  double sum = 0.0;
  double sum_inverse = 0.0;
  for (long offset = -1; offset <= 1; ++offset) {
    const std::size_t which =
        (interval.index + count + static_cast<std::size_t>(offset + static_cast<long>(count))) % count;
    for (std::size_t p = 0; p < 16; ++p) {
      const std::size_t first = (which * 16 + p) * cells_per_piece;
      double mass = 0.0;
      for (std::size_t c = 0; c < cells_per_piece; ++c) mass += measure.cell_masses[first + c];
      sum += mass;
      sum_inverse += 1.0 / mass;
    }
  }
  return sum * sum_inverse;
}

double whitney_box_max_distortion(const DiskExtension& ext, const DyadicInterval& interval,
                                  std::size_t samples_per_side) {
  const double len = interval.length();
  const double left = interval.left();
  double worst = 1.0;
  const auto n = static_cast<double>(samples_per_side);
  for (std::size_t p = 0; p < samples_per_side; ++p) {
    for (std::size_t q = 0; q < samples_per_side; ++q) {
      const double x = left + (static_cast<double>(p) + 0.5) / n * len;
      const double y = len * (0.5 + 0.5 * (static_cast<double>(q) + 0.5) / n);
      const cplx w = std::exp(two_pi * I * cplx{x, y});
      worst = std::max(worst, ext.distortion(w));
    }
  }
  return worst;
}

}  // namespace rweld
