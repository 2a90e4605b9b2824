#include "rweld/beltrami_field.hpp"

#include <algorithm>
#include <cmath>

#include "rweld/error.hpp"

namespace rweld {
namespace {

constexpr double clip_level = 1.0 - 1e-6;

struct Stencil {
  std::size_t a0, b0;
  double fx, fy;
};

Stencil locate(const Lattice& lat, cplx z) {
  const double h = lat.step();
  const double max_coord = static_cast<double>(lat.side - 1);
  const double u = std::clamp((z.real() + lat.half_width) / h, 0.0, max_coord);
  const double v = std::clamp((z.imag() + lat.half_width) / h, 0.0, max_coord);
  auto a0 = std::min(static_cast<std::size_t>(u), lat.side - 2);
  auto b0 = std::min(static_cast<std::size_t>(v), lat.side - 2);
  return {a0, b0, u - static_cast<double>(a0), v - static_cast<double>(b0)};
}

template <typename T>
T bilinear(const Lattice& lat, const std::vector<T>& values, cplx z) {
  if (lat.side < 2 || values.size() != lat.size()) {
    throw ArgumentError("lattice: value array does not match the lattice");
  }
  const auto s = locate(lat, z);
  const std::size_t g = lat.side;
  const T v00 = values[s.b0 * g + s.a0];
  const T v10 = values[s.b0 * g + s.a0 + 1];
  const T v01 = values[(s.b0 + 1) * g + s.a0];
  const T v11 = values[(s.b0 + 1) * g + s.a0 + 1];
  return (1.0 - s.fy) * ((1.0 - s.fx) * v00 + s.fx * v10) + s.fy * ((1.0 - s.fx) * v01 + s.fx * v11);
}

}  // namespace

cplx Lattice::interpolate(const std::vector<cplx>& values, cplx z) const {
  return bilinear(*this, values, z);
}

double Lattice::interpolate(const std::vector<double>& values, cplx z) const {
  return bilinear(*this, values, z);
}

BeltramiField BeltramiField::zero(std::size_t side, double half_width) {
  if (side < 4) throw ConfigError("beltrami field: lattice side too small");
  if (!(half_width > 1.0)) throw ConfigError("beltrami field: half width must exceed 1");
  BeltramiField f;
  f.lattice = Lattice{side, half_width};
  f.mu.assign(side * side, cplx{0.0, 0.0});
  return f;
}

BeltramiField BeltramiField::sample(std::size_t side, double half_width,
                                    const std::function<cplx(cplx)>& mu_fn) {
  auto f = zero(side, half_width);
  for (std::size_t i = 0; i < f.lattice.size(); ++i) {
    const cplx z = f.lattice.point(i);
    if (std::norm(z) > 1.0) continue;
    cplx m = mu_fn(z);
    const double a = std::abs(m);
    if (!std::isfinite(a)) {
      m = cplx{clip_level, 0.0};
      ++f.clipped;
    } else if (a >= clip_level) {
      m *= clip_level / a;
      ++f.clipped;
    }
    f.mu[i] = m;
  }
  return f;
}

double BeltramiField::sup_abs() const noexcept {
  double s = 0.0;
  for (const auto& m : mu) s = std::max(s, std::abs(m));
  return s;
}

double BeltramiField::l2_norm() const noexcept {
  double s = 0.0;
  for (const auto& m : mu) s += std::norm(m);
  return std::sqrt(s);
}

double BeltramiField::distortion_at(cplx z) const {
  if (std::norm(z) > 1.0) return 1.0;
  const double lim = lattice.half_width - lattice.step();
  if (std::abs(z.real()) > lim || std::abs(z.imag()) > lim) return 1.0;
  // Interpolating |mu| directly keeps K >= 1.
  const auto s = lattice.step();
  const double u = (z.real() + lattice.half_width) / s;
  const double v = (z.imag() + lattice.half_width) / s;
  const auto a0 = static_cast<std::size_t>(u);
  const auto b0 = static_cast<std::size_t>(v);
  const double fx = u - static_cast<double>(a0);
  const double fy = v - static_cast<double>(b0);
  const std::size_t g = lattice.side;
  const double m00 = std::abs(mu[b0 * g + a0]);
  const double m10 = std::abs(mu[b0 * g + a0 + 1]);
  const double m01 = std::abs(mu[(b0 + 1) * g + a0]);
  const double m11 = std::abs(mu[(b0 + 1) * g + a0 + 1]);
  const double m = (1.0 - fy) * ((1.0 - fx) * m00 + fx * m10) + fy * ((1.0 - fx) * m01 + fx * m11);
  return distortion_from_mu(std::min(m, clip_level));
}

BeltramiField truncate(const BeltramiField& field, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("truncate: eps must lie in (0, 1)");
  BeltramiField out = field;
  for (auto& m : out.mu) m *= (1.0 - eps);
  return out;
}

}  // namespace rweld
