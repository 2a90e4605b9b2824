#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace rweld {

using cplx = std::complex<double>;

/// Square lattice of side G over [-S, S)^2: point (a, b) is
/// (-S + a h) + i(-S + b h) with h = 2S/G, stored row-major at b * G + a.
struct Lattice {
  std::size_t side = 0;
  double half_width = 2.0;

  double step() const noexcept { return 2.0 * half_width / static_cast<double>(side); }
  std::size_t size() const noexcept { return side * side; }
  cplx point(std::size_t a, std::size_t b) const noexcept {
    const double h = step();
    return {-half_width + static_cast<double>(a) * h, -half_width + static_cast<double>(b) * h};
  }
  cplx point(std::size_t index) const noexcept { return point(index % side, index / side); }

  /// Bilinear interpolation of lattice values at z; z is clamped into the
  /// lattice's closed bounding box.
  cplx interpolate(const std::vector<cplx>& values, cplx z) const;
  double interpolate(const std::vector<double>& values, cplx z) const;
};

/// Dilatation mu on a lattice, supported in the closed unit disk, with the
/// distortion K = (1 + |mu|)/(1 - |mu|).
struct BeltramiField {
  Lattice lattice;
  std::vector<cplx> mu;
  std::size_t clipped = 0;  // lattice points where |mu| had to be clipped below 1

  static BeltramiField zero(std::size_t side, double half_width);

  /// Samples mu_fn at every lattice point of the closed unit disk; zero
  /// elsewhere. Values with |mu| >= 1 (or non-finite) are clipped to
  /// 1 - 1e-6 and counted.
  static BeltramiField sample(std::size_t side, double half_width,
                              const std::function<cplx(cplx)>& mu_fn);

  double sup_abs() const noexcept;
  double l2_norm() const noexcept;

  /// K at an arbitrary point from bilinear interpolation of |mu|; 1 off the
  /// support and outside the lattice.
  double distortion_at(cplx z) const;
};

inline double distortion_from_mu(double abs_mu) { return (1.0 + abs_mu) / (1.0 - abs_mu); }

/// Multiplies mu by (1 - eps); 0 < eps < 1.
BeltramiField truncate(const BeltramiField& field, double eps);

}  // namespace rweld
