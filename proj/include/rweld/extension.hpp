#pragma once

#include <complex>
#include <cstddef>
#include <functional>

#include "rweld/beltrami_field.hpp"
#include "rweld/chaos.hpp"
#include "rweld/homeo.hpp"

namespace rweld {

/// Value and first derivatives of a planar map at a point.
struct MapJet {
  cplx value;
  cplx dz;     // df/dz
  cplx dzbar;  // df/dzbar

  cplx mu() const { return dzbar / dz; }
  double jacobian() const { return std::norm(dz) - std::norm(dzbar); }
};

struct Dilatation {
  cplx mu;
  double K = 1.0;
  bool clipped = false;
};

/// Self-map of the unit disk extending a circle homeomorphism.
///
/// The lift H of h (H(x + 1) = H(x) + 1) is extended to the upper half-plane
/// by Beurling-Ahlfors,
///   a(x, y) = (1/y) int_x^{x+y} H,  b(x, y) = (1/y) int_{x-y}^x H,
///   F(x + iy) = (a + b)/2 + i (a - b),
/// which commutes with x -> x + 1. The covering map z -> exp(2 pi i z) then
/// carries F to f on the disk, f(exp(2 pi i z)) = exp(2 pi i F(z)), so that
/// f(e^{2 pi i t}) = e^{2 pi i h(t)}. All integrals are exact for the
/// piecewise-linear lift, and derivatives are taken from the closed forms.
class DiskExtension {
 public:
  explicit DiskExtension(CircleHomeomorphism h);

  const CircleHomeomorphism& homeo() const noexcept { return h_; }

  /// Upper half-plane extension at x + iy, y > 0, with exact derivatives.
  MapJet half_plane(double x, double y) const;

  /// f(w) and its derivatives for |w| < 1 (w = 0 maps to 0 with zero jet
  /// derivatives undefined; use dilatation() which returns mu = 0 there).
  MapJet disk(cplx w) const;

  /// f(w) for |w| <= 1; the boundary value is exp(2 pi i h(arg w / 2 pi)).
  cplx operator()(cplx w) const;

  /// Exact dilatation of f at w (|w| < 1). Throws NumericError when |df/dz|
  /// underflows; |mu| >= 1 is clipped to 1 - 1e-6 and flagged.
  Dilatation dilatation(cplx w) const;

  /// Distortion K of f, 1 outside the open unit disk.
  double distortion(cplx w) const;

  /// f^{-1}(w) by damped Newton on the half-plane map; throws NumericError on
  /// failure.
  cplx inverse(cplx w) const;

 private:
  CircleHomeomorphism h_;
};

DiskExtension beurling_ahlfors_extend(const CircleHomeomorphism& h);

/// Centered finite-difference dilatation of an arbitrary map at z with the
/// given step. |df/dz| below 1e-300 throws NumericError; |mu| >= 1 is clipped
/// to 1 - 1e-6 and flagged.
Dilatation dilatation_fd(const std::function<cplx(cplx)>& map, cplx z, double step);

/// mu of f sampled on the lattice of side G over [-S, S)^2, masked to the
/// closed unit disk. Points within two lattice steps of the unit circle take
/// the value at radius 1 - 2h on the same ray.
BeltramiField extension_field(const DiskExtension& ext, std::size_t side, double half_width);

/// Dyadic interval [index 2^-level, (index + 1) 2^-level).
struct DyadicInterval {
  int level = 0;
  std::size_t index = 0;

  double length() const noexcept { return std::ldexp(1.0, -level); }
  double left() const noexcept { return static_cast<double>(index) * length(); }
};

/// Parses [a, b) as a dyadic interval; throws ArgumentError if it is not one.
DyadicInterval as_dyadic(double a, double b);

/// sum over ordered pairs (J, J') of tau(J)/tau(J'), where J and J' run over
/// the 48 dyadic subintervals of length |I|/16 in I and its two dyadic
/// neighbours (cyclically). Requires |I|/16 to be at least one grid cell.
double whitney_distortion_bound(const ChaosMeasure& measure, const DyadicInterval& interval);

/// max of K_f over an n x n sample of the Whitney box of I: lifted points
/// x in I, y in [|I|/2, |I|], mapped to the disk by exp(2 pi i (x + iy)).
double whitney_box_max_distortion(const DiskExtension& ext, const DyadicInterval& interval,
                                  std::size_t samples_per_side = 8);

}  // namespace rweld
