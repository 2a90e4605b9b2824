#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rweld/beltrami_field.hpp"

namespace rweld {

struct SolverConfig {
  std::size_t side = 1024;   // lattice side G, power of two
  double half_width = 2.0;   // S
  double eps = 0.05;         // truncation, mu -> (1 - eps) mu
  double tol = 1e-8;         // stop when |phi_{m+1} - phi_m| <= tol |mu|
  std::size_t max_iterations = 5000;
  bool renormalize = true;   // enforce F(z) = z + O(1/z) from a Laurent fit

  /// Throws ConfigError on an invalid combination.
  void validate() const;
};

/// Periodic Beurling transform on the lattice: multiplier conj(xi)/xi with
/// xi = kx + i ky, zero at the zero frequency. Throws ConfigError if the
/// array is not side x side.
std::vector<cplx> beurling_transform(const Lattice& lattice, std::span<const cplx> field);

/// Zero-mean periodic solution u of dbar u = field - mean(field).
std::vector<cplx> periodic_cauchy_transform(const Lattice& lattice, std::span<const cplx> field);

/// Plane Cauchy transform (1/pi) int field(zeta)/(z - zeta) dA(zeta) of a
/// field supported in the closed unit disk, evaluated on the lattice. The
/// periodic solution is corrected for the images of the support with the
/// square-lattice Eisenstein series.
std::vector<cplx> cauchy_transform(const Lattice& lattice, std::span<const cplx> field);

/// Plane Beurling transform (d/dz of cauchy_transform) of a disk-supported field.
std::vector<cplx> plane_beurling_transform(const Lattice& lattice, std::span<const cplx> field);

struct SolverDiagnostics {
  std::size_t iterations = 0;
  std::vector<double> history;   // |phi_{m+1} - phi_m|_2 per iteration
  double residual = 0.0;         // |F_zbar - mu F_z|_2 on the lattice
  double mu_norm = 0.0;          // |mu|_2 on the lattice
  double mu_sup = 0.0;
  std::size_t jacobian_failures = 0;
  std::size_t folded_cells = 0;
  cplx offset{0.0, 0.0};         // Laurent fit F ~ scale z + offset before renormalizing
  cplx scale{1.0, 0.0};

  /// Largest ratio of successive history entries after the first `skip`.
  double contraction_ratio(std::size_t skip = 1) const;
};

/// Homeomorphism of the plane sampled on a lattice together with
/// finite-difference derivative grids.
class PlanarMap {
 public:
  PlanarMap() = default;

  /// Samples an explicit map (values and centered differences).
  static PlanarMap from_function(const Lattice& lattice, const std::function<cplx(cplx)>& map);
  /// Wraps lattice values; derivative grids are recomputed.
  static PlanarMap from_values(const Lattice& lattice, std::vector<cplx> values);
  static PlanarMap identity(const Lattice& lattice);

  const Lattice& lattice() const noexcept { return lattice_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  const std::vector<cplx>& dz_grid() const noexcept { return dz_; }
  const std::vector<cplx>& dzbar_grid() const noexcept { return dzbar_; }
  const SolverDiagnostics& diagnostics() const noexcept { return diag_; }
  SolverDiagnostics& diagnostics() noexcept { return diag_; }

  /// Bilinear interpolation; outside the lattice box F(z) ~ z + (F - id) at
  /// the nearest box point.
  cplx operator()(cplx z) const;
  cplx dz_at(cplx z) const;
  cplx dzbar_at(cplx z) const;

  /// a F + b.
  PlanarMap affine(cplx a, cplx b) const;

  /// Coefficients (scale, offset) of F(z) = scale z + offset + O(1/z) from
  /// the Laurent series on the circle |z| = radius.
  std::pair<cplx, cplx> laurent_affine(double radius) const;

  /// (F - offset)/scale so that F(z) = z + O(1/z).
  PlanarMap renormalized() const;

  /// Interior lattice points where the centered-difference Jacobian
  /// |F_z|^2 - |F_zbar|^2 is not positive. Points with ||z| - 1| <= ring are
  /// skipped: there the stencil straddles the jump of mu at the circle.
  std::size_t count_jacobian_failures(double ring = 0.0) const;

  /// Lattice cells whose image under the piecewise-linear interpolant is not
  /// positively oriented (either triangle of the cell split along its
  /// diagonal has non-positive signed area). Stricter than the Jacobian
  /// test where |mu| is close to 1.
  std::size_t count_folded_cells() const;

 private:
  PlanarMap(Lattice lattice, std::vector<cplx> values);
  void differentiate();

  Lattice lattice_;
  std::vector<cplx> values_;
  std::vector<cplx> dz_;
  std::vector<cplx> dzbar_;
  SolverDiagnostics diag_;
};

/// Default Laurent-fit radius: between the unit disk and the box edge.
double normalization_radius(const Lattice& lattice) noexcept;

/// Principal solution of dbar F = mu dF by Neumann iteration
///   phi_{m+1} = mu (S phi_m) + mu,  F = z + C phi.
/// mu must already be truncated (sup |mu| < 1). Throws ConvergenceError with
/// the history if the tolerance is not reached.
PlanarMap solve(const BeltramiField& mu, const SolverConfig& cfg);

struct ConformalityResidual {
  double median = 0.0;
  std::size_t points = 0;
  std::size_t skipped = 0;  // |F_z| underflow
};

/// Median of |F_zbar|/|F_z| (finite differences) over lattice points with
/// inner <= |z| <= outer.
ConformalityResidual conformality_residual(const PlanarMap& map, double inner = 1.05,
                                           double outer = 1.8);

}  // namespace rweld
