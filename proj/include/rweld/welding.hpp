#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rweld/beltrami.hpp"
#include "rweld/extension.hpp"
#include "rweld/homeo.hpp"

namespace rweld {

struct WeldOptions {
  SolverConfig solver;
  std::size_t curve_samples = 4096;
  double max_clipped_fraction = 1e-3;  // of lattice points inside the disk
};

struct WeldMetadata {
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::size_t circle_cells = 0;
};

struct WeldingResult {
  DiskExtension extension;
  BeltramiField mu;           // truncated dilatation fed to the solver
  PlanarMap map;              // principal solution F
  std::vector<double> params; // t_j = j / N
  std::vector<cplx> curve;    // F(exp(2 pi i t_j)), N + 1 points, last = first
  WeldOptions options;
  WeldMetadata metadata;
  double conformality = 0.0;  // median |F_zbar|/|F_z| outside the disk
  std::size_t disk_points = 0;
  bool simple = true;
  std::vector<std::string> flags;

  bool flagged() const noexcept { return !flags.empty(); }

  /// f_- : F restricted to the exterior of the disk.
  cplx exterior_map(cplx z) const;
  /// f_+ = F o f^{-1} on the disk.
  cplx interior_map(cplx w) const;
};

/// h -> Beurling-Ahlfors extension -> truncated mu -> principal solution ->
/// curve. Solver failures propagate; a non-simple curve, negative Jacobians
/// or excessive clipping flag the result.
WeldingResult weld(const CircleHomeomorphism& h, const WeldOptions& opts, WeldMetadata meta = {});

/// Median of |dbar g|/|d g| for g = F o f^{-1} over a polar grid in
/// inner <= |w| <= outer, given the exact jet of f, its inverse and F.
double welding_defect(const std::function<MapJet(cplx)>& f_jet,
                      const std::function<cplx(cplx)>& f_inverse, const PlanarMap& F,
                      double inner = 0.3, double outer = 0.8);

/// welding_defect for a pipeline result. Throws ArgumentError if the result
/// is flagged.
double verify_welding(const WeldingResult& result);

struct EpsilonStudy {
  std::vector<double> eps;
  std::vector<double> distances;  // Hausdorff distance between curves eps[i], eps[i+1]
  std::vector<std::vector<cplx>> curves;
};

/// Welds h for each eps (strictly decreasing) and measures consecutive
/// Hausdorff distances. Throws if any weld is flagged.
EpsilonStudy epsilon_convergence(const CircleHomeomorphism& h, const std::vector<double>& eps,
                                 const WeldOptions& opts);

/// Dyadic increment regression of t -> F(exp(2 pi i t)) along the curve.
double curve_holder_exponent(const WeldingResult& result, int depth, HolderOptions opts = {4});

/// Symmetric discrete Hausdorff distance between two point sets.
double hausdorff_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Closed polygon through the points (the last point joins the first; a
/// repeated closing point is ignored) has no crossing between
/// non-adjacent edges. Shamos-Hoey sweep.
bool is_simple_polygon(const std::vector<cplx>& points);

/// Points on the unit circle at t_j = j/n, j = 0..n (closed).
std::vector<cplx> unit_circle(std::size_t n);

}  // namespace rweld
