#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "rweld/beltrami_field.hpp"
#include "rweld/stats.hpp"

namespace rweld {

/// A(w, r, R) = { z : r < |z - w| < R }.
struct Annulus {
  cplx center{1.0, 0.0};
  double inner = 0.5;
  double outer = 1.0;

  void validate() const;
};

using DistortionFn = std::function<double(cplx)>;

struct LehtoEstimate {
  double value = 0.0;
  std::size_t n_rho = 0;
  std::size_t n_theta = 0;
  double error = 0.0;        // |value - value at half the nodes in each direction|
  std::size_t dropped = 0;   // nodes with non-finite K
  bool valid = true;         // false when more than 1% of nodes were dropped
};

/// L(w, r, R) = int_r^R [int_0^{2 pi} K(w + rho e^{i theta}) d theta]^{-1} d rho / rho
/// with the trapezoid rule in log rho (n_rho intervals) and the periodic
/// trapezoid rule in theta (n_theta nodes). n_rho and n_theta must be even.
LehtoEstimate lehto_integral(const DistortionFn& K, const Annulus& ann, std::size_t n_rho = 128,
                             std::size_t n_theta = 256);

/// L_k on A(w, rho^k, 2 rho^k), rho = 2^-p, for k = 1..N.
std::vector<LehtoEstimate> annulus_decomposition(const DistortionFn& K, cplx w, int p, int N,
                                                 std::size_t n_rho = 32, std::size_t n_theta = 256);

struct LehtoQuadrature {
  std::size_t nodes_per_octave = 8;  // radial intervals per factor 2 in rho
  std::size_t n_theta = 128;
};

/// Per-sample quantities of one pipeline draw at w = 1: the integrals over
/// [rho^k, rho^{k-1}] (their partial sums give L(1, 2^{-Np}, 1)) and L_k.
struct LehtoSample {
  std::vector<double> segment;  // k = 1..N
  std::vector<double> lk;       // k = 1..N
  double total(std::size_t n) const;
};

/// Pipeline: field (modes = grid/2) -> measure -> h -> Beurling-Ahlfors
/// extension -> K, for sample seeds seed, seed + 1, ...
struct LehtoStudyConfig {
  double beta = 1.0;
  int p = 3;
  int n_max = 5;
  std::size_t samples = 10000;
  std::size_t grid_size = std::size_t{1} << 20;  // coarser grids bias L_k upward
  std::uint64_t seed = 1;
  cplx center{1.0, 0.0};
  LehtoQuadrature quadrature;
  unsigned workers = 0;

  void validate() const;
};

/// One pipeline draw evaluated with the study's quadrature.
LehtoSample lehto_sample(const DistortionFn& K, cplx w, int p, int n_max, const LehtoQuadrature& q);

std::vector<LehtoSample> lehto_samples(const LehtoStudyConfig& cfg);

struct TailPoint {
  int n = 0;
  std::size_t hits = 0;
  std::size_t trials = 0;
  double p_hat = 0.0;
  stats::Interval wilson;
};

struct TailEstimate {
  double beta = 0.0;
  int p = 0;
  double delta = 0.0;
  std::vector<TailPoint> points;
  /// Least-squares slope of log2 p_hat against N over the N with hits.
  double slope = 0.0;
  /// When fewer than two N have hits the slope is replaced by the bound
  /// max_N log2(upper Wilson limit)/N, and `slope_is_bound` is set.
  bool slope_is_bound = false;
};

/// Event { L(w, 2^{-Np}, 1) < N delta } for N = 1..n_max (all N in n_list).
TailEstimate tail_from_samples(const std::vector<LehtoSample>& samples, double beta, int p,
                               double delta, const std::vector<int>& n_list);

TailEstimate tail_probability(const LehtoStudyConfig& cfg, double delta, const std::vector<int>& n_list);

struct LkStatistics {
  std::vector<int> ks;
  std::vector<double> cdf_exponent;           // per k
  std::vector<std::vector<double>> eps_grid;  // per k, the eps values used
  std::vector<std::vector<double>> cdf;       // per k, empirical P(L_k < eps)
  std::vector<std::vector<double>> correlation;  // over ks x ks
  std::size_t samples = 0;
  bool widened = false;  // eps grid moved up because the lowest quantiles were empty
};

/// Small-value CDF exponents of L_k (slope of log P(L_k < eps) against
/// log eps on a grid of low empirical quantiles) and the correlation matrix.
LkStatistics lk_from_samples(const std::vector<LehtoSample>& samples, const std::vector<int>& ks);

LkStatistics lk_statistics(const LehtoStudyConfig& cfg, const std::vector<int>& ks);

struct ModulusCheck {
  double inner_diameter = 0.0;
  double outer_diameter = 0.0;
  double lehto = 0.0;
  double classical_bound = 0.0;  // 16 exp(-2 pi L) D_O
  double sharp_bound = 0.0;      // 16 exp(-2 pi^2 L) D_O
  bool classical_ok = false;
  bool sharp_ok = false;
  bool injective = true;  // image circles are simple polygons
};

/// Diameters of the images of the two boundary circles of the annulus and
/// both forms of the bound D_I <= 16 exp(-c L) D_O.
ModulusCheck modulus_bound_check(const std::function<cplx(cplx)>& F, const Annulus& ann, double L,
                                 std::size_t samples = 256);

/// Diameter of a point set.
double diameter(const std::vector<cplx>& pts);

}  // namespace rweld
