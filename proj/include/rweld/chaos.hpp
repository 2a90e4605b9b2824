#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rweld/field.hpp"
#include "rweld/stats.hpp"

namespace rweld {

/// Inverse temperature of the chaos measure. Values with beta^2 >= 2 are
/// rejected unless `exploratory` is set (measure-only experiments).
class ChaosParams {
 public:
  explicit ChaosParams(double beta = 0.0, bool exploratory = false);

  double beta() const noexcept { return beta_; }
  bool exploratory() const noexcept { return exploratory_; }

  /// Largest finite moment exponent 2/beta^2 (infinity at beta = 0).
  double critical_moment() const noexcept;

 private:
  double beta_;
  bool exploratory_;
};

/// Cell masses of tau = exp(beta X_n - beta^2 Var X_n / 2) dt on the M
/// uniform cells [i/M, (i+1)/M), by midpoint quadrature.
struct ChaosMeasure {
  std::vector<double> cell_masses;
  double total_mass = 0.0;
  ChaosParams params;
  std::size_t modes = 0;
  std::uint64_t seed = 0;

  std::size_t grid_size() const noexcept { return cell_masses.size(); }
  double max_cell_mass() const noexcept;
};

ChaosMeasure build_measure(const FieldTrace& trace, const ChaosParams& params);

/// Convenience: sample a trace with modes = grid_size/2 and build its measure.
ChaosMeasure sample_measure(const ChaosParams& params, std::size_t grid_size, std::uint64_t seed);

/// Mass of [a, b) with linear pro-rating of partially covered cells.
double interval_mass(const ChaosMeasure& measure, double a, double b);

/// Measure rotated by `cells` grid cells: new cell i carries old cell i + cells.
ChaosMeasure rotate_cells(const ChaosMeasure& measure, std::size_t cells);

struct MomentScaling {
  double slope = 0.0;
  double std_error = 0.0;
  std::vector<double> log_sizes;    // natural log of |I|
  std::vector<double> log_moments;  // natural log of the mean of tau(I)^q
};

struct MomentStudyConfig {
  std::size_t grid_size = std::size_t{1} << 16;
  std::vector<int> levels{4, 5, 6, 7, 8, 9, 10};  // |I| = 2^{-level}
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::size_t batches = 10;  // batch means give the slope's standard error
  unsigned workers = 0;
};

/// Fits the slope of log E[tau(I)^q] against log |I|. Every dyadic interval
/// of each level contributes to the empirical mean. Rejects q >= 2/beta^2.
MomentScaling moment_scaling(const ChaosParams& params, double q, const MomentStudyConfig& cfg);

/// Total masses of independent measures (modes = grid/2, seeds seed + i).
stats::Summary total_mass_study(const ChaosParams& params, std::size_t grid_size, std::size_t samples,
                                std::uint64_t seed, unsigned workers = 0);

}  // namespace rweld
