#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rweld {

/// Finite-mode realization of the log-correlated Gaussian field on the circle
/// R/Z,
///
///   X_n(t) = sum_{k=1..n} k^{-1/2} (A_k cos 2 pi k t + B_k sin 2 pi k t),
///
/// with A_k, B_k i.i.d. standard normal. Its covariance is
/// sum_k cos(2 pi k s)/k, which tends to -log(2|sin pi s|) as n grows.
///
/// The cached grid holds X at the M cell midpoints t_j = (j + 1/2)/M.
/// Coefficients are drawn in order k = 1, 2, ... from a seeded stream, so a
/// trace with fewer modes and the same seed is a prefix of a longer one.
class FieldTrace {
 public:
  FieldTrace() = default;

  /// Builds a trace from explicit coefficient arrays (index k-1 holds mode k).
  FieldTrace(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
             std::size_t grid_size, std::uint64_t seed);

  std::size_t modes() const noexcept { return cos_coeffs_.size(); }
  std::size_t grid_size() const noexcept { return grid_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }

  const std::vector<double>& cos_coeffs() const noexcept { return cos_coeffs_; }
  const std::vector<double>& sin_coeffs() const noexcept { return sin_coeffs_; }
  const std::vector<double>& grid() const noexcept { return grid_; }

  /// Grid abscissa of sample j.
  double grid_point(std::size_t j) const noexcept {
    return (static_cast<double>(j) + 0.5) / static_cast<double>(grid_.size());
  }

  /// Pointwise variance H_n = sum_{k<=n} 1/k (the same at every t).
  double variance() const noexcept;

  /// Direct O(n) evaluation at an arbitrary t.
  double value_at(double t) const;

  /// X((j + 1/2)/M + shift) for j < M, by one length-M transform.
  std::vector<double> synthesize(std::size_t grid_size, double shift = 0.0) const;

  /// Same coefficients restricted to modes [1, modes].
  FieldTrace truncated(std::size_t modes) const;

 private:
  std::vector<double> cos_coeffs_;
  std::vector<double> sin_coeffs_;
  std::vector<double> grid_;
  std::uint64_t seed_ = 0;
};

/// Frequencies in one octave band: band 0 is {1}, band k >= 1 is
/// (2^{k-1}, 2^k]. `grid` holds the band's partial sum on the trace grid.
struct BandField {
  std::size_t band_index = 0;
  std::size_t first_mode = 0;  // inclusive
  std::size_t last_mode = 0;   // inclusive
  std::vector<double> grid;
};

/// Draws a trace with `modes` modes and evaluates it on `grid_size` midpoints.
/// Throws ConfigError if grid_size is not a power of two or is < 2 * modes.
FieldTrace sample_trace(std::size_t modes, std::size_t grid_size, std::uint64_t seed);

/// Closed-form covariance -log(2|sin(pi lag)|) of the limiting field.
/// Throws ArgumentError for lag = 0 mod 1.
double covariance_exact(double lag);

/// Covariance sum_{k<=n} cos(2 pi k lag)/k of the n-mode trace.
double covariance_truncated(std::size_t modes, double lag);

double harmonic_number(std::size_t n) noexcept;

/// Number of octave bands needed for `modes` modes.
std::size_t band_count(std::size_t modes) noexcept;

/// Splits a trace into octave bands whose pointwise sum is the trace grid.
std::vector<BandField> band_decompose(const FieldTrace& trace);

struct CovarianceEstimate {
  double lag = 0.0;
  double value = 0.0;      // mean over samples of the spatial average of X(t) X(t + lag)
  double std_error = 0.0;  // across samples
  double exact = 0.0;      // limiting closed form
  double truncated = 0.0;  // n-mode closed form
  std::size_t samples = 0;
};

/// Monte Carlo covariance at `lag`: each sample contributes the average of
/// X(t_j) X(t_j + lag) over the 2 * modes grid midpoints (seeds seed + i).
CovarianceEstimate covariance_study(std::size_t modes, double lag, std::size_t samples,
                                    std::uint64_t seed, unsigned workers = 0);

}  // namespace rweld
