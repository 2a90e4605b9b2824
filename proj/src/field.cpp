#include "rweld/field.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "rweld/error.hpp"
#include "rweld/fft.hpp"
#include "rweld/parallel.hpp"
#include "rweld/stats.hpp"

namespace rweld {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// exp(2 pi i x) with the argument reduced mod 1 first.
std::complex<double> unit_phase(double x) {
  double frac = x - std::floor(x);
  return std::polar(1.0, two_pi * frac);
}

void check_grid(std::size_t modes, std::size_t grid_size) {
  if (!fft::is_power_of_two(grid_size)) {
    throw ConfigError("field: grid size must be a power of two");
  }
  if (grid_size < 2 * modes) {
    throw ConfigError("field: grid size must be at least twice the mode count (aliasing)");
  }
}

// Band-limited synthesis of modes [first, last] (1-based, inclusive).
std::vector<double> synthesize_range(const std::vector<double>& a, const std::vector<double>& b,
                                     std::size_t first, std::size_t last, std::size_t grid_size,
                                     double shift) {
  check_grid(last, grid_size);
  std::vector<fft::cplx> spec(grid_size, fft::cplx{0.0, 0.0});
  const double offset = 0.5 / static_cast<double>(grid_size) + shift;
  for (std::size_t k = first; k <= last && k >= 1; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    const fft::cplx c{scale * a[k - 1], -scale * b[k - 1]};
    spec[k] = c * unit_phase(static_cast<double>(k) * offset);
  }
  fft::transform_1d(spec, fft::Direction::backward);
  std::vector<double> out(grid_size);
  for (std::size_t j = 0; j < grid_size; ++j) out[j] = spec[j].real();
  return out;
}

}  // namespace

FieldTrace::FieldTrace(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs,
                       std::size_t grid_size, std::uint64_t seed)
    : cos_coeffs_(std::move(cos_coeffs)), sin_coeffs_(std::move(sin_coeffs)), seed_(seed) {
  if (cos_coeffs_.size() != sin_coeffs_.size()) {
    throw ArgumentError("field: coefficient arrays differ in length");
  }
  grid_ = synthesize(grid_size, 0.0);
}

double FieldTrace::variance() const noexcept { return harmonic_number(modes()); }

double FieldTrace::value_at(double t) const {
  double sum = 0.0;
  for (std::size_t k = 1; k <= modes(); ++k) {
    const auto ph = unit_phase(static_cast<double>(k) * t);
    sum += (cos_coeffs_[k - 1] * ph.real() + sin_coeffs_[k - 1] * ph.imag()) /
           std::sqrt(static_cast<double>(k));
  }
  return sum;
}

std::vector<double> FieldTrace::synthesize(std::size_t grid_size, double shift) const {
  if (modes() == 0) {
    check_grid(0, grid_size);
    return std::vector<double>(grid_size, 0.0);
  }
  return synthesize_range(cos_coeffs_, sin_coeffs_, 1, modes(), grid_size, shift);
}

FieldTrace FieldTrace::truncated(std::size_t modes) const {
  if (modes > this->modes()) throw ArgumentError("field: cannot truncate to more modes");
  std::vector<double> a(cos_coeffs_.begin(), cos_coeffs_.begin() + static_cast<long>(modes));
  std::vector<double> b(sin_coeffs_.begin(), sin_coeffs_.begin() + static_cast<long>(modes));
  return FieldTrace(std::move(a), std::move(b), grid_size(), seed_);
}

FieldTrace sample_trace(std::size_t modes, std::size_t grid_size, std::uint64_t seed) {
  check_grid(modes, grid_size);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(modes), b(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    a[k] = normal(rng);
    b[k] = normal(rng);
  }
  return FieldTrace(std::move(a), std::move(b), grid_size, seed);
}

double covariance_exact(double lag) {
  const double frac = lag - std::floor(lag);
  if (frac == 0.0) throw ArgumentError("covariance_exact: log singularity at lag 0");
  return -std::log(2.0 * std::abs(std::sin(std::numbers::pi * frac)));
}

double covariance_truncated(std::size_t modes, double lag) {
  double sum = 0.0;
  for (std::size_t k = 1; k <= modes; ++k) {
    sum += unit_phase(static_cast<double>(k) * lag).real() / static_cast<double>(k);
  }
  return sum;
}

double harmonic_number(std::size_t n) noexcept {
  double sum = 0.0;
  for (std::size_t k = n; k >= 1; --k) sum += 1.0 / static_cast<double>(k);
  return sum;
}

std::size_t band_count(std::size_t modes) noexcept {
  if (modes == 0) return 0;
  std::size_t count = 1;
  std::size_t top = 1;
  while (top < modes) {
    top *= 2;
    ++count;
  }
  return count;
}

std::vector<BandField> band_decompose(const FieldTrace& trace) {
  if (trace.modes() == 0) throw ArgumentError("band_decompose: trace has no modes");
  std::vector<BandField> bands;
  const std::size_t n = trace.modes();
  for (std::size_t k = 0; k < band_count(n); ++k) {
    BandField band;
    band.band_index = k;
    band.first_mode = k == 0 ? 1 : (std::size_t{1} << (k - 1)) + 1;
    band.last_mode = std::min(n, std::size_t{1} << k);
    band.grid = synthesize_range(trace.cos_coeffs(), trace.sin_coeffs(), band.first_mode,
                                 band.last_mode, trace.grid_size(), 0.0);
    bands.push_back(std::move(band));
  }
  return bands;
}

CovarianceEstimate covariance_study(std::size_t modes, double lag, std::size_t samples,
                                    std::uint64_t seed, unsigned workers) {
  if (samples < 2) throw ArgumentError("covariance_study: need at least two samples");
  const std::size_t grid = 2 * modes;
  check_grid(modes, grid);
  const auto values = parallel_map(
      samples,
      [&](std::size_t i) {
        const auto trace = sample_trace(modes, grid, seed + i);
        const auto shifted = trace.synthesize(grid, lag);
        double acc = 0.0;
        for (std::size_t j = 0; j < grid; ++j) acc += trace.grid()[j] * shifted[j];
        return acc / static_cast<double>(grid);
      },
      workers);
  const auto sum = stats::summarize(values);
  CovarianceEstimate out;
  out.lag = lag;
  out.value = sum.mean;
  out.std_error = sum.std_error;
  out.exact = covariance_exact(lag);
  out.truncated = covariance_truncated(modes, lag);
  out.samples = samples;
  return out;
}

}  // namespace rweld
