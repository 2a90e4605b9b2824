#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rweld/error.hpp"
#include "rweld/field.hpp"
#include "rweld/stats.hpp"

using namespace rweld;

namespace {

// Direct sum of the series at t, independent of the FFT synthesis.
double direct_value(const FieldTrace& tr, double t) {
  double s = 0.0;
  for (std::size_t k = 1; k <= tr.modes(); ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) * t;
    s += (tr.cos_coeffs()[k - 1] * std::cos(a) + tr.sin_coeffs()[k - 1] * std::sin(a)) /
         std::sqrt(static_cast<double>(k));
  }
  return s;
}

}  // namespace

TEST_CASE("zero modes give a zero field") {
  const auto tr = sample_trace(0, 16, 3);
  for (double v : tr.grid()) CHECK(v == 0.0);
}

TEST_CASE("trace is reproducible from its seed") {
  const auto a = sample_trace(4096, 8192, 7);
  const auto b = sample_trace(4096, 8192, 7);
  CHECK(a.cos_coeffs() == b.cos_coeffs());
  CHECK(a.sin_coeffs() == b.sin_coeffs());
  CHECK(a.grid() == b.grid());
}

TEST_CASE("grid synthesis matches the direct sum") {
  const auto tr = sample_trace(100, 256, 11);
  for (std::size_t j = 0; j < 256; j += 17) {
    CHECK(tr.grid()[j] == doctest::Approx(direct_value(tr, tr.grid_point(j))).epsilon(1e-10));
  }
  CHECK(tr.value_at(0.123) == doctest::Approx(direct_value(tr, 0.123)).epsilon(1e-12));
  const auto shifted = tr.synthesize(256, 0.3);
  CHECK(shifted[5] == doctest::Approx(direct_value(tr, tr.grid_point(5) + 0.3)).epsilon(1e-10));
}

TEST_CASE("field has zero spatial mean") {
  const auto tr = sample_trace(512, 1024, 5);
  double s = 0.0;
  for (double v : tr.grid()) s += v;
  CHECK(std::abs(s / 1024.0) < 1e-12);
}

TEST_CASE("fewer modes with the same seed is a prefix") {
  const auto big = sample_trace(256, 512, 9);
  const auto small = sample_trace(64, 512, 9);
  for (std::size_t k = 0; k < 64; ++k) CHECK(big.cos_coeffs()[k] == small.cos_coeffs()[k]);
  const auto cut = big.truncated(64);
  CHECK(cut.grid()[10] == doctest::Approx(small.grid()[10]).epsilon(1e-12));
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS_AS(sample_trace(100, 100, 1), ConfigError);
  CHECK_THROWS_AS(sample_trace(100, 128, 1), ConfigError);
  CHECK_NOTHROW(sample_trace(64, 128, 1));
}

TEST_CASE("closed-form covariance") {
  CHECK(covariance_exact(0.5) == doctest::Approx(-std::log(2.0)));
  CHECK(std::abs(covariance_exact(1.0 / 6.0)) < 1e-14);
  CHECK(covariance_exact(0.25) == doctest::Approx(-0.5 * std::log(2.0)));
  CHECK_THROWS_AS(covariance_exact(0.0), ArgumentError);
  CHECK_THROWS_AS(covariance_exact(2.0), ArgumentError);
  // Truncated covariance against the direct sum, and its limit.
  double s = 0.0;
  for (int k = 1; k <= 50; ++k) s += std::cos(2.0 * std::numbers::pi * k * 0.3) / k;
  CHECK(covariance_truncated(50, 0.3) == doctest::Approx(s).epsilon(1e-12));
  CHECK(covariance_truncated(200000, 0.5) == doctest::Approx(-std::log(2.0)).epsilon(1e-4));
}

TEST_CASE("variance is the harmonic number") {
  double h = 0.0;
  for (int k = 1; k <= 4096; ++k) h += 1.0 / k;
  CHECK(harmonic_number(4096) == doctest::Approx(h).epsilon(1e-14));
  CHECK(h == doctest::Approx(8.895).epsilon(1e-3));
  CHECK(sample_trace(4096, 8192, 1).variance() == doctest::Approx(h));

  // Monte Carlo variance at t = 0 and t = 0.37 (stationarity); 2000 seeds.
  std::vector<double> x0, x1;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const auto tr = sample_trace(4096, 8192, 1000 + s);
    x0.push_back(tr.value_at(0.0));
    x1.push_back(tr.value_at(0.37));
  }
  const auto a = stats::summarize(x0);
  const auto b = stats::summarize(x1);
  const double se = h * std::sqrt(2.0 / 2000.0);
  CHECK(std::abs(a.variance - h) < 4.0 * se);
  CHECK(std::abs(b.variance - h) < 4.0 * se);
}

TEST_CASE("octave bands") {
  CHECK(band_count(4096) == 13);
  CHECK(band_count(1) == 1);
  CHECK(band_count(3) == 3);
  const auto tr = sample_trace(4096, 8192, 21);
  const auto bands = band_decompose(tr);
  REQUIRE(bands.size() == 13);
  CHECK(bands[0].first_mode == 1);
  CHECK(bands[0].last_mode == 1);
  CHECK(bands[3].first_mode == 5);
  CHECK(bands[3].last_mode == 8);
  double worst = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < tr.grid_size(); ++j) {
    double s = 0.0;
    for (const auto& b : bands) s += b.grid[j];
    worst = std::max(worst, std::abs(s - tr.grid()[j]));
    scale = std::max(scale, std::abs(tr.grid()[j]));
  }
  CHECK(worst <= 1e-10 * scale);
}

TEST_CASE("property: bands partition the modes for random mode counts") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t modes = 1 + rng() % 700;
    const auto tr = sample_trace(modes, 2048, rng());
    const auto bands = band_decompose(tr);
    CHECK(bands.size() == band_count(modes));
    std::size_t next = 1;
    for (const auto& b : bands) {
      CHECK(b.first_mode == next);
      next = b.last_mode + 1;
    }
    CHECK(next == modes + 1);
  }
}

TEST_CASE("distinct bands are uncorrelated") {
  std::vector<double> b3, b7;
  for (std::uint64_t s = 0; s < 3000; ++s) {
    const auto bands = band_decompose(sample_trace(256, 512, 50000 + s));
    b3.push_back(bands[3].grid[100]);
    b7.push_back(bands[7].grid[100]);
  }
  const double r = stats::correlation(b3, b7);
  CHECK(std::abs(r) < 3.0 * stats::correlation_std_error(0.0, b3.size()));
}

TEST_CASE("covariance study tracks the truncated closed form") {
  for (double lag : {0.5, 0.25, 1.0 / 6.0, 0.125}) {
    const auto est = covariance_study(256, lag, 400, 77);
    CHECK(est.exact == doctest::Approx(covariance_exact(lag)));
    CHECK(std::abs(est.value - est.truncated) < 4.0 * est.std_error + 1e-3);
  }
}
