#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rweld/chaos.hpp"
#include "rweld/error.hpp"
#include "rweld/extension.hpp"
#include "rweld/homeo.hpp"

using namespace rweld;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
const cplx I{0.0, 1.0};

// Beurling-Ahlfors from the defining averages by brute-force midpoint sums.
cplx ba_oracle(const CircleHomeomorphism& h, double x, double y) {
  const int n = 100000;
  double a = 0.0, b = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = (i + 0.5) / n;
    a += h.evaluate(x + s * y);
    b += h.evaluate(x - y + s * y);
  }
  a /= n;
  b /= n;
  return {0.5 * (a + b), a - b};
}

DiskExtension sample_extension(double beta, std::uint64_t seed, std::size_t grid = 4096) {
  return beurling_ahlfors_extend(build_homeo(sample_measure(ChaosParams(beta), grid, seed)));
}

}  // namespace

TEST_CASE("identity extends to the identity") {
  const auto ext = beurling_ahlfors_extend(CircleHomeomorphism::identity(64));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const cplx w{u(rng), u(rng)};
    if (std::abs(w) >= 0.999 || std::abs(w) < 1e-3) continue;
    CHECK(std::abs(ext(w) - w) < 1e-12);
    const auto d = ext.dilatation(w);
    CHECK(std::abs(d.mu) < 1e-12);
    CHECK(d.K == doctest::Approx(1.0));
  }
}

TEST_CASE("rotation extends conformally") {
  const double c = 0.137;
  const auto ext = beurling_ahlfors_extend(CircleHomeomorphism::rotation(128, c));
  for (double r : {0.1, 0.5, 0.9}) {
    for (double t : {0.0, 0.3, 0.71}) {
      const cplx w = std::polar(r, two_pi * t);
      CHECK(std::abs(ext(w) - std::polar(1.0, two_pi * c) * w) < 1e-12);
      CHECK(ext.distortion(w) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("half-plane values match the defining averages") {
  const auto h = build_homeo(sample_measure(ChaosParams(0.7), 512, 3));
  const auto ext = beurling_ahlfors_extend(h);
  for (auto [x, y] : {std::pair{0.1, 0.05}, {0.93, 0.2}, {-0.4, 0.7}, {0.5, 1e-3}}) {
    const cplx o = ba_oracle(h, x, y);
    const cplx v = ext.half_plane(x, y).value;
    CHECK(std::abs(v - o) < 1e-6 * std::max(1.0, std::abs(o)));
  }
}

TEST_CASE("property: exact jets agree with finite differences") {
  const auto ext = sample_extension(1.0, 4);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0.0, 1.0), uy(0.01, 0.5);
  for (int t = 0; t < 40; ++t) {
    const double x = ux(rng), y = uy(rng);
    const double s = 1e-6 * y;
    const auto jet = ext.half_plane(x, y);
    const cplx fx = (ext.half_plane(x + s, y).value - ext.half_plane(x - s, y).value) / (2.0 * s);
    const cplx fy = (ext.half_plane(x, y + s).value - ext.half_plane(x, y - s).value) / (2.0 * s);
    const cplx dz = 0.5 * (fx - I * fy);
    const cplx dzbar = 0.5 * (fx + I * fy);
    const double scale = std::abs(jet.dz) + std::abs(jet.dzbar);
    // The lift is piecewise linear: a kink inside the stencil spoils the
    // difference quotient, so compare with a loose relative tolerance.
    CHECK(std::abs(jet.dz - dz) < 1e-3 * scale);
    CHECK(std::abs(jet.dzbar - dzbar) < 1e-3 * scale);
    CHECK(jet.jacobian() > 0.0);
  }
}

TEST_CASE("disk dilatation matches finite differences") {
  const auto ext = sample_extension(0.7, 8);
  for (cplx w : {cplx{0.3, 0.2}, cplx{-0.5, 0.1}, cplx{0.1, -0.7}}) {
    const auto exact = ext.dilatation(w);
    const auto fd = dilatation_fd([&](cplx z) { return ext(z); }, w, 1e-6);
    CHECK(std::abs(exact.mu - fd.mu) < 1e-4);
  }
}

TEST_CASE("finite-difference dilatation of the radial stretch") {
  const auto f = [](cplx z) { return z * std::abs(z); };
  for (cplx z : {cplx{0.5, 0.1}, cplx{-0.3, 0.6}, cplx{0.2, -0.2}}) {
    const auto d = dilatation_fd(f, z, 1e-4);
    const cplx expect = (1.0 / 3.0) * z / std::conj(z);
    CHECK(std::abs(d.mu - expect) < 1e-3);
    CHECK(d.K == doctest::Approx(2.0).epsilon(1e-3));
  }
  CHECK(distortion_from_mu(0.0) == 1.0);
  CHECK(distortion_from_mu(1.0 / 3.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(dilatation_fd(f, 0.5, 0.0), ArgumentError);
}

TEST_CASE("boundary trace") {
  const auto h = build_homeo(sample_measure(ChaosParams(0.7), 1024, 12));
  const auto ext = beurling_ahlfors_extend(h);
  double prev = INFINITY, first = 0.0;
  for (double r : {0.99, 0.995, 0.999, 0.9995, 0.9999}) {
    double worst = 0.0;
    for (int j = 0; j < 1024; ++j) {
      const double t = (j + 0.5) / 1024.0;
      worst = std::max(worst, std::abs(ext(std::polar(r, two_pi * t)) - std::polar(1.0, two_pi * h.evaluate(t))));
    }
    CHECK(worst < prev);
    if (prev == INFINITY) first = worst;
    prev = worst;
  }
  CHECK(prev < first / 5.0);
  CHECK(std::abs(ext(std::polar(1.0, two_pi * 0.3)) - std::polar(1.0, two_pi * h.evaluate(0.3))) < 1e-14);
}

TEST_CASE("property: inverse round trip") {
  const auto ext = sample_extension(1.0, 21);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ur(0.05, 0.95), ut(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const cplx w = std::polar(ur(rng), two_pi * ut(rng));
    const cplx z = ext.inverse(w);
    CHECK(std::abs(ext(z) - w) < 1e-9);
  }
  CHECK_THROWS_AS(ext.inverse(1.5), ArgumentError);
}

TEST_CASE("rotated measure conjugates the extension") {
  const std::size_t M = 2048;
  const auto m = sample_measure(ChaosParams(0.7), M, 13);
  const auto h = build_homeo(m);
  const auto f = beurling_ahlfors_extend(h);
  const auto g = beurling_ahlfors_extend(build_homeo(rotate_cells(m, M / 2)));
  // g(w) = exp(-2 pi i h(1/2)) f(-w).
  const cplx phase = std::polar(1.0, -two_pi * h.evaluate(0.5));
  for (cplx w : {cplx{0.2, 0.3}, cplx{-0.6, 0.1}, cplx{0.05, -0.9}}) {
    CHECK(std::abs(g(w) - phase * f(-w)) < 1e-10);
  }
}

TEST_CASE("beta one sample has finite distortion and positive Jacobian") {
  const auto ext = sample_extension(1.0, 2, std::size_t{1} << 14);
  for (int a = 0; a < 40; ++a) {
    for (int b = 0; b < 40; ++b) {
      const cplx w{-0.95 + 1.9 * a / 39.0, -0.95 + 1.9 * b / 39.0};
      if (std::abs(w) > 0.97 || std::abs(w) < 1e-3) continue;
      const auto jet = ext.disk(w);
      CHECK(jet.jacobian() > 0.0);
      CHECK(std::isfinite(ext.distortion(w)));
    }
  }
}

TEST_CASE("extension rejects degenerate homeomorphisms") {
  CHECK_THROWS_AS(beurling_ahlfors_extend(CircleHomeomorphism{}), ArgumentError);
  const auto ext = beurling_ahlfors_extend(CircleHomeomorphism::identity(8));
  CHECK_THROWS_AS(ext.half_plane(0.1, 0.0), ArgumentError);
  CHECK_THROWS_AS(ext.disk(cplx{1.0, 0.0}), ArgumentError);
}

TEST_CASE("sampled dilatation field") {
  const auto ext = sample_extension(0.7, 5);
  const std::size_t G = 64;
  const auto field = extension_field(ext, G, 2.0);
  const double h = field.lattice.step();
  for (std::size_t i = 0; i < field.lattice.size(); ++i) {
    const cplx z = field.lattice.point(i);
    const double r = std::abs(z);
    if (r > 1.0) {
      CHECK(field.mu[i] == cplx{0.0, 0.0});
    } else {
      CHECK(std::abs(field.mu[i]) < 1.0);
      if (r > 1.0 - 2.0 * h && r > 0.0) {
        const cplx p = z * ((1.0 - 2.0 * h) / r);
        CHECK(std::abs(field.mu[i] - ext.dilatation(p).mu) < 1e-12);
      }
    }
    CHECK(field.distortion_at(z) >= 1.0);
  }
}

TEST_CASE("truncation") {
  auto f = BeltramiField::zero(8, 2.0);
  f.mu[3 * 8 + 4] = 0.999;
  const auto t = truncate(f, 0.05);
  CHECK(t.mu[3 * 8 + 4].real() == doctest::Approx(0.94905));
  CHECK(t.sup_abs() <= 0.95);
  CHECK(distortion_from_mu(t.sup_abs()) <= (2.0 - 0.05) / 0.05);
  CHECK_THROWS(truncate(f, 1.0));
  CHECK_THROWS(truncate(f, 0.0));
}

TEST_CASE("dyadic intervals") {
  const auto d = as_dyadic(0.25, 0.5);
  CHECK(d.level == 2);
  CHECK(d.index == 1);
  CHECK_THROWS_AS(as_dyadic(0.1, 0.35), ArgumentError);
  CHECK_THROWS_AS(as_dyadic(0.125, 0.375), ArgumentError);
  CHECK_THROWS_AS(as_dyadic(0.5, 0.25), ArgumentError);
}

TEST_CASE("Whitney distortion bound") {
  const auto uniform = sample_measure(ChaosParams(0.0), 1024, 1);
  CHECK(whitney_distortion_bound(uniform, {3, 2}) == doctest::Approx(2304.0));

  auto m = sample_measure(ChaosParams(0.7), 4096, 17);
  const double before = whitney_distortion_bound(m, {4, 5});
  for (auto& c : m.cell_masses) c *= 3.5;
  CHECK(whitney_distortion_bound(m, {4, 5}) == doctest::Approx(before).epsilon(1e-12));
  CHECK_THROWS_AS(whitney_distortion_bound(m, {9, 0}), ArgumentError);

  const auto meas = sample_measure(ChaosParams(0.7), 4096, 18);
  const auto ext = beurling_ahlfors_extend(build_homeo(meas));
  for (int level = 2; level <= 6; ++level) {
    for (std::size_t idx = 0; idx < (std::size_t{1} << level); idx += 3) {
      const DyadicInterval I{level, idx};
      CHECK(whitney_box_max_distortion(ext, I) <= whitney_distortion_bound(meas, I));
    }
  }
}
