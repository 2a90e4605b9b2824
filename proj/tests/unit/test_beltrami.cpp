#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rweld/beltrami.hpp"
#include "rweld/error.hpp"

using namespace rweld;

namespace {

const cplx I{0.0, 1.0};

double l2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

BeltramiField radial_stretch(std::size_t side) {
  return BeltramiField::sample(side, 2.0, [](cplx z) -> cplx {
    if (z == cplx{0.0, 0.0}) return 0.0;
    return (1.0 / 3.0) * z / std::conj(z);
  });
}

cplx radial_exact(cplx z) { return std::abs(z) < 1.0 ? z * std::abs(z) : z; }

std::vector<cplx> disk_indicator(const Lattice& lat) {
  std::vector<cplx> f(lat.size(), 0.0);
  for (std::size_t i = 0; i < lat.size(); ++i) {
    if (std::norm(lat.point(i)) <= 1.0) f[i] = 1.0;
  }
  return f;
}

}  // namespace

TEST_CASE("solver configuration") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.side = 1000;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.eps = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.half_width = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.tol = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("Beurling transform is unitary and kills constants") {
  const Lattice lat{64, 2.0};
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<cplx> f(lat.size());
  double mean_re = 0.0, mean_im = 0.0;
  for (auto& x : f) {
    x = {n(rng), n(rng)};
    mean_re += x.real();
    mean_im += x.imag();
  }
  // Remove the mean: the zero frequency is annihilated.
  for (auto& x : f) x -= cplx{mean_re, mean_im} / static_cast<double>(lat.size());
  const auto s = beurling_transform(lat, f);
  CHECK(l2(s) == doctest::Approx(l2(f)).epsilon(1e-10));
  const std::vector<cplx> zero(lat.size(), 0.0);
  CHECK(l2(beurling_transform(lat, zero)) == 0.0);
  CHECK(l2(beurling_transform(lat, std::vector<cplx>(lat.size(), 2.0))) < 1e-12);
  CHECK_THROWS_AS(beurling_transform(lat, std::vector<cplx>(10)), ConfigError);
}

TEST_CASE("Beurling transform intertwines derivatives of a Gaussian bump") {
  const Lattice lat{128, 2.0};
  const double s2 = 0.04;
  std::vector<cplx> dbar(lat.size()), d(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const cplx z = lat.point(i);
    const double g = std::exp(-std::norm(z) / s2);
    dbar[i] = -z / s2 * g;
    d[i] = -std::conj(z) / s2 * g;
  }
  const auto s = beurling_transform(lat, dbar);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    worst = std::max(worst, std::abs(s[i] - d[i]));
    scale = std::max(scale, std::abs(d[i]));
  }
  CHECK(worst < 1e-6 * scale);
}

TEST_CASE("periodic Cauchy transform solves dbar u = f - mean") {
  const Lattice lat{128, 2.0};
  std::vector<cplx> f(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const cplx z = lat.point(i) - cplx{0.2, -0.1};
    f[i] = std::exp(-std::norm(z) / 0.05) * (1.0 + z);
  }
  cplx mean = 0.0;
  for (const auto& x : f) mean += x;
  mean /= static_cast<double>(lat.size());
  const auto u = periodic_cauchy_transform(lat, f);
  const double h = lat.step();
  const std::size_t g = lat.side;
  double worst = 0.0;
  for (std::size_t b = 1; b + 1 < g; b += 3) {
    for (std::size_t a = 1; a + 1 < g; a += 3) {
      const std::size_t i = b * g + a;
      // Second-order differences; tolerance sized accordingly.
      const cplx ux = (u[i + 1] - u[i - 1]) / (2.0 * h);
      const cplx uy = (u[i + g] - u[i - g]) / (2.0 * h);
      worst = std::max(worst, std::abs(0.5 * (ux + I * uy) - (f[i] - mean)));
    }
  }
  CHECK(worst < 5e-2);
  CHECK(l2(periodic_cauchy_transform(lat, std::vector<cplx>(lat.size(), 0.0))) == 0.0);
}

TEST_CASE("plane Cauchy transform of the disk indicator") {
  const Lattice lat{256, 2.0};
  const auto c = cauchy_transform(lat, disk_indicator(lat));
  double worst = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const cplx z = lat.point(i);
    const double r = std::abs(z);
    if ((r > 0.9 && r < 1.1) || std::abs(z.real()) > 1.8 || std::abs(z.imag()) > 1.8) continue;
    const cplx expect = r < 1.0 ? std::conj(z) : 1.0 / z;
    worst = std::max(worst, std::abs(c[i] - expect));
  }
  CHECK(worst < 1e-2);
}

TEST_CASE("plane Cauchy transform against direct summation") {
  // Direct lattice quadrature of (1/pi) sum phi(zeta) h^2 / (z - zeta) at
  // points away from the support.
  const Lattice lat{64, 2.0};
  std::vector<cplx> phi(lat.size(), 0.0);
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const cplx z = lat.point(i);
    if (std::norm(z) <= 1.0) phi[i] = std::exp(-4.0 * std::norm(z)) * (1.0 + 0.5 * z);
  }
  const auto c = cauchy_transform(lat, phi);
  const double h = lat.step();
  for (std::size_t idx : {std::size_t{2 * 64 + 3}, std::size_t{60 * 64 + 31}, std::size_t{10 * 64 + 58},
                          std::size_t{50 * 64 + 8}}) {
    const cplx z = lat.point(idx);
    REQUIRE(std::abs(z) > 1.2);
    cplx direct = 0.0;
    for (std::size_t j = 0; j < lat.size(); ++j) {
      if (phi[j] != cplx{0.0, 0.0}) direct += phi[j] / (z - lat.point(j));
    }
    direct *= h * h / std::numbers::pi;
    // Spectral and direct quadratures of a field with a jump at the circle
    // agree to the jump-limited accuracy.
    CHECK(std::abs(c[idx] - direct) < 1e-4 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("zero dilatation gives the identity") {
  SolverConfig cfg;
  cfg.side = 64;
  const auto F = solve(BeltramiField::zero(64, 2.0), cfg);
  for (std::size_t i = 0; i < F.lattice().size(); ++i) CHECK(F.values()[i] == F.lattice().point(i));
  CHECK(F.diagnostics().iterations == 0);
  CHECK(conformality_residual(F).median == 0.0);
  CHECK(F.count_folded_cells() == 0);
  CHECK(F.count_jacobian_failures() == 0);
}

TEST_CASE("radial stretch oracle") {
  SolverConfig cfg;
  cfg.side = 256;
  cfg.tol = 1e-10;
  const auto mu = radial_stretch(256);
  const auto F = solve(mu, cfg);
  const auto& lat = F.lattice();
  double worst = 0.0, interior = 0.0, outer_ring = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const cplx z = lat.point(i);
    const double r = std::abs(z);
    const double e = std::abs(F.values()[i] - radial_exact(z));
    if (r < 0.95 || r > 1.05) worst = std::max(worst, e);
    const std::size_t a = i % lat.side, b = i / lat.side;
    const double dev = std::abs(F.values()[i] - z);
    if (a == 0 || b == 0) {
      outer_ring = std::max(outer_ring, dev);
    } else {
      interior = std::max(interior, dev);
    }
  }
  CHECK(worst <= 5e-3);
  const auto& d = F.diagnostics();
  CHECK(d.contraction_ratio() <= mu.sup_abs() + 0.05);
  CHECK(d.residual <= 10.0 * cfg.tol * d.mu_norm);
  CHECK(outer_ring <= 10.0 / cfg.half_width * interior);
  CHECK(conformality_residual(F).median <= 1e-3);
  CHECK(d.jacobian_failures == 0);
  CHECK(std::abs(d.scale - 1.0) < 1e-2);

  // Renormalizing an affine perturbation restores the principal map.
  const auto G = F.affine(cplx{1.3, 0.4}, cplx{0.2, -0.7}).renormalized();
  for (cplx z : {cplx{1.2, 0.1}, cplx{-0.4, 0.3}, cplx{0.0, -1.5}}) {
    CHECK(std::abs(G(z) - F(z)) < 1e-6);
  }
}

TEST_CASE("solver is deterministic") {
  SolverConfig cfg;
  cfg.side = 64;
  const auto mu = radial_stretch(64);
  CHECK(solve(mu, cfg).values() == solve(mu, cfg).values());
}

TEST_CASE("solver errors") {
  SolverConfig cfg;
  cfg.side = 64;
  auto mu = radial_stretch(64);
  mu.mu[64 * 32 + 32] = 1.0;
  CHECK_THROWS_AS(solve(mu, cfg), ArgumentError);

  cfg.max_iterations = 2;
  try {
    solve(radial_stretch(64), cfg);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.history().size() == 2);
  }
  cfg.side = 128;
  cfg.max_iterations = 100;
  CHECK_THROWS_AS(solve(radial_stretch(64), cfg), ConfigError);
}

TEST_CASE("Laurent normalization recovers an affine map") {
  const Lattice lat{128, 2.0};
  const cplx a{0.8, 0.3}, b{-0.2, 0.5};
  const auto F = PlanarMap::from_function(lat, [&](cplx z) { return a * (z + 0.1 / z) + b; });
  const auto [scale, offset] = F.laurent_affine(normalization_radius(lat));
  CHECK(std::abs(scale - a) < 1e-10);
  CHECK(std::abs(offset - b) < 1e-10);
}

TEST_CASE("Jacobian and fold counters see an orientation reversal") {
  const Lattice lat{32, 2.0};
  const auto F = PlanarMap::from_function(lat, [](cplx z) { return std::conj(z); });
  CHECK(F.count_jacobian_failures() > 0);
  CHECK(F.count_folded_cells() > 0);
}
