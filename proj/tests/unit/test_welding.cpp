#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rweld/chaos.hpp"
#include "rweld/error.hpp"
#include "rweld/welding.hpp"

using namespace rweld;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double orient(cplx a, cplx b, cplx c) {
  return (b.real() - a.real()) * (c.imag() - a.imag()) - (b.imag() - a.imag()) * (c.real() - a.real());
}

bool within(cplx p, cplx q, cplx r) {
  return std::min(p.real(), r.real()) <= q.real() && q.real() <= std::max(p.real(), r.real()) &&
         std::min(p.imag(), r.imag()) <= q.imag() && q.imag() <= std::max(p.imag(), r.imag());
}

bool intersect(cplx a, cplx b, cplx c, cplx d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return true;
  if (o1 == 0 && within(a, c, b)) return true;
  if (o2 == 0 && within(a, d, b)) return true;
  if (o3 == 0 && within(c, a, d)) return true;
  if (o4 == 0 && within(c, b, d)) return true;
  return false;
}

// All pairs of non-adjacent edges.
bool brute_simple(const std::vector<cplx>& p) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return false;
    }
  }
  return true;
}

WeldOptions small_options(std::size_t side, double eps) {
  WeldOptions o;
  o.solver.side = side;
  o.solver.eps = eps;
  return o;
}

}  // namespace

TEST_CASE("simple polygon checks") {
  CHECK(is_simple_polygon(unit_circle(64)));
  const std::vector<cplx> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_FALSE(is_simple_polygon(bowtie));
  const std::vector<cplx> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  CHECK(is_simple_polygon(square));
  // A vertex touching a non-adjacent edge.
  const std::vector<cplx> touch{{0, 0}, {2, 0}, {2, 2}, {1, 0}, {0, 2}};
  CHECK_FALSE(is_simple_polygon(touch));
}

TEST_CASE("property: sweep agrees with the quadratic scan") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int simple = 0, crossing = 0;
  for (int t = 0; t < 400; ++t) {
    const std::size_t n = 4 + rng() % 20;
    std::vector<cplx> p(n);
    // Star-shaped polygons with random radial jitter: sometimes simple,
    // sometimes self-crossing once angles are perturbed.
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = two_pi * (static_cast<double>(j) + 0.9 * (u(rng) - 0.5) * (t % 3)) / static_cast<double>(n);
      p[j] = std::polar(0.2 + u(rng), ang);
    }
    const bool expect = brute_simple(p);
    CHECK(is_simple_polygon(p) == expect);
    (expect ? simple : crossing)++;
  }
  CHECK(simple > 20);
  CHECK(crossing > 20);
}

TEST_CASE("Hausdorff distance") {
  const std::vector<cplx> a{{0, 0}, {1, 0}};
  const std::vector<cplx> b{{0, 0}, {1, 0}, {1, 3}};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(3.0));
  CHECK(hausdorff_distance(b, a) == hausdorff_distance(a, b));
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK_THROWS_AS(hausdorff_distance(a, {}), ArgumentError);
}

TEST_CASE("identity weld") {
  const auto res = weld(CircleHomeomorphism::identity(1024), small_options(128, 0.05));
  CHECK_FALSE(res.flagged());
  CHECK(res.curve.size() == 4097);
  CHECK(res.curve.front() == res.curve.back());
  CHECK(hausdorff_distance(res.curve, unit_circle(4096)) <= 1e-2);
  CHECK(verify_welding(res) <= 1e-3);
  CHECK(res.conformality == 0.0);
  CHECK(curve_holder_exponent(res, 10) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(res.interior_map(cplx{0.3, 0.2}) - cplx{0.3, 0.2}) < 1e-9);
  CHECK_THROWS_AS(res.interior_map(2.0), ArgumentError);
  CHECK_THROWS_AS(res.exterior_map(0.5), ArgumentError);
}

TEST_CASE("rotation welds to the circle") {
  const auto res = weld(CircleHomeomorphism::rotation(1024, 0.21), small_options(128, 0.05));
  CHECK_FALSE(res.flagged());
  CHECK(hausdorff_distance(res.curve, unit_circle(4096)) <= 1e-2);
}

TEST_CASE("welding defect vanishes for the radial-stretch pair") {
  // f(z) = z|z| with exact F = f inside and identity outside: F o f^{-1} = id.
  SolverConfig cfg;
  cfg.side = 256;
  cfg.tol = 1e-10;
  const auto mu = BeltramiField::sample(256, 2.0, [](cplx z) -> cplx {
    return z == cplx{0.0, 0.0} ? cplx{0.0, 0.0} : (1.0 / 3.0) * z / std::conj(z);
  });
  const auto F = solve(mu, cfg);
  auto jet = [](cplx z) {
    const double r = std::abs(z);
    MapJet j;
    j.value = z * r;
    j.dz = 1.5 * r;
    j.dzbar = 0.5 * z * z / r;
    return j;
  };
  auto inv = [](cplx w) { return w / std::sqrt(std::abs(w)); };
  CHECK(welding_defect(jet, inv, F) <= 1e-3);
  CHECK_THROWS_AS(welding_defect(jet, inv, F, 0.8, 0.3), ArgumentError);

  // The exact F sampled on the lattice gives the same verdict.
  const auto exact = PlanarMap::from_function(F.lattice(), [](cplx z) { return std::abs(z) < 1.0 ? z * std::abs(z) : z; });
  CHECK(welding_defect(jet, inv, exact) <= 1e-3);
  // A wrong F is detected.
  const auto wrong = PlanarMap::identity(F.lattice());
  CHECK(welding_defect(jet, inv, wrong) > 0.3);
}

TEST_CASE("random weld at coarse resolution") {
  const auto h = build_homeo(sample_measure(ChaosParams(0.3), 4096, 3));
  const auto res = weld(h, small_options(256, 0.05), {0.3, 3, 0});
  CHECK(res.metadata.circle_cells == 4096);
  CHECK(res.simple);
  CHECK(res.conformality <= 1e-2);
  CHECK(curve_holder_exponent(res, 10) >= 0.05);
  if (!res.flagged()) CHECK(verify_welding(res) <= 5e-2);

  // Deterministic pipeline.
  const auto again = weld(h, small_options(256, 0.05), {0.3, 3, 0});
  CHECK(again.curve == res.curve);
}

TEST_CASE("epsilon study on the identity") {
  const auto st = epsilon_convergence(CircleHomeomorphism::identity(256), {0.2, 0.1, 0.05}, small_options(64, 0.05));
  REQUIRE(st.distances.size() == 2);
  for (double d : st.distances) CHECK(d <= 1e-3);
  CHECK_THROWS_AS(epsilon_convergence(CircleHomeomorphism::identity(256), {0.1, 0.2}, small_options(64, 0.05)),
                  ArgumentError);
  CHECK_THROWS_AS(epsilon_convergence(CircleHomeomorphism::identity(256), {}, small_options(64, 0.05)),
                  ArgumentError);
}

TEST_CASE("flagged results are refused") {
  auto res = weld(CircleHomeomorphism::identity(256), small_options(64, 0.05));
  res.flags.push_back("self-intersection");
  CHECK_THROWS_AS(verify_welding(res), ArgumentError);
}
