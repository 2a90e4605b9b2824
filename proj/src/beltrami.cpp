#include "rweld/beltrami.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "rweld/error.hpp"
#include "rweld/fft.hpp"

namespace rweld {
namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

// Eisenstein sums e_{2k} = sum' (m + i n)^{-2k} of the Gaussian integers are
// zero unless 4 | 2k. Terms up to (z - zeta)^{max_power} are kept.
constexpr int max_power = 63;

const std::array<double, max_power + 2>& gaussian_eisenstein() {
  static const auto table = [] {
    std::array<double, max_power + 2> e{};
    // e_4 = varpi^4 / 15 with the lemniscate constant varpi.
    constexpr double varpi = 2.622057554292119810464839589891119413682754951431623162816821703;
    e[4] = std::pow(varpi, 4) / 15.0;
    constexpr int reach = 80;
    for (int power = 8; power <= max_power + 1; power += 4) {
      // Sum over the first quadrant m >= 1, n >= 0; the four rotations by i
      // contribute equally because i^power = 1.
      double sum = 0.0;
      for (int m = reach; m >= 1; --m) {
        for (int n = reach; n >= 0; --n) {
          sum += std::pow(cplx(m, n), -power).real();
        }
      }
      e[static_cast<std::size_t>(power)] = 4.0 * sum;
    }
    return e;
  }();
  return table;
}

void check_square(const Lattice& lattice, std::size_t size) {
  if (!fft::is_power_of_two(lattice.side) || lattice.side < 4) {
    throw ConfigError("lattice side must be a power of two >= 4");
  }
  if (size != lattice.size()) throw ConfigError("field is not a side x side array");
}

double wavenumber(std::size_t p, const Lattice& lattice) {
  const auto g = static_cast<long long>(lattice.side);
  long long q = static_cast<long long>(p);
  if (q >= g / 2) q -= g;
  return pi * static_cast<double>(q) / lattice.half_width;
}

enum class Multiplier { beurling, cauchy };

std::vector<cplx> multiplier_table(const Lattice& lattice, Multiplier kind) {
  const std::size_t g = lattice.side;
  const double norm = 1.0 / static_cast<double>(lattice.size());
  std::vector<cplx> table(lattice.size(), 0.0);
  for (std::size_t b = 0; b < g; ++b) {
    const double ky = wavenumber(b, lattice);
    for (std::size_t a = 0; a < g; ++a) {
      if (a == 0 && b == 0) continue;
      const cplx xi{wavenumber(a, lattice), ky};
      table[b * g + a] = (kind == Multiplier::beurling ? std::conj(xi) / xi : -2.0 * I / xi) * norm;
    }
  }
  return table;
}

std::vector<cplx> apply_table(const Lattice& lattice, std::span<const cplx> field,
                              const std::vector<cplx>& table) {
  check_square(lattice, field.size());
  std::vector<cplx> data(field.begin(), field.end());
  fft::transform_2d(data, lattice.side, fft::Direction::forward);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= table[i];
  fft::transform_2d(data, lattice.side, fft::Direction::backward);
  return data;
}

std::vector<cplx> apply_multiplier(const Lattice& lattice, std::span<const cplx> field,
                                   Multiplier kind) {
  check_square(lattice, field.size());
  return apply_table(lattice, field, multiplier_table(lattice, kind));
}

// Difference between the plane and periodic transforms of a field with
// compact support inside the central cell:
//   C phi = C_per phi + m conj(z) + c + P(z),  S phi = S_per phi + P'(z),
// where m is the mean of phi over the cell, c = -(1/A) int conj(zeta) phi and
// P(z) = (1/pi) sum_k G_{2k} int (z - zeta)^{2k-1} phi(zeta) dA.
struct Correction {
  cplx mean{0.0, 0.0};
  cplx constant{0.0, 0.0};
  std::array<cplx, max_power + 1> poly{};  // coefficient of z^n

  cplx value(cplx z) const {
    cplx acc = 0.0;
    for (int n = max_power; n >= 0; --n) acc = acc * z + poly[static_cast<std::size_t>(n)];
    return acc;
  }
  cplx derivative(cplx z) const {
    cplx acc = 0.0;
    for (int n = max_power; n >= 1; --n) {
      acc = acc * z + static_cast<double>(n) * poly[static_cast<std::size_t>(n)];
    }
    return acc;
  }
};

Correction lattice_correction(const Lattice& lattice, std::span<const cplx> field) {
  const double h = lattice.step();
  const double cell = h * h;
  const double area = 4.0 * lattice.half_width * lattice.half_width;
  const double period = 2.0 * lattice.half_width;

  Correction out;
  std::array<cplx, max_power + 1> moments{};
  for (std::size_t i = 0; i < field.size(); ++i) {
    const cplx phi = field[i];
    if (phi == cplx{0.0, 0.0}) continue;
    const cplx z = lattice.point(i);
    out.mean += phi;
    out.constant += std::conj(z) * phi;
    cplx zp = 1.0;
    for (auto& mom : moments) {
      mom += zp * phi;
      zp *= z;
    }
  }
  out.mean *= cell / area;
  out.constant *= -cell / area;
  for (auto& mom : moments) mom *= cell;

  const auto& eis = gaussian_eisenstein();
  std::array<double, max_power + 1> binom{};
  for (int power = 4; power <= max_power + 1; power += 4) {
    const double g2k = eis[static_cast<std::size_t>(power)] * std::pow(period, -power);
    const int deg = power - 1;
    binom[0] = 1.0;
    for (int n = 1; n <= deg; ++n) {
      binom[static_cast<std::size_t>(n)] =
          binom[static_cast<std::size_t>(n - 1)] * static_cast<double>(deg - n + 1) / n;
    }
    for (int n = 0; n <= deg; ++n) {
      const int j = deg - n;
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      out.poly[static_cast<std::size_t>(n)] +=
          g2k / pi * binom[static_cast<std::size_t>(n)] * sign * moments[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

double l2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

void SolverConfig::validate() const {
  if (!fft::is_power_of_two(side) || side < 8) throw ConfigError("solver: side must be a power of two >= 8");
  if (!(half_width > 1.0)) throw ConfigError("solver: half width must exceed 1");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("solver: eps must lie in (0, 1)");
  if (!(tol > 0.0)) throw ConfigError("solver: tol must be positive");
  if (max_iterations == 0) throw ConfigError("solver: max_iterations must be positive");
}

std::vector<cplx> beurling_transform(const Lattice& lattice, std::span<const cplx> field) {
  return apply_multiplier(lattice, field, Multiplier::beurling);
}

std::vector<cplx> periodic_cauchy_transform(const Lattice& lattice, std::span<const cplx> field) {
  return apply_multiplier(lattice, field, Multiplier::cauchy);
}

std::vector<cplx> cauchy_transform(const Lattice& lattice, std::span<const cplx> field) {
  auto out = periodic_cauchy_transform(lattice, field);
  const auto corr = lattice_correction(lattice, field);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cplx z = lattice.point(i);
    out[i] += corr.mean * std::conj(z) + corr.constant + corr.value(z);
  }
  return out;
}

std::vector<cplx> plane_beurling_transform(const Lattice& lattice, std::span<const cplx> field) {
  auto out = beurling_transform(lattice, field);
  const auto corr = lattice_correction(lattice, field);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += corr.derivative(lattice.point(i));
  return out;
}

double SolverDiagnostics::contraction_ratio(std::size_t skip) const {
  double worst = 0.0;
  for (std::size_t i = skip + 1; i < history.size(); ++i) {
    if (history[i - 1] > 0.0) worst = std::max(worst, history[i] / history[i - 1]);
  }
  return worst;
}

PlanarMap::PlanarMap(Lattice lattice, std::vector<cplx> values)
    : lattice_(lattice), values_(std::move(values)) {
  differentiate();
}

PlanarMap PlanarMap::from_function(const Lattice& lattice, const std::function<cplx(cplx)>& map) {
  std::vector<cplx> v(lattice.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = map(lattice.point(i));
  return PlanarMap(lattice, std::move(v));
}

PlanarMap PlanarMap::from_values(const Lattice& lattice, std::vector<cplx> values) {
  check_square(lattice, values.size());
  return PlanarMap(lattice, std::move(values));
}

PlanarMap PlanarMap::identity(const Lattice& lattice) {
  return from_function(lattice, [](cplx z) { return z; });
}

void PlanarMap::differentiate() {
  const std::size_t g = lattice_.side;
  const double h = lattice_.step();
  dz_.assign(values_.size(), 0.0);
  dzbar_.assign(values_.size(), 0.0);
  for (std::size_t b = 0; b < g; ++b) {
    for (std::size_t a = 0; a < g; ++a) {
      const std::size_t a0 = a == 0 ? 0 : a - 1;
      const std::size_t a1 = a + 1 == g ? a : a + 1;
      const std::size_t b0 = b == 0 ? 0 : b - 1;
      const std::size_t b1 = b + 1 == g ? b : b + 1;
      const cplx fx = (values_[b * g + a1] - values_[b * g + a0]) / (static_cast<double>(a1 - a0) * h);
      const cplx fy = (values_[b1 * g + a] - values_[b0 * g + a]) / (static_cast<double>(b1 - b0) * h);
      dz_[b * g + a] = 0.5 * (fx - I * fy);
      dzbar_[b * g + a] = 0.5 * (fx + I * fy);
    }
  }
}

cplx PlanarMap::operator()(cplx z) const {
  const double lo = -lattice_.half_width;
  const double hi = lattice_.half_width - lattice_.step();
  const cplx zc{std::clamp(z.real(), lo, hi), std::clamp(z.imag(), lo, hi)};
  const cplx v = lattice_.interpolate(values_, zc);
  return zc == z ? v : z + (v - zc);
}

cplx PlanarMap::dz_at(cplx z) const { return lattice_.interpolate(dz_, z); }
cplx PlanarMap::dzbar_at(cplx z) const { return lattice_.interpolate(dzbar_, z); }

PlanarMap PlanarMap::affine(cplx a, cplx b) const {
  if (a == cplx{0.0, 0.0}) throw ArgumentError("affine: zero scale");
  PlanarMap out = *this;
  for (auto& v : out.values_) v = a * v + b;
  for (auto& v : out.dz_) v *= a;
  for (auto& v : out.dzbar_) v *= a;
  return out;
}

double normalization_radius(const Lattice& lattice) noexcept {
  return 1.0 + 0.6 * (lattice.half_width - 1.0);
}

std::pair<cplx, cplx> PlanarMap::laurent_affine(double radius) const {
  if (!(radius > 0.0) || radius >= lattice_.half_width - lattice_.step()) {
    throw ArgumentError("laurent_affine: radius outside the lattice");
  }
  constexpr std::size_t n = 256;
  std::vector<cplx> samples(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx z = std::polar(radius, 2.0 * pi * static_cast<double>(j) / static_cast<double>(n));
    samples[j] = lattice_.interpolate(values_, z);
  }
  fft::transform_1d(samples, fft::Direction::forward);
  const double inv = 1.0 / static_cast<double>(n);
  return {samples[1] * inv / radius, samples[0] * inv};
}

PlanarMap PlanarMap::renormalized() const {
  const auto [scale, offset] = laurent_affine(normalization_radius(lattice_));
  PlanarMap out = affine(1.0 / scale, -offset / scale);
  out.diag_.scale = scale;
  out.diag_.offset = offset;
  return out;
}

std::size_t PlanarMap::count_jacobian_failures(double ring) const {
  const std::size_t g = lattice_.side;
  std::size_t bad = 0;
  for (std::size_t b = 1; b + 1 < g; ++b) {
    for (std::size_t a = 1; a + 1 < g; ++a) {
      const std::size_t i = b * g + a;
      if (std::abs(std::abs(lattice_.point(i)) - 1.0) <= ring) continue;
      if (!(std::norm(dz_[i]) - std::norm(dzbar_[i]) > 0.0)) ++bad;
    }
  }
  return bad;
}

std::size_t PlanarMap::count_folded_cells() const {
  const std::size_t g = lattice_.side;
  auto area = [](cplx a, cplx b, cplx c) { return std::imag(std::conj(b - a) * (c - a)); };
  std::size_t bad = 0;
  for (std::size_t b = 0; b + 1 < g; ++b) {
    for (std::size_t a = 0; a + 1 < g; ++a) {
      const cplx p00 = values_[b * g + a];
      const cplx p10 = values_[b * g + a + 1];
      const cplx p01 = values_[(b + 1) * g + a];
      const cplx p11 = values_[(b + 1) * g + a + 1];
      if (!(area(p00, p10, p11) > 0.0) || !(area(p00, p11, p01) > 0.0)) ++bad;
    }
  }
  return bad;
}

PlanarMap solve(const BeltramiField& mu, const SolverConfig& cfg) {
  cfg.validate();
  const Lattice& lat = mu.lattice;
  check_square(lat, mu.mu.size());
  if (lat.side != cfg.side || lat.half_width != cfg.half_width) {
    throw ConfigError("solve: field lattice does not match the solver configuration");
  }
  SolverDiagnostics diag;
  diag.mu_norm = l2(mu.mu);
  diag.mu_sup = mu.sup_abs();
  if (!(diag.mu_sup < 1.0)) throw ArgumentError("solve: sup |mu| must be below 1 (truncate first)");

  // phi vanishes off the support of mu, so the plane correction is only
  // needed there during the iteration.
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < mu.mu.size(); ++i) {
    if (mu.mu[i] != cplx{0.0, 0.0}) support.push_back(i);
  }
  const auto table = multiplier_table(lat, Multiplier::beurling);
  auto beurling_on_support = [&](const std::vector<cplx>& f) {
    auto s = apply_table(lat, f, table);
    const auto corr = lattice_correction(lat, f);
    for (std::size_t i : support) s[i] += corr.derivative(lat.point(i));
    return s;
  };

  std::vector<cplx> phi = mu.mu;
  std::vector<cplx> next(phi.size(), 0.0);
  if (diag.mu_norm > 0.0) {
    bool converged = false;
    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
      const auto s = beurling_on_support(phi);
      double delta = 0.0;
      for (std::size_t i : support) {
        next[i] = mu.mu[i] * (s[i] + 1.0);
        delta += std::norm(next[i] - phi[i]);
      }
      phi.swap(next);
      delta = std::sqrt(delta);
      diag.history.push_back(delta);
      diag.iterations = it + 1;
      if (!std::isfinite(delta)) break;
      if (delta <= cfg.tol * diag.mu_norm) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw ConvergenceError("solve: Neumann iteration did not reach tolerance", diag.history);
    }
    const auto s = beurling_on_support(phi);
    double res = 0.0;
    for (std::size_t i : support) res += std::norm(phi[i] - mu.mu[i] * (1.0 + s[i]));
    diag.residual = std::sqrt(res);
  } else {
    std::fill(phi.begin(), phi.end(), cplx{0.0, 0.0});
  }

  auto values = cauchy_transform(lat, phi);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += lat.point(i);
  PlanarMap map = PlanarMap::from_values(lat, std::move(values));
  if (cfg.renormalize && diag.mu_norm > 0.0) map = map.renormalized();
  const cplx scale = map.diagnostics().scale;
  const cplx offset = map.diagnostics().offset;
  map.diagnostics() = std::move(diag);
  map.diagnostics().scale = scale;
  map.diagnostics().offset = offset;
  map.diagnostics().jacobian_failures = map.count_jacobian_failures(2.0 * lat.step());
  map.diagnostics().folded_cells = map.count_folded_cells();
  return map;
}

ConformalityResidual conformality_residual(const PlanarMap& map, double inner, double outer) {
  if (!(inner > 0.0 && outer > inner)) throw ArgumentError("conformality_residual: bad region");
  const auto& lat = map.lattice();
  const std::size_t g = lat.side;
  std::vector<double> ratios;
  ConformalityResidual out;
  for (std::size_t b = 1; b + 1 < g; ++b) {
    for (std::size_t a = 1; a + 1 < g; ++a) {
      const cplx z = lat.point(a, b);
      const double r = std::abs(z);
      if (r < inner || r > outer) continue;
      const std::size_t i = b * g + a;
      const double d = std::abs(map.dz_grid()[i]);
      if (!(d > 1e-300)) {
        ++out.skipped;
        continue;
      }
      ratios.push_back(std::abs(map.dzbar_grid()[i]) / d);
    }
  }
  out.points = ratios.size();
  if (ratios.empty()) return out;
  auto mid = ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2);
  std::nth_element(ratios.begin(), mid, ratios.end());
  out.median = *mid;
  return out;
}

}  // namespace rweld
