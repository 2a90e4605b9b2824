#include "rweld/lehto.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rweld/chaos.hpp"
#include "rweld/error.hpp"
#include "rweld/extension.hpp"
#include "rweld/homeo.hpp"
#include "rweld/parallel.hpp"
#include "rweld/welding.hpp"

namespace rweld {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Ring {
  double mean = 0.0;  // angular mean of K over the finite nodes
  std::size_t dropped = 0;
};

// Angular mean of K over n equispaced nodes; stride > 1 uses every
// stride-th node (the half-resolution rule reuses these evaluations).
Ring ring_mean(const std::vector<double>& values, std::size_t stride) {
  Ring r;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t j = 0; j < values.size(); j += stride) {
    if (std::isfinite(values[j])) {
      sum += values[j];
      ++used;
    } else {
      ++r.dropped;
    }
  }
  r.mean = used > 0 ? sum / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  return r;
}

std::vector<double> ring_values(const DistortionFn& K, cplx w, double rho, std::size_t n_theta) {
  std::vector<double> v(n_theta);
  for (std::size_t j = 0; j < n_theta; ++j) {
    const double theta = two_pi * static_cast<double>(j) / static_cast<double>(n_theta);
    v[j] = K(w + std::polar(rho, theta));
  }
  return v;
}

// Trapezoid in u = log rho of f(u) = 1/(2 pi mean K) with uniform spacing.
double trapezoid(const std::vector<double>& f, double du, std::size_t stride) {
  double s = 0.0;
  const std::size_t last = f.size() - 1;
  for (std::size_t i = 0; i <= last; i += stride) {
    const double weight = (i == 0 || i == last) ? 0.5 : 1.0;
    s += weight * f[i];
  }
  return s * du * static_cast<double>(stride);
}

double safe_distortion(const DiskExtension& ext, cplx z) {
  try {
    return ext.distortion(z);
  } catch (const NumericError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

void Annulus::validate() const {
  if (!(inner > 0.0) || !(outer > inner) || !std::isfinite(outer)) {
    throw ArgumentError("Annulus: need 0 < inner < outer");
  }
}

LehtoEstimate lehto_integral(const DistortionFn& K, const Annulus& ann, std::size_t n_rho,
                             std::size_t n_theta) {
  ann.validate();
  if (n_rho < 2 || n_theta < 2 || n_rho % 2 != 0 || n_theta % 2 != 0) {
    throw ArgumentError("lehto_integral: node counts must be even and >= 2");
  }
  const double u0 = std::log(ann.inner);
  const double du = (std::log(ann.outer) - u0) / static_cast<double>(n_rho);

  LehtoEstimate est;
  est.n_rho = n_rho;
  est.n_theta = n_theta;
  std::vector<double> fine(n_rho + 1), coarse(n_rho + 1);
  for (std::size_t i = 0; i <= n_rho; ++i) {
    const double rho = std::exp(u0 + du * static_cast<double>(i));
    const auto values = ring_values(K, ann.center, rho, n_theta);
    const Ring a = ring_mean(values, 1);
    const Ring b = ring_mean(values, 2);
    est.dropped += a.dropped;
    fine[i] = 1.0 / (two_pi * a.mean);
    coarse[i] = 1.0 / (two_pi * b.mean);
  }
  const std::size_t total = (n_rho + 1) * n_theta;
  est.valid = static_cast<double>(est.dropped) <= 0.01 * static_cast<double>(total);
  est.value = trapezoid(fine, du, 1);
  est.error = std::abs(est.value - trapezoid(coarse, du, 2));
  if (!std::isfinite(est.value)) {
    est.valid = false;
    est.value = 0.0;
  }
  return est;
}

std::vector<LehtoEstimate> annulus_decomposition(const DistortionFn& K, cplx w, int p, int N,
                                                 std::size_t n_rho, std::size_t n_theta) {
  if (p < 1) throw ArgumentError("annulus_decomposition: p must be >= 1 (annuli would overlap)");
  if (N < 1) throw ArgumentError("annulus_decomposition: N must be >= 1");
  std::vector<LehtoEstimate> out;
  out.reserve(static_cast<std::size_t>(N));
  for (int k = 1; k <= N; ++k) {
    const double r = std::ldexp(1.0, -p * k);
    out.push_back(lehto_integral(K, Annulus{w, r, 2.0 * r}, n_rho, n_theta));
  }
  return out;
}

double LehtoSample::total(std::size_t n) const {
  if (n > segment.size()) throw ArgumentError("LehtoSample::total: N beyond the sampled range");
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += segment[k];
  return s;
}

void LehtoStudyConfig::validate() const {
  if (!(beta * beta < 2.0) || beta < 0.0) throw ConfigError("lehto study: need 0 <= beta < sqrt 2");
  if (p < 1) throw ConfigError("lehto study: p must be >= 1");
  if (n_max < 1) throw ConfigError("lehto study: n_max must be >= 1");
  if (samples == 0) throw ConfigError("lehto study: samples must be positive");
  if (grid_size < 4 || (grid_size & (grid_size - 1)) != 0) {
    throw ConfigError("lehto study: grid size must be a power of two");
  }
  if (quadrature.nodes_per_octave < 2 || quadrature.n_theta < 4 || quadrature.n_theta % 2 != 0) {
    throw ConfigError("lehto study: quadrature too coarse");
  }
  if (std::abs(std::abs(center) - 1.0) > 1e-12) throw ConfigError("lehto study: w must lie on the circle");
}

LehtoSample lehto_sample(const DistortionFn& K, cplx w, int p, int n_max, const LehtoQuadrature& q) {
  if (p < 1 || n_max < 1) throw ArgumentError("lehto_sample: need p, N >= 1");
  // Radial nodes at rho = 2^{-i/n}, i = 0..p n n_max; the segment
  // [rho^k, rho^{k-1}] and the annulus [rho^k, 2 rho^k] both start and end on
  // nodes, so every quantity is a partial trapezoid sum over one pass.
  const std::size_t n = q.nodes_per_octave;
  const std::size_t per_segment = static_cast<std::size_t>(p) * n;
  const std::size_t count = per_segment * static_cast<std::size_t>(n_max) + 1;
  const double du = std::log(2.0) / static_cast<double>(n);
  std::vector<double> f(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double rho = std::exp2(-static_cast<double>(i) / static_cast<double>(n));
    const Ring r = ring_mean(ring_values(K, w, rho, q.n_theta), 1);
    f[i] = 1.0 / (two_pi * r.mean);
  }
  auto piece = [&](std::size_t from, std::size_t to) {
    double s = 0.5 * (f[from] + f[to]);
    for (std::size_t i = from + 1; i < to; ++i) s += f[i];
    return s * du;
  };
  LehtoSample out;
  for (int k = 1; k <= n_max; ++k) {
    const std::size_t end = per_segment * static_cast<std::size_t>(k);
    out.segment.push_back(piece(end - per_segment, end));
    out.lk.push_back(piece(end - n, end));
  }
  return out;
}

std::vector<LehtoSample> lehto_samples(const LehtoStudyConfig& cfg) {
  cfg.validate();
  const ChaosParams params(cfg.beta);
  return parallel_map(
      cfg.samples,
      [&](std::size_t i) {
        const auto measure = sample_measure(params, cfg.grid_size, cfg.seed + i);
        const auto ext = beurling_ahlfors_extend(build_homeo(measure));
        const DistortionFn K = [&](cplx z) { return safe_distortion(ext, z); };
        return lehto_sample(K, cfg.center, cfg.p, cfg.n_max, cfg.quadrature);
      },
      cfg.workers);
}

TailEstimate tail_from_samples(const std::vector<LehtoSample>& samples, double beta, int p,
                               double delta, const std::vector<int>& n_list) {
  if (!(delta > 0.0)) throw ArgumentError("tail: delta must be positive");
  if (samples.empty()) throw ArgumentError("tail: no samples");
  if (n_list.empty()) throw ArgumentError("tail: empty N list");
  TailEstimate out;
  out.beta = beta;
  out.p = p;
  out.delta = delta;
  std::vector<double> xs, ys;
  for (int n : n_list) {
    if (n < 1) throw ArgumentError("tail: N must be >= 1");
    TailPoint pt;
    pt.n = n;
    pt.trials = samples.size();
    const double threshold = static_cast<double>(n) * delta;
    for (const auto& s : samples) {
      const double L = s.total(static_cast<std::size_t>(n));
      // A non-finite L (every node of some ring dropped) is not a hit.
      if (std::isfinite(L) && L < threshold) ++pt.hits;
    }
    pt.p_hat = static_cast<double>(pt.hits) / static_cast<double>(pt.trials);
    pt.wilson = stats::wilson(pt.hits, pt.trials);
    if (pt.hits > 0) {
      xs.push_back(n);
      ys.push_back(std::log2(pt.p_hat));
    }
    out.points.push_back(pt);
  }
  if (xs.size() >= 2) {
    out.slope = stats::least_squares(xs, ys).slope;
  } else {
    out.slope_is_bound = true;
    out.slope = -std::numeric_limits<double>::infinity();
    for (const auto& pt : out.points) {
      out.slope = std::max(out.slope, std::log2(pt.wilson.hi) / static_cast<double>(pt.n));
    }
  }
  return out;
}

TailEstimate tail_probability(const LehtoStudyConfig& cfg, double delta, const std::vector<int>& n_list) {
  if (cfg.samples < 1000) throw ConfigError("tail_probability: need at least 1000 samples");
  for (int n : n_list) {
    if (n > cfg.n_max) throw ConfigError("tail_probability: N exceeds n_max");
  }
  return tail_from_samples(lehto_samples(cfg), cfg.beta, cfg.p, delta, n_list);
}

LkStatistics lk_from_samples(const std::vector<LehtoSample>& samples, const std::vector<int>& ks) {
  if (samples.size() < 10) throw ArgumentError("lk statistics: need at least 10 samples");
  if (ks.empty()) throw ArgumentError("lk statistics: empty k list");
  static constexpr double quantiles[] = {0.01, 0.02, 0.05, 0.10, 0.20};

  LkStatistics out;
  out.ks = ks;
  out.samples = samples.size();
  const std::size_t m = samples.size();
  std::vector<std::vector<double>> series;
  for (int k : ks) {
    if (k < 1 || static_cast<std::size_t>(k) > samples.front().lk.size()) {
      throw ArgumentError("lk statistics: k outside the sampled range");
    }
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = samples[i].lk[static_cast<std::size_t>(k - 1)];
    series.push_back(v);

    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> eps, cdf;
    for (double q : quantiles) {
      const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(m)));
      if (idx == 0 || idx >= m) continue;
      const double e = sorted[idx];
      const auto below = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), e) - sorted.begin());
      if (below == 0) {
        out.widened = true;
        continue;
      }
      if (!eps.empty() && e <= eps.back()) continue;
      eps.push_back(e);
      cdf.push_back(static_cast<double>(below) / static_cast<double>(m));
    }
    double exponent = 0.0;
    if (eps.size() >= 2) {
      std::vector<double> lx(eps.size()), ly(eps.size());
      for (std::size_t i = 0; i < eps.size(); ++i) {
        lx[i] = std::log(eps[i]);
        ly[i] = std::log(cdf[i]);
      }
      exponent = stats::least_squares(lx, ly).slope;
    } else {
      out.widened = true;
    }
    out.cdf_exponent.push_back(exponent);
    out.eps_grid.push_back(std::move(eps));
    out.cdf.push_back(std::move(cdf));
  }
  out.correlation.assign(ks.size(), std::vector<double>(ks.size(), 0.0));
  for (std::size_t a = 0; a < ks.size(); ++a) {
    for (std::size_t b = 0; b < ks.size(); ++b) {
      out.correlation[a][b] = a == b ? 1.0 : stats::correlation(series[a], series[b]);
    }
  }
  return out;
}

LkStatistics lk_statistics(const LehtoStudyConfig& cfg, const std::vector<int>& ks) {
  int kmax = 0;
  for (int k : ks) kmax = std::max(kmax, k);
  LehtoStudyConfig c = cfg;
  c.n_max = std::max(c.n_max, kmax);
  return lk_from_samples(lehto_samples(c), ks);
}

double diameter(const std::vector<cplx>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, std::norm(pts[i] - pts[j]));
  }
  return std::sqrt(best);
}

ModulusCheck modulus_bound_check(const std::function<cplx(cplx)>& F, const Annulus& ann, double L,
                                 std::size_t samples) {
  ann.validate();
  if (samples < 8) throw ArgumentError("modulus_bound_check: need at least 8 samples");
  if (!(L >= 0.0)) throw ArgumentError("modulus_bound_check: L must be non-negative");
  std::vector<cplx> in(samples + 1), out(samples + 1);
  for (std::size_t j = 0; j < samples; ++j) {
    const double theta = two_pi * static_cast<double>(j) / static_cast<double>(samples);
    in[j] = F(ann.center + std::polar(ann.inner, theta));
    out[j] = F(ann.center + std::polar(ann.outer, theta));
  }
  in[samples] = in[0];
  out[samples] = out[0];
  ModulusCheck c;
  c.injective = is_simple_polygon(in) && is_simple_polygon(out);
  in.pop_back();
  out.pop_back();
  c.inner_diameter = diameter(in);
  c.outer_diameter = diameter(out);
  c.lehto = L;
  c.classical_bound = 16.0 * std::exp(-two_pi * L) * c.outer_diameter;
  c.sharp_bound = 16.0 * std::exp(-2.0 * std::numbers::pi * std::numbers::pi * L) * c.outer_diameter;
  c.classical_ok = c.inner_diameter <= c.classical_bound;
  c.sharp_ok = c.inner_diameter <= c.sharp_bound;
  return c;
}

}  // namespace rweld
