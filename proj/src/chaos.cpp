#include "rweld/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rweld/error.hpp"
#include "rweld/parallel.hpp"
#include "rweld/stats.hpp"

namespace rweld {

ChaosParams::ChaosParams(double beta, bool exploratory)
    : beta_(beta), exploratory_(exploratory) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ConfigError("chaos: beta must be a finite non-negative number");
  }
  if (beta * beta >= 2.0 && !exploratory) {
    std::ostringstream msg;
    msg << "chaos: beta = " << beta << " has beta^2 >= 2; the welding homeomorphism is only "
        << "continuous for beta^2 < 2 (pass the exploratory flag for measure-only runs)";
    throw ConfigError(msg.str());
  }
}

double ChaosParams::critical_moment() const noexcept {
  if (beta_ == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 / (beta_ * beta_);
}

double ChaosMeasure::max_cell_mass() const noexcept {
  return cell_masses.empty() ? 0.0 : *std::max_element(cell_masses.begin(), cell_masses.end());
}

ChaosMeasure build_measure(const FieldTrace& trace, const ChaosParams& params) {
  const std::size_t m = trace.grid_size();
  if (m == 0) throw ConfigError("chaos: trace has an empty grid");
  if (m < 2 * trace.modes()) throw ConfigError("chaos: grid does not resolve the cutoff");

  ChaosMeasure out;
  out.params = params;
  out.modes = trace.modes();
  out.seed = trace.seed();
  out.cell_masses.resize(m);

  const double beta = params.beta();
  const double log_cell = -std::log(static_cast<double>(m));
  const double shift = 0.5 * beta * beta * trace.variance();
  const auto& x = trace.grid();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double mass = beta == 0.0 ? 1.0 / static_cast<double>(m)
                                    : std::exp(log_cell + beta * x[i] - shift);
    if (!std::isfinite(mass)) throw NumericError("chaos: non-finite cell mass");
    out.cell_masses[i] = mass;
    total += mass;
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericError("chaos: degenerate total mass");
  out.total_mass = total;
  return out;
}

ChaosMeasure sample_measure(const ChaosParams& params, std::size_t grid_size,
                            std::uint64_t seed) {
  return build_measure(sample_trace(grid_size / 2, grid_size, seed), params);
}

double interval_mass(const ChaosMeasure& measure, double a, double b) {
  if (a > b) throw ArgumentError("interval_mass: a > b");
  if (a < 0.0 || b > 1.0) throw ArgumentError("interval_mass: interval must lie in [0, 1]");
  if (a == b) return 0.0;
  const auto m = static_cast<double>(measure.grid_size());
  const auto first = static_cast<std::size_t>(std::floor(a * m));
  const auto last = std::min(measure.grid_size(), static_cast<std::size_t>(std::ceil(b * m)));
  // Sum only the touched cells so short intervals stay accurate.
  double sum = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    const double lo = std::max(a * m, static_cast<double>(i));
    const double hi = std::min(b * m, static_cast<double>(i + 1));
    if (hi > lo) sum += (hi - lo) * measure.cell_masses[i];
  }
  return sum;
}

ChaosMeasure rotate_cells(const ChaosMeasure& measure, std::size_t cells) {
  ChaosMeasure out = measure;
  const std::size_t m = measure.grid_size();
  for (std::size_t i = 0; i < m; ++i) out.cell_masses[i] = measure.cell_masses[(i + cells) % m];
  return out;
}

MomentScaling moment_scaling(const ChaosParams& params, double q, const MomentStudyConfig& cfg) {
  if (q >= params.critical_moment()) {
    std::ostringstream msg;
    msg << "moment_scaling: q = " << q << " is not below 2/beta^2 = " << params.critical_moment()
        << "; E[tau(I)^q] is infinite there, so the estimator is meaningless";
    throw ArgumentError(msg.str());
  }
  if (cfg.levels.size() < 2) throw ArgumentError("moment_scaling: need at least two levels");
  for (int level : cfg.levels) {
    if (level < 0 || (std::size_t{1} << level) > cfg.grid_size) {
      throw ArgumentError("moment_scaling: level finer than the grid");
    }
  }
  if (cfg.samples == 0) throw ArgumentError("moment_scaling: samples must be positive");

  const std::size_t nlev = cfg.levels.size();
  // Per-sample spatial means of tau(I)^q for each level.
  auto per_sample = parallel_map(
      cfg.samples,
      [&](std::size_t s) {
        const auto measure = sample_measure(params, cfg.grid_size, cfg.seed + s);
        std::vector<double> prefix(measure.grid_size() + 1, 0.0);
        for (std::size_t i = 0; i < measure.grid_size(); ++i) {
          prefix[i + 1] = prefix[i] + measure.cell_masses[i];
        }
        std::vector<double> means(nlev, 0.0);
        for (std::size_t l = 0; l < nlev; ++l) {
          const std::size_t count = std::size_t{1} << cfg.levels[l];
          const std::size_t width = measure.grid_size() / count;
          double acc = 0.0;
          for (std::size_t j = 0; j < count; ++j) {
            acc += std::pow(prefix[(j + 1) * width] - prefix[j * width], q);
          }
          means[l] = acc / static_cast<double>(count);
        }
        return means;
      },
      cfg.workers);

  auto fit_range = [&](std::size_t begin, std::size_t end) {
    std::vector<double> xs(nlev), ys(nlev);
    for (std::size_t l = 0; l < nlev; ++l) {
      double acc = 0.0;
      for (std::size_t s = begin; s < end; ++s) acc += per_sample[s][l];
      xs[l] = -static_cast<double>(cfg.levels[l]) * std::log(2.0);
      ys[l] = std::log(acc / static_cast<double>(end - begin));
    }
    return std::make_pair(stats::least_squares(xs, ys), std::make_pair(xs, ys));
  };

  MomentScaling out;
  auto [fit, pts] = fit_range(0, cfg.samples);
  out.slope = fit.slope;
  out.log_sizes = pts.first;
  out.log_moments = pts.second;

  const std::size_t batches = std::min(cfg.batches, cfg.samples);
  if (batches >= 2) {
    std::vector<double> slopes;
    const std::size_t per = cfg.samples / batches;
    for (std::size_t b = 0; b < batches; ++b) {
      slopes.push_back(fit_range(b * per, (b + 1) * per).first.slope);
    }
    out.std_error = stats::summarize(slopes).std_error;
  } else {
    out.std_error = fit.slope_std_error;
  }
  return out;
}

stats::Summary total_mass_study(const ChaosParams& params, std::size_t grid_size, std::size_t samples,
                                std::uint64_t seed, unsigned workers) {
  if (samples < 2) throw ArgumentError("total_mass_study: need at least two samples");
  const auto masses = parallel_map(
      samples, [&](std::size_t i) { return sample_measure(params, grid_size, seed + i).total_mass; }, workers);
  return stats::summarize(masses);
}

}  // namespace rweld
