// rweld: command-line driver for the welding pipeline and its Monte Carlo
// studies.

#include <bit>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "cli_support.hpp"
#include "rweld/chaos.hpp"
#include "rweld/error.hpp"
#include "rweld/field.hpp"
#include "rweld/io.hpp"
#include "rweld/lehto.hpp"
#include "rweld/welding.hpp"

using namespace rweld;
using rweld::cli::kExitError;
using rweld::cli::kExitFlagged;
using rweld::cli::kExitOk;
using nlohmann::json;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
std::string num(double v) { return io::format_number(v); }

// Finite doubles as numbers, the rest as strings, so the JSON stays valid.
json jnum(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

int depth_for(std::size_t cells, int cap) {
  return std::min(cap, static_cast<int>(std::bit_width(cells)) - 3);
}

void write_csv(cli::Run& run, const std::string& file, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  io::CsvWriter w(out, header);
  for (const auto& r : rows) w.row(r);
  io::write_text(run.path(file), out.str());
  run.wrote(file);
}

struct Common {
  std::string out = "rweld-out";
  std::string config;
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

void add_common(cli::Params& p, Common& c, bool with_seed = true) {
  p.add("out", c.out, "output directory");
  p.app()->add_option("--config", c.config, "flat key=value file or a manifest JSON to replay");
  if (with_seed) p.add("seed", c.seed, "base seed (overridden by RWELD_SEED)");
  p.add("workers", c.workers, "worker threads, 0 = available parallelism");
}

std::uint64_t effective_seed(cli::Run& run, const Common& c) {
  bool env = false;
  const std::uint64_t s = cli::Run::resolve_seed(c.seed, &env);
  run.results()["seed"] = s;
  run.results()["seed_source"] = env ? "env" : "flag";
  run.set_config("seed", std::to_string(s));
  return s;
}

// ---------------------------------------------------------------- weld

struct WeldArgs {
  Common common;
  double beta = 0.7;
  std::size_t cells = std::size_t{1} << 14;
  std::size_t grid = 1024;
  double eps = 0.05;
  double half_width = 2.0;
  double tol = 1e-8;
  std::size_t max_iterations = 5000;
  std::size_t curve_samples = 4096;
  bool exploratory = false;
};

void setup_weld(CLI::App& sub, WeldArgs& a, cli::Params& p) {
  p.add("beta", a.beta, "chaos parameter");
  p.add("cells", a.cells, "circle cells M (power of two)");
  p.add("grid", a.grid, "solver lattice side G (power of two)");
  p.add("eps", a.eps, "truncation mu -> (1 - eps) mu");
  p.add("half-width", a.half_width, "lattice covers [-S, S]^2");
  p.add("tol", a.tol, "Neumann iteration tolerance");
  p.add("max-iterations", a.max_iterations, "Neumann iteration cap");
  p.add("curve-samples", a.curve_samples, "points on the welded curve");
  p.flag("exploratory", a.exploratory, "allow beta^2 >= 2");
  add_common(p, a.common);
  (void)sub;
}

int run_weld(const WeldArgs& a, const cli::Params& p) {
  cli::Run run("weld", p, a.common.out);
  const auto seed = effective_seed(run, a.common);
  const ChaosParams params(a.beta, a.exploratory);
  const auto measure = sample_measure(params, a.cells, seed);
  const auto h = build_homeo(measure);

  WeldOptions opts;
  opts.solver.side = a.grid;
  opts.solver.eps = a.eps;
  opts.solver.half_width = a.half_width;
  opts.solver.tol = a.tol;
  opts.solver.max_iterations = a.max_iterations;
  opts.curve_samples = a.curve_samples;
  const auto res = weld(h, opts, {a.beta, seed, a.cells});
  const auto& d = res.map.diagnostics();

  std::vector<std::vector<std::string>> rows;
  for (std::size_t j = 0; j < res.curve.size(); ++j) {
    rows.push_back({std::to_string(j), num(res.params[j]), num(res.curve[j].real()), num(res.curve[j].imag())});
  }
  write_csv(run, "weld_curve.csv", {"j", "t", "x", "y"}, rows);
  {
    std::ostringstream svg;
    io::write_svg(svg, {res.curve}, {io::SvgStyle{}});
    io::write_text(run.path("weld_curve.svg"), svg.str());
    run.wrote("weld_curve.svg");
  }

  auto& r = run.results();
  r["iterations"] = d.iterations;
  r["contraction_ratio"] = jnum(d.contraction_ratio());
  r["solver_residual"] = jnum(d.residual);
  r["mu_norm"] = jnum(d.mu_norm);
  r["mu_sup"] = jnum(d.mu_sup);
  r["clipped_points"] = res.mu.clipped;
  r["jacobian_failures"] = d.jacobian_failures;
  r["folded_cells"] = d.folded_cells;
  r["laurent_scale"] = jnum(std::abs(d.scale));
  r["exterior_conformality"] = jnum(res.conformality);
  r["simple"] = res.simple;
  r["flags"] = res.flags;
  r["hausdorff_to_circle"] = jnum(hausdorff_distance(res.curve, unit_circle(res.curve.size() - 1)));
  r["holder_homeo"] = jnum(holder_exponent(h, depth_for(a.cells, 14)));
  r["holder_curve"] = jnum(curve_holder_exponent(res, depth_for(a.curve_samples, 12)));
  if (res.flagged()) {
    for (const auto& f : res.flags) std::cerr << "weld: flagged: " << f << "\n";
    return run.finish(kExitFlagged, "flagged");
  }
  r["welding_defect"] = jnum(verify_welding(res));
  return run.finish(kExitOk, "ok");
}

// ---------------------------------------------------------------- tail

struct TailArgs {
  Common common;
  double beta = 1.0;
  int p = 3;
  double delta = 0.0;
  std::string ns = "2,3,4,5";
  std::string ks = "1,2,3,4";
  std::size_t samples = 10000;
  std::size_t cells = std::size_t{1} << 20;
  std::size_t nodes_per_octave = 8;
  std::size_t n_theta = 128;
};

void setup_tail(TailArgs& a, cli::Params& p) {
  p.add("beta", a.beta, "chaos parameter");
  p.add("p", a.p, "octaves per annulus segment");
  p.add("delta", a.delta, "threshold: event L < N delta")->required();
  p.add("ns", a.ns, "segment counts N, comma separated");
  p.add("ks", a.ks, "indices k for the L_k statistics");
  p.add("samples", a.samples, "pipeline samples");
  p.add("cells", a.cells, "circle cells M (power of two)");
  p.add("nodes-per-octave", a.nodes_per_octave, "radial quadrature nodes per octave");
  p.add("n-theta", a.n_theta, "angular quadrature nodes");
  add_common(p, a.common);
}

int run_tail(const TailArgs& a, const cli::Params& p) {
  cli::Run run("tail", p, a.common.out);
  const auto ns = cli::parse_int_list(a.ns);
  const auto ks = cli::parse_int_list(a.ks);
  LehtoStudyConfig cfg;
  cfg.beta = a.beta;
  cfg.p = a.p;
  cfg.n_max = std::max(*std::max_element(ns.begin(), ns.end()), *std::max_element(ks.begin(), ks.end()));
  cfg.samples = a.samples;
  cfg.grid_size = a.cells;
  cfg.seed = effective_seed(run, a.common);
  cfg.quadrature = {a.nodes_per_octave, a.n_theta};
  cfg.workers = a.common.workers;
  cfg.validate();
  if (!(a.delta > 0.0)) throw ConfigError("tail: --delta must be positive");

  const auto samples = lehto_samples(cfg);
  const auto tail = tail_from_samples(samples, a.beta, a.p, a.delta, ns);
  const auto lk = lk_from_samples(samples, ks);

  std::vector<std::vector<std::string>> rows;
  for (const auto& pt : tail.points) {
    rows.push_back({std::to_string(pt.n), std::to_string(pt.hits), std::to_string(pt.trials), num(pt.p_hat),
                    num(pt.wilson.lo), num(pt.wilson.hi)});
  }
  write_csv(run, "tail_probabilities.csv", {"N", "hits", "trials", "p_hat", "wilson_lo", "wilson_hi"}, rows);

  rows.clear();
  for (std::size_t i = 0; i < lk.ks.size(); ++i) {
    for (std::size_t j = 0; j < lk.eps_grid[i].size(); ++j) {
      rows.push_back({std::to_string(lk.ks[i]), num(lk.eps_grid[i][j]), num(lk.cdf[i][j])});
    }
  }
  write_csv(run, "tail_lk_cdf.csv", {"k", "eps", "cdf"}, rows);

  rows.clear();
  std::vector<std::string> header{"sample"};
  for (int k = 1; k <= cfg.n_max; ++k) header.push_back("segment_" + std::to_string(k));
  for (int k = 1; k <= cfg.n_max; ++k) header.push_back("lk_" + std::to_string(k));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (double v : samples[i].segment) row.push_back(num(v));
    for (double v : samples[i].lk) row.push_back(num(v));
    rows.push_back(std::move(row));
  }
  write_csv(run, "tail_samples.csv", header, rows);

  auto& r = run.results();
  r["slope"] = jnum(tail.slope);
  r["slope_is_bound"] = tail.slope_is_bound;
  r["lk_ks"] = lk.ks;
  json exps = json::array();
  for (double e : lk.cdf_exponent) exps.push_back(jnum(e));
  r["lk_cdf_exponent"] = exps;
  json corr = json::array();
  for (const auto& row : lk.correlation) {
    json jr = json::array();
    for (double v : row) jr.push_back(jnum(v));
    corr.push_back(jr);
  }
  r["lk_correlation"] = corr;
  r["lk_quantiles_widened"] = lk.widened;
  if (!std::isfinite(tail.slope)) return run.finish(kExitFlagged, "invalid statistics");
  return run.finish(kExitOk, "ok");
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  Common common;
  std::string kind;
  double beta = 0.7;
  std::size_t modes = 4096;
  std::string lags = "1/2,1/6";
  std::string q = "2";
  std::size_t cells = std::size_t{1} << 16;
  std::size_t samples = 10000;
  std::size_t batches = 10;
  std::string levels = "4,5,6,7,8,9,10";
};

void setup_stats(StatsArgs& a, cli::Params& p) {
  p.add("kind", a.kind, "covariance, moments or mass")
      ->required()
      ->check(CLI::IsMember({"covariance", "moments", "mass"}));
  p.add("beta", a.beta, "chaos parameter (moments, mass)");
  p.add("modes", a.modes, "field modes (covariance)");
  p.add("lags", a.lags, "lags, comma separated, fractions allowed (covariance)");
  p.add("q", a.q, "moment orders, comma separated (moments)");
  p.add("cells", a.cells, "circle cells M (moments, mass)");
  p.add("samples", a.samples, "Monte Carlo samples");
  p.add("batches", a.batches, "batches for the slope standard error (moments)");
  p.add("levels", a.levels, "dyadic levels (moments)");
  add_common(p, a.common);
}

int run_stats(const StatsArgs& a, const cli::Params& p) {
  cli::Run run("stats", p, a.common.out);
  const auto seed = effective_seed(run, a.common);
  auto& r = run.results();
  std::vector<std::vector<std::string>> rows;
  if (a.kind == "covariance") {
    json arr = json::array();
    for (double lag : cli::parse_number_list(a.lags)) {
      const auto c = covariance_study(a.modes, lag, a.samples, seed, a.common.workers);
      const double half = 1.96 * c.std_error;
      rows.push_back({num(lag), num(c.value), num(c.std_error), num(c.value - half), num(c.value + half),
                      num(c.truncated), num(c.exact)});
      arr.push_back({{"lag", lag}, {"value", jnum(c.value)}, {"ci95", {jnum(c.value - half), jnum(c.value + half)}},
                     {"exact", jnum(c.exact)}});
    }
    write_csv(run, "stats_covariance.csv", {"lag", "value", "std_error", "ci_lo", "ci_hi", "truncated", "exact"},
              rows);
    r["covariance"] = arr;
  } else if (a.kind == "moments") {
    const ChaosParams params(a.beta);
    MomentStudyConfig cfg;
    cfg.grid_size = a.cells;
    cfg.samples = a.samples;
    cfg.batches = a.batches;
    cfg.levels = cli::parse_int_list(a.levels);
    cfg.seed = seed;
    cfg.workers = a.common.workers;
    json arr = json::array();
    std::vector<std::vector<std::string>> scale_rows;
    for (double q : cli::parse_number_list(a.q)) {
      const auto m = moment_scaling(params, q, cfg);
      rows.push_back({num(q), num(m.slope), num(m.std_error)});
      for (std::size_t i = 0; i < m.log_sizes.size(); ++i) {
        scale_rows.push_back({num(q), num(m.log_sizes[i]), num(m.log_moments[i])});
      }
      arr.push_back({{"q", q}, {"slope", jnum(m.slope)}, {"std_error", jnum(m.std_error)}});
    }
    write_csv(run, "stats_moments.csv", {"q", "slope", "std_error"}, rows);
    write_csv(run, "stats_moment_scales.csv", {"q", "log_size", "log_moment"}, scale_rows);
    r["moments"] = arr;
  } else {
    const auto s = total_mass_study(ChaosParams(a.beta), a.cells, a.samples, seed, a.common.workers);
    rows.push_back({num(a.beta), num(s.mean), num(s.std_error), num(s.variance), std::to_string(s.count)});
    write_csv(run, "stats_mass.csv", {"beta", "mean", "std_error", "variance", "samples"}, rows);
    r["mass"] = {{"mean", jnum(s.mean)}, {"std_error", jnum(s.std_error)}};
  }
  return run.finish(kExitOk, "ok");
}

// ---------------------------------------------------------------- gmc

struct GmcArgs {
  Common common;
  double beta = 0.7;
  std::size_t cells = std::size_t{1} << 14;
  bool exploratory = false;
};

void setup_gmc(GmcArgs& a, cli::Params& p) {
  p.add("beta", a.beta, "chaos parameter");
  p.add("cells", a.cells, "circle cells M (power of two)");
  p.flag("exploratory", a.exploratory, "allow beta^2 >= 2");
  add_common(p, a.common);
}

int run_gmc(const GmcArgs& a, const cli::Params& p) {
  cli::Run run("gmc", p, a.common.out);
  const auto seed = effective_seed(run, a.common);
  const ChaosParams params(a.beta, a.exploratory);
  const auto trace = sample_trace(a.cells / 2, a.cells, seed);
  const auto measure = build_measure(trace, params);
  const auto h = build_homeo(measure);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t j = 0; j < a.cells; ++j) rows.push_back({num(trace.grid_point(j)), num(trace.grid()[j])});
  write_csv(run, "gmc_trace.csv", {"t", "X"}, rows);
  rows.clear();
  const double w = 1.0 / static_cast<double>(a.cells);
  double biggest = 0.0;
  for (std::size_t j = 0; j < a.cells; ++j) {
    rows.push_back({std::to_string(j), num(j * w), num((j + 1) * w), num(measure.cell_masses[j])});
    biggest = std::max(biggest, measure.cell_masses[j]);
  }
  write_csv(run, "gmc_cells.csv", {"j", "t_left", "t_right", "mass"}, rows);
  rows.clear();
  for (std::size_t j = 0; j <= a.cells; ++j) rows.push_back({num(j * w), num(h.knots()[j])});
  write_csv(run, "gmc_homeo.csv", {"t", "h"}, rows);

  auto& r = run.results();
  r["total_mass"] = jnum(measure.total_mass);
  r["max_cell_fraction"] = jnum(biggest / measure.total_mass);
  if (!a.exploratory || a.beta * a.beta < 2.0) r["holder_homeo"] = jnum(holder_exponent(h, depth_for(a.cells, 14)));
  return run.finish(kExitOk, "ok");
}

// ---------------------------------------------------------------- lehto

struct LehtoArgs {
  Common common;
  double beta = 1.0;
  std::size_t cells = std::size_t{1} << 18;
  double t = 0.0;
  int p = 3;
  int n = 5;
  std::size_t nodes_per_octave = 8;
  std::size_t n_theta = 128;
};

void setup_lehto(LehtoArgs& a, cli::Params& p) {
  p.add("beta", a.beta, "chaos parameter");
  p.add("cells", a.cells, "circle cells M (power of two)");
  p.add("t", a.t, "boundary point exp(2 pi i t)");
  p.add("p", a.p, "octaves per segment");
  p.add("n", a.n, "segments");
  p.add("nodes-per-octave", a.nodes_per_octave, "radial quadrature nodes per octave");
  p.add("n-theta", a.n_theta, "angular quadrature nodes");
  add_common(p, a.common);
}

int run_lehto(const LehtoArgs& a, const cli::Params& p) {
  cli::Run run("lehto", p, a.common.out);
  const auto seed = effective_seed(run, a.common);
  if (a.p < 1 || a.n < 1) throw ConfigError("lehto: p and n must be positive");
  const auto ext = beurling_ahlfors_extend(build_homeo(sample_measure(ChaosParams(a.beta), a.cells, seed)));
  std::size_t failures = 0;
  const DistortionFn K = [&](cplx z) {
    try {
      return ext.distortion(z);
    } catch (const NumericError&) {
      ++failures;
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  const cplx w = std::polar(1.0, two_pi * a.t);
  const auto s = lehto_sample(K, w, a.p, a.n, {a.nodes_per_octave, a.n_theta});

  std::vector<std::vector<std::string>> rows;
  for (int k = 1; k <= a.n; ++k) {
    const double inner = std::ldexp(1.0, -a.p * k), outer = std::ldexp(1.0, -a.p * (k - 1));
    rows.push_back({std::to_string(k), num(inner), num(outer), num(s.segment[k - 1]), num(s.lk[k - 1]),
                    num(s.total(k))});
  }
  write_csv(run, "lehto_segments.csv", {"k", "inner", "outer", "segment", "lk", "cumulative"}, rows);

  const Annulus whole{w, std::ldexp(1.0, -a.p * a.n), 1.0};
  const auto est = lehto_integral(K, whole, 2 * a.nodes_per_octave * a.p * a.n, 2 * a.n_theta);
  auto& r = run.results();
  r["total"] = jnum(s.total(a.n));
  r["flat_total"] = jnum(a.p * a.n * std::log(2.0) / two_pi);
  r["refined_total"] = jnum(est.value);
  r["refined_error"] = jnum(est.error);
  r["dropped_nodes"] = est.dropped;
  r["distortion_failures"] = failures;
  if (!est.valid) return run.finish(kExitFlagged, "too many non-finite nodes");
  return run.finish(kExitOk, "ok");
}

// ---------------------------------------------------------------- selftest

struct SelftestArgs {
  Common common;
};

int run_selftest(const SelftestArgs& a, const cli::Params& p) {
  cli::Run run("selftest", p, a.common.out);
  bool all = true;
  json checks = json::array();
  auto check = [&](const std::string& name, double value, double limit) {
    const bool ok = std::isfinite(value) && value <= limit;
    all = all && ok;
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << num(value) << " <= " << num(limit) << "\n";
    checks.push_back({{"name", name}, {"value", jnum(value)}, {"limit", limit}, {"pass", ok}});
  };

  check("covariance closed form at 1/2", std::abs(covariance_exact(0.5) + std::log(2.0)), 1e-12);
  {
    const auto m = sample_measure(ChaosParams(0.0), 256, 1);
    double dev = 0.0;
    for (double c : m.cell_masses) dev = std::max(dev, std::abs(c - 1.0 / 256.0));
    check("beta 0 measure is uniform", dev, 1e-15);
  }
  {
    WeldOptions o;
    o.solver.side = 128;
    const auto res = weld(CircleHomeomorphism::identity(1024), o);
    check("identity weld hausdorff", hausdorff_distance(res.curve, unit_circle(4096)), 1e-2);
  }
  {
    SolverConfig cfg;
    cfg.side = 128;
    const auto mu = BeltramiField::sample(128, 2.0, [](cplx z) -> cplx {
      return z == cplx{0.0, 0.0} ? cplx{0.0, 0.0} : (1.0 / 3.0) * z / std::conj(z);
    });
    const auto F = solve(mu, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < F.lattice().size(); ++i) {
      const cplx z = F.lattice().point(i);
      const double rr = std::abs(z);
      if (rr > 0.9 && rr < 1.1) continue;
      worst = std::max(worst, std::abs(F.values()[i] - (rr < 1.0 ? z * rr : z)));
    }
    check("radial stretch solve", worst, 2e-2);
  }
  {
    const auto e = lehto_integral([](cplx) { return 1.0; }, {1.0, 1.0 / 32.0, 1.0}, 16, 8);
    check("Lehto integral of K = 1", std::abs(e.value - std::log(32.0) / two_pi), 1e-12);
  }
  {
    const std::string tricky = "a,\"b\"";
    check("CSV round trip", io::parse_csv_line(io::csv_field(tricky))[0] == tricky ? 0.0 : 1.0, 0.0);
  }
  run.results()["checks"] = checks;
  return all ? run.finish(kExitOk, "ok") : run.finish(kExitFlagged, "failed checks");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random conformal welding: pipeline, Monte Carlo studies and exports"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  WeldArgs weld_args;
  TailArgs tail_args;
  StatsArgs stats_args;
  GmcArgs gmc_args;
  LehtoArgs lehto_args;
  SelftestArgs selftest_args;

  auto* weld_cmd = app.add_subcommand("weld", "weld one chaos sample and export the curve");
  cli::Params weld_p(weld_cmd);
  setup_weld(*weld_cmd, weld_args, weld_p);

  auto* tail_cmd = app.add_subcommand("tail", "Lehto tail probabilities and L_k statistics");
  cli::Params tail_p(tail_cmd);
  setup_tail(tail_args, tail_p);

  auto* stats_cmd = app.add_subcommand("stats", "covariance, moment scaling and total mass studies");
  cli::Params stats_p(stats_cmd);
  setup_stats(stats_args, stats_p);

  auto* gmc_cmd = app.add_subcommand("gmc", "sample the field, chaos measure and homeomorphism");
  cli::Params gmc_p(gmc_cmd);
  setup_gmc(gmc_args, gmc_p);

  auto* lehto_cmd = app.add_subcommand("lehto", "Lehto integrals around a boundary point of one sample");
  cli::Params lehto_p(lehto_cmd);
  setup_lehto(lehto_args, lehto_p);

  auto* selftest_cmd = app.add_subcommand("selftest", "fast consistency checks");
  cli::Params selftest_p(selftest_cmd);
  add_common(selftest_p, selftest_args.common, false);

  try {
    auto args = cli::overlay_config(argc, argv);
    std::reverse(args.begin(), args.end());
    args.pop_back();  // program name
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  } catch (const Error& e) {
    std::cerr << "rweld: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (*weld_cmd) return run_weld(weld_args, weld_p);
    if (*tail_cmd) return run_tail(tail_args, tail_p);
    if (*stats_cmd) return run_stats(stats_args, stats_p);
    if (*gmc_cmd) return run_gmc(gmc_args, gmc_p);
    if (*lehto_cmd) return run_lehto(lehto_args, lehto_p);
    if (*selftest_cmd) return run_selftest(selftest_args, selftest_p);
  } catch (const std::exception& e) {
    std::cerr << "rweld: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
