#include "rweld/welding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "rweld/error.hpp"

namespace rweld {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double cross(cplx o, cplx a, cplx b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

bool on_segment(cplx p, cplx q, cplx r) {
  return std::min(p.real(), r.real()) <= q.real() && q.real() <= std::max(p.real(), r.real()) &&
         std::min(p.imag(), r.imag()) <= q.imag() && q.imag() <= std::max(p.imag(), r.imag());
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool segments_touch(cplx p1, cplx p2, cplx q1, cplx q2) {
  const int d1 = sign(cross(q1, q2, p1));
  const int d2 = sign(cross(q1, q2, p2));
  const int d3 = sign(cross(p1, p2, q1));
  const int d4 = sign(cross(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(q1, p1, q2)) return true;
  if (d2 == 0 && on_segment(q1, p2, q2)) return true;
  if (d3 == 0 && on_segment(p1, q1, p2)) return true;
  if (d4 == 0 && on_segment(p1, q2, p2)) return true;
  return false;
}

bool lex_less(cplx a, cplx b) {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

}  // namespace

std::vector<cplx> unit_circle(std::size_t n) {
  if (n == 0) throw ArgumentError("unit_circle: n must be positive");
  std::vector<cplx> out(n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = std::polar(1.0, two_pi * static_cast<double>(j) / static_cast<double>(n));
  }
  out[n] = out[0];
  return out;
}

bool is_simple_polygon(const std::vector<cplx>& input) {
  std::vector<cplx> pts = input;
  if (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
  const std::size_t n = pts.size();
  if (n < 3) return true;

  struct Edge {
    cplx left, right;
  };
  std::vector<Edge> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx a = pts[i];
    cplx b = pts[(i + 1) % n];
    if (lex_less(b, a)) std::swap(a, b);
    edges[i] = {a, b};
  }

  double sweep_x = 0.0;
  auto y_at = [&](std::size_t e) {
    const auto& s = edges[e];
    const double dx = s.right.real() - s.left.real();
    if (dx == 0.0) return s.left.imag();
    const double t = std::clamp((sweep_x - s.left.real()) / dx, 0.0, 1.0);
    return s.left.imag() + t * (s.right.imag() - s.left.imag());
  };
  auto slope = [&](std::size_t e) {
    const auto& s = edges[e];
    const double dx = s.right.real() - s.left.real();
    if (dx == 0.0) return std::numeric_limits<double>::infinity();
    return (s.right.imag() - s.left.imag()) / dx;
  };
  auto below = [&](std::size_t a, std::size_t b) {
    if (a == b) return false;
    const double ya = y_at(a);
    const double yb = y_at(b);
    if (ya != yb) return ya < yb;
    const double sa = slope(a);
    const double sb = slope(b);
    if (sa != sb) return sa < sb;
    return a < b;
  };
  std::set<std::size_t, decltype(below)> status(below);
  std::vector<std::set<std::size_t, decltype(below)>::iterator> where(n, status.end());

  auto adjacent = [n](std::size_t a, std::size_t b) {
    const std::size_t d = a > b ? a - b : b - a;
    return d == 1 || d == n - 1;
  };
  auto crossing = [&](std::size_t a, std::size_t b) {
    if (adjacent(a, b)) return false;
    return segments_touch(edges[a].left, edges[a].right, edges[b].left, edges[b].right);
  };

  struct Event {
    cplx point;
    std::size_t edge;
    bool is_left;
  };
  std::vector<Event> events;
  events.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    events.push_back({edges[i].left, i, true});
    events.push_back({edges[i].right, i, false});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.point != b.point) return lex_less(a.point, b.point);
    return a.is_left && !b.is_left;
  });

  for (const auto& ev : events) {
    sweep_x = ev.point.real();
    if (ev.is_left) {
      const auto it = status.insert(ev.edge).first;
      where[ev.edge] = it;
      if (it != status.begin() && crossing(*std::prev(it), ev.edge)) return false;
      const auto nx = std::next(it);
      if (nx != status.end() && crossing(*nx, ev.edge)) return false;
    } else {
      const auto it = where[ev.edge];
      if (it != status.begin()) {
        const auto nx = std::next(it);
        if (nx != status.end() && crossing(*std::prev(it), *nx)) return false;
      }
      status.erase(it);
    }
  }
  return true;
}

double hausdorff_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) throw ArgumentError("hausdorff_distance: empty point set");
  auto directed = [](const std::vector<cplx>& from, const std::vector<cplx>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, std::norm(p - q));
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

cplx WeldingResult::exterior_map(cplx z) const {
  if (std::abs(z) < 1.0) throw ArgumentError("exterior_map: point inside the unit disk");
  return map(z);
}

cplx WeldingResult::interior_map(cplx w) const {
  const double r = std::abs(w);
  if (r >= 1.0) throw ArgumentError("interior_map: point outside the open unit disk");
  if (r == 0.0) return map(0.0);
  return map(extension.inverse(w));
}

WeldingResult weld(const CircleHomeomorphism& h, const WeldOptions& opts, WeldMetadata meta) {
  opts.solver.validate();
  if (opts.curve_samples < 8) throw ConfigError("weld: need at least 8 curve samples");
  WeldingResult out{beurling_ahlfors_extend(h), {}, {}, {}, {}, opts, meta, 0.0, 0, true, {}};
  out.metadata.circle_cells = h.cells();

  const auto field = extension_field(out.extension, opts.solver.side, opts.solver.half_width);
  for (std::size_t i = 0; i < field.lattice.size(); ++i) {
    if (std::norm(field.lattice.point(i)) <= 1.0) ++out.disk_points;
  }
  if (static_cast<double>(field.clipped) > opts.max_clipped_fraction * static_cast<double>(out.disk_points)) {
    out.flags.push_back("clipping");
  }
  out.mu = truncate(field, opts.solver.eps);
  out.map = solve(out.mu, opts.solver);
  if (out.map.diagnostics().jacobian_failures > 0) out.flags.push_back("jacobian");

  const std::size_t n = opts.curve_samples;
  out.params.resize(n + 1);
  out.curve.resize(n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n);
    out.params[j] = t;
    out.curve[j] = out.map(std::polar(1.0, two_pi * t));
  }
  out.params[n] = 1.0;
  out.curve[n] = out.curve[0];
  out.simple = is_simple_polygon(out.curve);
  if (!out.simple) out.flags.push_back("self-intersection");
  out.conformality = conformality_residual(out.map).median;
  return out;
}

double welding_defect(const std::function<MapJet(cplx)>& f_jet,
                      const std::function<cplx(cplx)>& f_inverse, const PlanarMap& F, double inner,
                      double outer) {
  if (!(inner > 0.0 && outer > inner && outer < 1.0)) {
    throw ArgumentError("welding_defect: need 0 < inner < outer < 1");
  }
  constexpr std::size_t rings = 6;
  constexpr std::size_t angles = 64;
  std::vector<double> ratios;
  ratios.reserve(rings * angles);
  for (std::size_t i = 0; i < rings; ++i) {
    const double r = inner + (outer - inner) * static_cast<double>(i) / static_cast<double>(rings - 1);
    for (std::size_t j = 0; j < angles; ++j) {
      const cplx w = std::polar(r, two_pi * (static_cast<double>(j) + 0.5) / static_cast<double>(angles));
      const cplx z = f_inverse(w);
      const MapJet f = f_jet(z);
      const double jac = f.jacobian();
      if (!(jac > 0.0)) throw NumericError("welding_defect: f is not orientation preserving");
      const cplx Fz = F.dz_at(z);
      const cplx Fzb = F.dzbar_at(z);
      // Derivatives of g = F o f^{-1} from those of F and f.
      const cplx a = (Fz * std::conj(f.dz) - Fzb * std::conj(f.dzbar)) / jac;
      const cplx b = (Fzb * f.dz - Fz * f.dzbar) / jac;
      ratios.push_back(std::abs(b) / std::abs(a));
    }
  }
  auto mid = ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2);
  std::nth_element(ratios.begin(), mid, ratios.end());
  return *mid;
}

double verify_welding(const WeldingResult& result) {
  if (result.flagged()) throw ArgumentError("verify_welding: result is flagged");
  const auto& ext = result.extension;
  return welding_defect([&](cplx z) { return ext.disk(z); }, [&](cplx w) { return ext.inverse(w); },
                        result.map);
}

EpsilonStudy epsilon_convergence(const CircleHomeomorphism& h, const std::vector<double>& eps,
                                 const WeldOptions& opts) {
  if (eps.empty()) throw ArgumentError("epsilon_convergence: empty schedule");
  for (std::size_t i = 1; i < eps.size(); ++i) {
    if (!(eps[i] < eps[i - 1])) throw ArgumentError("epsilon_convergence: eps must strictly decrease");
  }
  EpsilonStudy out;
  out.eps = eps;
  for (double e : eps) {
    WeldOptions o = opts;
    o.solver.eps = e;
    auto res = weld(h, o);
    if (res.flagged()) throw NumericError("epsilon_convergence: flagged weld at eps = " + std::to_string(e));
    out.curves.push_back(std::move(res.curve));
  }
  for (std::size_t i = 1; i < out.curves.size(); ++i) {
    out.distances.push_back(hausdorff_distance(out.curves[i - 1], out.curves[i]));
  }
  return out;
}

double curve_holder_exponent(const WeldingResult& result, int depth, HolderOptions opts) {
  const std::size_t n = result.curve.size() - 1;
  std::vector<double> xs(n), ys(n);
  for (std::size_t j = 0; j < n; ++j) {
    xs[j] = result.curve[j].real();
    ys[j] = result.curve[j].imag();
  }
  return holder_exponent_samples(xs, ys, depth, opts);
}

}  // namespace rweld
