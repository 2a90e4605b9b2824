#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "rweld/chaos.hpp"
#include "rweld/error.hpp"
#include "rweld/field.hpp"
#include "rweld/lehto.hpp"
#include "rweld/welding.hpp"

namespace py = pybind11;
using namespace rweld;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_rweld, m) {
  m.doc() = "Random conformal welding of chaos measures";

  auto base = py::register_exception<Error>(m, "RweldError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  m.def("covariance_exact", &covariance_exact, py::arg("lag"));
  m.def("covariance_truncated", &covariance_truncated, py::arg("modes"), py::arg("lag"));

  m.def(
      "sample_trace",
      [](std::size_t modes, std::size_t grid_size, std::uint64_t seed) {
        return to_array(sample_trace(modes, grid_size, seed).grid());
      },
      py::arg("modes"), py::arg("grid_size"), py::arg("seed"), "Field values at the cell midpoints.");

  m.def(
      "sample_measure",
      [](double beta, std::size_t cells, std::uint64_t seed, bool exploratory) {
        const auto mu = sample_measure(ChaosParams(beta, exploratory), cells, seed);
        return py::make_tuple(to_array(mu.cell_masses), mu.total_mass);
      },
      py::arg("beta"), py::arg("cells"), py::arg("seed"), py::arg("exploratory") = false,
      "Cell masses and total mass of one chaos sample.");

  m.def(
      "homeo_knots",
      [](double beta, std::size_t cells, std::uint64_t seed) {
        return to_array(build_homeo(sample_measure(ChaosParams(beta), cells, seed)).knots());
      },
      py::arg("beta"), py::arg("cells"), py::arg("seed"), "h(i/M) for i = 0..M.");

  m.def(
      "holder_exponent",
      [](double beta, std::size_t cells, std::uint64_t seed, int depth) {
        return holder_exponent(build_homeo(sample_measure(ChaosParams(beta), cells, seed)), depth);
      },
      py::arg("beta"), py::arg("cells"), py::arg("seed"), py::arg("depth"));

  m.def(
      "moment_scaling",
      [](double beta, double q, std::size_t cells, std::size_t samples, std::uint64_t seed, unsigned workers) {
        MomentStudyConfig cfg;
        cfg.grid_size = cells;
        cfg.samples = samples;
        cfg.seed = seed;
        cfg.workers = workers;
        const auto r = moment_scaling(ChaosParams(beta), q, cfg);
        return py::make_tuple(r.slope, r.std_error);
      },
      py::arg("beta"), py::arg("q"), py::arg("cells") = std::size_t{1} << 14, py::arg("samples") = 200,
      py::arg("seed") = 1, py::arg("workers") = 0, "(slope, standard error) of log E tau(I)^q vs log |I|.");

  m.def(
      "weld",
      [](double beta, std::uint64_t seed, std::size_t cells, std::size_t grid, double eps,
         std::size_t curve_samples) {
        const auto h = build_homeo(sample_measure(ChaosParams(beta), cells, seed));
        WeldOptions opts;
        opts.solver.side = grid;
        opts.solver.eps = eps;
        opts.curve_samples = curve_samples;
        std::optional<WeldingResult> held;
        {
          py::gil_scoped_release release;
          held.emplace(weld(h, opts, {beta, seed, cells}));
        }
        const auto& res = *held;
        py::dict out;
        out["curve"] = to_array(res.curve);
        out["flags"] = res.flags;
        out["simple"] = res.simple;
        out["conformality"] = res.conformality;
        out["iterations"] = res.map.diagnostics().iterations;
        out["contraction_ratio"] = res.map.diagnostics().contraction_ratio();
        out["welding_defect"] = res.flagged() ? py::object(py::none()) : py::cast(verify_welding(res));
        return out;
      },
      py::arg("beta"), py::arg("seed"), py::arg("cells") = std::size_t{1} << 14, py::arg("grid") = 256,
      py::arg("eps") = 0.05, py::arg("curve_samples") = 4096, "Runs the welding pipeline on one sample.");

  m.def(
      "lehto_integral",
      [](const std::function<double(cplx)>& K, cplx center, double inner, double outer, std::size_t n_rho,
         std::size_t n_theta) {
        const auto e = lehto_integral(K, {center, inner, outer}, n_rho, n_theta);
        return py::make_tuple(e.value, e.error);
      },
      py::arg("K"), py::arg("center"), py::arg("inner"), py::arg("outer"), py::arg("n_rho") = 128,
      py::arg("n_theta") = 256, "(value, error estimate) for a distortion callable K(z).");

  m.def(
      "lehto_samples",
      [](double beta, int p, int n_max, std::size_t samples, std::size_t cells, std::uint64_t seed,
         unsigned workers) {
        LehtoStudyConfig cfg;
        cfg.beta = beta;
        cfg.p = p;
        cfg.n_max = n_max;
        cfg.samples = samples;
        cfg.grid_size = cells;
        cfg.seed = seed;
        cfg.workers = workers;
        std::vector<LehtoSample> s;
        {
          py::gil_scoped_release release;
          s = lehto_samples(cfg);
        }
        py::array_t<double> seg({samples, static_cast<std::size_t>(n_max)});
        py::array_t<double> lk({samples, static_cast<std::size_t>(n_max)});
        auto a = seg.mutable_unchecked<2>();
        auto b = lk.mutable_unchecked<2>();
        for (std::size_t i = 0; i < samples; ++i) {
          for (int k = 0; k < n_max; ++k) {
            a(i, k) = s[i].segment[k];
            b(i, k) = s[i].lk[k];
          }
        }
        return py::make_tuple(seg, lk);
      },
      py::arg("beta"), py::arg("p") = 3, py::arg("n_max") = 5, py::arg("samples") = 100,
      py::arg("cells") = std::size_t{1} << 16, py::arg("seed") = 1, py::arg("workers") = 0,
      "Per-sample segment integrals and L_k as two (samples, n_max) arrays.");

  m.def("hausdorff_distance", &hausdorff_distance, py::arg("a"), py::arg("b"));
  m.def("is_simple_polygon", &is_simple_polygon, py::arg("points"));
  m.def("unit_circle", &unit_circle, py::arg("n"));
}
