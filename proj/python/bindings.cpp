#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "robin/error.hpp"
#include "robin/fem.hpp"
#include "robin/geometry.hpp"
#include "robin/harness.hpp"
#include "robin/oracles.hpp"

namespace py = pybind11;
using namespace robin;

namespace {

harness::SweepOptions sweep_options(double resolution, int jobs, bool robin_all) {
  harness::SweepOptions opt;
  opt.mesh.resolution = resolution;
  opt.jobs = jobs;
  if (robin_all) opt.mode.robin_tags = geometry::TagSet::all();
  return opt;
}

}  // namespace

PYBIND11_MODULE(_robin_bands, m) {
  m.doc() = "Robin eigenvalue bands on chains of mollified sector blocks";

  py::register_exception<Error>(m, "RobinError");
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);

  py::class_<geometry::SectorBlockParams>(m, "SectorBlockParams")
      .def(py::init([](double theta, double L, double eps, double M) {
             return geometry::SectorBlockParams{theta, L, eps, M};
           }), py::arg("theta"), py::arg("L"), py::arg("eps"), py::arg("M"))
      .def_static("with_margin", &geometry::SectorBlockParams::with_margin, py::arg("theta"), py::arg("L"),
                  py::arg("eps"), py::arg("margin"))
      .def_readwrite("theta", &geometry::SectorBlockParams::theta)
      .def_readwrite("L", &geometry::SectorBlockParams::L)
      .def_readwrite("eps", &geometry::SectorBlockParams::eps)
      .def_readwrite("M", &geometry::SectorBlockParams::M)
      .def("validate", &geometry::SectorBlockParams::validate);

  m.def("tent_profile", &geometry::tent_profile, py::arg("theta"), py::arg("L"), py::arg("x"));
  m.def(
      "profile_values",
      [](const geometry::SectorBlockParams& p, const std::vector<double>& xs) {
        const auto prof = geometry::mollified_profile(p);
        std::vector<double> out;
        out.reserve(xs.size());
        for (double x : xs) out.push_back(prof->value(x));
        return out;
      },
      py::arg("params"), py::arg("xs"));

  m.def("halfline_quotient", &oracles::halfline_quotient, py::arg("alpha"), py::arg("T"), py::arg("panels") = 64);
  m.def("interval_robin_neumann", &oracles::interval_robin_neumann, py::arg("ell"), py::arg("alpha"));
  m.def("interval_robin_robin", &oracles::interval_robin_robin, py::arg("ell"), py::arg("alpha"));
  m.def("disk_robin", &oracles::disk_robin, py::arg("R"), py::arg("alpha"));
  m.def("sector_quotient", &oracles::sector_quotient, py::arg("theta"), py::arg("alpha"), py::arg("T"),
        py::arg("panels") = 128);
  m.def("block_trial_quotient", &oracles::block_trial_quotient, py::arg("params"), py::arg("alpha") = -1.0);

  m.def(
      "block_eigenvalue",
      [](const geometry::SectorBlockParams& p, double alpha, bool dirichlet_sides, double resolution) {
        const double depth = harness::plateau_depth(p, alpha);
        const auto domain = geometry::build_block(p, 1.0, depth);
        harness::SweepOptions opt = sweep_options(resolution, 1, false);
        if (dirichlet_sides) opt.mode.side_mode = fem::SideMode::DirichletSides;
        py::gil_scoped_release release;
        const auto row = harness::solve_row(domain, alpha, opt);
        if (!row.ok) throw SolverError(row.error);
        return row.lambda;
      },
      py::arg("params"), py::arg("alpha"), py::arg("dirichlet_sides") = false, py::arg("resolution") = 1.0);

  m.def(
      "sweep",
      [](const std::string& config, const std::vector<double>& alphas, double resolution, int jobs, bool robin_all) {
        std::vector<harness::SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = harness::run_alpha_sweep(config, alphas, sweep_options(resolution, jobs, robin_all));
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["alpha"] = r.alpha;
          d["lambda"] = r.lambda;
          d["ratio"] = r.ratio;
          d["n_vertices"] = r.n_vertices;
          d["iterations"] = r.iterations;
          d["wall_time_s"] = r.wall_time;
          d["ok"] = r.ok;
          d["error"] = r.error;
          out.append(d);
        }
        return out;
      },
      py::arg("config"), py::arg("alphas"), py::arg("resolution") = 1.0, py::arg("jobs") = 1,
      py::arg("robin_all") = false);

  m.def(
      "check_bands",
      [](const std::vector<double>& alphas, const std::vector<double>& ratios, std::pair<double, double> band_prime,
         std::pair<double, double> band_double, const std::string& assignment, double min_separation) {
        if (alphas.size() != ratios.size()) throw InvalidParameter("alphas and ratios differ in length");
        std::vector<harness::SweepRow> rows;
        for (std::size_t i = 0; i < alphas.size(); ++i) {
          harness::SweepRow r;
          r.alpha = alphas[i];
          r.ratio = ratios[i];
          r.lambda = ratios[i] * alphas[i] * alphas[i];
          r.iterations = 0;
          r.ok = std::isfinite(r.ratio);
          rows.push_back(r);
        }
        const auto rep = harness::check_bands(rows, {band_prime.first, band_prime.second},
                                              {band_double.first, band_double.second},
                                              harness::parse_assignment(assignment), min_separation);
        py::dict d;
        d["pass"] = rep.pass;
        d["separation"] = rep.separation;
        d["diagnostics"] = rep.diagnostics;
        return d;
      },
      py::arg("alphas"), py::arg("ratios"), py::arg("band_prime"), py::arg("band_double"), py::arg("assignment"),
      py::arg("min_separation") = 0.0);
}
