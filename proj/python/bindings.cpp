#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "erasure3d/bounds.hpp"
#include "erasure3d/errors.hpp"
#include "erasure3d/harness.hpp"
#include "erasure3d/io.hpp"
#include "erasure3d/percolation.hpp"
#include "erasure3d/routing.hpp"
#include "erasure3d/series.hpp"

namespace py = pybind11;
using namespace erasure3d;

namespace {

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Axis parse_axis(const std::string& name) {
  if (name == "x") return Axis::x;
  if (name == "y") return Axis::y;
  if (name == "z") return Axis::z;
  throw ConfigError("axis must be x, y or z");
}

ErasureModel make_model(const std::string& family, double gamma, double alpha) {
  return parse_decay_family(family) == DecayFamily::exponential ? ErasureModel::exponential(gamma)
                                                                 : ErasureModel::polynomial(alpha);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulator and cut-set bounds for random 3D erasure networks.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<AllTrialsFailedError>(m, "AllTrialsFailedError", PyExc_RuntimeError);

  py::class_<ErasureModel>(m, "ErasureModel")
      .def_static("exponential", &ErasureModel::exponential, py::arg("gamma"))
      .def_static("polynomial", &ErasureModel::polynomial, py::arg("alpha"))
      .def_property_readonly("family", [](const ErasureModel& e) { return std::string(to_string(e.family())); })
      .def_property_readonly("gamma", &ErasureModel::gamma)
      .def_property_readonly("alpha", &ErasureModel::alpha)
      .def_property_readonly("d_star", &ErasureModel::d_star)
      .def("success", &ErasureModel::success, py::arg("d"))
      .def("erasure", &ErasureModel::erasure, py::arg("d"))
      .def("__repr__", &ErasureModel::describe);

  py::class_<NetworkInstance>(m, "NetworkInstance")
      .def_property_readonly("n", &NetworkInstance::size)
      .def_property_readonly("positions",
                             [](const NetworkInstance& inst) {
                               py::array_t<double> a({inst.size(), std::size_t{3}});
                               auto r = a.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < inst.size(); ++i)
                                 for (int k = 0; k < 3; ++k) r(i, k) = inst.positions[i][k];
                               return a;
                             })
      .def_property_readonly("pairing", [](const NetworkInstance& inst) { return inst.pairing; })
      .def_property_readonly("effective_extent",
                             [](const NetworkInstance& inst) { return inst.config.effective_extent(); })
      .def("to_dict", [](const NetworkInstance& inst) { return to_python(to_json(inst)); });

  m.def(
      "generate",
      [](std::size_t n, std::uint64_t seed, double lambda, double mu, double nu,
         const std::string& density, bool allow_flat) {
        NetworkConfig cfg;
        cfg.n = n;
        cfg.seed = seed;
        cfg.lambda = lambda;
        cfg.mu = mu;
        cfg.nu = nu;
        cfg.mode = parse_density_mode(density);
        cfg.allow_flat = allow_flat;
        return generate(cfg);
      },
      py::arg("n"), py::arg("seed") = 0, py::arg("lam") = 1.0 / 3, py::arg("mu") = 1.0 / 3,
      py::arg("nu") = 1.0 / 3, py::arg("density") = "extended", py::arg("allow_flat") = false,
      "Random network of n nodes with a random source/destination permutation.");

  m.def("model", &make_model, py::arg("family"), py::arg("gamma") = 0.7, py::arg("alpha") = 4.0);

  m.def(
      "cutset_bound",
      [](const NetworkInstance& inst, const ErasureModel& model, const std::string& axis) {
        return cutset_bound(inst, model, parse_axis(axis));
      },
      py::arg("instance"), py::arg("model"), py::arg("axis") = "x");
  m.def(
      "evaluate_bounds",
      [](const NetworkInstance& inst, const ErasureModel& model) {
        return to_python(to_json(evaluate_bounds(inst, model)));
      },
      py::arg("instance"), py::arg("model"));

  m.def(
      "simulate",
      [](const NetworkInstance& inst, const ErasureModel& model, double c, double kappa, double w,
         int packets, bool borrow_adjacent) {
        PercolationConfig pc;
        pc.c = c;
        pc.kappa = kappa;
        RoutingConfig rc;
        rc.w = w;
        rc.packets_per_source = packets;
        rc.borrow_adjacent = borrow_adjacent;
        TrialResult trial;
        {
          py::gil_scoped_release release;
          trial = simulate(inst, model, pc, rc);
        }
        Json j = to_json(trial.report);
        j["warnings"] = trial.warnings;
        return to_python(j);
      },
      py::arg("instance"), py::arg("model"), py::arg("c") = 1.5, py::arg("kappa") = 1.3,
      py::arg("w") = 0.0, py::arg("packets") = 1, py::arg("borrow_adjacent") = true,
      "Builds highways, routes every pair and simulates the phased schedule.");

  m.def(
      "run_sweep",
      [](const std::string& config_text) {
        ExperimentSpec spec;
        apply_config(spec, parse_config_text(config_text));
        spec.validate();
        SweepResult result;
        {
          py::gil_scoped_release release;
          result = run_sweep(spec);
        }
        py::list rows;
        for (const auto& row : result.rows) rows.append(to_python(row.report));
        py::dict out;
        out["rows"] = rows;
        out["summary"] = to_python(summary_json(spec, result));
        std::ostringstream csv;
        write_csv(csv, spec, result);
        out["csv"] = csv.str();
        return out;
      },
      py::arg("config_text"), "Runs a sweep described by [section] key = value text.");

  m.def(
      "count_crossings",
      [](py::array_t<bool, py::array::c_style | py::array::forcecast> open) {
        if (open.ndim() != 2) throw ConfigError("open pattern must be 2D (along, across)");
        const int along = static_cast<int>(open.shape(0));
        const int across = static_cast<int>(open.shape(1));
        SectionLattice lat(along, across);
        auto r = open.unchecked<2>();
        for (int i = 0; i < along; ++i)
          for (int j = 0; j < across; ++j) lat.set_open(i, j, r(i, j));
        return count_edge_disjoint_crossings(lat, Rectangle{0, across});
      },
      py::arg("open"), "Edge-disjoint crossings along the first axis of a bond pattern.");

  m.def("occupancy_probability", &occupancy_probability, py::arg("c"));
  m.def("lemma1_failure_bound", &lemma1_failure_bound, py::arg("p"), py::arg("kappa"),
        py::arg("delta"), py::arg("m_x"), py::arg("m_z"), py::arg("epsilon_m"));
  m.def("riemann_zeta", &riemann_zeta, py::arg("s"));
  m.def("K_alpha", &K_alpha, py::arg("alpha"));
  m.def("cubic_root_y", &cubic_root_y);
  m.def("tdma_k", &tdma_k, py::arg("model"), py::arg("c"), py::arg("d"));
  m.def("interference_bound", &interference_bound, py::arg("model"), py::arg("k"), py::arg("c"),
        py::arg("d"));
  m.def(
      "interference_monte_carlo",
      [](const ErasureModel& model, double k, double c, double d, std::size_t draws,
         std::uint64_t seed) {
        const auto e = interference_monte_carlo(model, k, c, d, draws, seed);
        py::dict out;
        out["estimate"] = e.estimate;
        out["std_error"] = e.std_error;
        out["tail"] = e.tail;
        out["draws"] = e.draws;
        return out;
      },
      py::arg("model"), py::arg("k"), py::arg("c"), py::arg("d"), py::arg("draws") = 10000,
      py::arg("seed") = 0);
  m.def("theoretical_exponent", &theoretical_exponent, py::arg("lam"), py::arg("mu"),
        py::arg("nu"));
  m.def(
      "fit_exponent",
      [](const std::vector<double>& n, const std::vector<double>& values, bool deflate) {
        if (n.size() != values.size()) throw ConfigError("n and values differ in length");
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < n.size(); ++i) pts.emplace_back(n[i], values[i]);
        const auto f = deflate ? fit_exponent_deflated(pts) : fit_exponent(pts);
        py::dict out;
        out["slope"] = f.slope;
        out["intercept"] = f.intercept;
        out["std_error"] = f.std_error;
        out["points"] = f.points;
        return out;
      },
      py::arg("n"), py::arg("values"), py::arg("deflate") = false);

  m.attr("__version__") = version();
}
