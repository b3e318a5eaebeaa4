#include <algorithm>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ghost/errors.hpp"
#include "ghost/figures.hpp"
#include "ghost/hamiltonian.hpp"
#include "ghost/io.hpp"
#include "ghost/model.hpp"
#include "ghost/phase_curves.hpp"
#include "ghost/scaling.hpp"
#include "ghost/ssa.hpp"

namespace py = pybind11;
using namespace ghost;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

ModelSpec named_model(const std::string& name, double k, double C, double A,
                      std::optional<double> epsilon) {
  ModelParams p{k, C, A, 1.0};
  const auto base = ModelSpec::by_name(name, p);
  return base.with_epsilon(epsilon.value_or(critical_params(base).eps_c));
}

py::dict curve_columns(const ScalingCurve& c) {
  std::vector<double> phi, value, spread, n, censored;
  for (const auto& p : c.points) {
    phi.push_back(p.phi);
    value.push_back(p.value);
    spread.push_back(p.spread);
    n.push_back(static_cast<double>(p.n));
    censored.push_back(static_cast<double>(p.n_censored));
  }
  py::dict d;
  d["phi"] = to_array(phi);
  d["value"] = to_array(value);
  d["spread"] = to_array(spread);
  d["n"] = to_array(n);
  d["n_censored"] = to_array(censored);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ghost transients near a saddle-node: SSA, WKB orbits and scaling fits";
  m.attr("__version__") = version();

  auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  (void)config_error;

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("k", &ModelParams::k)
      .def_readwrite("C", &ModelParams::C)
      .def_readwrite("A", &ModelParams::A)
      .def_readwrite("epsilon", &ModelParams::epsilon);

  py::class_<CriticalParams>(m, "CriticalParams")
      .def_readonly("eps_c", &CriticalParams::eps_c)
      .def_readonly("x_c", &CriticalParams::x_c)
      .def_readonly("eps_end", &CriticalParams::eps_end)
      .def("__repr__", [](const CriticalParams& c) {
        return "CriticalParams(eps_c=" + format_number(c.eps_c) + ", x_c=" + format_number(c.x_c) +
               ", eps_end=" + format_number(c.eps_end) + ")";
      });

  py::class_<ModelSpec>(m, "Model")
      .def(py::init(&named_model), py::arg("name"), py::arg("k") = 1.0, py::arg("C") = 1.0,
           py::arg("A") = 1.0, py::arg("epsilon") = py::none(),
           "Bundled model; epsilon defaults to the critical value")
      .def_property_readonly("name", &ModelSpec::name)
      .def_property_readonly("epsilon", &ModelSpec::epsilon)
      .def_property_readonly("params", &ModelSpec::params)
      .def("with_epsilon", &ModelSpec::with_epsilon)
      .def("at_phi", [](const ModelSpec& s, double phi) { return model_at_phi(s, phi); })
      .def("critical", [](const ModelSpec& s) { return critical_params(s); })
      .def("rhs", &ModelSpec::mean_field_rhs, py::arg("x"))
      .def("__repr__", [](const ModelSpec& s) {
        return "Model('" + s.name() + "', epsilon=" + format_number(s.epsilon()) + ")";
      });

  m.def("parse_grid", &parse_grid, py::arg("spec"));

  // stochastic simulation
  py::class_<ExtinctionStats>(m, "ExtinctionStats")
      .def_readonly("mean", &ExtinctionStats::mean)
      .def_readonly("sem", &ExtinctionStats::sem)
      .def_readonly("n_censored", &ExtinctionStats::n_censored)
      .def_readonly("usable", &ExtinctionStats::usable)
      .def_readonly("degenerate", &ExtinctionStats::degenerate)
      .def_property_readonly("n", &ExtinctionStats::n_uncensored)
      .def_property_readonly("times", [](const ExtinctionStats& s) {
        std::vector<double> t;
        for (const auto& x : s.samples) t.push_back(x.time);
        return to_array(t);
      });

  auto ssa_config = [](std::int64_t omega, std::size_t replicates, double t_max,
                       double x0_fraction, std::uint64_t seed, std::size_t threads) {
    SsaRunConfig cfg;
    cfg.omega = omega;
    cfg.n_replicates = replicates;
    cfg.t_max = t_max;
    cfg.x0_fraction = x0_fraction;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
  };

  m.def(
      "mean_extinction_time",
      [ssa_config](const ModelSpec& model, std::int64_t omega, std::size_t replicates,
                   double t_max, double x0_fraction, std::uint64_t seed, std::size_t threads) {
        const auto cfg = ssa_config(omega, replicates, t_max, x0_fraction, seed, threads);
        py::gil_scoped_release release;
        return mean_extinction_time(model, cfg);
      },
      py::arg("model"), py::arg("omega") = 500, py::arg("replicates") = 100,
      py::arg("t_max") = 1e6, py::arg("x0_fraction") = 0.75, py::arg("seed") = 1,
      py::arg("threads") = 0);

  m.def(
      "stochastic_bifurcation",
      [ssa_config](const ModelSpec& model, const std::vector<double>& probes, std::int64_t omega,
                   std::size_t replicates, double t_max, std::uint64_t seed,
                   std::size_t bisection_steps, std::size_t threads) {
        const auto cfg = ssa_config(omega, replicates, t_max, 0.75, seed, threads);
        BifurcationOptions options;
        options.bisection_steps = bisection_steps;
        py::gil_scoped_release release;
        const auto b = estimate_stochastic_bifurcation(model, probes, cfg, options);
        return std::make_pair(b.eps_bar_s, b.uncertainty);
      },
      py::arg("model"), py::arg("probes"), py::arg("omega") = 500, py::arg("replicates") = 100,
      py::arg("t_max") = 1e3, py::arg("seed") = 1, py::arg("bisection_steps") = 3,
      py::arg("threads") = 0, "(eps_bar_s, uncertainty)");

  m.def(
      "ssa_sweep",
      [ssa_config](const ModelSpec& model, double eps_bar_s, const std::vector<double>& phi_s,
                   std::int64_t omega, std::size_t replicates, double t_max, std::uint64_t seed,
                   std::size_t threads) {
        const auto cfg = ssa_config(omega, replicates, t_max, 0.75, seed, threads);
        ScalingCurve c;
        {
          py::gil_scoped_release release;
          c = sweep_extinction_times(model, eps_bar_s, phi_s, cfg);
        }
        return curve_columns(c);
      },
      py::arg("model"), py::arg("eps_bar_s"), py::arg("phi_s"), py::arg("omega") = 500,
      py::arg("replicates") = 100, py::arg("t_max") = 1e6, py::arg("seed") = 1,
      py::arg("threads") = 0);

  // Hamiltonian picture
  m.def(
      "orbit",
      [](const ModelSpec& model, double x0, double p0, double x_exit, double tol) {
        const HamiltonianSystem sys(model);
        StopSpec stop;
        stop.x_exit = x_exit;
        stop.x_max = 10.0 * critical_params(model).x_c;
        stop.p_max_abs = 5.0;
        const auto rec = integrate_orbit(sys, x0, p0, stop, tol);
        std::vector<double> t, x, p, S;
        for (const auto& s : rec.samples) {
          t.push_back(s.t);
          x.push_back(s.x);
          p.push_back(s.p);
          S.push_back(s.S);
        }
        py::dict d;
        d["t"] = to_array(t);
        d["x"] = to_array(x);
        d["p"] = to_array(p);
        d["S"] = to_array(S);
        d["exit"] = std::string(to_string(rec.exit_reason));
        d["flight_time"] = rec.flight_time;
        d["energy_drift"] = rec.energy_drift;
        return d;
      },
      py::arg("model"), py::arg("x0"), py::arg("p0"), py::arg("x_exit"), py::arg("tol") = 1e-12,
      "Orbit of the model at its own epsilon; dict of t, x, p, S arrays");

  m.def(
      "flight_sweep",
      [](const ModelSpec& model, const std::vector<double>& phi,
         std::optional<std::vector<double>> p0_values, double weight_threshold, double tol,
         std::size_t threads) {
        InitialConditionEnsemble e;
        if (p0_values) e.p0_values = *p0_values;
        e.weight_threshold = weight_threshold;
        e.flight.tol = tol;
        ScalingCurve c;
        {
          py::gil_scoped_release release;
          c = flight_time_sweep(model, phi, e, threads);
        }
        auto d = curve_columns(c);
        d["empty_phis"] = to_array(c.empty_phis);
        return d;
      },
      py::arg("model"), py::arg("phi"), py::arg("p0_values") = py::none(),
      py::arg("weight_threshold") = 1e-2, py::arg("tol") = 1e-12, py::arg("threads") = 0,
      "Mean flight time per phi; default ensemble is the negative p0 grid");

  m.def(
      "path_weights",
      [](const ModelSpec& model, double omega, const std::vector<double>& p0,
         std::optional<double> x0) {
        const HamiltonianSystem sys(model);
        const auto s = weight_profile(sys, omega, p0, x0.value_or(1.5 * critical_params(model).x_c));
        std::vector<double> action, log_w;
        for (const auto& x : s) {
          action.push_back(x.failed ? std::nan("") : x.action);
          log_w.push_back(x.failed ? std::nan("") : x.log_weight);
        }
        py::dict d;
        d["p0"] = to_array(p0);
        d["action"] = to_array(action);
        d["log_weight"] = to_array(log_w);
        return d;
      },
      py::arg("model"), py::arg("omega"), py::arg("p0"), py::arg("x0") = py::none());

  m.def(
      "phase_curves",
      [](const ModelSpec& model, double epsilon, const std::vector<double>& x) {
        const auto pc = phase_curves(model, epsilon, x);
        py::dict d;
        d["x"] = to_array(pc.x);
        d["p_H"] = to_array(pc.p_H);
        d["p_1"] = to_array(pc.p_1);
        d["p_2"] = to_array(pc.p_2);
        d["x_min_H"] = pc.x_min_H;
        d["p_min_H"] = pc.p_min_H;
        d["x_min_p"] = pc.x_min_p;
        d["p_min_p"] = pc.p_min_p;
        d["x_F"] = pc.x_F;
        d["x_0"] = pc.x_0;
        return d;
      },
      py::arg("model"), py::arg("epsilon"), py::arg("x"));

  m.def(
      "appendix_roots",
      [](double phi) {
        const auto r = appendix_roots(phi);
        return py::make_tuple(r.p_minus, r.p_plus);
      },
      py::arg("phi"), "(p_minus, p_plus) of 2p^2 + p - phi = 0");

  m.def("transit_time", &transit_time_quadrature, py::arg("model"), py::arg("phi"),
        py::arg("p_fixed") = 0.0, py::arg("delta") = kDefaultBottleneckDelta);

  // fits
  auto to_curve = [](const std::vector<double>& phi, const std::vector<double>& value,
                     std::optional<double> omega) {
    if (phi.size() != value.size()) throw ConfigError("phi and value lengths differ");
    ScalingCurve c;
    for (std::size_t i = 0; i < phi.size(); ++i) c.points.push_back({phi[i], value[i], 0.0, 1});
    c.omega = omega;
    c.validate();
    return c;
  };

  m.def(
      "fit_slope",
      [to_curve](const std::vector<double>& phi, const std::vector<double>& value, double lo,
                 double hi) {
        const auto s = fit_loglog_slope(to_curve(phi, value, std::nullopt), lo, hi);
        return py::make_tuple(s.slope, s.slope_stderr);
      },
      py::arg("phi"), py::arg("value"), py::arg("phi_lo"), py::arg("phi_hi"),
      "(slope, stderr) of log value on log phi");

  m.def(
      "bend",
      [to_curve](const std::vector<double>& phi, const std::vector<double>& value) {
        return bend_location(to_curve(phi, value, std::nullopt)).phi_bend;
      },
      py::arg("phi"), py::arg("value"));

  m.def(
      "collapse",
      [to_curve](const std::vector<std::tuple<double, std::vector<double>, std::vector<double>>>& curves) {
        std::vector<ScalingCurve> cs;
        for (const auto& [omega, phi, value] : curves) cs.push_back(to_curve(phi, value, omega));
        const auto f = collapse_fit(cs);
        py::dict d;
        d["a"] = f.a;
        d["b"] = f.b;
        d["objective"] = f.objective;
        d["objective_at_origin"] = f.objective_at_origin;
        return d;
      },
      py::arg("curves"), "curves: list of (omega, phi, value)");
}
