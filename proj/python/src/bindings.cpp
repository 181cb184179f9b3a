#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cqed/corr.hpp"
#include "cqed/csvio.hpp"
#include "cqed/dynamics.hpp"
#include "cqed/fitkit.hpp"
#include "cqed/model.hpp"
#include "cqed/qspace.hpp"
#include "cqed/scenario.hpp"
#include "cqed/steady.hpp"

namespace py = pybind11;
using namespace cqed;

namespace {

CavitySlot slot_from(const std::string& s) {
  if (s == "u" || s == "upper") return CavitySlot::upper;
  if (s == "l" || s == "lower") return CavitySlot::lower;
  throw validation_error("cavity must be 'u' or 'l'");
}

py::dict fit_to_dict(const FitResult& fit) {
  py::dict params, sigmas;
  for (std::size_t k = 0; k < fit.names.size(); ++k) {
    params[fit.names[k].c_str()] = fit.values[k];
    sigmas[fit.names[k].c_str()] = fit.sigmas[k];
  }
  py::dict out;
  out["parameters"] = params;
  out["uncertainties"] = sigmas;
  out["residual_rms"] = fit.residual_rms;
  out["converged"] = fit.converged;
  out["iterations"] = fit.iterations;
  return out;
}

py::dict sweep_to_dict(const SweepResult& sweep) {
  py::dict out;
  py::list axes;
  for (const auto& axis : sweep.axes) {
    py::dict a;
    a["name"] = axis.name;
    a["unit"] = axis.unit;
    a["values"] = axis.values;
    axes.append(a);
  }
  out["axes"] = axes;
  const Eigen::Index rows = sweep.axes[0].values.size();
  const Eigen::Index cols = sweep.axes.size() > 1 ? sweep.axes[1].values.size() : 1;
  py::dict obs;
  for (const auto& name : sweep.observable_names) {
    Eigen::MatrixXd grid(rows, cols);
    for (const auto& point : sweep.points) {
      const auto it = point.obs.find(name);
      grid(point.i0, point.i1) = it == point.obs.end() ? std::nan("") : it->second;
    }
    obs[name.c_str()] = grid;
  }
  out["observables"] = obs;
  Eigen::MatrixXd residual(rows, cols);
  py::list errors;
  for (const auto& point : sweep.points) {
    residual(point.i0, point.i1) = point.residual;
    if (!point.error.empty()) errors.append(point.error);
  }
  out["residual"] = residual;
  out["errors"] = errors;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "cascaded two-photon emission simulator: Lindblad dynamics, "
            "steady states, two-time correlations and fits for a three-level "
            "ladder emitter coupled to two lossy cavities";

  py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<numerical_error>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<SpaceLayout>(m, "SpaceLayout")
      .def(py::init<int, int>(), py::arg("n_max_u") = 2, py::arg("n_max_l") = 2)
      .def_readonly("n_max_u", &SpaceLayout::n_max_u)
      .def_readonly("n_max_l", &SpaceLayout::n_max_l)
      .def_property_readonly("total_dim", &SpaceLayout::total_dim)
      .def("index_of",
           [](const SpaceLayout& lay, const std::string& level, int nu, int nl) {
             return lay.index_of(atom_level_from_label(level), nu, nl);
           },
           py::arg("level"), py::arg("n_u"), py::arg("n_l"))
      .def("decode", &SpaceLayout::decode, py::arg("index"));

  py::class_<PulseShape>(m, "PulseShape")
      .def(py::init([](double center, double fwhm) {
             return PulseShape{center, fwhm};
           }),
           py::arg("center_ns"), py::arg("fwhm_ns"))
      .def_readwrite("center_ns", &PulseShape::center_ns)
      .def_readwrite("fwhm_ns", &PulseShape::fwhm_ns)
      .def("envelope", &PulseShape::envelope, py::arg("t_ns"));

  py::class_<DriveSpec>(m, "DriveSpec")
      .def(py::init([](const std::string& mode, double omega, double delta,
                       std::optional<PulseShape> pulse) {
             DriveSpec d;
             d.mode = drive_mode_from_label(mode);
             d.omega_d_mhz = omega;
             d.delta_d_mhz = delta;
             d.pulse = pulse;
             return d;
           }),
           py::arg("mode") = "none", py::arg("omega_d") = 0.0, py::arg("delta_d") = 0.0,
           py::arg("pulse") = std::nullopt)
      .def_property("mode",
                    [](const DriveSpec& d) { return drive_mode_label(d.mode); },
                    [](DriveSpec& d, const std::string& s) { d.mode = drive_mode_from_label(s); })
      .def_readwrite("omega_d", &DriveSpec::omega_d_mhz)
      .def_readwrite("delta_d", &DriveSpec::delta_d_mhz)
      .def_readwrite("pulse", &DriveSpec::pulse);

  py::class_<CollectionParams>(m, "CollectionParams")
      .def(py::init([](double oc_u, double oc_l, double mm_u, double mm_l) {
             return CollectionParams{oc_u, oc_l, mm_u, mm_l};
           }),
           py::arg("eta_oc_u") = 1.0, py::arg("eta_oc_l") = 1.0, py::arg("eta_mm_u") = 1.0,
           py::arg("eta_mm_l") = 1.0)
      .def_readwrite("eta_oc_u", &CollectionParams::eta_oc_u)
      .def_readwrite("eta_oc_l", &CollectionParams::eta_oc_l)
      .def_readwrite("eta_mm_u", &CollectionParams::eta_mm_u)
      .def_readwrite("eta_mm_l", &CollectionParams::eta_mm_l);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init([](double gu, double gl, double ku, double kl, double yu, double yl,
                       double du, double dl, DriveSpec drive, int nu, int nl,
                       CollectionParams coll) {
             SystemParams p;
             p.g_u_mhz = gu;
             p.g_l_mhz = gl;
             p.kappa_u_mhz = ku;
             p.kappa_l_mhz = kl;
             p.gamma_u_mhz = yu;
             p.gamma_l_mhz = yl;
             p.delta_u_mhz = du;
             p.delta_l_mhz = dl;
             p.drive = std::move(drive);
             p.n_max_u = nu;
             p.n_max_l = nl;
             p.collection = coll;
             p.validate();
             return p;
           }),
           py::arg("g_u"), py::arg("g_l"), py::arg("kappa_u"), py::arg("kappa_l"),
           py::arg("gamma_u"), py::arg("gamma_l"), py::arg("delta_u") = 0.0,
           py::arg("delta_l") = 0.0, py::arg("drive") = DriveSpec{},
           py::arg("n_max_u") = 2, py::arg("n_max_l") = 2,
           py::arg("collection") = CollectionParams{})
      .def_readwrite("g_u", &SystemParams::g_u_mhz)
      .def_readwrite("g_l", &SystemParams::g_l_mhz)
      .def_readwrite("kappa_u", &SystemParams::kappa_u_mhz)
      .def_readwrite("kappa_l", &SystemParams::kappa_l_mhz)
      .def_readwrite("gamma_u", &SystemParams::gamma_u_mhz)
      .def_readwrite("gamma_l", &SystemParams::gamma_l_mhz)
      .def_readwrite("delta_u", &SystemParams::delta_u_mhz)
      .def_readwrite("delta_l", &SystemParams::delta_l_mhz)
      .def_readwrite("drive", &SystemParams::drive)
      .def_readwrite("n_max_u", &SystemParams::n_max_u)
      .def_readwrite("n_max_l", &SystemParams::n_max_l)
      .def_readwrite("collection", &SystemParams::collection)
      .def_property_readonly("layout", &SystemParams::layout);

  m.def("annihilation", &annihilation, py::arg("n_max"),
        "single-mode ladder operator, <n-1|a|n> = sqrt(n)");
  m.def("transition",
        [](const SpaceLayout& lay, const std::string& lower, const std::string& upper) {
          return transition(lay, lower, upper).m;
        },
        py::arg("layout"), py::arg("lower"), py::arg("upper"));
  m.def("embed",
        [](const Matrix& op, const std::string& slot, const SpaceLayout& lay) {
          return embed(op, slot_from(slot), lay).m;
        },
        py::arg("single_mode_op"), py::arg("slot"), py::arg("layout"));
  m.def("number_operator",
        [](const SpaceLayout& lay, const std::string& slot) {
          return number_operator(lay, slot_from(slot)).m;
        },
        py::arg("layout"), py::arg("slot"));
  m.def("basis_state",
        [](const SpaceLayout& lay, const std::string& level, int nu, int nl) {
          return basis_state(lay, atom_level_from_label(level), nu, nl).amplitudes;
        },
        py::arg("layout"), py::arg("level"), py::arg("n_u") = 0, py::arg("n_l") = 0);
  m.def("expectation",
        [](const SpaceLayout& lay, const Matrix& rho, const Matrix& obs) {
          return expectation(DensityMatrix(lay, rho), Operator(lay, obs));
        },
        py::arg("layout"), py::arg("rho"), py::arg("obs"));

  m.def("build_static_hamiltonian",
        [](const SystemParams& p) { return build_static_hamiltonian(p).m; });
  m.def("build_drive_term",
        [](const SystemParams& p, double t_ns) { return build_drive_term(p, t_ns).m; },
        py::arg("params"), py::arg("t_ns"));
  m.def("dark_state", [](const SystemParams& p) { return dark_state(p).amplitudes; });
  m.def("chain_eigenenergies",
        [](const SystemParams& p, double delta) {
          const auto e = chain_eigenenergies(p, delta);
          return py::make_tuple(e.e0_mhz, e.e1_mhz, e.e2_mhz);
        },
        py::arg("params"), py::arg("delta_mhz"));
  m.def("cooperativity", &cooperativity, py::arg("g"), py::arg("kappa"), py::arg("gamma"));
  m.def("purcell_lifetime", &purcell_lifetime, py::arg("tau_free_ns"), py::arg("cooperativity"));

  m.def("integrate_master_equation",
        [](const SystemParams& p, const Matrix& rho0, double t_end, double dt) {
          const Trajectory traj =
              integrate_master_equation(p, DensityMatrix(p.layout(), rho0), t_end, dt);
          py::dict series;
          for (const auto& [name, values] : traj.series) series[name.c_str()] = values;
          py::dict out;
          out["times_ns"] = traj.times_ns;
          out["series"] = series;
          out["trace_error"] = traj.trace_error;
          out["final_state"] = traj.final_state.m;
          return out;
        },
        py::arg("params"), py::arg("rho0"), py::arg("t_end_ns"), py::arg("sample_dt_ns"));
  m.def("calibrate_pi_pulse",
        [](const SystemParams& p) {
          const CalibrationResult cal = calibrate_pi_pulse(p);
          py::dict out;
          out["peak_omega_mhz"] = cal.peak_omega_mhz;
          out["achieved_pe"] = cal.achieved_pe;
          out["iterations"] = cal.iterations;
          return out;
        });
  m.def("fiber_efficiency",
        [](double p, const std::string& channel, const CollectionParams& c) {
          return fiber_efficiency(p, slot_from(channel), c);
        },
        py::arg("p"), py::arg("channel"), py::arg("collection"));

  m.def("steady_state",
        [](const SystemParams& p) {
          const SteadyStateResult ss = steady_state(p);
          return py::make_tuple(ss.rho.m, ss.residual_max);
        },
        "steady density matrix and max |L rho| residual");
  m.def("sweep_drive_detuning",
        [](const SystemParams& p, const RealVector& grid, int threads) {
          return sweep_to_dict(sweep_drive_detuning(p, grid, threads));
        },
        py::arg("params"), py::arg("delta_d_mhz"), py::arg("threads") = 1);
  m.def("kappa_detuning_map",
        [](const SystemParams& p, const RealVector& kappa, const RealVector& delta,
           int threads) {
          return sweep_to_dict(kappa_detuning_map(p, kappa, delta, threads));
        },
        py::arg("params"), py::arg("kappa_u_mhz"), py::arg("delta_d_mhz"),
        py::arg("threads") = 1);

  m.def("pulsed_g1_grid",
        [](const SystemParams& p, const std::string& cavity, const RealVector& t_ns) {
          const TwoTimeGrid g = pulsed_g1_grid(p, slot_from(cavity), t_ns);
          return py::make_tuple(g.t1_ns, g.values);
        },
        py::arg("params"), py::arg("cavity"), py::arg("t_ns"));
  m.def("hom_visibility",
        [](const RealVector& t_ns, const Matrix& values) {
          TwoTimeGrid g;
          g.t1_ns = t_ns;
          g.t2_ns = t_ns;
          g.values = values;
          return hom_visibility(g);
        },
        py::arg("t_ns"), py::arg("g1"));
  m.def("cross_correlation",
        [](const SystemParams& p, const RealVector& tau, const RealVector& t1) {
          const CrossCorrelationResult cc = cross_correlation(p, tau, t1);
          py::dict out;
          out["tau_ns"] = cc.tau_ns;
          out["density"] = cc.density;
          out["baseline"] = cc.baseline;
          out["normalized"] = cc.normalized;
          return out;
        },
        py::arg("params"), py::arg("tau_ns"), py::arg("t1_ns"));
  m.def("pair_statistics",
        [](const SystemParams& p, double t_end) {
          const PairStatistics s = pair_statistics(p, t_end);
          py::dict out;
          out["p_pair_fiber"] = s.p_pair_fiber;
          out["eta_u_given_l"] = s.eta_u_given_l;
          out["eta_l_given_u"] = s.eta_l_given_u;
          out["p_pair_raw"] = s.p_pair_raw;
          out["p_u_raw"] = s.p_u_raw;
          out["p_l_raw"] = s.p_l_raw;
          out["truncated"] = s.truncated;
          return out;
        },
        py::arg("params"), py::arg("t_end_ns") = 0.0);
  m.def("steady_state_g1",
        [](const SystemParams& p, const std::string& cavity, const RealVector& tau) {
          return steady_state_g1(p, slot_from(cavity), tau);
        },
        py::arg("params"), py::arg("cavity"), py::arg("tau_ns"));
  m.def("spectrum_from_g1",
        [](const RealVector& tau, const Vector& g1, const RealVector& omega) {
          const Spectrum s = spectrum_from_g1(tau, g1, omega);
          py::dict out;
          out["omega_mhz"] = s.omega_mhz;
          out["density"] = s.density;
          out["window_alpha_per_us"] = s.window_alpha_per_us;
          return out;
        },
        py::arg("tau_ns"), py::arg("g1"), py::arg("omega_mhz"));

  m.def("fit_exponential",
        [](const RealVector& t, const RealVector& y, double lo, double hi) {
          return fit_to_dict(fit_exponential(t, y, lo, hi));
        },
        py::arg("t"), py::arg("y"), py::arg("t_lo"), py::arg("t_hi"));
  m.def("fit_rise_fall",
        [](const RealVector& tau, const RealVector& c) {
          return fit_to_dict(fit_rise_fall(tau, c));
        },
        py::arg("tau"), py::arg("c"));
  m.def("fit_photoionization",
        [](const RealVector& intensity, const RealVector& lifetime, double wavelength_m,
           double pulse_window_s, double rep_period_s, double tau0_s, bool float_tau0) {
          PhotoionizationConstants constants{wavelength_m, pulse_window_s, rep_period_s, tau0_s};
          return fit_to_dict(fit_photoionization(intensity, lifetime, constants, float_tau0));
        },
        py::arg("intensity_w_m2"), py::arg("lifetime_s"), py::arg("wavelength_m") = 852e-9,
        py::arg("pulse_window_s") = 800e-9, py::arg("rep_period_s") = 0.2,
        py::arg("tau0_s") = 5.0, py::arg("float_tau0") = true);

  m.def("run_scenario_file",
        [](const std::string& path, const std::string& out_dir, int threads) {
          const Scenario sc = load_scenario(path);
          RunOptions opt;
          opt.out_dir = out_dir;
          opt.threads = threads;
          const RunOutcome outcome = run_scenario(sc, opt);
          return outcome.output_files;
        },
        py::arg("path"), py::arg("out_dir") = ".", py::arg("threads") = 1);

  m.attr("__version__") = kToolkitVersion;
}
