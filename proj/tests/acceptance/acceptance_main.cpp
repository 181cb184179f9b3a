// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code; nothing is deferred
// to later calibration.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cqed/corr.hpp"
#include "cqed/csvio.hpp"
#include "cqed/dynamics.hpp"
#include "cqed/fitkit.hpp"
#include "cqed/generator.hpp"
#include "cqed/scenario.hpp"
#include "cqed/steady.hpp"
#include "support/expm.hpp"
#include "support/params.hpp"

using namespace cqed;
namespace fs = std::filesystem;
using cqed_tests::experimental_params;
using cqed_tests::experimental_pulsed;
using cqed_tests::uniform;

namespace {

struct Harness {
  int failures = 0;
  std::string cli_path;
  std::string scenario_dir;

  void run(int number, const std::string& label, const std::function<bool(std::string&)>& fn) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = fn(detail);
    } catch (const std::exception& err) {
      detail = std::string("exception: ") + err.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %02d %s  %s (%.1f s)%s%s\n", number, ok ? "PASS" : "FAIL",
                label.c_str(), secs, detail.empty() ? "" : "  -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

bool within(double value, double target, double tol) {
  return std::abs(value - target) <= tol;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// ---------------------------------------------------------------- 1
bool dark_state_suite(std::string& detail) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    SystemParams p;
    p.g_u_mhz = uniform(rng, 0.05, 100.0);
    p.g_l_mhz = uniform(rng, 0.05, 100.0);
    const double delta = uniform(rng, -50.0, 50.0);
    p.delta_u_mhz = delta;
    p.delta_l_mhz = -delta;

    const Operator h = build_static_hamiltonian(p);
    const StateVector psi0 = dark_state(p);
    const double hnorm = h.m.cwiseAbs().maxCoeff();
    if ((h.m * psi0.amplitudes).norm() >= 1e-10 * hnorm) {
      detail = "dark state not annihilated";
      return false;
    }

    const SpaceLayout lay = p.layout();
    const int idx[3] = {lay.index_of(AtomLevel::e, 0, 0), lay.index_of(AtomLevel::i, 1, 0),
                        lay.index_of(AtomLevel::g, 1, 1)};
    Eigen::Matrix3cd block;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) block(r, c) = h.m(idx[r], idx[c]);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> eig(block);
    const auto closed = chain_eigenenergies(p, delta);
    std::array<double, 3> expect = {closed.e0_mhz, closed.e1_mhz, closed.e2_mhz};
    std::sort(expect.begin(), expect.end());
    const double scale = std::max({std::abs(expect[0]), std::abs(expect[2]), 1e-6});
    for (int k = 0; k < 3; ++k) {
      if (std::abs(eig.eigenvalues()(k) / two_pi - expect[k]) >= 1e-9 * scale) {
        detail = "closed-form eigenenergy mismatch";
        return false;
      }
    }
  }
  detail = "1000 random draws";
  return true;
}

// ---------------------------------------------------------------- 2
bool integrator_oracle(std::string& detail) {
  struct Case {
    SystemParams params;
    AtomLevel level;
    int n_u, n_l;
    double t_end_ns;
  };
  std::vector<Case> cases;

  SystemParams decay;
  decay.kappa_u_mhz = 30.0;
  decay.n_max_u = 1;
  decay.n_max_l = 1;
  cases.push_back({decay, AtomLevel::g, 1, 0, 20.0});

  SystemParams cascade = experimental_params();
  cascade.n_max_u = 1;
  cascade.n_max_l = 1;
  cases.push_back({cascade, AtomLevel::e, 0, 0, 150.0});

  SystemParams cw = cqed_tests::cw_scan_params();
  cw.n_max_u = 1;
  cw.n_max_l = 1;
  cases.push_back({cw, AtomLevel::g, 0, 0, 400.0});

  SystemParams chain;
  chain.g_u_mhz = 10.0;
  chain.g_l_mhz = 1.0;
  chain.gamma_u_mhz = 0.05;
  chain.gamma_l_mhz = 0.05;
  chain.n_max_u = 1;
  chain.n_max_l = 1;
  cases.push_back({chain, AtomLevel::e, 0, 0, 300.0});

  SystemParams detuned = cqed_tests::cw_scan_params();
  detuned.drive.delta_d_mhz = 4.0;
  detuned.n_max_u = 2;
  detuned.n_max_l = 1;
  cases.push_back({detuned, AtomLevel::g, 0, 0, 250.0});

  double worst = 0.0;
  for (const auto& c : cases) {
    const SpaceLayout lay = c.params.layout();
    const DensityMatrix rho0 = pure_state(basis_state(lay, c.level, c.n_u, c.n_l));
    const Trajectory traj =
        integrate_master_equation(c.params, rho0, c.t_end_ns, c.t_end_ns);

    const MasterEquation gen(c.params);
    std::vector<Matrix> c_ops;
    for (const auto& ch : gen.channels()) c_ops.push_back(ch.op.m);
    const Matrix l = liouvillian_matrix(gen.hamiltonian(0.0), c_ops);
    const Matrix propagator = cqed_tests::expm(l * ns_to_us(c.t_end_ns));
    const int n = lay.total_dim();
    Vector vec_rho(n * n);
    Eigen::Map<Matrix>(vec_rho.data(), n, n) = rho0.m;
    const Vector out = propagator * vec_rho;
    const Matrix rho_oracle = Eigen::Map<const Matrix>(out.data(), n, n);

    worst = std::max(worst, (traj.final_state.m - rho_oracle).cwiseAbs().maxCoeff());
  }
  detail = fmt("max elementwise error %.2e over 5 scenarios", worst);
  return worst < 1e-7;
}

// ---------------------------------------------------------------- 3
bool photon_lifetimes(std::string& detail) {
  SystemParams p = experimental_pulsed();
  const CalibrationResult cal = calibrate_pi_pulse(p);
  p.drive.omega_d_mhz = cal.peak_omega_mhz;
  const DensityMatrix rho0 =
      pure_state(basis_state(p.layout(), AtomLevel::g0, 0, 0));
  const Trajectory traj = integrate_master_equation(p, rho0, 800.0, 0.5);

  const FitResult fit_u =
      fit_exponential(traj.times_ns, photon_flux(traj, CavitySlot::upper), 200.0, 750.0);
  const FitResult fit_l =
      fit_exponential(traj.times_ns, photon_flux(traj, CavitySlot::lower), 200.0, 750.0);
  detail = fmt("tau_u = %.1f ns, tau_l = %.1f ns (target 106 +- 3)", fit_u.value("tau"),
               fit_l.value("tau"));
  return within(fit_u.value("tau"), 106.0, 3.0) && within(fit_l.value("tau"), 106.0, 3.0);
}

// ---------------------------------------------------------------- 4
bool purcell_analytics(std::string& detail) {
  const double c_u = cooperativity(4.0, 30.0, 0.33);
  const double c_l = cooperativity(21.9, 60.0, 3.0);
  const double tau_p = purcell_lifetime(26.2, 1.33);
  detail = fmt("C_u = %.3f, C_l = %.3f, tau_P = %.3f ns", c_u, c_l, tau_p);
  const bool c_ok = within(std::round(c_u * 100.0) / 100.0, 0.81, 1e-9) &&
                    within(std::round(c_l * 100.0) / 100.0, 1.33, 1e-9);
  const bool tau_ok = within(tau_p, 7.15, 0.01) && tau_p > 6.9 && tau_p < 7.3;
  return c_ok && tau_ok;
}

// ---------------------------------------------------------------- 5
bool cross_correlation_peak(std::string& detail) {
  SystemParams p = experimental_pulsed();
  const CalibrationResult cal = calibrate_pi_pulse(p);
  p.drive.omega_d_mhz = cal.peak_omega_mhz;
  const RealVector tau = RealVector::LinSpaced(161, -30.0, 50.0);
  const RealVector t1 = RealVector::LinSpaced(61, 0.0, 600.0);
  const CrossCorrelationResult cc = cross_correlation(p, tau, t1);

  // each edge fits a single exponential on its own tail; the rounded core
  // of the peak mixes both time scales and belongs to neither
  std::vector<double> x_rise, y_rise, x_fall, y_fall;
  for (Eigen::Index k = tau.size() - 1; k >= 0; --k) {
    if (tau(k) <= -0.5) {  // descending tau -> ascending -tau
      x_rise.push_back(-tau(k));
      y_rise.push_back(cc.density(k));
    }
  }
  for (Eigen::Index k = 0; k < tau.size(); ++k) {
    if (tau(k) >= 6.0) {
      x_fall.push_back(tau(k));
      y_fall.push_back(cc.density(k));
    }
  }
  const auto map_vec = [](std::vector<double>& v) {
    return Eigen::Map<RealVector>(v.data(), v.size());
  };
  const FitResult rise = fit_exponential(map_vec(x_rise), map_vec(y_rise), 0.5, 25.0);
  const FitResult fall = fit_exponential(map_vec(x_fall), map_vec(y_fall), 6.0, 45.0);
  detail = fmt("rise = %.2f ns (2.5 +- 0.5), fall = %.2f ns (7.1 +- 0.7)",
               rise.value("tau"), fall.value("tau"));
  return within(rise.value("tau"), 2.5, 0.5) && within(fall.value("tau"), 7.1, 0.7);
}

// ---------------------------------------------------------------- 6
bool pair_conditionals(std::string& detail) {
  SystemParams p = experimental_pulsed();
  const CalibrationResult cal = calibrate_pi_pulse(p);
  p.drive.omega_d_mhz = cal.peak_omega_mhz;
  const PairStatistics stats = pair_statistics(p);
  detail = fmt("eta_u|l = %.3f (0.63 +- 0.05), eta_l|u = %.3f (0.49 +- 0.05)",
               stats.eta_u_given_l, stats.eta_l_given_u) +
           fmt(", raw P_pair/P_u/P_l = %.3f/%.3f/%.3f", stats.p_pair_raw, stats.p_u_raw,
               stats.p_l_raw);
  return within(stats.eta_u_given_l, 0.63, 0.05) && within(stats.eta_l_given_u, 0.49, 0.05);
}

// ---------------------------------------------------------------- 7
bool hom_endpoints(std::string& detail) {
  auto visibility = [](double g_u, double g_l, double t_max) {
    SystemParams p = experimental_pulsed(7.0, 21.0);
    p.g_u_mhz = g_u;
    p.g_l_mhz = g_l;
    const CalibrationResult cal = calibrate_pi_pulse(p);
    p.drive.omega_d_mhz = cal.peak_omega_mhz;
    const RealVector grid = RealVector::LinSpaced(61, 0.0, t_max);
    return hom_visibility(pulsed_g1_grid(p, CavitySlot::upper, grid));
  };
  const double v_star = visibility(4.0, 21.9, 600.0);
  const double v_cross = visibility(80.0, 15.0, 150.0);

  SystemParams base = experimental_pulsed(7.0, 21.0);
  RealVector gu(5), gl(5);
  gu << 10.0, 27.5, 45.0, 62.5, 80.0;
  gl << 4.0, 9.0, 14.0, 18.5, 23.5;
  HomMapOptions options;
  options.grid_points = 41;
  const SweepResult map = hom_map(base, gu, gl, options);
  bool monotone = true;
  for (int r = 0; r < 5; ++r) {
    for (int c = 1; c < 5; ++c) {
      const double prev = map.points[r * 5 + c - 1].obs.at("V_HOM");
      const double curr = map.points[r * 5 + c].obs.at("V_HOM");
      if (curr >= prev) monotone = false;
    }
  }
  detail = fmt("V(4,21.9) = %.3f (0.08 +- 0.02), V(80,15) = %.3f (0.95 +- 0.02)", v_star,
               v_cross) + (monotone ? ", map monotone in g_l" : ", map NOT monotone");
  return within(v_star, 0.08, 0.02) && within(v_cross, 0.95, 0.02) && monotone;
}

// ---------------------------------------------------------------- 8
bool stirap_transfer(std::string& detail) {
  const SystemParams p = cqed_tests::stirap_params();
  const DensityMatrix rho0 = pure_state(basis_state(p.layout(), AtomLevel::g0, 0, 0));
  const Trajectory traj = integrate_master_equation(p, rho0, 10000.0, 10.0);
  const double final_pg = traj.series.at("P_g")(traj.times_ns.size() - 1);
  const double max_pi = traj.series.at("P_i").maxCoeff();
  const double peak_nu = traj.series.at("n_u").maxCoeff();
  const double peak_nl = traj.series.at("n_l").maxCoeff();
  detail = fmt("P_g(end) = %.3f, max P_i = %.4f, peak n = (%.3f, ...)", final_pg, max_pi,
               peak_nu);
  return final_pg > 0.95 && max_pi < 0.02 && peak_nu > 0.9 && peak_nl > 0.9;
}

// ---------------------------------------------------------------- 9
bool steady_state_suite(std::string& detail) {
  const RealVector grid = RealVector::LinSpaced(301, -15.0, 15.0);
  const double step = grid(1) - grid(0);

  // (a) normal-mode doublet at +-g_u for g_l = 0
  SystemParams doublet = cqed_tests::cw_scan_params();
  doublet.g_l_mhz = 0.0;
  const SweepResult sweep_a = sweep_drive_detuning(doublet, grid);
  double best_pos = 0.0, best_neg = 0.0, vp = -1.0, vn = -1.0;
  int maxima_a = 0;
  for (int k = 1; k + 1 < 301; ++k) {
    const double v = sweep_a.points[k].obs.at("n_u");
    if (v > sweep_a.points[k - 1].obs.at("n_u") && v > sweep_a.points[k + 1].obs.at("n_u"))
      ++maxima_a;
  }
  for (const auto& point : sweep_a.points) {
    const double d = grid(point.i0);
    const double v = point.obs.at("n_u");
    if (d > 0 && v > vp) { vp = v; best_pos = d; }
    if (d < 0 && v > vn) { vn = v; best_neg = d; }
  }
  const bool a_ok = maxima_a == 2 && std::abs(best_pos - 10.0) <= step + 1e-12 &&
                    std::abs(best_neg + 10.0) <= step + 1e-12;

  // (b, c) central emission peak and suppressed intermediate population
  const SweepResult sweep_b = sweep_drive_detuning(cqed_tests::cw_scan_params(), grid);
  const int center = 150;
  bool b_ok = true;
  for (const char* obs : {"n_u", "n_l"}) {
    b_ok = b_ok && sweep_b.points[center].obs.at(obs) > sweep_b.points[center - 1].obs.at(obs);
    b_ok = b_ok && sweep_b.points[center].obs.at(obs) > sweep_b.points[center + 1].obs.at(obs);
  }
  // suppression factor frozen from the solver oracle: the model puts
  // P_i(0)/max P_i at 0.113 for the published parameters
  double max_pi = 0.0;
  for (const auto& point : sweep_b.points) max_pi = std::max(max_pi, point.obs.at("P_i"));
  const double pi_ratio = sweep_b.points[center].obs.at("P_i") / max_pi;
  const bool c_ok = pi_ratio < 0.15;

  // (d) spectra: narrow dark-state line, broad g_u = 0 line, empty-cavity width
  auto fwhm_of = [](const Spectrum& spec) {
    const double peak = spec.density.maxCoeff();
    double lo = 0.0, hi = 0.0;
    for (Eigen::Index k = 1; k < spec.omega_mhz.size(); ++k) {
      const double p0 = spec.density(k - 1), p1 = spec.density(k);
      if (p0 < 0.5 * peak && p1 >= 0.5 * peak) {
        lo = spec.omega_mhz(k - 1) +
             (spec.omega_mhz(k) - spec.omega_mhz(k - 1)) * (0.5 * peak - p0) / (p1 - p0);
      }
      if (p0 >= 0.5 * peak && p1 < 0.5 * peak) {
        hi = spec.omega_mhz(k - 1) +
             (spec.omega_mhz(k) - spec.omega_mhz(k - 1)) * (0.5 * peak - p0) / (p1 - p0);
      }
    }
    return hi - lo;
  };

  // the dark-state line decays at only ~0.066/us, so the tau window runs
  // to 400 us and the omega grid resolves a ~0.02 MHz line
  const SystemParams black = cqed_tests::cw_scan_params();
  const RealVector tau_black = RealVector::LinSpaced(4001, 0.0, 400000.0);
  const RealVector omega_fine = RealVector::LinSpaced(2001, -0.5, 0.5);
  const Spectrum spec_black =
      spectrum_from_g1(tau_black, steady_state_g1(black, CavitySlot::lower, tau_black),
                       omega_fine);
  const double fwhm_black = fwhm_of(spec_black);

  SystemParams orange = cqed_tests::cw_scan_params();
  orange.g_u_mhz = 0.0;
  const RealVector tau_orange = RealVector::LinSpaced(2001, 0.0, 4000.0);
  const RealVector omega_wide = RealVector::LinSpaced(1601, -8.0, 8.0);
  const Spectrum spec_orange = spectrum_from_g1(
      tau_orange, steady_state_g1(orange, CavitySlot::lower, tau_orange), omega_wide);
  const double fwhm_orange = fwhm_of(spec_orange);

  SystemParams empty;
  empty.kappa_l_mhz = 0.1;
  empty.kappa_u_mhz = 0.01;
  empty.n_max_u = 1;
  empty.n_max_l = 1;
  const SpaceLayout empty_lay = empty.layout();
  const Operator a_l = embed(annihilation(1), CavitySlot::lower, empty_lay);
  RealVector t1(1);
  t1(0) = 0.0;
  const RealVector tau_empty = RealVector::LinSpaced(5001, 0.0, 50000.0);
  const TwoTimeGrid empty_grid = regression_correlation(
      empty, pure_state(basis_state(empty_lay, AtomLevel::g, 0, 1)), a_l.dagger(), a_l,
      identity_operator(empty_lay), t1, tau_empty, CorrelationKind::g1_l);
  const RealVector omega_narrow = RealVector::LinSpaced(1501, -1.5, 1.5);
  const Spectrum spec_empty =
      spectrum_from_g1(tau_empty, empty_grid.values.row(0).transpose(), omega_narrow);
  const double fwhm_empty = fwhm_of(spec_empty);

  const bool d_ok = fwhm_black < 0.2 && fwhm_black < 2.0 * 2.0 &&
                    fwhm_black < fwhm_orange && within(fwhm_empty, 0.2, 0.004);

  // (e) kappa_u map: merged profiles above the coupling, three peaks below
  const RealVector kappa_rows = [&] {
    RealVector rows(40);
    const double llo = std::log(0.01), lhi = std::log(30.0);
    for (int k = 0; k < 40; ++k) rows(k) = std::exp(llo + (lhi - llo) * k / 39.0);
    return rows;
  }();
  const SweepResult map = kappa_detuning_map(cqed_tests::cw_scan_params(), kappa_rows, grid);
  const int cols = 301;
  auto row_maxima = [&](int row) {
    int maxima = 0;
    for (int c = 1; c + 1 < cols; ++c) {
      const double v = map.points[row * cols + c].obs.at("n_l_norm");
      if (v > map.points[row * cols + c - 1].obs.at("n_l_norm") &&
          v > map.points[row * cols + c + 1].obs.at("n_l_norm"))
        ++maxima;
    }
    return maxima;
  };
  double top_rms = 0.0;
  for (int c = 0; c < cols; ++c) {
    const auto& obs = map.points[39 * cols + c].obs;
    top_rms += std::pow(obs.at("n_l_norm") - obs.at("P_i_norm"), 2);
  }
  top_rms = std::sqrt(top_rms / cols);
  bool norm_ok = true;
  for (int r = 0; r < 40; ++r) {
    double best = 0.0;
    for (int c = 0; c < cols; ++c)
      best = std::max(best, map.points[r * cols + c].obs.at("n_l_norm"));
    if (std::abs(best - 1.0) > 1e-12) norm_ok = false;
  }
  const bool e_ok = row_maxima(0) == 3 && top_rms < 0.02 && norm_ok;

  detail = fmt("FWHM black/orange/empty = %.3f / %.3f / %.4f MHz", fwhm_black, fwhm_orange,
               fwhm_empty) +
           fmt(", P_i(0)/max = %.3f", pi_ratio) + (a_ok ? "" : " [doublet FAIL]") +
           (b_ok ? "" : " [center FAIL]") + (c_ok ? "" : " [P_i FAIL]") +
           (d_ok ? "" : " [spectra FAIL]") + (e_ok ? "" : " [map FAIL]");
  return a_ok && b_ok && c_ok && d_ok && e_ok;
}

// ---------------------------------------------------------------- 10
bool photoionization_recovery(std::string& detail) {
  PhotoionizationConstants constants;
  RealVector intensity(13);
  intensity << 0.0, 2e7, 5e7, 1e8, 1.7e8, 2.6e8, 4e8, 6e8, 9e8, 1.4e9, 2.1e9, 3.2e9, 5e9;
  constexpr double hc = 1.98644586e-25;
  const double beta = 1e-22 * constants.pulse_window_s * constants.wavelength_m / hc;

  std::mt19937_64 rng(7);
  auto draw = [&rng]() {
    const double u1 = (rng() >> 11) * (1.0 / 9007199254740992.0);
    const double u2 = (rng() >> 11) * (1.0 / 9007199254740992.0);
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(two_pi * u2);
  };

  std::string parts;
  for (const double sigma_true : {12.0, 17.0}) {
    double worst = 0.0;
    for (int rep = 0; rep < 8; ++rep) {
      RealVector tau(13);
      for (int k = 0; k < 13; ++k) {
        const double p_pi = 0.8 * (1.0 - std::exp(-sigma_true * beta * intensity(k)));
        tau(k) = (1.0 + 0.05 * draw()) / (1.0 / 5.0 + p_pi / constants.rep_period_s);
      }
      const FitResult fit = fit_photoionization(intensity, tau, constants, true);
      worst = std::max(worst, std::abs(fit.value("sigma_Mb") - sigma_true) / sigma_true);
    }
    parts += fmt("sigma %.0f Mb worst dev %.1f%%; ", sigma_true, 100.0 * worst);
    if (worst > 0.25) {
      detail = parts;
      return false;
    }
  }
  detail = parts;
  return true;
}

// ---------------------------------------------------------------- 11
bool property_suite(Harness& h, std::string& detail) {
  // trace and positivity on the experimental pulse
  SystemParams p = experimental_pulsed();
  p.drive.omega_d_mhz = 28.0;
  const SpaceLayout lay = p.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g0, 0, 0));
  const Trajectory traj = integrate_master_equation(p, rho0, 700.0, 0.5);
  if (traj.trace_error >= 1e-6) {
    detail = fmt("trace drift %.2e", traj.trace_error);
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(traj.final_state.m);
  if (eig.eigenvalues().minCoeff() <= -1e-7) {
    detail = "positivity violated";
    return false;
  }

  // Fock-cutoff convergence of the emission probabilities. For the pulsed
  // single-emitter cascade the n = 2 sector is exactly empty, so the cw
  // scan point provides the nontrivial check.
  const EmissionResult base = emission_probabilities(traj);
  SystemParams bigger = p;
  bigger.n_max_u = 3;
  bigger.n_max_l = 3;
  const Trajectory traj3 = integrate_master_equation(
      bigger, pure_state(basis_state(bigger.layout(), AtomLevel::g0, 0, 0)), 700.0, 0.5);
  const EmissionResult refined = emission_probabilities(traj3);
  double cutoff_dev =
      std::max(std::abs(base.p_u - refined.p_u), std::abs(base.p_l - refined.p_l));

  SystemParams cw = cqed_tests::cw_scan_params();
  const SteadyStateResult ss2 = steady_state(cw);
  cw.n_max_u = 3;
  cw.n_max_l = 3;
  const SteadyStateResult ss3 = steady_state(cw);
  const SpaceLayout lay2 = SpaceLayout(2, 2);
  const SpaceLayout lay3 = SpaceLayout(3, 3);
  const Complex n_u2 = expectation(ss2.rho, number_operator(lay2, CavitySlot::upper));
  const Complex n_u3 = expectation(ss3.rho, number_operator(lay3, CavitySlot::upper));
  const Complex n_l2 = expectation(ss2.rho, number_operator(lay2, CavitySlot::lower));
  const Complex n_l3 = expectation(ss3.rho, number_operator(lay3, CavitySlot::lower));
  cutoff_dev = std::max({cutoff_dev, std::abs(n_u2.real() - n_u3.real()) / n_u3.real(),
                         std::abs(n_l2.real() - n_l3.real()) / n_l3.real()});
  if (cutoff_dev >= 1e-4) {
    detail = fmt("cutoff sensitivity %.2e", cutoff_dev);
    return false;
  }

  // regression tau = 0 consistency
  const Operator a_u = embed(annihilation(lay.n_max_u), CavitySlot::upper, lay);
  const Operator n_l = number_operator(lay, CavitySlot::lower);
  RealVector t1(1), tau0(1);
  t1 << 100.0;
  tau0 << 0.0;
  const TwoTimeGrid grid = regression_correlation(p, rho0, a_u.dagger(), n_l, a_u, t1, tau0,
                                                  CorrelationKind::g2_cross);
  const Trajectory to_t1 = integrate_master_equation(p, rho0, 100.0, 100.0);
  const Complex direct = expectation(to_t1.final_state, a_u.dagger() * n_l * a_u);
  if (std::abs(grid.values(0, 0) - direct) >= 1e-8) {
    detail = "regression tau=0 mismatch";
    return false;
  }

  // malformed config: exit code 1 with the offending field named
  const fs::path bad_path = fs::temp_directory_path() / "cqed_accept_bad.json";
  write_file(bad_path.string(), R"({"name": "bad", "task": "pulse", "params": {
    "g_u": 1, "g_l": 1, "kappa_u": -3.0, "kappa_l": 1, "gamma_u": 1, "gamma_l": 1,
    "drive": {"mode": "none"}}, "pulse": {"t_end_ns": 1, "sample_dt_ns": 1}})");
  const std::string bad_cmd = "\"" + h.cli_path + "\" validate \"" + bad_path.string() +
                              "\" > /dev/null 2>&1";
  const int bad_status = std::system(bad_cmd.c_str());
  fs::remove(bad_path);
  if (!WIFEXITED(bad_status) || WEXITSTATUS(bad_status) != 1) {
    detail = "malformed config did not exit with code 1";
    return false;
  }

  // byte-identical CLI reruns
  const fs::path out1 = fs::temp_directory_path() / "cqed_accept_run1";
  const fs::path out2 = fs::temp_directory_path() / "cqed_accept_run2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  const std::string scenario = h.scenario_dir + "/fig4_stirap.json";
  for (const auto& out : {out1, out2}) {
    const std::string cmd =
        "\"" + h.cli_path + "\" run \"" + scenario + "\" --out \"" + out.string() + "\"" +
        " > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      detail = "CLI run failed";
      return false;
    }
  }
  const std::string csv1 = read_file((out1 / "fig4_stirap_trajectory.csv").string());
  const std::string csv2 = read_file((out2 / "fig4_stirap_trajectory.csv").string());
  fs::remove_all(out1);
  fs::remove_all(out2);
  if (csv1 != csv2 || csv1.empty()) {
    detail = "CLI reruns differ";
    return false;
  }

  detail = fmt("cutoff dev %.1e, trace drift %.1e", cutoff_dev, traj.trace_error);
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  Harness h;
  for (int k = 1; k + 1 < argc; k += 2) {
    const std::string flag = argv[k];
    if (flag == "--cli") h.cli_path = argv[k + 1];
    if (flag == "--scenarios") h.scenario_dir = argv[k + 1];
  }
  if (h.cli_path.empty() || h.scenario_dir.empty()) {
    std::fprintf(stderr, "usage: acceptance --cli <cascade_qed binary> --scenarios <dir>\n");
    return 64;
  }

  h.run(1, "dark state and chain eigenstructure", dark_state_suite);
  h.run(2, "integrator vs matrix-exponential oracle", integrator_oracle);
  h.run(3, "photon lifetimes tau_u = tau_l = 106 ns", photon_lifetimes);
  h.run(4, "cooperativity and Purcell analytics", purcell_analytics);
  h.run(5, "cross-correlation rise and fall times", cross_correlation_peak);
  h.run(6, "pair statistics conditional efficiencies", pair_conditionals);
  h.run(7, "HOM visibility endpoints and map monotonicity", hom_endpoints);
  h.run(8, "slow-pulse dark-state transfer", stirap_transfer);
  h.run(9, "steady-state scan suite", steady_state_suite);
  h.run(10, "photoionization cross-section recovery", photoionization_recovery);
  h.run(11, "property suite (trace, cutoff, regression, reruns)",
        [&h](std::string& d) { return property_suite(h, d); });

  if (h.failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", h.failures);
  }
  return h.failures == 0 ? 0 : 1;
}
