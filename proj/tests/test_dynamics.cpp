#include <doctest.h>

#include <cmath>

#include "cqed/dynamics.hpp"
#include "support/params.hpp"

using namespace cqed;
using cqed_tests::experimental_params;
using cqed_tests::experimental_pulsed;

TEST_CASE("undriven ground state is stationary") {
  SystemParams p = experimental_params();
  const SpaceLayout lay = p.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g0, 0, 0));
  const Trajectory traj = integrate_master_equation(p, rho0, 100.0, 5.0);
  CHECK(traj.trace_error < 1e-10);
  for (Eigen::Index k = 0; k < traj.times_ns.size(); ++k) {
    CHECK(traj.series.at("P_g0")(k) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(traj.series.at("n_u")(k)) < 1e-12);
  }
}

TEST_CASE("empty cavity decays at 2 kappa") {
  SystemParams p;
  p.kappa_u_mhz = 30.0;
  const SpaceLayout lay = p.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g, 1, 0));
  const Trajectory traj = integrate_master_equation(p, rho0, 10.0, 0.1);
  const double rate = 2.0 * mhz_to_angular(30.0);  // 1/us
  for (Eigen::Index k = 1; k < traj.times_ns.size(); ++k) {
    const double expected = std::exp(-rate * ns_to_us(traj.times_ns(k)));
    CHECK(std::abs(traj.series.at("n_u")(k) - expected) < 1e-6 * expected);
  }
}

TEST_CASE("excited-state decay through the dipole channel alone") {
  SystemParams p;
  p.gamma_u_mhz = 0.33;
  const SpaceLayout lay = p.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::e, 0, 0));
  // free-space lifetime 1/(4 pi gamma) = 241.1 ns for gamma = 0.33 MHz
  const double tau_ns = 1e3 / (2.0 * mhz_to_angular(0.33));
  CHECK(tau_ns == doctest::Approx(241.1).epsilon(1e-3));
  const Trajectory traj = integrate_master_equation(p, rho0, 2.0 * tau_ns, tau_ns);
  CHECK(traj.series.at("P_e")(1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(traj.series.at("P_e")(2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
}

TEST_CASE("two-level Rabi dynamics match the analytic pulse area") {
  // all cavity couplings and decays off: P_e(t) = sin^2(integral 2pi Omega dt)
  SystemParams p;
  p.drive.mode = DriveMode::pulsed_g0_e;
  p.drive.omega_d_mhz = 5.0;
  p.drive.pulse = PulseShape{50.0, 20.0};
  const SpaceLayout lay = p.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g0, 0, 0));
  const Trajectory traj = integrate_master_equation(p, rho0, 120.0, 1.0);

  auto area_to = [&](double t_ns) {
    // integral of the gaussian envelope up to t, angular units
    const double sigma = 20.0 / (2.0 * std::sqrt(2.0 * M_LN2));
    const double full = mhz_to_angular(5.0) * sigma * std::sqrt(2.0 * M_PI) * 1e-3;
    return 0.5 * full * (1.0 + std::erf((t_ns - 50.0) / (sigma * std::sqrt(2.0))));
  };
  for (Eigen::Index k = 0; k < traj.times_ns.size(); k += 10) {
    const double expected = std::pow(std::sin(area_to(traj.times_ns(k))), 2);
    CHECK(std::abs(traj.series.at("P_e")(k) - expected) < 1e-6);
  }
}

TEST_CASE("pi-pulse calibration in the two-level limit") {
  SystemParams p;
  p.drive.mode = DriveMode::pulsed_g0_e;
  p.drive.pulse = PulseShape{60.0, 20.0};
  const CalibrationResult cal = calibrate_pi_pulse(p);
  CHECK(cal.achieved_pe > 0.999);

  // the coupling-amplitude area of the calibrated pulse is pi/2, i.e. the
  // conventional Rabi area 2 * integral(2pi Omega dt) is pi
  const double envelope_integral_us = ns_to_us(20.0) * std::sqrt(M_PI / (4.0 * M_LN2));
  const double area = mhz_to_angular(cal.peak_omega_mhz) * envelope_integral_us;
  CHECK(2.0 * area == doctest::Approx(M_PI).epsilon(2e-3));

  // doubling the calibrated peak drives the population back down
  SystemParams q = p;
  q.drive.omega_d_mhz = 2.0 * cal.peak_omega_mhz;
  const SpaceLayout lay = q.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g0, 0, 0));
  const Trajectory traj = integrate_master_equation(q, rho0, 120.0, 120.0);
  CHECK(traj.series.at("P_e")(1) < 0.1);
}

TEST_CASE("calibration with the experimental cascade parameters") {
  SystemParams p = experimental_pulsed();
  const CalibrationResult cal = calibrate_pi_pulse(p);
  CHECK(cal.achieved_pe > 0.9);
  CHECK(cal.peak_omega_mhz > 0.0);
}

TEST_CASE("photon flux integrates to the emitted photon number") {
  SystemParams p;
  p.kappa_l_mhz = 10.0;
  const SpaceLayout lay = p.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g, 0, 1));
  const Trajectory traj = integrate_master_equation(p, rho0, 200.0, 0.05);
  const EmissionResult em = emission_probabilities(traj);
  CHECK(em.p_l == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(em.p_u == 0.0);
  CHECK(!em.truncated);
  CHECK(photon_flux(traj, CavitySlot::upper).cwiseAbs().maxCoeff() == 0.0);

  const Trajectory cut = integrate_master_equation(p, rho0, 10.0, 0.25);
  CHECK(emission_probabilities(cut).truncated);
}

TEST_CASE("excitation bookkeeping with all decays on") {
  // every quantum leaving |e> shows up either as upper-cavity flux or as
  // dipole decay: integral(flux_u + 2(2pi gamma_u) P_e) dt = initial P_e
  SystemParams p = experimental_params();
  const SpaceLayout lay = p.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::e, 0, 0));
  const Trajectory traj = integrate_master_equation(p, rho0, 900.0, 0.25);
  const RealVector flux_u = photon_flux(traj, CavitySlot::upper);
  const double gamma_rate = 2.0 * mhz_to_angular(p.gamma_u_mhz) * 1e-3;  // 1/ns
  double total = 0.0;
  for (Eigen::Index k = 1; k < traj.times_ns.size(); ++k) {
    const double dt = traj.times_ns(k) - traj.times_ns(k - 1);
    const double f0 = flux_u(k - 1) + gamma_rate * traj.series.at("P_e")(k - 1);
    const double f1 = flux_u(k) + gamma_rate * traj.series.at("P_e")(k);
    total += 0.5 * (f0 + f1) * dt;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("pair emission symmetry when dipole decay is negligible") {
  // slow-pulse transfer with the cavity decays restored to small finite
  // values: each cavity emits one photon. The dipole rates must be truly
  // negligible here; even gamma_l ~ 1e-2 MHz eats a visible fraction of the
  // lower photon through intermediate-state re-absorption.
  SystemParams p = cqed_tests::stirap_params();
  p.gamma_u_mhz = 1e-8;
  p.gamma_l_mhz = 1e-8;
  p.kappa_u_mhz = 0.02;
  p.kappa_l_mhz = 0.02;
  const SpaceLayout lay = p.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g0, 0, 0));
  const Trajectory traj = integrate_master_equation(p, rho0, 100000.0, 100.0);
  const EmissionResult em = emission_probabilities(traj);
  CHECK(std::abs(em.p_u - em.p_l) < 1e-3);
  CHECK(em.p_u > 0.95);
}

TEST_CASE("fiber efficiencies") {
  const CollectionParams coll = experimental_params().collection;
  const double eta_u = fiber_efficiency(0.62, CavitySlot::upper, coll);
  CHECK(eta_u == doctest::Approx(0.62 * 0.79 * 0.94).epsilon(1e-12));
  CHECK(eta_u > 0.40);  // the model overestimates the measured 40(3)%
  const double eta_l = fiber_efficiency(0.73, CavitySlot::lower, coll);
  CHECK(eta_l == doctest::Approx(0.73 * 0.85 * 0.81).epsilon(1e-12));
  CHECK(eta_l > 0.29);  // same ordering against the measured 29(2)%
  CHECK(fiber_efficiency(0.0, CavitySlot::upper, coll) == 0.0);
  CHECK_THROWS_AS(fiber_efficiency(1.5, CavitySlot::upper, coll), validation_error);
}

TEST_CASE("trajectory population invariants on the experimental pulse") {
  SystemParams p = experimental_pulsed();
  p.drive.omega_d_mhz = 30.0;
  const SpaceLayout lay = p.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g0, 0, 0));
  const Trajectory traj = integrate_master_equation(p, rho0, 500.0, 1.0);
  CHECK(traj.trace_error < 1e-6);
  for (Eigen::Index k = 0; k < traj.times_ns.size(); ++k) {
    double sum = 0.0;
    for (const char* name : {"P_g0", "P_g", "P_i", "P_e"}) {
      const double v = traj.series.at(name)(k);
      CHECK(v > -1e-8);
      CHECK(v < 1.0 + 1e-8);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-6);
  }
  // sampled state stays positive within solver tolerance
  Eigen::SelfAdjointEigenSolver<Matrix> eig(traj.final_state.m);
  CHECK(eig.eigenvalues().minCoeff() > -1e-7);
}
