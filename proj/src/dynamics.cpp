#include "cqed/dynamics.hpp"

#include <cmath>

namespace cqed {

namespace {

struct PopulationObservables {
  std::vector<int> atom_of_index;  // flattened projector bookkeeping
  std::vector<int> nu_of_index;
  std::vector<int> nl_of_index;

  explicit PopulationObservables(const SpaceLayout& lay) {
    const int n = lay.total_dim();
    atom_of_index.resize(n);
    nu_of_index.resize(n);
    nl_of_index.resize(n);
    for (int k = 0; k < n; ++k) {
      const auto [a, nu, nl] = lay.decode(k);
      atom_of_index[k] = a;
      nu_of_index[k] = nu;
      nl_of_index[k] = nl;
    }
  }
};

}  // namespace

Trajectory integrate_master_equation(const SystemParams& params, const DensityMatrix& rho0,
                                     double t_end_ns, double sample_dt_ns,
                                     const OdeOptions& opts) {
  params.validate();
  if (sample_dt_ns <= 0.0) throw validation_error("sample_dt must be > 0");
  if (t_end_ns <= 0.0) throw validation_error("t_end must be > 0");
  const SpaceLayout lay = params.layout();
  if (rho0.layout != lay) {
    throw validation_error("initial state layout does not match params");
  }

  const MasterEquation gen(params);
  DormandPrince<const MasterEquation> stepper(opts);
  const PopulationObservables obs(lay);

  const int n_samples = static_cast<int>(std::llround(t_end_ns / sample_dt_ns)) + 1;
  Trajectory traj;
  traj.times_ns.resize(n_samples);
  traj.kappa_u_mhz = params.kappa_u_mhz;
  traj.kappa_l_mhz = params.kappa_l_mhz;
  static const char* kPopNames[] = {"P_g0", "P_g", "P_i", "P_e"};
  for (auto* name : kPopNames) traj.series[name] = RealVector::Zero(n_samples);
  traj.series["n_u"] = RealVector::Zero(n_samples);
  traj.series["n_l"] = RealVector::Zero(n_samples);

  Matrix rho = rho0.m;
  double trace_error = 0.0;
  const int dim = lay.total_dim();

  for (int s = 0; s < n_samples; ++s) {
    const double t_ns = s * sample_dt_ns;
    if (s > 0) {
      stepper.integrate(gen, ns_to_us((s - 1) * sample_dt_ns),
                        ns_to_us(t_ns), rho);
    }
    traj.times_ns[s] = t_ns;
    double pops[4] = {0, 0, 0, 0};
    double nu = 0.0, nl = 0.0, tr = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double p = rho(k, k).real();
      tr += p;
      pops[obs.atom_of_index[k]] += p;
      nu += obs.nu_of_index[k] * p;
      nl += obs.nl_of_index[k] * p;
    }
    for (int a = 0; a < 4; ++a) traj.series[kPopNames[a]](s) = pops[a];
    traj.series["n_u"](s) = nu;
    traj.series["n_l"](s) = nl;
    trace_error = std::max(trace_error, std::abs(tr - 1.0));
  }

  traj.trace_error = trace_error;
  traj.final_state = DensityMatrix(lay, std::move(rho));

  // fluxes in photons/ns: 2 * kappa_angular[1/us] * n / 1000
  const double fu = 2.0 * mhz_to_angular(params.kappa_u_mhz) * 1e-3;
  const double fl = 2.0 * mhz_to_angular(params.kappa_l_mhz) * 1e-3;
  traj.series["flux_u_per_ns"] = fu * traj.series["n_u"];
  traj.series["flux_l_per_ns"] = fl * traj.series["n_l"];
  return traj;
}

namespace {

/// Excited-state population along the pulse window for a candidate peak:
/// returns both the end-of-window value (the calibration objective, sharply
/// peaked at the pi condition) and the maximum reached (the excitation the
/// pulse actually achieves before free decay sets in).
struct PulseExcitation {
  double at_end = 0.0;
  double peak = 0.0;
};

PulseExcitation pulse_excitation(const SystemParams& params, double peak_mhz) {
  SystemParams p = params;
  p.drive.omega_d_mhz = peak_mhz;
  const SpaceLayout lay = p.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g0, 0, 0));
  const double t_end = p.drive.pulse->center_ns + 3.0 * p.drive.pulse->fwhm_ns;
  const double dt = p.drive.pulse->fwhm_ns / 20.0;
  const MasterEquation gen(p);
  DormandPrince<const MasterEquation> stepper;
  Matrix rho = rho0.m;
  PulseExcitation out;
  double t = 0.0;
  while (t < t_end) {
    const double next = std::min(t + dt, t_end);
    stepper.integrate(gen, ns_to_us(t), ns_to_us(next), rho);
    t = next;
    double pe = 0.0;
    for (int nu = 0; nu <= lay.n_max_u; ++nu)
      for (int nl = 0; nl <= lay.n_max_l; ++nl)
        pe +=
            rho(lay.index_of(AtomLevel::e, nu, nl), lay.index_of(AtomLevel::e, nu, nl)).real();
    out.peak = std::max(out.peak, pe);
    out.at_end = pe;
  }
  return out;
}

double achieved_excitation(const SystemParams& params, double peak_mhz) {
  return pulse_excitation(params, peak_mhz).at_end;
}

}  // namespace

CalibrationResult calibrate_pi_pulse(const SystemParams& params, int max_iterations) {
  params.validate();
  if (params.drive.mode != DriveMode::pulsed_g0_e) {
    throw validation_error("pi-pulse calibration requires the pulsed drive mode");
  }

  // Area estimate for a two-level pi pulse: integral of the angular Rabi
  // coupling over the Gaussian equals pi/2 at full inversion.
  const double env_integral_us =
      ns_to_us(params.drive.pulse->fwhm_ns) * std::sqrt(M_PI / (4.0 * M_LN2));
  const double omega_guess = 0.25 / env_integral_us / 1.0;  // MHz; area pi/2 at 2pi*omega
  int iters = 0;

  // Bracket the first maximum by doubling from well below the estimate.
  double lo = omega_guess / 8.0;
  double mid = lo;
  double f_mid = achieved_excitation(params, mid);
  double hi = mid;
  double f_hi = f_mid;
  while (true) {
    if (++iters > max_iterations) {
      throw numerical_error("pi-pulse calibration failed to bracket a maximum");
    }
    hi = mid * 2.0;
    f_hi = achieved_excitation(params, hi);
    if (f_hi < f_mid) break;
    lo = mid;
    mid = hi;
    f_mid = f_hi;
  }

  // Golden-section refinement of the bracketed maximum.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = achieved_excitation(params, x1);
  double f2 = achieved_excitation(params, x2);
  while (b - a > 1e-4 * b) {
    if (++iters > max_iterations) {
      throw numerical_error("pi-pulse calibration did not converge within iteration budget");
    }
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = achieved_excitation(params, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = achieved_excitation(params, x1);
    }
  }

  CalibrationResult result;
  result.peak_omega_mhz = 0.5 * (a + b);
  result.achieved_pe = pulse_excitation(params, result.peak_omega_mhz).peak;
  result.iterations = iters;
  return result;
}

RealVector photon_flux(const Trajectory& traj, CavitySlot cavity) {
  const bool upper = cavity == CavitySlot::upper;
  const auto it = traj.series.find(upper ? "n_u" : "n_l");
  if (it == traj.series.end()) {
    throw validation_error("trajectory lacks the photon-number series");
  }
  const double kappa = upper ? traj.kappa_u_mhz : traj.kappa_l_mhz;
  return (2.0 * mhz_to_angular(kappa) * 1e-3) * it->second;
}

namespace {
double trapezoid(const RealVector& x, const RealVector& y) {
  double sum = 0.0;
  for (Eigen::Index k = 1; k < x.size(); ++k) {
    sum += 0.5 * (y(k) + y(k - 1)) * (x(k) - x(k - 1));
  }
  return sum;
}
}  // namespace

EmissionResult emission_probabilities(const Trajectory& traj) {
  EmissionResult out;
  out.p_u = trapezoid(traj.times_ns, photon_flux(traj, CavitySlot::upper));
  out.p_l = trapezoid(traj.times_ns, photon_flux(traj, CavitySlot::lower));
  const Eigen::Index last = traj.times_ns.size() - 1;
  const double residual =
      std::max(traj.series.at("n_u")(last), traj.series.at("n_l")(last));
  out.truncated = residual > 1e-4;
  return out;
}

double fiber_efficiency(double p, CavitySlot channel, const CollectionParams& collection) {
  if (p < 0.0 || p > 1.0) throw validation_error("probability must lie in [0, 1]");
  return channel == CavitySlot::upper ? p * collection.eta_oc_u * collection.eta_mm_u
                                      : p * collection.eta_oc_l * collection.eta_mm_l;
}

}  // namespace cqed
