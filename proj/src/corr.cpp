#include "cqed/corr.hpp"

#include <algorithm>
#include <cmath>

#include "cqed/generator.hpp"
#include "cqed/ode.hpp"
#include "cqed/threadpool.hpp"

namespace cqed {

namespace {

std::vector<double> trapezoid_weights(const RealVector& x) {
  std::vector<double> w(x.size(), 0.0);
  for (Eigen::Index k = 0; k + 1 < x.size(); ++k) {
    const double h = 0.5 * (x(k + 1) - x(k));
    w[k] += h;
    w[k + 1] += h;
  }
  return w;
}

void check_sorted(const RealVector& grid, const char* what) {
  for (Eigen::Index k = 1; k < grid.size(); ++k) {
    if (grid(k) <= grid(k - 1)) {
      throw validation_error(std::string(what) + " grid must be strictly increasing");
    }
  }
}

/// Propagates rho through the sorted t1 grid, handing each sample to visit().
template <class Visit>
void propagate_samples(const MasterEquation& gen, const DensityMatrix& initial,
                       const RealVector& t_ns, Visit&& visit) {
  DormandPrince<const MasterEquation> stepper;
  Matrix rho = initial.m;
  double t_us = 0.0;
  for (Eigen::Index i = 0; i < t_ns.size(); ++i) {
    const double target = ns_to_us(t_ns(i));
    if (target < t_us) throw validation_error("t1 grid must not precede the initial time");
    stepper.integrate(gen, t_us, target, rho);
    t_us = target;
    visit(static_cast<int>(i), rho);
  }
}

}  // namespace

TwoTimeGrid regression_correlation(const SystemParams& params, const DensityMatrix& initial,
                                   const Operator& a, const Operator& b, const Operator& c,
                                   const RealVector& t1_ns, const RealVector& tau_ns,
                                   CorrelationKind kind) {
  params.validate();
  const SpaceLayout lay = params.layout();
  if (a.layout != lay || b.layout != lay || c.layout != lay || initial.layout != lay) {
    throw validation_error("regression operators must share the params layout");
  }
  check_sorted(t1_ns, "t1");
  check_sorted(tau_ns, "tau");
  if (tau_ns(0) < 0.0) throw validation_error("tau grid must start at tau >= 0");

  const MasterEquation gen(params);
  TwoTimeGrid grid;
  grid.t1_ns = t1_ns;
  grid.t2_ns = tau_ns;
  grid.kind = kind;
  grid.values.resize(t1_ns.size(), tau_ns.size());

  propagate_samples(gen, initial, t1_ns, [&](int i, const Matrix& rho) {
    DormandPrince<const MasterEquation> tau_stepper;
    Matrix block = c.m * rho * a.m;
    double t_us = ns_to_us(t1_ns(i));
    for (Eigen::Index j = 0; j < tau_ns.size(); ++j) {
      const double target = ns_to_us(t1_ns(i) + tau_ns(j));
      tau_stepper.integrate(gen, t_us, target, block);
      t_us = target;
      grid.values(i, j) = (b.m * block).trace();
    }
  });
  return grid;
}

TwoTimeGrid pulsed_g1_grid(const SystemParams& params, CavitySlot cavity,
                           const RealVector& t_ns) {
  params.validate();
  if (params.drive.mode != DriveMode::pulsed_g0_e) {
    throw validation_error("pulsed g1 grid requires the pulsed drive mode");
  }
  check_sorted(t_ns, "time");
  const SpaceLayout lay = params.layout();
  const int n_max = cavity == CavitySlot::upper ? lay.n_max_u : lay.n_max_l;
  const Operator a_op = embed(annihilation(n_max), cavity, lay);
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g0, 0, 0));
  const MasterEquation gen(params);

  TwoTimeGrid grid;
  grid.t1_ns = t_ns;
  grid.t2_ns = t_ns;
  grid.kind = cavity == CavitySlot::upper ? CorrelationKind::g1_u : CorrelationKind::g1_l;
  grid.values.resize(t_ns.size(), t_ns.size());

  propagate_samples(gen, rho0, t_ns, [&](int i, const Matrix& rho) {
    DormandPrince<const MasterEquation> tau_stepper;
    Matrix block = rho * a_op.m.adjoint();
    double t_us = ns_to_us(t_ns(i));
    for (Eigen::Index j = i; j < t_ns.size(); ++j) {
      tau_stepper.integrate(gen, t_us, ns_to_us(t_ns(j)), block);
      t_us = ns_to_us(t_ns(j));
      const Complex g = (a_op.m * block).trace();
      grid.values(i, j) = g;
      grid.values(j, i) = std::conj(g);
    }
  });
  return grid;
}

double hom_visibility(const TwoTimeGrid& g1) {
  if (g1.t1_ns.size() != g1.t2_ns.size() || g1.values.rows() != g1.t1_ns.size() ||
      g1.values.cols() != g1.t2_ns.size()) {
    throw validation_error("hom_visibility expects a square G1 kernel");
  }
  const auto w = trapezoid_weights(g1.t1_ns);
  double num = 0.0;
  double diag = 0.0;
  for (Eigen::Index i = 0; i < g1.values.rows(); ++i) {
    // |.| keeps the value invariant under a global phase of the kernel
    diag += w[i] * std::abs(g1.values(i, i));
    for (Eigen::Index j = 0; j < g1.values.cols(); ++j) {
      num += w[i] * w[j] * std::norm(g1.values(i, j));
    }
  }
  if (diag <= 0.0) throw numerical_error("hom_visibility: empty photon wave packet");
  return num / (diag * diag);
}

SweepResult hom_map(const SystemParams& params, const RealVector& g_u_mhz,
                    const RealVector& g_l_mhz, const HomMapOptions& options) {
  params.validate();
  if (params.drive.mode != DriveMode::pulsed_g0_e) {
    throw validation_error("HOM map requires the pulsed drive mode");
  }
  SweepResult result;
  result.axes.push_back({"g_u", "MHz", g_u_mhz});
  result.axes.push_back({"g_l", "MHz", g_l_mhz});
  result.observable_names = {"V_HOM", "peak_omega", "achieved_pe"};
  const int cols = static_cast<int>(g_l_mhz.size());
  result.points.resize(g_u_mhz.size() * g_l_mhz.size());

  parallel_for(result.points.size(), options.threads, [&](std::size_t k) {
    SweepPoint& point = result.points[k];
    point.i0 = static_cast<int>(k) / cols;
    point.i1 = static_cast<int>(k) % cols;
    SystemParams p = params;
    p.g_u_mhz = g_u_mhz(point.i0);
    p.g_l_mhz = g_l_mhz(point.i1);
    try {
      const CalibrationResult cal = calibrate_pi_pulse(p);
      p.drive.omega_d_mhz = cal.peak_omega_mhz;
      double t_max = options.t_max_ns;
      if (t_max <= 0.0) {
        // span at least five lifetimes of the slower (Purcell-limited) stage
        const double c_u = p.g_u_mhz > 0.0
                               ? cooperativity(p.g_u_mhz, p.kappa_u_mhz, p.gamma_u_mhz)
                               : 0.0;
        const double tau_e = purcell_lifetime(1e3 / (2.0 * mhz_to_angular(p.gamma_u_mhz)), c_u);
        t_max = p.drive.pulse->center_ns + 3.0 * p.drive.pulse->fwhm_ns + 5.0 * tau_e;
      }
      const RealVector t_grid = RealVector::LinSpaced(options.grid_points, 0.0, t_max);
      const TwoTimeGrid g1 = pulsed_g1_grid(p, CavitySlot::upper, t_grid);
      point.obs["V_HOM"] = hom_visibility(g1);
      point.obs["peak_omega"] = cal.peak_omega_mhz;
      point.obs["achieved_pe"] = cal.achieved_pe;
      point.residual = 0.0;
    } catch (const std::exception& err) {
      point.error = err.what();
      for (const auto& name : result.observable_names) point.obs[name] = std::nan("");
    }
  });
  return result;
}

namespace {

/// One ordering of the coincidence surface: starting operator s (applied as
/// s rho s^+ at t1), detector operator n at t1+tau. Returns the t1-integrated
/// density q(tau) in photons^2/ns after scaling with both emission rates.
RealVector coincidence_marginal(const MasterEquation& gen, const DensityMatrix& rho0,
                                const RealVector& t1_ns, const RealVector& tau_ns,
                                const SparseMatrix& s, const Matrix& n_det, double rate_scale) {
  const auto w1 = trapezoid_weights(t1_ns);
  RealVector q = RealVector::Zero(tau_ns.size());
  propagate_samples(gen, rho0, t1_ns, [&](int i, const Matrix& rho) {
    DormandPrince<const MasterEquation> stepper;
    Matrix block = s * rho * s.adjoint();
    double t_us = ns_to_us(t1_ns(i));
    for (Eigen::Index j = 0; j < tau_ns.size(); ++j) {
      const double target = ns_to_us(t1_ns(i) + tau_ns(j));
      stepper.integrate(gen, t_us, target, block);
      t_us = target;
      q(j) += w1[i] * rate_scale * (n_det * block).trace().real();
    }
  });
  return q;
}

SparseMatrix sparse_of(const Matrix& m) {
  SparseMatrix s = m.sparseView(1.0, 1e-300);
  s.makeCompressed();
  return s;
}

}  // namespace

CrossCorrelationResult cross_correlation(const SystemParams& params, const RealVector& tau_ns,
                                         const RealVector& t1_ns) {
  params.validate();
  if (params.drive.mode != DriveMode::pulsed_g0_e) {
    throw validation_error("cross correlation requires the pulsed drive mode");
  }
  check_sorted(tau_ns, "tau");
  check_sorted(t1_ns, "t1");

  const SpaceLayout lay = params.layout();
  const SparseMatrix a_u = sparse_of(embed(annihilation(lay.n_max_u), CavitySlot::upper, lay).m);
  const SparseMatrix a_l = sparse_of(embed(annihilation(lay.n_max_l), CavitySlot::lower, lay).m);
  const Matrix n_u = number_operator(lay, CavitySlot::upper).m;
  const Matrix n_l = number_operator(lay, CavitySlot::lower).m;
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g0, 0, 0));
  const MasterEquation gen(params);

  // 2 kappa_u * 2 kappa_l in 1/ns^2
  const double rate_scale = 4.0 * mhz_to_angular(params.kappa_u_mhz) *
                            mhz_to_angular(params.kappa_l_mhz) * 1e-6;

  std::vector<double> tau_pos, tau_neg;
  for (Eigen::Index k = 0; k < tau_ns.size(); ++k) {
    if (tau_ns(k) >= 0.0) tau_pos.push_back(tau_ns(k));
    else tau_neg.push_back(-tau_ns(k));
  }
  std::sort(tau_neg.begin(), tau_neg.end());

  RealVector q_pos, q_neg;
  if (!tau_pos.empty()) {
    const RealVector grid = Eigen::Map<const RealVector>(tau_pos.data(), tau_pos.size());
    q_pos = coincidence_marginal(gen, rho0, t1_ns, grid, a_u, n_l, rate_scale);
  }
  if (!tau_neg.empty()) {
    const RealVector grid = Eigen::Map<const RealVector>(tau_neg.data(), tau_neg.size());
    q_neg = coincidence_marginal(gen, rho0, t1_ns, grid, a_l, n_u, rate_scale);
  }

  // independent-trials baseline from the single-trajectory marginal fluxes
  const Trajectory traj =
      integrate_master_equation(params, rho0, t1_ns(t1_ns.size() - 1), 0.5);
  const RealVector f_u = photon_flux(traj, CavitySlot::upper);
  const RealVector f_l = photon_flux(traj, CavitySlot::lower);
  auto flux_at = [&](const RealVector& f, double t) -> double {
    if (t < 0.0 || t > traj.times_ns(traj.times_ns.size() - 1)) return 0.0;
    const double dt = traj.times_ns(1) - traj.times_ns(0);
    const Eigen::Index k = std::min<Eigen::Index>(static_cast<Eigen::Index>(t / dt),
                                                  f.size() - 2);
    const double frac = (t - traj.times_ns(k)) / dt;
    return f(k) * (1.0 - frac) + f(k + 1) * frac;
  };

  CrossCorrelationResult out;
  out.tau_ns = tau_ns;
  out.density.resize(tau_ns.size());
  out.baseline.resize(tau_ns.size());
  out.normalized.resize(tau_ns.size());
  for (Eigen::Index k = 0; k < tau_ns.size(); ++k) {
    const double tau = tau_ns(k);
    double c;
    if (tau >= 0.0) {
      const auto it = std::lower_bound(tau_pos.begin(), tau_pos.end(), tau);
      c = q_pos(static_cast<Eigen::Index>(it - tau_pos.begin()));
    } else {
      const auto it = std::lower_bound(tau_neg.begin(), tau_neg.end(), -tau);
      c = q_neg(static_cast<Eigen::Index>(it - tau_neg.begin()));
    }
    double b = 0.0;
    const double dt = traj.times_ns(1) - traj.times_ns(0);
    for (Eigen::Index s = 0; s < traj.times_ns.size(); ++s) {
      const double wt = (s == 0 || s + 1 == traj.times_ns.size()) ? 0.5 * dt : dt;
      b += wt * flux_at(f_u, traj.times_ns(s)) * flux_at(f_l, traj.times_ns(s) + tau);
    }
    out.density(k) = c;
    out.baseline(k) = b;
    out.normalized(k) = b > 0.0 ? c / b : 0.0;
  }
  return out;
}

PairStatistics pair_statistics(const SystemParams& params, double t_end_ns) {
  params.validate();
  if (params.drive.mode != DriveMode::pulsed_g0_e) {
    throw validation_error("pair statistics requires the pulsed drive mode");
  }
  const SpaceLayout lay = params.layout();
  const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g0, 0, 0));

  if (t_end_ns <= 0.0) {
    const double c_u = cooperativity(params.g_u_mhz, params.kappa_u_mhz, params.gamma_u_mhz);
    const double tau_e =
        purcell_lifetime(1e3 / (2.0 * mhz_to_angular(params.gamma_u_mhz)), c_u);
    t_end_ns = params.drive.pulse->center_ns + 3.0 * params.drive.pulse->fwhm_ns + 7.0 * tau_e;
  }

  const Trajectory traj = integrate_master_equation(params, rho0, t_end_ns, 0.5);
  const EmissionResult em = emission_probabilities(traj);

  // delay window for the conditional dynamics: the intermediate-state and
  // both cavity lifetimes all live below ~10 ns at the shipped parameters;
  // 25x the slower of the two cavity lifetimes is conservative
  const double tau_cav_u = 1e3 / (2.0 * mhz_to_angular(params.kappa_u_mhz));
  const double tau_cav_l = 1e3 / (2.0 * mhz_to_angular(params.kappa_l_mhz));
  const double gamma_l_tot =
      params.gamma_l_mhz *
      (2.0 * cooperativity(params.g_l_mhz, params.kappa_l_mhz, params.gamma_l_mhz) + 1.0);
  const double tau_i = 1e3 / (2.0 * mhz_to_angular(gamma_l_tot));
  const double tau_span = 25.0 * std::max({tau_cav_u, tau_cav_l, tau_i});
  const int n_tau = 161;
  const RealVector tau_grid = RealVector::LinSpaced(n_tau, 0.0, tau_span);
  const int n_t1 = 121;
  const RealVector t1_grid = RealVector::LinSpaced(n_t1, 0.0, t_end_ns);

  const SparseMatrix a_u = sparse_of(embed(annihilation(lay.n_max_u), CavitySlot::upper, lay).m);
  const SparseMatrix a_l = sparse_of(embed(annihilation(lay.n_max_l), CavitySlot::lower, lay).m);
  const Matrix n_u = number_operator(lay, CavitySlot::upper).m;
  const Matrix n_l = number_operator(lay, CavitySlot::lower).m;
  const MasterEquation gen(params);
  const double rate_scale = 4.0 * mhz_to_angular(params.kappa_u_mhz) *
                            mhz_to_angular(params.kappa_l_mhz) * 1e-6;

  const RealVector q_ul = coincidence_marginal(gen, rho0, t1_grid, tau_grid, a_u, n_l, rate_scale);
  const RealVector q_lu = coincidence_marginal(gen, rho0, t1_grid, tau_grid, a_l, n_u, rate_scale);

  const auto w_tau = trapezoid_weights(tau_grid);
  double p_pair_raw = 0.0;
  for (int j = 0; j < n_tau; ++j) p_pair_raw += w_tau[j] * (q_ul(j) + q_lu(j));

  PairStatistics stats;
  stats.p_pair_raw = p_pair_raw;
  stats.p_u_raw = em.p_u;
  stats.p_l_raw = em.p_l;
  stats.truncated = em.truncated;
  const double c_u = params.collection.eta_oc_u * params.collection.eta_mm_u;
  const double c_l = params.collection.eta_oc_l * params.collection.eta_mm_l;
  stats.p_pair_fiber = p_pair_raw * c_u * c_l;
  const double p_u_fiber = em.p_u * c_u;
  const double p_l_fiber = em.p_l * c_l;
  stats.eta_u_given_l = p_l_fiber > 0.0 ? stats.p_pair_fiber / p_l_fiber : 0.0;
  stats.eta_l_given_u = p_u_fiber > 0.0 ? stats.p_pair_fiber / p_u_fiber : 0.0;
  return stats;
}

Spectrum spectrum_from_g1(const RealVector& tau_ns, const Vector& g1,
                          const RealVector& omega_mhz) {
  if (tau_ns.size() != g1.size() || tau_ns.size() < 4) {
    throw validation_error("g1 series and tau grid sizes do not match");
  }
  check_sorted(tau_ns, "tau");
  const double g0 = std::abs(g1(0));
  if (g0 <= 0.0) throw validation_error("g1(0) must be nonzero");
  const double tail = std::abs(g1(g1.size() - 1)) / g0;
  if (tail > 1e-4) {
    throw validation_error("g1 tail has not decayed below 1e-4 of g1(0); "
                           "extend the tau window");
  }

  // Gaussian apodization sized so the windowed tail drops to ~1e-11,
  // which keeps truncation ringing below the nonnegativity tolerance.
  const double span_us = ns_to_us(tau_ns(tau_ns.size() - 1));
  const double alpha =
      tail > 1e-11 ? std::sqrt(std::log(tail / 1e-11)) / span_us : 0.0;

  const auto w = trapezoid_weights(tau_ns);
  Spectrum spec;
  spec.omega_mhz = omega_mhz;
  spec.window_alpha_per_us = alpha;
  spec.density.resize(omega_mhz.size());
  for (Eigen::Index k = 0; k < omega_mhz.size(); ++k) {
    const double w_ang = mhz_to_angular(omega_mhz(k));
    Complex acc = 0.0;
    for (Eigen::Index j = 0; j < tau_ns.size(); ++j) {
      const double tau_us = ns_to_us(tau_ns(j));
      const double window = std::exp(-(alpha * tau_us) * (alpha * tau_us));
      acc += ns_to_us(w[j]) * window * g1(j) * std::exp(Complex(0.0, w_ang * tau_us));
    }
    spec.density(k) = 2.0 * acc.real();
  }

  double area = 0.0;
  const auto wf = trapezoid_weights(omega_mhz);
  for (Eigen::Index k = 0; k < omega_mhz.size(); ++k) area += wf[k] * spec.density(k);
  if (area <= 0.0) throw numerical_error("spectrum has nonpositive area");
  spec.raw_area = area;
  spec.density /= area;
  return spec;
}

Vector steady_state_g1(const SystemParams& params, CavitySlot cavity,
                       const RealVector& tau_ns) {
  const SteadyStateResult ss = steady_state(params);
  const SpaceLayout lay = params.layout();
  const int n_max = cavity == CavitySlot::upper ? lay.n_max_u : lay.n_max_l;
  const Operator a_op = embed(annihilation(n_max), cavity, lay);
  const Operator eye = identity_operator(lay);
  RealVector t1(1);
  t1(0) = 0.0;
  const TwoTimeGrid grid =
      regression_correlation(params, ss.rho, a_op.dagger(), a_op, eye, t1, tau_ns,
                             cavity == CavitySlot::upper ? CorrelationKind::g1_u
                                                         : CorrelationKind::g1_l);
  return grid.values.row(0).transpose();
}

}  // namespace cqed
