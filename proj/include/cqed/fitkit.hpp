#ifndef CQED_FITKIT_HPP
#define CQED_FITKIT_HPP

#include <string>
#include <vector>

#include "cqed/types.hpp"

namespace cqed {

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<double> sigmas;  ///< 1-sigma from the linearized covariance
  double residual_rms = 0.0;
  bool converged = false;
  int iterations = 0;

  double value(const std::string& name) const;
  double sigma(const std::string& name) const;
};

/// y = A exp(-t/tau) on the window [t_lo, t_hi], damped Gauss-Newton seeded
/// from the log-linear regression. Needs >= 8 strictly positive samples in
/// the window.
FitResult fit_exponential(const RealVector& t, const RealVector& y, double t_lo, double t_hi);

/// Piecewise exponential peak A exp((tau-tau0)/tau_rise) left of tau0 and
/// A exp(-(tau-tau0)/tau_fall) right of it, continuous at tau0. The series
/// must have a single interior maximum.
FitResult fit_rise_fall(const RealVector& tau, const RealVector& c);

struct PhotoionizationConstants {
  double wavelength_m = 852e-9;
  double pulse_window_s = 800e-9;  ///< trap-off window per excitation pulse
  double rep_period_s = 0.2;       ///< excitation repetition period
  double tau0_baseline_s = 5.0;    ///< trap lifetime without excitation
};

/// Ionization-loss fit: per-shot ionization probability
/// P = eta (1 - exp(-sigma F lambda / hc)) with fluence F = I * pulse_window,
/// entering the trap loss rate as 1/tau = 1/tau0 + P / rep_period.
/// Parameters (eta, sigma_Mb) and optionally tau0; sigma is reported in
/// megabarn (1 Mb = 1e-22 m^2).
FitResult fit_photoionization(const RealVector& intensity_w_m2, const RealVector& lifetime_s,
                              const PhotoionizationConstants& constants,
                              bool float_tau0 = true);

}  // namespace cqed

#endif
