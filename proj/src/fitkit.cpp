#include "cqed/fitkit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace cqed {

double FitResult::value(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return values[k];
  }
  throw validation_error("fit parameter '" + name + "' not present");
}

double FitResult::sigma(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return sigmas[k];
  }
  throw validation_error("fit parameter '" + name + "' not present");
}

namespace {

/// fills residual r (n) and Jacobian j (n x m) at parameters p
using ModelFn = std::function<void(const RealVector& p, RealVector& r, Eigen::MatrixXd& j)>;

FitResult levenberg_marquardt(const ModelFn& model, RealVector p,
                              std::vector<std::string> names, int n_residuals,
                              int max_iterations) {
  const int m = static_cast<int>(p.size());
  RealVector r(n_residuals);
  Eigen::MatrixXd j(n_residuals, m);
  model(p, r, j);
  double cost = r.squaredNorm();
  double lambda = 1e-3;

  FitResult result;
  result.names = std::move(names);
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const RealVector g = j.transpose() * r;
    Eigen::MatrixXd damped = jtj;
    for (int k = 0; k < m; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-30);
    const RealVector step = damped.ldlt().solve(-g);

    RealVector p_try = p + step;
    RealVector r_try(n_residuals);
    Eigen::MatrixXd j_try(n_residuals, m);
    model(p_try, r_try, j_try);
    const double cost_try = r_try.squaredNorm();
    if (cost_try <= cost) {
      const double rel_step = step.cwiseAbs().maxCoeff() /
                              std::max(1e-30, p.cwiseAbs().maxCoeff());
      const bool done = rel_step < 1e-12 || (cost - cost_try) < 1e-16 * (1.0 + cost);
      p = p_try;
      r = r_try;
      j = j_try;
      cost = cost_try;
      lambda = std::max(lambda / 3.0, 1e-12);
      if (done) {
        result.converged = true;
        ++iter;
        break;
      }
    } else {
      lambda *= 5.0;
      if (lambda > 1e12) break;
    }
  }
  if (iter >= max_iterations) {
    throw numerical_error("fit did not converge within " + std::to_string(max_iterations) +
                          " iterations");
  }

  result.values.assign(p.data(), p.data() + m);
  result.iterations = iter;
  result.residual_rms = std::sqrt(cost / n_residuals);
  // 1-sigma uncertainties of the linearized problem
  const int dof = std::max(1, n_residuals - m);
  const double s2 = cost / dof;
  const Eigen::MatrixXd cov = (j.transpose() * j).ldlt().solve(
      Eigen::MatrixXd::Identity(m, m));
  result.sigmas.resize(m);
  for (int k = 0; k < m; ++k) {
    result.sigmas[k] = std::sqrt(std::max(0.0, s2 * cov(k, k)));
  }
  if (!result.converged) {
    throw numerical_error("fit stalled without reaching the convergence test");
  }
  return result;
}

}  // namespace

FitResult fit_exponential(const RealVector& t, const RealVector& y, double t_lo, double t_hi) {
  if (t.size() != y.size()) throw validation_error("t and y sizes differ");
  std::vector<double> ts, ys;
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    if (t(k) < t_lo || t(k) > t_hi) continue;
    if (y(k) <= 0.0) {
      throw validation_error("fit_exponential requires positive samples in the window");
    }
    ts.push_back(t(k));
    ys.push_back(y(k));
  }
  const int n = static_cast<int>(ts.size());
  if (n < 8) throw validation_error("fit_exponential needs at least 8 points in the window");

  // log-linear seed
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    sx += ts[k];
    sy += std::log(ys[k]);
    sxx += ts[k] * ts[k];
    sxy += ts[k] * std::log(ys[k]);
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  RealVector p(2);
  p(0) = std::exp(intercept);            // A
  p(1) = slope < 0.0 ? -1.0 / slope : (ts.back() - ts.front());  // tau

  auto model = [&](const RealVector& q, RealVector& r, Eigen::MatrixXd& j) {
    for (int k = 0; k < n; ++k) {
      const double e = std::exp(-ts[k] / q(1));
      r(k) = q(0) * e - ys[k];
      j(k, 0) = e;
      j(k, 1) = q(0) * e * ts[k] / (q(1) * q(1));
    }
  };
  return levenberg_marquardt(model, p, {"amplitude", "tau"}, n, 200);
}

FitResult fit_rise_fall(const RealVector& tau, const RealVector& c) {
  if (tau.size() != c.size() || tau.size() < 6) {
    throw validation_error("fit_rise_fall needs matching series with >= 6 points");
  }
  Eigen::Index peak = 0;
  c.maxCoeff(&peak);
  if (peak == 0 || peak == c.size() - 1) {
    throw validation_error("fit_rise_fall requires a single interior maximum");
  }
  const double amp = c(peak);
  if (amp <= 0.0 || (c.maxCoeff() - c.minCoeff()) < 1e-30) {
    throw validation_error("fit_rise_fall: degenerate flat data");
  }

  // seeds from the half-maximum crossings
  auto half_crossing = [&](int dir) {
    for (Eigen::Index k = peak; k >= 0 && k < c.size(); k += dir) {
      if (c(k) < 0.5 * amp) return std::abs(tau(k) - tau(peak));
    }
    return std::abs(tau(c.size() - 1) - tau(0)) / 4.0;
  };
  RealVector p(4);
  p(0) = amp;
  p(1) = tau(peak);
  p(2) = std::max(half_crossing(-1) / M_LN2, 1e-3);
  p(3) = std::max(half_crossing(+1) / M_LN2, 1e-3);

  const int n = static_cast<int>(tau.size());
  auto model = [&](const RealVector& q, RealVector& r, Eigen::MatrixXd& j) {
    for (int k = 0; k < n; ++k) {
      const double d = tau(k) - q(1);
      if (d < 0.0) {
        const double e = std::exp(d / q(2));
        r(k) = q(0) * e - c(k);
        j(k, 0) = e;
        j(k, 1) = -q(0) * e / q(2);
        j(k, 2) = -q(0) * e * d / (q(2) * q(2));
        j(k, 3) = 0.0;
      } else {
        const double e = std::exp(-d / q(3));
        r(k) = q(0) * e - c(k);
        j(k, 0) = e;
        j(k, 1) = q(0) * e / q(3);
        j(k, 2) = 0.0;
        j(k, 3) = q(0) * e * d / (q(3) * q(3));
      }
    }
  };
  return levenberg_marquardt(model, p, {"amplitude", "center", "tau_rise", "tau_fall"}, n, 200);
}

FitResult fit_photoionization(const RealVector& intensity_w_m2, const RealVector& lifetime_s,
                              const PhotoionizationConstants& constants, bool float_tau0) {
  const int n = static_cast<int>(intensity_w_m2.size());
  if (lifetime_s.size() != n || n < 5) {
    throw validation_error("fit_photoionization needs >= 5 (intensity, lifetime) pairs");
  }
  double max_i = 0.0;
  for (int k = 0; k < n; ++k) {
    if (intensity_w_m2(k) < 0.0) throw validation_error("intensities must be >= 0");
    max_i = std::max(max_i, intensity_w_m2(k));
  }
  if (max_i <= 0.0) throw validation_error("fluence column is all zero");

  constexpr double hc = 1.98644586e-25;  // J m
  // exponent per Mb per (W/m^2): sigma_Mb * beta * I
  const double beta = 1e-22 * constants.pulse_window_s * constants.wavelength_m / hc;

  const double tau_min = lifetime_s.minCoeff();
  const double tau0_seed = float_tau0 ? std::max(lifetime_s.maxCoeff(), tau_min * 2.0)
                                      : constants.tau0_baseline_s;
  double eta_seed = (1.0 / tau_min - 1.0 / tau0_seed) * constants.rep_period_s;
  eta_seed = std::clamp(eta_seed, 0.05, 1.0);

  const int m = float_tau0 ? 3 : 2;
  RealVector p(m);
  p(0) = eta_seed;
  p(1) = 10.0;  // Mb
  if (float_tau0) p(2) = tau0_seed;

  auto model = [&](const RealVector& q, RealVector& r, Eigen::MatrixXd& j) {
    const double tau0 = float_tau0 ? q(2) : constants.tau0_baseline_s;
    for (int k = 0; k < n; ++k) {
      const double x = q(1) * beta * intensity_w_m2(k);
      const double ex = std::exp(-x);
      const double p_pi = q(0) * (1.0 - ex);
      const double rate = 1.0 / tau0 + p_pi / constants.rep_period_s;
      const double tau_model = 1.0 / rate;
      r(k) = tau_model - lifetime_s(k);
      const double dtau_dppi = -tau_model * tau_model / constants.rep_period_s;
      j(k, 0) = dtau_dppi * (1.0 - ex);
      j(k, 1) = dtau_dppi * q(0) * ex * beta * intensity_w_m2(k);
      if (float_tau0) j(k, 2) = tau_model * tau_model / (tau0 * tau0);
    }
  };
  std::vector<std::string> names = {"eta", "sigma_Mb"};
  if (float_tau0) names.push_back("tau0_s");
  return levenberg_marquardt(model, p, std::move(names), n, 200);
}

}  // namespace cqed
