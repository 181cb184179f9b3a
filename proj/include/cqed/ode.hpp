#ifndef CQED_ODE_HPP
#define CQED_ODE_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include "cqed/types.hpp"

namespace cqed {

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0 -> chosen from the first derivative
  double max_step = 0.0;      // 0 -> span
};

/// Embedded Dormand-Prince 5(4) integrator on complex matrices, adaptive
/// step, FSAL. The state is whatever matrix the right-hand side evolves
/// (density matrix, regression block, ...). rhs(t, y, dydt) fills dydt.
template <class Rhs>
class DormandPrince {
 public:
  explicit DormandPrince(OdeOptions opt = {}) : opt_(opt) {}

  /// Integrates y from t0 to t1 in place. Throws numerical_error if the
  /// step size underflows (reports the time of failure).
  void integrate(Rhs& rhs, double t0, double t1, Matrix& y) {
    if (t1 <= t0) return;
    const double span = t1 - t0;
    const double max_step = opt_.max_step > 0.0 ? opt_.max_step : span;
    alloc(y.rows(), y.cols());

    double t = t0;
    rhs(t, y, k_[0]);
    double h = opt_.initial_step > 0.0 ? opt_.initial_step : initial_step_guess(y, span);
    h = std::min(h, max_step);

    while (t < t1) {
      const double tiny = 1e-14 * std::max(1.0, std::abs(t1));
      if (t1 - t <= tiny) break;  // remaining span is roundoff
      h = std::min(h, t1 - t);
      if (h < tiny) {
        throw numerical_error("ODE step size underflow at t = " + std::to_string(t));
      }

      // stages 2..7; stage 7 doubles as the FSAL derivative of the result
      tmp_ = y + h * (a21 * k_[0]);
      rhs(t + c2 * h, tmp_, k_[1]);
      tmp_ = y + h * (a31 * k_[0] + a32 * k_[1]);
      rhs(t + c3 * h, tmp_, k_[2]);
      tmp_ = y + h * (a41 * k_[0] + a42 * k_[1] + a43 * k_[2]);
      rhs(t + c4 * h, tmp_, k_[3]);
      tmp_ = y + h * (a51 * k_[0] + a52 * k_[1] + a53 * k_[2] + a54 * k_[3]);
      rhs(t + c5 * h, tmp_, k_[4]);
      tmp_ = y + h * (a61 * k_[0] + a62 * k_[1] + a63 * k_[2] + a64 * k_[3] + a65 * k_[4]);
      rhs(t + h, tmp_, k_[5]);
      ynew_ = y + h * (a71 * k_[0] + a73 * k_[2] + a74 * k_[3] + a75 * k_[4] + a76 * k_[5]);
      rhs(t + h, ynew_, k_[6]);

      // 5th-minus-4th order error estimate
      err_ = h * (e1 * k_[0] + e3 * k_[2] + e4 * k_[3] + e5 * k_[4] + e6 * k_[5] + e7 * k_[6]);
      double norm = 0.0;
      for (Eigen::Index j = 0; j < y.cols(); ++j) {
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
          const double scale =
              opt_.atol + opt_.rtol * std::max(std::abs(y(i, j)), std::abs(ynew_(i, j)));
          norm = std::max(norm, std::abs(err_(i, j)) / scale);
        }
      }

      if (norm <= 1.0) {
        t += h;
        y.swap(ynew_);
        k_[0].swap(k_[6]);
        const double factor = norm > 0.0 ? 0.9 * std::pow(norm, -0.2) : 5.0;
        h = std::min(h * std::clamp(factor, 0.2, 5.0), max_step);
      } else {
        h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
      }
    }
  }

 private:
  void alloc(Eigen::Index r, Eigen::Index c) {
    for (auto& k : k_) k.resize(r, c);
    tmp_.resize(r, c);
    ynew_.resize(r, c);
    err_.resize(r, c);
  }

  double initial_step_guess(const Matrix& y, double span) const {
    const double d0 = std::max(y.cwiseAbs().maxCoeff(), 1e-6);
    const double d1 = k_[0].cwiseAbs().maxCoeff();
    double h = d1 > 0.0 ? 0.01 * d0 / d1 : span / 100.0;
    return std::min(h, span / 10.0);
  }

  // Dormand-Prince tableau
  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  OdeOptions opt_;
  Matrix k_[7];
  Matrix tmp_, ynew_, err_;
};

}  // namespace cqed

#endif
