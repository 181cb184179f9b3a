#ifndef CQED_TYPES_HPP
#define CQED_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace cqed {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Unit convention: scenario inputs are linear frequencies in MHz (the
// "x 2pi MHz" notation); internally everything is angular frequency in
// rad/us. Times are ns at the interfaces and us inside the integrators.
inline double mhz_to_angular(double f_mhz) { return two_pi * f_mhz; }
inline double ns_to_us(double t_ns) { return 1e-3 * t_ns; }
inline double us_to_ns(double t_us) { return 1e3 * t_us; }

/// Bad inputs: unknown labels, dimension mismatches, schema violations.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failures: step-size underflow, singular solves, non-convergence.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cqed

#endif
