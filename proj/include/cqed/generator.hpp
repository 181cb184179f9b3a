#ifndef CQED_GENERATOR_HPP
#define CQED_GENERATOR_HPP

#include <vector>

#include "cqed/model.hpp"
#include "cqed/qspace.hpp"
#include "cqed/types.hpp"

namespace cqed {

/// Right-hand side of the Lindblad master equation for one parameter set,
///   d rho/dt = -i[H(t), rho] + sum_k ( c_k rho c_k^+ - 1/2 {c_k^+ c_k, rho} )
/// with H(t) = H_static (+ drive shift) + 2pi*Omega_D(t) * X_drive.
/// All rates angular (rad/us), time in us. The same generator propagates
/// regression blocks, which are not Hermitian, so nothing here assumes
/// Hermiticity of the evolved matrix.
class MasterEquation {
 public:
  explicit MasterEquation(const SystemParams& params);

  const SpaceLayout& layout() const { return layout_; }
  const SystemParams& params() const { return params_; }
  bool time_dependent() const { return time_dependent_; }
  const std::vector<CollapseChannel>& channels() const { return channels_; }

  /// out = L(t)[m]. t in us.
  void apply(double t_us, const Matrix& m, Matrix& out) const;

  /// Hamiltonian at time t (us), angular units, including drive terms.
  Matrix hamiltonian(double t_us) const;

  /// Functor adapter for the ODE integrator.
  void operator()(double t_us, const Matrix& m, Matrix& out) const { apply(t_us, m, out); }

 private:
  SystemParams params_;
  SpaceLayout layout_;
  std::vector<CollapseChannel> channels_;
  Matrix h_base_;           // static H (+ drive shift, + cw drive coupling)
  Matrix a_eff_;            // h_base - (i/2) sum c^+ c
  SparseMatrix x_drive_;    // pulsed coupling operator (angular prefactor applied per call)
  std::vector<SparseMatrix> c_sparse_;
  bool time_dependent_ = false;
  mutable Matrix scratch_;

  double pulse_envelope_angular(double t_us) const;
};

/// Dense vectorized superoperator for a time-independent generator, using
/// column-stacking vec(A X B) = (B^T (x) A) vec(X):
///   L = -i (I (x) H - H^T (x) I)
///       + sum_k [ conj(c_k) (x) c_k - 1/2 I (x) (c_k^+ c_k)
///                 - 1/2 (c_k^+ c_k)^T (x) I ].
Matrix liouvillian_matrix(const Matrix& h, const std::vector<Matrix>& c_ops);

Matrix kronecker_product(const Matrix& a, const Matrix& b);

}  // namespace cqed

#endif
