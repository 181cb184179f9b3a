#include "cqed/generator.hpp"

namespace cqed {

namespace {

SparseMatrix to_sparse(const Matrix& m) {
  SparseMatrix s = m.sparseView(1.0, 1e-300);
  s.makeCompressed();
  return s;
}

}  // namespace

MasterEquation::MasterEquation(const SystemParams& params)
    : params_(params), layout_(params.layout()) {
  params_.validate();
  channels_ = collapse_channels(params_);

  h_base_ = build_static_hamiltonian(params_).m;
  if (params_.drive.mode == DriveMode::cw_g_e) {
    h_base_ += mhz_to_angular(params_.drive.omega_d_mhz) * drive_coupling_operator(params_).m;
    h_base_ += drive_shift_operator(params_).m;
  } else if (params_.drive.mode == DriveMode::pulsed_g0_e) {
    h_base_ += drive_shift_operator(params_).m;
    x_drive_ = to_sparse(drive_coupling_operator(params_).m);
    time_dependent_ = true;
  }

  Matrix damping = Matrix::Zero(layout_.total_dim(), layout_.total_dim());
  for (const auto& ch : channels_) {
    c_sparse_.push_back(to_sparse(ch.op.m));
    damping += ch.op.m.adjoint() * ch.op.m;
  }
  a_eff_ = h_base_ - Complex(0.0, 0.5) * damping;
  scratch_.resize(layout_.total_dim(), layout_.total_dim());
}

double MasterEquation::pulse_envelope_angular(double t_us) const {
  return mhz_to_angular(params_.drive.omega_d_mhz) *
         params_.drive.pulse->envelope(us_to_ns(t_us));
}

Matrix MasterEquation::hamiltonian(double t_us) const {
  Matrix h = h_base_;
  if (time_dependent_) h += pulse_envelope_angular(t_us) * Matrix(x_drive_);
  return h;
}

void MasterEquation::apply(double t_us, const Matrix& m, Matrix& out) const {
  // -i (A m - m A^+) with A = H - (i/2) sum c^+ c, plus the jump terms.
  out.noalias() = a_eff_ * m;
  out.noalias() -= m * a_eff_.adjoint();
  if (time_dependent_) {
    const double f = pulse_envelope_angular(t_us);
    if (f != 0.0) {
      out.noalias() += f * (x_drive_ * m);
      out.noalias() -= f * (m * x_drive_);
    }
  }
  out *= Complex(0.0, -1.0);
  for (const auto& c : c_sparse_) {
    scratch_.noalias() = c * m;
    out.noalias() += scratch_ * c.adjoint();
  }
}

Matrix kronecker_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix liouvillian_matrix(const Matrix& h, const std::vector<Matrix>& c_ops) {
  const Eigen::Index n = h.rows();
  const Matrix eye = Matrix::Identity(n, n);
  Matrix l = Complex(0.0, -1.0) *
             (kronecker_product(eye, h) - kronecker_product(h.transpose(), eye));
  for (const auto& c : c_ops) {
    const Matrix cdc = c.adjoint() * c;
    l += kronecker_product(c.conjugate(), c);
    l -= 0.5 * kronecker_product(eye, cdc);
    l -= 0.5 * kronecker_product(cdc.transpose(), eye);
  }
  return l;
}

}  // namespace cqed
