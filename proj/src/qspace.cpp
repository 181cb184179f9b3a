#include "cqed/qspace.hpp"

#include <cmath>
#include <ostream>

namespace cqed {

namespace {
const std::array<std::string, kAtomLevels> kLabels = {"g0", "g", "i", "e"};
}

const std::string& atom_level_label(AtomLevel level) {
  return kLabels[static_cast<int>(level)];
}

AtomLevel atom_level_from_label(const std::string& label) {
  for (int k = 0; k < kAtomLevels; ++k) {
    if (kLabels[k] == label) return static_cast<AtomLevel>(k);
  }
  throw validation_error("unknown atomic level label '" + label +
                         "' (expected one of g0, g, i, e)");
}

SpaceLayout::SpaceLayout(int nu, int nl) : n_max_u(nu), n_max_l(nl) {
  if (nu < 1 || nl < 1) {
    throw validation_error("Fock cutoffs must be >= 1 (got n_max_u=" +
                           std::to_string(nu) + ", n_max_l=" + std::to_string(nl) + ")");
  }
}

int SpaceLayout::index_of(AtomLevel atom, int n_u, int n_l) const {
  const int a = static_cast<int>(atom);
  if (n_u < 0 || n_u > n_max_u || n_l < 0 || n_l > n_max_l) {
    throw validation_error("Fock occupation out of range for layout");
  }
  return (a * dim_u() + n_u) * dim_l() + n_l;
}

std::array<int, 3> SpaceLayout::decode(int index) const {
  if (index < 0 || index >= total_dim()) {
    throw validation_error("basis index out of range");
  }
  const int n_l = index % dim_l();
  const int rest = index / dim_l();
  const int n_u = rest % dim_u();
  const int atom = rest / dim_u();
  return {atom, n_u, n_l};
}

Operator::Operator(const SpaceLayout& lay, Matrix mat) : layout(lay), m(std::move(mat)) {
  if (m.rows() != layout.total_dim() || m.cols() != layout.total_dim()) {
    throw validation_error("operator matrix does not match layout dimension");
  }
}

Operator Operator::dagger() const { return Operator(layout, m.adjoint()); }

bool Operator::is_hermitian(double tol) const {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void Operator::dump_text(std::ostream& os) const {
  const int n = layout.total_dim();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (c) os << ' ';
      os << m(r, c).real() << ',' << m(r, c).imag();
    }
    os << '\n';
  }
}

namespace {
void check_same_layout(const SpaceLayout& a, const SpaceLayout& b) {
  if (a != b) throw validation_error("operator layouts differ");
}
}  // namespace

Operator Operator::operator+(const Operator& rhs) const {
  check_same_layout(layout, rhs.layout);
  return Operator(layout, m + rhs.m);
}

Operator Operator::operator-(const Operator& rhs) const {
  check_same_layout(layout, rhs.layout);
  return Operator(layout, m - rhs.m);
}

Operator Operator::operator*(const Operator& rhs) const {
  check_same_layout(layout, rhs.layout);
  return Operator(layout, m * rhs.m);
}

Operator Operator::operator*(Complex scalar) const { return Operator(layout, m * scalar); }

Operator operator*(Complex scalar, const Operator& op) { return op * scalar; }

StateVector::StateVector(const SpaceLayout& lay, Vector amps)
    : layout(lay), amplitudes(std::move(amps)) {
  if (amplitudes.size() != layout.total_dim()) {
    throw validation_error("state vector length does not match layout dimension");
  }
}

DensityMatrix::DensityMatrix(const SpaceLayout& lay, Matrix mat)
    : layout(lay), m(std::move(mat)) {
  if (m.rows() != layout.total_dim() || m.cols() != layout.total_dim()) {
    throw validation_error("density matrix does not match layout dimension");
  }
}

double DensityMatrix::hermiticity_error() const {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix pure_state(const StateVector& psi) {
  return DensityMatrix(psi.layout, psi.amplitudes * psi.amplitudes.adjoint());
}

StateVector basis_state(const SpaceLayout& layout, AtomLevel atom, int n_u, int n_l) {
  Vector v = Vector::Zero(layout.total_dim());
  v(layout.index_of(atom, n_u, n_l)) = 1.0;
  return StateVector(layout, std::move(v));
}

Matrix annihilation(int n_max) {
  if (n_max < 1) {
    throw validation_error("annihilation requires n_max >= 1; a cutoff of 0 "
                           "leaves no photon dynamics");
  }
  Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Matrix single_mode_identity(int n_max) { return Matrix::Identity(n_max + 1, n_max + 1); }

Operator transition(const SpaceLayout& layout, const std::string& lower_label,
                    const std::string& upper_label) {
  return transition(layout, atom_level_from_label(lower_label),
                    atom_level_from_label(upper_label));
}

Operator transition(const SpaceLayout& layout, AtomLevel lower, AtomLevel upper) {
  if (lower == upper) {
    throw validation_error("transition requires two distinct atomic levels");
  }
  Matrix m = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (int nu = 0; nu <= layout.n_max_u; ++nu) {
    for (int nl = 0; nl <= layout.n_max_l; ++nl) {
      m(layout.index_of(lower, nu, nl), layout.index_of(upper, nu, nl)) = 1.0;
    }
  }
  return Operator(layout, std::move(m));
}

Operator atom_projector(const SpaceLayout& layout, AtomLevel level) {
  Matrix m = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (int nu = 0; nu <= layout.n_max_u; ++nu) {
    for (int nl = 0; nl <= layout.n_max_l; ++nl) {
      const int k = layout.index_of(level, nu, nl);
      m(k, k) = 1.0;
    }
  }
  return Operator(layout, std::move(m));
}

Operator embed(const Matrix& single_mode_op, CavitySlot slot, const SpaceLayout& layout) {
  const int d = (slot == CavitySlot::upper) ? layout.dim_u() : layout.dim_l();
  if (single_mode_op.rows() != d || single_mode_op.cols() != d) {
    throw validation_error("single-mode operator dimension does not match the "
                           "slot cutoff + 1");
  }
  const int n = layout.total_dim();
  Matrix m = Matrix::Zero(n, n);
  for (int a = 0; a < kAtomLevels; ++a) {
    for (int nu = 0; nu <= layout.n_max_u; ++nu) {
      for (int nl = 0; nl <= layout.n_max_l; ++nl) {
        const int row = (a * layout.dim_u() + nu) * layout.dim_l() + nl;
        if (slot == CavitySlot::upper) {
          for (int nu2 = 0; nu2 <= layout.n_max_u; ++nu2) {
            const Complex v = single_mode_op(nu, nu2);
            if (v != 0.0) m(row, (a * layout.dim_u() + nu2) * layout.dim_l() + nl) = v;
          }
        } else {
          for (int nl2 = 0; nl2 <= layout.n_max_l; ++nl2) {
            const Complex v = single_mode_op(nl, nl2);
            if (v != 0.0) m(row, (a * layout.dim_u() + nu) * layout.dim_l() + nl2) = v;
          }
        }
      }
    }
  }
  return Operator(layout, std::move(m));
}

Operator identity_operator(const SpaceLayout& layout) {
  return Operator(layout, Matrix::Identity(layout.total_dim(), layout.total_dim()));
}

Operator number_operator(const SpaceLayout& layout, CavitySlot slot) {
  const int n_max = (slot == CavitySlot::upper) ? layout.n_max_u : layout.n_max_l;
  const Matrix a = annihilation(n_max);
  return embed(a.adjoint() * a, slot, layout);
}

Complex expectation(const DensityMatrix& rho, const Operator& obs) {
  if (rho.layout != obs.layout) {
    throw validation_error("expectation: state and observable layouts differ");
  }
  return (rho.m * obs.m).trace();
}

}  // namespace cqed
