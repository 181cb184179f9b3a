#ifndef CQED_QSPACE_HPP
#define CQED_QSPACE_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "cqed/types.hpp"

namespace cqed {

/// The four atomic levels of the driven ladder system, in fixed basis order.
/// g0 is the auxiliary ground state used for initialization and excitation;
/// the emission cascade runs e -> i -> g.
enum class AtomLevel : int { g0 = 0, g = 1, i = 2, e = 3 };

inline constexpr int kAtomLevels = 4;

const std::string& atom_level_label(AtomLevel level);
AtomLevel atom_level_from_label(const std::string& label);

/// Composite Hilbert space: atom (4 levels) x upper cavity Fock space
/// x lower cavity Fock space. Basis order is atom-major, then the upper
/// mode, then the lower mode, so
///   index = (atom * (n_max_u+1) + n_u) * (n_max_l+1) + n_l.
struct SpaceLayout {
  int n_max_u = 2;
  int n_max_l = 2;

  SpaceLayout() = default;
  SpaceLayout(int nu, int nl);

  int dim_u() const { return n_max_u + 1; }
  int dim_l() const { return n_max_l + 1; }
  int total_dim() const { return kAtomLevels * dim_u() * dim_l(); }

  int index_of(AtomLevel atom, int n_u, int n_l) const;
  /// Inverse of index_of: basis index -> (atom, n_u, n_l).
  std::array<int, 3> decode(int index) const;

  bool operator==(const SpaceLayout& other) const {
    return n_max_u == other.n_max_u && n_max_l == other.n_max_l;
  }
  bool operator!=(const SpaceLayout& other) const { return !(*this == other); }
};

enum class CavitySlot { upper, lower };

/// Dense complex operator on the composite space. Immutable by convention
/// after construction; cheap to copy at these dimensions (total_dim <= 48
/// for all shipped scenarios; revisit the dense representation if cutoffs
/// beyond n_max ~ 6 are ever needed).
struct Operator {
  SpaceLayout layout;
  Matrix m;

  Operator() = default;
  Operator(const SpaceLayout& lay, Matrix mat);

  Operator dagger() const;
  bool is_hermitian(double tol = 1e-12) const;

  /// Plain-text dump, row-major, one "re,im" pair per element. Debugging
  /// aid only; the format carries no stability guarantee.
  void dump_text(std::ostream& os) const;

  Operator operator+(const Operator& rhs) const;
  Operator operator-(const Operator& rhs) const;
  Operator operator*(const Operator& rhs) const;
  Operator operator*(Complex scalar) const;
};

Operator operator*(Complex scalar, const Operator& op);

struct StateVector {
  SpaceLayout layout;
  Vector amplitudes;

  StateVector() = default;
  StateVector(const SpaceLayout& lay, Vector amps);

  double norm() const { return amplitudes.norm(); }
};

struct DensityMatrix {
  SpaceLayout layout;
  Matrix m;

  DensityMatrix() = default;
  DensityMatrix(const SpaceLayout& lay, Matrix mat);

  Complex trace() const { return m.trace(); }
  double hermiticity_error() const;
};

/// Pure-state density matrix |psi><psi|.
DensityMatrix pure_state(const StateVector& psi);

/// Basis state |atom, n_u, n_l> on the given layout.
StateVector basis_state(const SpaceLayout& layout, AtomLevel atom, int n_u, int n_l);

/// Single-mode ladder operator on a truncated Fock space:
/// <n-1|a|n> = sqrt(n) for 1 <= n <= n_max. Rejects n_max = 0, which
/// would leave no photon dynamics at all.
Matrix annihilation(int n_max);

Matrix single_mode_identity(int n_max);

/// Atomic transition operator |lower><upper| tensored with identity on both
/// cavity modes; transition(layout, "g", "i") is sigma_gi of the lower line.
Operator transition(const SpaceLayout& layout, const std::string& lower_label,
                    const std::string& upper_label);
Operator transition(const SpaceLayout& layout, AtomLevel lower, AtomLevel upper);

/// Projector |level><level| on the atomic factor, identity on the modes.
Operator atom_projector(const SpaceLayout& layout, AtomLevel level);

/// Lift a single-mode operator to the composite space, acting as identity
/// on the atom and the other mode.
Operator embed(const Matrix& single_mode_op, CavitySlot slot, const SpaceLayout& layout);

Operator identity_operator(const SpaceLayout& layout);

/// Photon number operator of one cavity on the composite space.
Operator number_operator(const SpaceLayout& layout, CavitySlot slot);

/// trace(rho * obs). For Hermitian observables the imaginary part is a
/// diagnostic (< 1e-10 for sane states); callers read the real part.
Complex expectation(const DensityMatrix& rho, const Operator& obs);

}  // namespace cqed

#endif
