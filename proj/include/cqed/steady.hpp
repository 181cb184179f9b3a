#ifndef CQED_STEADY_HPP
#define CQED_STEADY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqed/dynamics.hpp"
#include "cqed/model.hpp"
#include "cqed/qspace.hpp"

namespace cqed {

struct SteadyStateResult {
  DensityMatrix rho;
  double residual_max = 0.0;  ///< max |L[rho]| over the full space, rad/us units
};

/// Solve L rho = 0 with trace(rho) = 1 for a time-independent (cw) generator.
/// The solve runs on the subspace reachable from `reference` (default
/// |g,0,0>): basis states connected through Hamiltonian or jump-operator
/// matrix elements. Population outside that subspace cannot relax into it,
/// so a unique steady state only exists relative to a reachable set; a
/// residual degeneracy inside it raises numerical_error naming the
/// disconnected states.
SteadyStateResult steady_state(const SystemParams& params,
                               const StateVector* reference = nullptr);

struct SweepAxis {
  std::string name;
  std::string unit;
  RealVector values;
};

struct SweepPoint {
  int i0 = 0;  ///< index on axis 0
  int i1 = 0;  ///< index on axis 1 (0 for 1D sweeps)
  std::map<std::string, double> obs;
  double residual = 0.0;
  std::string error;  ///< empty on success
};

struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<std::string> observable_names;  ///< column order for CSV output
  std::vector<SweepPoint> points;
};

/// Steady-state observables n_u, n_l, P_i, P_e against the drive detuning.
SweepResult sweep_drive_detuning(const SystemParams& params, const RealVector& delta_d_mhz,
                                 int threads = 1);

/// 2D steady-state map over (kappa_u, Delta_D). Emits raw n_u/n_l/P_i/P_e
/// plus n_l_norm and P_i_norm, each normalized to max 1 within its kappa_u
/// row.
SweepResult kappa_detuning_map(const SystemParams& params, const RealVector& kappa_u_mhz,
                               const RealVector& delta_d_mhz, int threads = 1);

/// Pulsed-scenario in-fiber efficiencies with Delta_u = +delta,
/// Delta_l = -delta (two-photon resonance preserved).
SweepResult sweep_opposite_cavity_detunings(const SystemParams& params,
                                            const RealVector& delta_mhz, double t_end_ns,
                                            double sample_dt_ns, int threads = 1);

/// Pulsed-scenario in-fiber efficiencies with Delta_D = Delta_u = delta.
SweepResult sweep_common_drive_cavity_detuning(const SystemParams& params,
                                               const RealVector& delta_mhz, double t_end_ns,
                                               double sample_dt_ns, int threads = 1);

}  // namespace cqed

#endif
