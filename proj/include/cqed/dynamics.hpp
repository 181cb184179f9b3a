#ifndef CQED_DYNAMICS_HPP
#define CQED_DYNAMICS_HPP

#include <map>
#include <string>

#include "cqed/generator.hpp"
#include "cqed/model.hpp"
#include "cqed/ode.hpp"
#include "cqed/qspace.hpp"

namespace cqed {

/// Sampled expectation-value series of one master-equation run. Populations
/// P_g0..P_e, photon numbers n_u/n_l, and the output fluxes 2*kappa*n in
/// photons/ns share one uniform ns time grid.
struct Trajectory {
  RealVector times_ns;
  std::map<std::string, RealVector> series;
  double trace_error = 0.0;     ///< max |trace(rho) - 1| over the run
  DensityMatrix final_state;
  double kappa_u_mhz = 0.0;
  double kappa_l_mhz = 0.0;
};

/// Integrate d rho/dt = L(t)[rho] from t=0 to t_end_ns, sampling every
/// sample_dt_ns. Adaptive stepping at rtol 1e-8 / atol 1e-10 by default;
/// the trace is monitored, never renormalized.
Trajectory integrate_master_equation(const SystemParams& params, const DensityMatrix& rho0,
                                     double t_end_ns, double sample_dt_ns,
                                     const OdeOptions& opts = {});

struct CalibrationResult {
  double peak_omega_mhz = 0.0;  ///< calibrated peak Rabi frequency
  double achieved_pe = 0.0;     ///< <sigma_ee> just after the pulse
  int iterations = 0;
};

/// Scan the pulsed-drive peak amplitude until the post-pulse excited-state
/// population is maximized (bisection on the first interior maximum).
/// Throws numerical_error after max_iterations without convergence.
CalibrationResult calibrate_pi_pulse(const SystemParams& params, int max_iterations = 60);

/// Output photon flux 2*(2pi*kappa)*<a^+a> in photons/ns, from the stored
/// photon-number series.
RealVector photon_flux(const Trajectory& traj, CavitySlot cavity);

struct EmissionResult {
  double p_u = 0.0;        ///< photons emitted through the upper cavity channel
  double p_l = 0.0;
  bool truncated = false;  ///< residual intracavity excitation above 1e-4
};

/// Time-integrated fluxes. Both mirrors and intracavity losses count as the
/// cavity channel at this stage; fiber factors are applied separately.
EmissionResult emission_probabilities(const Trajectory& traj);

/// eta = P * eta_oc * eta_mm for one cavity channel.
double fiber_efficiency(double p, CavitySlot channel, const CollectionParams& collection);

}  // namespace cqed

#endif
