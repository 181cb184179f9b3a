#ifndef CQED_MODEL_HPP
#define CQED_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "cqed/qspace.hpp"
#include "cqed/types.hpp"

namespace cqed {

/// Gaussian drive envelope. center/fwhm are in ns; the peak Rabi frequency
/// lives in DriveSpec::omega_d_mhz.
struct PulseShape {
  double center_ns = 0.0;
  double fwhm_ns = 0.0;

  /// Envelope value in [0, 1] at time t (ns).
  double envelope(double t_ns) const;
};

enum class DriveMode { none, pulsed_g0_e, cw_g_e };

DriveMode drive_mode_from_label(const std::string& label);
const std::string& drive_mode_label(DriveMode mode);

struct DriveSpec {
  DriveMode mode = DriveMode::none;
  double omega_d_mhz = 0.0;   ///< peak Rabi frequency, MHz linear
  double delta_d_mhz = 0.0;   ///< drive detuning, MHz linear
  std::optional<PulseShape> pulse;
};

struct CollectionParams {
  double eta_oc_u = 1.0;
  double eta_oc_l = 1.0;
  double eta_mm_u = 1.0;
  double eta_mm_l = 1.0;
};

/// All physical rates and detunings for one scenario, as linear frequencies
/// in MHz. Hamiltonian and dissipator builders convert to angular rad/us.
struct SystemParams {
  double g_u_mhz = 0.0;
  double g_l_mhz = 0.0;
  double kappa_u_mhz = 0.0;
  double kappa_l_mhz = 0.0;
  double gamma_u_mhz = 0.0;
  double gamma_l_mhz = 0.0;
  double delta_u_mhz = 0.0;
  double delta_l_mhz = 0.0;
  DriveSpec drive;
  int n_max_u = 2;
  int n_max_l = 2;
  CollectionParams collection;

  SpaceLayout layout() const { return SpaceLayout(n_max_u, n_max_l); }

  /// Throws validation_error on negative rates, bad cutoffs, or a drive
  /// spec that mixes pulsed/cw with the wrong envelope fields.
  void validate() const;
};

/// One Lindblad jump operator with its rate already folded in:
/// c = sqrt(2 r_angular) X, so the standard dissipator
/// c rho c^+ - (1/2){c^+ c, rho} reproduces the master equation term
/// r (2 X rho X^+ - X^+ X rho - rho X^+ X).
struct CollapseChannel {
  enum class Label { cavity_u, cavity_l, dipole_u, dipole_l };
  Label label;
  Operator op;
};

const std::string& collapse_label_name(CollapseChannel::Label label);

/// Static interaction Hamiltonian
///   g_l a_l^+ sigma_gi + g_u a_u^+ sigma_ie + H.c.
///   + Delta_l a_l^+ a_l + Delta_u a_u^+ a_u
/// in angular units (rad/us); matrix elements are 2*pi times the MHz inputs.
Operator build_static_hamiltonian(const SystemParams& params);

/// Drive coupling operator without the envelope or Rabi prefactor:
/// sigma_g0e + h.c. (pulsed) or sigma_ge + h.c. (cw). Multiplied by
/// 2*pi*Omega_D(t) inside the time-dependent Hamiltonian.
Operator drive_coupling_operator(const SystemParams& params);

/// The time-independent rotating-frame shift -Delta_D (sigma_ee + a_u^+ a_u),
/// angular units.
Operator drive_shift_operator(const SystemParams& params);

/// Full drive term at time t (ns), angular units. Throws if mode == none.
Operator build_drive_term(const SystemParams& params, double t_ns);

/// Drive envelope Omega_D(t) in MHz (peak value omega_d for cw mode).
double drive_envelope_mhz(const SystemParams& params, double t_ns);

/// The four dissipation channels sqrt(2*2pi*kappa_u) a_u,
/// sqrt(2*2pi*kappa_l) a_l, sqrt(2*2pi*gamma_u) sigma_ie,
/// sqrt(2*2pi*gamma_l) sigma_gi. Channels with zero rate are omitted.
std::vector<CollapseChannel> collapse_channels(const SystemParams& params);

/// Zero-energy eigenstate of the coupled chain,
/// (-g_l |e,0,0> + g_u |g,1,1>)/sqrt(g_l^2+g_u^2). No amplitude on any
/// basis state containing the lossy intermediate level.
StateVector dark_state(const SystemParams& params);

struct ChainEigenenergies {
  double e0_mhz = 0.0;
  double e1_mhz = 0.0;
  double e2_mhz = 0.0;
};

/// Closed-form eigenenergies of the single-excitation chain for the
/// opposite-detuning configuration Delta_u = +delta, Delta_l = -delta:
/// E0 = 0, E1,2 = delta/2 +- sqrt(g_u^2 + g_l^2 + (delta/2)^2). MHz in,
/// MHz out.
ChainEigenenergies chain_eigenenergies(const SystemParams& params, double delta_mhz);

/// C = g^2 / (2 kappa gamma); returns 0 for g = 0, throws on a zero
/// denominator.
double cooperativity(double g_mhz, double kappa_mhz, double gamma_mhz);

/// tau_free / (2C + 1).
double purcell_lifetime(double tau_free_ns, double cooperativity);

}  // namespace cqed

#endif
