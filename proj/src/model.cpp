#include "cqed/model.hpp"

#include <cmath>

namespace cqed {

double PulseShape::envelope(double t_ns) const {
  const double x = (t_ns - center_ns) / fwhm_ns;
  return std::exp(-4.0 * M_LN2 * x * x);
}

namespace {
const std::string kModeLabels[] = {"none", "pulsed_g0_e", "cw_g_e"};
}

DriveMode drive_mode_from_label(const std::string& label) {
  if (label == "none") return DriveMode::none;
  if (label == "pulsed_g0_e") return DriveMode::pulsed_g0_e;
  if (label == "cw_g_e") return DriveMode::cw_g_e;
  throw validation_error("unknown drive mode '" + label + "'");
}

const std::string& drive_mode_label(DriveMode mode) {
  return kModeLabels[static_cast<int>(mode)];
}

void SystemParams::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw validation_error(std::string(name) + " must be a finite nonnegative rate");
    }
  };
  nonneg(g_u_mhz, "g_u");
  nonneg(g_l_mhz, "g_l");
  nonneg(kappa_u_mhz, "kappa_u");
  nonneg(kappa_l_mhz, "kappa_l");
  nonneg(gamma_u_mhz, "gamma_u");
  nonneg(gamma_l_mhz, "gamma_l");
  if (!std::isfinite(delta_u_mhz) || !std::isfinite(delta_l_mhz)) {
    throw validation_error("cavity detunings must be finite");
  }
  if (n_max_u < 1 || n_max_l < 1) {
    throw validation_error("Fock cutoffs must be >= 1");
  }
  if (drive.mode == DriveMode::pulsed_g0_e) {
    if (!drive.pulse) throw validation_error("pulsed drive requires a pulse shape");
    if (drive.pulse->fwhm_ns <= 0.0) throw validation_error("pulse fwhm must be > 0");
  }
  if (drive.mode == DriveMode::cw_g_e && drive.pulse) {
    throw validation_error("cw drive must not carry a pulse shape");
  }
  auto unit = [](double v, const char* name) {
    if (v < 0.0 || v > 1.0) {
      throw validation_error(std::string(name) + " must lie in [0, 1]");
    }
  };
  unit(collection.eta_oc_u, "eta_oc_u");
  unit(collection.eta_oc_l, "eta_oc_l");
  unit(collection.eta_mm_u, "eta_mm_u");
  unit(collection.eta_mm_l, "eta_mm_l");
}

const std::string& collapse_label_name(CollapseChannel::Label label) {
  static const std::string names[] = {"cavity_u", "cavity_l", "dipole_u", "dipole_l"};
  return names[static_cast<int>(label)];
}

Operator build_static_hamiltonian(const SystemParams& params) {
  const SpaceLayout lay = params.layout();
  const Operator a_u = embed(annihilation(lay.n_max_u), CavitySlot::upper, lay);
  const Operator a_l = embed(annihilation(lay.n_max_l), CavitySlot::lower, lay);
  const Operator sigma_gi = transition(lay, AtomLevel::g, AtomLevel::i);
  const Operator sigma_ie = transition(lay, AtomLevel::i, AtomLevel::e);

  Matrix h = mhz_to_angular(params.g_l_mhz) * (a_l.dagger().m * sigma_gi.m) +
             mhz_to_angular(params.g_u_mhz) * (a_u.dagger().m * sigma_ie.m);
  h += h.adjoint().eval();
  h += mhz_to_angular(params.delta_l_mhz) * (a_l.dagger().m * a_l.m);
  h += mhz_to_angular(params.delta_u_mhz) * (a_u.dagger().m * a_u.m);
  return Operator(lay, std::move(h));
}

Operator drive_coupling_operator(const SystemParams& params) {
  const SpaceLayout lay = params.layout();
  switch (params.drive.mode) {
    case DriveMode::pulsed_g0_e: {
      const Operator s = transition(lay, AtomLevel::g0, AtomLevel::e);
      return Operator(lay, s.m + s.m.adjoint().eval());
    }
    case DriveMode::cw_g_e: {
      const Operator s = transition(lay, AtomLevel::g, AtomLevel::e);
      return Operator(lay, s.m + s.m.adjoint().eval());
    }
    case DriveMode::none:
      break;
  }
  throw validation_error("drive term requested but drive mode is 'none'");
}

Operator drive_shift_operator(const SystemParams& params) {
  if (params.drive.mode == DriveMode::none) {
    throw validation_error("drive term requested but drive mode is 'none'");
  }
  const SpaceLayout lay = params.layout();
  const Operator shift =
      atom_projector(lay, AtomLevel::e) + number_operator(lay, CavitySlot::upper);
  return shift * Complex(-mhz_to_angular(params.drive.delta_d_mhz), 0.0);
}

double drive_envelope_mhz(const SystemParams& params, double t_ns) {
  switch (params.drive.mode) {
    case DriveMode::pulsed_g0_e:
      return params.drive.omega_d_mhz * params.drive.pulse->envelope(t_ns);
    case DriveMode::cw_g_e:
      return params.drive.omega_d_mhz;
    case DriveMode::none:
      break;
  }
  throw validation_error("drive term requested but drive mode is 'none'");
}

Operator build_drive_term(const SystemParams& params, double t_ns) {
  const Operator coupling = drive_coupling_operator(params);
  const Operator shift = drive_shift_operator(params);
  const double omega_ang = mhz_to_angular(drive_envelope_mhz(params, t_ns));
  return Operator(coupling.layout, omega_ang * coupling.m + shift.m);
}

std::vector<CollapseChannel> collapse_channels(const SystemParams& params) {
  const SpaceLayout lay = params.layout();
  std::vector<CollapseChannel> channels;
  auto add = [&](CollapseChannel::Label label, double rate_mhz, Operator op) {
    if (rate_mhz <= 0.0) return;  // zero-rate channels are dropped
    const double amp = std::sqrt(2.0 * mhz_to_angular(rate_mhz));
    channels.push_back({label, Operator(lay, amp * op.m)});
  };
  add(CollapseChannel::Label::cavity_u, params.kappa_u_mhz,
      embed(annihilation(lay.n_max_u), CavitySlot::upper, lay));
  add(CollapseChannel::Label::cavity_l, params.kappa_l_mhz,
      embed(annihilation(lay.n_max_l), CavitySlot::lower, lay));
  add(CollapseChannel::Label::dipole_u, params.gamma_u_mhz,
      transition(lay, AtomLevel::i, AtomLevel::e));
  add(CollapseChannel::Label::dipole_l, params.gamma_l_mhz,
      transition(lay, AtomLevel::g, AtomLevel::i));
  return channels;
}

StateVector dark_state(const SystemParams& params) {
  const double gu = params.g_u_mhz;
  const double gl = params.g_l_mhz;
  const double norm = std::sqrt(gu * gu + gl * gl);
  if (norm == 0.0) {
    throw validation_error("dark state undefined: both couplings are zero");
  }
  const SpaceLayout lay = params.layout();
  Vector v = Vector::Zero(lay.total_dim());
  v(lay.index_of(AtomLevel::e, 0, 0)) = -gl / norm;
  v(lay.index_of(AtomLevel::g, 1, 1)) = gu / norm;
  return StateVector(lay, std::move(v));
}

ChainEigenenergies chain_eigenenergies(const SystemParams& params, double delta_mhz) {
  const double g2 = params.g_u_mhz * params.g_u_mhz + params.g_l_mhz * params.g_l_mhz;
  const double half = 0.5 * delta_mhz;
  const double root = std::sqrt(g2 + half * half);
  return {0.0, half + root, half - root};
}

double cooperativity(double g_mhz, double kappa_mhz, double gamma_mhz) {
  if (g_mhz == 0.0) return 0.0;
  if (kappa_mhz <= 0.0 || gamma_mhz <= 0.0) {
    throw validation_error("cooperativity requires kappa > 0 and gamma > 0");
  }
  return g_mhz * g_mhz / (2.0 * kappa_mhz * gamma_mhz);
}

double purcell_lifetime(double tau_free_ns, double cooperativity) {
  if (tau_free_ns <= 0.0) throw validation_error("free-space lifetime must be > 0");
  if (cooperativity < 0.0) throw validation_error("cooperativity must be >= 0");
  return tau_free_ns / (2.0 * cooperativity + 1.0);
}

}  // namespace cqed
