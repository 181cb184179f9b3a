#ifndef CQED_CORR_HPP
#define CQED_CORR_HPP

#include <string>
#include <vector>

#include "cqed/dynamics.hpp"
#include "cqed/model.hpp"
#include "cqed/qspace.hpp"
#include "cqed/steady.hpp"

namespace cqed {

enum class CorrelationKind { g1_u, g1_l, g2_auto_u, g2_auto_l, g2_cross };

/// Two-time correlation surface. For regression output the second axis is
/// the delay tau and values(i, j) = <A(t1_i) B(t1_i + tau_j) C(t1_i)>; for
/// the square single-photon kernels both axes are absolute times and
/// values(i, j) = <a^+(t_i) a(t_j)>.
struct TwoTimeGrid {
  RealVector t1_ns;
  RealVector t2_ns;
  Matrix values;
  CorrelationKind kind = CorrelationKind::g1_u;
};

/// Quantum-regression evaluation of <A(t1) B(t1+tau) C(t1)>: the state is
/// propagated to t1, the block C rho(t1) A is propagated over tau under the
/// same generator, and the result traced against B. Works for pulsed
/// (time-dependent) generators as well; propagation times are absolute.
TwoTimeGrid regression_correlation(const SystemParams& params, const DensityMatrix& initial,
                                   const Operator& a, const Operator& b, const Operator& c,
                                   const RealVector& t1_ns, const RealVector& tau_ns,
                                   CorrelationKind kind);

/// First-order coherence kernel G1(t, t') = <a^+(t) a(t')> of one cavity
/// field on a square grid, for the pulsed scenario starting from |g0,0,0>.
/// The upper triangle comes from the regression pass; t' < t by Hermitian
/// symmetry.
TwoTimeGrid pulsed_g1_grid(const SystemParams& params, CavitySlot cavity,
                           const RealVector& t_ns);

/// Time-integrated single-photon indistinguishability of a G1 kernel:
///   V = integral |G1(t,t')|^2 dt dt' / (integral G1(t,t) dt)^2.
double hom_visibility(const TwoTimeGrid& g1);

struct HomMapOptions {
  int grid_points = 61;       ///< per-point two-time grid resolution
  double t_max_ns = 0.0;      ///< 0 -> chosen from the slowest emission lifetime
  int threads = 1;
};

/// V_HOM of the upper photon over a (g_u, g_l) grid, pulse recalibrated at
/// every point.
SweepResult hom_map(const SystemParams& params, const RealVector& g_u_mhz,
                    const RealVector& g_l_mhz, const HomMapOptions& options = {});

struct CrossCorrelationResult {
  RealVector tau_ns;       ///< signed delay t_l - t_u
  RealVector density;      ///< trial-integrated coincidence density, 1/ns
  RealVector baseline;     ///< independent-trials product of marginal fluxes
  RealVector normalized;   ///< density / baseline
};

/// Delay marginal of the two-cavity coincidence surface. Positive delays
/// (upper photon detected first) and negative delays are separate
/// regression passes with mirrored operator ordering; the cascade is
/// time-asymmetric, so no symmetry is assumed.
CrossCorrelationResult cross_correlation(const SystemParams& params, const RealVector& tau_ns,
                                         const RealVector& t1_ns);

struct PairStatistics {
  double p_pair_fiber = 0.0;    ///< both photons in their fibers
  double eta_u_given_l = 0.0;
  double eta_l_given_u = 0.0;
  double p_pair_raw = 0.0;      ///< cavity-channel level, before collection
  double p_u_raw = 0.0;
  double p_l_raw = 0.0;
  bool truncated = false;
};

/// Photon-pair probability from the double time integral of the cross
/// G2, plus conditional in-fiber efficiencies against the single-channel
/// in-fiber probabilities.
PairStatistics pair_statistics(const SystemParams& params, double t_end_ns = 0.0);

struct Spectrum {
  RealVector omega_mhz;     ///< linear frequency offsets from the carrier
  RealVector density;       ///< nonnegative, unit area on the grid
  double window_alpha_per_us = 0.0;  ///< Gaussian apodization exp(-(alpha tau)^2)
  double raw_area = 0.0;    ///< area before normalization
};

/// Spectrum from a one-sided g1 series by trapezoid Fourier transform,
///   S(omega) ~ Re integral g1(tau) exp(i omega tau) dtau,
/// normalized to unit area. The series must be sampled until
/// |g1| < 1e-4 |g1(0)|; a Gaussian apodization sized from the residual tail
/// suppresses truncation ringing below the nonnegativity tolerance.
Spectrum spectrum_from_g1(const RealVector& tau_ns, const Vector& g1,
                          const RealVector& omega_mhz);

/// g1(tau) = <a^+(t) a(t+tau)> of one cavity from the steady state (cw
/// drive required).
Vector steady_state_g1(const SystemParams& params, CavitySlot cavity,
                       const RealVector& tau_ns);

}  // namespace cqed

#endif
