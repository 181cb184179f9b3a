#include "cqed/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>

#include "cqed/corr.hpp"
#include "cqed/csvio.hpp"
#include "cqed/dynamics.hpp"
#include "cqed/fitkit.hpp"
#include "cqed/steady.hpp"

namespace cqed {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& message) {
  throw validation_error(pointer + ": " + message);
}

const json& member(const json& j, const std::string& pointer, const std::string& key) {
  if (!j.is_object()) fail(pointer, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(pointer + "/" + key, "required field is missing");
  return *it;
}

const json* optional_member(const json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& pointer) {
  if (!j.is_number()) fail(pointer, "expected a number");
  return j.get<double>();
}

double number_at(const json& j, const std::string& pointer, const std::string& key) {
  return number(member(j, pointer, key), pointer + "/" + key);
}

double number_or(const json& j, const std::string& pointer, const std::string& key,
                 double fallback) {
  const json* v = optional_member(j, key);
  return v ? number(*v, pointer + "/" + key) : fallback;
}

int integer_at(const json& j, const std::string& pointer, const std::string& key) {
  const json& v = member(j, pointer, key);
  if (!v.is_number_integer()) fail(pointer + "/" + key, "expected an integer");
  return v.get<int>();
}

int integer_or(const json& j, const std::string& pointer, const std::string& key,
               int fallback) {
  const json* v = optional_member(j, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(pointer + "/" + key, "expected an integer");
  return v->get<int>();
}

bool boolean_or(const json& j, const std::string& pointer, const std::string& key,
                bool fallback) {
  const json* v = optional_member(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(pointer + "/" + key, "expected a boolean");
  return v->get<bool>();
}

std::string string_at(const json& j, const std::string& pointer, const std::string& key) {
  const json& v = member(j, pointer, key);
  if (!v.is_string()) fail(pointer + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::string string_or(const json& j, const std::string& pointer, const std::string& key,
                      const std::string& fallback) {
  const json* v = optional_member(j, key);
  if (!v) return fallback;
  if (!v->is_string()) fail(pointer + "/" + key, "expected a string");
  return v->get<std::string>();
}

/// Grid spec: either {"values": [...]} or {"min", "max", "points", "spacing"}.
RealVector parse_grid(const json& j, const std::string& pointer) {
  if (!j.is_object()) fail(pointer, "expected a grid object");
  if (const json* values = optional_member(j, "values")) {
    if (!values->is_array() || values->empty()) {
      fail(pointer + "/values", "expected a nonempty array");
    }
    RealVector grid(values->size());
    for (std::size_t k = 0; k < values->size(); ++k) {
      grid(k) = number((*values)[k], pointer + "/values");
    }
    for (Eigen::Index k = 1; k < grid.size(); ++k) {
      if (grid(k) <= grid(k - 1)) fail(pointer + "/values", "grid must be strictly increasing");
    }
    return grid;
  }
  const double lo = number_at(j, pointer, "min");
  const double hi = number_at(j, pointer, "max");
  const int points = integer_at(j, pointer, "points");
  if (points < 2) fail(pointer + "/points", "expected at least 2 points");
  if (hi <= lo) fail(pointer + "/max", "max must exceed min");
  const std::string spacing = string_or(j, pointer, "spacing", "linear");
  RealVector grid(points);
  if (spacing == "linear") {
    grid = RealVector::LinSpaced(points, lo, hi);
  } else if (spacing == "log") {
    if (lo <= 0.0) fail(pointer + "/min", "log spacing requires min > 0");
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int k = 0; k < points; ++k) {
      grid(k) = std::exp(llo + (lhi - llo) * k / (points - 1));
    }
  } else {
    fail(pointer + "/spacing", "expected 'linear' or 'log'");
  }
  return grid;
}

const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> tasks = {
      "pulse",          "steady_sweep",          "kappa_map",
      "spectrum",       "hom_point",             "hom_map",
      "cross_correlation", "pair_stats",         "detuning_sweep_common",
      "detuning_sweep_opposite", "fit"};
  return tasks;
}

StateVector parse_initial_state(const json& j, const std::string& pointer,
                                const SpaceLayout& lay) {
  const AtomLevel level = atom_level_from_label(string_at(j, pointer, "level"));
  const int n_u = integer_or(j, pointer, "n_u", 0);
  const int n_l = integer_or(j, pointer, "n_l", 0);
  if (n_u < 0 || n_u > lay.n_max_u) fail(pointer + "/n_u", "occupation exceeds the cutoff");
  if (n_l < 0 || n_l > lay.n_max_l) fail(pointer + "/n_l", "occupation exceeds the cutoff");
  return basis_state(lay, level, n_u, n_l);
}

/// Platform-independent unit normal from explicit Box-Muller on 53-bit
/// uniforms, so seeded scenario outputs are reproducible byte for byte.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(two_pi * u2);
  }

 private:
  double next_uniform() { return (rng_() >> 11) * (1.0 / 9007199254740992.0); }
  std::mt19937_64 rng_;
};

}  // namespace

SystemParams params_from_json(const json& j, const std::string& pointer) {
  SystemParams p;
  p.g_u_mhz = number_at(j, pointer, "g_u");
  p.g_l_mhz = number_at(j, pointer, "g_l");
  p.kappa_u_mhz = number_at(j, pointer, "kappa_u");
  p.kappa_l_mhz = number_at(j, pointer, "kappa_l");
  p.gamma_u_mhz = number_at(j, pointer, "gamma_u");
  p.gamma_l_mhz = number_at(j, pointer, "gamma_l");
  p.delta_u_mhz = number_or(j, pointer, "delta_u", 0.0);
  p.delta_l_mhz = number_or(j, pointer, "delta_l", 0.0);
  p.n_max_u = integer_or(j, pointer, "n_max_u", 2);
  p.n_max_l = integer_or(j, pointer, "n_max_l", 2);

  const json& drive = member(j, pointer, "drive");
  const std::string drive_ptr = pointer + "/drive";
  const std::string mode = string_at(drive, drive_ptr, "mode");
  try {
    p.drive.mode = drive_mode_from_label(mode);
  } catch (const validation_error&) {
    fail(drive_ptr + "/mode", "expected one of none, pulsed_g0_e, cw_g_e");
  }
  p.drive.omega_d_mhz = number_or(drive, drive_ptr, "omega_d", 0.0);
  p.drive.delta_d_mhz = number_or(drive, drive_ptr, "delta_d", 0.0);
  if (const json* pulse = optional_member(drive, "pulse")) {
    PulseShape shape;
    shape.center_ns = number_at(*pulse, drive_ptr + "/pulse", "center_ns");
    shape.fwhm_ns = number_at(*pulse, drive_ptr + "/pulse", "fwhm_ns");
    p.drive.pulse = shape;
  }

  if (const json* coll = optional_member(j, "collection")) {
    const std::string cptr = pointer + "/collection";
    p.collection.eta_oc_u = number_or(*coll, cptr, "eta_oc_u", 1.0);
    p.collection.eta_oc_l = number_or(*coll, cptr, "eta_oc_l", 1.0);
    p.collection.eta_mm_u = number_or(*coll, cptr, "eta_mm_u", 1.0);
    p.collection.eta_mm_l = number_or(*coll, cptr, "eta_mm_l", 1.0);
  }

  try {
    p.validate();
  } catch (const validation_error& err) {
    fail(pointer, err.what());
  }
  return p;
}

json params_to_json(const SystemParams& p) {
  json j{{"g_u", p.g_u_mhz},         {"g_l", p.g_l_mhz},
         {"kappa_u", p.kappa_u_mhz}, {"kappa_l", p.kappa_l_mhz},
         {"gamma_u", p.gamma_u_mhz}, {"gamma_l", p.gamma_l_mhz},
         {"delta_u", p.delta_u_mhz}, {"delta_l", p.delta_l_mhz},
         {"n_max_u", p.n_max_u},     {"n_max_l", p.n_max_l}};
  json drive{{"mode", drive_mode_label(p.drive.mode)},
             {"omega_d", p.drive.omega_d_mhz},
             {"delta_d", p.drive.delta_d_mhz}};
  if (p.drive.pulse) {
    drive["pulse"] = {{"center_ns", p.drive.pulse->center_ns},
                      {"fwhm_ns", p.drive.pulse->fwhm_ns}};
  }
  j["drive"] = std::move(drive);
  j["collection"] = {{"eta_oc_u", p.collection.eta_oc_u},
                     {"eta_oc_l", p.collection.eta_oc_l},
                     {"eta_mm_u", p.collection.eta_mm_u},
                     {"eta_mm_l", p.collection.eta_mm_l}};
  return j;
}

Scenario parse_scenario(const std::string& content, const std::string& origin) {
  json j;
  try {
    j = json::parse(content);
  } catch (const json::parse_error& err) {
    throw validation_error(origin + ": not valid JSON: " + err.what());
  }
  if (!j.is_object()) fail("", "scenario must be a JSON object");

  const int version = integer_or(j, "", "schema_version", kSchemaVersion);
  if (version != kSchemaVersion) {
    fail("/schema_version", "unsupported schema version " + std::to_string(version));
  }

  Scenario sc;
  sc.name = string_at(j, "", "name");
  if (sc.name.empty()) fail("/name", "must be nonempty");
  sc.figure = string_or(j, "", "figure", "");
  sc.description = string_or(j, "", "description", "");
  sc.budget_seconds = number_or(j, "", "budget_seconds", 0.0);
  sc.task = string_at(j, "", "task");
  const auto& tasks = known_tasks();
  if (std::find(tasks.begin(), tasks.end(), sc.task) == tasks.end()) {
    fail("/task", "unknown task '" + sc.task + "'");
  }
  if (sc.task != "fit") {
    sc.params = params_from_json(member(j, "", "params"), "/params");
  }
  sc.raw = std::move(j);
  sc.source_bytes = content;

  // task-block presence checks so `validate` catches broken configs early
  const std::string t = sc.task;
  auto require_block = [&](const char* key) { member(sc.raw, "", key); };
  if (t == "pulse") require_block("pulse");
  if (t == "steady_sweep") {
    parse_grid(member(member(sc.raw, "", "steady_sweep"), "/steady_sweep", "delta_d"),
               "/steady_sweep/delta_d");
  }
  if (t == "kappa_map") {
    const json& block = member(sc.raw, "", "kappa_map");
    parse_grid(member(block, "/kappa_map", "kappa_u"), "/kappa_map/kappa_u");
    parse_grid(member(block, "/kappa_map", "delta_d"), "/kappa_map/delta_d");
  }
  if (t == "spectrum") require_block("spectrum");
  if (t == "hom_point") require_block("hom_point");
  if (t == "hom_map") {
    const json& block = member(sc.raw, "", "hom_map");
    parse_grid(member(block, "/hom_map", "g_u"), "/hom_map/g_u");
    parse_grid(member(block, "/hom_map", "g_l"), "/hom_map/g_l");
  }
  if (t == "cross_correlation") require_block("cross_correlation");
  if (t == "detuning_sweep_common") require_block("detuning_sweep");
  if (t == "detuning_sweep_opposite") require_block("detuning_sweep");
  if (t == "fit") require_block("fit");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_file(path), path);
}

namespace {

struct Writer {
  const Scenario& sc;
  const RunOptions& opt;
  RunOutcome outcome;

  std::string emit(const std::string& suffix, const std::string& content) {
    const fs::path path = fs::path(opt.out_dir) / (sc.name + suffix);
    write_file(path.string(), content);
    outcome.output_files.push_back(path.string());
    return path.string();
  }
};

double maybe_calibrate(SystemParams& p, const json& block, const std::string& pointer,
                       json& meta) {
  if (!boolean_or(block, pointer, "calibrate", true)) return p.drive.omega_d_mhz;
  const CalibrationResult cal = calibrate_pi_pulse(p);
  p.drive.omega_d_mhz = cal.peak_omega_mhz;
  meta["calibration"] = {{"peak_omega_mhz", cal.peak_omega_mhz},
                         {"achieved_pe", cal.achieved_pe},
                         {"iterations", cal.iterations}};
  return cal.peak_omega_mhz;
}

void run_pulse(const Scenario& sc, Writer& w) {
  const json& block = member(sc.raw, "", "pulse");
  SystemParams p = sc.params;
  json& meta = w.outcome.metadata;
  if (p.drive.mode == DriveMode::pulsed_g0_e) maybe_calibrate(p, block, "/pulse", meta);
  const SpaceLayout lay = p.layout();
  StateVector initial = basis_state(lay, AtomLevel::g0, 0, 0);
  if (const json* init = optional_member(block, "initial")) {
    initial = parse_initial_state(*init, "/pulse/initial", lay);
  }
  const double t_end = number_at(block, "/pulse", "t_end_ns");
  const double dt = number_at(block, "/pulse", "sample_dt_ns");
  const Trajectory traj = integrate_master_equation(p, pure_state(initial), t_end, dt);
  const EmissionResult em = emission_probabilities(traj);
  meta["trace_error"] = traj.trace_error;
  meta["P_u"] = em.p_u;
  meta["P_l"] = em.p_l;
  meta["eta_fiber_u"] = fiber_efficiency(std::min(em.p_u, 1.0), CavitySlot::upper, p.collection);
  meta["eta_fiber_l"] = fiber_efficiency(std::min(em.p_l, 1.0), CavitySlot::lower, p.collection);
  meta["truncated"] = em.truncated;
  w.emit("_trajectory.csv", trajectory_csv(traj));
}

void run_steady_sweep(const Scenario& sc, Writer& w) {
  const json& block = member(sc.raw, "", "steady_sweep");
  const RealVector grid = parse_grid(member(block, "/steady_sweep", "delta_d"),
                                     "/steady_sweep/delta_d");
  const SweepResult sweep = sweep_drive_detuning(sc.params, grid, w.opt.threads);
  w.emit("_sweep.csv", sweep_csv(sweep));
  w.emit("_params.json", params_to_json(sc.params).dump(2) + "\n");
}

void run_kappa_map(const Scenario& sc, Writer& w) {
  const json& block = member(sc.raw, "", "kappa_map");
  const RealVector kappa = parse_grid(member(block, "/kappa_map", "kappa_u"),
                                      "/kappa_map/kappa_u");
  const RealVector delta = parse_grid(member(block, "/kappa_map", "delta_d"),
                                      "/kappa_map/delta_d");
  const SweepResult sweep = kappa_detuning_map(sc.params, kappa, delta, w.opt.threads);
  w.outcome.metadata["normalization"] = "n_l and P_i normalized to max 1 per kappa_u row";
  w.emit("_sweep.csv", sweep_csv(sweep));
  w.emit("_params.json", params_to_json(sc.params).dump(2) + "\n");
}

void run_spectrum(const Scenario& sc, Writer& w) {
  const json& block = member(sc.raw, "", "spectrum");
  const std::string ptr = "/spectrum";
  const std::string cavity_label = string_at(block, ptr, "cavity");
  if (cavity_label != "u" && cavity_label != "l") fail(ptr + "/cavity", "expected 'u' or 'l'");
  const CavitySlot cavity = cavity_label == "u" ? CavitySlot::upper : CavitySlot::lower;

  const json& tau_spec = member(block, ptr, "tau");
  const double tau_max = number_at(tau_spec, ptr + "/tau", "max_ns");
  const int tau_points = integer_at(tau_spec, ptr + "/tau", "points");
  if (tau_points < 16) fail(ptr + "/tau/points", "expected at least 16 points");
  const RealVector tau = RealVector::LinSpaced(tau_points, 0.0, tau_max);
  const RealVector omega = parse_grid(member(block, ptr, "omega"), ptr + "/omega");

  Vector g1;
  const std::string source = string_or(block, ptr, "source", "steady");
  if (source == "steady") {
    g1 = steady_state_g1(sc.params, cavity, tau);
  } else if (source == "initial") {
    const SpaceLayout lay = sc.params.layout();
    const StateVector initial =
        parse_initial_state(member(block, ptr, "initial"), ptr + "/initial", lay);
    const int n_max = cavity == CavitySlot::upper ? lay.n_max_u : lay.n_max_l;
    const Operator a_op = embed(annihilation(n_max), cavity, lay);
    RealVector t1(1);
    t1(0) = 0.0;
    const TwoTimeGrid grid = regression_correlation(
        sc.params, pure_state(initial), a_op.dagger(), a_op, identity_operator(lay), t1, tau,
        cavity == CavitySlot::upper ? CorrelationKind::g1_u : CorrelationKind::g1_l);
    g1 = grid.values.row(0).transpose();
  } else {
    fail(ptr + "/source", "expected 'steady' or 'initial'");
  }

  const Spectrum spec = spectrum_from_g1(tau, g1, omega);
  w.outcome.metadata["window"] = {{"kind", "gaussian"},
                                  {"alpha_per_us", spec.window_alpha_per_us}};
  w.outcome.metadata["normalization"] = "unit area on the omega grid";
  w.outcome.metadata["raw_area"] = spec.raw_area;

  std::string g1_csv = "tau_ns,re,im\n";
  for (Eigen::Index k = 0; k < tau.size(); ++k) {
    g1_csv += format_sci(tau(k)) + ',' + format_sci(g1(k).real()) + ',' +
              format_sci(g1(k).imag()) + '\n';
  }
  w.emit("_g1.csv", g1_csv);
  w.emit("_spectrum.csv", spectrum_csv(spec));
}

void run_hom_point(const Scenario& sc, Writer& w) {
  const json& block = member(sc.raw, "", "hom_point");
  SystemParams p = sc.params;
  json& meta = w.outcome.metadata;
  maybe_calibrate(p, block, "/hom_point", meta);
  const int points = integer_or(block, "/hom_point", "grid_points", 61);
  const double t_max = number_at(block, "/hom_point", "t_max_ns");
  const RealVector grid = RealVector::LinSpaced(points, 0.0, t_max);
  const TwoTimeGrid g1 = pulsed_g1_grid(p, CavitySlot::upper, grid);
  meta["V_HOM"] = hom_visibility(g1);
  w.emit("_g1.csv", two_time_csv(g1));
}

void run_hom_map(const Scenario& sc, Writer& w) {
  const json& block = member(sc.raw, "", "hom_map");
  HomMapOptions options;
  options.grid_points = integer_or(block, "/hom_map", "grid_points", 61);
  options.t_max_ns = number_or(block, "/hom_map", "t_max_ns", 0.0);
  options.threads = w.opt.threads;
  const RealVector gu = parse_grid(member(block, "/hom_map", "g_u"), "/hom_map/g_u");
  const RealVector gl = parse_grid(member(block, "/hom_map", "g_l"), "/hom_map/g_l");
  const SweepResult sweep = hom_map(sc.params, gu, gl, options);
  w.emit("_sweep.csv", sweep_csv(sweep));
  w.emit("_params.json", params_to_json(sc.params).dump(2) + "\n");
}

void run_cross_correlation(const Scenario& sc, Writer& w) {
  const json& block = member(sc.raw, "", "cross_correlation");
  SystemParams p = sc.params;
  json& meta = w.outcome.metadata;
  maybe_calibrate(p, block, "/cross_correlation", meta);
  const RealVector tau = parse_grid(member(block, "/cross_correlation", "tau"),
                                    "/cross_correlation/tau");
  const json& t1_spec = member(block, "/cross_correlation", "t1");
  const double t1_max = number_at(t1_spec, "/cross_correlation/t1", "max_ns");
  const int t1_points = integer_at(t1_spec, "/cross_correlation/t1", "points");
  const RealVector t1 = RealVector::LinSpaced(t1_points, 0.0, t1_max);
  const CrossCorrelationResult cc = cross_correlation(p, tau, t1);
  if (boolean_or(block, "/cross_correlation", "fit_peak", true)) {
    const FitResult fit = fit_rise_fall(cc.tau_ns, cc.density);
    meta["peak_fit"] = {{"tau_rise_ns", fit.value("tau_rise")},
                        {"tau_fall_ns", fit.value("tau_fall")},
                        {"center_ns", fit.value("center")},
                        {"sigma_tau_rise_ns", fit.sigma("tau_rise")},
                        {"sigma_tau_fall_ns", fit.sigma("tau_fall")}};
  }
  meta["normalization"] =
      "density: per-trial coincidence density 1/ns; normalized: divided by the "
      "independent-trials product of marginal fluxes";
  w.emit("_cross_correlation.csv", cross_correlation_csv(cc));
}

void run_pair_stats(const Scenario& sc, Writer& w) {
  const json* block = optional_member(sc.raw, "pair_stats");
  SystemParams p = sc.params;
  json& meta = w.outcome.metadata;
  if (block) maybe_calibrate(p, *block, "/pair_stats", meta);
  else {
    const CalibrationResult cal = calibrate_pi_pulse(p);
    p.drive.omega_d_mhz = cal.peak_omega_mhz;
    meta["calibration"] = {{"peak_omega_mhz", cal.peak_omega_mhz},
                           {"achieved_pe", cal.achieved_pe}};
  }
  const double t_end = block ? number_or(*block, "/pair_stats", "t_end_ns", 0.0) : 0.0;
  const PairStatistics stats = pair_statistics(p, t_end);
  json out{{"p_pair_fiber", stats.p_pair_fiber},
           {"eta_u_given_l", stats.eta_u_given_l},
           {"eta_l_given_u", stats.eta_l_given_u},
           {"p_pair_raw", stats.p_pair_raw},
           {"p_u_raw", stats.p_u_raw},
           {"p_l_raw", stats.p_l_raw},
           {"truncated", stats.truncated}};
  meta["pair_stats"] = out;
  w.emit("_pair_stats.json", out.dump(2) + "\n");
}

void run_detuning_sweep(const Scenario& sc, Writer& w, bool common) {
  const json& block = member(sc.raw, "", "detuning_sweep");
  SystemParams p = sc.params;
  json& meta = w.outcome.metadata;
  maybe_calibrate(p, block, "/detuning_sweep", meta);
  const RealVector grid = parse_grid(member(block, "/detuning_sweep", "delta"),
                                     "/detuning_sweep/delta");
  const double t_end = number_at(block, "/detuning_sweep", "t_end_ns");
  const double dt = number_or(block, "/detuning_sweep", "sample_dt_ns", 1.0);
  const SweepResult sweep =
      common ? sweep_common_drive_cavity_detuning(p, grid, t_end, dt, w.opt.threads)
             : sweep_opposite_cavity_detunings(p, grid, t_end, dt, w.opt.threads);
  w.emit("_sweep.csv", sweep_csv(sweep));
  w.emit("_params.json", params_to_json(p).dump(2) + "\n");
}

void run_fit(const Scenario& sc, Writer& w) {
  const json& block = member(sc.raw, "", "fit");
  const std::string ptr = "/fit";
  const std::string model = string_at(block, ptr, "model");
  json& meta = w.outcome.metadata;
  FitResult result;
  json data_json;

  if (model == "photoionization") {
    PhotoionizationConstants constants;
    if (const json* c = optional_member(block, "constants")) {
      constants.wavelength_m = number_or(*c, ptr + "/constants", "wavelength_m", constants.wavelength_m);
      constants.pulse_window_s = number_or(*c, ptr + "/constants", "pulse_window_s", constants.pulse_window_s);
      constants.rep_period_s = number_or(*c, ptr + "/constants", "rep_period_s", constants.rep_period_s);
      constants.tau0_baseline_s = number_or(*c, ptr + "/constants", "tau0_s", constants.tau0_baseline_s);
    }
    const bool float_tau0 = boolean_or(block, ptr, "float_tau0", true);
    RealVector intensity, lifetime;
    if (const json* synth = optional_member(block, "synthetic")) {
      const std::string sptr = ptr + "/synthetic";
      const double sigma = number_at(*synth, sptr, "sigma_Mb");
      const double eta = number_at(*synth, sptr, "eta");
      const double tau0 = number_or(*synth, sptr, "tau0_s", constants.tau0_baseline_s);
      const double noise = number_or(*synth, sptr, "noise_frac", 0.0);
      const RealVector grid = parse_grid(member(*synth, sptr, "intensity"), sptr + "/intensity");
      const std::uint64_t seed = integer_or(sc.raw, "", "seed", 1);
      GaussianSource gauss(seed);
      constexpr double hc = 1.98644586e-25;
      const double beta = 1e-22 * constants.pulse_window_s * constants.wavelength_m / hc;
      intensity = grid;
      lifetime.resize(grid.size());
      for (Eigen::Index k = 0; k < grid.size(); ++k) {
        const double p_pi = eta * (1.0 - std::exp(-sigma * beta * grid(k)));
        const double tau = 1.0 / (1.0 / tau0 + p_pi / constants.rep_period_s);
        lifetime(k) = tau * (1.0 + noise * gauss());
      }
      meta["synthetic_truth"] = {{"sigma_Mb", sigma}, {"eta", eta}, {"tau0_s", tau0}};
    } else {
      const json& data = member(block, ptr, "data");
      const RealVector i_grid = parse_grid(json{{"values", member(data, ptr + "/data", "intensity")}}, ptr + "/data/intensity");
      intensity = i_grid;
      const json& life = member(data, ptr + "/data", "lifetime");
      if (!life.is_array() || life.size() != static_cast<std::size_t>(intensity.size())) {
        fail(ptr + "/data/lifetime", "must match the intensity column length");
      }
      lifetime.resize(intensity.size());
      for (std::size_t k = 0; k < life.size(); ++k) {
        lifetime(k) = number(life[k], ptr + "/data/lifetime");
      }
    }
    std::string csv = "intensity_w_m2,lifetime_s\n";
    for (Eigen::Index k = 0; k < intensity.size(); ++k) {
      csv += format_sci(intensity(k)) + ',' + format_sci(lifetime(k)) + '\n';
    }
    data_json["points"] = intensity.size();
    w.emit("_data.csv", csv);
    result = fit_photoionization(intensity, lifetime, constants, float_tau0);
  } else {
    fail(ptr + "/model", "unknown fit model '" + model + "' (expected photoionization)");
  }

  json report{{"model", model},
              {"converged", result.converged},
              {"iterations", result.iterations},
              {"residual_rms", result.residual_rms},
              {"input_digest", sha256_hex(sc.source_bytes)}};
  for (std::size_t k = 0; k < result.names.size(); ++k) {
    report["parameters"][result.names[k]] = result.values[k];
    report["uncertainties"][result.names[k]] = result.sigmas[k];
  }
  meta["fit"] = report;
  w.emit("_fit.json", report.dump(2) + "\n");
}

}  // namespace

RunOutcome run_scenario(const Scenario& sc, const RunOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  fs::create_directories(options.out_dir);

  Writer writer{sc, options, {}};
  writer.outcome.metadata = json::object();
  const std::string& task = sc.task;
  if (task == "pulse") run_pulse(sc, writer);
  else if (task == "steady_sweep") run_steady_sweep(sc, writer);
  else if (task == "kappa_map") run_kappa_map(sc, writer);
  else if (task == "spectrum") run_spectrum(sc, writer);
  else if (task == "hom_point") run_hom_point(sc, writer);
  else if (task == "hom_map") run_hom_map(sc, writer);
  else if (task == "cross_correlation") run_cross_correlation(sc, writer);
  else if (task == "pair_stats") run_pair_stats(sc, writer);
  else if (task == "detuning_sweep_common") run_detuning_sweep(sc, writer, true);
  else if (task == "detuning_sweep_opposite") run_detuning_sweep(sc, writer, false);
  else if (task == "fit") run_fit(sc, writer);
  else throw validation_error("/task: unknown task '" + task + "'");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  json manifest{{"scenario", sc.name},
                {"task", sc.task},
                {"figure", sc.figure},
                {"toolkit_version", kToolkitVersion},
                {"input_digest", sha256_hex(sc.source_bytes)},
                {"wall_time_s", wall},
                {"metadata", writer.outcome.metadata}};
  json files = json::array();
  for (const auto& f : writer.outcome.output_files) {
    files.push_back(fs::path(f).filename().string());
  }
  manifest["outputs"] = files;
  writer.emit("_manifest.json", manifest.dump(2) + "\n");
  return std::move(writer.outcome);
}

std::vector<CatalogEntry> scenario_catalog(const std::string& dir) {
  std::vector<CatalogEntry> entries;
  if (!fs::is_directory(dir)) {
    throw validation_error("scenario directory '" + dir + "' does not exist");
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (entry.path().filename() == "schema.json") continue;
    const Scenario sc = load_scenario(entry.path().string());
    entries.push_back({entry.path().string(), sc.name, sc.figure, sc.description,
                       sc.budget_seconds});
  }
  std::sort(entries.begin(), entries.end(),
            [](const CatalogEntry& a, const CatalogEntry& b) { return a.name < b.name; });
  return entries;
}

}  // namespace cqed
