#include "cqed/steady.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <deque>

#include "cqed/generator.hpp"
#include "cqed/threadpool.hpp"

namespace cqed {

namespace {

constexpr double kEdgeTol = 1e-14;

/// Basis states reachable from the seed support: Hamiltonian couplings act
/// both ways, jump operators one way.
std::vector<int> support_closure(const Matrix& h, const std::vector<CollapseChannel>& channels,
                                 const std::vector<int>& seed) {
  const int n = h.rows();
  std::vector<char> in(n, 0);
  std::deque<int> queue;
  for (int s : seed) {
    if (!in[s]) {
      in[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    auto visit = [&](int t) {
      if (!in[t]) {
        in[t] = 1;
        queue.push_back(t);
      }
    };
    for (int t = 0; t < n; ++t) {
      if (std::abs(h(t, s)) > kEdgeTol || std::abs(h(s, t)) > kEdgeTol) visit(t);
      for (const auto& ch : channels) {
        if (std::abs(ch.op.m(t, s)) > kEdgeTol) visit(t);
      }
    }
  }
  std::vector<int> out;
  for (int k = 0; k < n; ++k) {
    if (in[k]) out.push_back(k);
  }
  return out;
}

/// Vectorized Liouvillian assembled directly from sparse operators
/// (column-stacked convention, vec(AXB) = (B^T (x) A) vec X), with the
/// first row replaced by the trace constraint.
SparseMatrix trace_replaced_liouvillian(const SparseMatrix& h,
                                        const std::vector<SparseMatrix>& c_ops, int m) {
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(64 * m);
  auto add = [&](int row, int col, Complex v) {
    if (row != 0) trip.emplace_back(row, col, v);
  };
  const Complex mi(0.0, -1.0);
  for (int s = 0; s < h.outerSize(); ++s) {
    for (SparseMatrix::InnerIterator it(h, s); it; ++it) {
      const int r = static_cast<int>(it.row());
      const Complex v = it.value();
      for (int d = 0; d < m; ++d) {
        add(d * m + r, d * m + static_cast<int>(it.col()), mi * v);       // -i H rho
        add(static_cast<int>(it.col()) * m + d, r * m + d, -mi * v);     // +i rho H
      }
    }
  }
  for (const auto& c : c_ops) {
    SparseMatrix cdc = (SparseMatrix(c.adjoint()) * c).pruned();
    for (int s1 = 0; s1 < c.outerSize(); ++s1) {
      for (SparseMatrix::InnerIterator it1(c, s1); it1; ++it1) {
        for (int s2 = 0; s2 < c.outerSize(); ++s2) {
          for (SparseMatrix::InnerIterator it2(c, s2); it2; ++it2) {
            // c rho c^+ : (conj(c) (x) c)
            add(static_cast<int>(it2.row()) * m + static_cast<int>(it1.row()),
                static_cast<int>(it2.col()) * m + static_cast<int>(it1.col()),
                std::conj(it2.value()) * it1.value());
          }
        }
      }
    }
    for (int s = 0; s < cdc.outerSize(); ++s) {
      for (SparseMatrix::InnerIterator it(cdc, s); it; ++it) {
        const int r = static_cast<int>(it.row());
        const int cc = static_cast<int>(it.col());
        for (int d = 0; d < m; ++d) {
          add(d * m + r, d * m + cc, -0.5 * it.value());
          add(cc * m + d, r * m + d, -0.5 * it.value());
        }
      }
    }
  }
  for (int k = 0; k < m; ++k) trip.emplace_back(0, k * m + k, 1.0);
  SparseMatrix l(m * m, m * m);
  l.setFromTriplets(trip.begin(), trip.end());
  l.makeCompressed();
  return l;
}

std::string describe_states(const SpaceLayout& lay, const std::vector<int>& indices,
                            std::size_t limit = 6) {
  std::string out;
  for (std::size_t k = 0; k < indices.size() && k < limit; ++k) {
    const auto [a, nu, nl] = lay.decode(indices[k]);
    if (k) out += ", ";
    out += "|" + atom_level_label(static_cast<AtomLevel>(a)) + "," +
           std::to_string(nu) + "," + std::to_string(nl) + ">";
  }
  if (indices.size() > limit) out += ", ...";
  return out;
}

}  // namespace

SteadyStateResult steady_state(const SystemParams& params, const StateVector* reference) {
  params.validate();
  if (params.drive.mode != DriveMode::cw_g_e) {
    throw validation_error("steady_state requires the cw drive mode "
                           "(time-independent generator)");
  }
  const MasterEquation gen(params);
  if (gen.channels().empty()) {
    throw validation_error("steady_state requires at least one nonzero decay channel");
  }
  const SpaceLayout lay = params.layout();
  const int n = lay.total_dim();
  const Matrix h = gen.hamiltonian(0.0);

  std::vector<int> seed;
  if (reference) {
    if (reference->layout != lay) {
      throw validation_error("steady_state reference layout mismatch");
    }
    for (int k = 0; k < n; ++k) {
      if (std::abs(reference->amplitudes(k)) > kEdgeTol) seed.push_back(k);
    }
  } else {
    seed.push_back(lay.index_of(AtomLevel::g, 0, 0));
  }

  const std::vector<int> support = support_closure(h, gen.channels(), seed);
  const int m = static_cast<int>(support.size());

  Matrix h_r(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) h_r(i, j) = h(support[i], support[j]);
  std::vector<SparseMatrix> c_r;
  std::vector<Matrix> c_r_dense;
  for (const auto& ch : gen.channels()) {
    Matrix c(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) c(i, j) = ch.op.m(support[i], support[j]);
    if (c.cwiseAbs().maxCoeff() > kEdgeTol) {
      SparseMatrix cs = c.sparseView(1.0, 1e-300);
      cs.makeCompressed();
      c_r.push_back(std::move(cs));
      c_r_dense.push_back(std::move(c));
    }
  }
  SparseMatrix h_s = h_r.sparseView(1.0, 1e-300);
  h_s.makeCompressed();

  // Trace-row replacement: the first row of the singular system becomes
  // trace(rho) = 1.
  const SparseMatrix ls = trace_replaced_liouvillian(h_s, c_r, m);
  Vector rhs = Vector::Zero(m * m);
  rhs(0) = 1.0;

  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(ls);
  Vector x;
  bool solved = lu.info() == Eigen::Success;
  if (solved) {
    x = lu.solve(rhs);
    // one step of iterative refinement keeps the residual near round-off
    x += lu.solve(rhs - ls * x);
    solved = ((ls * x - rhs).cwiseAbs().maxCoeff() < 1e-8);
  }
  if (!solved) {
    // Singular beyond the trace degeneracy: report the invariant structure.
    Eigen::FullPivLU<Matrix> full(liouvillian_matrix(h_r, c_r_dense));
    full.setThreshold(1e-10);
    const int null_dim = m * m - static_cast<int>(full.rank());
    std::vector<int> complement;
    for (int k = 0; k < n; ++k) {
      if (std::find(support.begin(), support.end(), k) == support.end())
        complement.push_back(k);
    }
    throw numerical_error(
        "steady state is not unique: the generator has a " + std::to_string(null_dim) +
        "-dimensional null space on the reachable subspace {" +
        describe_states(lay, support) + "}" +
        (complement.empty() ? std::string()
                            : "; decoupled states: {" + describe_states(lay, complement) + "}"));
  }

  Matrix rho_r = Eigen::Map<Matrix>(x.data(), m, m);
  Matrix rho = Matrix::Zero(n, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) rho(support[i], support[j]) = rho_r(i, j);

  Matrix lrho(n, n);
  gen.apply(0.0, rho, lrho);
  SteadyStateResult result;
  result.residual_max = lrho.cwiseAbs().maxCoeff();
  result.rho = DensityMatrix(lay, std::move(rho));
  return result;
}

namespace {

void steady_observables(const SystemParams& params, SweepPoint& point) {
  const SteadyStateResult ss = steady_state(params);
  const SpaceLayout lay = params.layout();
  double n_u = 0.0, n_l = 0.0, p_i = 0.0, p_e = 0.0;
  for (int k = 0; k < lay.total_dim(); ++k) {
    const auto [a, nu, nl] = lay.decode(k);
    const double p = ss.rho.m(k, k).real();
    n_u += nu * p;
    n_l += nl * p;
    if (a == static_cast<int>(AtomLevel::i)) p_i += p;
    if (a == static_cast<int>(AtomLevel::e)) p_e += p;
  }
  point.obs["n_u"] = n_u;
  point.obs["n_l"] = n_l;
  point.obs["P_i"] = p_i;
  point.obs["P_e"] = p_e;
  point.residual = ss.residual_max;
}

void annotate_failure(SweepPoint& point, const std::exception& err,
                      const std::vector<std::string>& names) {
  point.error = err.what();
  for (const auto& name : names) point.obs[name] = std::nan("");
  point.residual = std::nan("");
}

}  // namespace

SweepResult sweep_drive_detuning(const SystemParams& params, const RealVector& delta_d_mhz,
                                 int threads) {
  params.validate();
  if (params.drive.mode != DriveMode::cw_g_e) {
    throw validation_error("drive-detuning sweep requires the cw drive mode");
  }
  SweepResult result;
  result.axes.push_back({"delta_D", "MHz", delta_d_mhz});
  result.observable_names = {"n_u", "n_l", "P_i", "P_e"};
  result.points.resize(delta_d_mhz.size());

  parallel_for(delta_d_mhz.size(), threads, [&](std::size_t k) {
    SweepPoint& point = result.points[k];
    point.i0 = static_cast<int>(k);
    SystemParams p = params;
    p.drive.delta_d_mhz = delta_d_mhz(k);
    try {
      steady_observables(p, point);
    } catch (const std::exception& err) {
      annotate_failure(point, err, result.observable_names);
    }
  });
  return result;
}

SweepResult kappa_detuning_map(const SystemParams& params, const RealVector& kappa_u_mhz,
                               const RealVector& delta_d_mhz, int threads) {
  params.validate();
  if (params.drive.mode != DriveMode::cw_g_e) {
    throw validation_error("kappa-detuning map requires the cw drive mode");
  }
  SweepResult result;
  result.axes.push_back({"kappa_u", "MHz", kappa_u_mhz});
  result.axes.push_back({"delta_D", "MHz", delta_d_mhz});
  result.observable_names = {"n_u", "n_l", "P_i", "P_e", "n_l_norm", "P_i_norm"};
  const int rows = static_cast<int>(kappa_u_mhz.size());
  const int cols = static_cast<int>(delta_d_mhz.size());
  result.points.resize(static_cast<std::size_t>(rows) * cols);

  parallel_for(result.points.size(), threads, [&](std::size_t k) {
    SweepPoint& point = result.points[k];
    point.i0 = static_cast<int>(k) / cols;
    point.i1 = static_cast<int>(k) % cols;
    SystemParams p = params;
    p.kappa_u_mhz = kappa_u_mhz(point.i0);
    p.drive.delta_d_mhz = delta_d_mhz(point.i1);
    try {
      steady_observables(p, point);
    } catch (const std::exception& err) {
      annotate_failure(point, err, result.observable_names);
    }
  });

  // per-kappa-row normalization to max 1, matching the published map
  for (int r = 0; r < rows; ++r) {
    double max_nl = 0.0, max_pi = 0.0;
    for (int c = 0; c < cols; ++c) {
      const auto& obs = result.points[r * cols + c].obs;
      if (obs.count("n_l")) max_nl = std::max(max_nl, obs.at("n_l"));
      if (obs.count("P_i")) max_pi = std::max(max_pi, obs.at("P_i"));
    }
    for (int c = 0; c < cols; ++c) {
      auto& obs = result.points[r * cols + c].obs;
      if (!obs.count("n_l")) continue;
      obs["n_l_norm"] = max_nl > 0.0 ? obs.at("n_l") / max_nl : 0.0;
      obs["P_i_norm"] = max_pi > 0.0 ? obs.at("P_i") / max_pi : 0.0;
    }
  }
  return result;
}

namespace {

SweepResult pulsed_efficiency_sweep(const SystemParams& params, const RealVector& delta_mhz,
                                    double t_end_ns, double sample_dt_ns, int threads,
                                    bool common_drive) {
  params.validate();
  if (params.drive.mode != DriveMode::pulsed_g0_e) {
    throw validation_error("detuning sweep requires the pulsed drive mode");
  }
  SweepResult result;
  result.axes.push_back({common_drive ? "delta_common" : "delta_opposite", "MHz", delta_mhz});
  result.observable_names = {"eta_fiber_u", "eta_fiber_l", "P_u", "P_l"};
  result.points.resize(delta_mhz.size());

  parallel_for(delta_mhz.size(), threads, [&](std::size_t k) {
    SweepPoint& point = result.points[k];
    point.i0 = static_cast<int>(k);
    SystemParams p = params;
    if (common_drive) {
      p.drive.delta_d_mhz = delta_mhz(k);
      p.delta_u_mhz = delta_mhz(k);
    } else {
      p.delta_u_mhz = delta_mhz(k);
      p.delta_l_mhz = -delta_mhz(k);
    }
    try {
      const SpaceLayout lay = p.layout();
      const DensityMatrix rho0 = pure_state(basis_state(lay, AtomLevel::g0, 0, 0));
      const Trajectory traj = integrate_master_equation(p, rho0, t_end_ns, sample_dt_ns);
      const EmissionResult em = emission_probabilities(traj);
      point.obs["P_u"] = em.p_u;
      point.obs["P_l"] = em.p_l;
      point.obs["eta_fiber_u"] = fiber_efficiency(std::min(em.p_u, 1.0), CavitySlot::upper,
                                                  p.collection);
      point.obs["eta_fiber_l"] = fiber_efficiency(std::min(em.p_l, 1.0), CavitySlot::lower,
                                                  p.collection);
      point.residual = traj.trace_error;
    } catch (const std::exception& err) {
      annotate_failure(point, err, result.observable_names);
    }
  });
  return result;
}

}  // namespace

SweepResult sweep_opposite_cavity_detunings(const SystemParams& params,
                                            const RealVector& delta_mhz, double t_end_ns,
                                            double sample_dt_ns, int threads) {
  return pulsed_efficiency_sweep(params, delta_mhz, t_end_ns, sample_dt_ns, threads, false);
}

SweepResult sweep_common_drive_cavity_detuning(const SystemParams& params,
                                               const RealVector& delta_mhz, double t_end_ns,
                                               double sample_dt_ns, int threads) {
  return pulsed_efficiency_sweep(params, delta_mhz, t_end_ns, sample_dt_ns, threads, true);
}

}  // namespace cqed
