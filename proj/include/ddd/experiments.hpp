#pragma once

// Reproducible experiment drivers: random-system corpora, the L2-gain study
// on random stable systems and the mass-spring-damper verdict matrix.
// Everything is a pure function of its config; results are ordered by id.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddd/excitation.hpp"
#include "ddd/gain_estimator.hpp"
#include "ddd/io.hpp"
#include "ddd/lti.hpp"
#include "ddd/msd.hpp"
#include "ddd/oracle.hpp"
#include "ddd/parallel.hpp"
#include "ddd/supply_rate.hpp"
#include "ddd/trajectory.hpp"
#include "ddd/verifier.hpp"

namespace ddd::experiments {

/// splitmix64 over (base, a, b): independent streams per system and purpose.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

// --- corpus generation --------------------------------------------------------

struct GenerateConfig {
  int count = 200;
  Eigen::Index order = 4;
  Eigen::Index inputs = 2;
  Eigen::Index outputs = 2;
  Eigen::Index length = 500;  // T_f
  std::uint64_t seed = 0;
  double input_std = 10.0;
  std::pair<double, double> radius_range{0.3, 0.95};
};

struct GeneratedSystem {
  int id = 0;
  StateSpaceModel model;
  Trajectory traj;
};

inline GeneratedSystem generate_system(const GenerateConfig& cfg, int id) {
  if (cfg.length < 1) throw DimensionError("trajectory length must be positive");
  if (!(cfg.input_std > 0.0)) throw DimensionError("input standard deviation must be positive");
  StateSpaceModel model = random_stable_model(cfg.order, cfg.inputs, cfg.outputs,
                                              derive_seed(cfg.seed, static_cast<std::uint64_t>(id), 0),
                                              cfg.radius_range);
  Matrix u = random_input(cfg.inputs, cfg.length, cfg.input_std,
                          derive_seed(cfg.seed, static_cast<std::uint64_t>(id), 1));
  Matrix y = simulate(model, u);
  return {id, std::move(model), Trajectory(std::move(u), std::move(y))};
}

inline std::vector<GeneratedSystem> generate_corpus(const GenerateConfig& cfg, unsigned jobs = 1) {
  if (cfg.count < 0) throw DimensionError("system count must be nonnegative");
  std::vector<std::optional<GeneratedSystem>> slots(static_cast<std::size_t>(cfg.count));
  parallel_for(slots.size(), jobs, [&](std::size_t i) { slots[i] = generate_system(cfg, static_cast<int>(i)); });
  std::vector<GeneratedSystem> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Warning text when T_f cannot hold the snapshot protocol
/// (start + min_T_for_pe(L, n, m, 0) samples), empty otherwise.
inline std::string snapshot_warning(const GenerateConfig& cfg, Eigen::Index horizon, Eigen::Index start) {
  const long need = start + min_T_for_pe(horizon, cfg.order, cfg.inputs, 0);
  if (cfg.length >= need) return {};
  return "trajectory length " + std::to_string(cfg.length) + " is shorter than the " +
         std::to_string(need) + " samples needed for a snapshot of length " +
         std::to_string(need - start) + " starting at " + std::to_string(start);
}

// --- L2 gain study ------------------------------------------------------------

struct ExampleAConfig {
  GenerateConfig gen;
  Eigen::Index horizon = 30;
  std::pair<Eigen::Index, Eigen::Index> nus{5, 28};
  Eigen::Index start = 50;
  std::optional<Eigen::Index> samples;  // default min_T_for_pe(L, n, m, 0)
  BisectionConfig bisection;
  double hinf_rel_tol = 1e-6;

  Eigen::Index snapshot_length() const {
    return samples.value_or(min_T_for_pe(horizon, gen.order, gen.inputs, 0));
  }
};

struct ExampleARow {
  int id = 0;
  double gamma_true = 0.0;
  GainEstimate low_nu, high_nu;
  double worst_residual_ratio = 0.0;  // ||U H U_perp|| / max(1, ||U H||)
};

inline double residual_ratio(const ProjectedData& d) {
  return d.nullspace_residual / std::max(1.0, d.constraint_norm);
}

inline ExampleARow run_example_a_system(const ExampleAConfig& cfg, const GeneratedSystem& sys) {
  ExampleARow row;
  row.id = sys.id;
  row.gamma_true = hinf_norm(sys.model, cfg.hinf_rel_tol);
  const Trajectory snap = snapshot(sys.traj, cfg.start, cfg.snapshot_length());
  auto run = [&](Eigen::Index nu) {
    const L2GainTest test(snap, cfg.horizon, nu, std::nullopt, cfg.bisection.rank);
    row.worst_residual_ratio = std::max(row.worst_residual_ratio, residual_ratio(test.data()));
    return estimate_l2_gain(test, cfg.bisection);
  };
  row.low_nu = run(cfg.nus.first);
  row.high_nu = run(cfg.nus.second);
  return row;
}

inline std::vector<ExampleARow> run_example_a(const ExampleAConfig& cfg, unsigned jobs = 1) {
  std::vector<ExampleARow> rows(static_cast<std::size_t>(std::max(cfg.gen.count, 0)));
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    rows[i] = run_example_a_system(cfg, generate_system(cfg.gen, static_cast<int>(i)));
  });
  return rows;
}

inline std::string example_a_csv(const ExampleAConfig& cfg, const std::vector<ExampleARow>& rows) {
  const std::string lo = std::to_string(cfg.nus.first), hi = std::to_string(cfg.nus.second);
  std::string out = "system_id,gamma_true,gamma_est_nu" + lo + ",gamma_est_nu" + hi + ",feasible_nu" +
                    lo + ",feasible_nu" + hi + "\n";
  auto value = [](const GainEstimate& e) { return e.gamma ? io::format_double(*e.gamma) : std::string(); };
  for (const auto& r : rows) {
    out += std::to_string(r.id) + "," + io::format_double(r.gamma_true) + "," + value(r.low_nu) + "," +
           value(r.high_nu) + "," + (r.low_nu.feasible() ? "true" : "false") + "," +
           (r.high_nu.feasible() ? "true" : "false") + "\n";
  }
  return out;
}

// --- mass-spring-damper study -------------------------------------------------

struct ExampleBConfig {
  int samples = 1000;
  Eigen::Index length = 300;  // T_f
  std::uint64_t seed = 0;
  double input_std = 10.0;
  Eigen::Index start = 50;
  Eigen::Index min_horizon = msd::kOrder + 1;
  Eigen::Index max_horizon = 10;
  int verdict_samples = -1;  // trajectories used per verdict cell; -1 = all
  double eig_tol = 1e-8;
};

enum class TMode { kExcitation, kNullSpace };

inline const char* to_string(TMode m) { return m == TMode::kExcitation ? "T1" : "T2"; }

/// T1 = (L+n)(m+1) + N m - 1 with N = 1; T2 = (m+p+1) L - 1, raised to T1
/// when smaller.
inline Eigen::Index msd_samples(TMode mode, Eigen::Index horizon) {
  const long t1 = min_T_for_pe(horizon, msd::kOrder, 1, 1);
  if (mode == TMode::kExcitation) return t1;
  return std::max(t1, min_T_for_nullspace(horizon, 1, 1));
}

struct SupplySums {
  int id = 0;
  double sum_w1 = 0.0;
  double sum_w2 = 0.0;
};

struct VerdictCell {
  Eigen::Index horizon = 0, nu = 0, samples = 0;
  TMode mode = TMode::kExcitation;
  int checked = 0;
  int passed = 0;
  int pe_passed = 0;
  double worst_min_eigenvalue = std::numeric_limits<double>::infinity();
  double worst_residual_ratio = 0.0;

  bool all_passed() const { return checked > 0 && passed == checked; }
};

struct ExampleBResult {
  std::vector<SupplySums> sums;
  std::vector<VerdictCell> cells;
};

inline Trajectory msd_trajectory(const ExampleBConfig& cfg, int id) {
  const StateSpaceModel model = msd::model();
  Matrix u = random_input(1, cfg.length, cfg.input_std, derive_seed(cfg.seed, static_cast<std::uint64_t>(id), 1));
  Matrix y = simulate(model, u);
  return {std::move(u), std::move(y)};
}

inline ExampleBResult run_example_b(const ExampleBConfig& cfg, unsigned jobs = 1) {
  if (cfg.samples < 1) throw DimensionError("need at least one sample");
  if (cfg.min_horizon <= msd::kOrder) throw DimensionError("horizon must exceed the system order");
  const SupplyRate w1 = msd::supply_w1(), w2 = msd::supply_w2();

  std::vector<Trajectory> trajs;
  trajs.reserve(static_cast<std::size_t>(cfg.samples));
  for (int i = 0; i < cfg.samples; ++i) trajs.push_back(msd_trajectory(cfg, i));

  ExampleBResult result;
  result.sums.resize(trajs.size());
  parallel_for(trajs.size(), jobs, [&](std::size_t i) {
    const Trajectory& t = trajs[i];
    result.sums[i] = {static_cast<int>(i), sum_supply(w1, t, t.length() - w1.depth()),
                      sum_supply(w2, t, t.length() - w2.depth())};
  });

  for (Eigen::Index l = cfg.min_horizon; l <= cfg.max_horizon; ++l)
    for (TMode mode : {TMode::kExcitation, TMode::kNullSpace})
      for (Eigen::Index nu = msd::kOrder; nu < l; ++nu)
        result.cells.push_back({l, nu, msd_samples(mode, l), mode});

  const int used = cfg.verdict_samples < 0 ? cfg.samples : std::min(cfg.verdict_samples, cfg.samples);
  parallel_for(result.cells.size(), jobs, [&](std::size_t c) {
    VerdictCell& cell = result.cells[c];
    for (int i = 0; i < used; ++i) {
      const Trajectory snap =
          snapshot(trajs[static_cast<std::size_t>(i)], cfg.start, cell.samples + w1.depth());
      VerificationProblem problem{snap, w1, cell.horizon, cell.nu, cell.samples, msd::kOrder, {}};
      problem.tol.eig_tol = cfg.eig_tol;
      const Verdict v = verify(problem);
      ++cell.checked;
      cell.passed += v.dissipative ? 1 : 0;
      cell.pe_passed += v.pe_passed ? 1 : 0;
      cell.worst_min_eigenvalue = std::min(cell.worst_min_eigenvalue, v.min_eigenvalue);
      cell.worst_residual_ratio =
          std::max(cell.worst_residual_ratio, v.nullspace_residual / std::max(1.0, v.constraint_norm));
    }
  });
  return result;
}

inline std::string example_b_sums_csv(const ExampleBResult& r) {
  std::string out = "sample_id,sum_w1,sum_w2\n";
  for (const auto& s : r.sums)
    out += std::to_string(s.id) + "," + io::format_double(s.sum_w1) + "," + io::format_double(s.sum_w2) + "\n";
  return out;
}

inline std::string example_b_verdicts_csv(const ExampleBResult& r) {
  std::string out = "L,nu,t_mode,T,checked,passed,pe_passed,worst_min_eigenvalue,all_passed\n";
  for (const auto& c : r.cells)
    out += std::to_string(c.horizon) + "," + std::to_string(c.nu) + "," + to_string(c.mode) + "," +
           std::to_string(c.samples) + "," + std::to_string(c.checked) + "," + std::to_string(c.passed) +
           "," + std::to_string(c.pe_passed) + "," + io::format_double(c.worst_min_eigenvalue) + "," +
           (c.all_passed() ? "true" : "false") + "\n";
  return out;
}

// --- data-driven vs model-based equivalence corpus ---------------------------

struct EquivalenceConfig {
  int cases = 60;
  std::uint64_t seed = 0;
  Eigen::Index max_order = 3;
  Eigen::Index max_horizon = 8;
  double input_std = 10.0;
  Eigen::Index start = 50;
  double borderline = 1e-7;
  double eig_tol = 1e-8;
  WindowWeighting weighting = WindowWeighting::kFromRest;
  LeadIn lead_in = LeadIn::kExcluded;
};

enum class SupplyKind { kRandom, kShiftedPsd, kGainBelow, kGainAbove };

inline const char* to_string(SupplyKind k) {
  switch (k) {
    case SupplyKind::kRandom: return "random";
    case SupplyKind::kShiftedPsd: return "shifted-psd";
    case SupplyKind::kGainBelow: return "gain-below";
    case SupplyKind::kGainAbove: return "gain-above";
  }
  return "?";
}

struct EquivalenceCase {
  int id = 0;
  Eigen::Index order = 0, horizon = 0, nu = 0, depth = 0, samples = 0;
  SupplyKind kind = SupplyKind::kRandom;
  bool pe_passed = false;
  Verdict data;
  OracleVerdict oracle;
  bool borderline = false;

  bool match() const { return data.dissipative == oracle.dissipative; }
};

/// Symmetric (N+1)(m+p) supply with i.i.d. normal entries, symmetrized;
/// kShiftedPsd moves its spectrum to [0.1, ...).
inline SupplyRate random_supply(std::mt19937_64& rng, int depth, Eigen::Index m, Eigen::Index p,
                                bool shift_to_psd) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index s = (m + p) * (depth + 1);
  Matrix x(s, s);
  for (Eigen::Index j = 0; j < s; ++j)
    for (Eigen::Index i = 0; i < s; ++i) x(i, j) = normal(rng);
  Matrix phi = 0.5 * (x + x.transpose());
  if (shift_to_psd) phi += (0.1 - min_symmetric_eigenvalue(phi)) * Matrix::Identity(s, s);
  std::map<SupplyRate::BlockIndex, Matrix> blocks;
  for (int i = 0; i <= depth; ++i)
    for (int j = i; j <= depth; ++j) blocks.emplace(SupplyRate::BlockIndex{i, j}, phi.block(i * (m + p), j * (m + p), m + p, m + p));
  return {depth, m, p, blocks};
}

/// One SISO case: n in [1, max_order], L in [n+1, max_horizon], nu = n,
/// N in {0, 1}; data of length T + N with T = min_T_for_pe(L, n, 1, N),
/// cut at `start` from a record driven by i.i.d. normal input. The gain
/// supplies scale the exact finite-horizon gain by 0.9 / 1.1 and sit in the
/// last diagonal block Phi_NN.
inline EquivalenceCase run_equivalence_case(const EquivalenceConfig& cfg, int id) {
  std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(id), 10));
  EquivalenceCase c;
  c.id = id;
  c.order = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(cfg.max_order));
  c.depth = static_cast<Eigen::Index>(id % 2);
  c.horizon = c.order + 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(cfg.max_horizon - c.order));
  c.nu = c.order;
  c.kind = static_cast<SupplyKind>((id / 2) % 4);
  const int depth = static_cast<int>(c.depth);

  const StateSpaceModel model =
      random_stable_model(c.order, 1, 1, derive_seed(cfg.seed, static_cast<std::uint64_t>(id), 11), {0.3, 0.95});

  std::optional<SupplyRate> supply;
  if (c.kind == SupplyKind::kRandom || c.kind == SupplyKind::kShiftedPsd) {
    supply = random_supply(rng, depth, 1, 1, c.kind == SupplyKind::kShiftedPsd);
  } else {
    const double g = oracle_l2_gain(model, c.horizon, c.nu, 1e-9);
    const double gamma = g * (c.kind == SupplyKind::kGainBelow ? 0.9 : 1.1);
    Matrix block(2, 2);
    block << -1.0, 0.0, 0.0, gamma * gamma;
    supply = SupplyRate(depth, 1, 1, {{{depth, depth}, block}});
  }

  c.samples = min_T_for_pe(c.horizon, c.order, 1, c.depth);
  const Eigen::Index needed = c.samples + c.depth;
  for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
    const Matrix u = random_input(1, cfg.start + needed, cfg.input_std,
                                  derive_seed(cfg.seed, static_cast<std::uint64_t>(id), 12 + attempt));
    const Trajectory snap = snapshot(Trajectory(u, simulate(model, u)), cfg.start, needed);
    VerificationProblem problem{snap, *supply, c.horizon, c.nu, c.samples, c.order, {}, cfg.weighting};
    problem.tol.eig_tol = cfg.eig_tol;
    c.data = verify(problem);
    c.pe_passed = c.data.pe_passed;
    if (c.pe_passed) break;
  }
  c.oracle = oracle_dissipative(model, *supply, c.horizon, c.nu, cfg.eig_tol, cfg.lead_in);
  c.borderline = std::abs(c.data.trajectory_min_eigenvalue) <= cfg.borderline ||
                 std::abs(c.oracle.min_eigenvalue) <= cfg.borderline;
  return c;
}

inline std::vector<EquivalenceCase> run_equivalence(const EquivalenceConfig& cfg, unsigned jobs = 1) {
  if (cfg.max_order < 1 || cfg.max_horizon <= cfg.max_order)
    throw DimensionError("equivalence corpus needs 1 <= max_order < max_horizon");
  std::vector<EquivalenceCase> out(static_cast<std::size_t>(std::max(cfg.cases, 0)));
  parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = run_equivalence_case(cfg, static_cast<int>(i)); });
  return out;
}

}  // namespace ddd::experiments
