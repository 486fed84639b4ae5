// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "ddd/ddd.hpp"
#include "ddd/experiments.hpp"

using namespace ddd;
using namespace ddd::experiments;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Worst ||U H U_perp|| / max(1, ||U H||) seen by criteria 3-5.
double g_worst_residual = 0.0;
long g_residual_checks = 0;

void record_residual(double ratio) {
  g_worst_residual = std::max(g_worst_residual, ratio);
  ++g_residual_checks;
}

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome storage_identity() {
  ExampleBConfig cfg;
  cfg.seed = 1;
  double worst = 0.0;
  const SupplyRate w1 = msd::supply_w1();
  for (int i = 0; i < 100; ++i) {
    const Trajectory t = msd_trajectory(cfg, i);
    for (Eigen::Index k = 0; k + 2 < t.length(); ++k)
      worst = std::max(worst, std::abs(msd::storage(t, k + 1) - msd::storage(t, k) - evaluate_supply(w1, t, k)));
  }
  return {worst <= 1e-10, "100 trajectories x 298 steps, max |dV - w1| = " + fmt("%.3g", worst)};
}

Outcome example_b_sums(const ExampleBResult& r) {
  double min_w1 = std::numeric_limits<double>::infinity();
  int negative_w2 = 0;
  for (const auto& s : r.sums) {
    min_w1 = std::min(min_w1, s.sum_w1);
    negative_w2 += s.sum_w2 < 0.0 ? 1 : 0;
  }
  return {r.sums.size() == 1000 && min_w1 >= 0.0 && negative_w2 >= 1,
          std::to_string(r.sums.size()) + " samples, min sum w1 = " + fmt("%.4g", min_w1) + ", " +
              std::to_string(negative_w2) + " samples with sum w2 < 0"};
}

Outcome verdict_matrix(const ExampleBResult& r) {
  int cells = 0, passed = 0;
  long checks = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : r.cells) {
    ++cells;
    passed += c.all_passed() && c.pe_passed == c.checked ? 1 : 0;
    checks += c.checked;
    worst = std::min(worst, c.worst_min_eigenvalue);
    record_residual(c.worst_residual_ratio);
  }
  // L = 3..10, nu in [2, L), two T modes.
  const int expected = 2 * (1 + 2 + 3 + 4 + 5 + 6 + 7 + 8);
  return {cells == expected && passed == cells,
          std::to_string(passed) + "/" + std::to_string(cells) + " cells, " + std::to_string(checks) +
              " verifications, worst min eigenvalue " + fmt("%.3g", worst)};
}

Outcome oracle_equivalence() {
  EquivalenceConfig cfg;
  cfg.cases = 200;
  const auto cases = run_equivalence(cfg, jobs());
  int eligible = 0, compared = 0, mismatches = 0, borderline = 0;
  for (const auto& c : cases) {
    if (!c.pe_passed) continue;
    ++eligible;
    record_residual(c.data.nullspace_residual / std::max(1.0, c.data.constraint_norm));
    if (c.borderline) {
      ++borderline;
      std::printf("  borderline case %d (%s): data %.3g, oracle %.3g\n", c.id, to_string(c.kind),
                  c.data.trajectory_min_eigenvalue, c.oracle.min_eigenvalue);
      continue;
    }
    ++compared;
    if (!c.match()) {
      ++mismatches;
      std::printf("  mismatch case %d (%s): data %d, oracle %d\n", c.id, to_string(c.kind), c.data.dissipative,
                  c.oracle.dissipative);
    }
  }
  return {compared >= 50 && mismatches == 0,
          std::to_string(compared - mismatches) + "/" + std::to_string(compared) + " agree, " +
              std::to_string(borderline) + " borderline excluded, " + std::to_string(eligible) + "/" +
              std::to_string(cases.size()) + " passed the excitation check"};
}

// Scatter CSV for visual comparison; an unwritable directory is not a failure.
void write_scatter(const ExampleAConfig& cfg, const std::vector<ExampleARow>& rows) {
  try {
    io::write_text_file("acceptance_example_a.csv", example_a_csv(cfg, rows));
  } catch (const io::FormatError&) {
  }
}

struct GainResults {
  Outcome bound, step;
};

GainResults gain_study() {
  ExampleAConfig cfg;
  cfg.gen.count = 20;
  const double tol = cfg.bisection.abs_tol;

  int feasible = 0, infeasible = 0, bound_violations = 0, monotone_violations = 0;
  int step_probes = 0, step_violations = 0;
  std::vector<ExampleARow> rows(20);
  std::vector<int> row_monotone(20, 0), row_feasible(20, 0), row_bound(20, 0), row_probes(20, 0), row_step(20, 0);
  std::vector<double> row_residual(20, 0.0);

  parallel_for(rows.size(), jobs(), [&](std::size_t i) {
    const GeneratedSystem sys = generate_system(cfg.gen, static_cast<int>(i));
    const Trajectory snap = snapshot(sys.traj, cfg.start, cfg.snapshot_length());
    ExampleARow& row = rows[i];
    row.id = sys.id;
    row.gamma_true = hinf_norm(sys.model, cfg.hinf_rel_tol);
    for (Eigen::Index nu : {cfg.nus.first, cfg.nus.second}) {
      const L2GainTest test(snap, cfg.horizon, nu, std::nullopt, cfg.bisection.rank);
      row_residual[i] = std::max(row_residual[i], residual_ratio(test.data()));
      const GainEstimate est = estimate_l2_gain(test, cfg.bisection);
      (nu == cfg.nus.first ? row.low_nu : row.high_nu) = est;
      if (!est.feasible()) continue;
      ++row_feasible[i];
      if (*est.gamma > row.gamma_true + tol) ++row_bound[i];
      for (double k : {-4.0, -2.0, 2.0, 4.0}) {
        const double g = *est.gamma + k * tol;
        if (g < 0.0) continue;
        ++row_probes[i];
        if (test.feasible(g, cfg.bisection.eig_tol) != (k > 0)) ++row_step[i];
      }
    }
    // Horizon monotonicity on the same snapshot, nu = 5; infeasible counts as +inf.
    double prev = 0.0;
    for (Eigen::Index l : {10, 20, 30}) {
      const L2GainTest test(snap, l, cfg.nus.first, std::nullopt, cfg.bisection.rank);
      row_residual[i] = std::max(row_residual[i], residual_ratio(test.data()));
      const GainEstimate est = estimate_l2_gain(test, cfg.bisection);
      const double g = est.gamma.value_or(std::numeric_limits<double>::infinity());
      if (g < prev) ++row_monotone[i];
      prev = g;
    }
  });

  double worst_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    feasible += row_feasible[i];
    infeasible += 2 - row_feasible[i];
    bound_violations += row_bound[i];
    monotone_violations += row_monotone[i];
    step_probes += row_probes[i];
    step_violations += row_step[i];
    record_residual(row_residual[i]);
    for (const GainEstimate* e : {&rows[i].low_nu, &rows[i].high_nu})
      if (e->gamma) worst_gap = std::max(worst_gap, *e->gamma - rows[i].gamma_true);
  }
  write_scatter(cfg, rows);

  GainResults out;
  out.bound = {bound_violations == 0 && monotone_violations == 0 && feasible > 0,
               std::to_string(feasible) + " feasible / " + std::to_string(infeasible) +
                   " infeasible estimates, max(gamma_est - gamma_true) = " + fmt("%.4g", worst_gap) + ", " +
                   std::to_string(monotone_violations) + " horizon-monotonicity violations"};
  out.step = {step_violations == 0 && step_probes > 0,
              std::to_string(step_probes - step_violations) + "/" + std::to_string(step_probes) +
                  " probes on the correct side of the step"};
  return out;
}

Outcome formulas() {
  const bool values = min_T_for_pe(30, 4, 2, 0) == 101 && min_T_for_nullspace(30, 2, 2) == 149;
  int pe_ok = 0, ns_ok = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    // T = 101: input excites order L + n = 34.
    pe_ok += is_persistently_exciting(random_input(2, 101, 10.0, seed), 34).exciting ? 1 : 0;
    // T = 149: U H has a nontrivial null space for every nu in [1, L).
    const auto model = random_stable_model(4, 2, 2, derive_seed(seed, 7), {0.3, 0.95});
    const Matrix u = random_input(2, 149, 10.0, derive_seed(seed, 8));
    const Trajectory t(u, simulate(model, u));
    bool all = is_persistently_exciting(u, 34).exciting;
    for (Eigen::Index nu = 1; nu < 30 && all; ++nu) {
      try {
        all = project_data(t, 30, nu, 0, std::nullopt).nullspace.basis.cols() > 0;
      } catch (const NumericalError&) {
        all = false;
      }
    }
    ns_ok += all ? 1 : 0;
  }
  return {values && pe_ok == 10 && ns_ok == 10,
          "min_T_for_pe(30,4,2,0) = " + std::to_string(min_T_for_pe(30, 4, 2, 0)) +
              ", min_T_for_nullspace(30,2,2) = " + std::to_string(min_T_for_nullspace(30, 2, 2)) +
              ", rank checks " + std::to_string(pe_ok) + "/10 (T=101), " + std::to_string(ns_ok) + "/10 (T=149)"};
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  int failures = 0;
  // `shared_s` is time spent in a run shared with other criteria, charged to each.
  auto report = [&](int id, const char* title, double limit_s, const std::function<Outcome()>& fn,
                    double shared_s = 0.0) {
    const auto t0 = clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = shared_s + std::chrono::duration<double>(clock::now() - t0).count();
    const bool ok = o.pass && secs < limit_s;
    failures += ok ? 0 : 1;
    std::printf("[%s] criterion %d: %s: %s (%.2f s, limit %.0f s)\n", ok ? "PASS" : "FAIL", id, title,
                o.detail.c_str(), secs, limit_s);
    std::fflush(stdout);
  };

  report(1, "MSD storage identity", 1, storage_identity);

  // Criteria 2 and 3 share one run over the 1000 seeded samples.
  ExampleBResult b;
  const auto tb = clock::now();
  try {
    b = run_example_b(ExampleBConfig{}, jobs());
  } catch (const std::exception& e) {
    std::printf("example B run failed: %s\n", e.what());
  }
  const double b_secs = std::chrono::duration<double>(clock::now() - tb).count();
  report(2, "MSD supply sums", 30, [&] { return example_b_sums(b); }, b_secs);
  report(3, "MSD verdict matrix", 60, [&] { return verdict_matrix(b); }, b_secs);

  report(4, "oracle equivalence", 60, oracle_equivalence);

  GainResults gains;
  const auto tg = clock::now();
  try {
    gains = gain_study();
  } catch (const std::exception& e) {
    gains.bound = gains.step = {false, std::string("exception: ") + e.what()};
  }
  const double g_secs = std::chrono::duration<double>(clock::now() - tg).count();
  report(5, "L2 gain upper bound and horizon monotonicity", 300, [&] { return gains.bound; }, g_secs);
  report(6, "bisection step function", 300, [&] { return gains.step; }, g_secs);

  report(7, "excitation and data-length formulas", 5, formulas);

  report(8, "null-space certificate", 1, [] {
    return Outcome{g_residual_checks > 0 && g_worst_residual <= 1e-10,
                   std::to_string(g_residual_checks) + " checks, worst ratio " + fmt("%.3g", g_worst_residual)};
  });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
