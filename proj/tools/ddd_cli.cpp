// ddd: command-line front end for data-driven dissipativity checks.
//
// Exit codes: 0 success / dissipative, 1 not dissipative (or not exciting,
// infeasible gain), 2 usage or input error, 3 numerical failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ddd/ddd.hpp"
#include "ddd/experiments.hpp"
#include "ddd/parallel.hpp"
#include "ddd/report.hpp"
#include "json_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kNumerical = 3;

struct Globals {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    ddd::io::write_text_file(path, text);
  }
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

const std::map<std::string, ddd::WindowWeighting> kWeightings{
    {"from-rest", ddd::WindowWeighting::kFromRest}, {"all-windows", ddd::WindowWeighting::kAllWindows}};

// Optional [start, start + T) cut of a loaded trajectory; T defaults to the rest.
ddd::Trajectory cut(const ddd::Trajectory& t, Eigen::Index start, std::optional<Eigen::Index> length) {
  if (start == 0 && !length) return t;
  return ddd::snapshot(t, start, length.value_or(t.length() - start));
}

// --- generate -----------------------------------------------------------------

struct GenerateOpts {
  ddd::experiments::GenerateConfig gen;
  std::string out;
  Eigen::Index horizon = 30;
  Eigen::Index start = 50;
};

void add_generation_options(CLI::App* sub, ddd::experiments::GenerateConfig& g) {
  sub->add_option("--count", g.count, "number of systems")->capture_default_str();
  sub->add_option("--order", g.order, "state dimension n")->capture_default_str();
  sub->add_option("--inputs", g.inputs, "inputs m")->capture_default_str();
  sub->add_option("--outputs", g.outputs, "outputs p")->capture_default_str();
  sub->add_option("--length", g.length, "samples per trajectory T_f")->capture_default_str();
  sub->add_option("--input-std", g.input_std, "standard deviation of the input")->capture_default_str();
  sub->add_option("--radius", g.radius_range, "spectral radius range of A (lo hi)")->capture_default_str();
}

std::string system_name(int id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "system_%03d", id);
  return buf;
}

int run_generate(const GenerateOpts& o, const Globals& g) {
  ddd::experiments::GenerateConfig cfg = o.gen;
  cfg.seed = g.seed;
  if (const auto w = ddd::experiments::snapshot_warning(cfg, o.horizon, o.start); !w.empty()) warn(w);
  fs::create_directories(o.out);
  const auto systems = ddd::experiments::generate_corpus(cfg, g.jobs);
  json entries = json::array();
  for (const auto& s : systems) {
    const std::string name = system_name(s.id);
    ddd::io::write_model((fs::path(o.out) / (name + ".json")).string(), s.model);
    ddd::io::write_trajectory((fs::path(o.out) / (name + ".csv")).string(), s.traj);
    entries.push_back({{"id", s.id}, {"model", name + ".json"}, {"data", name + ".csv"}});
  }
  const json manifest = {{"seed", cfg.seed},     {"count", cfg.count},   {"order", cfg.order},
                         {"inputs", cfg.inputs}, {"outputs", cfg.outputs}, {"length", cfg.length},
                         {"input_std", cfg.input_std}, {"systems", entries}};
  ddd::io::write_text_file((fs::path(o.out) / "manifest.json").string(), manifest.dump(2) + "\n");
  return kOk;
}

// --- simulate -----------------------------------------------------------------

struct SimulateOpts {
  std::string model;
  Eigen::Index length = 500;
  double input_std = 10.0;
  std::string out;
};

int run_simulate(const SimulateOpts& o, const Globals& g) {
  const auto model = ddd::io::read_model(o.model);
  if (o.length < 1) throw ddd::DimensionError("--length must be positive");
  ddd::Matrix u = ddd::random_input(model.inputs(), o.length, o.input_std, g.seed);
  ddd::Matrix y = ddd::simulate(model, u);
  emit(ddd::io::trajectory_to_csv(ddd::Trajectory(std::move(u), std::move(y))), o.out);
  return kOk;
}

// --- pe-check -----------------------------------------------------------------

struct PeOpts {
  std::string data;
  Eigen::Index order = 1;
  Eigen::Index start = 0;
  std::optional<Eigen::Index> length;
};

int run_pe_check(const PeOpts& o) {
  const auto traj = cut(ddd::io::read_trajectory(o.data), o.start, o.length);
  const auto report = ddd::is_persistently_exciting(traj.u(), o.order);
  print_json(ddd::report::to_json(report, o.order));
  return report.exciting ? kOk : kNegative;
}

// --- verify / oracle ----------------------------------------------------------

struct VerifyOpts {
  std::string data, supply;
  Eigen::Index horizon = 1, nu = 0, start = 0;
  std::optional<Eigen::Index> order, samples;
  double eig_tol = 1e-8;
  ddd::WindowWeighting weighting = ddd::WindowWeighting::kFromRest;
};

int run_verify(const VerifyOpts& o) {
  const auto supply = ddd::io::read_supply(o.supply);
  const auto full = ddd::io::read_trajectory(o.data);
  const auto traj = o.samples ? cut(full, o.start, *o.samples + supply.depth()) : cut(full, o.start, std::nullopt);
  ddd::VerificationProblem problem{traj, supply, o.horizon, o.nu, o.samples, o.order, {}, o.weighting};
  problem.tol.eig_tol = o.eig_tol;
  const ddd::Verdict v = ddd::verify(problem);
  print_json(ddd::report::to_json(v));
  return v.dissipative ? kOk : kNegative;
}

struct OracleOpts {
  std::string model, supply;
  Eigen::Index horizon = 1, nu = 0;
  double eig_tol = 1e-8;
  bool lead_in = false;
};

int run_oracle(const OracleOpts& o) {
  const auto model = ddd::io::read_model(o.model);
  const auto supply = ddd::io::read_supply(o.supply);
  const auto lead = o.lead_in ? ddd::LeadIn::kIncluded : ddd::LeadIn::kExcluded;
  const auto v = ddd::oracle_dissipative(model, supply, o.horizon, o.nu, o.eig_tol, lead);
  print_json(ddd::report::to_json(v, o.horizon, o.nu, supply.depth(), o.eig_tol, lead));
  return v.dissipative ? kOk : kNegative;
}

// --- l2gain / batch-l2gain ----------------------------------------------------

struct GainOpts {
  std::string data, model;
  Eigen::Index horizon = 30, nu = 5, start = 0;
  std::optional<Eigen::Index> samples;
  ddd::BisectionConfig bisection;
};

void add_bisection_options(CLI::App* sub, ddd::BisectionConfig& b) {
  sub->add_option("--tol", b.abs_tol, "bisection tolerance on gamma")->capture_default_str();
  sub->add_option("--max-iters", b.max_iters, "maximum bisection steps")->capture_default_str();
  sub->add_option("--eig-tol", b.eig_tol, "eigenvalue tolerance")->capture_default_str();
}

int run_l2gain(const GainOpts& o) {
  const auto traj = cut(ddd::io::read_trajectory(o.data), o.start, o.samples);
  const auto est = ddd::estimate_l2_gain(traj, o.horizon, o.nu, o.bisection);
  json j = ddd::report::to_json(est);
  j["L"] = o.horizon;
  j["nu"] = o.nu;
  j["T"] = traj.length();
  if (!o.model.empty()) j["gamma_true"] = ddd::hinf_norm(ddd::io::read_model(o.model));
  print_json(j);
  return est.feasible() ? kOk : kNegative;
}

struct BatchOpts {
  std::string manifest, out;
  Eigen::Index horizon = 30, start = 50;
  std::vector<Eigen::Index> nus{5, 28};
  std::optional<Eigen::Index> samples;
  ddd::BisectionConfig bisection;
};

struct BatchRow {
  int id = 0;
  Eigen::Index nu = 0;
  ddd::GainEstimate est;
  std::optional<double> gamma_true;
};

int run_batch(const BatchOpts& o, const Globals& g) {
  const json manifest = ddd::io::read_json_file(o.manifest);
  if (!manifest.contains("systems") || !manifest["systems"].is_array())
    throw ddd::io::FormatError(o.manifest + ": missing \"systems\" array");
  const fs::path base = fs::path(o.manifest).parent_path();
  const json& systems = manifest["systems"];

  std::vector<std::vector<BatchRow>> per_system(systems.size());
  ddd::parallel_for(systems.size(), g.jobs, [&](std::size_t i) {
    const json& entry = systems[i];
    const int id = entry.value("id", static_cast<int>(i));
    const auto traj = ddd::io::read_trajectory((base / entry.at("data").get<std::string>()).string());
    std::optional<ddd::StateSpaceModel> model;
    if (entry.contains("model")) model = ddd::io::read_model((base / entry["model"].get<std::string>()).string());
    Eigen::Index t = 0;
    if (o.samples) {
      t = *o.samples;
    } else if (model) {
      t = ddd::min_T_for_pe(o.horizon, model->order(), traj.inputs(), 0);
    } else {
      throw ddd::DimensionError("system " + std::to_string(id) + ": --T is required without a model");
    }
    const auto snap = ddd::snapshot(traj, o.start, t);
    std::optional<double> gamma_true;
    if (model) gamma_true = ddd::hinf_norm(*model);
    for (Eigen::Index nu : o.nus)
      per_system[i].push_back({id, nu, ddd::estimate_l2_gain(snap, o.horizon, nu, o.bisection), gamma_true});
  });

  std::vector<BatchRow> rows;
  for (auto& v : per_system) rows.insert(rows.end(), v.begin(), v.end());
  std::stable_sort(rows.begin(), rows.end(), [](const BatchRow& a, const BatchRow& b) { return a.id < b.id; });

  std::string csv = "system_id,nu,feasible,gamma_est,gamma_true\n";
  for (const auto& r : rows)
    csv += std::to_string(r.id) + "," + std::to_string(r.nu) + "," + (r.est.feasible() ? "true" : "false") + "," +
           (r.est.gamma ? ddd::io::format_double(*r.est.gamma) : "") + "," +
           (r.gamma_true ? ddd::io::format_double(*r.gamma_true) : "") + "\n";
  emit(csv, o.out);
  return kOk;
}

// --- reproduce-example-a / -b -------------------------------------------------

struct ExampleAOpts {
  ddd::experiments::ExampleAConfig cfg;
  std::vector<Eigen::Index> nus{5, 28};
  std::string out;
};

int run_example_a(ExampleAOpts o, const Globals& g) {
  if (o.nus.size() != 2) throw ddd::DimensionError("--nu takes exactly two values");
  o.cfg.nus = {o.nus[0], o.nus[1]};
  o.cfg.gen.seed = g.seed;
  if (const auto w = ddd::experiments::snapshot_warning(o.cfg.gen, o.cfg.horizon, o.cfg.start); !w.empty()) warn(w);
  const auto rows = ddd::experiments::run_example_a(o.cfg, g.jobs);
  emit(ddd::experiments::example_a_csv(o.cfg, rows), o.out);
  return kOk;
}

struct ExampleBOpts {
  ddd::experiments::ExampleBConfig cfg;
  std::string out_sums, out_verdicts;
};

int run_example_b(ExampleBOpts o, const Globals& g) {
  o.cfg.seed = g.seed;
  const auto r = ddd::experiments::run_example_b(o.cfg, g.jobs);
  if (!o.out_sums.empty()) ddd::io::write_text_file(o.out_sums, ddd::experiments::example_b_sums_csv(r));
  if (!o.out_verdicts.empty()) ddd::io::write_text_file(o.out_verdicts, ddd::experiments::example_b_verdicts_csv(r));

  double min_w1 = std::numeric_limits<double>::infinity();
  int negative_w2 = 0;
  for (const auto& s : r.sums) {
    min_w1 = std::min(min_w1, s.sum_w1);
    negative_w2 += s.sum_w2 < 0.0 ? 1 : 0;
  }
  int cells_passed = 0;
  for (const auto& c : r.cells) cells_passed += c.all_passed() ? 1 : 0;
  const bool ok = min_w1 >= 0.0 && cells_passed == static_cast<int>(r.cells.size());
  print_json({{"samples", r.sums.size()},
              {"min_sum_w1", min_w1},
              {"negative_sum_w2", negative_w2},
              {"verdict_cells", r.cells.size()},
              {"verdict_cells_passed", cells_passed},
              {"all_passed", ok}});
  return ok ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven dissipativity verification from input/output trajectories"};
  app.config_formatter(std::make_shared<ddd::cli::JsonConfig>());
  app.set_config("--config", "", "JSON config file (command-line flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  app.add_option("--seed", globals.seed, "random seed")->capture_default_str();
  app.add_option("--jobs", globals.jobs, "worker threads for batch commands")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  GenerateOpts gen;
  auto* c_gen = app.add_subcommand("generate", "write random stable models and trajectories");
  add_generation_options(c_gen, gen.gen);
  c_gen->add_option("--out", gen.out, "output directory")->required();
  c_gen->add_option("--L", gen.horizon, "horizon used for the snapshot-length warning")->capture_default_str();
  c_gen->add_option("--start", gen.start, "snapshot start used for the warning")->capture_default_str();

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "simulate a model from rest under random input");
  c_sim->add_option("--model", sim.model, "model JSON")->required()->check(CLI::ExistingFile);
  c_sim->add_option("--length", sim.length, "number of samples")->capture_default_str();
  c_sim->add_option("--input-std", sim.input_std, "input standard deviation")->capture_default_str();
  c_sim->add_option("--out", sim.out, "trajectory CSV (default stdout)");

  PeOpts pe;
  auto* c_pe = app.add_subcommand("pe-check", "check persistency of excitation of the input");
  c_pe->add_option("--data", pe.data, "trajectory CSV")->required()->check(CLI::ExistingFile);
  c_pe->add_option("--L", pe.order, "excitation order")->required();
  c_pe->add_option("--start", pe.start, "first sample")->capture_default_str();
  c_pe->add_option("--length", pe.length, "number of samples (default: rest)");

  VerifyOpts ver;
  auto* c_ver = app.add_subcommand("verify", "data-driven (L, nu, N)-dissipativity test");
  c_ver->add_option("--data", ver.data, "trajectory CSV")->required()->check(CLI::ExistingFile);
  c_ver->add_option("--supply", ver.supply, "supply rate JSON")->required()->check(CLI::ExistingFile);
  c_ver->add_option("--L", ver.horizon, "horizon")->required();
  c_ver->add_option("--nu", ver.nu, "zero-initialization length")->required();
  c_ver->add_option("--order", ver.order, "system order n, enables the excitation check");
  c_ver->add_option("--T", ver.samples, "number of Hankel columns (default: all data)");
  c_ver->add_option("--start", ver.start, "first sample")->capture_default_str();
  c_ver->add_option("--eig-tol", ver.eig_tol, "eigenvalue tolerance")->capture_default_str();
  c_ver->add_option("--weighting", ver.weighting, "which stacked windows carry the supply")
      ->transform(CLI::CheckedTransformer(kWeightings, CLI::ignore_case))
      ->default_str("from-rest");

  OracleOpts orc;
  auto* c_orc = app.add_subcommand("oracle", "model-based dissipativity test");
  c_orc->add_option("--model", orc.model, "model JSON")->required()->check(CLI::ExistingFile);
  c_orc->add_option("--supply", orc.supply, "supply rate JSON")->required()->check(CLI::ExistingFile);
  c_orc->add_option("--L", orc.horizon, "horizon")->required();
  c_orc->add_option("--nu", orc.nu, "zero-initialization length")->required();
  c_orc->add_option("--eig-tol", orc.eig_tol, "eigenvalue tolerance")->capture_default_str();
  c_orc->add_flag("--lead-in", orc.lead_in, "also weight windows that overlap the zero prefix");

  GainOpts gain;
  auto* c_gain = app.add_subcommand("l2gain", "bisection estimate of the L2 gain from data");
  c_gain->add_option("--data", gain.data, "trajectory CSV")->required()->check(CLI::ExistingFile);
  c_gain->add_option("--L", gain.horizon, "horizon")->capture_default_str();
  c_gain->add_option("--nu", gain.nu, "zero-initialization length")->capture_default_str();
  c_gain->add_option("--start", gain.start, "first sample")->capture_default_str();
  c_gain->add_option("--T", gain.samples, "number of samples (default: rest)");
  c_gain->add_option("--model", gain.model, "model JSON, reports the H-infinity norm")->check(CLI::ExistingFile);
  add_bisection_options(c_gain, gain.bisection);

  BatchOpts batch;
  auto* c_batch = app.add_subcommand("batch-l2gain", "L2 gain estimates for every system in a manifest");
  c_batch->add_option("--manifest", batch.manifest, "manifest.json from generate")->required()->check(CLI::ExistingFile);
  c_batch->add_option("--L", batch.horizon, "horizon")->capture_default_str();
  c_batch->add_option("--nu", batch.nus, "zero-initialization lengths")->capture_default_str();
  c_batch->add_option("--start", batch.start, "snapshot start")->capture_default_str();
  c_batch->add_option("--T", batch.samples, "snapshot length (default: minimum for excitation)");
  c_batch->add_option("--out", batch.out, "CSV output (default stdout)");
  add_bisection_options(c_batch, batch.bisection);

  ExampleAOpts exa;
  auto* c_exa = app.add_subcommand("reproduce-example-a", "L2 gain study on random systems");
  add_generation_options(c_exa, exa.cfg.gen);
  c_exa->add_option("--L", exa.cfg.horizon, "horizon")->capture_default_str();
  c_exa->add_option("--nu", exa.nus, "two zero-initialization lengths")->capture_default_str()->expected(2);
  c_exa->add_option("--start", exa.cfg.start, "snapshot start")->capture_default_str();
  c_exa->add_option("--T", exa.cfg.samples, "snapshot length (default: minimum for excitation)");
  c_exa->add_option("--out", exa.out, "CSV output (default stdout)");
  add_bisection_options(c_exa, exa.cfg.bisection);

  ExampleBOpts exb;
  auto* c_exb = app.add_subcommand("reproduce-example-b", "mass-spring-damper supply sums and verdict matrix");
  c_exb->add_option("--samples", exb.cfg.samples, "number of trajectories")->capture_default_str();
  c_exb->add_option("--length", exb.cfg.length, "samples per trajectory")->capture_default_str();
  c_exb->add_option("--input-std", exb.cfg.input_std, "input standard deviation")->capture_default_str();
  c_exb->add_option("--start", exb.cfg.start, "snapshot start")->capture_default_str();
  c_exb->add_option("--L-max", exb.cfg.max_horizon, "largest horizon")->capture_default_str();
  c_exb->add_option("--verdict-samples", exb.cfg.verdict_samples, "trajectories per verdict cell (-1: all)")
      ->capture_default_str();
  c_exb->add_option("--eig-tol", exb.cfg.eig_tol, "eigenvalue tolerance")->capture_default_str();
  c_exb->add_option("--out-sums", exb.out_sums, "CSV of supply sums per sample");
  c_exb->add_option("--out-verdicts", exb.out_verdicts, "CSV of the verdict matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*c_gen) return run_generate(gen, globals);
    if (*c_sim) return run_simulate(sim, globals);
    if (*c_pe) return run_pe_check(pe);
    if (*c_ver) return run_verify(ver);
    if (*c_orc) return run_oracle(orc);
    if (*c_gain) return run_l2gain(gain);
    if (*c_batch) return run_batch(batch, globals);
    if (*c_exa) return run_example_a(exa, globals);
    if (*c_exb) return run_example_b(exb, globals);
  } catch (const ddd::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
