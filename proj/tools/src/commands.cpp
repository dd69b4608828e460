#include "qflqg/cli/commands.hpp"

#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "qflqg/cli/output.hpp"
#include "qflqg/cost.hpp"
#include "qflqg/instance.hpp"
#include "qflqg/oracle.hpp"
#include "qflqg/pareto.hpp"
#include "qflqg/policies.hpp"
#include "qflqg/simulator.hpp"

namespace qflqg::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

RunStamp stamp(const std::string& command, const ExperimentConfig& cfg) {
  return {command, cfg.run.seed, config_hash(cfg)};
}

void prepare(const ExperimentConfig& cfg, const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());
  write_text(out / "resolved_config.json", resolved_json(cfg, false).dump(2) + "\n");
}

void report_warnings(const Instance& inst) {
  for (const std::string& w : inst.bank.warnings) std::cerr << "qflqg: warning: " << w << "\n";
}

ordered_json vector_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered_json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"stderr", e.std_error}}; }

struct PreparedPolicy {
  Instance inst;
  SelectionPolicy policy;
  std::optional<OfflineSchedule> schedule;
};

PreparedPolicy prepare_policy(const ExperimentConfig& cfg) {
  const PolicyConfig& pc = cfg.policy;
  if (pc.kind == PolicyKind::kOracle) {
    Instance inst = make_discrete_instance(cfg.model, cfg.bank_spec(), pc.oracle_points);
    SelectionPolicy policy = SelectionPolicy::oracle(inst);
    return {std::move(inst), std::move(policy), std::nullopt};
  }
  Instance inst = make_instance(cfg.model, cfg.bank_spec());
  OfflineSchedule schedule = offline_schedule(inst);
  switch (pc.kind) {
    case PolicyKind::kGreedy:
      return {std::move(inst), SelectionPolicy::greedy(), std::nullopt};
    case PolicyKind::kRollout:
      return {std::move(inst), SelectionPolicy::rollout(schedule, {pc.n_samples, cfg.run.seed}), std::nullopt};
    case PolicyKind::kTerminalExact:
      return {std::move(inst), SelectionPolicy::terminal_exact(), std::nullopt};
    default:
      return {std::move(inst), SelectionPolicy::offline(schedule), schedule};
  }
}

}  // namespace

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.run.seed = *o.seed;
  if (o.runs) {
    if (*o.runs < 1) throw ConfigError("--runs: n_runs must be >= 1");
    cfg.run.n_runs = *o.runs;
  }
  if (o.policy) cfg.policy.kind = *o.policy;
}

unsigned threads_from_env() {
  const char* env = std::getenv("QFLQG_THREADS");
  if (env == nullptr || *env == '\0') return std::max(1u, std::thread::hardware_concurrency());
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) {
    throw ConfigError(std::string("QFLQG_THREADS must be a positive integer, got '") + env + "'");
  }
  return static_cast<unsigned>(v);
}

void cmd_solve(const ExperimentConfig& cfg, const fs::path& out) {
  const Instance inst = make_instance(cfg.model, cfg.bank_spec());
  report_warnings(inst);
  prepare(cfg, out);
  const RunStamp st = stamp("solve", cfg);
  const Eigen::Index n = cfg.model.n();
  const Eigen::Index m = cfg.model.m();
  const RiccatiSolution& ricc = inst.ricc;
  const int T = cfg.model.horizon;

  std::vector<std::string> header{"k"};
  auto add = [&header](std::vector<std::string> cols) { header.insert(header.end(), cols.begin(), cols.end()); };
  add(matrix_columns("P", n, n));
  add(matrix_columns("L", m, n));
  add(matrix_columns("N", n, n));
  header.push_back("r");
  add(matrix_columns("Pi", n, n));
  add(matrix_columns("Upsilon", n, n));
  add(matrix_columns("Omega", n, n));

  CsvWriter csv(st, header);
  for (int k = 0; k <= T; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    csv.cell(k).cells(ricc.P[ku]);
    if (k < T) csv.cells(ricc.L[ku]).cells(ricc.N[ku]);
    else csv.empty(static_cast<std::size_t>(m * n + n * n));
    csv.cell(ricc.r[ku]).cells(ricc.Pi[ku]).cells(ricc.Upsilon[ku]);
    if (k < T) csv.cells(ricc.Omega[ku]);
    else csv.empty(static_cast<std::size_t>(n * n));
    csv.end_row();
  }
  csv.save(out / "riccati.csv");

  const OfflineSchedule schedule = offline_schedule(inst);
  std::vector<std::string> sh{"k", "theta"};
  for (std::size_t i = 0; i < inst.num_quantizers(); ++i) sh.push_back("score_" + std::to_string(i));
  CsvWriter sc(st, sh);
  for (int k = 0; k < T; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    sc.cell(k).cell(schedule.selections[ku]);
    for (double s : schedule.scores[ku]) sc.cell(s);
    sc.end_row();
  }
  sc.save(out / "schedule.csv");
}

void cmd_simulate(const ExperimentConfig& cfg, const fs::path& out, unsigned threads) {
  PreparedPolicy pp = prepare_policy(cfg);
  report_warnings(pp.inst);
  MonteCarloOptions mc;
  mc.n_runs = cfg.run.n_runs;
  mc.seed = cfg.run.seed;
  mc.threads = threads;
  mc.keep_traces = cfg.run.keep_traces;
  const ExperimentResult res = monte_carlo(pp.inst, pp.policy, mc);

  prepare(cfg, out);
  const RunStamp st = stamp("simulate", cfg);
  ordered_json summary = stamped_json(st);
  summary["policy"] = to_string(cfg.policy.kind);
  summary["noise"] = pp.inst.is_discrete() ? "discrete" : "gaussian";
  summary["n_runs"] = res.n_runs;
  summary["horizon"] = cfg.model.horizon;
  summary["mean_cost"] = res.total.mean;
  summary["stderr_cost"] = res.total.std_error;
  summary["J_LQG"] = estimate_json(res.lqg);
  summary["J_quant"] = estimate_json(res.quant);
  summary["bit_rate"] = res.bit_rate;
  if (pp.schedule) {
    const CostDecomposition cd = analytic_cost_decomposition(pp.inst, pp.schedule->selections);
    summary["schedule"] = pp.schedule->selections;
    summary["analytic"] = {{"control_part", cd.control_part},
                           {"estimation_part", cd.estimation_part},
                           {"quantizer_part", cd.quantizer_part},
                           {"selection_part", cd.selection_part()},
                           {"total", cd.total()}};
  }
  summary["warnings"] = pp.inst.bank.warnings;
  write_json(out / "summary.json", summary);

  std::vector<std::string> uh{"t"};
  for (std::size_t i = 0; i < pp.inst.num_quantizers(); ++i) uh.push_back("rho_" + std::to_string(i));
  CsvWriter uc(st, uh);
  for (Eigen::Index t = 0; t < res.utilization.rows(); ++t) {
    uc.cell(static_cast<long long>(t + 1));
    for (Eigen::Index i = 0; i < res.utilization.cols(); ++i) uc.cell(res.utilization(t, i));
    uc.end_row();
  }
  uc.save(out / "utilization.csv");

  if (!res.traces.empty()) {
    const Eigen::Index n = cfg.model.n();
    const Eigen::Index m = cfg.model.m();
    std::vector<std::string> th{"run", "t", "theta"};
    auto vec_cols = [&th](const std::string& name, Eigen::Index len) {
      for (Eigen::Index i = 0; i < len; ++i) th.push_back(name + "_" + std::to_string(i));
    };
    vec_cols("x", n);
    vec_cols("u", m);
    vec_cols("w_prev", n);
    vec_cols("w_hat", n);
    vec_cols("x_pred", n);
    vec_cols("x_filt", n);
    vec_cols("delta", n);
    th.insert(th.end(), {"control_cost", "quantizer_cost"});
    CsvWriter tc(st, th);
    for (std::size_t r = 0; r < res.traces.size(); ++r) {
      const SimTrace& tr = res.traces[r];
      const int T = cfg.model.horizon;
      for (int t = 0; t <= T; ++t) {
        const auto tu = static_cast<std::size_t>(t);
        tc.cell(r).cell(t);
        if (t < T) tc.cell(tr.selections[tu]);
        else tc.empty();
        tc.cells(tr.x[tu].transpose());
        if (t < T) {
          tc.cells(tr.u[tu].transpose()).cells(tr.noise[tu].transpose()).cells(tr.w_hat[tu].transpose());
          tc.cells(tr.x_predicted[tu].transpose()).cells(tr.x_filtered[tu].transpose()).cells(tr.delta[tu].transpose());
          tc.cell(tr.control_cost[tu]).cell(tr.quantizer_cost[tu]);
        } else {
          tc.empty(static_cast<std::size_t>(m + 5 * n)).cell(tr.control_cost[tu]).empty();
        }
        tc.end_row();
      }
    }
    tc.save(out / "traces.csv");
  }
}

void cmd_pareto(const ExperimentConfig& cfg, const fs::path& out, unsigned threads) {
  const Instance inst = make_instance(cfg.model, cfg.bank_spec());
  report_warnings(inst);
  MonteCarloOptions mc;
  mc.n_runs = cfg.run.n_runs;
  mc.seed = cfg.run.seed;
  mc.threads = threads;
  const std::vector<ParetoPoint> points = pareto_sweep(inst, cfg.run.betas, mc);

  prepare(cfg, out);
  std::vector<std::string> header{"beta", "lambda_scale", "J_LQG", "J_LQG_stderr", "J_quant", "J_LQG_analytic", "dominated"};
  for (std::size_t i = 0; i < inst.num_quantizers(); ++i) header.push_back("uses_" + std::to_string(i));
  CsvWriter csv(stamp("pareto", cfg), header);
  for (const ParetoPoint& p : points) {
    csv.cell(p.beta).cell(p.lambda_scale).cell(p.lqg.mean).cell(p.lqg.std_error).cell(p.quant).cell(p.analytic_lqg);
    csv.cell(p.dominated ? 1 : 0);
    std::vector<long long> uses(inst.num_quantizers(), 0);
    for (std::size_t s : p.selections) ++uses[s];
    for (long long u : uses) csv.cell(u);
    csv.end_row();
  }
  csv.save(out / "pareto.csv");
}

void cmd_oracle(const ExperimentConfig& cfg, const fs::path& out) {
  const Instance inst = make_discrete_instance(cfg.model, cfg.bank_spec(), cfg.policy.oracle_points);
  report_warnings(inst);
  const OracleResult oracle = brute_force_mdp(inst);
  const OfflineSchedule schedule = offline_schedule(inst);
  const double control = analytic_cost_decomposition(inst, schedule.selections).control_part;

  prepare(cfg, out);
  ordered_json doc = stamped_json(stamp("oracle", cfg));
  doc["points_per_axis"] = cfg.policy.oracle_points;
  doc["tree_nodes"] = oracle.tree_nodes;
  doc["control_part"] = control;
  doc["optimal_value"] = oracle.value;
  doc["optimal_total"] = control + oracle.value;
  ordered_json table = ordered_json::array();
  for (const OracleFirstStage& f : oracle.first_stage) {
    table.push_back({{"w", vector_json(f.w)}, {"prob", f.prob}, {"action", f.index}, {"value", f.value}, {"q", f.q}});
  }
  doc["first_stage"] = table;

  const std::vector<std::pair<std::string, SelectionPolicy>> policies{
      {"oracle", SelectionPolicy::oracle(inst)},
      {"rollout", SelectionPolicy::rollout(schedule, {cfg.policy.n_samples, cfg.run.seed})},
      {"greedy", SelectionPolicy::greedy()},
      {"offline", SelectionPolicy::offline(schedule)},
  };
  ordered_json comparison = ordered_json::array();
  for (const auto& [name, policy] : policies) {
    const PolicyValue v = evaluate_policy_exact(inst, policy);
    comparison.push_back({{"policy", name},
                          {"selection_cost", v.selection_cost},
                          {"quantizer_cost", v.quantizer_cost},
                          {"total", control + v.selection_cost},
                          {"gap_to_oracle", v.selection_cost - oracle.value}});
  }
  doc["comparison"] = comparison;
  write_json(out / "oracle.json", doc);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Quantized-feedback LQG: Riccati solution, quantizer scheduling and Monte Carlo experiments", "qflqg"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::string policy;

  const std::pair<const char*, const char*> commands[] = {
      {"solve", "Riccati recursions and the offline quantizer schedule"},
      {"simulate", "Monte Carlo closed-loop runs under one selection policy"},
      {"pareto", "weighted LQG / quantization cost sweep over beta"},
      {"oracle", "exact scenario-tree policy on the discretized instance"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config (YAML or JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (default: output.dir from the config)");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--runs", runs, "Monte Carlo runs");
    sub->add_option("--policy", policy, "quantizer selection policy")
        ->check(CLI::IsMember({"offline", "greedy", "rollout", "oracle"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    ExperimentConfig cfg = load_config(config_path);
    Overrides o;
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--runs")) o.runs = runs;
    if (sub->count("--policy")) o.policy = parse_policy_kind(policy);
    apply_overrides(cfg, o);
    const fs::path out = out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir);
    const std::string cmd = sub->get_name();
    if (cmd == "solve") cmd_solve(cfg, out);
    else if (cmd == "simulate") cmd_simulate(cfg, out, threads_from_env());
    else if (cmd == "pareto") cmd_pareto(cfg, out, threads_from_env());
    else cmd_oracle(cfg, out);
  } catch (const OracleSizeError& e) {
    std::cerr << "qflqg: error: " << e.what() << "\n";
    return kExitOracleSize;
  } catch (const NumericalError& e) {
    std::cerr << "qflqg: error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConfigError& e) {
    std::cerr << "qflqg: error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "qflqg: error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace qflqg::cli
