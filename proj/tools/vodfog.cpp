// Batch front end: solve one configuration, sweep PUEs, run the solar and
// battery studies, export the model, or check a plan.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vodfog/study.hpp"

namespace fs = std::filesystem;
using namespace vodfog;

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, solver_error = 3, infeasible = 4, verify_failed = 5 };

struct Flags {
  std::string config;
  std::string solver_cmd;
  double time_limit = 300;
  double mip_gap = 1e-4;
  bool no_solver = false;
  std::string out = ".";
  std::string plan;
};

StudyOptions study_options(const Flags& f) {
  StudyOptions o;
  if (f.no_solver) {
    o.engine = Engine::greedy;
    return o;
  }
  o.solver.command = f.solver_cmd.empty() ? milp::default_solver_command() : f.solver_cmd;
  o.solver.time_limit_s = f.time_limit;
  o.solver.mip_gap = f.mip_gap;
  if (o.solver.command.empty())
    throw milp::SolverError("no MILP solver configured; pass --solver-cmd, set VODFOG_SOLVER_CMD, or use --no-solver");
  return o;
}

void write_out(const Flags& f, const std::string& name, const std::string& content) {
  fs::create_directories(f.out);
  const auto path = fs::path(f.out) / name;
  text::write_file(path.string(), content);
  std::cout << "wrote " << path.string() << '\n';
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v);
  return buf;
}

std::string kwh(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f kWh", v);
  return buf;
}

int cmd_run(const Flags& f) {
  const RunConfig cfg = load_config(f.config);
  const StudyOptions opt = study_options(f);
  const Instance inst = cfg.instance();
  PlanRun r;
  try {
    r = run_plan(inst, opt);
  } catch (const VerificationError& e) {
    std::cerr << emit_violations_csv(e.violations());
    throw;
  }
  write_out(f, "plan.csv", emit_plan_csv(r.plan, inst));
  write_out(f, "breakdown.csv", emit_breakdown_csv(r.eval));
  std::cout << "status: " << r.status << '\n'
            << "brown energy: " << kwh(r.eval.brown_kwh()) << '\n'
            << "transport energy: " << kwh(r.eval.transport_kwh()) << '\n';
  const PlanRun base = run_plan(cfg.instance(baseline_scenario(), cfg.params), opt);
  if (base.eval.transport_kwh() > 0)
    std::cout << "transport savings vs brown-CDC baseline: " << pct(transport_savings_pct(base.eval, r.eval)) << '\n';
  else
    std::cout << "transport savings vs brown-CDC baseline: n/a (no baseline transport energy)\n";
  return ok;
}

int cmd_sweep(const Flags& f) {
  const RunConfig cfg = load_config(f.config);
  const auto rows = sweep_pue(cfg, study_options(f));
  write_out(f, "sweep.csv", emit_sweep_csv(rows));
  for (const auto& r : rows)
    std::printf("pue_mf %-5g pue_af %-5g brown %12.3f kWh  afdc %6.2f%%  mfdc %6.2f%%  cdc %6.2f%%\n", r.pue_mf,
                r.pue_af, r.brown_kwh, r.shares.afdc, r.shares.mfdc, r.shares.cdc);
  return ok;
}

int cmd_scenarios(const Flags& f, bool with_battery) {
  const RunConfig cfg = load_config(f.config);
  const ScenarioStudy s = run_scenarios(cfg, with_battery, study_options(f));
  std::vector<ProfileSeries> series{{"baseline", s.baseline.eval.hourly_w}, {"solar", s.solar.eval.hourly_w}};
  if (s.battery) series.push_back({"battery", s.battery->eval.hourly_w});
  write_out(f, "profile.csv", emit_profile_csv(series));
  write_out(f, "savings.csv", emit_savings_csv(savings_rows(s)));
  std::cout << "baseline transport: " << kwh(s.baseline.eval.transport_kwh()) << " (" << s.baseline.status << ")\n"
            << "solar transport:    " << kwh(s.solar.eval.transport_kwh()) << " (" << s.solar.status << ")\n";
  if (s.battery)
    std::cout << "battery transport:  " << kwh(s.battery->eval.transport_kwh()) << " (" << s.battery->status << ")\n";
  std::cout << "transport savings, solar vs baseline: " << pct(s.solar_vs_baseline_pct) << '\n';
  if (s.battery)
    std::cout << "transport savings, battery vs solar: " << pct(*s.battery_vs_solar_pct) << '\n'
              << "transport savings, battery vs baseline: " << pct(*s.battery_vs_baseline_pct) << '\n';
  return ok;
}

int cmd_emit_mps(const Flags& f) {
  const RunConfig cfg = load_config(f.config);
  const auto vm = milp::build_model(cfg.instance());
  const auto mps = milp::emit_mps(vm.lp);
  write_out(f, "model.mps", mps.text);
  write_out(f, "model.names", mps.name_map);
  std::cout << vm.lp.var_count() << " columns (" << vm.lp.integer_count() << " integer), " << vm.lp.row_count()
            << " rows, " << vm.lp.nonzero_count() << " nonzeros\n";
  return ok;
}

int cmd_verify(const Flags& f) {
  const RunConfig cfg = load_config(f.config);
  const Instance inst = cfg.instance();
  std::string doc;
  try {
    doc = text::read_file(f.plan);
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  const auto plan = load_plan_csv(doc, inst);
  const auto v = verify_plan(plan, inst);
  if (!v.empty()) {
    std::cout << emit_violations_csv(v);
    std::cerr << v.size() << " violation(s)\n";
    return verify_failed;
  }
  const auto e = evaluate_plan(plan, inst);
  std::cout << "plan is feasible; brown energy " << kwh(e.brown_kwh()) << ", transport " << kwh(e.transport_kwh())
            << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vodfog: brown-energy-minimal placement of video streams across cloud and fog data centres"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "Run configuration file")->check(CLI::ExistingFile);
  app.add_option("--solver-cmd", f.solver_cmd, "Solver command template with {model} {solution} {time_limit} {gap}");
  app.add_option("--time-limit", f.time_limit, "Solver time limit in seconds")->check(CLI::PositiveNumber);
  app.add_option("--mip-gap", f.mip_gap, "Relative optimality gap passed to the solver")->check(CLI::NonNegativeNumber);
  app.add_flag("--no-solver", f.no_solver, "Use the greedy heuristic instead of the MILP");
  app.add_option("--out", f.out, "Output directory");
  auto* run = app.add_subcommand("run", "Place one configuration and write plan.csv and breakdown.csv");
  auto* sweep = app.add_subcommand("sweep-pue", "Sweep the metro- and access-fog PUEs; writes sweep.csv");
  auto* sb = app.add_subcommand("scenario-b", "Baseline vs renewable cloud and solar fog; writes profile.csv, savings.csv");
  auto* scc = app.add_subcommand("scenario-c", "As scenario-b, plus a battery at every access fog site");
  auto* emit = app.add_subcommand("emit-mps", "Write the full-horizon model as model.mps and model.names");
  auto* ver = app.add_subcommand("verify", "Check a plan CSV against the configuration");
  ver->add_option("--plan", f.plan, "Plan CSV to check")->required();
  for (auto* sub : {run, sweep, sb, scc, emit, ver}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }
  if (f.config.empty()) {
    std::cerr << "error: --config is required\n";
    return config_error;
  }

  try {
    if (*run) return cmd_run(f);
    if (*sweep) return cmd_sweep(f);
    if (*sb) return cmd_scenarios(f, false);
    if (*scc) return cmd_scenarios(f, true);
    if (*emit) return cmd_emit_mps(f);
    if (*ver) return cmd_verify(f);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const milp::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return solver_error;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return infeasible;
  } catch (const CapacityError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return infeasible;
  } catch (const VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return verify_failed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
  return failure;
}
