// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// when any fails. Solver-backed criteria fail when no solver is configured.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "corruptions.hpp"
#include "vodfog/heuristic.hpp"
#include "vodfog/milp/extract.hpp"
#include "vodfog/milp/model.hpp"
#include "vodfog/study.hpp"
#include "vodfog/verify.hpp"

using namespace vodfog;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

void progress(const std::string& msg) { std::cerr << "[acceptance] " << msg << std::endl; }

struct Verdict {
  bool pass = false;
  std::string detail;
};

const std::string kSolver = milp::default_solver_command();

milp::SolverOptions solver_options(double gap, double limit) {
  milp::SolverOptions o;
  o.command = kSolver;
  o.mip_gap = gap;
  o.time_limit_s = limit;
  return o;
}

// Every solver plan produced during the run, with the verifier's findings.
struct Corpus {
  int plans = 0;
  std::vector<std::string> dirty;

  void add(const std::string& label, const PlacementPlan& plan, const Instance& inst) {
    ++plans;
    const auto v = verify_plan(plan, inst);
    if (!v.empty()) dirty.push_back(label + ": " + VerificationError::describe(v));
  }
};

Corpus corpus;

struct Solved {
  milp::SolveResult result;
  PlanEvaluation eval;
  double seconds = 0;
};

Solved solve_and_check(const std::string& label, const Instance& inst, double gap, double limit) {
  const auto t0 = Clock::now();
  Solved s;
  s.result = milp::solve(inst, solver_options(gap, limit));
  s.seconds = since(t0);
  corpus.add(label, s.result.plan, inst);
  s.eval = evaluate_plan(s.result.plan, inst);
  return s;
}

// ---- 1: MILP against exhaustive search -------------------------------------

PowerParams lattice_params(bool battery) {
  PowerParams p;
  p.access_switch_bitrate_gbps = 18;
  p.switch_bitrate_gbps = 36;
  p.router_port_bitrate_gbps = 9;
  p.wavelength_capacity_gbps = 18;
  p.olt_afdc_capacity_gbps = 36;
  p.olt_metro_capacity_gbps = 36;
  p.afdc_server_count = 20;
  p.mfdc_server_count_max = 10;
  if (battery) {
    // Integer kWh AFDC loads keep the battery on a 1 kWh lattice.
    p.pue_af = 1;
    p.server_w = 1000;
    p.access_fog_switch_w = 1000;
    p.fog_router_port_w = 1000;
  }
  return p;
}

std::vector<int> random_subset(std::mt19937& rng, int n, bool nonempty) {
  for (;;) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (rng() % 2) s.push_back(i);
    if (!nonempty || !s.empty()) return s;
  }
}

Instance random_tiny(std::mt19937& rng, bool battery) {
  for (;;) {
    const int hours = 1 + static_cast<int>(rng() % 4);
    DemandProfile d(2, hours);
    for (int g = 0; g < 2; ++g)
      for (int h = 0; h < hours; ++h) d.set(g, h, 1.8 * static_cast<double>(rng() % (battery ? 5 : 9)));
    auto params = lattice_params(battery);
    params.pue_c = 1.0 + 0.1 * static_cast<double>(rng() % 5);
    params.pue_mf = 1.0 + 0.1 * static_cast<double>(rng() % 5);
    if (!battery) params.pue_af = 1.0 + 0.1 * static_cast<double>(rng() % 5);
    ScenarioConfig sc;
    sc.cdc_source = rng() % 3 == 0 ? EnergySource::renewable : EnergySource::brown;
    sc.mfdc_source = rng() % 3 == 0 ? EnergySource::renewable : EnergySource::brown;
    SolarProfile sun;
    if (battery || rng() % 2) {
      sc.afdc_source = EnergySource::solar;
      sc.solar_array = {10, 0.1};
      for (int h = 0; h < hours; ++h) sun.irradiance[h] = 1000.0 * static_cast<double>(rng() % 4);
    }
    if (battery) {
      EsdParams e;
      e.e_max_kwh = static_cast<double>(1 + rng() % 3);
      e.eta_charge = e.eta_discharge = 1;
      if (rng() % 2) e.max_charge_kwh_per_hour = static_cast<double>(1 + rng() % 2);
      if (rng() % 2) e.max_discharge_kwh_per_hour = static_cast<double>(1 + rng() % 2);
      sc.esd = e;
      sc.initial_soc_kwh = static_cast<double>(rng() % (static_cast<int>(e.e_max_kwh) + 1));
      sc.cyclic_esd = rng() % 2;
    }
    const auto site = fixtures::sites(random_subset(rng, 2, true), random_subset(rng, 2, false),
                                      random_subset(rng, 2, sc.afdc_source == EnergySource::solar));
    try {
      return Instance(fixtures::pair_topo(800), site, d, params, sc, sun);
    } catch (const ValidationError&) {
      // Draw again.
    } catch (const Error&) {
    }
  }
}

Verdict oracle_equivalence() {
  std::mt19937 rng(20240607);
  const auto t0 = Clock::now();
  int compared = 0, skipped = 0, drawn = 0;
  std::vector<std::string> bad;
  while (compared < 60 && drawn < 400) {
    const bool battery = drawn % 5 >= 3;
    const Instance inst = random_tiny(rng, battery);
    ++drawn;
    double exact = 0;
    try {
      exact = evaluate_plan(brute_force(inst), inst).brown_kwh();
    } catch (const BudgetError&) {
      ++skipped;
      continue;
    } catch (const InfeasibleError&) {
      ++skipped;
      continue;
    }
    const auto s = solve_and_check("oracle #" + std::to_string(drawn), inst, 1e-9, 60);
    const double got = s.eval.brown_kwh();
    ++compared;
    if (s.result.status != milp::SolveStatus::optimal || std::abs(got - exact) > 1e-6 * std::max(1.0, exact))
      bad.push_back("#" + std::to_string(drawn) + " milp " + fmt(got, 6) + " vs " + fmt(exact, 6) + " (" +
                    milp::to_string(s.result.status) + ")");
  }
  const double secs = since(t0);
  Verdict v;
  v.pass = compared >= 50 && bad.empty() && secs < 300;
  v.detail = std::to_string(compared) + " instances matched exhaustive search (" + std::to_string(skipped) +
             " over budget) in " + fmt(secs, 1) + " s";
  if (!bad.empty()) v.detail += "; mismatches: " + bad.front() + (bad.size() > 1 ? " ..." : "");
  return v;
}

// ---- 2: verifier ------------------------------------------------------------

Verdict verifier_soundness() {
  const auto inst = fixtures::corruption_instance();
  const auto bare = fixtures::corruption_instance(false);
  const auto suite = fixtures::corruption_suite();
  std::vector<std::string> missed;
  for (const auto& c : suite) {
    auto plan = greedy_place(inst);
    c.apply(plan, inst);
    const auto v = verify_plan(plan, c.check_without_esd ? bare : inst);
    bool named = false;
    for (const auto& x : v) named = named || x.constraint == c.expect;
    if (!named) missed.push_back(c.name);
  }
  Verdict v;
  v.pass = corpus.plans > 0 && corpus.dirty.empty() && missed.empty() && suite.size() >= 20;
  v.detail = std::to_string(corpus.plans - static_cast<int>(corpus.dirty.size())) + "/" +
             std::to_string(corpus.plans) + " solver plans clean; " +
             std::to_string(suite.size() - missed.size()) + "/" + std::to_string(suite.size()) +
             " corruptions named";
  if (!corpus.dirty.empty()) v.detail += "; " + corpus.dirty.front();
  if (!missed.empty()) v.detail += "; missed " + missed.front();
  return v;
}

// ---- 3: tier preference -----------------------------------------------------

DemandProfile triangle_demand() {
  const double rows[3][4] = {{120, 250, 300, 60}, {80, 200, 260, 170}, {40, 60, 100, 30}};
  DemandProfile d(3, 4);
  for (int g = 0; g < 3; ++g)
    for (int h = 0; h < 4; ++h) d.set(g, h, rows[g][h]);
  return d;
}

Verdict exact_shares() {
  std::vector<std::string> bad;
  int checks = 0;
  {
    PowerParams p;  // every PUE 1.1
    const Instance inst(fixtures::triangle(), fixtures::sites({2}, {0, 1}, {0, 1}), triangle_demand(), p,
                        ScenarioConfig{});
    const auto s = solve_and_check("shares afdc", inst, 1e-9, 120);
    const double cap = p.tier_capacity_gbps(Tier::afdc);
    for (int h = 0; h < inst.hours(); ++h)
      for (int g : inst.sites().afdc_groups) {
        ++checks;
        const double want = std::min(inst.demand().at(g, h), cap);
        const double got = s.result.plan.hours[h].groups[g].afdc_gbps;
        if (got != want)
          bad.push_back("afdc g" + std::to_string(g) + " h" + std::to_string(h) + " " + fmt(got, 6) + " != " +
                        fmt(want, 6));
      }
  }
  {
    PowerParams p;
    p.pue_af = 1.3;
    p.mfdc_server_count_max = 50;  // 90 Gbps
    const Instance inst(fixtures::triangle(), fixtures::sites({2}, {0, 1}, {0, 1}), triangle_demand(), p,
                        ScenarioConfig{});
    const auto s = solve_and_check("shares mfdc", inst, 1e-9, 120);
    const double cap = p.tier_capacity_gbps(Tier::mfdc);
    for (int h = 0; h < inst.hours(); ++h)
      for (int n : inst.sites().mfdc_nodes) {
        double mfdc = 0, cdc = 0;
        for (int g = 0; g < inst.topo().group_count(); ++g) {
          if (inst.topo().home_node(g) != n) continue;
          mfdc += s.result.plan.hours[h].groups[g].mfdc_gbps;
          cdc += s.result.plan.hours[h].groups[g].cdc_total();
        }
        if (cdc == 0) continue;
        ++checks;
        if (mfdc != cap)
          bad.push_back("mfdc n" + std::to_string(n) + " h" + std::to_string(h) + " " + fmt(mfdc, 6) +
                        " with cloud traffic " + fmt(cdc, 6));
      }
  }
  Verdict v;
  v.pass = bad.empty() && checks > 0;
  v.detail = std::to_string(checks - static_cast<int>(bad.size())) + "/" + std::to_string(checks) +
             " exact share checks hold";
  for (const auto& b : bad) v.detail += "; " + b;
  return v;
}

// ---- 4, 5, 9: calibration study ---------------------------------------------

std::map<std::string, double> load_expected() {
  std::map<std::string, double> out;
  std::ifstream in(fixtures::source_dir() / "data/calibration/expected.txt");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[std::string(text::trim(std::string_view(line).substr(0, eq)))] = std::stod(line.substr(eq + 1));
  }
  return out;
}

struct Calibration {
  std::optional<Solved> baseline, solar, battery;
  double build_c_s = 0;
  double greedy_c_s = 0;
  double savings_b = 0;
  double increment_c = 0;
};

constexpr double kStudyGap = 1e-4;
constexpr double kStudyLimit = 300;

Calibration calibration_study() {
  Calibration c;
  const auto cfg = load_config(fixtures::source_dir() / "configs/calibration.conf");
  const Instance base = cfg.instance(baseline_scenario(), cfg.params);
  const Instance b = cfg.instance(solar_scenario(cfg), cfg.params);
  const Instance bc = cfg.instance(battery_scenario(cfg), cfg.params);

  auto t0 = Clock::now();
  (void)milp::build_model(bc);
  c.build_c_s = since(t0);
  t0 = Clock::now();
  const auto greedy = greedy_place(bc);
  c.greedy_c_s = since(t0);
  (void)greedy;

  progress("calibration baseline");
  c.baseline = solve_and_check("calibration baseline", base, kStudyGap, kStudyLimit);
  progress("calibration scenario B");
  c.solar = solve_and_check("calibration B", b, kStudyGap, kStudyLimit);
  progress("calibration scenario C");
  c.battery = solve_and_check("calibration C", bc, kStudyGap, kStudyLimit);
  c.savings_b = transport_savings_pct(c.baseline->eval, c.solar->eval);
  c.increment_c = transport_savings_pct(c.solar->eval, c.battery->eval);
  return c;
}

Verdict savings_band(const Calibration& c, const std::map<std::string, double>& expected) {
  Verdict v;
  const bool optimal = c.baseline->result.status == milp::SolveStatus::optimal &&
                       c.solar->result.status == milp::SolveStatus::optimal;
  v.pass = c.savings_b >= 25 && c.savings_b <= 45 && optimal;
  v.detail = "scenario B saves " + fmt(c.savings_b, 2) + "% of transport energy (baseline " +
             milp::to_string(c.baseline->result.status) + ", B " + milp::to_string(c.solar->result.status) + ")";
  const auto it = expected.find("scenario_b_savings_pct");
  if (it == expected.end()) {
    v.pass = false;
    v.detail += "; no committed figure";
  } else {
    v.detail += ", committed " + fmt(it->second, 2) + "%";
    if (std::abs(c.savings_b - it->second) > 1) v.pass = false;
  }
  return v;
}

// Random triangle studies. The battery enlarges the feasible set, so optimal
// brown energy cannot rise; the criterion also asks that the transport
// savings never fall.
Verdict battery_increment(const Calibration& c) {
  std::mt19937 rng(77);
  std::vector<std::string> bad;
  int brown_ok = 0, transport_ok = 0;
  const auto dir = fixtures::source_dir() / "tests/data";
  for (int i = 0; i < 10; ++i) {
    std::uniform_real_distribution<double> peak(40, 200), area(50, 400), pue(1.1, 1.5);
    std::string doc = "topology = triangle.topo\nplacement = triangle.placement\n";
    doc += "demand_peak_gbps = " + fmt(peak(rng), 1) + "\n";
    doc += std::string("demand_shape = ") + (rng() % 2 ? "evening_peak" : "flat") + "\n";
    doc += "solar_area_m2 = " + fmt(area(rng), 0) + "\n";
    doc += "pue_af = " + fmt(pue(rng), 2) + "\npue_mf = " + fmt(pue(rng), 2) + "\n";
    doc += "esd_e_max_kwh = " + std::to_string(20 + rng() % 100) + "\n";
    const auto cfg = load_config_text(doc, dir);
    progress("random study " + std::to_string(i));
    const auto base = solve_and_check("random base", cfg.instance(baseline_scenario(), cfg.params), 1e-9, 600);
    const auto b = solve_and_check("random B", cfg.instance(solar_scenario(cfg), cfg.params), 1e-9, 600);
    const auto bc = solve_and_check("random C", cfg.instance(battery_scenario(cfg), cfg.params), 1e-9, 600);
    const bool solved = bc.result.status == milp::SolveStatus::optimal && b.result.status == milp::SolveStatus::optimal;
    const double sb = transport_savings_pct(base.eval, b.eval);
    const double sc = transport_savings_pct(base.eval, bc.eval);
    const bool brown = bc.eval.brown_kwh() <= b.eval.brown_kwh() + 1e-6 * std::max(1.0, b.eval.brown_kwh());
    const bool transport = sc >= sb - 1e-6;
    brown_ok += brown;
    transport_ok += transport;
    if (!solved || !brown || !transport)
      bad.push_back("config " + std::to_string(i) + ": brown " + fmt(b.eval.brown_kwh()) + " -> " +
                    fmt(bc.eval.brown_kwh()) + " kWh, transport savings " + fmt(sb, 3) + "% -> " + fmt(sc, 3) +
                    "% (B " + milp::to_string(b.result.status) + ", C " + milp::to_string(bc.result.status) + ")");
  }
  Verdict v;
  v.pass = c.increment_c >= 3 && c.increment_c <= 12 && bad.empty();
  v.detail = "battery adds " + fmt(c.increment_c, 2) + "% transport savings over B on calibration (C " +
             milp::to_string(c.battery->result.status) + "); random configs: brown never higher in " +
             std::to_string(brown_ok) + "/10, transport savings never lower in " + std::to_string(transport_ok) +
             "/10";
  for (const auto& x : bad) v.detail += "; " + x;
  return v;
}

Verdict performance(const Calibration& c) {
  const auto& r = c.battery->result;
  const bool optimal = r.status == milp::SolveStatus::optimal;
  Verdict v;
  v.pass = c.build_c_s < 5 && optimal && c.battery->seconds < 300 && c.greedy_c_s < 1;
  v.detail = "scenario C model (" + std::to_string(r.variables) + " columns, " + std::to_string(r.integers) +
             " integer, " + std::to_string(r.constraints) + " rows) builds in " + fmt(c.build_c_s, 3) +
             " s; solver " + milp::to_string(r.status) + " after " + fmt(c.battery->seconds, 1) +
             " s at gap " + fmt(kStudyGap, 4) + "; greedy " + fmt(c.greedy_c_s, 3) + " s";
  return v;
}

// ---- 6: battery arithmetic --------------------------------------------------

Verdict esd_exactness() {
  EsdParams p;
  std::vector<std::string> bad;
  {
    const auto full = esd_charge({0}, p, 1.0);
    const double delivered = full.soc_kwh * p.eta_discharge;
    const auto empty = esd_discharge(full, p, delivered);
    if (std::abs(delivered - 0.7225 * 0.9025) > 1e-12 || empty.soc_kwh != 0) bad.push_back("unit round trip");
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  EsdState s{0};
  double charged = 0, delivered = 0;
  for (int step = 0; step < 100000; ++step) {
    if (rng() % 2) {
      const double room = (p.e_max_kwh - s.soc_kwh) / p.eta_charge;
      const double in = u(rng) * std::min(room, p.charge_cap());
      s = esd_charge(s, p, in);
      charged += in;
    } else {
      const double out = u(rng) * std::min(s.soc_kwh, p.discharge_cap()) * p.eta_discharge;
      s = esd_discharge(s, p, out);
      delivered += out;
    }
    if (s.soc_kwh < 0 || s.soc_kwh > p.e_max_kwh) {
      bad.push_back("soc " + fmt(s.soc_kwh, 9) + " out of bounds at step " + std::to_string(step));
      break;
    }
  }
  // Drain what is left; everything charged must come back scaled by both efficiencies.
  const double rest = s.soc_kwh * p.eta_discharge;
  s = esd_discharge(s, p, rest);
  delivered += rest;
  const double ratio = delivered / charged;
  if (std::abs(ratio - 0.7225 * 0.9025) > 1e-12) bad.push_back("fuzz round trip " + fmt(ratio, 15));
  Verdict v;
  v.pass = bad.empty();
  v.detail = "round trip " + fmt(ratio, 15) + " over 1e5 fuzzed steps, soc within [0, e_max]";
  if (!bad.empty()) v.detail += "; " + bad.front();
  return v;
}

// ---- 7: power goldens -------------------------------------------------------

Verdict golden_values() {
  const PowerParams p;
  const auto topo = fixtures::pair_topo(800);
  TrafficMatrix t(2);
  t.at(0, 1) = 30;
  const double core = core_power(topo, t, p);
  const std::vector<double> metro{600};
  const std::vector<double> access{200};
  const double m = metro_power(metro, p);
  const double a = access_power(access, p);
  Verdict v;
  v.pass = core == 3606 && m == 997.5 && a == 2712;
  v.detail = "core " + text::format_exact(core) + " W, metro " + text::format_exact(m) + " W, access " +
             text::format_exact(a) + " W";
  return v;
}

// ---- 8: repeatability of CLI outputs ----------------------------------------

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = text::read_file(e.path().string());
  return out;
}

Verdict determinism() {
  const fs::path work = fs::temp_directory_path() / ("vodfog_accept_" + std::to_string(::getpid()));
  fs::remove_all(work);
  const std::string cli = VODFOG_CLI_PATH;
  const auto small = (fixtures::source_dir() / "tests/data/small.conf").string();
  const auto cal = (fixtures::source_dir() / "configs/calibration.conf").string();
  const std::vector<std::pair<std::string, std::string>> jobs{
      {"run", small}, {"scenario-b", small}, {"scenario-c", small}, {"sweep-pue", small}, {"emit-mps", cal}};
  std::vector<std::string> bad;
  int files = 0;
  for (const auto& [cmd, conf] : jobs) {
    std::optional<std::map<std::string, std::string>> first;
    for (int rep = 0; rep < 3; ++rep) {
      const auto out = work / cmd / std::to_string(rep);
      const std::string line = milp::detail::shell_quote(cli) + " " + cmd + " --config " + milp::detail::shell_quote(conf) +
                               " --out " + milp::detail::shell_quote(out.string()) + " > /dev/null 2>&1";
      progress(cmd + " repetition " + std::to_string(rep + 1));
      if (const int rc = std::system(line.c_str()); rc != 0) {
        bad.push_back(cmd + " exited with " + std::to_string(rc));
        break;
      }
      auto tree = read_tree(out);
      if (tree.empty()) bad.push_back(cmd + " wrote nothing");
      if (!first) {
        first = std::move(tree);
        files += static_cast<int>(first->size());
      } else if (tree != *first) {
        bad.push_back(cmd + " repetition " + std::to_string(rep + 1) + " differs");
      }
    }
  }
  fs::remove_all(work);
  Verdict v;
  v.pass = bad.empty();
  v.detail = std::to_string(files) + " output files byte-identical across 3 runs of " + std::to_string(jobs.size()) +
             " commands";
  if (!bad.empty()) v.detail = bad.front();
  return v;
}

}  // namespace

int main() {
  std::map<int, Verdict> verdicts;
  auto guarded = [&](int id, const std::function<Verdict()>& fn) {
    try {
      verdicts[id] = fn();
    } catch (const std::exception& e) {
      verdicts[id] = {false, std::string("error: ") + e.what()};
    }
  };
  const bool solver = !kSolver.empty();
  const std::string no_solver = "no MILP solver configured";

  guarded(7, golden_values);
  guarded(6, esd_exactness);
  if (solver) {
    progress("oracle equivalence");
    guarded(1, oracle_equivalence);
    progress("exact shares");
    guarded(3, exact_shares);
    const auto expected = load_expected();
    std::optional<Calibration> cal;
    try {
      cal = calibration_study();
    } catch (const std::exception& e) {
      verdicts[4] = verdicts[5] = verdicts[9] = {false, std::string("error: ") + e.what()};
    }
    if (cal) {
      guarded(4, [&] { return savings_band(*cal, expected); });
      guarded(5, [&] { return battery_increment(*cal); });
      guarded(9, [&] { return performance(*cal); });
    }
    guarded(8, determinism);
    guarded(2, verifier_soundness);
  } else {
    for (int id : {1, 2, 3, 4, 5, 8, 9}) verdicts[id] = {false, no_solver};
  }

  bool all = true;
  for (const auto& [id, v] : verdicts) {
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << "\n";
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
