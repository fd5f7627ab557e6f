#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "vodfog/heuristic.hpp"
#include "vodfog/milp/extract.hpp"
#include "vodfog/verify.hpp"

using namespace vodfog;
using namespace vodfog::milp;

namespace {

LinearModel tiny_model() {
  LinearModel m("TINY", "COST");
  const int x = m.add_var("x", 0, 4, false, 1);
  const int y = m.add_var("y", 0, 10, true, 2);
  const int z = m.add_var("z", -kInf, kInf, false);
  m.add_row("c1", {{x, 1}, {y, 1}}, Sense::ge, 2);
  m.add_row("c2", {{x, 1}, {z, -1}}, Sense::le, 3);
  m.add_row("c3", {{y, 1}, {z, 1}}, Sense::eq, 1);
  return m;
}

constexpr const char* kTinyMps =
    "NAME          TINY\n"
    "ROWS\n"
    " N  COST\n"
    " G  c1\n"
    " L  c2\n"
    " E  c3\n"
    "COLUMNS\n"
    "    x         COST      1              c1        1\n"
    "    x         c2        1\n"
    "    M0000000  'MARKER'                 'INTORG'\n"
    "    y         COST      2              c1        1\n"
    "    y         c3        1\n"
    "    M0000001  'MARKER'                 'INTEND'\n"
    "    z         c2        -1             c3        1\n"
    "RHS\n"
    "    RHS       c1        2\n"
    "    RHS       c2        3\n"
    "    RHS       c3        1\n"
    "RANGES\n"
    "BOUNDS\n"
    " UP BND       x         4\n"
    " UP BND       y         10\n"
    " FR BND       z\n"
    "ENDATA\n";

constexpr const char* kTinyHighsSolution =
    "Model status\nOptimal\n\n# Primal solution values\nFeasible\nObjective 2\n# Columns 3\nx 2\ny 0\nz 1\n"
    "# Rows 3\nc1 2\nc2 1\nc3 1\n\n# Dual solution values\nNone\n";

std::string solver_cmd() { return default_solver_command(); }

#define REQUIRE_SOLVER()                                               \
  if (solver_cmd().empty()) GTEST_SKIP() << "no MILP solver configured"

Instance small_instance(ScenarioConfig sc = {}, int hours = 2, double gbps = 18) {
  auto t = fixtures::pair_topo(800);
  auto d = fixtures::flat_demand(t, hours, gbps);
  return Instance(t, fixtures::sites({0}, {1}, {0, 1}), d, PowerParams{}, sc);
}

}  // namespace

TEST(LinearModel, Validation) {
  LinearModel m;
  m.add_var("a", 2, 1, false);
  EXPECT_THROW(m.validate(), ValidationError);
  LinearModel n;
  n.add_var("a", 0, 1, false);
  n.add_row("r", {{3, 1.0}}, Sense::le, 1);
  EXPECT_THROW(n.validate(), ValidationError);
  LinearModel dup;
  dup.add_var("a", 0, 1, false);
  dup.add_var("a", 0, 1, false);
  EXPECT_THROW(dup.validate(), ValidationError);
}

TEST(Mps, GoldenLayout) {
  const auto out = emit_mps(tiny_model());
  EXPECT_EQ(out.text, kTinyMps);
  EXPECT_TRUE(out.name_map.empty());
}

TEST(Mps, RelaxedDropsMarkersAndKeepsBounds) {
  const auto out = emit_mps(tiny_model(), true);
  EXPECT_EQ(out.text.find("MARKER"), std::string::npos);
  EXPECT_NE(out.text.find(" UP BND       y         10\n"), std::string::npos);
}

TEST(Mps, RoundTrip) {
  const auto m = tiny_model();
  const auto back = parse_mps(emit_mps(m).text);
  ASSERT_EQ(back.var_count(), 3);
  ASSERT_EQ(back.row_count(), 3);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(back.vars()[i].lb, m.vars()[i].lb);
    EXPECT_EQ(back.vars()[i].ub, m.vars()[i].ub);
    EXPECT_EQ(back.vars()[i].integer, m.vars()[i].integer);
    EXPECT_EQ(back.vars()[i].obj, m.vars()[i].obj);
    EXPECT_EQ(back.rows()[i].sense, m.rows()[i].sense);
    EXPECT_EQ(back.rows()[i].rhs, m.rows()[i].rhs);
  }
  EXPECT_EQ(emit_mps(back).text, kTinyMps);
}

TEST(Mps, BareIntegerColumnReadsAsBinary) {
  const std::string doc =
      "NAME X\nROWS\n N obj\n L r\nCOLUMNS\n M1 'MARKER' 'INTORG'\n b obj 1 r 1\n M2 'MARKER' 'INTEND'\n"
      "RHS\n RHS r 1\nBOUNDS\nENDATA\n";
  const auto m = parse_mps(doc);
  EXPECT_TRUE(m.vars()[0].integer);
  EXPECT_EQ(m.vars()[0].ub, 1.0);
}

TEST(Mps, UnboundedIntegerGetsPlusInfinity) {
  LinearModel m;
  m.add_var("n", 0, kInf, true, 1);
  const auto out = emit_mps(m);
  EXPECT_NE(out.text.find(" PL BND       n\n"), std::string::npos);
  EXPECT_EQ(parse_mps(out.text).vars()[0].ub, kInf);
}

TEST(Mps, LongNamesAreShortenedUniquely) {
  LinearModel m;
  for (int i = 0; i < 50; ++i) m.add_var("flow_group_" + std::to_string(i), 0, 1, false, 1);
  const auto out = emit_mps(m);
  std::set<std::string> seen;
  for (const auto& n : out.names.columns) {
    EXPECT_LE(n.size(), 8u);
    EXPECT_TRUE(seen.insert(n).second) << n;
  }
  EXPECT_NE(out.name_map.find("C flow_gro flow_group_0\n"), std::string::npos);
  EXPECT_EQ(parse_mps(out.text).var_count(), 50);
}

TEST(Mps, NumbersFitTwelveCharacters) {
  for (double v : {1.0 / 3, -2.0 / 3, 123456789012345.0, 1e-20, -1.5e300, 0.1, 1e6}) {
    const auto s = mps_number(v);
    EXPECT_LE(s.size(), 12u) << s;
    double back = 0;
    ASSERT_TRUE(text::parse_double(s, back)) << s;
    EXPECT_NEAR(back, v, std::abs(v) * 1e-8) << s;
  }
  EXPECT_EQ(mps_number(0.0), "0");
  EXPECT_EQ(mps_number(40), "40");
}

TEST(Mps, EmissionIsDeterministic) {
  const auto inst = small_instance(fixtures::solar_with_esd());
  const auto a = emit_mps(build_model(inst).lp);
  const auto b = emit_mps(build_model(inst).lp);
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.name_map, b.name_map);
}

TEST(SolutionParser, Highs) {
  const auto r = parse_raw_solution(kTinyHighsSolution);
  EXPECT_EQ(r.status, SolveStatus::optimal);
  EXPECT_EQ(r.objective, 2.0);
  EXPECT_FALSE(r.sparse);
  EXPECT_EQ(r.values.at("x"), 2.0);
  EXPECT_EQ(r.values.at("z"), 1.0);
}

TEST(SolutionParser, HighsInfeasible) {
  const auto r = parse_raw_solution("Model status\nInfeasible\n\n# Primal solution values\nNone\n");
  EXPECT_EQ(r.status, SolveStatus::infeasible);
  EXPECT_FALSE(r.has_values());
}

TEST(SolutionParser, HighsTimeLimitKeepsIncumbent) {
  const auto r = parse_raw_solution(
      "Model status\nTime limit reached\n\n# Primal solution values\nFeasible\nObjective 5\n# Columns 1\nx 5\n");
  EXPECT_EQ(r.status, SolveStatus::time_limit);
  EXPECT_EQ(r.values.at("x"), 5.0);
}

TEST(SolutionParser, Cbc) {
  const auto r = parse_raw_solution(
      "Optimal - objective value 2.00000000\n      0 x                      2                       0\n"
      "      2 z                      1                       0\n");
  EXPECT_EQ(r.status, SolveStatus::optimal);
  EXPECT_EQ(r.objective, 2.0);
  EXPECT_TRUE(r.sparse);
  EXPECT_EQ(r.values.count("y"), 0u);
  const auto inf = parse_raw_solution("Infeasible - objective value 0.00000000\n");
  EXPECT_EQ(inf.status, SolveStatus::infeasible);
}

TEST(SolutionParser, Garbage) {
  EXPECT_THROW(parse_raw_solution(""), ParseError);
  EXPECT_THROW(parse_raw_solution("Model status\nOptimal\n# Primal solution values\nFeasible\nObjective x\n"),
               ParseError);
  EXPECT_THROW(parse_raw_solution("Optimal - objective value 1\n 0 x\n"), ParseError);
}

TEST(ModelBuilder, ShapeAndHourSplit) {
  const auto inst = small_instance();
  const auto full = build_model(inst);
  const auto h0 = build_model(inst, 0);
  EXPECT_EQ(full.hours, (std::vector<int>{0, 1}));
  EXPECT_EQ(h0.hours, (std::vector<int>{0}));
  EXPECT_EQ(full.lp.var_count(), 2 * h0.lp.var_count());
  EXPECT_EQ(full.lp.row_count(), 2 * h0.lp.row_count());
  EXPECT_NO_THROW(full.lp.validate());
  EXPECT_THROW(build_model(small_instance(fixtures::solar_with_esd()), 0), Error);
}

TEST(ModelBuilder, EsdAddsEnergyColumns) {
  const auto vm = build_model(small_instance(fixtures::solar_with_esd()));
  for (int h = 0; h < 2; ++h)
    for (int g = 0; g < 2; ++g) {
      EXPECT_GE(vm.index.soc[h][g], 0);
      EXPECT_GE(vm.index.charge[h][g], 0);
      EXPECT_GE(vm.index.drawn[h][g], 0);
    }
}

TEST(ParseSolution, MissingVariableIsNamed) {
  const auto inst = small_instance();
  const auto vm = build_model(inst);
  RawSolution raw;
  raw.status = SolveStatus::optimal;
  raw.values["nothing"] = 0;
  try {
    parse_solution(raw, vm, inst);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("missing variable"), std::string::npos);
  }
}

TEST(ParseSolution, FractionalIntegerRejected) {
  const auto inst = small_instance();
  const auto vm = build_model(inst);
  const auto names = mps_names(vm.lp);
  RawSolution raw;
  raw.status = SolveStatus::optimal;
  for (const auto& n : names.columns) raw.values[n] = 0;
  for (int c = 0; c < vm.lp.var_count(); ++c)
    if (vm.lp.vars()[c].integer) {
      raw.values[names.columns[c]] = 0.5;
      break;
    }
  EXPECT_THROW(parse_solution(raw, vm, inst), SolverError);
}

TEST(ParseSolution, FlowNoiseIsDropped) {
  const auto inst = small_instance();
  const auto vm = build_model(inst);
  const auto names = mps_names(vm.lp);
  RawSolution raw;
  raw.status = SolveStatus::optimal;
  for (const auto& n : names.columns) raw.values[n] = 0;
  for (int h = 0; h < 2; ++h) {
    raw.values[names.columns[vm.index.afdc[h][0]]] = 10.0000000003;
    raw.values[names.columns[vm.index.cdc[h][0][0]]] = 7.9999999996;
    raw.values[names.columns[vm.index.afdc[h][1]]] = 18;
  }
  const auto plan = parse_solution(raw, vm, inst);
  for (int h = 0; h < 2; ++h) {
    EXPECT_EQ(plan.hours[h].groups[0].afdc_gbps, 10.0);
    EXPECT_EQ(plan.hours[h].groups[0].cdc_gbps[0], 8.0);
  }
}

TEST(ParseSolution, InfeasibleStatus) {
  const auto inst = small_instance();
  const auto vm = build_model(inst);
  RawSolution raw;
  raw.status = SolveStatus::infeasible;
  EXPECT_THROW(parse_solution(raw, vm, inst), InfeasibleError);
}

TEST(Solver, NotConfigured) {
  SolverOptions o;
  EXPECT_THROW(invoke_solver(tiny_model(), o), SolverNotConfigured);
}

TEST(Solver, FailingCommands) {
  SolverOptions o;
  o.command = "exit 3";
  EXPECT_THROW(invoke_solver(tiny_model(), o), SolverError);
  o.command = "vodfog-no-such-solver {model}";
  EXPECT_THROW(invoke_solver(tiny_model(), o), SolverError);
  o.command = "true";
  EXPECT_THROW(invoke_solver(tiny_model(), o), SolverError);
  o.command = "echo junk > {solution}";
  EXPECT_THROW(invoke_solver(tiny_model(), o), SolverError);
}

TEST(Solver, CannedSolutionThroughShell) {
  SolverOptions o;
  o.command = "printf 'Model status\\nOptimal\\n\\n# Primal solution values\\nFeasible\\nObjective 2\\n# Columns 3\\n"
              "x 2\\ny 0\\nz 1\\n' > {solution}";
  const auto r = invoke_solver(tiny_model(), o);
  EXPECT_EQ(r.status, SolveStatus::optimal);
  EXPECT_EQ(r.values.at("x"), 2.0);
}

TEST(Solver, KilledAfterTimeLimit) {
  SolverOptions o;
  o.command = "sleep 30";
  o.time_limit_s = 0.2;
  o.grace_s = 0.3;
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(invoke_solver(tiny_model(), o), SolverTimeout);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
}

TEST(Solver, TinyModelOptimum) {
  REQUIRE_SOLVER();
  SolverOptions o;
  o.command = solver_cmd();
  const auto r = invoke_solver(tiny_model(), o);
  EXPECT_EQ(r.status, SolveStatus::optimal);
  EXPECT_NEAR(*r.objective, 2.0, 1e-9);
}

TEST(Solver, SmallInstanceMatchesBruteForce) {
  REQUIRE_SOLVER();
  SolverOptions o;
  o.command = solver_cmd();
  for (const auto& sc : {ScenarioConfig{}, fixtures::solar_with_esd(5)}) {
    auto inst = small_instance(sc, 2, 18);
    const auto r = solve(inst, o);
    EXPECT_EQ(r.status, SolveStatus::optimal);
    EXPECT_TRUE(verify_plan(r.plan, inst).empty());
    const double exact = evaluate_plan(brute_force(inst), inst).brown_kwh();
    EXPECT_NEAR(evaluate_plan(r.plan, inst).brown_kwh(), exact, 1e-6 * std::max(1.0, exact));
  }
}

TEST(Solver, InfeasibleDemandReported) {
  REQUIRE_SOLVER();
  SolverOptions o;
  o.command = solver_cmd();
  ScenarioConfig sc;
  sc.use_cdc = false;
  sc.use_mfdc = false;
  auto inst = small_instance(sc, 1, 500);  // above one AFDC's capacity
  EXPECT_THROW(solve(inst, o), InfeasibleError);
}
