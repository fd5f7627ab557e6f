#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "vodfog/study.hpp"

using namespace vodfog;

namespace {

const std::string kTopo = "topology = " + (fixtures::source_dir() / "data/nsfnet.topo").string() + "\n";

RunConfig cfg_text(const std::string& rest) { return load_config_text(kTopo + rest, fixtures::source_dir()); }

StudyOptions greedy() {
  StudyOptions o;
  o.engine = Engine::greedy;
  return o;
}

Breakdown random_breakdown(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1e5);
  Breakdown b;
  b.core = u(rng) / 3;
  b.core_floor = u(rng);
  b.metro = u(rng) / 7;
  b.access = u(rng);
  b.dc = {u(rng) / 11, u(rng), 0.1};
  b.brown = u(rng);
  b.renewable = u(rng) / 13;
  return b;
}

bool same(const Breakdown& a, const Breakdown& b) {
  return a.core == b.core && a.core_floor == b.core_floor && a.metro == b.metro && a.access == b.access &&
         a.dc == b.dc && a.brown == b.brown && a.renewable == b.renewable;
}

}  // namespace

TEST(Config, CalibrationLoads) {
  const auto cfg = load_config(fixtures::source_dir() / "configs/calibration.conf");
  EXPECT_EQ(cfg.topo.node_count(), 14);
  EXPECT_EQ(cfg.sites.cdc_count(), 5);
  EXPECT_EQ(cfg.demand.at(0, 21), 300.0);
  EXPECT_EQ(cfg.scenario.afdc_source, EnergySource::solar);
  EXPECT_EQ(cfg.scenario.solar_array.area_m2, 250.0);
  EXPECT_EQ(cfg.study_esd.eta_charge, 0.7225);
  EXPECT_FALSE(cfg.scenario.esd.has_value());
  EXPECT_NO_THROW(cfg.instance());
}

TEST(Config, SyntheticDemandAndDefaults) {
  const auto cfg = cfg_text("demand_peak_gbps = 80\ndemand_shape = flat\n");
  EXPECT_EQ(cfg.sites.cdc_count(), 5);
  EXPECT_EQ(cfg.demand.at(3, 5), 80.0);
  EXPECT_EQ(cfg.scenario.cdc_source, EnergySource::brown);
}

TEST(Config, OverridesAndSweepGrid) {
  const auto cfg = cfg_text(
      "demand_peak_gbps = 10\npue_af = 1.3\nafdc_source = solar\nesd = on\ninitial_soc_kwh = 5\ncyclic_esd = off\n"
      "sweep_pue_af = 1.1, 1.4\n");
  EXPECT_EQ(cfg.params.pue_af, 1.3);
  ASSERT_TRUE(cfg.scenario.esd.has_value());
  EXPECT_EQ(cfg.scenario.initial_soc_kwh, 5.0);
  EXPECT_FALSE(cfg.scenario.cyclic_esd);
  EXPECT_EQ(cfg.sweep_pue_af, (std::vector<double>{1.1, 1.4}));
}

TEST(Config, Errors) {
  EXPECT_THROW(cfg_text("demand_peak_gbps = 1\nbogus = 3\n"), ParseError);
  EXPECT_THROW(cfg_text("demand_peak_gbps = 1\ndemand_peak_gbps = 2\n"), ParseError);
  EXPECT_THROW(cfg_text("demand_peak_gbps = 1\ndemand = data/calibration/demand.csv\n"), ParseError);
  EXPECT_THROW(cfg_text("demand_peak_gbps = 1\npue_af = 0.5\n"), ValidationError);
  EXPECT_THROW(cfg_text("demand_peak_gbps = 1\nsweep_pue_mf = 1.1, 0.9\n"), ValidationError);
  EXPECT_THROW(cfg_text("demand_peak_gbps = 1\nesd_eta_charge = 1.5\n"), ValidationError);
  EXPECT_THROW(cfg_text("demand = data/none.csv\n"), ParseError);
  EXPECT_THROW(load_config_text("demand_peak_gbps = 1\n", fixtures::source_dir()), ParseError);
  EXPECT_THROW(load_config(fixtures::source_dir() / "no/such.conf"), ParseError);
}

TEST(Config, ScenarioBuilders) {
  const auto cfg = load_config(fixtures::source_dir() / "configs/calibration.conf");
  const auto base = baseline_scenario();
  EXPECT_FALSE(base.use_mfdc || base.use_afdc);
  const auto b = solar_scenario(cfg);
  EXPECT_EQ(b.cdc_source, EnergySource::renewable);
  EXPECT_EQ(b.afdc_source, EnergySource::solar);
  EXPECT_FALSE(b.esd.has_value());
  const auto c = battery_scenario(cfg);
  ASSERT_TRUE(c.esd.has_value());
  EXPECT_EQ(c.esd->e_max_kwh, 100.0);
}

TEST(StudyCsv, BreakdownRoundTripIsExact) {
  std::mt19937_64 rng(11);
  PlanEvaluation e;
  for (int h = 0; h < 24; ++h) e.hourly_w.push_back(random_breakdown(rng));
  const auto back = load_breakdown_csv(emit_breakdown_csv(e));
  ASSERT_EQ(back.size(), 24u);
  for (int h = 0; h < 24; ++h) EXPECT_TRUE(same(back[h], e.hourly_w[h])) << h;
  EXPECT_THROW(load_breakdown_csv("hour,core_w\n0,1\n"), ParseError);
}

TEST(StudyCsv, ProfileRoundTrip) {
  std::mt19937_64 rng(12);
  std::vector<ProfileSeries> s{{"baseline", {}}, {"solar", {}}};
  for (auto& x : s)
    for (int h = 0; h < 3; ++h) x.hourly_w.push_back(random_breakdown(rng));
  const auto back = load_profile_csv(emit_profile_csv(s));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].config, "solar");
  for (int h = 0; h < 3; ++h) EXPECT_TRUE(same(back[1].hourly_w[h], s[1].hourly_w[h]));
}

TEST(StudyCsv, SweepAndSavingsRoundTrip) {
  const std::vector<SweepRow> rows{{1.1, 1.2, 1234.5678, {70.1, 2.2, 27.7}}, {1.2, 1.3, 1e-3, {0, 0, 100}}};
  EXPECT_EQ(load_sweep_csv(emit_sweep_csv(rows)), rows);
  const std::vector<SavingsRow> sv{{"solar_vs_baseline", 100.25, 67.125, 33.0423}};
  const auto back = load_savings_csv(emit_savings_csv(sv));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].comparison, "solar_vs_baseline");
  EXPECT_EQ(back[0].pct, 33.0423);
}

TEST(Study, SavingsNeedABaseline) {
  PlanEvaluation zero, some;
  some.daily_kwh.core = 10;
  EXPECT_THROW(transport_savings_pct(zero, some), Error);
  EXPECT_DOUBLE_EQ(transport_savings_pct(some, zero), 100.0);
}

TEST(Study, TierSharesSumToHundred) {
  const auto cfg = load_config(fixtures::source_dir() / "configs/calibration.conf");
  const auto r = run_plan(cfg.instance(), greedy());
  const auto s = tier_shares(r.plan);
  EXPECT_NEAR(s.afdc + s.mfdc + s.cdc, 100.0, 1e-9);
  EXPECT_EQ(r.status, "heuristic");
}

TEST(Study, GreedyScenarioStudy) {
  const auto cfg = load_config(fixtures::source_dir() / "configs/calibration.conf");
  const auto s = run_scenarios(cfg, true, greedy());
  ASSERT_TRUE(s.battery.has_value());
  EXPECT_GT(s.solar_vs_baseline_pct, 0);
  EXPECT_GE(*s.battery_vs_solar_pct, 0);
  const auto rows = savings_rows(s);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2].comparison, "battery_vs_baseline");
}

TEST(Study, SweepRowsInGridOrderAndMonotone) {
  auto cfg = cfg_text("demand_peak_gbps = 120\nsweep_pue_mf = 1.1, 1.2\nsweep_pue_af = 1.1, 1.2, 1.3\n");
  const auto rows = sweep_pue(cfg, greedy(), 3);
  ASSERT_EQ(rows.size(), 6u);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(rows[i].pue_mf, cfg.sweep_pue_mf[i / 3]);
    EXPECT_EQ(rows[i].pue_af, cfg.sweep_pue_af[i % 3]);
  }
  for (int i = 0; i < 6; i += 3) {
    EXPECT_LE(rows[i].brown_kwh, rows[i + 1].brown_kwh + 1e-9);
    EXPECT_LE(rows[i + 1].brown_kwh, rows[i + 2].brown_kwh + 1e-9);
  }
  // A single worker gives the same table.
  EXPECT_EQ(sweep_pue(cfg, greedy(), 1), rows);
}
