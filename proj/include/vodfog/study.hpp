#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "vodfog/config.hpp"
#include "vodfog/evaluate.hpp"
#include "vodfog/heuristic.hpp"
#include "vodfog/milp/extract.hpp"
#include "vodfog/verify.hpp"

namespace vodfog {

// A plan that failed verify_plan.
class VerificationError : public Error {
 public:
  explicit VerificationError(std::vector<Violation> v)
      : Error(describe(v)), violations_(std::move(v)) {}
  const std::vector<Violation>& violations() const noexcept { return violations_; }

  static std::string describe(const std::vector<Violation>& v) {
    std::string out = std::to_string(v.size()) + " violation(s)";
    for (std::size_t i = 0; i < v.size() && i < 5; ++i)
      out += "; " + v[i].constraint + " at " + v[i].entity + (v[i].hour >= 0 ? " hour " + std::to_string(v[i].hour) : "");
    return out;
  }

 private:
  std::vector<Violation> violations_;
};

enum class Engine { milp, greedy };

struct StudyOptions {
  Engine engine = Engine::milp;
  milp::SolverOptions solver;
};

struct PlanRun {
  PlacementPlan plan;
  PlanEvaluation eval;
  std::string status;  // solver status, or "heuristic"
  double seconds = 0;
};

// Solves (or greedily places) one instance and rejects plans the verifier flags.
inline PlanRun run_plan(const Instance& inst, const StudyOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  PlanRun r;
  if (opt.engine == Engine::greedy) {
    r.plan = greedy_place(inst);
    milp::canonicalize_plan(r.plan, inst);
    r.status = "heuristic";
  } else {
    auto s = milp::solve(inst, opt.solver);
    r.plan = std::move(s.plan);
    r.status = milp::to_string(s.status);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (auto v = verify_plan(r.plan, inst); !v.empty()) throw VerificationError(std::move(v));
  r.eval = evaluate_plan(r.plan, inst);
  return r;
}

// Relative transport-network reduction, in percent.
inline double transport_savings_pct(const PlanEvaluation& base, const PlanEvaluation& cand) {
  const double b = base.transport_kwh();
  if (b <= 0) throw Error("baseline transport energy is zero; savings undefined");
  return 100.0 * (b - cand.transport_kwh()) / b;
}

struct ScenarioStudy {
  PlanRun baseline;
  PlanRun solar;
  std::optional<PlanRun> battery;
  double solar_vs_baseline_pct = 0;
  std::optional<double> battery_vs_solar_pct;
  std::optional<double> battery_vs_baseline_pct;
};

inline ScenarioStudy run_scenarios(const RunConfig& cfg, bool with_battery, const StudyOptions& opt) {
  ScenarioStudy s;
  s.baseline = run_plan(cfg.instance(baseline_scenario(), cfg.params), opt);
  s.solar = run_plan(cfg.instance(solar_scenario(cfg), cfg.params), opt);
  s.solar_vs_baseline_pct = transport_savings_pct(s.baseline.eval, s.solar.eval);
  if (with_battery) {
    s.battery = run_plan(cfg.instance(battery_scenario(cfg), cfg.params), opt);
    s.battery_vs_solar_pct = transport_savings_pct(s.solar.eval, s.battery->eval);
    s.battery_vs_baseline_pct = transport_savings_pct(s.baseline.eval, s.battery->eval);
  }
  return s;
}

// Percent of the day's demand (Gbps-hours) served by each tier.
struct TierShares {
  double afdc = 0, mfdc = 0, cdc = 0;
};

inline TierShares tier_shares(const PlacementPlan& plan) {
  double a = 0, m = 0, c = 0;
  for (const auto& hour : plan.hours)
    for (const auto& f : hour.groups) {
      a += f.afdc_gbps;
      m += f.mfdc_gbps;
      c += f.cdc_total();
    }
  const double total = a + m + c;
  if (total <= 0) return {};
  return {100 * a / total, 100 * m / total, 100 * c / total};
}

struct SweepRow {
  double pue_mf = 0, pue_af = 0;
  double brown_kwh = 0;
  TierShares shares;
  bool operator==(const SweepRow& o) const {
    return pue_mf == o.pue_mf && pue_af == o.pue_af && brown_kwh == o.brown_kwh && shares.afdc == o.shares.afdc &&
           shares.mfdc == o.shares.mfdc && shares.cdc == o.shares.cdc;
  }
};

// All-brown placement over a pue_mf x pue_af grid. Points run on a small
// worker pool; rows come back in grid order (pue_mf major).
inline std::vector<SweepRow> sweep_pue(const RunConfig& cfg, const StudyOptions& opt, unsigned workers = 0) {
  std::vector<SweepRow> rows;
  for (double mf : cfg.sweep_pue_mf)
    for (double af : cfg.sweep_pue_af) rows.push_back({mf, af, 0, {}});
  ScenarioConfig sc = cfg.scenario;
  sc.cdc_source = sc.mfdc_source = sc.afdc_source = EnergySource::brown;
  sc.esd.reset();
  if (workers == 0) workers = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  workers = std::min<unsigned>(workers, static_cast<unsigned>(rows.size()));
  std::vector<std::exception_ptr> errors(rows.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        PowerParams p = cfg.params;
        p.pue_mf = rows[i].pue_mf;
        p.pue_af = rows[i].pue_af;
        validate(p);
        const PlanRun r = run_plan(cfg.instance(sc, p), opt);
        rows[i].brown_kwh = r.eval.brown_kwh();
        rows[i].shares = tier_shares(r.plan);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

// ---- CSV codecs --------------------------------------------------------

inline constexpr std::string_view kBreakdownColumns =
    "hour,core_w,core_floor_w,metro_w,access_w,cdc_w,mfdc_w,afdc_w,brown_w,renewable_w";

namespace detail {

inline std::string breakdown_fields(int h, const Breakdown& b) {
  using text::format_exact;
  return std::to_string(h) + ',' + format_exact(b.core) + ',' + format_exact(b.core_floor) + ',' +
         format_exact(b.metro) + ',' + format_exact(b.access) + ',' + format_exact(b.dc_at(Tier::cdc)) + ',' +
         format_exact(b.dc_at(Tier::mfdc)) + ',' + format_exact(b.dc_at(Tier::afdc)) + ',' + format_exact(b.brown) +
         ',' + format_exact(b.renewable);
}

inline Breakdown breakdown_from(const std::vector<std::string>& f, std::size_t at, int line) {
  std::vector<double> v;
  for (std::size_t i = at; i < at + 9; ++i) v.push_back(text::require_double(f[i], "breakdown field", line));
  Breakdown b;
  b.core = v[0];
  b.core_floor = v[1];
  b.metro = v[2];
  b.access = v[3];
  b.dc = {v[4], v[5], v[6]};
  b.brown = v[7];
  b.renewable = v[8];
  return b;
}

inline std::vector<std::vector<std::string>> csv_rows(std::string_view doc, std::string_view header) {
  const auto ls = text::lines(doc);
  if (ls.empty() || text::trim(ls[0]) != header) throw ParseError("expected header '" + std::string(header) + "'", 1);
  const std::size_t width = text::split(header, ',').size();
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (text::trim(ls[i]).empty()) continue;
    auto f = text::split(text::trim(ls[i]), ',');
    if (f.size() != width)
      throw ParseError("expected " + std::to_string(width) + " fields", static_cast<int>(i + 1));
    out.push_back(std::move(f));
  }
  return out;
}

inline int require_hour(const std::string& s, int line) {
  long long h = 0;
  if (!text::parse_int(s, h) || h < 0) throw ParseError("bad hour '" + s + "'", line);
  return static_cast<int>(h);
}

}  // namespace detail

// Hourly power by component, in W.
inline std::string emit_breakdown_csv(const PlanEvaluation& e) {
  std::string out(kBreakdownColumns);
  out += '\n';
  for (std::size_t h = 0; h < e.hourly_w.size(); ++h) out += detail::breakdown_fields(static_cast<int>(h), e.hourly_w[h]) + '\n';
  return out;
}

inline std::vector<Breakdown> load_breakdown_csv(std::string_view doc) {
  std::vector<Breakdown> out;
  int line = 1;
  for (const auto& f : detail::csv_rows(doc, kBreakdownColumns)) {
    ++line;
    if (detail::require_hour(f[0], line) != static_cast<int>(out.size())) throw ParseError("hours out of order", line);
    out.push_back(detail::breakdown_from(f, 1, line));
  }
  return out;
}

// Hourly breakdowns of several configurations stacked in one table.
struct ProfileSeries {
  std::string config;
  std::vector<Breakdown> hourly_w;
};

inline std::string emit_profile_csv(const std::vector<ProfileSeries>& series) {
  std::string out = "config," + std::string(kBreakdownColumns) + '\n';
  for (const auto& s : series)
    for (std::size_t h = 0; h < s.hourly_w.size(); ++h)
      out += s.config + ',' + detail::breakdown_fields(static_cast<int>(h), s.hourly_w[h]) + '\n';
  return out;
}

inline std::vector<ProfileSeries> load_profile_csv(std::string_view doc) {
  std::vector<ProfileSeries> out;
  int line = 1;
  for (const auto& f : detail::csv_rows(doc, "config," + std::string(kBreakdownColumns))) {
    ++line;
    if (out.empty() || out.back().config != f[0]) out.push_back({f[0], {}});
    if (detail::require_hour(f[1], line) != static_cast<int>(out.back().hourly_w.size()))
      throw ParseError("hours out of order", line);
    out.back().hourly_w.push_back(detail::breakdown_from(f, 2, line));
  }
  return out;
}

inline constexpr std::string_view kSweepColumns = "pue_mf,pue_af,brown_kwh,afdc_share,mfdc_share,cdc_share";

inline std::string emit_sweep_csv(const std::vector<SweepRow>& rows) {
  using text::format_exact;
  std::string out(kSweepColumns);
  out += '\n';
  for (const auto& r : rows)
    out += format_exact(r.pue_mf) + ',' + format_exact(r.pue_af) + ',' + format_exact(r.brown_kwh) + ',' +
           format_exact(r.shares.afdc) + ',' + format_exact(r.shares.mfdc) + ',' + format_exact(r.shares.cdc) + '\n';
  return out;
}

inline std::vector<SweepRow> load_sweep_csv(std::string_view doc) {
  std::vector<SweepRow> out;
  int line = 1;
  for (const auto& f : detail::csv_rows(doc, kSweepColumns)) {
    ++line;
    auto num = [&](int i) { return text::require_double(f[i], "sweep field", line); };
    out.push_back({num(0), num(1), num(2), {num(3), num(4), num(5)}});
  }
  return out;
}

inline constexpr std::string_view kSavingsColumns = "comparison,base_kwh,candidate_kwh,transport_savings_pct";

struct SavingsRow {
  std::string comparison;
  double base_kwh = 0, candidate_kwh = 0, pct = 0;
};

inline std::vector<SavingsRow> savings_rows(const ScenarioStudy& s) {
  std::vector<SavingsRow> out{{"solar_vs_baseline", s.baseline.eval.transport_kwh(), s.solar.eval.transport_kwh(),
                               s.solar_vs_baseline_pct}};
  if (s.battery) {
    out.push_back({"battery_vs_solar", s.solar.eval.transport_kwh(), s.battery->eval.transport_kwh(),
                   *s.battery_vs_solar_pct});
    out.push_back({"battery_vs_baseline", s.baseline.eval.transport_kwh(), s.battery->eval.transport_kwh(),
                   *s.battery_vs_baseline_pct});
  }
  return out;
}

inline std::string emit_savings_csv(const std::vector<SavingsRow>& rows) {
  using text::format_exact;
  std::string out(kSavingsColumns);
  out += '\n';
  for (const auto& r : rows)
    out += r.comparison + ',' + format_exact(r.base_kwh) + ',' + format_exact(r.candidate_kwh) + ',' + format_exact(r.pct) + '\n';
  return out;
}

inline std::vector<SavingsRow> load_savings_csv(std::string_view doc) {
  std::vector<SavingsRow> out;
  int line = 1;
  for (const auto& f : detail::csv_rows(doc, kSavingsColumns)) {
    ++line;
    auto num = [&](int i) { return text::require_double(f[i], "savings field", line); };
    out.push_back({f[0], num(1), num(2), num(3)});
  }
  return out;
}

inline std::string emit_violations_csv(const std::vector<Violation>& v) {
  std::string out = "hour,entity,constraint,slack\n";
  for (const auto& x : v)
    out += std::to_string(x.hour) + ',' + x.entity + ',' + x.constraint + ',' + text::format_exact(x.slack) + '\n';
  return out;
}

}  // namespace vodfog
