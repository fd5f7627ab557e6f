#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vodfog/error.hpp"
#include "vodfog/evaluate.hpp"
#include "vodfog/plan.hpp"
#include "vodfog/scenario.hpp"

namespace vodfog {

namespace detail {

inline constexpr double kInfCost = std::numeric_limits<double>::infinity();

// Option a group can be served from: AFDC, its node's MFDC, or CDC index c.
struct ServeOption {
  Tier tier;
  int cdc = -1;
};

// Incremental cost bookkeeping for one hour of greedy placement.
class HourState {
 public:
  HourState(const Instance& inst, std::vector<double> free_kwh)
      : inst_(inst), p_(inst.params()), free_kwh_(std::move(free_kwh)) {
    const auto& topo = inst.topo();
    const int N = topo.node_count(), C = inst.sites().cdc_count();
    flows_.assign(topo.group_count(), GroupFlow{0, 0, std::vector<double>(C, 0.0)});
    mfdc_.assign(N, 0.0);
    metro_.assign(N, 0.0);
    cdc_.assign(C, 0.0);
    pair_.assign(static_cast<std::size_t>(C) * N, 0.0);
    arc_w_.assign(topo.arc_count(), 0);
  }

  const std::vector<GroupFlow>& flows() const { return flows_; }

  double room(int g, const ServeOption& o) const {
    const auto& f = flows_[g];
    switch (o.tier) {
      case Tier::afdc:
        return std::max(0.0, std::min(p_.tier_capacity_gbps(Tier::afdc), p_.olt_afdc_capacity_gbps) - f.afdc_gbps);
      case Tier::mfdc: return std::max(0.0, p_.tier_capacity_gbps(Tier::mfdc) - mfdc_[inst_.topo().home_node(g)]);
      case Tier::cdc: break;
    }
    return std::max(0.0, p_.tier_capacity_gbps(Tier::cdc) - cdc_[o.cdc]);
  }

  // Brown W added by moving q more Gbps of group g onto option o; infinite
  // when the core cannot carry it.
  double delta(int g, const ServeOption& o, double q) const {
    const auto& f = flows_[g];
    const int node = inst_.topo().home_node(g);
    double d = 0;
    const double up = f.mfdc_gbps + f.cdc_total();
    if (o.tier == Tier::afdc) {
      d += afdc_brown(g, f.afdc_gbps + q) - afdc_brown(g, f.afdc_gbps);
      d += olt_w(f.afdc_gbps + q, up) - olt_w(f.afdc_gbps, up);
      return d;
    }
    d += olt_w(f.afdc_gbps, up + q) - olt_w(f.afdc_gbps, up);
    d += p_.pue_n * (metro_node_it_w(metro_[node] + q, p_) - metro_node_it_w(metro_[node], p_));
    if (o.tier == Tier::mfdc) return d + dc_brown(Tier::mfdc, mfdc_[node] + q) - dc_brown(Tier::mfdc, mfdc_[node]);
    d += dc_brown(Tier::cdc, cdc_[o.cdc] + q) - dc_brown(Tier::cdc, cdc_[o.cdc]);
    const int src = inst_.sites().cdc_nodes[o.cdc];
    if (src == node) return d;
    const double t = pair_[pair_index(o.cdc, node)];
    const auto extra = step_count(t + q, p_.wavelength_capacity_gbps) - step_count(t, p_.wavelength_capacity_gbps);
    if (extra == 0) return d;
    d += static_cast<double>(extra) * wavelength_w(src, node);
    for (int arc : inst_.routes().arcs(src, node)) {
      const auto before = fibres(arc_w_[arc]);
      const auto after = fibres(arc_w_[arc] + extra);
      if (after > inst_.topo().links()[arc / 2].fibres) return kInfCost;
      d += static_cast<double>(after - before) * edfa_per_fibre_w(arc);
    }
    return d;
  }

  void apply(int g, const ServeOption& o, double q) {
    auto& f = flows_[g];
    const int node = inst_.topo().home_node(g);
    if (o.tier == Tier::afdc) {
      f.afdc_gbps += q;
      return;
    }
    metro_[node] += q;
    if (o.tier == Tier::mfdc) {
      f.mfdc_gbps += q;
      mfdc_[node] += q;
      return;
    }
    f.cdc_gbps[o.cdc] += q;
    cdc_[o.cdc] += q;
    const int src = inst_.sites().cdc_nodes[o.cdc];
    if (src == node) return;
    double& t = pair_[pair_index(o.cdc, node)];
    const auto extra = step_count(t + q, p_.wavelength_capacity_gbps) - step_count(t, p_.wavelength_capacity_gbps);
    t += q;
    for (int arc : inst_.routes().arcs(src, node)) arc_w_[arc] += extra;
  }

  // Headroom before any step count touched by option o rises.
  double slack(int g, const ServeOption& o) const {
    const auto& f = flows_[g];
    const int node = inst_.topo().home_node(g);
    auto gap = [](double load, double unit) {
      return std::max(0.0, static_cast<double>(step_count(load, unit)) * unit - load);
    };
    const double up = f.mfdc_gbps + f.cdc_total();
    if (o.tier == Tier::afdc)
      return std::min({gap(f.afdc_gbps, p_.server_capacity_gbps), gap(f.afdc_gbps, p_.access_switch_bitrate_gbps),
                       gap(f.afdc_gbps, p_.router_port_bitrate_gbps), gap(f.afdc_gbps, p_.olt_afdc_capacity_gbps)});
    double s = std::min({gap(up, p_.olt_metro_capacity_gbps), gap(metro_[node], p_.switch_bitrate_gbps),
                         gap(metro_[node], p_.router_port_bitrate_gbps)});
    const double load = o.tier == Tier::mfdc ? mfdc_[node] : cdc_[o.cdc];
    s = std::min({s, gap(load, p_.server_capacity_gbps), gap(load, p_.switch_bitrate_gbps),
                  gap(load, p_.router_port_bitrate_gbps)});
    if (o.tier == Tier::cdc && inst_.sites().cdc_nodes[o.cdc] != node)
      s = std::min(s, gap(pair_[pair_index(o.cdc, node)], p_.wavelength_capacity_gbps));
    return s;
  }

  // Largest extra AFDC load whose facility power the free energy still covers.
  double solar_covered(int g) const {
    const double a = flows_[g].afdc_gbps;
    const double cap = a + room(g, {Tier::afdc});
    const double budget = 1000.0 * free_kwh_[g];
    if (budget <= 0 || dc_power(Tier::afdc, cap, p_) <= budget) return budget <= 0 ? 0.0 : cap - a;
    double lo = a, hi = cap;
    if (dc_power(Tier::afdc, lo, p_) > budget) return 0.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (dc_power(Tier::afdc, mid, p_) <= budget ? lo : hi) = mid;
    }
    return lo - a;
  }

 private:
  std::size_t pair_index(int c, int node) const {
    return static_cast<std::size_t>(c) * inst_.topo().node_count() + node;
  }
  std::int64_t fibres(std::int64_t w) const { return (w + p_.wavelengths_per_fibre - 1) / p_.wavelengths_per_fibre; }
  double wavelength_w(int src, int dst) const {
    const double regens = std::floor(inst_.routes().km(src, dst) / p_.regen_reach_km);
    return p_.pue_n * (2 * p_.core_router_port_w + 2 * p_.transponder_w + regens * p_.regenerator_w);
  }
  double edfa_per_fibre_w(int arc) const {
    const double km = inst_.topo().links()[arc / 2].km;
    return p_.pue_n * (std::floor(km / p_.edfa_span_km) + 1) * p_.edfa_w;
  }
  double olt_w(double afdc, double up) const {
    return p_.pue_n * p_.olt_w * static_cast<double>(olt_count({afdc, up}, p_));
  }
  double dc_brown(Tier t, double load) const {
    if (inst_.scenario().source(t) == EnergySource::renewable) return 0.0;
    return dc_power(t, load, p_);
  }
  double afdc_brown(int g, double load) const {
    const auto src = inst_.scenario().afdc_source;
    if (src == EnergySource::renewable) return 0.0;
    const double w = dc_power(Tier::afdc, load, p_);
    if (src == EnergySource::solar) return std::max(0.0, w - 1000.0 * free_kwh_[g]);
    return w;
  }

  const Instance& inst_;
  const PowerParams& p_;
  std::vector<double> free_kwh_;
  std::vector<GroupFlow> flows_;
  std::vector<double> mfdc_, metro_, cdc_, pair_;
  std::vector<std::int64_t> arc_w_;
};

struct TierMask {
  bool afdc = true, mfdc = true, cdc = true;
};

// Places one hour by repeatedly committing the (group, option, chunk) with the
// lowest added brown power per Gbps.
inline std::vector<GroupFlow> greedy_hour(const Instance& inst, int h, const std::vector<double>& free_kwh,
                                          TierMask mask) {
  const auto& topo = inst.topo();
  HourState st(inst, free_kwh);
  std::vector<double> left(topo.group_count());
  for (int g = 0; g < topo.group_count(); ++g) left[g] = inst.demand().at(g, h);
  std::vector<std::vector<ServeOption>> options(topo.group_count());
  for (int g = 0; g < topo.group_count(); ++g) {
    if (mask.afdc && inst.afdc_usable(g)) options[g].push_back({Tier::afdc});
    if (mask.mfdc && inst.mfdc_usable(topo.home_node(g))) options[g].push_back({Tier::mfdc});
    if (mask.cdc && inst.cdc_usable())
      for (int c = 0; c < inst.sites().cdc_count(); ++c) options[g].push_back({Tier::cdc, c});
  }
  for (;;) {
    int best_g = -1;
    ServeOption best_o{Tier::cdc};
    double best_q = 0, best_rate = kInfCost;
    for (int g = 0; g < topo.group_count(); ++g) {
      if (left[g] <= kZeroLoad) continue;
      for (const auto& o : options[g]) {
        const double room = std::min(left[g], st.room(g, o));
        if (room <= kZeroLoad) continue;
        std::vector<double> chunks{room, std::min(room, st.slack(g, o))};
        if (o.tier == Tier::afdc && inst.has_solar()) chunks.push_back(std::min(room, st.solar_covered(g)));
        for (double q : chunks) {
          if (q <= kZeroLoad) continue;
          const double rate = st.delta(g, o, q) / q;
          if (rate < best_rate - 1e-12 || (std::abs(rate - best_rate) <= 1e-12 && q > best_q + kZeroLoad)) {
            best_rate = rate;
            best_g = g;
            best_o = o;
            best_q = q;
          }
        }
      }
    }
    if (best_g < 0) break;
    st.apply(best_g, best_o, best_q);
    left[best_g] -= best_q;
    if (left[best_g] < kZeroLoad) left[best_g] = 0;
  }
  for (int g = 0; g < topo.group_count(); ++g)
    if (left[g] > kZeroLoad)
      throw InfeasibleError("greedy cannot place the demand of group '" + topo.groups()[g].name + "' at hour " +
                            std::to_string(h));
  return st.flows();
}

inline double afdc_kwh(const Instance& inst, const GroupFlow& f) {
  return dc_power(Tier::afdc, f.afdc_gbps, inst.params()) / 1000.0;
}

// Serves what the panels can and charges the battery from the surplus,
// hour by hour, for the flows already placed. Leaves discharge at zero.
inline void settle_energy(PlacementPlan& plan, const Instance& inst) {
  if (!inst.has_solar()) return;
  const auto& esd = inst.scenario().esd;
  for (int g = 0; g < inst.topo().group_count(); ++g) {
    if (!inst.afdc_usable(g)) continue;
    double soc = inst.scenario().initial_soc_kwh;
    for (int h = 0; h < plan.hour_count(); ++h) {
      auto& e = plan.hours[h].energy[g];
      const double gen = inst.solar_kwh(h);
      const double load = afdc_kwh(inst, plan.hours[h].groups[g]);
      EnergyDispatch d;
      d.discharge_kwh = std::min(e.dispatch.discharge_kwh, load);
      if (esd) {
        const double drawn = std::min(d.discharge_kwh / esd->eta_discharge, soc);
        d.discharge_kwh = drawn * esd->eta_discharge;
        soc -= drawn;
      }
      d.solar_serve_kwh = std::min(gen, load - d.discharge_kwh);
      const double surplus = gen - d.solar_serve_kwh;
      if (esd && d.discharge_kwh <= kFeasibilityTol && surplus > 0) {
        d.discharge_kwh = 0;
        d.solar_charge_kwh = std::min({surplus, esd->charge_cap(), (esd->e_max_kwh - soc) / esd->eta_charge});
        d.solar_charge_kwh = std::max(0.0, d.solar_charge_kwh);
        soc = std::min(esd->e_max_kwh, soc + d.solar_charge_kwh * esd->eta_charge);
      }
      d.curtailed_kwh = std::max(0.0, gen - d.solar_serve_kwh - d.solar_charge_kwh);
      e.dispatch = d;
      e.soc_kwh = esd ? soc : 0.0;
    }
  }
}

inline PlacementPlan greedy_variant(const Instance& inst, TierMask mask) {
  PlacementPlan plan = zero_plan(inst);
  const int G = inst.topo().group_count();
  for (int h = 0; h < inst.hours(); ++h) {
    std::vector<double> free(G, inst.solar_kwh(h));
    plan.hours[h].groups = greedy_hour(inst, h, free, mask);
  }
  settle_energy(plan, inst);
  if (!inst.has_esd()) return plan;

  // Spend stored energy where the hour is most expensive, one hour at a time,
  // never letting any later state of charge (or the cyclic end state) go short.
  const auto& esd = *inst.scenario().esd;
  const auto ev = evaluate_plan(plan, inst);
  std::vector<int> order(inst.hours());
  for (int h = 0; h < inst.hours(); ++h) order[h] = h;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ev.hourly_w[a].brown > ev.hourly_w[b].brown; });
  for (int h : order) {
    std::vector<double> free(G, inst.solar_kwh(h));
    std::vector<double> drawn(G, 0.0);
    bool any = false;
    for (int g = 0; g < G; ++g) {
      if (!inst.afdc_usable(g)) continue;
      const auto& e = plan.hours[h].energy[g];
      if (e.dispatch.solar_charge_kwh > kFeasibilityTol) continue;
      drawn[g] = e.dispatch.discharge_kwh / esd.eta_discharge;
      double spare = esd.discharge_cap() - drawn[g];
      if (inst.scenario().cyclic_esd)
        spare = std::min(spare, plan.hours.back().energy[g].soc_kwh - inst.scenario().initial_soc_kwh);
      for (int t = h; t < inst.hours(); ++t) spare = std::min(spare, plan.hours[t].energy[g].soc_kwh);
      if (spare <= kFeasibilityTol) continue;
      drawn[g] += spare;
      free[g] += drawn[g] * esd.eta_discharge;
      any = true;
    }
    if (!any) continue;
    PlacementPlan trial = plan;
    trial.hours[h].groups = greedy_hour(inst, h, free, mask);
    for (int g = 0; g < G; ++g) {
      if (!inst.afdc_usable(g) || drawn[g] <= 0) continue;
      const double load = afdc_kwh(inst, trial.hours[h].groups[g]);
      trial.hours[h].energy[g].dispatch.discharge_kwh =
          std::clamp(load - inst.solar_kwh(h), 0.0, drawn[g] * esd.eta_discharge);
    }
    settle_energy(trial, inst);
    if (evaluate_plan(trial, inst).brown_kwh() <= evaluate_plan(plan, inst).brown_kwh() + 1e-9) plan = std::move(trial);
  }
  return plan;
}

}  // namespace detail

// Solver-free heuristic: hour by hour, each group's demand goes to whichever
// serving option adds the least brown power per Gbps; battery energy is then
// spent in the most expensive hours. Returns the best of the unrestricted run
// and single-tier runs.
inline PlacementPlan greedy_place(const Instance& inst) {
  std::optional<PlacementPlan> best;
  double best_brown = detail::kInfCost;
  const detail::TierMask masks[] = {{true, true, true}, {false, false, true}, {false, true, false}, {true, false, false}};
  for (const auto& mask : masks) {
    try {
      PlacementPlan plan = detail::greedy_variant(inst, mask);
      derive_core_traffic(plan, inst);
      const double brown = evaluate_plan(plan, inst).brown_kwh();
      if (brown < best_brown - 1e-9) {
        best_brown = brown;
        plan.objective_kwh = brown;
        best = std::move(plan);
      }
    } catch (const InfeasibleError&) {
    } catch (const CapacityError&) {
    }
  }
  if (!best) throw InfeasibleError("no serving option can carry the demand");
  return *best;
}

// Exhaustive search for tiny instances.
struct BruteForceOptions {
  double granularity_gbps = 1.8;  // demand must be a multiple of this
  double soc_step_kwh = 1.0;      // battery state lattice
  std::size_t budget = 10'000'000;
};

namespace detail {

// All ways to split `units` lattice steps over `k` options, lexicographic.
inline void compositions(int units, int k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (k == 1) {
    cur.push_back(units);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int i = units; i >= 0; --i) {
    cur.push_back(i);
    compositions(units - i, k - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

// Enumerates every lattice split of every hour and, with a battery, every
// charge and discharge on the soc lattice, by dynamic programming over
// (hour, soc of each AFDC). Solar serves as much as the facility draws.
// Throws BudgetError when the state count would exceed the budget.
inline PlacementPlan brute_force(const Instance& inst, const BruteForceOptions& opt = {}) {
  const auto& topo = inst.topo();
  const int G = topo.group_count(), H = inst.hours(), C = inst.sites().cdc_count();
  const double q = opt.granularity_gbps;

  // Per-hour candidate splits.
  struct Split {
    std::vector<GroupFlow> flows;
    double fixed_w = 0;                // brown power outside solar-fed AFDCs
    std::vector<double> afdc_kwh;      // facility energy of each solar-fed AFDC
  };
  std::vector<std::vector<Split>> splits(H);
  std::size_t work = 0;
  for (int h = 0; h < H; ++h) {
    std::vector<std::vector<std::vector<int>>> per_group(G);
    std::vector<std::vector<detail::ServeOption>> opts(G);
    for (int g = 0; g < G; ++g) {
      if (inst.afdc_usable(g)) opts[g].push_back({Tier::afdc});
      if (inst.mfdc_usable(topo.home_node(g))) opts[g].push_back({Tier::mfdc});
      if (inst.cdc_usable())
        for (int c = 0; c < C; ++c) opts[g].push_back({Tier::cdc, c});
      const double d = inst.demand().at(g, h);
      const double units_f = d / q;
      const int units = static_cast<int>(std::llround(units_f));
      if (std::abs(units_f - units) > 1e-9 * std::max(1.0, units_f))
        throw Error("demand of group '" + topo.groups()[g].name + "' is not on the granularity lattice");
      if (units > 0 && opts[g].empty()) throw InfeasibleError("group has demand but no serving option");
      std::vector<int> cur;
      if (units == 0 || opts[g].empty()) per_group[g].push_back(std::vector<int>(opts[g].size(), 0));
      else detail::compositions(units, static_cast<int>(opts[g].size()), cur, per_group[g]);
    }
    std::vector<std::size_t> pick(G, 0);
    for (;;) {
      if (++work > opt.budget) throw BudgetError("brute force exceeds its enumeration budget");
      PlanHour hour = zero_plan(inst).hours[0];
      for (int g = 0; g < G; ++g) {
        const auto& split = per_group[g][pick[g]];
        for (std::size_t i = 0; i < split.size(); ++i) {
          const double gbps = split[i] * q;
          const auto& o = opts[g][i];
          if (o.tier == Tier::afdc) hour.groups[g].afdc_gbps = gbps;
          else if (o.tier == Tier::mfdc) hour.groups[g].mfdc_gbps = gbps;
          else hour.groups[g].cdc_gbps[o.cdc] = gbps;
        }
      }
      derive_core_traffic(hour, inst);
      try {
        // With no energy credited, evaluate_hour charges every AFDC in full.
        const Breakdown b = evaluate_hour(hour, inst);
        Split s{hour.groups, b.brown, std::vector<double>(G, 0.0)};
        bool fits = true;
        const auto loads = aggregate_loads(hour, inst);
        const auto core = core_power_detail(topo, inst.routes(), loads.core, inst.params());
        for (int arc = 0; arc < topo.arc_count(); ++arc) {
          const auto f = (core.arc_wavelengths[arc] + inst.params().wavelengths_per_fibre - 1) /
                         inst.params().wavelengths_per_fibre;
          if (f > topo.links()[arc / 2].fibres) fits = false;
        }
        if (inst.has_solar())
          for (int g = 0; g < G; ++g)
            if (inst.afdc_usable(g)) {
              s.afdc_kwh[g] = detail::afdc_kwh(inst, hour.groups[g]);
              s.fixed_w -= 1000.0 * s.afdc_kwh[g];
            }
        if (fits) splits[h].push_back(std::move(s));
      } catch (const CapacityError&) {
      }
      int g = G - 1;
      while (g >= 0 && ++pick[g] == per_group[g].size()) pick[g--] = 0;
      if (g < 0) break;
    }
    if (splits[h].empty()) throw InfeasibleError("no feasible split at hour " + std::to_string(h));
  }

  // Battery lattice.
  const bool esd = inst.has_esd();
  const auto& sc = inst.scenario();
  std::vector<int> solar_groups;
  if (inst.has_solar())
    for (int g = 0; g < G; ++g)
      if (inst.afdc_usable(g)) solar_groups.push_back(g);
  const int levels = esd ? static_cast<int>(std::floor(sc.esd->e_max_kwh / opt.soc_step_kwh + 1e-9)) + 1 : 1;
  const int S = static_cast<int>(solar_groups.size());
  std::size_t states = 1;
  for (int i = 0; i < S && esd; ++i) states *= static_cast<std::size_t>(levels);
  if (states * static_cast<std::size_t>(H + 1) > opt.budget) throw BudgetError("battery lattice exceeds the budget");
  const int init_level = esd ? static_cast<int>(std::llround(sc.initial_soc_kwh / opt.soc_step_kwh)) : 0;
  if (esd && std::abs(init_level * opt.soc_step_kwh - sc.initial_soc_kwh) > 1e-9)
    throw Error("initial soc is not on the battery lattice");

  auto decode = [&](std::size_t code) {
    std::vector<int> lv(S, 0);
    for (int i = S - 1; i >= 0 && esd; --i) {
      lv[i] = static_cast<int>(code % levels);
      code /= levels;
    }
    return lv;
  };
  auto encode = [&](const std::vector<int>& lv) {
    std::size_t code = 0;
    for (int i = 0; i < S && esd; ++i) code = code * levels + lv[i];
    return code;
  };

  // Per solar group and hour: brown kWh of serving `load` with soc move
  // from level a to level b; infinite if not allowed.
  struct Move {
    double brown_kwh;
    EnergyDispatch d;
  };
  auto energy_move = [&](int h, double load, int a, int b) -> std::optional<Move> {
    const double gen = inst.solar_kwh(h);
    EnergyDispatch d;
    if (esd) {
      const auto& e = *sc.esd;
      const double delta = (b - a) * opt.soc_step_kwh;
      if (delta > 0) {
        const double input = delta / e.eta_charge;
        if (input > gen + 1e-9 || input > e.charge_cap() + 1e-9) return std::nullopt;
        d.solar_charge_kwh = std::min(input, gen);
      } else if (delta < 0) {
        const double drawn = -delta;
        if (drawn > e.discharge_cap() + 1e-9) return std::nullopt;
        d.discharge_kwh = drawn * e.eta_discharge;
        if (d.discharge_kwh > load + 1e-9) return std::nullopt;
      }
    }
    d.solar_serve_kwh = std::clamp(load - d.discharge_kwh, 0.0, gen - d.solar_charge_kwh);
    d.curtailed_kwh = std::max(0.0, gen - d.solar_charge_kwh - d.solar_serve_kwh);
    return Move{load - d.solar_serve_kwh - d.discharge_kwh, d};
  };

  // value[h][state]: least brown kWh from hour h on.
  std::vector<std::vector<double>> value(H + 1, std::vector<double>(states, detail::kInfCost));
  for (std::size_t s = 0; s < states; ++s) {
    const auto lv = decode(s);
    bool ok = true;
    if (esd && sc.cyclic_esd)
      for (int v : lv) ok = ok && v >= init_level;
    value[H][s] = ok ? 0.0 : detail::kInfCost;
  }
  // Best brown of one split at hour h from state s (min over next states).
  auto best_next = [&](int h, const Split& sp, const std::vector<int>& lv, std::vector<int>* out_next,
                       std::vector<EnergyDispatch>* out_d) {
    double best = detail::kInfCost;
    std::vector<int> nx(S, 0);
    std::vector<EnergyDispatch> dd(S);
    std::function<void(int, double)> rec = [&](int i, double acc) {
      if (acc >= best) return;
      if (i == S) {
        const double total = acc + value[h + 1][encode(nx)];
        if (total < best - 1e-12) {
          best = total;
          if (out_next) *out_next = nx;
          if (out_d) *out_d = dd;
        }
        return;
      }
      const int g = solar_groups[i];
      for (int b = 0; b <= (esd ? levels - 1 : 0); ++b) {
        const auto m = energy_move(h, sp.afdc_kwh[g], esd ? lv[i] : 0, esd ? b : 0);
        if (!m) continue;
        nx[i] = b;
        dd[i] = m->d;
        rec(i + 1, acc + m->brown_kwh);
      }
    };
    rec(0, sp.fixed_w / 1000.0);
    return best;
  };
  for (int h = H - 1; h >= 0; --h)
    for (std::size_t s = 0; s < states; ++s) {
      const auto lv = decode(s);
      double best = detail::kInfCost;
      for (const auto& sp : splits[h]) best = std::min(best, best_next(h, sp, lv, nullptr, nullptr));
      value[h][s] = best;
    }

  std::vector<int> lv(S, init_level);
  const double optimum = value[0][encode(lv)];
  if (!std::isfinite(optimum)) throw InfeasibleError("no feasible battery schedule");
  PlacementPlan plan = zero_plan(inst);
  for (int h = 0; h < H; ++h) {
    const double target = value[h][encode(lv)];
    bool done = false;
    for (const auto& sp : splits[h]) {
      std::vector<int> nx;
      std::vector<EnergyDispatch> dd;
      const double v = best_next(h, sp, lv, &nx, &dd);
      if (v <= target + 1e-9 * std::max(1.0, std::abs(target))) {
        plan.hours[h].groups = sp.flows;
        for (int i = 0; i < S; ++i) {
          plan.hours[h].energy[solar_groups[i]].dispatch = dd[i];
          plan.hours[h].energy[solar_groups[i]].soc_kwh = esd ? nx[i] * opt.soc_step_kwh : 0.0;
        }
        lv = nx;
        done = true;
        break;
      }
    }
    if (!done) throw Error("brute force reconstruction failed");
  }
  derive_core_traffic(plan, inst);
  plan.objective_kwh = evaluate_plan(plan, inst).brown_kwh();
  return plan;
}

// Percentage savings of a candidate plan over a baseline plan.
struct Savings {
  double transport_pct = 0;
  double total_pct = 0;
  double brown_pct = 0;
};

inline Savings compare_plans(const PlacementPlan& baseline, const PlacementPlan& candidate, const Instance& base_inst,
                             const Instance& cand_inst) {
  const auto b = evaluate_plan(baseline, base_inst).daily_kwh;
  const auto c = evaluate_plan(candidate, cand_inst).daily_kwh;
  auto pct = [](double base, double cand, const char* what) {
    if (base <= 0) throw Error(std::string("baseline ") + what + " energy is zero; savings undefined");
    return 100.0 * (base - cand) / base;
  };
  return {pct(b.transport(), c.transport(), "transport"), pct(b.total(), c.total(), "total"),
          pct(b.brown, c.brown, "brown")};
}

}  // namespace vodfog
