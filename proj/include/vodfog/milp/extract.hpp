#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "vodfog/evaluate.hpp"
#include "vodfog/milp/model.hpp"
#include "vodfog/milp/mps.hpp"
#include "vodfog/milp/solver.hpp"
#include "vodfog/plan.hpp"

namespace vodfog::milp {

namespace detail {

// Recomputes solar serving for fixed charge and discharge: serve as much as
// the facility can use, curtail the rest. Returns false when the battery
// alone already delivers more than the facility draws.
inline bool settle_solar(PlanHour& hour, int g, const Instance& inst, int h) {
  if (!inst.has_solar() || !inst.afdc_usable(g)) return true;
  auto& d = hour.energy[g].dispatch;
  const double watts = dc_power(Tier::afdc, hour.groups[g].afdc_gbps, inst.params());
  const double room = watts / 1000.0 - d.discharge_kwh;
  if (room < -kFeasibilityTol) return false;
  const double avail = std::max(0.0, inst.solar_kwh(h) - d.solar_charge_kwh);
  d.solar_serve_kwh = std::clamp(room, 0.0, avail);
  d.curtailed_kwh = avail - d.solar_serve_kwh;
  return true;
}

inline double hour_brown(const PlanHour& hour, const Instance& inst) {
  try {
    return evaluate_hour(hour, inst).brown;
  } catch (const CapacityError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Headroom at the destination before any of its step counts rises.
inline double step_slack(double load, std::initializer_list<double> units) {
  double slack = std::numeric_limits<double>::infinity();
  for (double u : units) {
    const double filled = static_cast<double>(step_count(load, u)) * u;
    slack = std::min(slack, std::max(0.0, filled - load));
  }
  return slack;
}

// The model sizes data centres with count columns that may exceed the
// ceiling counts; solar or battery energy credited against the surplus covers
// nothing. Trims serving to the facility's actual draw, then battery delivery,
// then charging wherever the trimmed delivery would overfill the store.
inline void repair_energy(PlacementPlan& plan, const Instance& inst, const std::vector<int>& hours) {
  if (!inst.has_solar()) return;
  const auto& esd = inst.scenario().esd;
  for (int g = 0; g < inst.topo().group_count(); ++g) {
    if (!inst.afdc_usable(g)) continue;
    double soc = inst.scenario().initial_soc_kwh;
    for (int h : hours) {
      auto& e = plan.hours[h].energy[g];
      auto& d = e.dispatch;
      const double gen = inst.solar_kwh(h);
      const double load = dc_power(Tier::afdc, plan.hours[h].groups[g].afdc_gbps, inst.params()) / 1000.0;
      d.solar_serve_kwh = std::min(d.solar_serve_kwh, load);
      d.discharge_kwh = std::min(d.discharge_kwh, load - d.solar_serve_kwh);
      if (esd) {
        double drawn = d.discharge_kwh / esd->eta_discharge;
        drawn = std::min(drawn, soc + esd->eta_charge * d.solar_charge_kwh);
        const double over = soc + esd->eta_charge * d.solar_charge_kwh - drawn - esd->e_max_kwh;
        if (over > 0) d.solar_charge_kwh = std::max(0.0, d.solar_charge_kwh - over / esd->eta_charge);
        d.discharge_kwh = drawn * esd->eta_discharge;
        soc = std::clamp(soc + esd->eta_charge * d.solar_charge_kwh - drawn, 0.0, esd->e_max_kwh);
        e.soc_kwh = soc;
      }
      d.curtailed_kwh = std::max(0.0, gen - d.solar_serve_kwh - d.solar_charge_kwh);
    }
  }
}

}  // namespace detail

// Canonical form of a plan among equal-brown alternatives.
//
// Flow moves toward the more local tier (CDC to AFDC, CDC to MFDC, MFDC to
// AFDC) whenever the hour's brown power does not rise, and solar serving is
// maximised for the fixed battery schedule. Ties in the optimum are thus
// resolved the same way whatever the solver returned.
inline void canonicalize_plan(PlacementPlan& plan, const Instance& inst) {
  const auto& topo = inst.topo();
  const auto& p = inst.params();
  const int C = inst.sites().cdc_count();
  constexpr double kTieTol = 1e-9;
  for (int h = 0; h < plan.hour_count(); ++h) {
    auto& hour = plan.hours[h];
    for (int g = 0; g < topo.group_count(); ++g) detail::settle_solar(hour, g, inst, h);
    double brown = detail::hour_brown(hour, inst);
    auto node_mfdc_load = [&](int node) {
      double s = 0;
      for (int g : topo.groups_at(node)) s += hour.groups[g].mfdc_gbps;
      return s;
    };
    auto try_move = [&](int g, double& from, double& to, double amount) {
      if (amount <= kZeroLoad) return false;
      const GroupFlow saved_flow = hour.groups[g];
      const AfdcEnergy saved_energy = hour.energy[g];
      from -= amount;
      if (from < kZeroLoad) {
        to += from + amount;
        from = 0;
      } else {
        to += amount;
      }
      try {
        if (detail::settle_solar(hour, g, inst, h)) {
          derive_core_traffic(hour, inst);
          const double b = detail::hour_brown(hour, inst);
          if (b <= brown + kTieTol * std::max(1.0, std::abs(brown))) {
            brown = b;
            return true;
          }
        }
      } catch (const CapacityError&) {
      }
      hour.groups[g] = saved_flow;
      hour.energy[g] = saved_energy;
      derive_core_traffic(hour, inst);
      return false;
    };
    for (int pass = 0; pass < 8; ++pass) {
      bool moved = false;
      for (int g = 0; g < topo.group_count(); ++g) {
        auto& f = hour.groups[g];
        const int node = topo.home_node(g);
        const bool afdc = inst.afdc_usable(g), mfdc = inst.mfdc_usable(node);
        auto afdc_room = [&] {
          return std::max(0.0, std::min(p.tier_capacity_gbps(Tier::afdc), p.olt_afdc_capacity_gbps) - f.afdc_gbps);
        };
        auto afdc_slack = [&] {
          return detail::step_slack(f.afdc_gbps, {p.server_capacity_gbps, p.access_switch_bitrate_gbps,
                                                  p.router_port_bitrate_gbps, p.olt_afdc_capacity_gbps});
        };
        auto mfdc_room = [&] { return std::max(0.0, p.tier_capacity_gbps(Tier::mfdc) - node_mfdc_load(node)); };
        auto mfdc_slack = [&] {
          return detail::step_slack(node_mfdc_load(node),
                                    {p.server_capacity_gbps, p.switch_bitrate_gbps, p.router_port_bitrate_gbps});
        };
        for (int c = 0; c < C; ++c) {
          if (afdc)
            for (double amt : {std::min(f.cdc_gbps[c], afdc_room()), std::min({f.cdc_gbps[c], afdc_room(), afdc_slack()})})
              if (try_move(g, f.cdc_gbps[c], f.afdc_gbps, amt)) {
                moved = true;
                break;
              }
          if (mfdc)
            for (double amt : {std::min(f.cdc_gbps[c], mfdc_room()), std::min({f.cdc_gbps[c], mfdc_room(), mfdc_slack()})})
              if (try_move(g, f.cdc_gbps[c], f.mfdc_gbps, amt)) {
                moved = true;
                break;
              }
        }
        if (afdc && mfdc) {
          const double room = std::max(
              0.0, std::min(p.tier_capacity_gbps(Tier::afdc), p.olt_afdc_capacity_gbps) - f.afdc_gbps);
          const double slack = detail::step_slack(
              f.afdc_gbps, {p.server_capacity_gbps, p.access_switch_bitrate_gbps, p.router_port_bitrate_gbps,
                            p.olt_afdc_capacity_gbps});
          for (double amt : {std::min(f.mfdc_gbps, room), std::min({f.mfdc_gbps, room, slack})})
            if (try_move(g, f.mfdc_gbps, f.afdc_gbps, amt)) {
              moved = true;
              break;
            }
        }
      }
      if (!moved) break;
    }
    derive_core_traffic(hour, inst);
  }
  plan.objective_kwh = evaluate_plan(plan, inst).brown_kwh();
}

// Turns a raw solver solution into a plan.
//
// Integer columns must lie within 1e-6 of an integer; continuous values within
// 1e-6 below zero are clamped. Demand rows and the solar split are then
// re-balanced exactly and the battery state recomputed from the recurrence.
// A dense solution missing a model column is an error naming that column.
inline PlacementPlan parse_solution(const RawSolution& raw, const VodModel& vm, const Instance& inst) {
  if (raw.status == SolveStatus::infeasible) throw InfeasibleError("solver reports the model infeasible");
  if (raw.status == SolveStatus::unbounded) throw InfeasibleError("solver reports the model unbounded");
  if (!raw.has_values()) throw SolverError("solution carries no primal values");
  const auto names = mps_names(vm.lp);
  std::vector<double> x(vm.lp.var_count(), 0.0);
  for (int c = 0; c < vm.lp.var_count(); ++c) {
    const auto& var = vm.lp.vars()[c];
    auto it = raw.values.find(names.columns[c]);
    if (it == raw.values.end()) {
      if (!raw.sparse) throw SolverError("solution is missing variable '" + var.name + "' (" + names.columns[c] + ")");
      continue;
    }
    double v = it->second;
    if (!std::isfinite(v)) throw SolverError("non-finite value for '" + var.name + "'");
    if (var.integer) {
      const double r = std::round(v);
      if (std::abs(v - r) > kIntegralityTol) throw SolverError("integer variable '" + var.name + "' has fractional value");
      v = r;
    }
    if (v < var.lb - kFeasibilityTol || v > var.ub + kFeasibilityTol * std::max(1.0, std::abs(var.ub)))
      throw SolverError("value of '" + var.name + "' violates its bounds");
    x[c] = std::clamp(v, var.lb, var.ub);
  }
  auto val = [&](int id) { return id < 0 ? 0.0 : x[id]; };

  const auto& ix = vm.index;
  const auto& topo = inst.topo();
  const int C = inst.sites().cdc_count();
  PlacementPlan plan = zero_plan(inst);
  for (int h : vm.hours) {
    auto& hour = plan.hours[h];
    for (int g = 0; g < topo.group_count(); ++g) {
      auto& f = hour.groups[g];
      // Flows are read on a 1e-6 Gbps grid, which drops the solver's noise.
      auto snap = [](double v) { return std::round(v * 1e6) / 1e6; };
      f.afdc_gbps = snap(val(ix.afdc[h][g]));
      f.mfdc_gbps = snap(val(ix.mfdc[h][g]));
      for (int c = 0; c < C; ++c) f.cdc_gbps[c] = snap(val(ix.cdc[h][g][c]));
      const double d = inst.demand().at(g, h);
      const double residual = d - f.total();
      if (std::abs(residual) > kFeasibilityTol * std::max(1.0, d))
        throw SolverError("solution does not meet demand of group '" + topo.groups()[g].name + "' at hour " +
                    std::to_string(h));
      // A residual left by demand finer than the grid goes to the largest flow.
      if (std::abs(residual) > 1e-9) {
        double* largest = &f.afdc_gbps;
        if (f.mfdc_gbps > *largest) largest = &f.mfdc_gbps;
        for (auto& c : f.cdc_gbps)
          if (c > *largest) largest = &c;
        *largest = std::max(0.0, *largest + residual);
      }
      for (double* v : {&f.afdc_gbps, &f.mfdc_gbps})
        if (*v < kZeroLoad) *v = 0;
      for (auto& c : f.cdc_gbps)
        if (c < kZeroLoad) c = 0;

      if (ix.serve[h][g] < 0) continue;
      auto& e = hour.energy[g];
      const auto& esd = inst.scenario().esd;
      e.dispatch.solar_charge_kwh = val(ix.charge[h][g]);
      const double drawn = val(ix.drawn[h][g]);
      e.dispatch.discharge_kwh = esd ? drawn * esd->eta_discharge : 0.0;
      e.dispatch.solar_serve_kwh = val(ix.serve[h][g]);
      e.dispatch.curtailed_kwh = std::max(0.0, inst.solar_kwh(h) - e.dispatch.solar_charge_kwh - e.dispatch.solar_serve_kwh);
      if (esd) {
        const double prev = h == 0 ? inst.scenario().initial_soc_kwh : plan.hours[h - 1].energy[g].soc_kwh;
        e.soc_kwh = std::clamp(prev + esd->eta_charge * e.dispatch.solar_charge_kwh - drawn, 0.0, esd->e_max_kwh);
      }
    }
    derive_core_traffic(hour, inst);
  }
  detail::repair_energy(plan, inst, vm.hours);
  plan.objective_kwh = raw.objective.value_or(vm.lp.objective_value(x));
  return plan;
}

struct SolveResult {
  PlacementPlan plan;
  SolveStatus status = SolveStatus::unknown;
  double solver_objective_kwh = 0;
  double build_seconds = 0;
  double solve_seconds = 0;
  int variables = 0;
  int constraints = 0;
  int integers = 0;
};

// Build, solve, parse and canonicalise. A time-limited solve with an incumbent
// returns that incumbent with status time_limit.
inline SolveResult solve(const Instance& inst, const SolverOptions& opt) {
  using clock = std::chrono::steady_clock;
  SolveResult r;
  r.plan = zero_plan(inst);
  r.status = SolveStatus::optimal;
  // Without a battery the hours are independent and solve one at a time.
  // Each takes what is left of the time limit, keeping two seconds for every
  // hour still to come.
  std::vector<std::optional<int>> parts;
  if (inst.has_esd()) parts.emplace_back();
  else
    for (int h = 0; h < inst.hours(); ++h) parts.emplace_back(h);
  const auto start = clock::now();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto t0 = clock::now();
    const VodModel vm = build_model(inst, parts[i]);
    const auto t1 = clock::now();
    r.build_seconds += std::chrono::duration<double>(t1 - t0).count();
    r.variables += vm.lp.var_count();
    r.constraints += vm.lp.row_count();
    r.integers += vm.lp.integer_count();
    SolverOptions part_opt = opt;
    const double left = opt.time_limit_s - std::chrono::duration<double>(t1 - start).count();
    const double later = static_cast<double>(parts.size() - i - 1);
    part_opt.time_limit_s = std::max(1.0, left - 2.0 * later);
    RawSolution raw;
    try {
      raw = invoke_solver(vm.lp, part_opt);
    } catch (const SolverTimeout& e) {
      if (!e.incumbent() || !e.incumbent()->has_values()) throw;
      raw = *e.incumbent();
      raw.status = SolveStatus::time_limit;
    }
    r.solve_seconds += std::chrono::duration<double>(clock::now() - t1).count();
    if (raw.status != SolveStatus::optimal) r.status = raw.status;
    const PlacementPlan part = parse_solution(raw, vm, inst);
    for (int h : vm.hours) r.plan.hours[h] = part.hours[h];
    r.solver_objective_kwh += part.objective_kwh;
  }
  canonicalize_plan(r.plan, inst);
  return r;
}

}  // namespace vodfog::milp
