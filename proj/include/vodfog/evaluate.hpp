#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "vodfog/error.hpp"
#include "vodfog/plan.hpp"
#include "vodfog/power.hpp"
#include "vodfog/scenario.hpp"

namespace vodfog {

// Power split of one hour (W) or energy split of a day (kWh).
//
// `core` is traffic-attributable core power; the optical-switch floor is
// reported separately in `core_floor` and is excluded from `brown`, matching
// the optimizer's objective. brown + renewable == total().
struct Breakdown {
  double core = 0;
  double core_floor = 0;
  double metro = 0;
  double access = 0;
  std::array<double, 3> dc{};  // indexed by Tier
  double brown = 0;
  double renewable = 0;

  double dc_at(Tier t) const { return dc[static_cast<int>(t)]; }
  double dc_total() const { return dc[0] + dc[1] + dc[2]; }
  double transport() const { return core + metro + access; }
  double transport_with_floor() const { return transport() + core_floor; }
  double total() const { return transport() + dc_total(); }
  double brown_with_floor() const { return brown + core_floor; }

  Breakdown& operator+=(const Breakdown& o) {
    core += o.core;
    core_floor += o.core_floor;
    metro += o.metro;
    access += o.access;
    for (int i = 0; i < 3; ++i) dc[i] += o.dc[i];
    brown += o.brown;
    renewable += o.renewable;
    return *this;
  }
  Breakdown scaled(double k) const {
    Breakdown b = *this;
    b.core *= k;
    b.core_floor *= k;
    b.metro *= k;
    b.access *= k;
    for (auto& d : b.dc) d *= k;
    b.brown *= k;
    b.renewable *= k;
    return b;
  }
};

struct PlanEvaluation {
  std::vector<Breakdown> hourly_w;
  Breakdown daily_kwh;

  double brown_kwh() const { return daily_kwh.brown; }
  double transport_kwh() const { return daily_kwh.transport(); }
};

// Aggregated loads of one hour, by the equipment that carries them.
struct HourLoads {
  std::vector<double> afdc;   // per group
  std::vector<double> mfdc;   // per node
  std::vector<double> cdc;    // per CDC
  std::vector<double> metro;  // per node
  std::vector<AccessLoad> access;
  TrafficMatrix core;
};

inline HourLoads aggregate_loads(const PlanHour& hour, const Instance& inst) {
  const auto& topo = inst.topo();
  const auto& sites = inst.sites();
  if (static_cast<int>(hour.groups.size()) != topo.group_count() ||
      static_cast<int>(hour.energy.size()) != topo.group_count())
    throw Error("plan group count does not match topology");
  HourLoads l;
  l.afdc.assign(topo.group_count(), 0.0);
  l.mfdc.assign(topo.node_count(), 0.0);
  l.cdc.assign(sites.cdc_count(), 0.0);
  l.metro.assign(topo.node_count(), 0.0);
  l.access.assign(topo.group_count(), {});
  l.core = TrafficMatrix(topo.node_count());
  for (int g = 0; g < topo.group_count(); ++g) {
    const auto& f = hour.groups[g];
    const int node = topo.home_node(g);
    if (static_cast<int>(f.cdc_gbps.size()) != sites.cdc_count()) throw Error("plan CDC count does not match placement");
    if (f.afdc_gbps > kZeroLoad && !inst.afdc_usable(g))
      throw Error("plan serves group '" + topo.groups()[g].name + "' from an AFDC that is not available");
    if (f.mfdc_gbps > kZeroLoad && !inst.mfdc_usable(node))
      throw Error("plan serves group '" + topo.groups()[g].name + "' from an MFDC that is not available");
    if (f.cdc_total() > kZeroLoad && !inst.cdc_usable())
      throw Error("plan serves group '" + topo.groups()[g].name + "' from a CDC in a scenario without CDCs");
    l.afdc[g] = f.afdc_gbps;
    l.mfdc[node] += f.mfdc_gbps;
    const double upstream = f.mfdc_gbps + f.cdc_total();
    l.metro[node] += upstream;
    l.access[g] = {f.afdc_gbps, upstream};
    for (int c = 0; c < sites.cdc_count(); ++c) {
      l.cdc[c] += f.cdc_gbps[c];
      if (sites.cdc_nodes[c] != node) l.core.at(sites.cdc_nodes[c], node) += f.cdc_gbps[c];
    }
  }
  return l;
}

// Power split of one plan hour. Capacity violations throw CapacityError.
inline Breakdown evaluate_hour(const PlanHour& hour, const Instance& inst) {
  const auto& p = inst.params();
  const auto& sc = inst.scenario();
  const auto loads = aggregate_loads(hour, inst);
  Breakdown b;
  const auto core = core_power_detail(inst.topo(), inst.routes(), loads.core, p);
  b.core = core.traffic_w();
  b.core_floor = core.optical_switch_w;
  b.metro = metro_power(loads.metro, p);
  b.access = access_power(loads.access, p);
  b.brown = b.transport();

  auto add_dc = [&](Tier t, double watts) {
    b.dc[static_cast<int>(t)] += watts;
    if (sc.source(t) == EnergySource::renewable) b.renewable += watts;
    else b.brown += watts;
  };
  for (int c = 0; c < inst.sites().cdc_count(); ++c) add_dc(Tier::cdc, dc_power(Tier::cdc, loads.cdc[c], p));
  for (int n = 0; n < inst.topo().node_count(); ++n) add_dc(Tier::mfdc, dc_power(Tier::mfdc, loads.mfdc[n], p));
  for (int g = 0; g < inst.topo().group_count(); ++g) {
    const double watts = dc_power(Tier::afdc, loads.afdc[g], p);
    if (sc.afdc_source == EnergySource::solar) {
      const auto& d = hour.energy[g].dispatch;
      const double covered = std::clamp(1000.0 * (d.solar_serve_kwh + d.discharge_kwh), 0.0, watts);
      b.dc[static_cast<int>(Tier::afdc)] += watts;
      b.brown += watts - covered;
      b.renewable += covered;
    } else {
      add_dc(Tier::afdc, watts);
    }
  }
  return b;
}

// Hourly W and daily kWh for a whole plan (one-hour slots, so kWh = W / 1000).
inline PlanEvaluation evaluate_plan(const PlacementPlan& plan, const Instance& inst) {
  if (plan.hour_count() != inst.hours()) throw Error("plan horizon does not match demand horizon");
  PlanEvaluation ev;
  for (const auto& hour : plan.hours) {
    ev.hourly_w.push_back(evaluate_hour(hour, inst));
    ev.daily_kwh += ev.hourly_w.back().scaled(1.0 / 1000.0);
  }
  return ev;
}

}  // namespace vodfog
