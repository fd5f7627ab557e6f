#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vodfog/plan.hpp"
#include "vodfog/power.hpp"
#include "vodfog/scenario.hpp"

namespace vodfog {

// One broken constraint. `slack` is the amount by which it is violated.
struct Violation {
  int hour = -1;  // -1 for horizon-wide constraints
  std::string entity;
  std::string constraint;
  double slack = 0;
};

namespace detail {

inline double tol_for(double scale) { return kFeasibilityTol * std::max(1.0, std::abs(scale)); }

}  // namespace detail

// Checks a plan against the problem's constraints directly, without the
// optimization model. Never throws on a bad plan; every defect is reported.
inline std::vector<Violation> verify_plan(const PlacementPlan& plan, const Instance& inst) {
  std::vector<Violation> out;
  const auto& topo = inst.topo();
  const auto& sites = inst.sites();
  const auto& p = inst.params();
  const auto& sc = inst.scenario();
  const int G = topo.group_count(), N = topo.node_count(), C = sites.cdc_count();
  auto report = [&](int h, std::string entity, const char* what, double slack) {
    out.push_back({h, std::move(entity), what, slack});
  };
  if (plan.hour_count() != inst.hours()) {
    report(-1, "plan", "horizon mismatch", std::abs(plan.hour_count() - inst.hours()));
    return out;
  }
  const auto& esd = sc.esd;
  std::vector<double> soc(G, sc.initial_soc_kwh);

  for (int h = 0; h < inst.hours(); ++h) {
    const auto& hour = plan.hours[h];
    if (static_cast<int>(hour.groups.size()) != G || static_cast<int>(hour.energy.size()) != G) {
      report(h, "plan", "group count mismatch", 1);
      continue;
    }
    std::vector<double> mfdc_load(N, 0.0), cdc_load(C, 0.0);
    TrafficMatrix traffic(N);
    for (int g = 0; g < G; ++g) {
      const auto& f = hour.groups[g];
      const auto& gname = topo.groups()[g].name;
      const int node = topo.home_node(g);
      if (static_cast<int>(f.cdc_gbps.size()) != C) {
        report(h, gname, "cdc unknown", std::abs(static_cast<double>(f.cdc_gbps.size()) - C));
        continue;
      }
      auto nonneg = [&](double v) {
        if (v < -kFeasibilityTol) report(h, gname, "negative flow", -v);
      };
      nonneg(f.afdc_gbps);
      nonneg(f.mfdc_gbps);
      for (double c : f.cdc_gbps) nonneg(c);
      const double d = inst.demand().at(g, h);
      const double total = f.total();
      if (total < d - detail::tol_for(d)) report(h, gname, "demand shortfall", d - total);
      if (total > d + detail::tol_for(d)) report(h, gname, "demand excess", total - d);
      if (f.afdc_gbps > kZeroLoad && !inst.afdc_usable(g)) report(h, gname, "afdc absent", f.afdc_gbps);
      if (f.mfdc_gbps > kZeroLoad && !inst.mfdc_usable(node)) report(h, gname, "mfdc absent", f.mfdc_gbps);
      if (f.cdc_total() > kZeroLoad && !inst.cdc_usable()) report(h, gname, "cdc unknown", f.cdc_total());
      const double afdc_cap = p.tier_capacity_gbps(Tier::afdc);
      if (f.afdc_gbps > afdc_cap + detail::tol_for(afdc_cap)) report(h, gname, "afdc capacity", f.afdc_gbps - afdc_cap);
      if (f.afdc_gbps > p.olt_afdc_capacity_gbps + detail::tol_for(p.olt_afdc_capacity_gbps))
        report(h, gname, "olt afdc link", f.afdc_gbps - p.olt_afdc_capacity_gbps);
      mfdc_load[node] += f.mfdc_gbps;
      for (int c = 0; c < C; ++c) {
        cdc_load[c] += f.cdc_gbps[c];
        if (sites.cdc_nodes[c] != node) traffic.at(sites.cdc_nodes[c], node) += f.cdc_gbps[c];
      }

      // Solar and battery bookkeeping.
      const auto& e = hour.energy[g];
      const auto& dp = e.dispatch;
      for (double v : {dp.solar_serve_kwh, dp.solar_charge_kwh, dp.curtailed_kwh, dp.discharge_kwh, e.soc_kwh})
        if (v < -kFeasibilityTol) report(h, gname, "negative energy", -v);
      const bool solar_here = inst.has_solar() && inst.afdc_usable(g);
      if (!solar_here) {
        const double any = std::abs(dp.solar_serve_kwh) + std::abs(dp.solar_charge_kwh) + std::abs(dp.curtailed_kwh) +
                           std::abs(dp.discharge_kwh) + std::abs(e.soc_kwh);
        if (any > kFeasibilityTol) report(h, gname, "solar unavailable", any);
        continue;
      }
      const double gen = inst.solar_kwh(h);
      const double split = dp.solar_serve_kwh + dp.solar_charge_kwh + dp.curtailed_kwh;
      if (std::abs(split - gen) > detail::tol_for(gen)) report(h, gname, "solar balance", std::abs(split - gen));
      // Only the load the AFDC actually draws can be covered.
      const double cap_gbps = std::clamp(f.afdc_gbps, 0.0, std::min(afdc_cap, p.olt_afdc_capacity_gbps));
      const double load_kwh =
          p.pue_af *
          dc_it_power(Tier::afdc,
                      DcCounts{step_count(cap_gbps, p.server_capacity_gbps),
                               step_count(cap_gbps, p.access_switch_bitrate_gbps),
                               step_count(cap_gbps, p.router_port_bitrate_gbps)},
                      p) /
          1000.0;
      const double covered = dp.solar_serve_kwh + dp.discharge_kwh;
      if (covered > load_kwh + detail::tol_for(load_kwh)) report(h, gname, "solar over-serve", covered - load_kwh);
      if (!esd) {
        const double any = std::abs(dp.solar_charge_kwh) + std::abs(dp.discharge_kwh) + std::abs(e.soc_kwh);
        if (any > kFeasibilityTol) report(h, gname, "esd absent", any);
        continue;
      }
      const double drawn = dp.discharge_kwh / esd->eta_discharge;
      if (dp.solar_charge_kwh > esd->charge_cap() + detail::tol_for(esd->charge_cap()))
        report(h, gname, "charge rate", dp.solar_charge_kwh - esd->charge_cap());
      if (drawn > esd->discharge_cap() + detail::tol_for(esd->discharge_cap()))
        report(h, gname, "discharge rate", drawn - esd->discharge_cap());
      if (dp.solar_charge_kwh > kFeasibilityTol && dp.discharge_kwh > kFeasibilityTol)
        report(h, gname, "esd exclusivity", std::min(dp.solar_charge_kwh, dp.discharge_kwh));
      const double expect = soc[g] + esd->eta_charge * dp.solar_charge_kwh - drawn;
      if (std::abs(e.soc_kwh - expect) > detail::tol_for(esd->e_max_kwh))
        report(h, gname, "soc recurrence", std::abs(e.soc_kwh - expect));
      if (e.soc_kwh < -detail::tol_for(esd->e_max_kwh)) report(h, gname, "soc bound", -e.soc_kwh);
      if (e.soc_kwh > esd->e_max_kwh + detail::tol_for(esd->e_max_kwh))
        report(h, gname, "soc bound", e.soc_kwh - esd->e_max_kwh);
      soc[g] = e.soc_kwh;
    }

    for (int n = 0; n < N; ++n) {
      const double cap = p.tier_capacity_gbps(Tier::mfdc);
      if (mfdc_load[n] > cap + detail::tol_for(cap)) report(h, topo.nodes()[n].name, "mfdc capacity", mfdc_load[n] - cap);
    }
    for (int c = 0; c < C; ++c) {
      const double cap = p.tier_capacity_gbps(Tier::cdc);
      if (std::isfinite(cap) && cdc_load[c] > cap + detail::tol_for(cap))
        report(h, topo.nodes()[sites.cdc_nodes[c]].name, "cdc capacity", cdc_load[c] - cap);
    }

    // Core: the plan's matrix and lightpaths must match its flows, and every
    // directed arc must hold its lightpaths.
    const bool shaped = hour.core_traffic.size() == N && hour.wavelengths.size() == static_cast<std::size_t>(N) * N;
    if (!shaped) {
      report(h, "core", "core traffic mismatch", 1);
      continue;
    }
    std::vector<std::int64_t> arc_w(topo.arc_count(), 0);
    for (int s = 0; s < N; ++s)
      for (int d = 0; d < N; ++d) {
        const std::string pair = topo.nodes()[s].name + "->" + topo.nodes()[d].name;
        const double t = traffic.at(s, d);
        if (std::abs(hour.core_traffic.at(s, d) - t) > detail::tol_for(t))
          report(h, pair, "core traffic mismatch", std::abs(hour.core_traffic.at(s, d) - t));
        const auto w = hour.wavelengths[static_cast<std::size_t>(s) * N + d];
        const double short_by = t - static_cast<double>(w) * p.wavelength_capacity_gbps;
        if (w < 0 || short_by > detail::tol_for(t)) report(h, pair, "wavelength count", std::max(short_by, 1.0 * -w));
        if (s != d && w > 0)
          for (int arc : inst.routes().arcs(s, d)) arc_w[arc] += w;
      }
    for (int arc = 0; arc < topo.arc_count(); ++arc) {
      const auto& link = topo.links()[arc / 2];
      const auto cap = static_cast<std::int64_t>(link.fibres) * p.wavelengths_per_fibre;
      if (arc_w[arc] > cap) {
        const int a = arc % 2 == 0 ? link.a : link.b, b = arc % 2 == 0 ? link.b : link.a;
        report(h, topo.nodes()[a].name + "->" + topo.nodes()[b].name, "fibre capacity",
               static_cast<double>(arc_w[arc] - cap));
      }
    }
  }
  if (esd && sc.cyclic_esd && inst.has_solar() && inst.hours() > 0)
    for (int g = 0; g < G; ++g)
      if (inst.afdc_usable(g) && soc[g] < sc.initial_soc_kwh - detail::tol_for(esd->e_max_kwh))
        report(inst.hours() - 1, topo.groups()[g].name, "esd cyclic", sc.initial_soc_kwh - soc[g]);
  return out;
}

}  // namespace vodfog
