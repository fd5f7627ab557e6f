#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vodfog/milp/linear_model.hpp"
#include "vodfog/scenario.hpp"

namespace vodfog::milp {

// Column ids of the decision variables a plan is read back from; -1 where the
// variable does not exist (tier unavailable, no solar, no ESD).
struct PlanIndex {
  std::vector<std::vector<int>> afdc;               // [hour][group]
  std::vector<std::vector<int>> mfdc;               // [hour][group]
  std::vector<std::vector<std::vector<int>>> cdc;   // [hour][group][cdc]
  std::vector<std::vector<int>> serve;              // [hour][group]
  std::vector<std::vector<int>> charge;
  std::vector<std::vector<int>> curtail;
  std::vector<std::vector<int>> drawn;              // kWh leaving the store
  std::vector<std::vector<int>> soc;
  std::vector<std::vector<int>> wavelengths;        // [hour][cdc * nodes + node]
};

struct VodModel {
  LinearModel lp;
  PlanIndex index;
  std::vector<int> hours;  // hours the model covers
};

namespace detail {

inline std::string vname(const char* base, std::initializer_list<int> ids) {
  std::string s(base);
  s += '_';
  bool first = true;
  for (int id : ids) {
    if (!first) s += '_';
    s += std::to_string(id);
    first = false;
  }
  return s;
}

// Server, switch and port counts sizing one data centre's load expression.
// Returns the term list of its facility power in kWh per hour.
inline std::vector<Term> dc_sizing(LinearModel& m, const std::string& tag, const std::vector<Term>& load, Tier tier,
                                   const PowerParams& p) {
  const double pue = p.pue(tier);
  std::vector<Term> power;
  const long long limit = p.tier_server_limit(tier);
  const int n = m.add_var("n_" + tag, 0, limit < 0 ? kInf : static_cast<double>(limit), true);
  auto cover = [&](int count, double unit, const char* what) {
    std::vector<Term> t{{count, unit}};
    for (const auto& l : load) t.push_back({l.var, -l.coef});
    m.add_row(std::string(what) + "_" + tag, std::move(t), Sense::ge, 0.0);
  };
  cover(n, p.server_capacity_gbps, "srv");
  if (p.dc_power_mode == DcPowerMode::ratio) {
    power.push_back({n, pue * p.server_w * p.net_to_compute_ratio / 1000.0});
    return power;
  }
  const int sw = m.add_var("sw_" + tag, 0, kInf, true);
  const int pt = m.add_var("pt_" + tag, 0, kInf, true);
  cover(sw, p.tier_switch_bitrate(tier), "swc");
  cover(pt, p.router_port_bitrate_gbps, "ptc");
  power.push_back({n, pue * p.server_w / 1000.0});
  power.push_back({sw, pue * p.tier_switch_w(tier) / 1000.0});
  power.push_back({pt, pue * p.tier_port_w(tier) / 1000.0});
  return power;
}

}  // namespace detail

// Builds the minimum-brown-energy placement model of an instance.
//
// Objective (kWh over the horizon): traffic-attributable transport power plus
// brown data-centre power, one-hour slots. The optical-switch floor is a
// constant and is left out. See FORMULATION.md for the full statement.
//
// `only_hour` restricts the model to one hour; that is exact only when no
// battery couples the hours.
inline VodModel build_model(const Instance& inst, std::optional<int> only_hour = std::nullopt) {
  using detail::vname;
  const auto& topo = inst.topo();
  const auto& sites = inst.sites();
  const auto& p = inst.params();
  const auto& sc = inst.scenario();
  const int H = inst.hours(), G = topo.group_count(), N = topo.node_count(), C = sites.cdc_count();
  if (only_hour && (*only_hour < 0 || *only_hour >= H)) throw Error("hour out of range");
  if (only_hour && inst.has_esd()) throw Error("a battery couples the hours; build the full horizon");
  VodModel vm{LinearModel("VODFOG", "BROWN"), {}, {}};
  auto& m = vm.lp;
  auto& ix = vm.index;
  auto grid = [&](std::vector<std::vector<int>>& v, int inner) { v.assign(H, std::vector<int>(inner, -1)); };
  grid(ix.afdc, G);
  grid(ix.mfdc, G);
  ix.cdc.assign(H, std::vector<std::vector<int>>(G, std::vector<int>(C, -1)));
  grid(ix.serve, G);
  grid(ix.charge, G);
  grid(ix.curtail, G);
  grid(ix.drawn, G);
  grid(ix.soc, G);
  grid(ix.wavelengths, C * N);

  const double afdc_cap = std::min(p.tier_capacity_gbps(Tier::afdc), p.olt_afdc_capacity_gbps);
  const double mfdc_cap = p.tier_capacity_gbps(Tier::mfdc);
  const double cdc_cap = p.tier_capacity_gbps(Tier::cdc);
  const bool esd = inst.has_esd();
  const EsdParams e = esd ? *sc.esd : EsdParams{};
  // Largest AFDC facility power, kWh per hour; bounds battery delivery.
  const double afdc_max_kwh = [&] {
    DcCounts c{p.afdc_server_count, step_count(afdc_cap, p.access_switch_bitrate_gbps),
               step_count(afdc_cap, p.router_port_bitrate_gbps)};
    return p.pue_af * dc_it_power(Tier::afdc, c, p) / 1000.0;
  }();

  for (int h = 0; h < H; ++h) {
    if (only_hour && h != *only_hour) continue;
    vm.hours.push_back(h);
    // Flow columns and demand rows.
    for (int g = 0; g < G; ++g) {
      const int node = topo.home_node(g);
      std::vector<Term> sum;
      if (inst.afdc_usable(g)) {
        ix.afdc[h][g] = m.add_var(vname("xa", {h, g}), 0, afdc_cap, false);
        sum.push_back({ix.afdc[h][g], 1});
      }
      if (inst.mfdc_usable(node)) {
        ix.mfdc[h][g] = m.add_var(vname("xm", {h, g}), 0, mfdc_cap, false);
        sum.push_back({ix.mfdc[h][g], 1});
      }
      if (inst.cdc_usable())
        for (int c = 0; c < C; ++c) {
          ix.cdc[h][g][c] = m.add_var(vname("xc", {h, g, c}), 0, kInf, false);
          sum.push_back({ix.cdc[h][g][c], 1});
        }
      m.add_row(vname("dem", {h, g}), std::move(sum), Sense::eq, inst.demand().at(g, h));
    }

    // Access: OLTs carry metro traffic and the AFDC link.
    std::vector<int> olt(G, -1), metro_sw(N, -1), metro_pt(N, -1), afdc_servers(G, -1);
    for (int g = 0; g < G; ++g) {
      const int o = m.add_var(vname("olt", {h, g}), 0, kInf, true, p.pue_n * p.olt_w / 1000.0);
      olt[g] = o;
      std::vector<Term> up{{o, p.olt_metro_capacity_gbps}};
      if (ix.mfdc[h][g] >= 0) up.push_back({ix.mfdc[h][g], -1});
      for (int c = 0; c < C; ++c)
        if (ix.cdc[h][g][c] >= 0) up.push_back({ix.cdc[h][g][c], -1});
      if (up.size() > 1) m.add_row(vname("oltm", {h, g}), std::move(up), Sense::ge, 0.0);
      if (ix.afdc[h][g] >= 0)
        m.add_row(vname("olta", {h, g}), {{o, p.olt_afdc_capacity_gbps}, {ix.afdc[h][g], -1}}, Sense::ge, 0.0);
    }

    // Metro: edge-router ports and Ethernet switches per node.
    for (int n = 0; n < N; ++n) {
      std::vector<Term> load;
      for (int g : topo.groups_at(n)) {
        if (ix.mfdc[h][g] >= 0) load.push_back({ix.mfdc[h][g], 1});
        for (int c = 0; c < C; ++c)
          if (ix.cdc[h][g][c] >= 0) load.push_back({ix.cdc[h][g][c], 1});
      }
      if (load.empty()) continue;
      const int sw = m.add_var(vname("msw", {h, n}), 0, kInf, true, p.pue_n * p.metro_eth_switch_w / 1000.0);
      const int pt = m.add_var(vname("mpt", {h, n}), 0, kInf, true, p.pue_n * p.edge_port_w() / 1000.0);
      metro_sw[n] = sw;
      metro_pt[n] = pt;
      std::vector<Term> a{{sw, p.switch_bitrate_gbps}}, b{{pt, p.router_port_bitrate_gbps}};
      for (const auto& t : load) {
        a.push_back({t.var, -1});
        b.push_back({t.var, -1});
      }
      m.add_row(vname("mswc", {h, n}), std::move(a), Sense::ge, 0.0);
      m.add_row(vname("mptc", {h, n}), std::move(b), Sense::ge, 0.0);
    }

    // Core: lightpaths per CDC-to-node pair, fibres per directed arc.
    std::vector<std::vector<Term>> arc_load(topo.arc_count());
    for (int c = 0; c < C; ++c) {
      const int k = sites.cdc_nodes[c];
      for (int n = 0; n < N; ++n) {
        if (n == k) continue;
        std::vector<Term> traffic;
        for (int g : topo.groups_at(n))
          if (ix.cdc[h][g][c] >= 0) traffic.push_back({ix.cdc[h][g][c], -1});
        if (traffic.empty()) continue;
        const double km = inst.routes().km(k, n);
        const double regens = std::floor(km / p.regen_reach_km);
        const double w_cost =
            p.pue_n * (2 * p.core_router_port_w + 2 * p.transponder_w + regens * p.regenerator_w) / 1000.0;
        const int w = m.add_var(vname("w", {h, c, n}), 0, kInf, true, w_cost);
        ix.wavelengths[h][c * N + n] = w;
        traffic.insert(traffic.begin(), {w, p.wavelength_capacity_gbps});
        m.add_row(vname("wc", {h, c, n}), std::move(traffic), Sense::ge, 0.0);
        for (int arc : inst.routes().arcs(k, n)) arc_load[arc].push_back({w, -1});
      }
    }
    for (int arc = 0; arc < topo.arc_count(); ++arc) {
      if (arc_load[arc].empty()) continue;
      const auto& link = topo.links()[arc / 2];
      const double amps = std::floor(link.km / p.edfa_span_km) + 1;
      const int f = m.add_var(vname("f", {h, arc}), 0, link.fibres, true, p.pue_n * amps * p.edfa_w / 1000.0);
      auto row = arc_load[arc];
      row.insert(row.begin(), {f, static_cast<double>(p.wavelengths_per_fibre)});
      m.add_row(vname("fc", {h, arc}), std::move(row), Sense::ge, 0.0);
    }

    // Data centres.
    for (int c = 0; c < C && inst.cdc_usable(); ++c) {
      std::vector<Term> load;
      for (int g = 0; g < G; ++g) load.push_back({ix.cdc[h][g][c], 1});
      if (std::isfinite(cdc_cap)) m.add_row(vname("ccap", {h, c}), load, Sense::le, cdc_cap);
      if (sc.draws_brown(Tier::cdc))
        for (const auto& t : detail::dc_sizing(m, vname("c", {h, c}), load, Tier::cdc, p)) m.add_obj(t.var, t.coef);
    }
    for (int n = 0; n < N; ++n) {
      if (!inst.mfdc_usable(n)) continue;
      std::vector<Term> load;
      for (int g : topo.groups_at(n)) load.push_back({ix.mfdc[h][g], 1});
      if (load.size() > 1) m.add_row(vname("mcap", {h, n}), load, Sense::le, mfdc_cap);
      if (sc.draws_brown(Tier::mfdc))
        for (const auto& t : detail::dc_sizing(m, vname("m", {h, n}), load, Tier::mfdc, p)) m.add_obj(t.var, t.coef);
    }
    for (int g = 0; g < G; ++g) {
      if (ix.afdc[h][g] < 0 || !sc.draws_brown(Tier::afdc)) continue;
      const auto power = detail::dc_sizing(m, vname("a", {h, g}), {{ix.afdc[h][g], 1}}, Tier::afdc, p);
      for (const auto& t : power) m.add_obj(t.var, t.coef);
      afdc_servers[g] = power.front().var;
      if (!inst.has_solar()) continue;

      // Solar split, battery recurrence and the brown offset.
      const double gen = inst.solar_kwh(h);
      const int serve = m.add_var(vname("sv", {h, g}), 0, gen, false, -1.0);
      const int curtail = m.add_var(vname("ct", {h, g}), 0, gen, false);
      ix.serve[h][g] = serve;
      ix.curtail[h][g] = curtail;
      std::vector<Term> split{{serve, 1}, {curtail, 1}};
      // serve + delivered <= facility power, so solar only offsets load that exists.
      std::vector<Term> offset = power;
      offset.push_back({serve, -1});
      if (esd) {
        const double mc = std::min({gen, e.charge_cap(), e.e_max_kwh / e.eta_charge});
        const double md = std::min({e.discharge_cap(), e.e_max_kwh, afdc_max_kwh / e.eta_discharge});
        const int charge = m.add_var(vname("ch", {h, g}), 0, mc, false);
        const int drawn = m.add_var(vname("dr", {h, g}), 0, md, false, -e.eta_discharge);
        const int soc = m.add_var(vname("soc", {h, g}), 0, e.e_max_kwh, false);
        ix.charge[h][g] = charge;
        ix.drawn[h][g] = drawn;
        ix.soc[h][g] = soc;
        split.push_back({charge, 1});
        offset.push_back({drawn, -e.eta_discharge});
        std::vector<Term> rec{{soc, 1}, {charge, -e.eta_charge}, {drawn, 1}};
        double rhs = 0;
        if (h == 0) rhs = sc.initial_soc_kwh;
        else rec.push_back({ix.soc[h - 1][g], -1});
        m.add_row(vname("rec", {h, g}), std::move(rec), Sense::eq, rhs);
        if (mc > 0 && md > 0) {
          const int z = m.add_var(vname("z", {h, g}), 0, 1, true);
          m.add_row(vname("xch", {h, g}), {{charge, 1}, {z, -mc}}, Sense::le, 0.0);
          m.add_row(vname("xdr", {h, g}), {{drawn, 1}, {z, md}}, Sense::le, md);
        }
        if (h == H - 1 && sc.cyclic_esd) m.add_row(vname("cyc", {g}), {{soc, 1}}, Sense::ge, sc.initial_soc_kwh);
      }
      m.add_row(vname("sol", {h, g}), std::move(split), Sense::eq, gen);
      m.add_row(vname("off", {h, g}), std::move(offset), Sense::ge, 0.0);
    }

    // Valid inequalities, implied by the rows above but not by their LP
    // relaxation: demand the local AFDC servers do not cover must pass the
    // OLT's metro side and the metro node, and, with neither an MFDC nor a
    // CDC at the node, a lightpath.
    for (int n = 0; n < N; ++n) {
      double dem = 0;
      bool sized = true;
      std::vector<Term> cover;
      for (int g : topo.groups_at(n)) {
        dem += inst.demand().at(g, h);
        if (ix.afdc[h][g] < 0) continue;
        if (afdc_servers[g] < 0) sized = false;
        else cover.push_back({afdc_servers[g], p.server_capacity_gbps});
      }
      if (dem <= 0 || !sized) continue;
      for (int g : topo.groups_at(n)) {
        const double d = inst.demand().at(g, h);
        if (d <= 0) continue;
        std::vector<Term> row{{olt[g], p.olt_metro_capacity_gbps}};
        if (afdc_servers[g] >= 0) row.push_back({afdc_servers[g], p.server_capacity_gbps});
        m.add_row(vname("volt", {h, g}), std::move(row), Sense::ge, d);
      }
      auto add_cover = [&](const char* tag, std::vector<Term> row) {
        row.insert(row.end(), cover.begin(), cover.end());
        m.add_row(vname(tag, {h, n}), std::move(row), Sense::ge, dem);
      };
      if (metro_sw[n] >= 0) {
        add_cover("vmsw", {{metro_sw[n], p.switch_bitrate_gbps}});
        add_cover("vmpt", {{metro_pt[n], p.router_port_bitrate_gbps}});
      }
      const bool local_cdc =
          std::find(sites.cdc_nodes.begin(), sites.cdc_nodes.end(), n) != sites.cdc_nodes.end();
      if (inst.mfdc_usable(n) || local_cdc || !inst.cdc_usable()) continue;
      std::vector<Term> lp_row;
      for (int c = 0; c < C; ++c)
        if (ix.wavelengths[h][c * N + n] >= 0) lp_row.push_back({ix.wavelengths[h][c * N + n], p.wavelength_capacity_gbps});
      if (!lp_row.empty()) add_cover("vw", std::move(lp_row));
    }
  }
  m.validate();
  return vm;
}

}  // namespace vodfog::milp
