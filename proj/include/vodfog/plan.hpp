#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vodfog/energy.hpp"
#include "vodfog/error.hpp"
#include "vodfog/power.hpp"
#include "vodfog/scenario.hpp"
#include "vodfog/util.hpp"

namespace vodfog {

// Gbps delivered to one access group in one hour, by serving site.
struct GroupFlow {
  double afdc_gbps = 0;
  double mfdc_gbps = 0;
  std::vector<double> cdc_gbps;  // indexed like SitePlacement::cdc_nodes

  double cdc_total() const {
    double s = 0;
    for (double v : cdc_gbps) s += v;
    return s;
  }
  double total() const { return afdc_gbps + mfdc_gbps + cdc_total(); }
  bool operator==(const GroupFlow&) const = default;
};

// Solar and battery bookkeeping of one AFDC in one hour; soc is at the end of the hour.
struct AfdcEnergy {
  EnergyDispatch dispatch;
  double soc_kwh = 0;
  bool operator==(const AfdcEnergy&) const = default;
};

struct PlanHour {
  std::vector<GroupFlow> groups;
  std::vector<AfdcEnergy> energy;  // indexed by group; zero where the group has no AFDC
  TrafficMatrix core_traffic;
  std::vector<std::int64_t> wavelengths;  // node-pair lightpath counts, row-major
  bool operator==(const PlanHour&) const = default;
};

// The full hourly decision shared by the optimizer, the heuristics and the verifier.
struct PlacementPlan {
  std::vector<PlanHour> hours;
  double objective_kwh = 0;

  int hour_count() const noexcept { return static_cast<int>(hours.size()); }
};

inline PlacementPlan zero_plan(const Instance& inst) {
  PlacementPlan plan;
  const int n = inst.topo().node_count();
  for (int h = 0; h < inst.hours(); ++h) {
    PlanHour hour;
    hour.groups.assign(inst.topo().group_count(), GroupFlow{0, 0, std::vector<double>(inst.sites().cdc_count(), 0.0)});
    hour.energy.assign(inst.topo().group_count(), AfdcEnergy{});
    hour.core_traffic = TrafficMatrix(n);
    hour.wavelengths.assign(static_cast<std::size_t>(n) * n, 0);
    plan.hours.push_back(std::move(hour));
  }
  return plan;
}

// Rebuilds the core traffic matrix and lightpath counts from the CDC flows.
inline void derive_core_traffic(PlanHour& hour, const Instance& inst) {
  const int n = inst.topo().node_count();
  hour.core_traffic = TrafficMatrix(n);
  for (int g = 0; g < static_cast<int>(hour.groups.size()); ++g) {
    const int home = inst.topo().home_node(g);
    const auto& flow = hour.groups[g];
    for (int c = 0; c < static_cast<int>(flow.cdc_gbps.size()); ++c) {
      const int src = inst.sites().cdc_nodes.at(c);
      if (src != home) hour.core_traffic.at(src, home) += flow.cdc_gbps[c];
    }
  }
  hour.wavelengths.assign(static_cast<std::size_t>(n) * n, 0);
  for (int s = 0; s < n; ++s)
    for (int d = 0; d < n; ++d)
      hour.wavelengths[static_cast<std::size_t>(s) * n + d] =
          step_count(hour.core_traffic.at(s, d), inst.params().wavelength_capacity_gbps);
}

inline void derive_core_traffic(PlacementPlan& plan, const Instance& inst) {
  for (auto& h : plan.hours) derive_core_traffic(h, inst);
}

inline constexpr std::string_view kPlanCsvHeader =
    "hour,group,afdc_gbps,mfdc_gbps,cdc_gbps,solar_serve_kwh,solar_charge_kwh,curtailed_kwh,discharge_kwh,soc_kwh";

// One row per (hour, group). After the ten fixed columns come per-CDC columns
// `cdc_<node>_gbps`, so the file reloads without losing the CDC split.
inline std::string emit_plan_csv(const PlacementPlan& plan, const Instance& inst) {
  std::string out(kPlanCsvHeader);
  for (int node : inst.sites().cdc_nodes) out += ",cdc_" + inst.topo().nodes()[node].name + "_gbps";
  out += "\n";
  auto num = [](double v) { return text::format_exact(v); };
  for (int h = 0; h < plan.hour_count(); ++h) {
    const auto& hour = plan.hours[h];
    for (int g = 0; g < static_cast<int>(hour.groups.size()); ++g) {
      const auto& f = hour.groups[g];
      const auto& e = hour.energy[g];
      out += std::to_string(h) + "," + inst.topo().groups()[g].name + "," + num(f.afdc_gbps) + "," + num(f.mfdc_gbps) +
             "," + num(f.cdc_total()) + "," + num(e.dispatch.solar_serve_kwh) + "," + num(e.dispatch.solar_charge_kwh) +
             "," + num(e.dispatch.curtailed_kwh) + "," + num(e.dispatch.discharge_kwh) + "," + num(e.soc_kwh);
      for (double c : f.cdc_gbps) out += "," + num(c);
      out += "\n";
    }
  }
  return out;
}

inline PlacementPlan load_plan_csv(std::string_view doc, const Instance& inst) {
  const auto rows = text::lines(doc);
  if (rows.empty()) throw ParseError("empty plan file");
  const auto header = text::split(text::trim(rows[0]), ',');
  const auto fixed = text::split(kPlanCsvHeader, ',');
  const std::size_t ncdc = inst.sites().cdc_nodes.size();
  if (header.size() != fixed.size() + ncdc) throw ParseError("plan header has wrong column count", 1);
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (header[i] != fixed[i]) throw ParseError("expected column '" + fixed[i] + "'", 1);
  for (std::size_t c = 0; c < ncdc; ++c) {
    const std::string want = "cdc_" + inst.topo().nodes()[inst.sites().cdc_nodes[c]].name + "_gbps";
    if (header[fixed.size() + c] != want) throw ParseError("expected column '" + want + "'", 1);
  }
  PlacementPlan plan = zero_plan(inst);
  std::vector<std::vector<bool>> seen(inst.hours(), std::vector<bool>(inst.topo().group_count(), false));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int lineno = static_cast<int>(r + 1);
    if (text::trim(rows[r]).empty()) continue;
    const auto cells = text::split(text::trim(rows[r]), ',');
    if (cells.size() != header.size()) throw ParseError("wrong cell count", lineno);
    long long hour = 0;
    if (!text::parse_int(cells[0], hour) || hour < 0 || hour >= inst.hours())
      throw ParseError("bad hour '" + cells[0] + "'", lineno);
    const auto g = inst.topo().find_group(cells[1]);
    if (!g) throw ParseError("unknown group '" + cells[1] + "'", lineno);
    if (seen[hour][*g]) throw ParseError("duplicate row for hour " + cells[0] + " group " + cells[1], lineno);
    seen[hour][*g] = true;
    std::vector<double> v(cells.size(), 0.0);
    for (std::size_t i = 2; i < cells.size(); ++i) v[i] = text::require_double(cells[i], header[i], lineno);
    auto& f = plan.hours[hour].groups[*g];
    auto& e = plan.hours[hour].energy[*g];
    f.afdc_gbps = v[2];
    f.mfdc_gbps = v[3];
    for (std::size_t c = 0; c < ncdc; ++c) f.cdc_gbps[c] = v[fixed.size() + c];
    if (!rel_equal(f.cdc_total(), v[4], 1e-9)) throw ParseError("cdc_gbps does not match per-CDC columns", lineno);
    e.dispatch = {v[5], v[6], v[7], v[8]};
    e.soc_kwh = v[9];
  }
  for (int h = 0; h < inst.hours(); ++h)
    for (int g = 0; g < inst.topo().group_count(); ++g)
      if (!seen[h][g])
        throw ParseError("missing row for hour " + std::to_string(h) + " group " + inst.topo().groups()[g].name);
  derive_core_traffic(plan, inst);
  return plan;
}

}  // namespace vodfog
