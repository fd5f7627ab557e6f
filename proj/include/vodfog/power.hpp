#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vodfog/error.hpp"
#include "vodfog/params.hpp"
#include "vodfog/topology.hpp"
#include "vodfog/util.hpp"

namespace vodfog {

// Gbps offered between every ordered pair of core nodes in one hour.
class TrafficMatrix {
 public:
  explicit TrafficMatrix(int nodes = 0) : n_(nodes), gbps_(static_cast<std::size_t>(nodes) * nodes, 0.0) {}
  int size() const noexcept { return n_; }
  double& at(int src, int dst) { return gbps_.at(static_cast<std::size_t>(src) * n_ + dst); }
  double at(int src, int dst) const { return gbps_.at(static_cast<std::size_t>(src) * n_ + dst); }
  bool operator==(const TrafficMatrix&) const = default;

 private:
  int n_;
  std::vector<double> gbps_;
};

inline void require_non_negative(double v, const char* what) {
  if (v < -kFeasibilityTol) throw Error(std::string("negative ") + what);
}

// Equipment tally for the core under lightpath bypass. Power figures are
// already scaled by pue_n.
struct CorePowerDetail {
  std::int64_t wavelengths = 0;
  std::int64_t fibres = 0;
  std::int64_t edfas = 0;
  std::int64_t regenerators = 0;
  double router_ports_w = 0;
  double transponders_w = 0;
  double edfa_w = 0;
  double regenerator_w = 0;
  double optical_switch_w = 0;  // idle floor, independent of traffic
  std::vector<std::int64_t> arc_wavelengths;

  double traffic_w() const { return router_ports_w + transponders_w + edfa_w + regenerator_w; }
  double total_w() const { return traffic_w() + optical_switch_w; }
};

// Each node pair gets ceil(traffic / wavelength capacity) lightpaths riding
// its shortest physical route. A lightpath costs a router port and a
// transponder at both ends plus floor(km / reach) regenerators; each directed
// arc lights ceil(wavelengths / wavelengths_per_fibre) fibres, and every lit
// fibre carries floor(km / span) + 1 EDFAs.
inline CorePowerDetail core_power_detail(const CoreTopology& topo, const RouteTable& routes,
                                         const TrafficMatrix& traffic, const PowerParams& p) {
  if (traffic.size() != topo.node_count()) throw Error("traffic matrix size does not match topology");
  CorePowerDetail d;
  d.arc_wavelengths.assign(topo.arc_count(), 0);
  double ports = 0, transponders = 0, regens = 0;
  for (int s = 0; s < topo.node_count(); ++s)
    for (int t = 0; t < topo.node_count(); ++t) {
      const double gbps = traffic.at(s, t);
      require_non_negative(gbps, "core traffic");
      if (s == t) continue;
      const auto w = step_count(gbps, p.wavelength_capacity_gbps);
      if (w == 0) continue;
      d.wavelengths += w;
      ports += 2.0 * w;
      transponders += 2.0 * w;
      const auto r = w * static_cast<std::int64_t>(std::floor(routes.km(s, t) / p.regen_reach_km));
      d.regenerators += r;
      regens += static_cast<double>(r);
      for (int arc : routes.arcs(s, t)) d.arc_wavelengths[arc] += w;
    }
  for (int arc = 0; arc < topo.arc_count(); ++arc) {
    const auto f = (d.arc_wavelengths[arc] + p.wavelengths_per_fibre - 1) / p.wavelengths_per_fibre;
    const double km = topo.links()[arc / 2].km;
    const auto amps = f * (static_cast<std::int64_t>(std::floor(km / p.edfa_span_km)) + 1);
    d.fibres += f;
    d.edfas += amps;
  }
  d.router_ports_w = ports * p.core_router_port_w * p.pue_n;
  d.transponders_w = transponders * p.transponder_w * p.pue_n;
  d.regenerator_w = regens * p.regenerator_w * p.pue_n;
  d.edfa_w = static_cast<double>(d.edfas) * p.edfa_w * p.pue_n;
  d.optical_switch_w = topo.node_count() * p.optical_switch_w * p.pue_n;
  return d;
}

// Core network power in W including the optical-switch floor.
inline double core_power(const CoreTopology& topo, const TrafficMatrix& traffic, const PowerParams& p) {
  const RouteTable routes(topo);
  return core_power_detail(topo, routes, traffic, p).total_w();
}

// Metro power for one node: edge-router ports and Ethernet switches, without PUE.
inline double metro_node_it_w(double load_gbps, const PowerParams& p) {
  require_non_negative(load_gbps, "metro load");
  return static_cast<double>(step_count(load_gbps, p.switch_bitrate_gbps)) * p.metro_eth_switch_w +
         static_cast<double>(step_count(load_gbps, p.router_port_bitrate_gbps)) * p.edge_port_w();
}

// Metro network power in W for per-node loads, scaled by pue_n.
inline double metro_power(std::span<const double> load_gbps, const PowerParams& p) {
  double it = 0;
  for (double l : load_gbps) it += metro_node_it_w(l, p);
  return it * p.pue_n;
}

// Traffic crossing one access group's OLTs: from its own AFDC, and from the
// metro (MFDC and CDC traffic).
struct AccessLoad {
  double afdc_gbps = 0;
  double upstream_gbps = 0;
};

// Active OLTs: each OLT carries olt_metro_capacity_gbps from the metro and
// olt_afdc_capacity_gbps from the AFDC, and the AFDC link is a single
// connection, so AFDC traffic above olt_afdc_capacity_gbps is infeasible.
inline std::int64_t olt_count(const AccessLoad& load, const PowerParams& p) {
  require_non_negative(load.afdc_gbps, "access load");
  require_non_negative(load.upstream_gbps, "access load");
  if (!within_capacity(load.afdc_gbps, p.olt_afdc_capacity_gbps))
    throw CapacityError("AFDC traffic " + std::to_string(load.afdc_gbps) + " Gbps exceeds OLT link capacity");
  return std::max(step_count(load.upstream_gbps, p.olt_metro_capacity_gbps),
                  step_count(load.afdc_gbps, p.olt_afdc_capacity_gbps));
}

inline double access_power(std::span<const AccessLoad> loads, const PowerParams& p) {
  double olts = 0;
  for (const auto& l : loads) olts += static_cast<double>(olt_count(l, p));
  return olts * p.olt_w * p.pue_n;
}

// Convenience form for groups fed entirely through the metro.
inline double access_power(std::span<const double> upstream_gbps, const PowerParams& p) {
  std::vector<AccessLoad> loads;
  loads.reserve(upstream_gbps.size());
  for (double g : upstream_gbps) loads.push_back({0.0, g});
  return access_power(loads, p);
}

struct DcCounts {
  std::int64_t servers = 0;
  std::int64_t switches = 0;
  std::int64_t ports = 0;
};

inline DcCounts dc_counts(Tier tier, double load_gbps, const PowerParams& p) {
  require_non_negative(load_gbps, "data centre load");
  const double cap = p.tier_capacity_gbps(tier);
  if (!within_capacity(load_gbps, cap))
    throw CapacityError(std::string(to_string(tier)) + " load " + std::to_string(load_gbps) +
                        " Gbps exceeds capacity " + std::to_string(cap) + " Gbps");
  return {step_count(load_gbps, p.server_capacity_gbps), step_count(load_gbps, p.tier_switch_bitrate(tier)),
          step_count(load_gbps, p.router_port_bitrate_gbps)};
}

// IT power of one data centre (servers plus its own networking), before PUE.
inline double dc_it_power(Tier tier, const DcCounts& c, const PowerParams& p) {
  const double compute = static_cast<double>(c.servers) * p.server_w;
  if (p.dc_power_mode == DcPowerMode::ratio) return compute * p.net_to_compute_ratio;
  return compute + static_cast<double>(c.switches) * p.tier_switch_w(tier) +
         static_cast<double>(c.ports) * p.tier_port_w(tier);
}

// Facility power in W of one data centre of `tier` serving `load_gbps`.
inline double dc_power(Tier tier, double load_gbps, const PowerParams& p) {
  return p.pue(tier) * dc_it_power(tier, dc_counts(tier, load_gbps, p), p);
}

}  // namespace vodfog
