#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vodfog/error.hpp"
#include "vodfog/util.hpp"

namespace vodfog {

enum class Tier { cdc, mfdc, afdc };

inline const char* to_string(Tier t) {
  switch (t) {
    case Tier::cdc: return "cdc";
    case Tier::mfdc: return "mfdc";
    case Tier::afdc: return "afdc";
  }
  return "?";
}

// How data-centre networking power is counted.
//   detailed: explicit switch and router-port counts per tier
//   ratio:    IT power = server power x net_to_compute_ratio
enum class DcPowerMode { detailed, ratio };

// Equipment powers, capacities and PUEs. Units are in the field names.
//
// The first block comes straight from the published parameter table. The
// second block holds core-network and server figures that table does not give;
// they are defaults from the energy-efficient IP-over-WDM literature and are
// meant to be overridden from a parameter file.
struct PowerParams {
  double cloud_router_port_w = 30;
  double fog_router_port_w = 13;
  double cloud_metro_switch_w = 470;
  double access_fog_switch_w = 210;
  double metro_eth_switch_w = 470;
  double olt_w = 904;
  double switch_bitrate_gbps = 600;
  double access_switch_bitrate_gbps = 240;
  double server_capacity_gbps = 1.8;
  double pue_c = 1.1;
  double pue_mf = 1.1;
  double pue_af = 1.1;
  double net_to_compute_ratio = 1.3;
  double pue_n = 1.5;
  double olt_afdc_capacity_gbps = 160;
  double olt_metro_capacity_gbps = 160;
  int afdc_server_count = 88;
  int mfdc_server_count_max = 5000;

  double wavelength_capacity_gbps = 40;
  double core_router_port_w = 1000;
  double transponder_w = 73;
  double edfa_w = 8;
  double regenerator_w = 334;
  double optical_switch_w = 85;
  double edfa_span_km = 80;
  double regen_reach_km = 2500;
  double server_w = 300;
  double router_port_bitrate_gbps = 40;
  int wavelengths_per_fibre = 16;
  // Metro edge-router port power; falls back to fog_router_port_w.
  std::optional<double> metro_edge_port_w;
  // 0 leaves CDC serving capacity unbounded.
  double cdc_capacity_gbps = 0;
  DcPowerMode dc_power_mode = DcPowerMode::detailed;

  double pue(Tier t) const {
    switch (t) {
      case Tier::cdc: return pue_c;
      case Tier::mfdc: return pue_mf;
      case Tier::afdc: return pue_af;
    }
    return 1.0;
  }
  double& pue(Tier t) {
    switch (t) {
      case Tier::cdc: return pue_c;
      case Tier::mfdc: return pue_mf;
      case Tier::afdc: break;
    }
    return pue_af;
  }
  double edge_port_w() const { return metro_edge_port_w.value_or(fog_router_port_w); }

  // Serving capacity of one data centre of the tier; infinity when unbounded.
  double tier_capacity_gbps(Tier t) const {
    switch (t) {
      case Tier::afdc: return afdc_server_count * server_capacity_gbps;
      case Tier::mfdc: return mfdc_server_count_max * server_capacity_gbps;
      case Tier::cdc: break;
    }
    return cdc_capacity_gbps > 0 ? cdc_capacity_gbps : std::numeric_limits<double>::infinity();
  }
  // Server count bound for the tier; -1 when unbounded.
  long long tier_server_limit(Tier t) const {
    switch (t) {
      case Tier::afdc: return afdc_server_count;
      case Tier::mfdc: return mfdc_server_count_max;
      case Tier::cdc: break;
    }
    return -1;
  }
  double tier_switch_w(Tier t) const { return t == Tier::afdc ? access_fog_switch_w : cloud_metro_switch_w; }
  double tier_switch_bitrate(Tier t) const {
    return t == Tier::afdc ? access_switch_bitrate_gbps : switch_bitrate_gbps;
  }
  double tier_port_w(Tier t) const { return t == Tier::cdc ? cloud_router_port_w : fog_router_port_w; }
};

namespace detail {

struct DoubleField {
  const char* key;
  double PowerParams::*member;
};
struct IntField {
  const char* key;
  int PowerParams::*member;
};

inline constexpr std::array<DoubleField, 27> kPowerDoubles{{
    {"cloud_router_port_w", &PowerParams::cloud_router_port_w},
    {"fog_router_port_w", &PowerParams::fog_router_port_w},
    {"cloud_metro_switch_w", &PowerParams::cloud_metro_switch_w},
    {"access_fog_switch_w", &PowerParams::access_fog_switch_w},
    {"metro_eth_switch_w", &PowerParams::metro_eth_switch_w},
    {"olt_w", &PowerParams::olt_w},
    {"switch_bitrate_gbps", &PowerParams::switch_bitrate_gbps},
    {"access_switch_bitrate_gbps", &PowerParams::access_switch_bitrate_gbps},
    {"server_capacity_gbps", &PowerParams::server_capacity_gbps},
    {"pue_c", &PowerParams::pue_c},
    {"pue_mf", &PowerParams::pue_mf},
    {"pue_af", &PowerParams::pue_af},
    {"net_to_compute_ratio", &PowerParams::net_to_compute_ratio},
    {"pue_n", &PowerParams::pue_n},
    {"olt_afdc_capacity_gbps", &PowerParams::olt_afdc_capacity_gbps},
    {"olt_metro_capacity_gbps", &PowerParams::olt_metro_capacity_gbps},
    {"wavelength_capacity_gbps", &PowerParams::wavelength_capacity_gbps},
    {"core_router_port_w", &PowerParams::core_router_port_w},
    {"transponder_w", &PowerParams::transponder_w},
    {"edfa_w", &PowerParams::edfa_w},
    {"regenerator_w", &PowerParams::regenerator_w},
    {"optical_switch_w", &PowerParams::optical_switch_w},
    {"edfa_span_km", &PowerParams::edfa_span_km},
    {"regen_reach_km", &PowerParams::regen_reach_km},
    {"server_w", &PowerParams::server_w},
    {"router_port_bitrate_gbps", &PowerParams::router_port_bitrate_gbps},
    {"cdc_capacity_gbps", &PowerParams::cdc_capacity_gbps},
}};

inline constexpr std::array<IntField, 3> kPowerInts{{
    {"afdc_server_count", &PowerParams::afdc_server_count},
    {"mfdc_server_count_max", &PowerParams::mfdc_server_count_max},
    {"wavelengths_per_fibre", &PowerParams::wavelengths_per_fibre},
}};

}  // namespace detail

// Sets one PowerParams field from text. Returns false for an unknown key;
// throws ParseError for a malformed value.
inline bool set_power_param(PowerParams& p, std::string_view key, std::string_view value, int line = 0) {
  for (const auto& f : detail::kPowerDoubles)
    if (key == f.key) {
      p.*f.member = text::require_double(value, std::string(key), line);
      return true;
    }
  for (const auto& f : detail::kPowerInts)
    if (key == f.key) {
      long long v = 0;
      if (!text::parse_int(value, v)) throw ParseError("bad integer '" + std::string(value) + "' for " + std::string(key), line);
      p.*f.member = static_cast<int>(v);
      return true;
    }
  if (key == "metro_edge_port_w") {
    p.metro_edge_port_w = text::require_double(value, "metro_edge_port_w", line);
    return true;
  }
  if (key == "dc_power_mode") {
    if (value == "detailed") p.dc_power_mode = DcPowerMode::detailed;
    else if (value == "ratio") p.dc_power_mode = DcPowerMode::ratio;
    else throw ParseError("dc_power_mode must be 'detailed' or 'ratio'", line);
    return true;
  }
  return false;
}

inline void validate(const PowerParams& p) {
  std::vector<std::string> problems;
  for (const auto& f : detail::kPowerDoubles) {
    const double v = p.*f.member;
    const std::string key = f.key;
    if (key.starts_with("pue")) {
      if (!(v >= 1.0 && v <= 3.0)) problems.push_back(key + " must lie in [1, 3]");
    } else if (key == "cdc_capacity_gbps") {
      if (v < 0) problems.push_back(key + " must be >= 0");
    } else if (key.ends_with("_w")) {
      if (v < 0) problems.push_back(key + " must be >= 0");
    } else if (!(v > 0)) {
      problems.push_back(key + " must be > 0");
    }
  }
  for (const auto& f : detail::kPowerInts)
    if (p.*f.member <= 0) problems.push_back(std::string(f.key) + " must be > 0");
  if (p.metro_edge_port_w && *p.metro_edge_port_w < 0) problems.emplace_back("metro_edge_port_w must be >= 0");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

// Flat `key = value` parameter file; `#` comments; unknown keys rejected.
inline PowerParams load_power_params(std::string_view doc, PowerParams base = {}) {
  int lineno = 0;
  for (const auto& raw : text::lines(doc)) {
    ++lineno;
    const auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", lineno);
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (!set_power_param(base, key, value, lineno)) throw ParseError("unknown key '" + std::string(key) + "'", lineno);
  }
  validate(base);
  return base;
}

struct SolarArray {
  double area_m2 = 250;
  double efficiency = 0.17;
};

inline void validate(const SolarArray& a) {
  std::vector<std::string> problems;
  if (!(a.area_m2 >= 0)) problems.emplace_back("solar area must be >= 0");
  if (!(a.efficiency > 0 && a.efficiency <= 1)) problems.emplace_back("solar efficiency must lie in (0, 1]");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

// Battery model. Efficiencies are one-way energy efficiencies; the rate caps
// bound kWh entering (charge) or leaving (discharge, before losses) per hour.
struct EsdParams {
  double e_max_kwh = 100;
  double eta_charge = 0.7225;
  double eta_discharge = 0.9025;
  std::optional<double> max_charge_kwh_per_hour;
  std::optional<double> max_discharge_kwh_per_hour;

  double charge_cap() const { return max_charge_kwh_per_hour.value_or(e_max_kwh); }
  double discharge_cap() const { return max_discharge_kwh_per_hour.value_or(e_max_kwh); }
};

inline void validate(const EsdParams& e) {
  std::vector<std::string> problems;
  if (!(e.e_max_kwh > 0)) problems.emplace_back("e_max must be > 0");
  if (!(e.eta_charge > 0 && e.eta_charge <= 1)) problems.emplace_back("eta_charge must lie in (0, 1]");
  if (!(e.eta_discharge > 0 && e.eta_discharge <= 1)) problems.emplace_back("eta_discharge must lie in (0, 1]");
  if (e.max_charge_kwh_per_hour && !(*e.max_charge_kwh_per_hour >= 0)) problems.emplace_back("charge rate must be >= 0");
  if (e.max_discharge_kwh_per_hour && !(*e.max_discharge_kwh_per_hour >= 0))
    problems.emplace_back("discharge rate must be >= 0");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

}  // namespace vodfog
