#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vodfog/demand.hpp"
#include "vodfog/energy.hpp"
#include "vodfog/error.hpp"
#include "vodfog/params.hpp"
#include "vodfog/scenario.hpp"
#include "vodfog/topology.hpp"

namespace vodfog {

// Everything a study reads from its config file.
struct RunConfig {
  CoreTopology topo;
  SitePlacement sites;
  DemandProfile demand;
  PowerParams params;
  ScenarioConfig scenario;
  SolarProfile solar;
  // ESD used by the scenario-C study (the configured one, or the default battery).
  EsdParams study_esd;
  std::vector<double> sweep_pue_mf{1.1, 1.15, 1.2};
  std::vector<double> sweep_pue_af{1.1, 1.15, 1.2};

  Instance instance() const { return Instance(topo, sites, demand, params, scenario, solar); }
  Instance instance(const ScenarioConfig& sc, const PowerParams& p) const {
    return Instance(topo, sites, demand, p, sc, solar);
  }
};

namespace detail {

inline bool parse_bool(std::string_view v, std::string_view key, int line) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ParseError("expected on/off for " + std::string(key), line);
}

inline EnergySource parse_source(std::string_view v, std::string_view key, int line) {
  if (v == "brown") return EnergySource::brown;
  if (v == "renewable") return EnergySource::renewable;
  if (v == "solar") return EnergySource::solar;
  throw ParseError("expected brown, renewable or solar for " + std::string(key), line);
}

inline std::vector<double> parse_list(std::string_view v, std::string_view key, int line) {
  std::vector<double> out;
  for (const auto& item : text::split(v, ',')) out.push_back(text::require_double(text::trim(item), std::string(key), line));
  if (out.empty()) throw ParseError("empty list for " + std::string(key), line);
  return out;
}

inline std::string read_config_file(const std::filesystem::path& p, const char* what) {
  try {
    return text::read_file(p.string());
  } catch (const Error&) {
    throw ParseError(std::string("cannot read ") + what + " file '" + p.string() + "'");
  }
}

}  // namespace detail

// Flat `key = value` config; `#` comments; relative paths resolve against the
// config file's directory. Unknown keys are errors.
//
//   topology, placement, demand, solar_profile, params   file paths
//   cdc_count                      CDCs in the default placement (no placement file)
//   demand_peak_gbps, demand_shape (flat | evening_peak), demand_ratio
//                                  synthetic demand when no demand file is given
//   cdc_source, mfdc_source, afdc_source   brown | renewable | solar
//   use_cdc, use_mfdc, use_afdc    on | off
//   solar_area_m2, solar_efficiency
//   esd                            on | off
//   esd_e_max_kwh, esd_eta_charge, esd_eta_discharge,
//   esd_max_charge_kwh_per_hour, esd_max_discharge_kwh_per_hour
//   initial_soc_kwh, cyclic_esd
//   sweep_pue_mf, sweep_pue_af     comma-separated grids
//   any PowerParams key            overrides the params file
inline RunConfig load_config_text(std::string_view doc, const std::filesystem::path& base_dir) {
  std::map<std::string, std::pair<std::string, int>> kv;
  int lineno = 0;
  for (const auto& raw : text::lines(doc)) {
    ++lineno;
    const auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", lineno);
    std::string key(text::trim(line.substr(0, eq)));
    std::string value(text::trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError("missing key", lineno);
    if (!kv.emplace(key, std::make_pair(value, lineno)).second) throw ParseError("duplicate key '" + key + "'", lineno);
  }
  std::set<std::string> used;
  auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    used.insert(key);
    return it->second;
  };
  auto path_of = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() ? p : base_dir / p;
  };

  const auto topo_key = take("topology");
  if (!topo_key) throw ParseError("config needs a topology file");
  CoreTopology topo = load_topology(detail::read_config_file(path_of(topo_key->first), "topology"));

  SitePlacement sites;
  if (auto v = take("placement")) {
    sites = load_placement(detail::read_config_file(path_of(v->first), "placement"), topo);
  } else {
    long long n = 5;
    if (auto c = take("cdc_count"))
      if (!text::parse_int(c->first, n) || n < 0) throw ParseError("cdc_count must be a non-negative integer", c->second);
    sites = default_placement(topo, static_cast<int>(n));
  }

  PowerParams params;
  if (auto v = take("params")) params = load_power_params(detail::read_config_file(path_of(v->first), "params"));
  ScenarioConfig sc;
  EsdParams esd_fields;
  bool esd_on = false;
  std::vector<double> grid_mf{1.1, 1.15, 1.2}, grid_af{1.1, 1.15, 1.2};
  std::optional<double> peak, ratio;
  std::optional<DemandShape> shape;
  std::optional<std::string> demand_file, solar_file;

  for (const auto& [key, entry] : kv) {
    const auto& [value, line] = entry;
    if (used.count(key) || key == "cdc_count") continue;
    used.insert(key);
    auto num = [&] { return text::require_double(value, key, line); };
    if (set_power_param(params, key, value, line)) continue;
    if (key == "demand") demand_file = value;
    else if (key == "solar_profile") solar_file = value;
    else if (key == "demand_peak_gbps") peak = num();
    else if (key == "demand_ratio") ratio = num();
    else if (key == "demand_shape") {
      if (value == "flat") shape = DemandShape::flat;
      else if (value == "evening_peak") shape = DemandShape::evening_peak;
      else throw ParseError("demand_shape must be flat or evening_peak", line);
    } else if (key == "cdc_source") sc.cdc_source = detail::parse_source(value, key, line);
    else if (key == "mfdc_source") sc.mfdc_source = detail::parse_source(value, key, line);
    else if (key == "afdc_source") sc.afdc_source = detail::parse_source(value, key, line);
    else if (key == "use_cdc") sc.use_cdc = detail::parse_bool(value, key, line);
    else if (key == "use_mfdc") sc.use_mfdc = detail::parse_bool(value, key, line);
    else if (key == "use_afdc") sc.use_afdc = detail::parse_bool(value, key, line);
    else if (key == "solar_area_m2") sc.solar_array.area_m2 = num();
    else if (key == "solar_efficiency") sc.solar_array.efficiency = num();
    else if (key == "esd") esd_on = detail::parse_bool(value, key, line);
    else if (key == "esd_e_max_kwh") esd_fields.e_max_kwh = num();
    else if (key == "esd_eta_charge") esd_fields.eta_charge = num();
    else if (key == "esd_eta_discharge") esd_fields.eta_discharge = num();
    else if (key == "esd_max_charge_kwh_per_hour") esd_fields.max_charge_kwh_per_hour = num();
    else if (key == "esd_max_discharge_kwh_per_hour") esd_fields.max_discharge_kwh_per_hour = num();
    else if (key == "initial_soc_kwh") sc.initial_soc_kwh = num();
    else if (key == "cyclic_esd") sc.cyclic_esd = detail::parse_bool(value, key, line);
    else if (key == "sweep_pue_mf") grid_mf = detail::parse_list(value, key, line);
    else if (key == "sweep_pue_af") grid_af = detail::parse_list(value, key, line);
    else throw ParseError("unknown config key '" + key + "'", line);
  }
  validate(params);
  validate(esd_fields);
  validate(sc.solar_array);
  if (esd_on) sc.esd = esd_fields;
  for (double v : grid_mf)
    if (v < 1) throw ValidationError(std::string("sweep PUE values must be >= 1"));
  for (double v : grid_af)
    if (v < 1) throw ValidationError(std::string("sweep PUE values must be >= 1"));

  DemandProfile demand;
  if (demand_file) {
    if (peak || shape || ratio) throw ParseError("give either a demand file or synthetic demand keys, not both");
    demand = load_demand(detail::read_config_file(path_of(*demand_file), "demand"), topo);
  } else if (peak) {
    demand = synth_demand(*peak, shape.value_or(DemandShape::evening_peak), topo, kHoursPerDay, ratio.value_or(4.0));
  } else {
    throw ParseError("config needs a demand file or demand_peak_gbps");
  }
  SolarProfile solar = solar_file ? load_solar_profile(detail::read_config_file(path_of(*solar_file), "solar profile"))
                                  : default_solar_profile();
  RunConfig cfg{std::move(topo), std::move(sites), std::move(demand), params, sc, solar, esd_fields, grid_mf, grid_af};
  (void)cfg.instance();  // validates the combination
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  const std::string doc = detail::read_config_file(path, "config");
  return load_config_text(doc, path.parent_path());
}

// The brown-CDC reference: every request served from a CDC on grid power.
inline ScenarioConfig baseline_scenario() {
  ScenarioConfig sc;
  sc.use_mfdc = false;
  sc.use_afdc = false;
  return sc;
}

// Renewable CDCs and MFDCs, solar-assisted AFDCs, no battery.
inline ScenarioConfig solar_scenario(const RunConfig& cfg) {
  ScenarioConfig sc;
  sc.cdc_source = EnergySource::renewable;
  sc.mfdc_source = EnergySource::renewable;
  sc.afdc_source = cfg.sites.afdc_groups.empty() ? EnergySource::brown : EnergySource::solar;
  sc.solar_array = cfg.scenario.solar_array;
  return sc;
}

// The solar scenario plus a battery at every AFDC.
inline ScenarioConfig battery_scenario(const RunConfig& cfg) {
  ScenarioConfig sc = solar_scenario(cfg);
  if (sc.afdc_source == EnergySource::solar) {
    sc.esd = cfg.study_esd;
    sc.initial_soc_kwh = cfg.scenario.initial_soc_kwh;
    sc.cyclic_esd = cfg.scenario.cyclic_esd;
  }
  return sc;
}

}  // namespace vodfog
