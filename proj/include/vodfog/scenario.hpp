#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vodfog/demand.hpp"
#include "vodfog/energy.hpp"
#include "vodfog/error.hpp"
#include "vodfog/params.hpp"
#include "vodfog/topology.hpp"

namespace vodfog {

enum class EnergySource { brown, renewable, solar };

inline const char* to_string(EnergySource s) {
  switch (s) {
    case EnergySource::brown: return "brown";
    case EnergySource::renewable: return "renewable";
    case EnergySource::solar: return "solar";
  }
  return "?";
}

// Energy sourcing and tier availability for one study. PUEs live in
// PowerParams so every power routine reads them from one place.
struct ScenarioConfig {
  EnergySource cdc_source = EnergySource::brown;
  EnergySource mfdc_source = EnergySource::brown;
  // `solar` means brown grid power topped up by the AFDC's own panels.
  EnergySource afdc_source = EnergySource::brown;
  bool use_cdc = true;
  bool use_mfdc = true;
  bool use_afdc = true;
  SolarArray solar_array;
  std::optional<EsdParams> esd;
  double initial_soc_kwh = 0;
  bool cyclic_esd = true;

  EnergySource source(Tier t) const {
    switch (t) {
      case Tier::cdc: return cdc_source;
      case Tier::mfdc: return mfdc_source;
      case Tier::afdc: return afdc_source;
    }
    return EnergySource::brown;
  }
  bool uses(Tier t) const {
    switch (t) {
      case Tier::cdc: return use_cdc;
      case Tier::mfdc: return use_mfdc;
      case Tier::afdc: return use_afdc;
    }
    return false;
  }
  // Whether the tier's facility power counts as brown (fully or partly).
  bool draws_brown(Tier t) const { return source(t) != EnergySource::renewable; }
};

// Everything one optimization or evaluation needs, validated together.
class Instance {
 public:
  Instance(CoreTopology topo, SitePlacement sites, DemandProfile demand, PowerParams params, ScenarioConfig scenario,
           SolarProfile solar = default_solar_profile())
      : topo_(std::move(topo)),
        sites_(std::move(sites)),
        demand_(std::move(demand)),
        params_(params),
        scenario_(std::move(scenario)),
        solar_(solar),
        routes_(topo_) {
    validate_all();
  }

  const CoreTopology& topo() const noexcept { return topo_; }
  const SitePlacement& sites() const noexcept { return sites_; }
  const DemandProfile& demand() const noexcept { return demand_; }
  const PowerParams& params() const noexcept { return params_; }
  const ScenarioConfig& scenario() const noexcept { return scenario_; }
  const SolarProfile& solar() const noexcept { return solar_; }
  const RouteTable& routes() const noexcept { return routes_; }
  int hours() const noexcept { return demand_.hours(); }

  bool afdc_usable(int group) const { return scenario_.use_afdc && sites_.has_afdc(group); }
  bool mfdc_usable(int node) const { return scenario_.use_mfdc && sites_.has_mfdc(node); }
  bool cdc_usable() const { return scenario_.use_cdc && sites_.cdc_count() > 0; }
  bool has_solar() const { return scenario_.afdc_source == EnergySource::solar; }
  bool has_esd() const { return has_solar() && scenario_.esd.has_value(); }

  // Solar energy one AFDC harvests during hour h, kWh.
  double solar_kwh(int hour) const {
    if (!has_solar()) return 0.0;
    return solar_output(solar_, scenario_.solar_array, hour) / 1000.0;
  }

 private:
  void validate_all() const {
    validate(params_);
    validate_placement(sites_, topo_);
    std::vector<std::string> problems;
    if (demand_.groups() != topo_.group_count())
      problems.push_back("demand has " + std::to_string(demand_.groups()) + " groups, topology has " +
                         std::to_string(topo_.group_count()));
    if (demand_.hours() > kHoursPerDay) problems.emplace_back("horizon longer than one day");
    if (scenario_.cdc_source == EnergySource::solar || scenario_.mfdc_source == EnergySource::solar)
      problems.emplace_back("solar supply is only modelled for AFDCs");
    if (scenario_.afdc_source == EnergySource::solar) {
      if (sites_.afdc_groups.empty() || !scenario_.use_afdc)
        problems.emplace_back("scenario gives AFDCs solar but no AFDC is available");
      try {
        validate(scenario_.solar_array);
      } catch (const ValidationError& e) {
        problems.insert(problems.end(), e.problems().begin(), e.problems().end());
      }
    }
    if (scenario_.esd) {
      if (scenario_.afdc_source != EnergySource::solar)
        problems.emplace_back("an ESD needs solar-powered AFDCs to charge from");
      try {
        validate(*scenario_.esd);
      } catch (const ValidationError& e) {
        problems.insert(problems.end(), e.problems().begin(), e.problems().end());
      }
      if (scenario_.initial_soc_kwh < 0 || scenario_.initial_soc_kwh > scenario_.esd->e_max_kwh)
        problems.emplace_back("initial soc outside [0, e_max]");
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
  }

  CoreTopology topo_;
  SitePlacement sites_;
  DemandProfile demand_;
  PowerParams params_;
  ScenarioConfig scenario_;
  SolarProfile solar_;
  RouteTable routes_;
};

}  // namespace vodfog
