#pragma once

#include <filesystem>
#include <string>

#include "vodfog/config.hpp"
#include "vodfog/scenario.hpp"

namespace fixtures {

using namespace vodfog;

inline std::filesystem::path source_dir() { return VODFOG_SOURCE_DIR; }

inline CoreTopology nsfnet() { return load_topology(text::read_file((source_dir() / "data/nsfnet.topo").string())); }

// Two nodes 800 km apart, one access group each.
inline CoreTopology pair_topo(double km = 800) {
  return load_topology("NODE A 1\nNODE B 1\nLINK A B " + text::format_exact(km) + " 4\n");
}

// Triangle with a 200 km detour beating the 300 km direct link.
inline CoreTopology triangle() {
  return load_topology("NODE A 1\nNODE B 1\nNODE C 1\nLINK A B 300 4\nLINK A C 100 4\nLINK C B 100 4\n");
}

inline SitePlacement sites(std::vector<int> cdc, std::vector<int> mfdc, std::vector<int> afdc) {
  return {std::move(cdc), std::move(mfdc), std::move(afdc)};
}

inline DemandProfile flat_demand(const CoreTopology& topo, int hours, double gbps) {
  DemandProfile d(topo.group_count(), hours);
  for (int g = 0; g < topo.group_count(); ++g)
    for (int h = 0; h < hours; ++h) d.set(g, h, gbps);
  return d;
}

inline ScenarioConfig solar_with_esd(double e_max = 100) {
  ScenarioConfig sc;
  sc.cdc_source = sc.mfdc_source = EnergySource::renewable;
  sc.afdc_source = EnergySource::solar;
  sc.esd = EsdParams{};
  sc.esd->e_max_kwh = e_max;
  return sc;
}

}  // namespace fixtures
