#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vodfog/error.hpp"
#include "vodfog/params.hpp"
#include "vodfog/util.hpp"

namespace vodfog {

// Hourly irradiance in W/m^2, hour 0 = 00:00-01:00.
struct SolarProfile {
  std::array<double, kHoursPerDay> irradiance{};
};

// Synthetic clear-sky day: zero outside 06:00-18:00, half-sine peaking at
// 1000 W/m^2 at noon.
inline SolarProfile default_solar_profile() {
  SolarProfile s;
  for (int h = 6; h <= 18; ++h) s.irradiance[h] = 1000.0 * std::sin(std::numbers::pi * (h - 6) / 12.0);
  s.irradiance[6] = s.irradiance[18] = 0.0;
  return s;
}

// 24 lines of `hour irradiance_w_per_m2`.
inline SolarProfile load_solar_profile(std::string_view doc) {
  SolarProfile s;
  std::array<bool, kHoursPerDay> seen{};
  int lineno = 0;
  for (const auto& raw : text::lines(doc)) {
    ++lineno;
    const auto tok = text::split_ws(text::strip_comment(raw));
    if (tok.empty()) continue;
    long long hour = 0;
    if (tok.size() != 2 || !text::parse_int(tok[0], hour)) throw ParseError("expected <hour> <irradiance>", lineno);
    if (hour < 0 || hour >= kHoursPerDay) throw ParseError("hour out of range", lineno);
    if (seen[hour]) throw ParseError("duplicate hour " + std::to_string(hour), lineno);
    const double v = text::require_double(tok[1], "irradiance", lineno);
    if (v < 0) throw ParseError("negative irradiance", lineno);
    seen[hour] = true;
    s.irradiance[hour] = v;
  }
  for (int h = 0; h < kHoursPerDay; ++h)
    if (!seen[h]) throw ParseError("missing hour " + std::to_string(h));
  return s;
}

inline std::string emit_solar_profile(const SolarProfile& s) {
  std::string out;
  for (int h = 0; h < kHoursPerDay; ++h) out += std::to_string(h) + " " + text::format_exact(s.irradiance[h]) + "\n";
  return out;
}

// Panel output in W during `hour`.
inline double solar_output(const SolarProfile& profile, const SolarArray& array, int hour) {
  if (hour < 0 || hour >= kHoursPerDay) throw Error("hour " + std::to_string(hour) + " out of range");
  return profile.irradiance[hour] * array.area_m2 * array.efficiency;
}

struct EsdState {
  double soc_kwh = 0;
  bool operator==(const EsdState&) const = default;
};

// Stores input_kwh x eta_charge.
inline EsdState esd_charge(EsdState s, const EsdParams& p, double input_kwh) {
  if (input_kwh < 0) throw Error("negative charge input");
  if (input_kwh > p.charge_cap() + kFeasibilityTol) throw Error("charge input exceeds hourly rate");
  const double next = s.soc_kwh + input_kwh * p.eta_charge;
  if (next > p.e_max_kwh + kFeasibilityTol) throw Error("charge would overflow e_max");
  return {std::min(next, p.e_max_kwh)};
}

// Delivers delivered_kwh, drawing delivered_kwh / eta_discharge from the store.
inline EsdState esd_discharge(EsdState s, const EsdParams& p, double delivered_kwh) {
  if (delivered_kwh < 0) throw Error("negative discharge request");
  const double drawn = delivered_kwh / p.eta_discharge;
  if (drawn > p.discharge_cap() + kFeasibilityTol) throw Error("discharge exceeds hourly rate");
  if (drawn > s.soc_kwh + kFeasibilityTol) throw Error("discharge exceeds stored energy");
  return {std::max(0.0, s.soc_kwh - drawn)};
}

// What one AFDC does with its solar and battery energy during one hour (kWh).
struct EnergyDispatch {
  double solar_serve_kwh = 0;
  double solar_charge_kwh = 0;
  double curtailed_kwh = 0;
  double discharge_kwh = 0;  // delivered to the load, after losses
  bool operator==(const EnergyDispatch&) const = default;
};

struct EnergyDayResult {
  std::vector<double> brown_w;
  std::vector<EsdState> soc_after;  // state at the end of each hour
  EsdState final_state;
};

// Steps one AFDC's solar and battery through the horizon.
//
// generation_kwh[h] is the solar energy produced during hour h; load_w[h] the
// AFDC facility power. Without an ESD, charge and discharge must be zero.
// Brown power is whatever the served solar and delivered battery energy do
// not cover.
inline EnergyDayResult simulate_energy_day(std::span<const double> generation_kwh, const std::optional<EsdParams>& esd,
                                           EsdState initial, std::span<const double> load_w,
                                           std::span<const EnergyDispatch> dispatch, bool cyclic) {
  const std::size_t hours = load_w.size();
  if (generation_kwh.size() != hours || dispatch.size() != hours)
    throw Error("generation, load and dispatch must cover the same hours");
  EnergyDayResult out;
  EsdState s = initial;
  if (esd && (s.soc_kwh < -kFeasibilityTol || s.soc_kwh > esd->e_max_kwh + kFeasibilityTol))
    throw EnergyError("initial soc outside [0, e_max]", 0);
  for (std::size_t h = 0; h < hours; ++h) {
    const int hi = static_cast<int>(h);
    const auto& d = dispatch[h];
    if (d.solar_serve_kwh < -kFeasibilityTol || d.solar_charge_kwh < -kFeasibilityTol ||
        d.curtailed_kwh < -kFeasibilityTol || d.discharge_kwh < -kFeasibilityTol)
      throw EnergyError("negative energy flow", hi);
    const double split = d.solar_serve_kwh + d.solar_charge_kwh + d.curtailed_kwh;
    if (std::abs(split - generation_kwh[h]) > kFeasibilityTol * std::max(1.0, generation_kwh[h]))
      throw EnergyError("solar split does not add up to generation", hi);
    if (!esd && (d.solar_charge_kwh > kFeasibilityTol || d.discharge_kwh > kFeasibilityTol))
      throw EnergyError("battery flow without an ESD", hi);
    if (d.solar_charge_kwh > kFeasibilityTol && d.discharge_kwh > kFeasibilityTol)
      throw EnergyError("charge and discharge in the same hour", hi);
    if (esd) {
      try {
        s = esd_charge(s, *esd, std::max(0.0, d.solar_charge_kwh));
        s = esd_discharge(s, *esd, std::max(0.0, d.discharge_kwh));
      } catch (const EnergyError&) {
        throw;
      } catch (const Error& e) {
        throw EnergyError(e.what(), hi);
      }
    }
    out.brown_w.push_back(std::max(0.0, load_w[h] - 1000.0 * (d.solar_serve_kwh + d.discharge_kwh)));
    out.soc_after.push_back(s);
  }
  if (esd && cyclic && s.soc_kwh < initial.soc_kwh - kFeasibilityTol)
    throw EnergyError("cyclic rule: final soc below initial soc", static_cast<int>(hours) - 1);
  out.final_state = s;
  return out;
}

}  // namespace vodfog
