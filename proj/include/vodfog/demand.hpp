#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "vodfog/error.hpp"
#include "vodfog/topology.hpp"
#include "vodfog/util.hpp"

namespace vodfog {

// VoD demand in Gbps, indexed [group][hour]. Files always carry 24 hours;
// shorter horizons exist only for small in-memory instances.
class DemandProfile {
 public:
  DemandProfile() = default;
  DemandProfile(int groups, int hours) : hours_(hours), gbps_(groups, std::vector<double>(hours, 0.0)) {
    if (groups < 0 || hours <= 0) throw Error("demand profile needs a positive horizon");
  }

  int groups() const noexcept { return static_cast<int>(gbps_.size()); }
  int hours() const noexcept { return hours_; }
  double at(int group, int hour) const { return gbps_.at(group).at(hour); }
  void set(int group, int hour, double gbps) {
    if (!(gbps >= 0) || !std::isfinite(gbps)) throw Error("demand must be a finite value >= 0");
    gbps_.at(group).at(hour) = gbps;
  }
  double total_at(int hour) const {
    double s = 0;
    for (const auto& row : gbps_) s += row.at(hour);
    return s;
  }
  bool operator==(const DemandProfile&) const = default;

 private:
  int hours_ = kHoursPerDay;
  std::vector<std::vector<double>> gbps_;
};

// CSV with header `group,h0,...,h23` and one row per access group. Groups
// absent from the file have zero demand; `#` lines are comments.
inline DemandProfile load_demand(std::string_view doc, const CoreTopology& topo) {
  const auto rows = text::lines(doc);
  std::size_t r = 0;
  auto blank = [&](std::size_t i) { return text::trim(rows[i]).empty() || text::trim(rows[i]).front() == '#'; };
  while (r < rows.size() && blank(r)) ++r;
  if (r == rows.size()) throw ParseError("empty demand file");
  const auto header = text::split(text::trim(rows[r]), ',');
  if (header.empty() || header[0] != "group") throw ParseError("header must start with 'group'", static_cast<int>(r + 1));
  for (int h = 0; h < kHoursPerDay; ++h) {
    const std::string want = "h" + std::to_string(h);
    if (static_cast<int>(header.size()) <= h + 1 || header[h + 1] != want)
      throw ParseError("missing hour column " + want, static_cast<int>(r + 1));
  }
  if (header.size() != kHoursPerDay + 1) throw ParseError("unexpected extra columns", static_cast<int>(r + 1));
  DemandProfile profile(topo.group_count(), kHoursPerDay);
  std::vector<bool> seen(topo.group_count(), false);
  for (++r; r < rows.size(); ++r) {
    const int lineno = static_cast<int>(r + 1);
    if (blank(r)) continue;
    const auto cells = text::split(text::trim(rows[r]), ',');
    if (cells.size() != header.size()) throw ParseError("expected " + std::to_string(header.size()) + " cells", lineno);
    const auto g = topo.find_group(cells[0]);
    if (!g) throw ParseError("unknown group id '" + cells[0] + "'", lineno);
    if (seen[*g]) throw ParseError("duplicate group '" + cells[0] + "'", lineno);
    seen[*g] = true;
    for (int h = 0; h < kHoursPerDay; ++h) {
      double v = 0;
      if (!text::parse_double(cells[h + 1], v))
        throw ParseError("bad number in row '" + cells[0] + "' column h" + std::to_string(h), lineno);
      if (v < 0) throw ParseError("negative demand in row '" + cells[0] + "' column h" + std::to_string(h), lineno);
      profile.set(*g, h, v);
    }
  }
  return profile;
}

inline std::string emit_demand(const DemandProfile& d, const CoreTopology& topo) {
  if (d.groups() != topo.group_count()) throw Error("demand profile does not match topology");
  std::string out = "group";
  for (int h = 0; h < d.hours(); ++h) out += ",h" + std::to_string(h);
  out += "\n";
  for (int g = 0; g < d.groups(); ++g) {
    out += topo.groups()[g].name;
    for (int h = 0; h < d.hours(); ++h) out += "," + text::format_exact(d.at(g, h));
    out += "\n";
  }
  return out;
}

enum class DemandShape { flat, evening_peak };

// Relative diurnal level in [1/ratio, 1]: minimum at 05:00, maximum at 21:00,
// raised-cosine ramps in between.
inline double evening_peak_level(int hour, double ratio = 4.0) {
  const double lo = 1.0 / ratio;
  const double t = static_cast<double>(((hour - 5) % 24 + 24) % 24);  // hours since 05:00
  double rise;
  if (t <= 16.0) rise = (1.0 - std::cos(std::numbers::pi * t / 16.0)) / 2.0;
  else rise = (1.0 + std::cos(std::numbers::pi * (t - 16.0) / 8.0)) / 2.0;
  return lo + (1.0 - lo) * rise;
}

inline DemandProfile synth_demand(double peak_gbps, DemandShape shape, const CoreTopology& topo,
                                  int hours = kHoursPerDay, double ratio = 4.0) {
  if (!(peak_gbps >= 0)) throw Error("peak demand must be >= 0");
  if (!(ratio >= 1)) throw Error("peak/trough ratio must be >= 1");
  DemandProfile d(topo.group_count(), hours);
  for (int g = 0; g < topo.group_count(); ++g)
    for (int h = 0; h < hours; ++h)
      d.set(g, h, shape == DemandShape::flat ? peak_gbps : peak_gbps * evening_peak_level(h, ratio));
  return d;
}

}  // namespace vodfog
