#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vodfog/error.hpp"
#include "vodfog/util.hpp"

namespace vodfog {

struct CoreNode {
  std::string name;
  int access_groups = 1;
};

struct FibreLink {
  int a = 0;
  int b = 0;
  double km = 0;
  int fibres = 1;
};

struct AccessGroup {
  std::string name;
  int node = 0;
};

// Core IP-over-WDM graph plus the access groups homed at each node.
// Immutable once constructed; construction validates every invariant.
class CoreTopology {
 public:
  CoreTopology(std::vector<CoreNode> nodes, std::vector<FibreLink> links)
      : nodes_(std::move(nodes)), links_(std::move(links)) {
    validate();
    build_index();
  }

  const std::vector<CoreNode>& nodes() const noexcept { return nodes_; }
  const std::vector<FibreLink>& links() const noexcept { return links_; }
  const std::vector<AccessGroup>& groups() const noexcept { return groups_; }
  int node_count() const noexcept { return static_cast<int>(nodes_.size()); }
  int link_count() const noexcept { return static_cast<int>(links_.size()); }
  int group_count() const noexcept { return static_cast<int>(groups_.size()); }
  // Directed arcs: arc 2*l runs a->b of link l, arc 2*l+1 runs b->a.
  int arc_count() const noexcept { return 2 * link_count(); }

  std::span<const int> groups_at(int node) const { return groups_by_node_.at(node); }
  int home_node(int group) const { return groups_.at(group).node; }

  // (neighbour, link id) pairs, neighbours ascending.
  std::span<const std::pair<int, int>> adjacency(int node) const { return adjacency_.at(node); }

  std::optional<int> find_node(std::string_view name) const {
    for (int i = 0; i < node_count(); ++i)
      if (nodes_[i].name == name) return i;
    return std::nullopt;
  }
  std::optional<int> find_group(std::string_view name) const {
    for (int i = 0; i < group_count(); ++i)
      if (groups_[i].name == name) return i;
    return std::nullopt;
  }

  int arc_of(int link, int from) const { return 2 * link + (links_.at(link).a == from ? 0 : 1); }

 private:
  void validate() const {
    std::vector<std::string> problems;
    if (nodes_.empty()) problems.emplace_back("topology has no nodes");
    std::set<std::string> names;
    for (const auto& n : nodes_) {
      if (n.name.empty()) problems.emplace_back("empty node id");
      if (!names.insert(n.name).second) problems.push_back("duplicate node '" + n.name + "'");
      if (n.access_groups < 0) problems.push_back("negative access group count at '" + n.name + "'");
    }
    std::set<std::pair<int, int>> seen;
    const int n = static_cast<int>(nodes_.size());
    for (const auto& l : links_) {
      if (l.a < 0 || l.a >= n || l.b < 0 || l.b >= n) {
        problems.emplace_back("link references unknown node");
        continue;
      }
      const std::string tag = nodes_[l.a].name + "-" + nodes_[l.b].name;
      if (l.a == l.b) problems.push_back("self-loop at '" + nodes_[l.a].name + "'");
      if (!(l.km > 0)) problems.push_back("non-positive distance on link " + tag);
      if (l.fibres <= 0) problems.push_back("non-positive fibre count on link " + tag);
      if (!seen.insert(std::minmax(l.a, l.b)).second) problems.push_back("duplicate link " + tag);
    }
    if (problems.empty() && !connected()) problems.emplace_back("disconnected graph");
    if (!problems.empty()) throw ValidationError(std::move(problems));
  }

  bool connected() const {
    const int n = static_cast<int>(nodes_.size());
    std::vector<std::vector<int>> adj(n);
    for (const auto& l : links_) {
      adj[l.a].push_back(l.b);
      adj[l.b].push_back(l.a);
    }
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = true;
          ++count;
          stack.push_back(v);
        }
    }
    return count == n;
  }

  void build_index() {
    adjacency_.assign(nodes_.size(), {});
    for (int l = 0; l < link_count(); ++l) {
      adjacency_[links_[l].a].emplace_back(links_[l].b, l);
      adjacency_[links_[l].b].emplace_back(links_[l].a, l);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
    groups_by_node_.assign(nodes_.size(), {});
    for (int i = 0; i < node_count(); ++i) {
      const auto& node = nodes_[i];
      for (int k = 0; k < node.access_groups; ++k) {
        // A lone group takes the node's name; otherwise groups are numbered from 1.
        std::string name = node.access_groups == 1 ? node.name : node.name + "." + std::to_string(k + 1);
        groups_by_node_[i].push_back(static_cast<int>(groups_.size()));
        groups_.push_back({std::move(name), i});
      }
    }
    std::set<std::string> names;
    for (const auto& g : groups_)
      if (!names.insert(g.name).second) throw ValidationError("duplicate access group id '" + g.name + "'");
  }

  std::vector<CoreNode> nodes_;
  std::vector<FibreLink> links_;
  std::vector<AccessGroup> groups_;
  std::vector<std::vector<int>> groups_by_node_;
  std::vector<std::vector<std::pair<int, int>>> adjacency_;
};

// Parses the line-oriented topology format:
//   NODE <id> <access_groups>
//   LINK <a> <b> <km> <fibres>
// Node ids are normalized to dense integers in order of first appearance.
// Nodes that only appear in LINK records front one access group.
inline CoreTopology load_topology(std::string_view doc) {
  std::vector<CoreNode> nodes;
  std::map<std::string, int, std::less<>> index;
  std::vector<FibreLink> links;
  std::vector<std::string> problems;
  auto node_id = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    index.emplace(name, static_cast<int>(nodes.size()));
    nodes.push_back({name, 1});
    return static_cast<int>(nodes.size()) - 1;
  };
  std::set<std::string> declared;
  int lineno = 0;
  for (const auto& raw : text::lines(doc)) {
    ++lineno;
    const auto tok = text::split_ws(text::strip_comment(raw));
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (tok[0] == "NODE") {
      long long groups = 0;
      if (tok.size() != 3 || !text::parse_int(tok[2], groups)) {
        problems.push_back(where + "expected NODE <id> <access_groups>");
        continue;
      }
      if (!declared.insert(tok[1]).second) {
        problems.push_back(where + "duplicate node '" + tok[1] + "'");
        continue;
      }
      nodes[node_id(tok[1])].access_groups = static_cast<int>(groups);
    } else if (tok[0] == "LINK") {
      double km = 0;
      long long fibres = 0;
      if (tok.size() != 5 || !text::parse_double(tok[3], km) || !text::parse_int(tok[4], fibres)) {
        problems.push_back(where + "expected LINK <a> <b> <km> <fibres>");
        continue;
      }
      links.push_back({node_id(tok[1]), node_id(tok[2]), km, static_cast<int>(fibres)});
    } else {
      problems.push_back(where + "unknown record '" + tok[0] + "'");
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return CoreTopology(std::move(nodes), std::move(links));
}

struct PhysicalPath {
  std::vector<int> nodes;  // empty when src == dst
  double km = 0;
  std::vector<int> links;

  int hops() const noexcept { return static_cast<int>(links.size()); }
};

// Minimum-km route; equal-length routes are broken by the lexicographically
// smallest node sequence.
inline PhysicalPath shortest_physical_path(const CoreTopology& topo, int src, int dst) {
  const int n = topo.node_count();
  if (src < 0 || src >= n || dst < 0 || dst >= n) throw Error("path endpoint out of range");
  if (src == dst) return {};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kTie = 1e-9;
  std::vector<double> dist(n, kInf);
  std::vector<std::vector<int>> route(n);
  std::vector<bool> done(n, false);
  dist[src] = 0;
  route[src] = {src};
  auto better = [&](double d1, const std::vector<int>& r1, double d2, const std::vector<int>& r2) {
    if (d1 < d2 - kTie) return true;
    if (d1 > d2 + kTie) return false;
    return r1 < r2;
  };
  for (;;) {
    int u = -1;
    for (int v = 0; v < n; ++v)
      if (!done[v] && dist[v] < kInf && (u < 0 || better(dist[v], route[v], dist[u], route[u]))) u = v;
    if (u < 0) break;
    done[u] = true;
    if (u == dst) break;
    for (const auto& [v, l] : topo.adjacency(u)) {
      if (done[v]) continue;
      const double nd = dist[u] + topo.links()[l].km;
      auto nr = route[u];
      nr.push_back(v);
      if (dist[v] == kInf || better(nd, nr, dist[v], route[v])) {
        dist[v] = nd;
        route[v] = std::move(nr);
      }
    }
  }
  if (!done[dst]) throw Error("destination '" + topo.nodes()[dst].name + "' unreachable");
  PhysicalPath path;
  path.nodes = route[dst];
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    for (const auto& [v, l] : topo.adjacency(path.nodes[i]))
      if (v == path.nodes[i + 1]) {
        path.links.push_back(l);
        path.km += topo.links()[l].km;
        break;
      }
  }
  return path;
}

// All-pairs bypass routes, computed once per topology.
class RouteTable {
 public:
  explicit RouteTable(const CoreTopology& topo) : n_(topo.node_count()), paths_(n_ * n_) {
    for (int s = 0; s < n_; ++s)
      for (int d = 0; d < n_; ++d) {
        auto& p = paths_[s * n_ + d];
        p = shortest_physical_path(topo, s, d);
        auto& arcs = arcs_.emplace_back();
        for (std::size_t i = 0; i < p.links.size(); ++i) arcs.push_back(topo.arc_of(p.links[i], p.nodes[i]));
      }
  }
  const PhysicalPath& path(int src, int dst) const { return paths_.at(src * n_ + dst); }
  // Directed arcs traversed from src to dst.
  const std::vector<int>& arcs(int src, int dst) const { return arcs_.at(src * n_ + dst); }
  double km(int src, int dst) const { return path(src, dst).km; }

 private:
  int n_;
  std::vector<PhysicalPath> paths_;
  std::vector<std::vector<int>> arcs_;
};

// Which core nodes host cloud / metro-fog data centres and which access
// groups host an access-fog data centre. All id lists are sorted and unique.
struct SitePlacement {
  std::vector<int> cdc_nodes;
  std::vector<int> mfdc_nodes;
  std::vector<int> afdc_groups;

  bool has_mfdc(int node) const { return std::binary_search(mfdc_nodes.begin(), mfdc_nodes.end(), node); }
  bool has_afdc(int group) const { return std::binary_search(afdc_groups.begin(), afdc_groups.end(), group); }
  int cdc_count() const noexcept { return static_cast<int>(cdc_nodes.size()); }
  std::optional<int> cdc_index(int node) const {
    auto it = std::lower_bound(cdc_nodes.begin(), cdc_nodes.end(), node);
    if (it == cdc_nodes.end() || *it != node) return std::nullopt;
    return static_cast<int>(it - cdc_nodes.begin());
  }
  std::optional<int> afdc_index(int group) const {
    auto it = std::lower_bound(afdc_groups.begin(), afdc_groups.end(), group);
    if (it == afdc_groups.end() || *it != group) return std::nullopt;
    return static_cast<int>(it - afdc_groups.begin());
  }
};

inline void validate_placement(const SitePlacement& p, const CoreTopology& topo) {
  std::vector<std::string> problems;
  auto check = [&](const std::vector<int>& ids, int limit, const char* what) {
    if (!std::is_sorted(ids.begin(), ids.end()) || std::adjacent_find(ids.begin(), ids.end()) != ids.end())
      problems.push_back(std::string(what) + " list not sorted/unique");
    for (int id : ids)
      if (id < 0 || id >= limit) problems.push_back(std::string(what) + " id " + std::to_string(id) + " out of range");
  };
  check(p.cdc_nodes, topo.node_count(), "CDC");
  check(p.mfdc_nodes, topo.node_count(), "MFDC");
  check(p.afdc_groups, topo.group_count(), "AFDC");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

// Sum of shortest-path km from each node to all others.
inline std::vector<double> total_distances(const CoreTopology& topo, const RouteTable& routes) {
  std::vector<double> sum(topo.node_count(), 0.0);
  for (int s = 0; s < topo.node_count(); ++s)
    for (int d = 0; d < topo.node_count(); ++d) sum[s] += routes.km(s, d);
  return sum;
}

// CDCs at the `cdc_count` highest-closeness nodes (ties by id); a metro fog DC
// at every node and an access fog DC in every group.
inline SitePlacement default_placement(const CoreTopology& topo, int cdc_count = 5) {
  const RouteTable routes(topo);
  const auto sum = total_distances(topo, routes);
  std::vector<int> order(topo.node_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sum[a] < sum[b]; });
  SitePlacement p;
  p.cdc_nodes.assign(order.begin(), order.begin() + std::min<int>(cdc_count, topo.node_count()));
  std::sort(p.cdc_nodes.begin(), p.cdc_nodes.end());
  p.mfdc_nodes.resize(topo.node_count());
  std::iota(p.mfdc_nodes.begin(), p.mfdc_nodes.end(), 0);
  p.afdc_groups.resize(topo.group_count());
  std::iota(p.afdc_groups.begin(), p.afdc_groups.end(), 0);
  return p;
}

// Placement file: `CDC <node>`, `MFDC <node>`, `AFDC <group>`; `*` selects all.
inline SitePlacement load_placement(std::string_view doc, const CoreTopology& topo) {
  std::set<int> cdc, mfdc, afdc;
  std::vector<std::string> problems;
  int lineno = 0;
  for (const auto& raw : text::lines(doc)) {
    ++lineno;
    const auto tok = text::split_ws(text::strip_comment(raw));
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (tok.size() != 2) {
      problems.push_back(where + "expected <KIND> <id>");
      continue;
    }
    if (tok[0] == "CDC" || tok[0] == "MFDC") {
      auto& target = tok[0] == "CDC" ? cdc : mfdc;
      if (tok[1] == "*") {
        for (int i = 0; i < topo.node_count(); ++i) target.insert(i);
      } else if (auto id = topo.find_node(tok[1])) {
        if (!target.insert(*id).second) problems.push_back(where + "duplicate " + tok[0] + " '" + tok[1] + "'");
      } else {
        problems.push_back(where + "unknown node '" + tok[1] + "'");
      }
    } else if (tok[0] == "AFDC") {
      if (tok[1] == "*") {
        for (int i = 0; i < topo.group_count(); ++i) afdc.insert(i);
      } else if (auto id = topo.find_group(tok[1])) {
        if (!afdc.insert(*id).second) problems.push_back(where + "duplicate AFDC '" + tok[1] + "'");
      } else {
        problems.push_back(where + "unknown access group '" + tok[1] + "'");
      }
    } else {
      problems.push_back(where + "unknown record '" + tok[0] + "'");
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return {{cdc.begin(), cdc.end()}, {mfdc.begin(), mfdc.end()}, {afdc.begin(), afdc.end()}};
}

inline std::string emit_placement(const SitePlacement& p, const CoreTopology& topo) {
  std::string out;
  for (int n : p.cdc_nodes) out += "CDC " + topo.nodes()[n].name + "\n";
  for (int n : p.mfdc_nodes) out += "MFDC " + topo.nodes()[n].name + "\n";
  for (int g : p.afdc_groups) out += "AFDC " + topo.groups()[g].name + "\n";
  return out;
}

}  // namespace vodfog
