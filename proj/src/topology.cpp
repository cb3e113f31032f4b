#include "clband/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <set>

namespace clband {

using nlohmann::json;

Topology::Topology(std::vector<std::string> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  if (nodes_.empty()) throw TopologyError("topology has no nodes");
  std::set<std::string> names(nodes_.begin(), nodes_.end());
  if (names.size() != nodes_.size()) throw TopologyError("duplicate node names");
  adjacency_.resize(nodes_.size());
  for (std::size_t id = 0; id < links_.size(); ++id) {
    const Link& l = links_[id];
    const std::string where = "link " + std::to_string(id);
    if (l.a < 0 || l.b < 0 || l.a >= node_count() || l.b >= node_count()) {
      throw TopologyError(where + " references an unknown node");
    }
    if (l.a == l.b) throw TopologyError(where + " is a self-loop");
    if (!(l.length_km > 0.0) || !std::isfinite(l.length_km)) {
      throw TopologyError(where + " must have a positive length");
    }
    if (l.spans_km.empty()) throw TopologyError(where + " has no spans");
    double sum = 0.0;
    for (double s : l.spans_km) {
      if (!(s > 0.0)) throw TopologyError(where + " has a non-positive span");
      sum += s;
    }
    if (std::abs(sum - l.length_km) > 1e-6 * l.length_km) {
      throw TopologyError(where + " span lengths do not add up to the link length");
    }
    adjacency_[static_cast<std::size_t>(l.a)].emplace_back(l.b, static_cast<int>(id));
    adjacency_[static_cast<std::size_t>(l.b)].emplace_back(l.a, static_cast<int>(id));
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

int Topology::node_id(const std::string& name) const {
  const auto it = std::find(nodes_.begin(), nodes_.end(), name);
  if (it == nodes_.end()) throw TopologyError("unknown node '" + name + "'");
  return static_cast<int>(it - nodes_.begin());
}

bool Topology::connected() const {
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto& [v, link] : adjacency(u)) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == nodes_.size();
}

Topology topology_from_json(const json& j) {
  try {
    std::vector<std::string> nodes = j.at("nodes").get<std::vector<std::string>>();
    std::vector<Link> links;
    for (const auto& jl : j.at("links")) {
      Link l;
      const auto resolve = [&](const json& v) {
        if (v.is_number_integer()) return v.get<int>();
        const auto name = v.get<std::string>();
        const auto it = std::find(nodes.begin(), nodes.end(), name);
        if (it == nodes.end()) throw TopologyError("link references unknown node '" + name + "'");
        return static_cast<int>(it - nodes.begin());
      };
      l.a = resolve(jl.at("a"));
      l.b = resolve(jl.at("b"));
      jl.at("length_km").get_to(l.length_km);
      jl.at("spans").get_to(l.spans_km);
      links.push_back(std::move(l));
    }
    Topology t(std::move(nodes), std::move(links));
    if (!t.connected()) throw TopologyError("topology is not connected");
    return t;
  } catch (const json::exception& e) {
    throw TopologyError(std::string("malformed topology: ") + e.what());
  }
}

json topology_to_json(const Topology& t) {
  json links = json::array();
  for (const Link& l : t.links()) {
    links.push_back({{"a", t.nodes()[static_cast<std::size_t>(l.a)]},
                     {"b", t.nodes()[static_cast<std::size_t>(l.b)]},
                     {"length_km", l.length_km},
                     {"spans", l.spans_km}});
  }
  return {{"nodes", t.nodes()}, {"links", links}};
}

Topology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot read topology file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw TopologyError("topology file " + path.string() + " is not valid JSON: " + e.what());
  }
  return topology_from_json(j);
}

Topology synthetic_topology(int nodes, int links, std::uint64_t seed, double span_km,
                            int max_spans) {
  if (nodes < 2) throw TopologyError("need at least two nodes");
  const long max_links = static_cast<long>(nodes) * (nodes - 1) / 2;
  if (links < nodes - 1 || links > max_links) throw TopologyError("link count cannot form a simple connected graph");
  if (max_spans < 1 || !(span_km > 0.0)) throw TopologyError("invalid span settings");
  std::mt19937_64 rng(seed);
  auto uniform_int = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<std::string> names;
  for (int i = 0; i < nodes; ++i) names.push_back("N" + std::to_string(i));
  std::set<std::pair<int, int>> used;
  std::vector<Link> out;
  auto add = [&](int a, int b) {
    const int spans = 1 + uniform_int(max_spans);
    Link l;
    l.a = a;
    l.b = b;
    for (int s = 0; s < spans; ++s) {
      l.spans_km.push_back(span_km * (0.8 + 0.4 * uniform()));
      l.length_km += l.spans_km.back();
    }
    used.emplace(std::min(a, b), std::max(a, b));
    out.push_back(std::move(l));
  };
  for (int i = 1; i < nodes; ++i) add(uniform_int(i), i);
  while (static_cast<int>(out.size()) < links) {
    const int a = uniform_int(nodes);
    const int b = uniform_int(nodes);
    if (a == b || used.contains({std::min(a, b), std::max(a, b)})) continue;
    add(a, b);
  }
  return Topology(std::move(names), std::move(out));
}

namespace {

// Dijkstra over the allowed subgraph, minimising (length, node sequence).
std::optional<Route> shortest_route(const Topology& t, int source, int destination,
                                    const std::vector<char>& link_allowed,
                                    const std::vector<char>& node_allowed) {
  const auto n = static_cast<std::size_t>(t.node_count());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<std::vector<int>> path(n);
  std::vector<std::vector<int>> path_links(n);
  std::vector<char> done(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<std::size_t>(source)] = 0.0;
  path[static_cast<std::size_t>(source)] = {source};
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    const auto uu = static_cast<std::size_t>(u);
    if (done[uu]) continue;
    done[uu] = 1;
    if (u == destination) break;
    for (const auto& [v, link] : t.adjacency(u)) {
      const auto vv = static_cast<std::size_t>(v);
      if (done[vv] || !link_allowed[static_cast<std::size_t>(link)]) continue;
      if (v != destination && !node_allowed[vv]) continue;
      const double nd = d + t.link(link).length_km;
      std::vector<int> candidate = path[uu];
      candidate.push_back(v);
      if (nd < dist[vv] || (nd == dist[vv] && candidate < path[vv])) {
        const bool improved = nd < dist[vv];
        dist[vv] = nd;
        path[vv] = std::move(candidate);
        path_links[vv] = path_links[uu];
        path_links[vv].push_back(link);
        if (improved) queue.emplace(nd, v);
      }
    }
  }
  const auto dd = static_cast<std::size_t>(destination);
  if (!std::isfinite(dist[dd])) return std::nullopt;
  Route r;
  r.nodes = path[dd];
  r.links = path_links[dd];
  for (int l : r.links) {
    r.length_km += t.link(l).length_km;
    r.spans += t.link(l).span_count();
  }
  return r;
}

}  // namespace

std::vector<Route> k_disjoint_shortest_paths(const Topology& topology, int source,
                                             int destination, int k, bool node_disjoint) {
  const int n = topology.node_count();
  if (source < 0 || source >= n || destination < 0 || destination >= n) {
    throw TopologyError("route endpoints must be existing nodes");
  }
  if (source == destination) throw TopologyError("route endpoints must differ");
  std::vector<char> link_allowed(static_cast<std::size_t>(topology.link_count()), 1);
  std::vector<char> node_allowed(static_cast<std::size_t>(n), 1);
  std::vector<Route> routes;
  while (static_cast<int>(routes.size()) < k) {
    auto r = shortest_route(topology, source, destination, link_allowed, node_allowed);
    if (!r) break;
    for (int l : r->links) link_allowed[static_cast<std::size_t>(l)] = 0;
    if (node_disjoint) {
      for (std::size_t i = 1; i + 1 < r->nodes.size(); ++i) {
        node_allowed[static_cast<std::size_t>(r->nodes[i])] = 0;
      }
    }
    routes.push_back(std::move(*r));
  }
  return routes;
}

}  // namespace clband
