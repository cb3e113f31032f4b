#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace clband {

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Link {
  int a = 0;
  int b = 0;
  double length_km = 0.0;
  std::vector<double> spans_km;  // sums to length_km

  int span_count() const { return static_cast<int>(spans_km.size()); }
  int other(int node) const { return node == a ? b : a; }
};

// Undirected mesh; every link carries traffic in both directions over one
// shared spectrum.
class Topology {
 public:
  Topology(std::vector<std::string> nodes, std::vector<Link> links);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(int id) const { return links_.at(static_cast<std::size_t>(id)); }
  int node_id(const std::string& name) const;
  // (neighbour, link id) pairs sorted by neighbour then link.
  const std::vector<std::pair<int, int>>& adjacency(int node) const {
    return adjacency_.at(static_cast<std::size_t>(node));
  }
  bool connected() const;

 private:
  std::vector<std::string> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<std::pair<int, int>>> adjacency_;
};

// JSON form: {nodes: [names], links: [{a, b, length_km, spans: [km, ...]}]}.
Topology topology_from_json(const nlohmann::json& j);
nlohmann::json topology_to_json(const Topology& t);
Topology load_topology(const std::filesystem::path& path);

// Random connected mesh: a spanning tree plus extra links, lengths drawn so
// that every link has 1..max_spans spans of about span_km.
Topology synthetic_topology(int nodes, int links, std::uint64_t seed, double span_km = 70.0,
                            int max_spans = 14);

struct Route {
  std::vector<int> nodes;
  std::vector<int> links;
  double length_km = 0.0;
  int spans = 0;
};

// Successive shortest paths by length, each disjoint from the previous ones
// (link-disjoint, or sharing no intermediate node when node_disjoint is set).
// Equal lengths are ordered by the node-id sequence.
std::vector<Route> k_disjoint_shortest_paths(const Topology& topology, int source,
                                             int destination, int k, bool node_disjoint = false);

}  // namespace clband
