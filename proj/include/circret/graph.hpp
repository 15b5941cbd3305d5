#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "circret/circuit.hpp"

namespace circret {

struct GraphNode {
  std::string id;
  std::string label;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

// Endpoints are ordered so that a < b.
struct GraphEdge {
  std::string a;
  std::string b;
  std::optional<std::string> label;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Undirected simple graph with string node labels and optional edge labels.
class LabeledGraph {
 public:
  // Throws ValidationError on a duplicate id.
  std::size_t add_node(std::string id, std::string label);
  // Adding an existing edge is a no-op (the first label wins). Self-loops
  // and unknown endpoints throw ValidationError.
  void add_edge(std::string_view a, std::string_view b,
                std::optional<std::string> label = std::nullopt);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  // Insertion order.
  const std::vector<GraphNode>& nodes() const { return nodes_; }
  std::optional<std::size_t> index_of(std::string_view id) const;
  bool has_edge(std::string_view a, std::string_view b) const;
  const std::optional<std::string>* edge_label(std::size_t i,
                                               std::size_t j) const;
  // Edges keyed by node index pair (i < j).
  const std::map<std::pair<std::size_t, std::size_t>,
                 std::optional<std::string>>&
  edge_map() const {
    return edges_;
  }
  std::size_t degree(std::size_t i) const;

  // Canonical views: nodes sorted by id, edges sorted by (a, b).
  std::vector<GraphNode> sorted_nodes() const;
  std::vector<GraphEdge> sorted_edges() const;

  friend bool operator==(const LabeledGraph& x, const LabeledGraph& y) {
    return x.sorted_nodes() == y.sorted_nodes() &&
           x.sorted_edges() == y.sorted_edges();
  }

 private:
  std::vector<GraphNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::pair<std::size_t, std::size_t>, std::optional<std::string>>
      edges_;
  std::vector<std::size_t> degree_;
};

enum class ReprClass { kC1 = 1, kC2, kC3, kC4, kC5 };

inline constexpr ReprClass kAllReprClasses[] = {
    ReprClass::kC1, ReprClass::kC2, ReprClass::kC3, ReprClass::kC4,
    ReprClass::kC5};

std::string to_string(ReprClass k);
// Accepts "C1".."C5" (case-insensitive). Throws ParseError otherwise.
ReprClass parse_repr_class(std::string_view s);

inline constexpr std::string_view kNetLabel = "NET";

// Graph of `c` under representation class `k`. Throws NotApplicableError
// for C5 on circuits with anything other than Mos/Triode devices.
LabeledGraph build_representation(const Circuit& c, ReprClass k);

// Byte-stable graphviz document.
std::string to_dot(const LabeledGraph& g, std::string_view name = "circuit");

}  // namespace circret
