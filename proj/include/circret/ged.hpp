#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "circret/graph.hpp"

namespace circret {

struct CostModel {
  double node_insert = 1.0;
  double node_delete = 1.0;
  double node_relabel = 1.0;
  double edge_insert = 1.0;
  double edge_delete = 1.0;
  double edge_relabel = 1.0;

  // Throws ValidationError if any cost is negative.
  void validate() const;
};

struct SearchLimits {
  std::size_t max_expanded_states = 250000;
  // 0 = unbounded (plain A*); otherwise level-synchronous beam of this width.
  std::size_t beam_width = 0;
  // Zero = no wall-clock budget. A budget makes results timing-dependent.
  std::chrono::milliseconds time_budget{0};

  void validate() const;
};

enum class EditKind {
  kNodeRelabel,
  kNodeDelete,
  kNodeInsert,
  kEdgeRelabel,
  kEdgeDelete,
  kEdgeInsert,
};

std::string to_string(EditKind k);

// Nodes of the source graph are referenced by their id; nodes created by a
// kNodeInsert are referenced by the target graph's id with the matching
// `*_inserted` flag set.
struct EditOp {
  EditKind kind;
  std::string a;
  bool a_inserted = false;
  std::string b;
  bool b_inserted = false;
  std::optional<std::string> from;
  std::optional<std::string> to;
  double cost = 0.0;
};

struct GedResult {
  double cost = 0.0;
  std::vector<EditOp> edit_path;
  // Source node id -> target node id, or nullopt for a deletion. Source
  // graph insertion order.
  std::vector<std::pair<std::string, std::optional<std::string>>> mapping;
  bool exact = false;
  // Search stopped on max_expanded_states or time_budget; `cost` is the best
  // upper bound found.
  bool exhausted = false;
  std::size_t expanded = 0;
  std::chrono::nanoseconds elapsed{0};
};

// A* over partial node mappings with the ged_lower_bound heuristic on the
// unmapped remainder. Never throws on exhaustion: the best completion found
// is returned with exact = false and exhausted = true.
GedResult ged_astar(const LabeledGraph& g1, const LabeledGraph& g2,
                    const CostModel& cm = {}, const SearchLimits& lim = {});

// Same search with h = 0. Exposed for heuristic-effectiveness checks.
GedResult ged_uniform_cost(const LabeledGraph& g1, const LabeledGraph& g2,
                           const CostModel& cm = {},
                           const SearchLimits& lim = {});

// Label-multiset bound on nodes plus edge-count bound on edges.
double ged_lower_bound(const LabeledGraph& g1, const LabeledGraph& g2,
                       const CostModel& cm = {});

inline constexpr std::size_t kBruteForceMaxNodes = 8;

// Exhaustive minimum over all injective partial mappings. Throws
// SizeGuardError above kBruteForceMaxNodes nodes in either graph.
double ged_bruteforce(const LabeledGraph& g1, const LabeledGraph& g2,
                      const CostModel& cm = {});

// Edit cost induced by a complete node mapping (target index or nullopt per
// source node, in source insertion order).
double induced_cost(const LabeledGraph& g1, const LabeledGraph& g2,
                    const std::vector<std::optional<std::size_t>>& mapping,
                    const CostModel& cm = {});

struct SimilarityScore {
  double nged = 0.0;
  double score = 1.0;
};

// nGED = ged / mean node count, score = exp(-nGED). Throws
// DegenerateInputError when both graphs are empty.
SimilarityScore normalized_similarity(const LabeledGraph& g1,
                                      const LabeledGraph& g2, double ged);
SimilarityScore normalized_similarity(std::size_t nodes1, std::size_t nodes2,
                                      double ged);

}  // namespace circret
