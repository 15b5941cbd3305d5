#include "circret/ged.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>

#include "circret/errors.hpp"

namespace circret {

void CostModel::validate() const {
  for (double c : {node_insert, node_delete, node_relabel, edge_insert,
                   edge_delete, edge_relabel}) {
    if (!(c >= 0.0)) throw ValidationError("edit costs must be non-negative");
  }
}

void SearchLimits::validate() const {
  if (max_expanded_states < 1) {
    throw ValidationError("max_expanded_states must be at least 1");
  }
  if (time_budget.count() < 0) throw ValidationError("negative time budget");
}

std::string to_string(EditKind k) {
  switch (k) {
    case EditKind::kNodeRelabel: return "node_relabel";
    case EditKind::kNodeDelete: return "node_delete";
    case EditKind::kNodeInsert: return "node_insert";
    case EditKind::kEdgeRelabel: return "edge_relabel";
    case EditKind::kEdgeDelete: return "edge_delete";
    case EditKind::kEdgeInsert: return "edge_insert";
  }
  return "unknown";
}

namespace {

constexpr double kEps = 1e-9;
constexpr int kNoEdge = -1;

// Dense integer view of a graph pair with shared label dictionaries.
struct Compact {
  int n = 0;
  int edges = 0;
  std::vector<int> label;
  std::vector<int> adj;  // n*n, kNoEdge or edge label id (0 = unlabeled)
  int at(int i, int j) const { return adj[static_cast<std::size_t>(i) * n + j]; }
};

struct Dictionaries {
  std::map<std::string, int> node_labels;
  std::map<std::string, int> edge_labels;  // unlabeled edges use id 0

  int node(const std::string& l) {
    return node_labels.emplace(l, static_cast<int>(node_labels.size())).first->second;
  }
  int edge(const std::optional<std::string>& l) {
    if (!l) return 0;
    return edge_labels.emplace(*l, static_cast<int>(edge_labels.size()) + 1)
        .first->second;
  }
};

Compact compact(const LabeledGraph& g, Dictionaries& dict) {
  Compact c;
  c.n = static_cast<int>(g.node_count());
  c.edges = static_cast<int>(g.edge_count());
  c.label.reserve(c.n);
  for (const auto& node : g.nodes()) c.label.push_back(dict.node(node.label));
  c.adj.assign(static_cast<std::size_t>(c.n) * c.n, kNoEdge);
  for (const auto& [key, label] : g.edge_map()) {
    int id = dict.edge(label);
    c.adj[key.first * c.n + key.second] = id;
    c.adj[key.second * c.n + key.first] = id;
  }
  return c;
}

struct Child {
  int target;  // index in g2, or n2 for deletion
  double g;
  double f;
  int e2_used;
  bool complete;
};

class Searcher {
 public:
  Searcher(const LabeledGraph& lg1, const LabeledGraph& lg2, const CostModel& cm,
           bool use_heuristic)
      : lg1_(lg1), lg2_(lg2), cm_(cm), use_h_(use_heuristic) {
    g1_ = compact(lg1, dict_);
    g2_ = compact(lg2, dict_);
    n1_ = g1_.n;
    n2_ = g2_.n;
    labels_ = static_cast<int>(dict_.node_labels.size());
    min_node_ = std::min({cm.node_relabel, cm.node_insert, cm.node_delete});
    min_edge_ = std::min(cm.edge_insert, cm.edge_delete);

    order_.resize(n1_);
    for (int i = 0; i < n1_; ++i) order_[i] = i;
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      if (lg1.degree(a) != lg1.degree(b)) return lg1.degree(a) > lg1.degree(b);
      return lg1.nodes()[a].id < lg1.nodes()[b].id;
    });

    remaining1_.assign(static_cast<std::size_t>(n1_ + 1) * labels_, 0);
    for (int d = n1_ - 1; d >= 0; --d) {
      for (int l = 0; l < labels_; ++l) {
        remaining1_[d * labels_ + l] = remaining1_[(d + 1) * labels_ + l];
      }
      ++remaining1_[d * labels_ + g1_.label[order_[d]]];
    }
    processed_edges1_.assign(n1_ + 1, 0);
    for (int d = 1; d <= n1_; ++d) {
      int u = order_[d - 1];
      int add = 0;
      for (int i = 0; i < d - 1; ++i) add += g1_.at(u, order_[i]) != kNoEdge;
      processed_edges1_[d] = processed_edges1_[d - 1] + add;
    }
    total2_.assign(labels_, 0);
    for (int v = 0; v < n2_; ++v) ++total2_[g2_.label[v]];
  }

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  const std::vector<int>& order() const { return order_; }

  // Cost of a complete source mapping with no mapped nodes (n1 == 0).
  double empty_source_cost() const {
    return n2_ * cm_.node_insert + g2_.edges * cm_.edge_insert;
  }

  double root_f() const {
    std::vector<int> used_counts(labels_, 0);
    return use_h_ ? heuristic(0, 0, used_counts, 0) : 0.0;
  }

  // Children of the state given by `mapping` (targets for order[0..d-1]).
  void expand(const std::vector<int>& mapping, double g, int e2_used,
              std::vector<Child>& out) {
    out.clear();
    const int d = static_cast<int>(mapping.size());
    const int u = order_[d];
    used_.assign(n2_, 0);
    std::vector<int>& used_counts = used_counts_;
    used_counts.assign(labels_, 0);
    int used_total = 0;
    for (int t : mapping) {
      if (t < n2_) {
        used_[t] = 1;
        ++used_counts[g2_.label[t]];
        ++used_total;
      }
    }
    for (int v = 0; v <= n2_; ++v) {
      if (v < n2_ && used_[v]) continue;
      const bool del = v == n2_;
      double cost = g;
      if (del) {
        cost += cm_.node_delete;
      } else if (g1_.label[u] != g2_.label[v]) {
        cost += cm_.node_relabel;
      }
      int new_used_edges = 0;
      for (int i = 0; i < d; ++i) {
        const int e1 = g1_.at(u, order_[i]);
        const int t = mapping[i];
        const int e2 = (!del && t < n2_) ? g2_.at(v, t) : kNoEdge;
        if (e2 != kNoEdge) ++new_used_edges;
        if (e1 != kNoEdge && e2 != kNoEdge) {
          if (e1 != e2) cost += cm_.edge_relabel;
        } else if (e1 != kNoEdge) {
          cost += cm_.edge_delete;
        } else if (e2 != kNoEdge) {
          cost += cm_.edge_insert;
        }
      }
      Child c;
      c.target = v;
      c.e2_used = e2_used + new_used_edges;
      const int used_after = used_total + (del ? 0 : 1);
      if (d + 1 == n1_) {
        cost += (n2_ - used_after) * cm_.node_insert +
                (g2_.edges - c.e2_used) * cm_.edge_insert;
        c.g = cost;
        c.f = cost;
        c.complete = true;
      } else {
        c.g = cost;
        double h = 0.0;
        if (use_h_) {
          if (!del) ++used_counts[g2_.label[v]];
          h = heuristic(d + 1, used_after, used_counts, c.e2_used);
          if (!del) --used_counts[g2_.label[v]];
        }
        c.f = cost + h;
        c.complete = false;
      }
      out.push_back(c);
    }
  }

  // Best-first dive to a complete mapping. Returns cost.
  double dive(std::vector<int>& mapping, double g, int e2_used) {
    if (n1_ == 0) return empty_source_cost();
    std::vector<Child> kids;
    while (true) {
      expand(mapping, g, e2_used, kids);
      const Child* best = &kids.front();
      for (const Child& c : kids) {
        if (c.f < best->f - kEps ||
            (std::abs(c.f - best->f) <= kEps && c.g < best->g - kEps)) {
          best = &c;
        }
      }
      mapping.push_back(best->target);
      g = best->g;
      e2_used = best->e2_used;
      if (best->complete) return g;
    }
  }

  // Converts a full mapping (by search order) to per-source-node targets.
  std::vector<std::optional<std::size_t>> by_source(
      const std::vector<int>& mapping) const {
    std::vector<std::optional<std::size_t>> out(n1_);
    for (int i = 0; i < n1_; ++i) {
      if (mapping[i] < n2_) out[order_[i]] = static_cast<std::size_t>(mapping[i]);
    }
    return out;
  }

 private:
  double heuristic(int depth, int used_total, const std::vector<int>& used_counts,
                   int e2_used) const {
    const int r1 = n1_ - depth;
    const int r2 = n2_ - used_total;
    int common = 0;
    const int* rem1 = &remaining1_[static_cast<std::size_t>(depth) * labels_];
    for (int l = 0; l < labels_; ++l) {
      common += std::min(rem1[l], total2_[l] - used_counts[l]);
    }
    const int e1 = g1_.edges - processed_edges1_[depth];
    const int e2 = g2_.edges - e2_used;
    return (std::max(r1, r2) - common) * min_node_ + std::abs(e1 - e2) * min_edge_;
  }

  const LabeledGraph& lg1_;
  const LabeledGraph& lg2_;
  CostModel cm_;
  bool use_h_;
  Dictionaries dict_;
  Compact g1_, g2_;
  int n1_ = 0, n2_ = 0, labels_ = 0;
  double min_node_ = 0, min_edge_ = 0;
  std::vector<int> order_;
  std::vector<int> remaining1_;
  std::vector<int> processed_edges1_;
  std::vector<int> total2_;
  std::vector<char> used_;
  std::vector<int> used_counts_;
};

std::vector<EditOp> edit_path(const LabeledGraph& g1, const LabeledGraph& g2,
                              const std::vector<std::optional<std::size_t>>& map,
                              const CostModel& cm) {
  std::vector<EditOp> ops;
  const auto& n1 = g1.nodes();
  const auto& n2 = g2.nodes();
  std::vector<std::optional<std::size_t>> inverse(n2.size());
  for (std::size_t u = 0; u < n1.size(); ++u) {
    if (map[u]) inverse[*map[u]] = u;
  }
  // Edge removals first so every node deletion acts on an isolated node.
  for (const auto& [key, label] : g1.edge_map()) {
    const auto& [i, j] = key;
    const std::optional<std::string>* other = nullptr;
    if (map[i] && map[j]) other = g2.edge_label(*map[i], *map[j]);
    if (other == nullptr) {
      ops.push_back({EditKind::kEdgeDelete, n1[i].id, false, n1[j].id, false,
                     label, std::nullopt, cm.edge_delete});
    } else if (*other != label) {
      ops.push_back({EditKind::kEdgeRelabel, n1[i].id, false, n1[j].id, false,
                     label, *other, cm.edge_relabel});
    }
  }
  for (std::size_t u = 0; u < n1.size(); ++u) {
    if (map[u]) {
      if (n1[u].label != n2[*map[u]].label) {
        ops.push_back({EditKind::kNodeRelabel, n1[u].id, false, {}, false,
                       n1[u].label, n2[*map[u]].label, cm.node_relabel});
      }
    } else {
      ops.push_back({EditKind::kNodeDelete, n1[u].id, false, {}, false,
                     n1[u].label, std::nullopt, cm.node_delete});
    }
  }
  for (std::size_t v = 0; v < n2.size(); ++v) {
    if (!inverse[v]) {
      ops.push_back({EditKind::kNodeInsert, n2[v].id, true, {}, false,
                     std::nullopt, n2[v].label, cm.node_insert});
    }
  }
  auto ref = [&](std::size_t v) -> std::pair<std::string, bool> {
    if (inverse[v]) return {n1[*inverse[v]].id, false};
    return {n2[v].id, true};
  };
  for (const auto& [key, label] : g2.edge_map()) {
    const auto& [p, q] = key;
    if (inverse[p] && inverse[q] && g1.edge_label(*inverse[p], *inverse[q])) {
      continue;
    }
    auto [a, a_ins] = ref(p);
    auto [b, b_ins] = ref(q);
    ops.push_back({EditKind::kEdgeInsert, a, a_ins, b, b_ins, std::nullopt,
                   label, cm.edge_insert});
  }
  return ops;
}

void finish(GedResult& r, const LabeledGraph& g1, const LabeledGraph& g2,
            const std::vector<std::optional<std::size_t>>& map,
            const CostModel& cm) {
  r.edit_path = edit_path(g1, g2, map, cm);
  double sum = 0.0;
  for (const auto& op : r.edit_path) sum += op.cost;
  r.cost = sum;
  r.mapping.clear();
  for (std::size_t u = 0; u < g1.node_count(); ++u) {
    std::optional<std::string> t;
    if (map[u]) t = g2.nodes()[*map[u]].id;
    r.mapping.emplace_back(g1.nodes()[u].id, std::move(t));
  }
}

using Clock = std::chrono::steady_clock;

class Deadline {
 public:
  explicit Deadline(std::chrono::milliseconds budget)
      : enabled_(budget.count() > 0), end_(Clock::now() + budget) {}
  bool passed() const { return enabled_ && Clock::now() >= end_; }

 private:
  bool enabled_;
  Clock::time_point end_;
};

// Plain A* with incumbent pruning.
GedResult run_astar(const LabeledGraph& g1, const LabeledGraph& g2,
                    const CostModel& cm, const SearchLimits& lim, bool use_h) {
  const auto start = Clock::now();
  Searcher s(g1, g2, cm, use_h);
  GedResult r;
  if (s.n1() == 0) {
    r.exact = true;
    finish(r, g1, g2, {}, cm);
    r.elapsed = Clock::now() - start;
    return r;
  }

  std::vector<int> best_map;
  double best = s.dive(best_map, 0.0, 0);

  struct Node {
    std::uint32_t parent;
    std::int32_t target;
    std::int32_t depth;
    std::int32_t e2_used;
    double g;
    double f;
    bool complete;
  };
  std::vector<Node> arena;
  arena.push_back({0, -1, 0, 0, 0.0, s.root_f(), false});

  auto path_of = [&](std::uint32_t idx, std::vector<int>& out) {
    out.assign(arena[idx].depth, 0);
    while (arena[idx].depth > 0) {
      out[arena[idx].depth - 1] = arena[idx].target;
      idx = arena[idx].parent;
    }
  };
  std::vector<int> buf_a, buf_b;
  // Lower f first, then lower g, then lexicographically smaller mapping.
  auto worse = [&](std::uint32_t a, std::uint32_t b) {
    const Node& x = arena[a];
    const Node& y = arena[b];
    if (std::abs(x.f - y.f) > kEps) return x.f > y.f;
    if (std::abs(x.g - y.g) > kEps) return x.g > y.g;
    path_of(a, buf_a);
    path_of(b, buf_b);
    return std::lexicographical_compare(buf_b.begin(), buf_b.end(),
                                        buf_a.begin(), buf_a.end());
  };
  std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, decltype(worse)>
      open(worse);
  open.push(0);

  Deadline deadline(lim.time_budget);
  std::vector<int> mapping;
  std::vector<Child> kids;
  bool stopped = false;
  double frontier_floor = best;
  while (!open.empty()) {
    const std::uint32_t cur = open.top();
    if (arena[cur].f >= best - kEps) break;  // incumbent is optimal
    open.pop();
    if (arena[cur].complete) {
      best = arena[cur].g;
      path_of(cur, best_map);
      break;
    }
    if (r.expanded >= lim.max_expanded_states ||
        ((r.expanded & 127) == 0 && deadline.passed())) {
      stopped = true;
      frontier_floor = arena[cur].f;
      path_of(cur, mapping);
      std::vector<int> candidate = mapping;
      double c = s.dive(candidate, arena[cur].g, arena[cur].e2_used);
      if (c < best - kEps) {
        best = c;
        best_map = std::move(candidate);
      }
      break;
    }
    ++r.expanded;
    path_of(cur, mapping);
    const Node parent = arena[cur];
    s.expand(mapping, parent.g, parent.e2_used, kids);
    for (const Child& k : kids) {
      if (k.f >= best - kEps) continue;
      arena.push_back({cur, k.target, parent.depth + 1, k.e2_used, k.g, k.f,
                       k.complete});
      open.push(static_cast<std::uint32_t>(arena.size() - 1));
    }
  }

  r.exhausted = stopped;
  r.exact = !stopped || best <= frontier_floor + kEps;
  finish(r, g1, g2, s.by_source(best_map), cm);
  r.elapsed = Clock::now() - start;
  return r;
}

GedResult run_beam(const LabeledGraph& g1, const LabeledGraph& g2,
                   const CostModel& cm, const SearchLimits& lim) {
  const auto start = Clock::now();
  Searcher s(g1, g2, cm, true);
  GedResult r;
  if (s.n1() == 0) {
    r.exact = true;
    finish(r, g1, g2, {}, cm);
    r.elapsed = Clock::now() - start;
    return r;
  }
  std::vector<int> best_map;
  double best = s.dive(best_map, 0.0, 0);

  struct BeamState {
    std::vector<int> mapping;
    double g;
    double f;
    int e2_used;
    bool complete;
  };
  auto better = [](const BeamState& x, const BeamState& y) {
    if (std::abs(x.f - y.f) > kEps) return x.f < y.f;
    if (std::abs(x.g - y.g) > kEps) return x.g < y.g;
    return x.mapping < y.mapping;
  };

  std::vector<BeamState> level{{{}, 0.0, s.root_f(), 0, false}};
  double pruned_floor = std::numeric_limits<double>::infinity();
  Deadline deadline(lim.time_budget);
  std::vector<Child> kids;
  bool stopped = false;
  while (!level.empty() && !level.front().complete) {
    std::vector<BeamState> next;
    for (const BeamState& st : level) {
      if (r.expanded >= lim.max_expanded_states || deadline.passed()) {
        stopped = true;
        break;
      }
      ++r.expanded;
      s.expand(st.mapping, st.g, st.e2_used, kids);
      for (const Child& k : kids) {
        if (k.f >= best - kEps) continue;
        BeamState c{st.mapping, k.g, k.f, k.e2_used, k.complete};
        c.mapping.push_back(k.target);
        next.push_back(std::move(c));
      }
    }
    if (stopped) {
      for (const BeamState& st : level) pruned_floor = std::min(pruned_floor, st.f);
      std::vector<int> m = level.front().mapping;
      double c = s.dive(m, level.front().g, level.front().e2_used);
      if (c < best - kEps) {
        best = c;
        best_map = std::move(m);
      }
      break;
    }
    std::sort(next.begin(), next.end(), better);
    if (next.size() > lim.beam_width) {
      for (std::size_t i = lim.beam_width; i < next.size(); ++i) {
        pruned_floor = std::min(pruned_floor, next[i].f);
      }
      next.resize(lim.beam_width);
    }
    level = std::move(next);
  }
  if (!stopped && !level.empty() && level.front().g < best - kEps) {
    best = level.front().g;
    best_map = level.front().mapping;
  }
  r.exhausted = stopped;
  r.exact = best <= pruned_floor + kEps;
  finish(r, g1, g2, s.by_source(best_map), cm);
  r.elapsed = Clock::now() - start;
  return r;
}

}  // namespace

GedResult ged_astar(const LabeledGraph& g1, const LabeledGraph& g2,
                    const CostModel& cm, const SearchLimits& lim) {
  cm.validate();
  lim.validate();
  if (lim.beam_width > 0) return run_beam(g1, g2, cm, lim);
  return run_astar(g1, g2, cm, lim, true);
}

GedResult ged_uniform_cost(const LabeledGraph& g1, const LabeledGraph& g2,
                           const CostModel& cm, const SearchLimits& lim) {
  cm.validate();
  lim.validate();
  return run_astar(g1, g2, cm, lim, false);
}

double ged_lower_bound(const LabeledGraph& g1, const LabeledGraph& g2,
                       const CostModel& cm) {
  std::map<std::string, long> counts;
  for (const auto& n : g1.nodes()) ++counts[n.label];
  long common = 0;
  for (const auto& n : g2.nodes()) {
    auto it = counts.find(n.label);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  const long nodes = static_cast<long>(std::max(g1.node_count(), g2.node_count()));
  const long edges = std::labs(static_cast<long>(g1.edge_count()) -
                               static_cast<long>(g2.edge_count()));
  return (nodes - common) *
             std::min({cm.node_relabel, cm.node_insert, cm.node_delete}) +
         edges * std::min(cm.edge_insert, cm.edge_delete);
}

double induced_cost(const LabeledGraph& g1, const LabeledGraph& g2,
                    const std::vector<std::optional<std::size_t>>& mapping,
                    const CostModel& cm) {
  const auto& n1 = g1.nodes();
  const auto& n2 = g2.nodes();
  std::vector<bool> hit(n2.size(), false);
  double cost = 0.0;
  for (std::size_t u = 0; u < n1.size(); ++u) {
    if (!mapping[u]) {
      cost += cm.node_delete;
      continue;
    }
    hit[*mapping[u]] = true;
    if (n1[u].label != n2[*mapping[u]].label) cost += cm.node_relabel;
  }
  for (std::size_t v = 0; v < n2.size(); ++v) {
    if (!hit[v]) cost += cm.node_insert;
  }
  std::size_t matched = 0;
  for (const auto& [key, label] : g1.edge_map()) {
    const auto& mi = mapping[key.first];
    const auto& mj = mapping[key.second];
    const std::optional<std::string>* other =
        (mi && mj) ? g2.edge_label(*mi, *mj) : nullptr;
    if (other == nullptr) {
      cost += cm.edge_delete;
    } else {
      ++matched;
      if (*other != label) cost += cm.edge_relabel;
    }
  }
  cost += static_cast<double>(g2.edge_count() - matched) * cm.edge_insert;
  return cost;
}

double ged_bruteforce(const LabeledGraph& g1, const LabeledGraph& g2,
                      const CostModel& cm) {
  if (g1.node_count() > kBruteForceMaxNodes ||
      g2.node_count() > kBruteForceMaxNodes) {
    throw SizeGuardError("brute-force GED limited to " +
                         std::to_string(kBruteForceMaxNodes) + " nodes per graph");
  }
  cm.validate();
  const std::size_t n1 = g1.node_count();
  const std::size_t n2 = g2.node_count();
  std::vector<std::optional<std::size_t>> mapping(n1);
  std::vector<bool> used(n2, false);
  double best = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, std::size_t u) -> void {
    if (u == n1) {
      best = std::min(best, induced_cost(g1, g2, mapping, cm));
      return;
    }
    for (std::size_t v = 0; v < n2; ++v) {
      if (used[v]) continue;
      used[v] = true;
      mapping[u] = v;
      self(self, u + 1);
      used[v] = false;
    }
    mapping[u].reset();
    self(self, u + 1);
  };
  rec(rec, 0);
  return best;
}

SimilarityScore normalized_similarity(std::size_t nodes1, std::size_t nodes2,
                                      double ged) {
  if (nodes1 + nodes2 == 0) {
    throw DegenerateInputError("similarity undefined for two empty graphs");
  }
  SimilarityScore s;
  s.nged = ged / ((static_cast<double>(nodes1) + static_cast<double>(nodes2)) / 2.0);
  s.score = std::exp(-s.nged);
  return s;
}

SimilarityScore normalized_similarity(const LabeledGraph& g1,
                                      const LabeledGraph& g2, double ged) {
  return normalized_similarity(g1.node_count(), g2.node_count(), ged);
}

}  // namespace circret
