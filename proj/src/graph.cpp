#include "circret/graph.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "circret/errors.hpp"
#include "circret/taxonomy.hpp"

namespace circret {

std::size_t LabeledGraph::add_node(std::string id, std::string label) {
  if (index_.count(id) != 0) {
    throw ValidationError("duplicate graph node id: " + id);
  }
  std::size_t i = nodes_.size();
  index_.emplace(id, i);
  nodes_.push_back(GraphNode{std::move(id), std::move(label)});
  degree_.push_back(0);
  return i;
}

void LabeledGraph::add_edge(std::string_view a, std::string_view b,
                            std::optional<std::string> label) {
  auto ia = index_of(a);
  auto ib = index_of(b);
  if (!ia || !ib) {
    throw ValidationError("edge endpoint missing: " + std::string(a) + " -- " +
                          std::string(b));
  }
  if (*ia == *ib) throw ValidationError("self-loop on " + std::string(a));
  auto key = std::minmax(*ia, *ib);
  if (edges_.emplace(std::pair(key.first, key.second), std::move(label)).second) {
    ++degree_[*ia];
    ++degree_[*ib];
  }
}

std::optional<std::size_t> LabeledGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool LabeledGraph::has_edge(std::string_view a, std::string_view b) const {
  auto ia = index_of(a);
  auto ib = index_of(b);
  if (!ia || !ib) return false;
  return edge_label(*ia, *ib) != nullptr;
}

const std::optional<std::string>* LabeledGraph::edge_label(std::size_t i,
                                                           std::size_t j) const {
  auto key = std::minmax(i, j);
  auto it = edges_.find({key.first, key.second});
  return it == edges_.end() ? nullptr : &it->second;
}

std::size_t LabeledGraph::degree(std::size_t i) const { return degree_.at(i); }

std::vector<GraphNode> LabeledGraph::sorted_nodes() const {
  std::vector<GraphNode> out = nodes_;
  std::sort(out.begin(), out.end(),
            [](const GraphNode& x, const GraphNode& y) { return x.id < y.id; });
  return out;
}

std::vector<GraphEdge> LabeledGraph::sorted_edges() const {
  std::vector<GraphEdge> out;
  out.reserve(edges_.size());
  for (const auto& [key, label] : edges_) {
    const std::string& a = nodes_[key.first].id;
    const std::string& b = nodes_[key.second].id;
    if (a < b) {
      out.push_back(GraphEdge{a, b, label});
    } else {
      out.push_back(GraphEdge{b, a, label});
    }
  }
  std::sort(out.begin(), out.end(), [](const GraphEdge& x, const GraphEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return out;
}

std::string to_string(ReprClass k) {
  return "C" + std::to_string(static_cast<int>(k));
}

ReprClass parse_repr_class(std::string_view s) {
  if (s.size() == 2 && std::toupper(static_cast<unsigned char>(s[0])) == 'C' &&
      s[1] >= '1' && s[1] <= '5') {
    return static_cast<ReprClass>(s[1] - '0');
  }
  throw ParseError("unknown representation class: " + std::string(s));
}

namespace {

// Net node ids are the net ids unless they clash with a device or pin id.
class NetIds {
 public:
  NetIds(const Circuit& c, bool with_pins) {
    for (const auto& d : c.devices()) {
      taken_.insert(d.id);
      if (with_pins) {
        for (const auto& p : d.pins) taken_.insert(d.id + "." + p.role);
      }
    }
  }
  std::string operator()(const std::string& net) const {
    return taken_.count(net) != 0 ? "net:" + net : net;
  }

 private:
  std::set<std::string> taken_;
};

void add_clique(LabeledGraph& g, const std::vector<std::string>& ids) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (ids[i] != ids[j]) g.add_edge(ids[i], ids[j]);
    }
  }
}

std::vector<std::string> device_ids(const Circuit& c,
                                    const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(c.devices()[i].id);
  return out;
}

void add_device_nodes(const Circuit& c, LabeledGraph& g) {
  for (const auto& d : c.devices()) g.add_node(d.id, d.category);
}

LabeledGraph build_c1(const Circuit& c) {
  LabeledGraph g;
  add_device_nodes(c, g);
  for (const auto& [net, members] : c.nets()) {
    add_clique(g, device_ids(c, c.devices_on(net)));
  }
  return g;
}

LabeledGraph build_c2(const Circuit& c) {
  LabeledGraph g;
  add_device_nodes(c, g);
  NetIds net_id(c, false);
  for (const auto& [net, members] : c.nets()) {
    std::vector<std::string> devs = device_ids(c, c.devices_on(net));
    if (c.is_port(net)) {
      std::string nid = net_id(net);
      g.add_node(nid, std::string(kNetLabel));
      for (const auto& d : devs) g.add_edge(nid, d);
    } else {
      add_clique(g, devs);
    }
  }
  return g;
}

LabeledGraph build_c3(const Circuit& c) {
  LabeledGraph g;
  add_device_nodes(c, g);
  NetIds net_id(c, false);
  for (const auto& [net, members] : c.nets()) {
    std::string nid = net_id(net);
    g.add_node(nid, std::string(kNetLabel));
    for (const auto& d : device_ids(c, c.devices_on(net))) g.add_edge(d, nid);
  }
  return g;
}

LabeledGraph build_c4(const Circuit& c) {
  LabeledGraph g;
  for (const auto& d : c.devices()) {
    g.add_node(d.id, d.category);
    for (const auto& p : d.pins) {
      std::string pid = d.id + "." + p.role;
      g.add_node(pid, d.category + "." + p.role);
      g.add_edge(d.id, pid);
    }
  }
  for (const auto& [net, members] : c.nets()) {
    std::vector<std::string> pins;
    pins.reserve(members.size());
    for (const auto& m : members) {
      pins.push_back(c.devices()[m.device].id + "." + m.role);
    }
    add_clique(g, pins);
  }
  return g;
}

LabeledGraph build_c5(const Circuit& c) {
  for (const auto& d : c.devices()) {
    if (d.category != "Mos" && d.category != "Triode") {
      throw NotApplicableError(
          "representation C5 applies only to Mos/Triode circuits; device " +
          d.id + " is " + d.category);
    }
  }
  LabeledGraph g;
  NetIds net_id(c, false);
  for (const auto& [net, members] : c.nets()) {
    g.add_node(net_id(net), std::string(kNetLabel));
  }
  for (const auto& d : c.devices()) {
    const bool mos = d.category == "Mos";
    const std::string_view first = mos ? "d" : "c";
    const std::string_view second = mos ? "s" : "e";
    const std::string* a = nullptr;
    const std::string* b = nullptr;
    for (const auto& p : d.pins) {
      if (p.role == first) a = &p.net;
      if (p.role == second) b = &p.net;
    }
    if (a != nullptr && b != nullptr && *a != *b) {
      g.add_edge(net_id(*a), net_id(*b));
    }
  }
  return g;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

LabeledGraph build_representation(const Circuit& c, ReprClass k) {
  switch (k) {
    case ReprClass::kC1:
      return build_c1(c);
    case ReprClass::kC2:
      return build_c2(c);
    case ReprClass::kC3:
      return build_c3(c);
    case ReprClass::kC4:
      return build_c4(c);
    case ReprClass::kC5:
      return build_c5(c);
  }
  throw NotApplicableError("unknown representation class");
}

std::string to_dot(const LabeledGraph& g, std::string_view name) {
  std::string out = "graph " + quote(name) + " {\n";
  for (const auto& n : g.sorted_nodes()) {
    out += "  " + quote(n.id) + " [label=" + quote(n.label) + "];\n";
  }
  for (const auto& e : g.sorted_edges()) {
    out += "  " + quote(e.a) + " -- " + quote(e.b);
    if (e.label) out += " [label=" + quote(*e.label) + "]";
    out += ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace circret
