#include "circret/json_io.hpp"

#include "circret/errors.hpp"
#include "circret/taxonomy.hpp"

namespace circret {
namespace {

const nlohmann::json& field(const nlohmann::json& obj, const char* key,
                            const char* what) {
  if (!obj.is_object()) throw ParseError(std::string(what) + " must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string(what) + " is missing field \"" + key + "\"");
  }
  return *it;
}

std::string string_field(const nlohmann::json& obj, const char* key,
                         const char* what) {
  const auto& v = field(obj, key, what);
  if (!v.is_string()) {
    throw ParseError(std::string(what) + " field \"" + key +
                     "\" must be a string");
  }
  return v.get<std::string>();
}

const nlohmann::json& array_field(const nlohmann::json& obj, const char* key,
                                  const char* what) {
  const auto& v = field(obj, key, what);
  if (!v.is_array()) {
    throw ParseError(std::string(what) + " field \"" + key +
                     "\" must be an array");
  }
  return v;
}

}  // namespace

Circuit circuit_from_json(const nlohmann::json& doc) {
  std::string id = string_field(doc, "id", "netlist");
  std::vector<Device> devices;
  for (const auto& jd : array_field(doc, "devices", "netlist")) {
    Device d;
    d.id = string_field(jd, "id", "device");
    d.category = string_field(jd, "category", "device");
    if (const DeviceCategory* cat = find_category(d.category)) {
      d.category = std::string(cat->label);
    }
    for (const auto& jp : array_field(jd, "pins", "device")) {
      d.pins.push_back(
          PinBinding{string_field(jp, "role", "pin"), string_field(jp, "net", "pin")});
    }
    devices.push_back(std::move(d));
  }
  std::set<std::string> ports;
  if (doc.contains("ports")) {
    for (const auto& p : array_field(doc, "ports", "netlist")) {
      if (!p.is_string()) throw ParseError("port entries must be strings");
      ports.insert(p.get<std::string>());
    }
  }
  return Circuit(std::move(id), std::move(devices), std::move(ports));
}

ojson circuit_to_json(const Circuit& c) {
  ojson doc;
  doc["id"] = c.id();
  ojson devices = ojson::array();
  for (const auto& d : c.devices()) {
    ojson jd;
    jd["id"] = d.id;
    jd["category"] = d.category;
    ojson pins = ojson::array();
    for (const auto& p : d.pins) {
      ojson jp;
      jp["role"] = p.role;
      jp["net"] = p.net;
      pins.push_back(std::move(jp));
    }
    jd["pins"] = std::move(pins);
    devices.push_back(std::move(jd));
  }
  doc["devices"] = std::move(devices);
  ojson ports = ojson::array();
  for (const auto& p : c.ports()) ports.push_back(p);
  doc["ports"] = std::move(ports);
  return doc;
}

LabeledGraph graph_from_json(const nlohmann::json& doc) {
  LabeledGraph g;
  for (const auto& n : array_field(doc, "nodes", "graph")) {
    g.add_node(string_field(n, "id", "node"), string_field(n, "label", "node"));
  }
  for (const auto& e : array_field(doc, "edges", "graph")) {
    std::optional<std::string> label;
    if (e.contains("label") && !e["label"].is_null()) {
      if (!e["label"].is_string()) throw ParseError("edge label must be a string");
      label = e["label"].get<std::string>();
    }
    g.add_edge(string_field(e, "a", "edge"), string_field(e, "b", "edge"),
               std::move(label));
  }
  return g;
}

ojson graph_to_json(const LabeledGraph& g) {
  ojson doc;
  ojson nodes = ojson::array();
  for (const auto& n : g.sorted_nodes()) {
    ojson jn;
    jn["id"] = n.id;
    jn["label"] = n.label;
    nodes.push_back(std::move(jn));
  }
  ojson edges = ojson::array();
  for (const auto& e : g.sorted_edges()) {
    ojson je;
    je["a"] = e.a;
    je["b"] = e.b;
    je["label"] = e.label ? ojson(*e.label) : ojson(nullptr);
    edges.push_back(std::move(je));
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return doc;
}

}  // namespace circret
