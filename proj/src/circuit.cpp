#include "circret/circuit.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "circret/errors.hpp"
#include "circret/json_io.hpp"
#include "circret/taxonomy.hpp"

namespace circret {

Circuit::Circuit(std::string id, std::vector<Device> devices,
                 std::set<std::string> ports)
    : id_(std::move(id)), devices_(std::move(devices)), ports_(std::move(ports)) {
  for (std::size_t d = 0; d < devices_.size(); ++d) {
    for (const auto& pin : devices_[d].pins) {
      nets_[pin.net].push_back(NetMember{d, pin.role});
    }
  }
}

bool Circuit::is_port(std::string_view net) const {
  return ports_.find(std::string(net)) != ports_.end();
}

std::size_t Circuit::pin_count() const {
  std::size_t n = 0;
  for (const auto& d : devices_) n += d.pins.size();
  return n;
}

std::vector<std::size_t> Circuit::devices_on(std::string_view net) const {
  std::vector<std::size_t> out;
  auto it = nets_.find(std::string(net));
  if (it == nets_.end()) return out;
  for (const auto& m : it->second) out.push_back(m.device);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ValidationReport validate_circuit(const Circuit& c) {
  ValidationReport r;
  std::unordered_set<std::string> ids;
  for (const auto& d : c.devices()) {
    if (d.id.empty()) r.errors.push_back("device with empty id");
    if (!ids.insert(d.id).second) {
      r.errors.push_back("duplicate device id: " + d.id);
    }
    const DeviceCategory* cat = find_category(d.category);
    if (cat == nullptr) {
      r.errors.push_back("unknown device category: " + d.category +
                         " (device " + d.id + ")");
      continue;
    }
    std::unordered_set<std::string> roles;
    for (const auto& p : d.pins) {
      if (p.net.empty()) {
        r.errors.push_back("device " + d.id + " pin " + p.role +
                           " bound to empty net id");
      }
      if (!roles.insert(p.role).second) {
        r.errors.push_back("device " + d.id + " repeats pin role " + p.role);
      } else if (!role_allowed(*cat, p.role)) {
        r.errors.push_back("device " + d.id + " (" + d.category +
                           ") has no pin role " + p.role);
      }
    }
    if (cat->arity == Arity::kFixed) {
      if (d.pins.size() > cat->pin_roles.size()) {
        r.errors.push_back("device " + d.id + " (" + d.category + ") has " +
                           std::to_string(d.pins.size()) +
                           " pins, expected " +
                           std::to_string(cat->pin_roles.size()));
      } else if (d.pins.size() < cat->pin_roles.size()) {
        r.warnings.push_back("device " + d.id + " has unconnected pins");
      }
    }
    if (d.pins.size() >= 2 &&
        std::all_of(d.pins.begin(), d.pins.end(), [&](const PinBinding& p) {
          return p.net == d.pins.front().net;
        })) {
      r.warnings.push_back("device " + d.id + " has every pin on net " +
                           d.pins.front().net);
    }
  }
  for (const auto& port : c.ports()) {
    if (c.nets().find(port) == c.nets().end()) {
      r.errors.push_back("port references nonexistent net: " + port);
    }
  }
  for (const auto& [net, members] : c.nets()) {
    if (members.size() == 1) r.warnings.push_back("dangling net " + net);
  }
  return r;
}

Circuit parse_netlist(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed netlist: ") + e.what());
  }
  Circuit c = circuit_from_json(doc);
  for (const auto& d : c.devices()) {
    if (find_category(d.category) == nullptr) {
      throw UnknownCategoryError(d.category);
    }
  }
  ValidationReport report = validate_circuit(c);
  if (!report.ok()) throw ValidationError(report.errors.front());
  return c;
}

Circuit load_netlist(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open netlist " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_netlist(ss.str());
}

std::string serialize_netlist(const Circuit& c) {
  return circuit_to_json(c).dump(2) + "\n";
}

}  // namespace circret
