#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace circret {

struct PinBinding {
  std::string role;
  std::string net;

  friend bool operator==(const PinBinding&, const PinBinding&) = default;
};

struct Device {
  std::string id;
  std::string category;
  std::vector<PinBinding> pins;

  friend bool operator==(const Device&, const Device&) = default;
};

// One member of a net: the device (by declaration index) and the pin role.
struct NetMember {
  std::size_t device = 0;
  std::string role;

  friend bool operator==(const NetMember&, const NetMember&) = default;
};

// Immutable netlist. The net map is derived from the pin bindings on
// construction and is never edited independently.
class Circuit {
 public:
  Circuit() = default;
  Circuit(std::string id, std::vector<Device> devices,
          std::set<std::string> ports);

  const std::string& id() const { return id_; }
  const std::vector<Device>& devices() const { return devices_; }
  const std::set<std::string>& ports() const { return ports_; }
  // net id -> members in (device declaration, pin declaration) order
  const std::map<std::string, std::vector<NetMember>>& nets() const {
    return nets_;
  }

  bool is_port(std::string_view net) const;
  std::size_t pin_count() const;
  // Distinct device indices on a net, ascending.
  std::vector<std::size_t> devices_on(std::string_view net) const;

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.id_ == b.id_ && a.devices_ == b.devices_ && a.ports_ == b.ports_;
  }

 private:
  std::string id_;
  std::vector<Device> devices_;
  std::set<std::string> ports_;
  std::map<std::string, std::vector<NetMember>> nets_;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

ValidationReport validate_circuit(const Circuit& c);

// Parses a netlist JSON document and validates it. Throws ParseError for
// malformed documents and ValidationError (or UnknownCategoryError) for
// the first validation error.
Circuit parse_netlist(std::string_view text);
Circuit load_netlist(const std::string& path);

// Devices and pins in declaration order, ports sorted; two-space indent.
std::string serialize_netlist(const Circuit& c);

}  // namespace circret
