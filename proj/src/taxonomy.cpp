#include "circret/taxonomy.hpp"

#include <algorithm>
#include <charconv>

#include "circret/errors.hpp"

namespace circret {
namespace {

std::vector<DeviceCategory> make_table() {
  const std::vector<std::string> two{"p1", "p2"};
  const std::vector<std::string> one{"t"};
  const std::vector<std::string> nominal{"t1", "t2", "t3", "t4"};
  auto fixed = [](std::string_view l, std::vector<std::string> r,
                  bool sym = false) {
    return DeviceCategory{l, std::move(r), Arity::kFixed, sym};
  };
  auto variable = [&](std::string_view l) {
    return DeviceCategory{l, nominal, Arity::kVariable, false};
  };
  return {
      fixed("Res1", two, true),     fixed("Res2", two, true),
      fixed("Cap1", two, true),     fixed("Cap2", two),
      fixed("Inductance", two, true),
      fixed("Diode", two),          fixed("Bidiode1", two, true),
      fixed("Bidiode2", two, true), fixed("Triode", {"b", "c", "e"}),
      fixed("Mos", {"g", "d", "s"}),
      variable("Trans"),            variable("Bridge"),
      fixed("Amplifier", {"in+", "in-", "out"}),
      fixed("AGND", one),           fixed("DGND", one),
      fixed("PGND", one),           fixed("Battery", two),
      fixed("DCPower", two),        fixed("ACPower", two),
      fixed("CurPower", two),       fixed("Crystal", two, true),
      fixed("Switch", two, true),   fixed("Lamp", two, true),
      fixed("Speaker", two, true),  fixed("Motor", two, true),
      fixed("DeviceA", two),        fixed("DeviceV", two),
      fixed("DeviceM", two),        variable("DeviceOsc"),
      variable("Module1"),          variable("Module2"),
      variable("Relay"),            variable("Optocoupler"),
      fixed("notCon", one),         fixed("notCon2", one),
  };
}

const std::vector<DeviceCategory>& table() {
  static const std::vector<DeviceCategory> t = make_table();
  return t;
}

}  // namespace

std::span<const DeviceCategory> all_categories() { return table(); }

const DeviceCategory* find_category(std::string_view label) {
  if (label == "DeviceO") label = "DeviceOsc";
  const auto& t = table();
  auto it = std::find_if(t.begin(), t.end(),
                         [&](const DeviceCategory& c) { return c.label == label; });
  return it == t.end() ? nullptr : &*it;
}

const DeviceCategory& category(std::string_view label) {
  const DeviceCategory* c = find_category(label);
  if (c == nullptr) throw UnknownCategoryError(std::string(label));
  return *c;
}

std::string canonical_label(std::string_view label) {
  return std::string(category(label).label);
}

const std::vector<std::string>& pin_roles_for(std::string_view label) {
  return category(label).pin_roles;
}

bool role_allowed(const DeviceCategory& cat, std::string_view role) {
  if (cat.arity == Arity::kFixed) {
    return std::find(cat.pin_roles.begin(), cat.pin_roles.end(), role) !=
           cat.pin_roles.end();
  }
  if (role.size() < 2 || role[0] != 't') return false;
  unsigned k = 0;
  const char* first = role.data() + 1;
  const char* last = role.data() + role.size();
  auto [ptr, ec] = std::from_chars(first, last, k);
  return ec == std::errc() && ptr == last && k >= 1 && role[1] != '0';
}

std::string variable_role(std::size_t index) {
  return "t" + std::to_string(index + 1);
}

}  // namespace circret
