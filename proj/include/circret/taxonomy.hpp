#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace circret {

enum class Arity {
  kFixed,     // roles are exactly the category's role list
  kVariable,  // per-instance roles t1..tk
};

struct DeviceCategory {
  std::string_view label;
  std::vector<std::string> pin_roles;
  Arity arity = Arity::kFixed;
  // Two-terminal parts whose terminals are interchangeable.
  bool symmetric = false;
};

// The 35 schematic component categories. Order matches the detector label
// sheet (row-major).
std::span<const DeviceCategory> all_categories();

// Accepts the alias "DeviceO" and returns the canonical "DeviceOsc" entry.
const DeviceCategory* find_category(std::string_view label);

// Throws UnknownCategoryError for labels outside the taxonomy.
const DeviceCategory& category(std::string_view label);

std::string canonical_label(std::string_view label);

// Canonical role list. For variable-arity categories this is the nominal
// list t1..t4; instances may carry any number of t<k> roles.
const std::vector<std::string>& pin_roles_for(std::string_view label);

// True when `role` is legal for a device of category `cat`.
bool role_allowed(const DeviceCategory& cat, std::string_view role);

// Role for the i-th contact (0-based) of a variable-arity device.
std::string variable_role(std::size_t index);

}  // namespace circret
