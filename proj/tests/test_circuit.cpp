#include <doctest.h>

#include <fstream>
#include <sstream>

#include "circret/circuit.hpp"
#include "circret/errors.hpp"
#include "circret/json_io.hpp"
#include "circret/taxonomy.hpp"
#include "support/oracles.hpp"

using namespace circret;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Circuit rc_lp() { return load_netlist((oracle::data_dir() / "rc_lp.json").string()); }

bool has_message(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("rc-lp parses into 4 devices, 3 nets, 1 port") {
  const Circuit c = rc_lp();
  CHECK(c.devices().size() == 4);
  CHECK(c.nets().size() == 3);
  CHECK(c.ports() == std::set<std::string>{"N_OUT"});
  const auto& gnd = c.nets().at("N_GND");
  REQUIRE(gnd.size() == 3);
  CHECK(c.devices()[gnd[0].device].id == "V1");
  CHECK(gnd[0].role == "p2");
  CHECK(c.devices()[gnd[2].device].id == "G1");
  CHECK(c.is_port("N_OUT"));
  CHECK_FALSE(c.is_port("N_IN"));
  CHECK(c.pin_count() == 7);
}

TEST_CASE("net map is the inverse image of pin bindings") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    oracle::Rng rng(seed);
    std::vector<Device> devs;
    const int n = rng.uniform(1, 6);
    for (int i = 0; i < n; ++i) {
      Device d{"D" + std::to_string(i), "Res1", {}};
      d.pins = {{"p1", "n" + std::to_string(rng.uniform(0, 3))},
                {"p2", "n" + std::to_string(rng.uniform(0, 3))}};
      devs.push_back(d);
    }
    Circuit c("x", devs, {});
    std::size_t members = 0;
    for (const auto& [net, ms] : c.nets()) {
      for (const auto& m : ms) {
        bool found = false;
        for (const auto& p : c.devices()[m.device].pins) {
          found = found || (p.role == m.role && p.net == net);
        }
        CHECK(found);
      }
      members += ms.size();
    }
    CHECK(members == c.pin_count());
  }
}

TEST_CASE("empty document gives an empty circuit") {
  const Circuit c = parse_netlist(R"({"id": "empty", "devices": [], "ports": []})");
  CHECK(c.devices().empty());
  CHECK(c.nets().empty());
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_netlist("{not json"), ParseError);
  CHECK_THROWS_AS(parse_netlist(R"({"id": "x"})"), ParseError);
  CHECK_THROWS_AS(
      parse_netlist(R"({"id":"x","devices":[{"id":"R1","category":"Resistor","pins":[]}]})"),
      UnknownCategoryError);
  CHECK_THROWS_AS(parse_netlist(R"({"id":"x","devices":[
      {"id":"R1","category":"Res1","pins":[{"role":"p1","net":"a"},{"role":"p2","net":"b"}]},
      {"id":"R1","category":"Res1","pins":[{"role":"p1","net":"a"},{"role":"p2","net":"b"}]}]})"),
                  ValidationError);
  // more pins than a fixed-arity category allows
  CHECK_THROWS_AS(parse_netlist(R"({"id":"x","devices":[
      {"id":"G1","category":"AGND","pins":[{"role":"t","net":"a"},{"role":"t2","net":"b"}]}]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_netlist(R"({"id":"x","devices":[
      {"id":"R1","category":"Res1","pins":[{"role":"p1","net":"a"},{"role":"p2","net":"b"}]}],
      "ports":["zz"]})"),
                  ValidationError);
}

TEST_CASE("validation report") {
  CHECK(validate_circuit(rc_lp()).ok());
  CHECK(validate_circuit(rc_lp()).warnings.empty());

  auto devs = rc_lp().devices();
  devs[2].pins[1].net = "N_X";
  const auto rep = validate_circuit(Circuit("rc", devs, {"N_OUT"}));
  CHECK(rep.ok());
  CHECK(has_message(rep.warnings, "dangling net N_X"));

  auto dup = rc_lp().devices();
  dup[1].id = "V1";
  const auto bad = validate_circuit(Circuit("rc", dup, {}));
  CHECK_FALSE(bad.ok());
  CHECK(has_message(bad.errors, "duplicate device id"));

  Device shorted{"R9", "Res1", {{"p1", "a"}, {"p2", "a"}}};
  Device other{"R8", "Res1", {{"p1", "a"}, {"p2", "b"}}};
  Device other2{"R7", "Res1", {{"p1", "b"}, {"p2", "a"}}};
  CHECK(has_message(validate_circuit(Circuit("s", {shorted, other, other2}, {})).warnings,
                    "every pin on net"));
}

TEST_CASE("pin roles") {
  CHECK(pin_roles_for("Mos") == std::vector<std::string>{"g", "d", "s"});
  CHECK(pin_roles_for("AGND") == std::vector<std::string>{"t"});
  CHECK(pin_roles_for("Triode") == std::vector<std::string>{"b", "c", "e"});
  CHECK(pin_roles_for("Amplifier") == std::vector<std::string>{"in+", "in-", "out"});
  CHECK(pin_roles_for("Res2") == std::vector<std::string>{"p1", "p2"});
  CHECK_THROWS_AS(pin_roles_for("Foo"), UnknownCategoryError);
}

TEST_CASE("taxonomy has exactly the 35 labels") {
  const std::set<std::string> expected{
      "Res1",     "Res2",     "Cap1",     "Cap2",    "Inductance", "Diode",   "Bidiode1",
      "Bidiode2", "Triode",   "Mos",      "Trans",   "Bridge",     "Amplifier", "AGND",
      "DGND",     "PGND",     "Battery",  "DCPower", "ACPower",    "CurPower", "Crystal",
      "Switch",   "Lamp",     "Speaker",  "Motor",   "DeviceA",    "DeviceV", "DeviceM",
      "DeviceOsc", "Module1", "Module2",  "Relay",   "Optocoupler", "notCon", "notCon2"};
  std::set<std::string> got;
  for (const auto& c : all_categories()) got.insert(std::string(c.label));
  CHECK(got == expected);
  for (const auto& l : expected) CHECK(find_category(l) != nullptr);
  CHECK(canonical_label("DeviceO") == "DeviceOsc");
  for (const char* bad : {"Resistor", "res1", "", "MOS", "Transistor"}) {
    CHECK(find_category(bad) == nullptr);
  }
}

TEST_CASE("variable-arity categories accept t<k> roles only") {
  const Circuit c = parse_netlist(R"({"id":"x","devices":[
      {"id":"U1","category":"Module1","pins":[{"role":"t1","net":"a"},{"role":"t2","net":"b"},
        {"role":"t3","net":"c"},{"role":"t5","net":"d"},{"role":"t6","net":"e"}]},
      {"id":"R1","category":"Res1","pins":[{"role":"p1","net":"a"},{"role":"p2","net":"b"}]}]})");
  CHECK(c.devices()[0].pins.size() == 5);
  CHECK_THROWS_AS(parse_netlist(R"({"id":"x","devices":[
      {"id":"U1","category":"Relay","pins":[{"role":"coil","net":"a"}]}]})"),
                  ValidationError);
}

TEST_CASE("serialize then parse is the identity") {
  const Circuit c = rc_lp();
  const std::string text = serialize_netlist(c);
  const Circuit back = parse_netlist(text);
  CHECK(back == c);
  CHECK(serialize_netlist(back) == text);
  // ports are emitted sorted
  Circuit p("p", c.devices(), {"N_OUT", "N_IN", "N_GND"});
  const auto j = nlohmann::json::parse(serialize_netlist(p));
  CHECK(j["ports"] == nlohmann::json::array({"N_GND", "N_IN", "N_OUT"}));
  // DeviceO canonicalizes on the way in
  const Circuit o = parse_netlist(R"({"id":"o","devices":[
      {"id":"X1","category":"DeviceO","pins":[{"role":"t1","net":"a"}]}]})");
  CHECK(o.devices()[0].category == "DeviceOsc");
}

TEST_CASE("field order in the document is irrelevant") {
  const Circuit a = parse_netlist(slurp(oracle::data_dir() / "rc_lp.json"));
  const Circuit b = parse_netlist(R"({"ports":["N_OUT"],"devices":[
    {"pins":[{"net":"N_IN","role":"p1"},{"net":"N_GND","role":"p2"}],"category":"DCPower","id":"V1"},
    {"pins":[{"net":"N_IN","role":"p1"},{"net":"N_OUT","role":"p2"}],"category":"Res1","id":"R1"},
    {"pins":[{"net":"N_OUT","role":"p1"},{"net":"N_GND","role":"p2"}],"category":"Cap1","id":"C1"},
    {"pins":[{"net":"N_GND","role":"t"}],"category":"AGND","id":"G1"}],"id":"rc-lp"})");
  CHECK(a == b);
}

TEST_CASE("missing netlist file is an io error") {
  CHECK_THROWS_AS(load_netlist("/nonexistent/netlist.json"), IoError);
}
