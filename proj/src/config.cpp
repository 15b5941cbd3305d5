#include "circret/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "circret/errors.hpp"

namespace circret {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_count(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ValidationError("config key " + std::string(key) +
                          ": expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

double to_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ValidationError("config key " + std::string(key) + ": expected a number, got '" +
                          std::string(v) + "'");
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (k2 > k1) throw ValidationError("k2 must not exceed k1");
  if (k2 == 0) throw ValidationError("k2 must be positive");
  if (!(stage1_ratio > 0.0 && stage1_ratio < 1.0)) {
    throw ValidationError("stage1_ratio must lie in (0, 1)");
  }
  if (erase_margin < 0) throw ValidationError("erase_margin must be non-negative");
  if (max_states == 0) throw ValidationError("max_states must be positive");
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const std::string v(trim(value));
  if (key == "k1") {
    k1 = to_count(key, v);
  } else if (key == "k2" || key == "top_k") {
    k2 = to_count(key, v);
  } else if (key == "max_states") {
    max_states = to_count(key, v);
  } else if (key == "beam_width") {
    beam_width = to_count(key, v);
  } else if (key == "time_budget_ms") {
    time_budget_ms = to_count(key, v);
  } else if (key == "stage1_ratio") {
    stage1_ratio = to_real(key, v);
  } else if (key == "stage1_reference") {
    if (v == "image") {
      stage1_reference = SizeReference::kImageArea;
    } else if (v == "largest") {
      stage1_reference = SizeReference::kLargestComponent;
    } else {
      throw ValidationError("stage1_reference must be image or largest");
    }
  } else if (key == "erase_margin") {
    erase_margin = static_cast<int>(to_count(key, v));
  } else if (key == "polarity") {
    if (v == "auto") {
      polarity = PolarityMode::kAuto;
    } else if (v == "light") {
      polarity = PolarityMode::kLight;
    } else if (v == "dark") {
      polarity = PolarityMode::kDark;
    } else {
      throw ValidationError("polarity must be auto, light or dark");
    }
  } else if (key == "detector") {
    if (v.empty()) {
      detector.reset();
    } else {
      detector = v;
    }
  } else if (key == "format") {
    if (v == "json") {
      format = OutputFormat::kJson;
    } else if (v == "table") {
      format = OutputFormat::kTable;
    } else {
      throw ValidationError("format must be json or table");
    }
  } else if (key == "threads") {
    threads = to_count(key, v);
  } else {
    throw ValidationError("unknown config key '" + std::string(key) + "'");
  }
}

ojson RunConfig::to_json() const {
  ojson j;
  j["k1"] = k1;
  j["k2"] = k2;
  j["max_states"] = max_states;
  j["beam_width"] = beam_width;
  j["time_budget_ms"] = time_budget_ms;
  j["stage1_ratio"] = stage1_ratio;
  j["stage1_reference"] =
      stage1_reference == SizeReference::kImageArea ? "image" : "largest";
  j["erase_margin"] = erase_margin;
  j["polarity"] = polarity == PolarityMode::kAuto    ? "auto"
                  : polarity == PolarityMode::kLight ? "light"
                                                     : "dark";
  j["detector"] = detector ? ojson(*detector) : ojson(nullptr);
  j["format"] = format == OutputFormat::kJson ? "json" : "table";
  j["threads"] = threads;
  return j;
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    base.set(trim(s.substr(0, eq)), s.substr(eq + 1));
  }
  base.validate();
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

}  // namespace circret
