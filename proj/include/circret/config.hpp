#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "circret/json_io.hpp"
#include "circret/recognition.hpp"

namespace circret {

enum class OutputFormat { kJson, kTable };

// Every tunable of the command-line tool. Config files use the same key
// names, one `key = value` per line; `#` starts a comment.
struct RunConfig {
  std::size_t k1 = 20;
  std::size_t k2 = 5;
  std::size_t max_states = 250000;
  std::size_t beam_width = 0;
  std::size_t time_budget_ms = 0;
  double stage1_ratio = 0.10;
  SizeReference stage1_reference = SizeReference::kImageArea;
  int erase_margin = kDefaultEraseMargin;
  PolarityMode polarity = PolarityMode::kAuto;
  std::optional<std::string> detector;
  OutputFormat format = OutputFormat::kJson;
  std::size_t threads = 1;

  // k2 <= k1, ratio in (0,1), erase_margin >= 0. Throws ValidationError.
  void validate() const;
  // Applies one key/value pair. Throws ValidationError on unknown keys or
  // malformed values.
  void set(std::string_view key, std::string_view value);
  ojson to_json() const;
};

inline constexpr const char* kConfigEnvVar = "CIRCRET_CONFIG";

RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace circret
