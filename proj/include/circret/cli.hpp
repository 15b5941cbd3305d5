#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "circret/ged.hpp"
#include "circret/json_io.hpp"
#include "circret/retrieval.hpp"

namespace circret {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line (args exclude the program name). Results go to
// `out`, diagnostics to `err`. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// JSON shapes shared by the CLI and the Python bindings. With
// deterministic = true, wall-clock fields are left out.
ojson ged_result_to_json(const GedResult& r, const SimilarityScore& s, bool deterministic);
ojson ranked_results_to_json(const std::vector<RankedResult>& results);
ojson eval_report_to_json(const EvalReport& r, bool deterministic);

}  // namespace circret
