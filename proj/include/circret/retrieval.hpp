#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "circret/circuit.hpp"
#include "circret/ged.hpp"
#include "circret/graph.hpp"

namespace circret {

struct CorpusEntry {
  std::string entry_id;
  std::string type_label;
  Circuit circuit;
  LabeledGraph g_c1;
  LabeledGraph g_c4;
};

struct ClassStats {
  std::size_t graphs = 0;  // entries the class applies to
  double mean_nodes = 0.0;
  double mean_edges = 0.0;
};

struct IndexManifest {
  int format_version = 1;
  std::size_t entry_count = 0;
  std::map<std::string, std::size_t> type_counts;
  std::map<std::string, ClassStats> stats;  // keyed "C1".."C5"
};

struct CorpusIndex {
  std::vector<CorpusEntry> entries;
  IndexManifest manifest;

  const CorpusEntry* find(const std::string& id) const;
};

struct CorpusInput {
  std::string entry_id;
  std::string type_label;
  Circuit circuit;
};

inline constexpr int kIndexFormatVersion = 1;

// Precomputes C1/C4 graphs and the manifest statistics. Throws
// ValidationError on duplicate ids or invalid circuits.
CorpusIndex build_index(const std::vector<CorpusInput>& inputs);
// build_index followed by save_index.
CorpusIndex build_index(const std::vector<CorpusInput>& inputs,
                        const std::filesystem::path& dir);

// Writes manifest.json and entries.jsonl. Byte-identical for identical input.
void save_index(const CorpusIndex& idx, const std::filesystem::path& dir);
// Loads and checks every stored graph against a rebuild from its netlist.
CorpusIndex load_index(const std::filesystem::path& dir);

// One JSON object per line: {"id", "type", "netlist"}. Blank lines skipped.
std::vector<CorpusInput> parse_corpus_jsonl(const std::string& text);
std::vector<CorpusInput> load_corpus_jsonl(const std::filesystem::path& path);

struct RankedResult {
  std::string entry_id;
  SimilarityScore score;
  double cost = 0.0;
  int stage = 1;  // 2 when scored on the C4 representation
  bool exact = true;

  friend bool operator==(const RankedResult& a, const RankedResult& b) {
    return a.entry_id == b.entry_id && a.score.score == b.score.score &&
           a.score.nged == b.score.nged && a.cost == b.cost &&
           a.stage == b.stage && a.exact == b.exact;
  }
};

struct QueryOptions {
  SearchLimits limits;
  CostModel costs;
  // Worker threads for candidate scoring; 0 = hardware concurrency.
  std::size_t threads = 1;
  // Candidate left out of scoring (leave-one-out evaluation).
  std::optional<std::string> exclude_id;
};

struct StageStats {
  std::string name;  // "C1", "C4", ...
  std::size_t candidates = 0;
  std::size_t expanded = 0;
  std::size_t inexact = 0;
  double scoring_seconds = 0.0;
};

struct QueryOutcome {
  std::vector<RankedResult> results;
  std::vector<StageStats> stages;
  std::size_t total_expanded() const;
};

// Stage 1 ranks every entry on C1 and keeps the best k1; stage 2 re-ranks
// those on C4 and returns the best k2. Ordering is (score desc, id asc).
QueryOutcome retrieve_hierarchical(const Circuit& query, const CorpusIndex& idx,
                                   std::size_t k1 = 20, std::size_t k2 = 5,
                                   const QueryOptions& opt = {});

QueryOutcome retrieve_flat(const Circuit& query, const CorpusIndex& idx,
                           ReprClass k, std::size_t top_k,
                           const QueryOptions& opt = {});

enum class RetrievalMode { kHierarchical, kFlat };

struct EvalConfig {
  RetrievalMode mode = RetrievalMode::kHierarchical;
  ReprClass flat_class = ReprClass::kC4;
  std::size_t k1 = 20;
  std::size_t top_k = 5;
  QueryOptions query;
};

struct EvalReport {
  std::string mode;
  std::size_t queries = 0;
  std::size_t top_k = 5;
  double ap_literal = 0.0;     // sum over K of P^K, averaged over queries
  double ap_normalized = 0.0;  // ap_literal / top_k
  std::vector<double> per_k_precision;  // mean P^K for K = 1..top_k
  double total_seconds = 0.0;           // T: summed per-query wall clock
  double at_seconds = 0.0;              // AT = T / N
  double scoring_seconds = 0.0;         // GED scoring only
  std::vector<double> query_seconds;
  std::vector<StageStats> stages;       // aggregated per representation
  std::size_t inexact_scores = 0;
};

// Leave-one-out: every entry queries the index with itself excluded.
EvalReport evaluate(const CorpusIndex& idx, const EvalConfig& cfg = {});

}  // namespace circret
