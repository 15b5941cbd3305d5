#include "circret/retrieval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "circret/errors.hpp"
#include "circret/json_io.hpp"

namespace circret {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::map<std::string, ClassStats> compute_stats(const std::vector<CorpusEntry>& es) {
  std::map<std::string, ClassStats> out;
  for (ReprClass k : kAllReprClasses) {
    ClassStats s;
    double nodes = 0, edges = 0;
    for (const auto& e : es) {
      LabeledGraph built;
      const LabeledGraph* g = nullptr;
      if (k == ReprClass::kC1) {
        g = &e.g_c1;
      } else if (k == ReprClass::kC4) {
        g = &e.g_c4;
      } else {
        try {
          built = build_representation(e.circuit, k);
        } catch (const NotApplicableError&) {
          continue;
        }
        g = &built;
      }
      ++s.graphs;
      nodes += static_cast<double>(g->node_count());
      edges += static_cast<double>(g->edge_count());
    }
    if (s.graphs > 0) {
      s.mean_nodes = nodes / static_cast<double>(s.graphs);
      s.mean_edges = edges / static_cast<double>(s.graphs);
    }
    out[to_string(k)] = s;
  }
  return out;
}

IndexManifest make_manifest(const std::vector<CorpusEntry>& es) {
  IndexManifest m;
  m.format_version = kIndexFormatVersion;
  m.entry_count = es.size();
  for (const auto& e : es) ++m.type_counts[e.type_label];
  m.stats = compute_stats(es);
  return m;
}

ojson manifest_to_json(const IndexManifest& m) {
  ojson j;
  j["format_version"] = m.format_version;
  j["entries"] = m.entry_count;
  ojson types = ojson::object();
  for (const auto& [t, n] : m.type_counts) types[t] = n;
  j["types"] = std::move(types);
  ojson stats = ojson::object();
  for (const auto& [k, s] : m.stats) {
    ojson js;
    js["graphs"] = s.graphs;
    js["mean_nodes"] = s.mean_nodes;
    js["mean_edges"] = s.mean_edges;
    stats[k] = std::move(js);
  }
  j["stats"] = std::move(stats);
  return j;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << data;
  if (!out) throw IoError("write failed for " + p.string());
}

bool better(const RankedResult& a, const RankedResult& b) {
  if (a.score.score != b.score.score) return a.score.score > b.score.score;
  return a.entry_id < b.entry_id;
}

struct Scored {
  RankedResult result;
  std::size_t expanded = 0;
};

// Scores `query_graph` against each candidate's graph for class `k`.
std::vector<Scored> score_stage(const LabeledGraph& query_graph,
                                const CorpusIndex& idx,
                                const std::vector<std::size_t>& candidates,
                                ReprClass k, const QueryOptions& opt) {
  std::vector<Scored> out(candidates.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= candidates.size()) return;
      const CorpusEntry& e = idx.entries[candidates[i]];
      try {
        LabeledGraph built;
        const LabeledGraph* g = nullptr;
        if (k == ReprClass::kC1) {
          g = &e.g_c1;
        } else if (k == ReprClass::kC4) {
          g = &e.g_c4;
        } else {
          try {
            built = build_representation(e.circuit, k);
          } catch (const NotApplicableError& err) {
            throw NotApplicableError("entry " + e.entry_id + ": " + err.what());
          }
          g = &built;
        }
        Scored& s = out[i];
        s.result.entry_id = e.entry_id;
        s.result.stage = k == ReprClass::kC4 ? 2 : 1;
        if (query_graph.empty() && g->empty()) {
          s.result.cost = 0.0;
          s.result.score = SimilarityScore{0.0, 1.0};
          s.result.exact = true;
          continue;
        }
        GedResult r = ged_astar(query_graph, *g, opt.costs, opt.limits);
        s.result.cost = r.cost;
        s.result.exact = r.exact;
        s.result.score = normalized_similarity(query_graph, *g, r.cost);
        s.expanded = r.expanded;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::size_t threads = opt.threads == 0 ? std::thread::hardware_concurrency()
                                         : opt.threads;
  threads = std::max<std::size_t>(1, std::min(threads, candidates.size()));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<std::size_t> candidate_indices(const CorpusIndex& idx,
                                           const QueryOptions& opt) {
  std::vector<std::size_t> out;
  out.reserve(idx.entries.size());
  for (std::size_t i = 0; i < idx.entries.size(); ++i) {
    if (opt.exclude_id && idx.entries[i].entry_id == *opt.exclude_id) continue;
    out.push_back(i);
  }
  return out;
}

// Ranks, truncates to `keep`, and records stage statistics.
std::vector<RankedResult> rank(std::vector<Scored>& scored, std::size_t keep,
                               StageStats& stats) {
  std::vector<RankedResult> results;
  results.reserve(scored.size());
  for (auto& s : scored) {
    stats.expanded += s.expanded;
    if (!s.result.exact) ++stats.inexact;
    results.push_back(std::move(s.result));
  }
  stats.candidates = results.size();
  std::sort(results.begin(), results.end(), better);
  if (results.size() > keep) results.resize(keep);
  return results;
}

}  // namespace

const CorpusEntry* CorpusIndex::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.entry_id == id) return &e;
  }
  return nullptr;
}

CorpusIndex build_index(const std::vector<CorpusInput>& inputs) {
  CorpusIndex idx;
  std::set<std::string> seen;
  for (const auto& in : inputs) {
    if (in.entry_id.empty()) throw ValidationError("corpus entry with empty id");
    if (!seen.insert(in.entry_id).second) {
      throw ValidationError("duplicate corpus entry id: " + in.entry_id);
    }
    ValidationReport report = validate_circuit(in.circuit);
    if (!report.ok()) {
      throw ValidationError("entry " + in.entry_id + ": " + report.errors.front());
    }
    CorpusEntry e;
    e.entry_id = in.entry_id;
    e.type_label = in.type_label;
    e.circuit = in.circuit;
    e.g_c1 = build_representation(in.circuit, ReprClass::kC1);
    e.g_c4 = build_representation(in.circuit, ReprClass::kC4);
    idx.entries.push_back(std::move(e));
  }
  idx.manifest = make_manifest(idx.entries);
  return idx;
}

CorpusIndex build_index(const std::vector<CorpusInput>& inputs,
                        const std::filesystem::path& dir) {
  CorpusIndex idx = build_index(inputs);
  save_index(idx, dir);
  return idx;
}

void save_index(const CorpusIndex& idx, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create index directory " + dir.string());
  std::string lines;
  for (const auto& e : idx.entries) {
    ojson j;
    j["id"] = e.entry_id;
    j["type"] = e.type_label;
    j["netlist"] = circuit_to_json(e.circuit);
    j["c1"] = graph_to_json(e.g_c1);
    j["c4"] = graph_to_json(e.g_c4);
    lines += j.dump() + "\n";
  }
  write_file(dir / "entries.jsonl", lines);
  write_file(dir / "manifest.json", manifest_to_json(idx.manifest).dump(2) + "\n");
}

CorpusIndex load_index(const std::filesystem::path& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what());
  }
  if (!manifest.is_object() || manifest.value("format_version", 0) != kIndexFormatVersion) {
    throw ParseError("unsupported index format in " + dir.string());
  }
  CorpusIndex idx;
  std::istringstream lines(read_file(dir / "entries.jsonl"));
  std::string line;
  std::set<std::string> seen;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      CorpusEntry e;
      e.entry_id = j.at("id").get<std::string>();
      e.type_label = j.at("type").get<std::string>();
      e.circuit = circuit_from_json(j.at("netlist"));
      e.g_c1 = graph_from_json(j.at("c1"));
      e.g_c4 = graph_from_json(j.at("c4"));
      if (!seen.insert(e.entry_id).second) {
        throw ValidationError("duplicate corpus entry id: " + e.entry_id);
      }
      LabeledGraph c1 = build_representation(e.circuit, ReprClass::kC1);
      LabeledGraph c4 = build_representation(e.circuit, ReprClass::kC4);
      if (!(e.g_c1 == c1) || !(e.g_c4 == c4)) {
        throw ValidationError("stored graphs of entry " + e.entry_id +
                              " do not match its netlist");
      }
      // Keep declaration node order so search order matches a fresh build.
      e.g_c1 = std::move(c1);
      e.g_c4 = std::move(c4);
      idx.entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed index entry: ") + e.what());
    }
  }
  idx.manifest = make_manifest(idx.entries);
  if (manifest.value("entries", std::size_t{0}) != idx.manifest.entry_count) {
    throw ValidationError("manifest entry count does not match entries.jsonl");
  }
  return idx;
}

std::vector<CorpusInput> parse_corpus_jsonl(const std::string& text) {
  std::vector<CorpusInput> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      CorpusInput ci;
      ci.entry_id = j.at("id").get<std::string>();
      ci.type_label = j.at("type").get<std::string>();
      ci.circuit = parse_netlist(j.at("netlist").dump());
      out.push_back(std::move(ci));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("corpus line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw ValidationError("corpus line " + std::to_string(lineno) + ": " +
                            e.what());
    }
  }
  return out;
}

std::vector<CorpusInput> load_corpus_jsonl(const std::filesystem::path& path) {
  return parse_corpus_jsonl(read_file(path));
}

std::size_t QueryOutcome::total_expanded() const {
  std::size_t n = 0;
  for (const auto& s : stages) n += s.expanded;
  return n;
}

QueryOutcome retrieve_hierarchical(const Circuit& query, const CorpusIndex& idx,
                                   std::size_t k1, std::size_t k2,
                                   const QueryOptions& opt) {
  if (k2 > k1) throw ValidationError("k2 must not exceed k1");
  QueryOutcome out;
  const auto candidates = candidate_indices(idx, opt);
  if (candidates.empty()) return out;

  StageStats first{"C1"};
  auto t0 = Clock::now();
  const LabeledGraph q1 = build_representation(query, ReprClass::kC1);
  auto scored = score_stage(q1, idx, candidates, ReprClass::kC1, opt);
  auto survivors = rank(scored, k1, first);
  first.scoring_seconds = seconds_since(t0);
  out.stages.push_back(first);

  std::vector<std::size_t> second_candidates;
  second_candidates.reserve(survivors.size());
  for (const auto& r : survivors) {
    for (std::size_t i : candidates) {
      if (idx.entries[i].entry_id == r.entry_id) {
        second_candidates.push_back(i);
        break;
      }
    }
  }
  StageStats second{"C4"};
  t0 = Clock::now();
  const LabeledGraph q4 = build_representation(query, ReprClass::kC4);
  scored = score_stage(q4, idx, second_candidates, ReprClass::kC4, opt);
  out.results = rank(scored, k2, second);
  second.scoring_seconds = seconds_since(t0);
  out.stages.push_back(second);
  return out;
}

QueryOutcome retrieve_flat(const Circuit& query, const CorpusIndex& idx,
                           ReprClass k, std::size_t top_k,
                           const QueryOptions& opt) {
  QueryOutcome out;
  const auto candidates = candidate_indices(idx, opt);
  if (candidates.empty() || top_k == 0) return out;
  StageStats stats{to_string(k)};
  const auto t0 = Clock::now();
  const LabeledGraph q = build_representation(query, k);
  auto scored = score_stage(q, idx, candidates, k, opt);
  out.results = rank(scored, top_k, stats);
  stats.scoring_seconds = seconds_since(t0);
  out.stages.push_back(stats);
  return out;
}

EvalReport evaluate(const CorpusIndex& idx, const EvalConfig& cfg) {
  if (idx.entries.size() < 2) {
    throw ValidationError("evaluation needs at least two corpus entries");
  }
  for (const auto& e : idx.entries) {
    if (e.type_label.empty()) {
      throw ValidationError("entry " + e.entry_id + " has no type label");
    }
  }
  EvalReport rep;
  rep.mode = cfg.mode == RetrievalMode::kHierarchical
                 ? "hierarchical"
                 : "flat:" + to_string(cfg.flat_class);
  rep.queries = idx.entries.size();
  rep.top_k = cfg.top_k;
  rep.per_k_precision.assign(cfg.top_k, 0.0);
  std::map<std::string, StageStats> stages;
  std::vector<std::string> stage_order;

  for (const auto& e : idx.entries) {
    QueryOptions opt = cfg.query;
    opt.exclude_id = e.entry_id;
    const auto t0 = Clock::now();
    QueryOutcome o = cfg.mode == RetrievalMode::kHierarchical
                         ? retrieve_hierarchical(e.circuit, idx, cfg.k1,
                                                 cfg.top_k, opt)
                         : retrieve_flat(e.circuit, idx, cfg.flat_class,
                                         cfg.top_k, opt);
    const double dt = seconds_since(t0);
    rep.query_seconds.push_back(dt);
    rep.total_seconds += dt;

    std::size_t hits = 0;
    for (std::size_t k = 0; k < cfg.top_k; ++k) {
      if (k < o.results.size()) {
        const CorpusEntry* hit = idx.find(o.results[k].entry_id);
        if (hit != nullptr && hit->type_label == e.type_label) ++hits;
      }
      const double p = static_cast<double>(hits) / static_cast<double>(k + 1);
      rep.per_k_precision[k] += p;
      rep.ap_literal += p;
    }
    for (const auto& s : o.stages) {
      auto [it, fresh] = stages.try_emplace(s.name, StageStats{s.name});
      if (fresh) stage_order.push_back(s.name);
      it->second.candidates += s.candidates;
      it->second.expanded += s.expanded;
      it->second.inexact += s.inexact;
      it->second.scoring_seconds += s.scoring_seconds;
      rep.scoring_seconds += s.scoring_seconds;
      rep.inexact_scores += s.inexact;
    }
  }
  const double n = static_cast<double>(rep.queries);
  rep.ap_literal /= n;
  rep.ap_normalized = cfg.top_k == 0 ? 0.0 : rep.ap_literal / static_cast<double>(cfg.top_k);
  for (double& p : rep.per_k_precision) p /= n;
  rep.at_seconds = rep.total_seconds / n;
  for (const auto& name : stage_order) rep.stages.push_back(stages[name]);
  return rep;
}

}  // namespace circret
