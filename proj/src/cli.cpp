#include "circret/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "circret/circuit.hpp"
#include "circret/config.hpp"
#include "circret/errors.hpp"
#include "circret/graph.hpp"
#include "circret/image.hpp"
#include "circret/recognition.hpp"

namespace circret {

ojson ged_result_to_json(const GedResult& r, const SimilarityScore& s, bool deterministic) {
  ojson j;
  j["cost"] = r.cost;
  j["nged"] = s.nged;
  j["score"] = s.score;
  j["exact"] = r.exact;
  j["exhausted"] = r.exhausted;
  j["expanded"] = r.expanded;
  ojson mapping = ojson::array();
  for (const auto& [from, to] : r.mapping) {
    mapping.push_back({{"from", from}, {"to", to ? ojson(*to) : ojson(nullptr)}});
  }
  j["mapping"] = std::move(mapping);
  ojson path = ojson::array();
  for (const auto& op : r.edit_path) {
    ojson o;
    o["op"] = to_string(op.kind);
    o["a"] = op.a;
    if (op.a_inserted) o["a_inserted"] = true;
    if (!op.b.empty()) o["b"] = op.b;
    if (op.b_inserted) o["b_inserted"] = true;
    if (op.kind == EditKind::kNodeRelabel || op.kind == EditKind::kEdgeRelabel) {
      o["from"] = op.from ? ojson(*op.from) : ojson(nullptr);
      o["to"] = op.to ? ojson(*op.to) : ojson(nullptr);
    } else if (op.kind == EditKind::kNodeInsert || op.kind == EditKind::kEdgeInsert) {
      o["label"] = op.to ? ojson(*op.to) : ojson(nullptr);
    } else {
      o["label"] = op.from ? ojson(*op.from) : ojson(nullptr);
    }
    o["cost"] = op.cost;
    path.push_back(std::move(o));
  }
  j["edit_path"] = std::move(path);
  if (!deterministic) {
    j["elapsed_ms"] = std::chrono::duration<double, std::milli>(r.elapsed).count();
  }
  return j;
}

ojson ranked_results_to_json(const std::vector<RankedResult>& results) {
  ojson arr = ojson::array();
  for (const auto& r : results) {
    ojson o;
    o["id"] = r.entry_id;
    o["score"] = r.score.score;
    o["nged"] = r.score.nged;
    o["stage"] = r.stage;
    o["exact"] = r.exact;
    arr.push_back(std::move(o));
  }
  return arr;
}

ojson eval_report_to_json(const EvalReport& r, bool deterministic) {
  ojson j;
  j["mode"] = r.mode;
  j["queries"] = r.queries;
  j["top_k"] = r.top_k;
  j["ap_literal"] = r.ap_literal;
  j["ap_normalized"] = r.ap_normalized;
  j["per_k_precision"] = r.per_k_precision;
  j["inexact_scores"] = r.inexact_scores;
  ojson stages = ojson::array();
  for (const auto& s : r.stages) {
    ojson o;
    o["name"] = s.name;
    o["candidates"] = s.candidates;
    o["expanded"] = s.expanded;
    o["inexact"] = s.inexact;
    if (!deterministic) o["scoring_seconds"] = s.scoring_seconds;
    stages.push_back(std::move(o));
  }
  j["stages"] = std::move(stages);
  if (!deterministic) {
    j["total_seconds"] = r.total_seconds;
    j["at_seconds"] = r.at_seconds;
    j["scoring_seconds"] = r.scoring_seconds;
  }
  return j;
}

namespace {

std::string cell(const ojson& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Human-readable rendering; JSON stays the stable format.
void print_table(const ojson& j, std::ostream& out) {
  if (j.is_array() && !j.empty() && j.front().is_object()) {
    std::vector<std::string> cols;
    for (const auto& [k, v] : j.front().items()) cols.push_back(k);
    std::vector<std::size_t> widths;
    for (const auto& c : cols) {
      std::size_t w = c.size();
      for (const auto& row : j) w = std::max(w, cell(row.value(c, ojson())).size());
      widths.push_back(w);
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << std::left << std::setw(static_cast<int>(widths[i]) + 2) << cols[i];
    }
    out << '\n';
    for (const auto& row : j) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        out << std::left << std::setw(static_cast<int>(widths[i]) + 2)
            << cell(row.value(cols[i], ojson()));
      }
      out << '\n';
    }
    return;
  }
  if (j.is_object()) {
    std::size_t w = 0;
    for (const auto& [k, v] : j.items()) w = std::max(w, k.size());
    for (const auto& [k, v] : j.items()) {
      out << std::left << std::setw(static_cast<int>(w) + 2) << k << cell(v) << '\n';
    }
    return;
  }
  out << j.dump() << '\n';
}

void emit(const ojson& j, const RunConfig& cfg, std::ostream& out) {
  if (cfg.format == OutputFormat::kJson) {
    out << j.dump(2) << '\n';
  } else {
    print_table(j, out);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("write failed: " + path);
}

QueryOptions query_options(const RunConfig& cfg) {
  QueryOptions q;
  q.limits.max_expanded_states = cfg.max_states;
  q.limits.beam_width = cfg.beam_width;
  q.limits.time_budget = std::chrono::milliseconds(cfg.time_budget_ms);
  q.threads = cfg.threads;
  return q;
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Circuit diagram retrieval engine", "circret"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  bool deterministic = false;
  bool verbose = false;
  std::map<std::string, std::string> overrides;
  auto override_opt = [&overrides](CLI::App* a, const std::string& flag, const std::string& key,
                                   const std::string& help) {
    return a->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };

  app.add_option("--config", config_path, "key = value config file (default: $CIRCRET_CONFIG)");
  override_opt(&app, "--format", "format", "json or table");
  override_opt(&app, "--threads", "threads", "scoring threads, 0 = all cores");
  app.add_flag("--deterministic", deterministic, "omit wall-clock fields from JSON");
  app.add_flag("--verbose", verbose, "echo the effective configuration to stderr");

  auto add_search = [&](CLI::App* a) {
    override_opt(a, "--max-states", "max_states", "A* expansion cap per comparison");
    override_opt(a, "--beam", "beam_width", "beam width, 0 = exact A*");
    override_opt(a, "--time-budget-ms", "time_budget_ms", "per-comparison budget, 0 = none");
  };

  // index
  std::string corpus_path, out_path;
  auto* index_cmd = app.add_subcommand("index", "build and persist a corpus index");
  index_cmd->add_option("--corpus", corpus_path, "corpus JSON Lines file")->required();
  index_cmd->add_option("--out", out_path, "index directory")->required();

  // query
  std::string index_dir, netlist_path, flat_class;
  auto* query_cmd = app.add_subcommand("query", "rank index entries against a netlist");
  query_cmd->add_option("--index", index_dir, "index directory")->required();
  query_cmd->add_option("--netlist", netlist_path, "query netlist")->required();
  override_opt(query_cmd, "--k1", "k1", "stage-1 shortlist size");
  override_opt(query_cmd, "--k2", "k2", "results returned");
  query_cmd->add_option("--flat", flat_class, "single-stage ranking on C1..C5");
  add_search(query_cmd);

  // eval
  std::string mode = "hierarchical";
  auto* eval_cmd = app.add_subcommand("eval", "leave-one-out evaluation of an index");
  eval_cmd->add_option("--index", index_dir, "index directory")->required();
  eval_cmd->add_option("--mode", mode, "hierarchical or flat:<class>");
  override_opt(eval_cmd, "--k1", "k1", "stage-1 shortlist size");
  override_opt(eval_cmd, "--k2", "k2", "results per query (top K)");
  add_search(eval_cmd);

  // ged
  std::string a_path, b_path, repr;
  auto* ged_cmd = app.add_subcommand("ged", "edit distance between two netlists");
  ged_cmd->add_option("--a", a_path, "first netlist")->required();
  ged_cmd->add_option("--b", b_path, "second netlist")->required();
  ged_cmd->add_option("--class", repr, "representation C1..C5")->required();
  add_search(ged_cmd);

  // recognize
  std::string image_path, detections_path;
  auto* rec_cmd = app.add_subcommand("recognize", "extract a netlist from a diagram image");
  rec_cmd->add_option("--image", image_path, "PNG diagram")->required();
  auto* det_opt = rec_cmd->add_option("--detections", detections_path, "detections JSON file");
  override_opt(rec_cmd, "--detector", "detector", "detector endpoint URL")->excludes(det_opt);
  rec_cmd->add_option("--out", out_path, "output netlist")->required();
  override_opt(rec_cmd, "--stage1-ratio", "stage1_ratio", "small-component ratio");
  override_opt(rec_cmd, "--stage1-reference", "stage1_reference", "image or largest");
  override_opt(rec_cmd, "--erase-margin", "erase_margin", "pixels kept at bbox edges");
  override_opt(rec_cmd, "--polarity", "polarity", "auto, light or dark");

  // render
  auto* render_cmd = app.add_subcommand("render", "emit a representation graph as DOT");
  render_cmd->add_option("--netlist", netlist_path, "netlist")->required();
  render_cmd->add_option("--class", repr, "representation C1..C5")->required();
  render_cmd->add_option("--out", out_path, "output file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig cfg;
  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') {
        config_path = env;
      }
    }
    if (!config_path.empty()) cfg = load_config(config_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
  try {
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    cfg.validate();
  } catch (const Error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (verbose) err << cfg.to_json().dump(2) << '\n';

  try {
    if (index_cmd->parsed()) {
      const CorpusIndex idx = build_index(load_corpus_jsonl(corpus_path), out_path);
      ojson j;
      j["entries"] = idx.manifest.entry_count;
      j["types"] = idx.manifest.type_counts;
      ojson stats;
      for (const auto& [name, s] : idx.manifest.stats) {
        stats[name] = {{"graphs", s.graphs}, {"mean_nodes", s.mean_nodes},
                       {"mean_edges", s.mean_edges}};
      }
      j["stats"] = std::move(stats);
      emit(j, cfg, out);
    } else if (query_cmd->parsed()) {
      const CorpusIndex idx = load_index(index_dir);
      const Circuit q = load_netlist(netlist_path);
      const QueryOptions qo = query_options(cfg);
      QueryOutcome res;
      if (!flat_class.empty()) {
        ReprClass k;
        try {
          k = parse_repr_class(flat_class);
        } catch (const Error& e) {
          throw UsageError(e.what());
        }
        res = retrieve_flat(q, idx, k, cfg.k2, qo);
      } else {
        res = retrieve_hierarchical(q, idx, cfg.k1, cfg.k2, qo);
      }
      emit(ranked_results_to_json(res.results), cfg, out);
    } else if (eval_cmd->parsed()) {
      const CorpusIndex idx = load_index(index_dir);
      EvalConfig ec;
      ec.k1 = cfg.k1;
      ec.top_k = cfg.k2;
      ec.query = query_options(cfg);
      if (mode == "hierarchical") {
        ec.mode = RetrievalMode::kHierarchical;
      } else if (mode.rfind("flat:", 0) == 0) {
        ec.mode = RetrievalMode::kFlat;
        try {
          ec.flat_class = parse_repr_class(mode.substr(5));
        } catch (const Error& e) {
          throw UsageError(e.what());
        }
      } else {
        throw UsageError("--mode must be hierarchical or flat:<class>");
      }
      emit(eval_report_to_json(evaluate(idx, ec), deterministic), cfg, out);
    } else if (ged_cmd->parsed()) {
      ReprClass k;
      try {
        k = parse_repr_class(repr);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      const LabeledGraph ga = build_representation(load_netlist(a_path), k);
      const LabeledGraph gb = build_representation(load_netlist(b_path), k);
      SearchLimits lim = query_options(cfg).limits;
      const GedResult r = ged_astar(ga, gb, CostModel{}, lim);
      emit(ged_result_to_json(r, normalized_similarity(ga, gb, r.cost), deterministic), cfg,
           out);
    } else if (rec_cmd->parsed()) {
      const RgbImage img = read_png(image_path);
      std::vector<Detection> dets;
      if (!detections_path.empty()) {
        dets = parse_detections(read_file(detections_path));
      } else if (cfg.detector) {
        dets = fetch_detections(*cfg.detector, encode_png(img));
      } else {
        throw UsageError("recognize needs --detections or a detector endpoint");
      }
      RecognitionParams params;
      params.stage1_ratio = cfg.stage1_ratio;
      params.stage1_reference = cfg.stage1_reference;
      params.erase_margin = cfg.erase_margin;
      params.polarity = cfg.polarity;
      const Circuit c = recognize(img, dets, params);
      write_file(out_path, serialize_netlist(c));
      const ValidationReport rep = validate_circuit(c);
      ojson j;
      j["devices"] = c.devices().size();
      j["nets"] = c.nets().size();
      j["warnings"] = rep.warnings;
      emit(j, cfg, out);
    } else if (render_cmd->parsed()) {
      ReprClass k;
      try {
        k = parse_repr_class(repr);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      const std::string dot = to_dot(build_representation(load_netlist(netlist_path), k));
      if (out_path.empty()) {
        out << dot;
      } else {
        write_file(out_path, dot);
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
  return kExitOk;
}

}  // namespace circret
