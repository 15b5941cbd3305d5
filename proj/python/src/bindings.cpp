// JSON-in/JSON-out surface; the Python package decodes the documents.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "circret/circuit.hpp"
#include "circret/cli.hpp"
#include "circret/errors.hpp"
#include "circret/ged.hpp"
#include "circret/graph.hpp"
#include "circret/image.hpp"
#include "circret/json_io.hpp"
#include "circret/recognition.hpp"
#include "circret/retrieval.hpp"

namespace py = pybind11;
using namespace circret;

namespace {

SearchLimits limits(std::size_t max_states, std::size_t beam_width) {
  SearchLimits lim;
  lim.max_expanded_states = max_states;
  lim.beam_width = beam_width;
  return lim;
}

std::string ged_json(const LabeledGraph& a, const LabeledGraph& b, std::size_t max_states,
                     std::size_t beam_width) {
  GedResult r;
  {
    py::gil_scoped_release release;
    r = ged_astar(a, b, CostModel{}, limits(max_states, beam_width));
  }
  return ged_result_to_json(r, normalized_similarity(a, b, r.cost), false).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Circuit diagram retrieval engine";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<UnknownCategoryError>(m, "UnknownCategoryError", validation.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<NotApplicableError>(m, "NotApplicableError", base.ptr());
  py::register_exception<SizeGuardError>(m, "SizeGuardError", base.ptr());
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", base.ptr());
  py::register_exception<ArityOverflowError>(m, "ArityOverflowError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<TransportError>(m, "TransportError", base.ptr());

  m.def("canonical_netlist", [](const std::string& text) {
    return serialize_netlist(parse_netlist(text));
  }, py::arg("netlist"), "Parse, validate and re-serialize a netlist document.");

  m.def("validate_netlist", [](const std::string& text) {
    const auto rep = validate_circuit(circuit_from_json(nlohmann::json::parse(text)));
    return std::make_pair(rep.errors, rep.warnings);
  }, py::arg("netlist"));

  m.def("graph", [](const std::string& text, const std::string& cls) {
    return graph_to_json(build_representation(parse_netlist(text), parse_repr_class(cls))).dump();
  }, py::arg("netlist"), py::arg("cls"));

  m.def("to_dot", [](const std::string& text, const std::string& cls) {
    return to_dot(build_representation(parse_netlist(text), parse_repr_class(cls)));
  }, py::arg("netlist"), py::arg("cls"));

  m.def("ged_netlists", [](const std::string& a, const std::string& b, const std::string& cls,
                           std::size_t max_states, std::size_t beam_width) {
    const ReprClass k = parse_repr_class(cls);
    return ged_json(build_representation(parse_netlist(a), k),
                    build_representation(parse_netlist(b), k), max_states, beam_width);
  }, py::arg("a"), py::arg("b"), py::arg("cls"), py::arg("max_states") = 250000,
        py::arg("beam_width") = 0);

  m.def("ged_graphs", [](const std::string& a, const std::string& b, std::size_t max_states,
                         std::size_t beam_width) {
    return ged_json(graph_from_json(nlohmann::json::parse(a)),
                    graph_from_json(nlohmann::json::parse(b)), max_states, beam_width);
  }, py::arg("a"), py::arg("b"), py::arg("max_states") = 250000, py::arg("beam_width") = 0);

  m.def("ged_bruteforce", [](const std::string& a, const std::string& b) {
    return ged_bruteforce(graph_from_json(nlohmann::json::parse(a)),
                          graph_from_json(nlohmann::json::parse(b)));
  }, py::arg("a"), py::arg("b"));

  m.def("similarity", [](std::size_t n1, std::size_t n2, double ged) {
    const auto s = normalized_similarity(n1, n2, ged);
    return std::make_pair(s.nged, s.score);
  }, py::arg("nodes1"), py::arg("nodes2"), py::arg("ged"));

  m.def("build_index", [](const std::string& corpus_path, const std::string& out_dir) {
    const CorpusIndex idx = build_index(load_corpus_jsonl(corpus_path), out_dir);
    return idx.manifest.entry_count;
  }, py::arg("corpus"), py::arg("out"));

  m.def("query", [](const std::string& index_dir, const std::string& netlist, std::size_t k1,
                    std::size_t k2, const std::string& flat, std::size_t threads,
                    std::size_t beam_width) {
    const CorpusIndex idx = load_index(index_dir);
    const Circuit q = parse_netlist(netlist);
    QueryOptions opt;
    opt.threads = threads;
    opt.limits.beam_width = beam_width;
    py::gil_scoped_release release;
    const QueryOutcome o = flat.empty()
                               ? retrieve_hierarchical(q, idx, k1, k2, opt)
                               : retrieve_flat(q, idx, parse_repr_class(flat), k2, opt);
    return ranked_results_to_json(o.results).dump();
  }, py::arg("index"), py::arg("netlist"), py::arg("k1") = 20, py::arg("k2") = 5,
        py::arg("flat") = "", py::arg("threads") = 1, py::arg("beam_width") = 0);

  m.def("evaluate", [](const std::string& index_dir, const std::string& flat, std::size_t k1,
                       std::size_t top_k, std::size_t beam_width, bool deterministic) {
    const CorpusIndex idx = load_index(index_dir);
    EvalConfig cfg;
    cfg.k1 = k1;
    cfg.top_k = top_k;
    cfg.query.limits.beam_width = beam_width;
    if (!flat.empty()) {
      cfg.mode = RetrievalMode::kFlat;
      cfg.flat_class = parse_repr_class(flat);
    }
    py::gil_scoped_release release;
    return eval_report_to_json(evaluate(idx, cfg), deterministic).dump();
  }, py::arg("index"), py::arg("flat") = "", py::arg("k1") = 20, py::arg("top_k") = 5,
        py::arg("beam_width") = 0, py::arg("deterministic") = false);

  m.def("recognize", [](const std::string& png_path, const std::string& detections,
                        double stage1_ratio, int erase_margin) {
    RecognitionParams p;
    p.stage1_ratio = stage1_ratio;
    p.erase_margin = erase_margin;
    return serialize_netlist(recognize(read_png(png_path), parse_detections(detections), p));
  }, py::arg("image"), py::arg("detections"), py::arg("stage1_ratio") = 0.10,
        py::arg("erase_margin") = kDefaultEraseMargin);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Run one command line; returns (exit_code, stdout, stderr).");
}
