#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "circret/cli.hpp"
#include "circret/config.hpp"
#include "circret/errors.hpp"
#include "circret/graph.hpp"
#include "circret/json_io.hpp"
#include "support/corpus.hpp"
#include "support/draw.hpp"
#include "support/oracles.hpp"

using namespace circret;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path p = fs::temp_directory_path() / "circret-cli-test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string slurp(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string rc_path() { return (oracle::data_dir() / "rc_lp.json").string(); }

// Corpus file + built index for the two-type fixture.
std::string fixture_index() {
  static const std::string dir = [] {
    std::string lines;
    for (const auto& in : fixture::two_type_corpus()) {
      ojson j;
      j["id"] = in.entry_id;
      j["type"] = in.type_label;
      j["netlist"] = circuit_to_json(in.circuit);
      lines += j.dump() + "\n";
    }
    const std::string corpus = write("corpus.jsonl", lines);
    const std::string out = (scratch() / "index").string();
    const Run r = run({"index", "--corpus", corpus, "--out", out});
    REQUIRE(r.code == 0);
    return out;
  }();
  return dir;
}

}  // namespace

TEST_CASE("ged of a netlist with itself") {
  const Run r = run({"ged", "--a", rc_path(), "--b", rc_path(), "--class", "C1"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["cost"] == 0.0);
  CHECK(j["score"] == 1.0);
  CHECK(j["exact"] == true);
  CHECK(j["edit_path"].empty());
  CHECK(j.contains("elapsed_ms"));
  const Run d = run({"--deterministic", "ged", "--a", rc_path(), "--b", rc_path(), "--class", "C4"});
  CHECK_FALSE(nlohmann::json::parse(d.out).contains("elapsed_ms"));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"ged", "--a", rc_path(), "--b", rc_path()}).code == 2);
  CHECK(run({"ged", "--a", rc_path(), "--b", rc_path(), "--class", "C1", "--bogus"}).code == 2);
  CHECK(run({"ged", "--a", rc_path(), "--b", rc_path(), "--class", "C9"}).code == 2);
  CHECK(run({"--format", "xml", "render", "--netlist", rc_path(), "--class", "C1"}).code == 2);
  CHECK(run({"query", "--index", fixture_index(), "--netlist", rc_path(), "--k1", "2", "--k2", "3"})
            .code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("domain errors exit with 1") {
  const Run missing = run({"ged", "--a", "/nonexistent.json", "--b", rc_path(), "--class", "C1"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("error:") != std::string::npos);
  const Run c5 = run({"render", "--netlist", rc_path(), "--class", "C5"});
  CHECK(c5.code == 1);
  const std::string bad = write("bad.json", R"({"id":"x","devices":[{"id":"R","category":"Resistor","pins":[]}]})");
  CHECK(run({"render", "--netlist", bad, "--class", "C1"}).code == 1);
}

TEST_CASE("render emits DOT") {
  const Run r = run({"render", "--netlist", rc_path(), "--class", "C1"});
  CHECK(r.code == 0);
  CHECK(r.out == to_dot(build_representation(load_netlist(rc_path()), ReprClass::kC1)));
  const std::string out = (scratch() / "rc.dot").string();
  CHECK(run({"render", "--netlist", rc_path(), "--class", "C3", "--out", out}).code == 0);
  CHECK(slurp(out) == to_dot(build_representation(load_netlist(rc_path()), ReprClass::kC3)));
}

TEST_CASE("query: unbounded shortlist equals flat C4 byte for byte") {
  const std::string q = write("q.json", serialize_netlist(fixture::compact("q", "Res1:a,b;Cap2:b,c")));
  const Run h = run({"query", "--index", fixture_index(), "--netlist", q, "--k1", "10", "--k2", "5"});
  const Run f = run({"query", "--index", fixture_index(), "--netlist", q, "--flat", "C4", "--k2", "5"});
  REQUIRE(h.code == 0);
  CHECK(h.out == f.out);
  const auto j = nlohmann::json::parse(h.out);
  REQUIRE(j.size() == 5);
  for (const auto& r : j) {
    CHECK(r.size() == 5);
    CHECK(r.contains("id"));
    CHECK(r.contains("nged"));
    CHECK(r["stage"] == 2);
  }
  const Run t = run({"--format", "table", "query", "--index", fixture_index(), "--netlist", q});
  CHECK(t.code == 0);
  CHECK(t.out.rfind("id", 0) == 0);
}

TEST_CASE("eval reports the oracle precision") {
  const auto in = fixture::two_type_corpus();
  double ap = 0;
  for (const auto& e : in) {
    std::vector<std::pair<std::string, LabeledGraph>> cands;
    for (const auto& x : in) {
      if (x.entry_id != e.entry_id) {
        cands.emplace_back(x.entry_id, build_representation(x.circuit, ReprClass::kC4));
      }
    }
    const auto rank = oracle::rank_bruteforce(build_representation(e.circuit, ReprClass::kC4), cands);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < 5; ++k) {
      for (const auto& x : in) {
        hits += x.entry_id == rank[k].id && x.type_label == e.type_label;
      }
      ap += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  ap /= 10.0 * 5.0;
  const Run r = run({"eval", "--index", fixture_index()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["ap_normalized"].get<double>() == doctest::Approx(ap).epsilon(1e-12));
  CHECK(j["ap_literal"].get<double>() == doctest::Approx(5 * ap).epsilon(1e-12));
  CHECK(j.contains("at_seconds"));
  const Run flat = run({"eval", "--index", fixture_index(), "--mode", "flat:C1"});
  CHECK(flat.code == 0);
  CHECK(nlohmann::json::parse(flat.out)["mode"] == "flat:C1");
  CHECK(run({"eval", "--index", fixture_index(), "--mode", "sideways"}).code == 2);
}

TEST_CASE("deterministic outputs across runs and thread counts") {
  const Run a = run({"--deterministic", "eval", "--index", fixture_index()});
  const Run b = run({"--deterministic", "--threads", "4", "eval", "--index", fixture_index()});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("seconds") == std::string::npos);
}

TEST_CASE("config file, environment variable and flag precedence") {
  const std::string q = write("q2.json", serialize_netlist(fixture::compact("q", "Mos:g,d,s;AGND:s")));
  const std::string cfg = write("run.conf", "# tuned\nk1 = 8\nk2 = 3\nformat = json\n");
  Run r = run({"--config", cfg, "query", "--index", fixture_index(), "--netlist", q});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).size() == 3);
  r = run({"--config", cfg, "query", "--index", fixture_index(), "--netlist", q, "--k2", "2"});
  CHECK(nlohmann::json::parse(r.out).size() == 2);

  ::setenv(kConfigEnvVar, cfg.c_str(), 1);
  r = run({"--verbose", "query", "--index", fixture_index(), "--netlist", q});
  ::unsetenv(kConfigEnvVar);
  CHECK(nlohmann::json::parse(r.out).size() == 3);
  const auto echoed = nlohmann::json::parse(r.err);
  CHECK(echoed["k1"] == 8);
  CHECK(echoed["k2"] == 3);

  const std::string bad = write("bad.conf", "k3 = 1\n");
  CHECK(run({"--config", bad, "render", "--netlist", rc_path(), "--class", "C1"}).code == 1);
  CHECK(run({"--config", "/nonexistent.conf", "render", "--netlist", rc_path(), "--class", "C1"})
            .code == 1);
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "k1=30\n k2 = 4 # trailing\nstage1_ratio = 0.05\npolarity = dark\n"
      "stage1_reference = largest\ndetector = http://127.0.0.1:9/d\nbeam_width=16\n");
  CHECK(c.k1 == 30);
  CHECK(c.k2 == 4);
  CHECK(c.stage1_ratio == 0.05);
  CHECK(c.polarity == PolarityMode::kDark);
  CHECK(c.stage1_reference == SizeReference::kLargestComponent);
  CHECK(c.detector == "http://127.0.0.1:9/d");
  CHECK(c.beam_width == 16);
  CHECK_THROWS_AS(parse_config("k1 = 2\nk2 = 3\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("stage1_ratio = 1.5\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("k1 = -3\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("just words\n"), ParseError);
}

TEST_CASE("recognize writes a netlist") {
  const auto d = draw::rc_lp_drawing();
  const std::string png = (scratch() / "rc.png").string();
  write_png(png, d.image);
  const std::string dets = write("rc.detections.json", serialize_detections(d.detections));
  const std::string out = (scratch() / "rc.recognized.json").string();
  const Run r = run({"recognize", "--image", png, "--detections", dets, "--out", out});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["devices"] == 4);
  CHECK(j["nets"] == 3);
  const Circuit c = load_netlist(out);
  CHECK(c.devices().size() == 4);
  CHECK(run({"recognize", "--image", png, "--out", out}).code == 2);
  CHECK(run({"recognize", "--image", png, "--detections", dets, "--out", out, "--stage1-ratio",
             "2"})
            .code == 2);
}
