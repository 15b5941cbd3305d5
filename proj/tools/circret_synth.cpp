// Fixture generator: rendered schematics and synthetic retrieval corpora.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "circret/circuit.hpp"
#include "circret/json_io.hpp"
#include "circret/recognition.hpp"
#include "circret/synth.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Synthetic fixture generator", "circret-synth"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out;
  bool dark = false;
  int count = 1;
  auto* schem = app.add_subcommand("schematic", "render PNG + detections + truth netlist");
  schem->add_option("--seed", seed, "first seed");
  schem->add_option("--count", count, "number of schematics");
  schem->add_option("--out", out, "output directory")->required();
  schem->add_flag("--dark", dark, "dark background");

  circret::synth::CorpusOptions copt;
  auto* corpus = app.add_subcommand("corpus", "write a family/variant corpus as JSON Lines");
  corpus->add_option("--seed", seed, "generator seed");
  corpus->add_option("--families", copt.families, "type families");
  corpus->add_option("--variants", copt.variants_per_family, "variants per family");
  corpus->add_option("--out", out, "output .jsonl file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (schem->parsed()) {
      fs::create_directories(out);
      circret::synth::SchematicOptions sopt;
      sopt.dark_background = dark;
      for (int i = 0; i < count; ++i) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        const auto sc = circret::synth::render_schematic(s, sopt);
        const std::string stem = (fs::path(out) / ("schematic-" + std::to_string(s))).string();
        circret::write_png(stem + ".png", sc.image);
        std::ofstream(stem + ".detections.json") << circret::serialize_detections(sc.detections);
        std::ofstream(stem + ".truth.json") << circret::serialize_netlist(sc.truth);
      }
    } else {
      std::ofstream f(out);
      for (const auto& in : circret::synth::generate_corpus(seed, copt)) {
        circret::ojson line;
        line["id"] = in.entry_id;
        line["type"] = in.type_label;
        line["netlist"] = circret::circuit_to_json(in.circuit);
        f << line.dump() << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
