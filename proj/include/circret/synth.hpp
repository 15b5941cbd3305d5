#pragma once

#include <cstdint>
#include <vector>

#include "circret/circuit.hpp"
#include "circret/image.hpp"
#include "circret/recognition.hpp"
#include "circret/retrieval.hpp"

namespace circret::synth {

struct SchematicOptions {
  int min_components = 3;
  int max_components = 8;
  bool dark_background = false;
  bool text_noise = true;  // small glyph clusters that stage 1 should remove
  int stroke = 4;          // wire thickness in pixels
};

// A rendered schematic together with the detections and netlist it was
// drawn from. Device ids follow the recognizer's naming scheme.
struct Schematic {
  RgbImage image;
  std::vector<Detection> detections;
  Circuit truth;
};

// Ladder layout: horizontal rails are nets, two-terminal parts sit between
// adjacent rails, transistors take their gate from a series resistor, and
// grounds hang below the last rail. No two nets cross.
Schematic render_schematic(std::uint64_t seed, const SchematicOptions& opt = {});

struct CorpusOptions {
  int families = 10;
  int variants_per_family = 10;
  int min_devices = 4;
  int max_devices = 14;
  int min_c4_nodes = 8;
  int max_c4_nodes = 24;
};

// Random base circuit per family, each variant one or two edits away from
// its base. Type labels are "family-<k>".
std::vector<CorpusInput> generate_corpus(std::uint64_t seed,
                                         const CorpusOptions& opt = {});

// Connected random circuit with every net spanning at least two pins.
Circuit random_circuit(std::uint64_t seed, int devices, const std::string& id);

}  // namespace circret::synth
