#pragma once

#include "json.hpp"

#include "circret/circuit.hpp"
#include "circret/graph.hpp"

namespace circret {

using ojson = nlohmann::ordered_json;

// Structural decoding only; callers validate.
Circuit circuit_from_json(const nlohmann::json& doc);
ojson circuit_to_json(const Circuit& c);

LabeledGraph graph_from_json(const nlohmann::json& doc);
ojson graph_to_json(const LabeledGraph& g);

}  // namespace circret
