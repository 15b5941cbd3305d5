#pragma once

#include "circret/graph.hpp"

namespace fixture {

// Worked GED example: q and g share node labels and differ in edges.
inline circret::LabeledGraph worked_q() {
  circret::LabeledGraph q;
  q.add_node("v1", "A");
  q.add_node("v2", "B");
  q.add_node("v3", "A");
  q.add_node("v4", "B");
  q.add_edge("v1", "v2", std::string("b"));
  q.add_edge("v1", "v3", std::string("a"));
  q.add_edge("v2", "v3", std::string("a"));
  q.add_edge("v3", "v4", std::string("b"));
  return q;
}

inline circret::LabeledGraph worked_g() {
  circret::LabeledGraph g;
  g.add_node("v1", "A");
  g.add_node("v2", "B");
  g.add_node("v3", "A");
  g.add_node("v4", "B");
  g.add_edge("v1", "v2", std::string("a"));
  g.add_edge("v2", "v3", std::string("a"));
  g.add_edge("v3", "v4", std::string("b"));
  g.add_edge("v2", "v4", std::string("b"));
  return g;
}

}  // namespace fixture
