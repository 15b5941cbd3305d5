"""Circuit diagram retrieval: netlists to labeled graphs, GED similarity,
two-stage retrieval and schematic topology recognition."""

import json

from . import _core
from ._core import (
    ArityOverflowError,
    DegenerateInputError,
    Error,
    IoError,
    NotApplicableError,
    ParseError,
    SizeGuardError,
    TransportError,
    UnknownCategoryError,
    ValidationError,
)

__all__ = [
    "canonical_netlist", "validate_netlist", "graph", "to_dot", "ged", "ged_graphs",
    "ged_bruteforce", "similarity", "build_index", "query", "evaluate", "recognize",
    "run_cli", "Error", "ValidationError", "UnknownCategoryError", "ParseError",
    "NotApplicableError", "SizeGuardError", "DegenerateInputError", "ArityOverflowError",
    "IoError", "TransportError",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def canonical_netlist(netlist):
    return json.loads(_core.canonical_netlist(_text(netlist)))


def validate_netlist(netlist):
    errors, warnings = _core.validate_netlist(_text(netlist))
    return {"errors": errors, "warnings": warnings}


def graph(netlist, cls):
    return json.loads(_core.graph(_text(netlist), cls))


def to_dot(netlist, cls):
    return _core.to_dot(_text(netlist), cls)


def ged(a, b, cls, max_states=250000, beam_width=0):
    return json.loads(_core.ged_netlists(_text(a), _text(b), cls, max_states, beam_width))


def ged_graphs(a, b, max_states=250000, beam_width=0):
    return json.loads(_core.ged_graphs(_text(a), _text(b), max_states, beam_width))


def ged_bruteforce(a, b):
    return _core.ged_bruteforce(_text(a), _text(b))


def similarity(nodes1, nodes2, ged_cost):
    nged, score = _core.similarity(nodes1, nodes2, ged_cost)
    return {"nged": nged, "score": score}


def build_index(corpus, out):
    return _core.build_index(str(corpus), str(out))


def query(index, netlist, k1=20, k2=5, flat=None, threads=1, beam_width=0):
    return json.loads(_core.query(str(index), _text(netlist), k1, k2, flat or "", threads,
                                  beam_width))


def evaluate(index, flat=None, k1=20, top_k=5, beam_width=0, deterministic=False):
    return json.loads(_core.evaluate(str(index), flat or "", k1, top_k, beam_width,
                                     deterministic))


def recognize(image, detections, stage1_ratio=0.10, erase_margin=2):
    return json.loads(_core.recognize(str(image), _text(detections), stage1_ratio,
                                      erase_margin))


def run_cli(args):
    return _core.run_cli([str(a) for a in args])
