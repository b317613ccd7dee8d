"""JSON file formats for structures, distributions, supports and certificates.

Probabilities are written as ``"n/d"`` strings so nothing is lost to binary
floating point. Every reader rejects unknown fields.
"""
from __future__ import annotations

import json
from pathlib import Path

from .errors import InvalidDistribution, InvalidStructure
from .possibilistic import Certificate
from .prob import Distribution, Support, format_fraction, parse_probability
from .structure import CausalStructure
from .worlds import FunctionTable


class FormatError(InvalidStructure):
    """A file does not follow its documented layout."""


def _require(obj, allowed: set[str], required: set[str], what: str):
    if not isinstance(obj, dict):
        raise FormatError(f"{what} must be a JSON object")
    extra = set(obj) - allowed
    if extra:
        raise FormatError(f"unknown fields in {what}: {sorted(extra)}")
    missing = required - set(obj)
    if missing:
        raise FormatError(f"missing fields in {what}: {sorted(missing)}")


def _int(x, what):
    if not isinstance(x, int) or isinstance(x, bool):
        raise FormatError(f"{what} must be an integer, got {x!r}")
    return x


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def load_json(path) -> object:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# structures

def structure_from_json(doc) -> CausalStructure:
    _require(doc, {"visible", "latent", "edges"}, {"visible", "edges"}, "structure")
    visible = []
    for item in doc["visible"]:
        _require(item, {"name", "cardinality"}, {"name", "cardinality"}, "visible vertex")
        visible.append((str(item["name"]), _int(item["cardinality"], "visible cardinality")))
    latent = {}
    for item in doc.get("latent", []):
        _require(item, {"name", "cardinality"}, {"name"}, "latent vertex")
        k = item.get("cardinality")
        latent[str(item["name"])] = None if k is None else _int(k, "latent cardinality")
    edges = []
    for e in doc["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise FormatError(f"edge must be a [from, to] pair, got {e!r}")
        edges.append((str(e[0]), str(e[1])))
    return CausalStructure.build(visible, latent, edges)


def structure_to_json(g: CausalStructure) -> dict:
    latent = []
    for l in g.latent:
        k = g.card(l)
        latent.append({"name": l} if k is None else {"name": l, "cardinality": k})
    return {
        "visible": [{"name": v, "cardinality": g.card(v)} for v in g.visible],
        "latent": latent,
        "edges": [list(e) for e in g.graph.named_edges()],
    }


def read_structure(path) -> CausalStructure:
    return structure_from_json(load_json(path))


# distributions and supports

def _header(doc, what):
    variables = doc["variables"]
    cards = [_int(k, "cardinality") for k in doc["cardinalities"]]
    if not isinstance(variables, list) or len(variables) != len(cards):
        raise FormatError(f"{what}: variables and cardinalities must be lists of equal length")
    return [str(v) for v in variables], cards


def _outcomes(doc, cards, with_p: bool):
    seen = set()
    out = []
    for ev in doc["events"]:
        fields = {"outcome", "p"} if with_p else {"outcome"}
        _require(ev, fields | {"p"}, fields, "event")
        outcome = tuple(_int(x, "outcome index") for x in ev["outcome"])
        if outcome in seen:
            raise InvalidDistribution(f"duplicate outcome {list(outcome)}")
        seen.add(outcome)
        out.append((outcome, ev.get("p")))
    return out


def is_distribution_doc(doc) -> bool:
    return isinstance(doc, dict) and any("p" in ev for ev in doc.get("events", []) if isinstance(ev, dict))


def distribution_from_json(doc) -> Distribution:
    _require(doc, {"variables", "cardinalities", "events"}, {"variables", "cardinalities", "events"},
             "distribution")
    variables, cards = _header(doc, "distribution")
    probs = {}
    for outcome, p in _outcomes(doc, cards, True):
        if not isinstance(p, (str, int)) or isinstance(p, bool):
            raise InvalidDistribution(f"probability must be a string like \"1/3\", got {p!r}")
        probs[outcome] = parse_probability(p)
    return Distribution(variables, cards, probs)


def support_from_json(doc) -> Support:
    """Read a support; a distribution document is accepted and reduced to its support."""
    if is_distribution_doc(doc):
        d = distribution_from_json(doc)
        return Support(d.variables, d.cards, d.outcomes())
    _require(doc, {"variables", "cardinalities", "events"}, {"variables", "cardinalities", "events"},
             "support")
    variables, cards = _header(doc, "support")
    return Support(variables, cards, [o for o, _ in _outcomes(doc, cards, False)])


def distribution_to_json(p: Distribution) -> dict:
    return {
        "variables": list(p.variables),
        "cardinalities": list(p.cards),
        "events": [{"outcome": list(x), "p": format_fraction(w)} for x, w in p.items()],
    }


def support_to_json(s: Support) -> dict:
    return {
        "variables": list(s.variables),
        "cardinalities": list(s.cards),
        "events": [{"outcome": list(e)} for e in s.events],
    }


# certificates

def certificate_to_json(cert: Certificate) -> dict:
    g = cert.structure
    tables = []
    for v in g.visible_topo:
        rows = cert.table.rows(v)
        tables.append({
            "variable": v,
            "entries": [{"key": list(k), "value": rows[k]} for k in sorted(rows)],
        })
    return {
        "latent_cardinalities": [{"name": l, "cardinality": cert.latent_cards[l]} for l in g.latent],
        "tables": tables,
        "events": [list(e) for e in cert.events],
    }


def certificate_from_json(doc, structure: CausalStructure) -> Certificate:
    """Attach a certificate file to the (already normalized) structure it was made for."""
    _require(doc, {"latent_cardinalities", "tables", "events"}, {"latent_cardinalities", "tables"},
             "certificate")
    cards = {}
    for item in doc["latent_cardinalities"]:
        _require(item, {"name", "cardinality"}, {"name", "cardinality"}, "latent cardinality")
        cards[str(item["name"])] = _int(item["cardinality"], "latent cardinality")
    if set(cards) != set(structure.latent):
        raise FormatError(
            f"certificate latents {sorted(cards)} do not match structure latents {sorted(structure.latent)}"
        )
    table = FunctionTable()
    for block in doc["tables"]:
        _require(block, {"variable", "entries"}, {"variable", "entries"}, "table")
        v = str(block["variable"])
        if v not in structure.visible:
            raise FormatError(f"table for unknown visible {v!r}")
        width = len(structure.ordered_vpa(v)) + len(structure.ordered_lpa(v))
        for entry in block["entries"]:
            _require(entry, {"key", "value"}, {"key", "value"}, "table entry")
            key = tuple(_int(x, "key component") for x in entry["key"])
            value = _int(entry["value"], "table value")
            if len(key) != width:
                raise FormatError(f"key {list(key)} for {v!r} should have {width} components")
            if not 0 <= value < structure.card(v):
                raise FormatError(f"value {value} out of range for {v!r}")
            table.set(v, key, value)
    events = tuple(tuple(_int(x, "event index") for x in e) for e in doc.get("events", []))
    return Certificate(structure, {l: cards[l] for l in structure.latent}, table, events)


def write_text(path, text: str):
    Path(path).write_text(text, encoding="utf-8")
