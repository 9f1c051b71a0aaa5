"""JSON documents for every artifact, and DOT drawings.

Each document is one JSON object with ``kind`` and ``version``.  Maps
become lists of entries because states may be tuples; a tuple is written
as a JSON list and a barred state tag as ``{"bar": x}``.  Probabilities
are ``"num/den"`` strings.  Printing is deterministic: the same object
always gives the same bytes.
"""
from fractions import Fraction
import json

import jsonschema

from .core import (DPW, CompSynthError, Component, Composer, ExitControlRelation, Lasso,
                   Library)
from .composition import ComposedTransducer
from .gadget import ProbabilisticAutomaton
from .games import StochasticGame
from .pos import Barred, ObservedGame

VERSION = 1


class FormatError(CompSynthError):
    """Unreadable document; ``where`` is ``(line, column)`` or a field path."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


# ---------------------------------------------------------------------------
# values

def enc(v):
    if isinstance(v, Barred):
        return {"bar": enc(v.x)}
    if isinstance(v, tuple):
        return [enc(x) for x in v]
    if isinstance(v, Fraction):
        return "%d/%d" % (v.numerator, v.denominator)
    return v


def dec(v):
    if isinstance(v, list):
        return tuple(dec(x) for x in v)
    if isinstance(v, dict):
        return Barred(dec(v["bar"]))
    return v


def rat(x):
    return "%d/%d" % (Fraction(x).numerator, Fraction(x).denominator)


def parse_rat(s):
    return Fraction(s)


def _dist(d):
    return [[enc(t), rat(p)] for t, p in d.items()]


def _undist(items):
    return {dec(t): parse_rat(p) for t, p in items}


# ---------------------------------------------------------------------------
# schemas

_VALUE = {}
_RAT = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
_DIST = {"type": "array", "items": {"type": "array", "items": [_VALUE, _RAT],
                                      "minItems": 2, "maxItems": 2}}
_PAIRS = {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}}
_TRIPLES = {"type": "array", "items": {"type": "array", "minItems": 3, "maxItems": 3}}
_LIST = {"type": "array"}
_NAT = {"type": "integer", "minimum": 0}


def _doc(kind, props, required):
    props = dict(props, kind={"const": kind}, version={"const": VERSION})
    return {"type": "object", "properties": props,
            "required": ["kind", "version"] + required, "additionalProperties": False}


_COMPONENT = {
    "type": "object",
    "properties": {
        "name": {"type": "string"}, "states": _LIST, "initial": _VALUE,
        "exits": _PAIRS, "labels": _PAIRS,
        "delta": {"type": "array", "items": {
            "type": "object", "properties": {"state": _VALUE, "input": _VALUE, "to": _DIST},
            "required": ["state", "input", "to"], "additionalProperties": False}},
    },
    "required": ["states", "initial", "exits", "labels", "delta"],
    "additionalProperties": False,
}

_GAME_STATE = {
    "type": "object",
    "properties": {
        "id": _VALUE, "owner": {"enum": [1, 2]}, "priority": {"type": "integer"},
        "obs": _VALUE,
        "actions": {"type": "array", "items": {
            "type": "object", "properties": {"action": _VALUE, "to": _DIST},
            "required": ["action", "to"], "additionalProperties": False}},
    },
    "required": ["id", "owner", "priority", "actions"],
    "additionalProperties": False,
}

SCHEMAS = {
    "library": _doc("library", {"inputs": _LIST, "outputs": _LIST, "directions": _LIST,
                                "components": {"type": "array", "items": _COMPONENT,
                                               "minItems": 1}},
                    ["inputs", "outputs", "directions", "components"]),
    "index": _doc("index", {"priorities": {"type": "array", "items": {
        "type": "array", "items": [_NAT, _VALUE, _NAT], "minItems": 3, "maxItems": 3}}},
        ["priorities"]),
    "relation": _doc("relation", {"pairs": _PAIRS}, ["pairs"]),
    "composer": _doc("composer", {"states": _LIST, "initial": _VALUE, "typing": _PAIRS,
                                  "transfer": _TRIPLES},
                     ["states", "initial", "typing", "transfer"]),
    "dpw": _doc("dpw", {"alphabet": _LIST, "states": _LIST, "initial": _VALUE,
                        "delta": _TRIPLES, "priority": _PAIRS},
                ["alphabet", "states", "initial", "delta", "priority"]),
    "game": _doc("game", {"states": {"type": "array", "items": _GAME_STATE}}, ["states"]),
    "observed-game": _doc("observed-game", {"states": {"type": "array", "items": _GAME_STATE},
                                            "initial": _VALUE}, ["states", "initial"]),
    "automaton": _doc("automaton", {
        "alphabet": _LIST, "states": _LIST, "initial": _VALUE, "priority": _PAIRS,
        "delta": {"type": "array", "items": {
            "type": "object", "properties": {"state": _VALUE, "letter": _VALUE, "to": _DIST},
            "required": ["state", "letter", "to"], "additionalProperties": False}}},
        ["alphabet", "states", "initial", "priority", "delta"]),
    "lasso": _doc("lasso", {"prefix": _LIST, "cycle": {"type": "array", "minItems": 1}},
                  ["prefix", "cycle"]),
}


# ---------------------------------------------------------------------------
# objects -> documents

def _library_doc(lib):
    comps = []
    for c in lib.components:
        delta = [{"state": enc(q), "input": enc(a), "to": _dist(d)} for (q, a), d in c.delta.items()]
        comps.append({"name": c.name, "states": [enc(q) for q in c.states],
                      "initial": enc(c.initial),
                      "exits": [[enc(d), enc(q)] for d, q in c.exits.items()],
                      "labels": [[enc(q), enc(c.labels[q])] for q in c.states],
                      "delta": delta})
    return {"inputs": [enc(a) for a in lib.inputs], "outputs": [enc(x) for x in lib.outputs],
            "directions": [enc(d) for d in lib.directions], "components": comps}


def _game_states(g, obs=None):
    out = []
    for s in g.owner:
        item = {"id": enc(s), "owner": g.owner[s], "priority": g.priority[s],
                "actions": [{"action": enc(a), "to": _dist(d)} for a, d in g.actions[s].items()]}
        if obs is not None:
            item["obs"] = enc(obs[s])
        out.append(item)
    return out


def to_document(obj):
    """The JSON-ready dict for a supported object."""
    if isinstance(obj, Library):
        kind, body = "library", _library_doc(obj)
    elif isinstance(obj, Composer):
        kind, body = "composer", {
            "states": [enc(m) for m in obj.states], "initial": enc(obj.initial),
            "typing": [[enc(m), obj.typing[m]] for m in obj.states],
            "transfer": [[enc(m), enc(d), enc(n)] for (m, d), n in obj.transfer.items()]}
    elif isinstance(obj, DPW):
        kind, body = "dpw", {
            "alphabet": [enc(x) for x in obj.alphabet], "states": [enc(p) for p in obj.states],
            "initial": enc(obj.initial),
            "delta": [[enc(p), enc(x), enc(t)] for (p, x), t in obj.delta.items()],
            "priority": [[enc(p), obj.priority[p]] for p in obj.states]}
    elif isinstance(obj, ExitControlRelation):
        kind, body = "relation", {"pairs": sorted(([enc(d), j] for d, j in obj.pairs), key=json.dumps)}
    elif isinstance(obj, ObservedGame):
        kind, body = "observed-game", {"states": _game_states(obj.game, obj.obs),
                                       "initial": enc(obj.initial)}
    elif isinstance(obj, StochasticGame):
        kind, body = "game", {"states": _game_states(obj)}
    elif isinstance(obj, ProbabilisticAutomaton):
        kind, body = "automaton", {
            "alphabet": [enc(x) for x in obj.alphabet], "states": [enc(q) for q in obj.states],
            "initial": enc(obj.initial),
            "priority": [[enc(q), obj.priority[q]] for q in obj.states],
            "delta": [{"state": enc(q), "letter": enc(x), "to": _dist(d)}
                      for (q, x), d in obj.delta.items()]}
    elif isinstance(obj, Lasso):
        kind, body = "lasso", {"prefix": [enc(x) for x in obj.prefix],
                               "cycle": [enc(x) for x in obj.cycle]}
    else:
        raise TypeError("no document format for %s" % type(obj).__name__)
    return dict(body, kind=kind, version=VERSION)


def index_document(index):
    """Document for a library index function keyed by ``(component, state)``."""
    rows = [[i, enc(q), p] for (i, q), p in index.items()]
    return {"kind": "index", "version": VERSION, "priorities": rows}


def dumps(obj):
    doc = obj if isinstance(obj, dict) else to_document(obj)
    return json.dumps(doc, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# documents -> objects

def _game(states):
    owner, actions, priority, obs = {}, {}, {}, {}
    for item in states:
        s = dec(item["id"])
        owner[s] = item["owner"]
        priority[s] = item["priority"]
        actions[s] = {dec(a["action"]): _undist(a["to"]) for a in item["actions"]}
        if "obs" in item:
            obs[s] = dec(item["obs"])
    return StochasticGame(owner, actions, priority), obs


def from_document(doc):
    """Validate ``doc`` against its schema and build the object."""
    if not isinstance(doc, dict) or doc.get("kind") not in SCHEMAS:
        raise FormatError("unknown document kind %r" % (doc.get("kind") if isinstance(doc, dict) else doc,),
                          "kind")
    kind = doc["kind"]
    try:
        jsonschema.Draft7Validator(SCHEMAS[kind]).validate(doc)
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "(document)"
        raise FormatError("%s: %s" % (path, e.message), path) from None
    if kind == "library":
        inputs = tuple(dec(a) for a in doc["inputs"])
        outputs = tuple(dec(x) for x in doc["outputs"])
        comps = []
        for c in doc["components"]:
            delta = {(dec(t["state"]), dec(t["input"])): _undist(t["to"]) for t in c["delta"]}
            comps.append(Component(inputs, outputs, tuple(dec(q) for q in c["states"]),
                                   dec(c["initial"]), delta,
                                   {dec(d): dec(q) for d, q in c["exits"]},
                                   {dec(q): dec(x) for q, x in c["labels"]}, c.get("name", "")))
        return Library(tuple(comps), tuple(dec(d) for d in doc["directions"]))
    if kind == "index":
        return {(i, dec(q)): p for i, q, p in doc["priorities"]}
    if kind == "relation":
        return ExitControlRelation(frozenset((dec(d), j) for d, j in doc["pairs"]))
    if kind == "composer":
        return Composer(tuple(dec(m) for m in doc["states"]), dec(doc["initial"]),
                        {(dec(m), dec(d)): dec(n) for m, d, n in doc["transfer"]},
                        {dec(m): j for m, j in doc["typing"]})
    if kind == "dpw":
        return DPW(tuple(dec(x) for x in doc["alphabet"]), tuple(dec(p) for p in doc["states"]),
                   dec(doc["initial"]),
                   {(dec(p), dec(x)): dec(t) for p, x, t in doc["delta"]},
                   {dec(p): k for p, k in doc["priority"]})
    if kind == "game":
        return _game(doc["states"])[0]
    if kind == "observed-game":
        g, obs = _game(doc["states"])
        missing = [s for s in g.owner if s not in obs]
        if missing:
            raise FormatError("states: observation missing for %r" % (missing[0],), "states")
        return ObservedGame(g, obs, dec(doc["initial"]))
    if kind == "automaton":
        return ProbabilisticAutomaton(
            tuple(dec(x) for x in doc["alphabet"]), tuple(dec(q) for q in doc["states"]),
            dec(doc["initial"]),
            {(dec(t["state"]), dec(t["letter"])): _undist(t["to"]) for t in doc["delta"]},
            {dec(q): k for q, k in doc["priority"]})
    return Lasso(tuple(dec(x) for x in doc["prefix"]), tuple(dec(x) for x in doc["cycle"]))


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError("line %d, column %d: %s" % (e.lineno, e.colno, e.msg),
                          (e.lineno, e.colno)) from None
    return from_document(doc)


def load(path):
    with open(path, encoding="utf-8") as f:
        return loads(f.read())


def save(obj, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(obj))


# ---------------------------------------------------------------------------
# DOT

_PALETTE = ("lightblue", "lightpink", "palegreen", "khaki", "plum", "lightsalmon",
            "lightcyan", "wheat", "thistle", "lightgrey")


def _q(v):
    return json.dumps(str(v), ensure_ascii=False)


def dot(obj):
    """Graphviz text for a game, an observed game or a composed transducer.

    Player-1 states are boxes and player-2 states ellipses; labels show
    the priority.  Observation classes get fill colours.
    """
    lines = ["digraph G {"]
    if isinstance(obj, ComposedTransducer):
        for s in obj.states:
            lines.append("  %s [label=%s];" % (_q(s), _q("%s\ninst %s / %s" % (s, obj.instance[s], obj.labels[s]))))
        for (s, a), d in obj.delta.items():
            for t, p in d.items():
                lines.append("  %s -> %s [label=%s];" % (_q(s), _q(t), _q("%s:%s" % (a, p))))
        lines.append("}")
        return "\n".join(lines) + "\n"
    og = obj if isinstance(obj, ObservedGame) else None
    g = og.game if og else obj
    colour = {}
    if og:
        for o in og.observations:
            colour[o] = _PALETTE[len(colour) % len(_PALETTE)]
    for s in g.owner:
        attrs = ["shape=%s" % ("box" if g.owner[s] == 1 else "ellipse"),
                 "label=%s" % _q("%s\np=%d" % (s, g.priority[s]))]
        if og:
            attrs.append('style=filled, fillcolor="%s"' % colour[og.obs[s]])
        lines.append("  %s [%s];" % (_q(s), ", ".join(attrs)))
    for s, acts in g.actions.items():
        for a, d in acts.items():
            for t, p in d.items():
                label = str(a) if p == 1 else "%s:%s" % (a, p)
                lines.append("  %s -> %s [label=%s];" % (_q(s), _q(t), _q(label)))
    lines.append("}")
    return "\n".join(lines) + "\n"
