"""On-disk JSON formats for automata and pattern sets, plus trace export.

Documents are strict: unknown fields and malformed values are rejected
with a JSON-pointer-style path to the offending element.  Byte values
map to JSON strings through latin-1, so every byte round-trips.

Edge classes are written in a canonical character-set syntax (single safe
byte, ``[...]`` with ranges and ``\\xHH`` escapes, or ``[^...]`` when the
complement is smaller); a 64-hex-digit bitset literal is accepted on load
for exactness.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .core import ALPHABET_SIZE, Automaton, StartKind, SymbolClass
from .generators import (DotStarSource, HammingSource, LevenshteinSource,
                         Pattern, RandomRecipe, RegexSource)
from .regex import RegexParseError, parse_class_string, render_class_string
from .simulate import SimulationTrace

AUTOMATON_VERSION = 1
PATTERN_SET_VERSION = 1

_START_KINDS = {k.value: k for k in StartKind}


class DocumentError(ValueError):
    """Schema violation; the message carries a JSON-pointer-ish path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _expect(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise DocumentError(path, message)


def _require_keys(obj: dict, path: str, required: tuple[str, ...],
                  optional: tuple[str, ...] = ()) -> None:
    for key in required:
        _expect(key in obj, path, f"missing field {key!r}")
    for key in obj:
        _expect(key in required or key in optional, f"{path}/{key}",
                "unknown field")


def _int_field(obj: dict, path: str, key: str) -> int:
    value = obj[key]
    _expect(isinstance(value, int) and not isinstance(value, bool),
            f"{path}/{key}", "expected an integer")
    return value


_HEX_DIGITS = set("0123456789abcdefABCDEF")


def parse_class_field(text: str, path: str) -> SymbolClass:
    _expect(isinstance(text, str), path, "expected a string")
    if text == "":
        raise DocumentError(path, "empty symbol class")
    if not text.startswith("[") and len(text) > 1 and set(text) <= _HEX_DIGITS:
        if len(text) != ALPHABET_SIZE // 4:
            raise DocumentError(
                path, f"class literal length (expected 64 hex digits, "
                      f"got {len(text)})")
        cls = SymbolClass(int(text, 16))
        if not cls:
            raise DocumentError(path, "empty symbol class")
        return cls
    try:
        return parse_class_string(text)
    except RegexParseError as exc:
        raise DocumentError(path, f"bad class string: {exc}") from exc


# ---------------------------------------------------------------------------
# Automaton documents


def automaton_to_document(a: Automaton) -> dict:
    doc: dict = {
        "version": AUTOMATON_VERSION,
        "states": a.state_count,
        "starts": [{"id": s, "kind": a.starts[s].value}
                   for s in sorted(a.starts)],
        "accepts": sorted(a.accepts),
        "edges": [{"src": s, "dst": d, "class": render_class_string(c)}
                  for s, c, d in a.edges],
    }
    if a.epsilon_edges:
        doc["epsilon_edges"] = [{"src": s, "dst": d}
                                for s, d in a.epsilon_edges]
    if a.deterministic:
        doc["deterministic"] = True
    if a.component_labels:
        doc["labels"] = {str(s): a.component_labels[s]
                         for s in sorted(a.component_labels)}
    return doc


def automaton_from_document(doc: dict) -> Automaton:
    _expect(isinstance(doc, dict), "", "expected an object")
    _require_keys(doc, "", ("version", "states", "starts", "accepts", "edges"),
                  ("epsilon_edges", "deterministic", "labels"))
    version = _int_field(doc, "", "version")
    _expect(version == AUTOMATON_VERSION, "/version",
            f"version mismatch: expected {AUTOMATON_VERSION}, got {version}")
    states = _int_field(doc, "", "states")

    starts: dict[int, StartKind] = {}
    _expect(isinstance(doc["starts"], list), "/starts", "expected a list")
    for i, entry in enumerate(doc["starts"]):
        path = f"/starts/{i}"
        _expect(isinstance(entry, dict), path, "expected an object")
        _require_keys(entry, path, ("id", "kind"))
        kind = entry["kind"]
        _expect(kind in _START_KINDS, f"{path}/kind",
                f"unknown start kind {kind!r}")
        starts[_int_field(entry, path, "id")] = _START_KINDS[kind]

    _expect(isinstance(doc["accepts"], list), "/accepts", "expected a list")
    accepts = []
    for i, entry in enumerate(doc["accepts"]):
        _expect(isinstance(entry, int) and not isinstance(entry, bool),
                f"/accepts/{i}", "expected an integer")
        accepts.append(entry)

    edges = []
    _expect(isinstance(doc["edges"], list), "/edges", "expected a list")
    for i, entry in enumerate(doc["edges"]):
        path = f"/edges/{i}"
        _expect(isinstance(entry, dict), path, "expected an object")
        _require_keys(entry, path, ("src", "dst", "class"))
        edges.append((_int_field(entry, path, "src"),
                      parse_class_field(entry["class"], f"{path}/class"),
                      _int_field(entry, path, "dst")))

    eps = []
    for i, entry in enumerate(doc.get("epsilon_edges", [])):
        path = f"/epsilon_edges/{i}"
        _expect(isinstance(entry, dict), path, "expected an object")
        _require_keys(entry, path, ("src", "dst"))
        eps.append((_int_field(entry, path, "src"),
                    _int_field(entry, path, "dst")))

    deterministic = doc.get("deterministic", False)
    _expect(isinstance(deterministic, bool), "/deterministic",
            "expected a boolean")

    labels = None
    if "labels" in doc:
        _expect(isinstance(doc["labels"], dict), "/labels", "expected an object")
        labels = {}
        for key, value in doc["labels"].items():
            path = f"/labels/{key}"
            _expect(key.isdigit(), path, "state keys must be decimal")
            _expect(isinstance(value, int) and not isinstance(value, bool),
                    path, "expected an integer label")
            labels[int(key)] = value

    return Automaton(
        state_count=states,
        edges=tuple(edges),
        epsilon_edges=tuple(eps),
        starts=starts,
        accepts=frozenset(accepts),
        deterministic=deterministic,
        component_labels=labels,
    )


# ---------------------------------------------------------------------------
# Pattern-set documents


@dataclass(frozen=True)
class PatternSet:
    patterns: tuple[Pattern, ...]
    start_kind: StartKind
    seed: int | None = None


def _pattern_to_entry(p: Pattern) -> dict:
    s = p.source
    if isinstance(s, RegexSource):
        return {"id": p.id, "kind": "regex", "text": s.text}
    if isinstance(s, DotStarSource):
        return {"id": p.id, "kind": "dotstar",
                "prefix": s.prefix.decode("latin-1"),
                "suffix": s.suffix.decode("latin-1")}
    if isinstance(s, HammingSource):
        return {"id": p.id, "kind": "hamming",
                "pattern": s.pattern.decode("latin-1"), "distance": s.distance}
    if isinstance(s, LevenshteinSource):
        return {"id": p.id, "kind": "levenshtein",
                "pattern": s.pattern.decode("latin-1"), "distance": s.distance}
    if isinstance(s, RandomRecipe):
        return {"id": p.id, "kind": "random", "states": s.states,
                "density": s.density, "accept_density": s.accept_density,
                "alphabet_size": s.alphabet_size, "seed": s.seed}
    raise TypeError(f"unknown pattern source {s!r}")


_PATTERN_FIELDS = {
    "regex": ("text",),
    "dotstar": ("prefix", "suffix"),
    "hamming": ("pattern", "distance"),
    "levenshtein": ("pattern", "distance"),
    "random": ("states", "density", "accept_density", "alphabet_size", "seed"),
}


def _entry_to_pattern(entry: dict, path: str) -> Pattern:
    _expect(isinstance(entry, dict), path, "expected an object")
    _expect("kind" in entry, path, "missing field 'kind'")
    kind = entry["kind"]
    _expect(kind in _PATTERN_FIELDS, f"{path}/kind",
            f"unknown pattern kind {kind!r}")
    _require_keys(entry, path, ("id", "kind") + _PATTERN_FIELDS[kind])
    pid = _int_field(entry, path, "id")

    def text(key: str) -> bytes:
        value = entry[key]
        _expect(isinstance(value, str), f"{path}/{key}", "expected a string")
        try:
            return value.encode("latin-1")
        except UnicodeEncodeError:
            raise DocumentError(f"{path}/{key}",
                                "characters above U+00FF are not bytes")

    if kind == "regex":
        value = entry["text"]
        _expect(isinstance(value, str), f"{path}/text", "expected a string")
        return Pattern(pid, RegexSource(value))
    if kind == "dotstar":
        return Pattern(pid, DotStarSource(text("prefix"), text("suffix")))
    if kind in ("hamming", "levenshtein"):
        cls = HammingSource if kind == "hamming" else LevenshteinSource
        return Pattern(pid, cls(text("pattern"),
                                _int_field(entry, path, "distance")))
    density = entry["density"]
    accept_density = entry["accept_density"]
    _expect(isinstance(density, (int, float)), f"{path}/density",
            "expected a number")
    _expect(isinstance(accept_density, (int, float)), f"{path}/accept_density",
            "expected a number")
    return Pattern(pid, RandomRecipe(
        states=_int_field(entry, path, "states"),
        density=float(density),
        accept_density=float(accept_density),
        alphabet_size=_int_field(entry, path, "alphabet_size"),
        seed=_int_field(entry, path, "seed"),
    ))


def pattern_set_to_document(ps: PatternSet) -> dict:
    doc: dict = {
        "version": PATTERN_SET_VERSION,
        "start_kind": ps.start_kind.value,
        "patterns": [_pattern_to_entry(p) for p in ps.patterns],
    }
    if ps.seed is not None:
        doc["seed"] = ps.seed
    return doc


def pattern_set_from_document(doc: dict) -> PatternSet:
    _expect(isinstance(doc, dict), "", "expected an object")
    _require_keys(doc, "", ("version", "start_kind", "patterns"), ("seed",))
    version = _int_field(doc, "", "version")
    _expect(version == PATTERN_SET_VERSION, "/version",
            f"version mismatch: expected {PATTERN_SET_VERSION}, got {version}")
    kind = doc["start_kind"]
    _expect(kind in _START_KINDS, "/start_kind",
            f"unknown start kind {kind!r}")
    _expect(isinstance(doc["patterns"], list), "/patterns", "expected a list")
    patterns = tuple(_entry_to_pattern(entry, f"/patterns/{i}")
                     for i, entry in enumerate(doc["patterns"]))
    ids = [p.id for p in patterns]
    _expect(len(set(ids)) == len(ids), "/patterns", "pattern ids must be unique")
    seed = doc.get("seed")
    if seed is not None:
        _expect(isinstance(seed, int) and not isinstance(seed, bool),
                "/seed", "expected an integer")
    return PatternSet(patterns, _START_KINDS[kind], seed)


# ---------------------------------------------------------------------------
# Files


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write {path!r}: {exc}") from exc


def save_automaton(a: Automaton, path: str) -> None:
    write_text_atomic(path, _dump(automaton_to_document(a)))


def load_automaton(path: str) -> Automaton:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DocumentError("", f"not valid JSON: {exc}") from exc
    return automaton_from_document(doc)


def save_pattern_set(ps: PatternSet, path: str) -> None:
    write_text_atomic(path, _dump(pattern_set_to_document(ps)))


def load_pattern_set(path: str) -> PatternSet:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DocumentError("", f"not valid JSON: {exc}") from exc
    return pattern_set_from_document(doc)


# ---------------------------------------------------------------------------
# Trace export


def render_trace(trace: SimulationTrace) -> str:
    """Line-delimited records: cycle, active count, report list.

    Reports are comma-joined ``state:pattern`` pairs with ``-`` for
    unlabeled states; the third field is empty on report-free cycles.
    """
    by_cycle: dict[int, list[tuple[int, int | None]]] = {}
    for cycle, state, pid in trace.reports:
        by_cycle.setdefault(cycle, []).append((state, pid))
    lines = []
    for t, active in enumerate(trace.per_cycle_active):
        reports = ",".join(
            f"{state}:{'-' if pid is None else pid}"
            for state, pid in sorted(by_cycle.get(t, ()), key=lambda r: r[0]))
        lines.append(f"{t}\t{len(active)}\t{reports}")
    return "\n".join(lines) + ("\n" if lines else "")
