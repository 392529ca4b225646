"""File formats: the HCG3 instance text format plus JSON documents.

An instance file is deliberately dumb text so it diffs, hashes and parses
anywhere:

    HCG3 1
    n 13
    # any number of comment lines
    311121312...   (one digit per triple, colex rank order, wrapped at 80)

Matching documents and traces are JSON; traces are written one event per
line so long runs stream and `grep RESTART` works.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import FormatError
from .model import Colouring, Matching, n_triples

MAGIC = "HCG3"
FORMAT_VERSION = 1
WRAP = 80

MATCHING_FORMAT = "hypermatch-matching/1"


@dataclass(frozen=True)
class InstanceFile:
    """Parsed instance: the colouring plus any comment lines (sans '#')."""

    colouring: Colouring
    comments: tuple[str, ...] = ()


def dump_instance(c: Colouring, comments: Sequence[str] = ()) -> str:
    """Render a colouring in HCG3 text form. Comments go right after the header."""
    lines = [f"{MAGIC} {FORMAT_VERSION}", f"n {c.n}"]
    for note in comments:
        if "\n" in note:
            raise ValueError("comment lines must be single lines")
        lines.append(f"# {note}")
    digits = "".join(chr(ord("0") + v) for v in c.table)
    lines.extend(digits[i:i + WRAP] for i in range(0, len(digits), WRAP))
    return "\n".join(lines) + "\n"


def load_instance(text: str) -> InstanceFile:
    """Parse HCG3 text. Round-trips byte-identically with dump_instance."""
    comments: list[str] = []
    body: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        body.append(line)
    if not body:
        raise FormatError("empty instance file")
    head = body[0].split()
    if head != [MAGIC, str(FORMAT_VERSION)]:
        raise FormatError(f"bad header {body[0]!r}, expected '{MAGIC} {FORMAT_VERSION}'")
    if len(body) < 2 or not body[1].startswith("n "):
        raise FormatError("missing 'n <count>' line")
    try:
        n = int(body[1].split()[1])
    except (IndexError, ValueError):
        raise FormatError(f"unreadable vertex count line {body[1]!r}") from None
    if n < 3:
        raise FormatError(f"need at least 3 vertices, file says n={n}")
    digits = "".join(body[2:])
    if len(digits) != n_triples(n):
        raise FormatError(
            f"colour string has {len(digits)} digits, n={n} needs {n_triples(n)}")
    if digits.strip("123"):
        bad = sorted(set(digits) - set("123"))
        raise FormatError(f"colour digits must be 1/2/3, found {bad}")
    table = np.frombuffer(digits.encode("ascii"), dtype=np.uint8) - ord("0")
    return InstanceFile(Colouring(n, table), tuple(comments))


def read_instance(path: str) -> InstanceFile:
    with open(path, "r", encoding="ascii") as fh:
        return load_instance(fh.read())


def write_instance(path: str, c: Colouring, comments: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dump_instance(c, comments))


# ---------------------------------------------------------------------------
# Matching documents.

def matching_document(c: Colouring, m: Matching, source: str,
                      trace_ref: Optional[str] = None,
                      extra: Optional[dict] = None) -> dict:
    """JSON-ready description of a matching; key order is canonicalized on dump."""
    doc = {
        "format": MATCHING_FORMAT,
        "n": c.n,
        "size": m.size,
        "avoided": m.avoided,
        "colours": sorted(m.colours_used(c)),
        "triples": [list(t) for t in m.triples],
        "source": source,
    }
    if trace_ref is not None:
        doc["trace"] = trace_ref
    if extra:
        doc.update(extra)
    return doc


def dump_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, default=_coerce) + "\n"


def load_matching_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"matching document is not JSON: {e}") from None
    if not isinstance(doc, dict) or doc.get("format") != MATCHING_FORMAT:
        raise FormatError(f"not a {MATCHING_FORMAT} document")
    for key in ("n", "size", "triples"):
        if key not in doc:
            raise FormatError(f"matching document lacks {key!r}")
    return doc


def document_matching(doc: dict) -> Matching:
    """Rebuild the Matching object a document describes."""
    try:
        triples = [tuple(int(v) for v in t) for t in doc["triples"]]
    except (TypeError, ValueError):
        raise FormatError("triples field is not a list of vertex triples") from None
    if any(len(t) != 3 for t in triples):
        raise FormatError("every matching entry must have exactly 3 vertices")
    avoided = doc.get("avoided")
    return Matching(tuple(triples), None if avoided is None else int(avoided))


# ---------------------------------------------------------------------------
# Traces.

def _coerce(obj):
    # np scalars and sets leak into event payloads; make them JSON-safe.
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_trace(events: Union[Sequence[dict], "object"]) -> str:
    """One JSON object per line, keys sorted so identical runs give identical bytes."""
    return "".join(json.dumps(ev, sort_keys=True, default=_coerce) + "\n"
                   for ev in events)


def load_trace(text: str) -> list[dict]:
    events = []
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            ev = json.loads(line)
        except json.JSONDecodeError as e:
            raise FormatError(f"trace line {i} is not JSON: {e}") from None
        if not isinstance(ev, dict) or "event" not in ev:
            raise FormatError(f"trace line {i} lacks an 'event' key")
        events.append(ev)
    return events
