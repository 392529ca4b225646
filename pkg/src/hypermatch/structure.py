"""Structural scans over coloured triple systems.

Everything here is about six-vertex sets and what their 10 splittings into
two disjoint triples reveal: colours that dominate, spreads with their
demonstration splittings, universal sets, plus the larger 13-vertex universal
sets and the escalation witnesses the extractor trades in.

All scans are deterministic: candidates are visited in colex order of their
vertex sets and ties resolve to the lowest-ranked object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import chain, combinations
from typing import Optional, Sequence

import numpy as np

from .errors import WitnessError
from .model import (COLOURS, Colouring, Matching, Triple, colex_subsets,
                    rank_rows, shift_colour, verify_matching)

# The 10 splittings of a sorted sextuple (v0..v5), identified by the two
# positions joining v0 in the first half; pair order is colex.
_SPLIT_PAIRS: tuple[tuple[int, int], ...] = (
    (1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4),
    (1, 5), (2, 5), (3, 5), (4, 5),
)
_SPLIT_FIRST = np.array([(0, x, y) for x, y in _SPLIT_PAIRS], dtype=np.int16)
_SPLIT_SECOND = np.array(
    [[i for i in range(1, 6) if i not in p] for p in _SPLIT_PAIRS], dtype=np.int16)


@dataclass(frozen=True)
class Splitting:
    """A partition of a sextuple into two disjoint triples."""

    first: Triple
    second: Triple


@dataclass(frozen=True)
class SpreadInfo:
    """A colour that dominates a sextuple together with demonstration splittings.

    plus_split carries the (colour, colour+1) demonstration with the
    colour-coloured half first; minus_split the (colour, colour-1) one.
    dominating is the overlap of the two colour-coloured halves (1 or 2
    vertices, matching the level); core is the rest of the sextuple.
    """

    colour: int
    plus_split: Splitting
    minus_split: Splitting
    level: int
    dominating: tuple[int, ...]
    core: tuple[int, ...]

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self.dominating + self.core))

    @property
    def m_plus(self) -> Triple:
        return self.plus_split.first

    @property
    def p_half(self) -> Triple:
        return self.plus_split.second

    @property
    def m_minus(self) -> Triple:
        return self.minus_split.first

    @property
    def n_half(self) -> Triple:
        return self.minus_split.second

    @property
    def q_half(self) -> tuple[int, ...]:
        return tuple(v for v in self.m_plus if v not in self.dominating)

    @property
    def r_half(self) -> tuple[int, ...]:
        return tuple(v for v in self.m_minus if v not in self.dominating)


@dataclass(frozen=True)
class SextupleClass:
    """classify_sextuple output: dominating colours, spreads, avoiding splits."""

    dominated: frozenset[int]
    spreads: tuple[SpreadInfo, ...]
    universal: bool
    avoiding_splits: dict[int, Optional[Splitting]] = field(compare=False)


UNIVERSAL6 = "Universal6"
UNIVERSAL13 = "Universal13"
FOREIGN_SPREAD = "ForeignSpread"
LEVEL_UPGRADE = "LevelUpgrade"
FAITHFULNESS = "Faithfulness"
WITNESS_KINDS = frozenset(
    {UNIVERSAL6, UNIVERSAL13, FOREIGN_SPREAD, LEVEL_UPGRADE, FAITHFULNESS})


@dataclass(frozen=True)
class Witness:
    """A localized object that redirects or restarts the extraction.

    Universal6/Universal13 carry one avoiding matching per colour over their
    vertex set; ForeignSpread/LevelUpgrade carry the spread that triggered
    the escalation.
    """

    kind: str
    vertices: tuple[int, ...]
    matchings: tuple[Matching, ...] = ()
    spread: Optional[SpreadInfo] = None
    context: str = ""

    def __post_init__(self):
        if self.kind not in WITNESS_KINDS:
            raise ValueError(f"unknown witness kind {self.kind!r}")


def splittings_of(s: Sequence[int]) -> list[Splitting]:
    """The 10 splittings of a 6-vertex set, first half holding the smallest."""
    v = sorted(s)
    if len(v) != 6 or len(set(v)) != 6:
        raise ValueError(f"need 6 distinct vertices, got {s}")
    out = []
    for x, y in _SPLIT_PAIRS:
        first = (v[0], v[x], v[y])
        second = tuple(v[i] for i in range(1, 6) if i != x and i != y)
        out.append(Splitting(first, second))
    return out


def classify_sextuple(c: Colouring, s: Sequence[int]) -> SextupleClass:
    """Full splitting census of one sextuple.

    A colour dominates when every splitting has a triple of that colour; a
    spread additionally needs splittings coloured (colour, colour+1) and
    (colour, colour-1).  Among demonstration pairs a level-2 pair wins, then
    the lowest splitting-index pair.
    """
    splits = splittings_of(s)
    cols = [(c.colour(sp.first), c.colour(sp.second)) for sp in splits]
    dominated = frozenset(a for a in COLOURS if all(a in pr for pr in cols))
    avoiding: dict[int, Optional[Splitting]] = {
        a: next((splits[i] for i, pr in enumerate(cols) if a not in pr), None)
        for a in COLOURS}
    spreads: list[SpreadInfo] = []
    for a in sorted(dominated):
        up, down = shift_colour(a, 1), shift_colour(a, -1)
        plus_c, minus_c = [], []
        for i, (c1, c2) in enumerate(cols):
            # orient so the half in the dominating colour comes first
            if {c1, c2} == {a, up}:
                sp = splits[i]
                plus_c.append((i, sp if c1 == a else Splitting(sp.second, sp.first)))
            if {c1, c2} == {a, down}:
                sp = splits[i]
                minus_c.append((i, sp if c1 == a else Splitting(sp.second, sp.first)))
        if not plus_c or not minus_c:
            continue
        best = None
        for pi, ps in plus_c:
            for mi, ms in minus_c:
                shared = set(ps.first) & set(ms.first)
                # 0 or 3 shared would force one triple to carry two colours
                assert len(shared) in (1, 2), (s, a, ps, ms)
                key = (-len(shared), pi, mi)
                if best is None or key < best[0]:
                    best = (key, ps, ms, tuple(sorted(shared)))
        _, ps, ms, dom = best
        core = tuple(v for v in sorted(s) if v not in dom)
        spreads.append(SpreadInfo(colour=a, plus_split=ps, minus_split=ms,
                                  level=len(dom), dominating=dom, core=core))
    return SextupleClass(dominated=dominated, spreads=tuple(spreads),
                         universal=not dominated, avoiding_splits=avoiding)


def spread_in_colour(c: Colouring, s: Sequence[int], colour: int) -> Optional[SpreadInfo]:
    for sp in classify_sextuple(c, s).spreads:
        if sp.colour == colour:
            return sp
    return None


def find_universal_sextuple(c: Colouring, w: Sequence[int]
                            ) -> Optional[tuple[tuple[int, ...], SextupleClass]]:
    """Lowest-colex universal sextuple within w, or None."""
    verts = sorted(set(w))
    if len(verts) < 6:
        raise ValueError(f"need at least 6 vertices, got {len(verts)}")
    for cand in colex_subsets(verts, 6):
        cls = classify_sextuple(c, cand)
        if cls.universal:
            return cand, cls
    return None


def scan_spreads(c: Colouring, w: Sequence[int],
                 colour_filter: Optional[int] = None) -> list[SpreadInfo]:
    """All spreads inside w in colex order of their vertex sets."""
    verts = sorted(set(w))
    if len(verts) < 6:
        raise ValueError(f"need at least 6 vertices, got {len(verts)}")
    out: list[SpreadInfo] = []
    for cand in colex_subsets(verts, 6):
        for sp in classify_sextuple(c, cand).spreads:
            if colour_filter is None or sp.colour == colour_filter:
                out.append(sp)
    return out


def critical_pairs(s: SpreadInfo) -> list[tuple[int, int]]:
    """Unordered vertex pairs inside either colour-coloured half, colex order.

    Level 2 shares one pair between the halves, so the count is 6 or 5.
    """
    pairs = {tuple(sorted(p)) for half in (s.m_plus, s.m_minus)
             for p in combinations(half, 2)}
    return sorted(pairs, key=lambda p: p[::-1])


def is_clique(c: Colouring, s: Sequence[int], colour: int) -> Optional[Triple]:
    """None if every triple inside s has the colour, else the lowest-colex offender."""
    verts = sorted(set(s))
    for t in colex_subsets(verts, 3):
        if c.colour(t) != colour:
            return t
    return None


def is_forcing(c: Colouring, w: Sequence[int], v: int, colour: int) -> bool:
    """True iff every triple within w through v has the given colour."""
    verts = sorted(set(w))
    if v not in verts:
        raise ValueError(f"vertex {v} not in the scanned set")
    rest = [x for x in verts if x != v]
    for a, b in combinations(rest, 2):
        if c.colour((v, a, b)) != colour:
            return False
    return True


@lru_cache(maxsize=1)
def perfect_matching_patterns_12() -> np.ndarray:
    """All 15400 partitions of 12 positions into 4 triples.

    Order: fix the lowest remaining position, join its two partners chosen in
    colex pair order, recurse.  Shape (15400, 4, 3), read-only.
    """
    def rec(avail: tuple[int, ...]) -> list[list[Triple]]:
        if not avail:
            return [[]]
        head, rest = avail[0], avail[1:]
        out = []
        for j in range(1, len(rest)):
            for i in range(j):
                t = (head, rest[i], rest[j])
                rem = tuple(x for k, x in enumerate(rest) if k != i and k != j)
                out.extend([t] + tail for tail in rec(rem))
        return out
    pats = rec(tuple(range(12)))
    assert len(pats) == 15400, len(pats)
    arr = np.array(pats, dtype=np.int8)
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=1)
def packing_patterns_13() -> np.ndarray:
    """All 200200 ways to place 4 disjoint triples on 13 positions.

    Grouped by the uncovered position in ascending order; within a group the
    12 covered positions follow perfect_matching_patterns_12.
    """
    pm = perfect_matching_patterns_12()
    out = np.empty((13 * 15400, 4, 3), dtype=np.int8)
    for u in range(13):
        pos = np.array([p for p in range(13) if p != u], dtype=np.int8)
        out[u * 15400:(u + 1) * 15400] = pos[pm]
    out.flags.writeable = False
    return out


def check_universal_13(c: Colouring, x: Sequence[int]
                       ) -> Optional[tuple[Matching, Matching, Matching]]:
    """Per-colour size-4 avoiding matchings inside a 13-set, or None.

    Exhausts all 200200 packings; for each colour the first packing free of
    it (in pattern order) becomes that colour's matching.
    """
    xs = np.asarray(sorted(set(x)), dtype=np.int32)
    if xs.shape != (13,):
        raise ValueError(f"need exactly 13 distinct vertices, got {len(xs)}")
    packs = xs[packing_patterns_13()]          # (200200, 4, 3), rows ascending
    cols = c.table[rank_rows(packs, c.n)]      # (200200, 4)
    out = []
    for g in COLOURS:
        ok = (cols != g).all(axis=1)
        idx = int(np.argmax(ok))
        if not ok[idx]:
            return None
        triples = [tuple(int(v) for v in row) for row in packs[idx]]
        out.append(Matching.of(triples, avoided=g))
    return tuple(out)


def universal_matchings(cls_: SextupleClass) -> tuple[Matching, Matching, Matching]:
    """The three size-2 avoiding matchings of a universal sextuple."""
    if not cls_.universal:
        raise WitnessError("sextuple is not universal")
    out = []
    for g in COLOURS:
        sp = cls_.avoiding_splits[g]
        out.append(Matching.of([sp.first, sp.second], avoided=g))
    return tuple(out)


def find_witness(c: Colouring, s: Sequence[int],
                 colour_context: Optional[int] = None) -> Optional[Witness]:
    """Scan a small set for escalation material.

    Priority: universal sextuple, then universal 13-set, then a spread whose
    colour differs from colour_context (with no context, any spread counts).
    Capped at 14 vertices; larger sets have no business being scanned here.
    """
    verts = sorted(set(s))
    if len(verts) > 14:
        raise ValueError(f"witness scan capped at 14 vertices, got {len(verts)}")
    if len(verts) < 6:
        return None
    foreign: Optional[SpreadInfo] = None
    for cand in colex_subsets(verts, 6):
        cls = classify_sextuple(c, cand)
        if cls.universal:
            return Witness(UNIVERSAL6, tuple(cand), universal_matchings(cls))
        if foreign is None:
            for sp in cls.spreads:
                if colour_context is None or sp.colour != colour_context:
                    foreign = sp
                    break
    if len(verts) >= 13:
        for cand in colex_subsets(verts, 13):
            ms = check_universal_13(c, cand)
            if ms is not None:
                return Witness(UNIVERSAL13, tuple(cand), ms)
    if foreign is not None:
        return Witness(FOREIGN_SPREAD, foreign.vertices, spread=foreign)
    return None


def verify_spread(c: Colouring, sp: SpreadInfo) -> None:
    """Recheck every claim a SpreadInfo makes; raise WitnessError on any miss."""
    a = sp.colour
    six = set(sp.m_plus) | set(sp.p_half)
    if (set(sp.m_minus) | set(sp.n_half)) != six or len(six) != 6:
        raise WitnessError(f"spread halves do not partition a sextuple: {sp}")
    if set(sp.m_plus) & set(sp.p_half) or set(sp.m_minus) & set(sp.n_half):
        raise WitnessError(f"spread halves overlap: {sp}")
    checks = [(sp.m_plus, a), (sp.m_minus, a),
              (sp.p_half, shift_colour(a, 1)), (sp.n_half, shift_colour(a, -1))]
    for t, want in checks:
        if c.colour(t) != want:
            raise WitnessError(f"half {t} has colour {c.colour(t)}, wanted {want}")
    dom = set(sp.m_plus) & set(sp.m_minus)
    if dom != set(sp.dominating) or len(dom) != sp.level or sp.level not in (1, 2):
        raise WitnessError(f"spread level bookkeeping is off: {sp}")
    if set(sp.core) != six - dom:
        raise WitnessError(f"spread core bookkeeping is off: {sp}")


def verify_witness(c: Colouring, w: Witness) -> None:
    """Re-verify a witness from the colouring alone; raise WitnessError if bogus."""
    if w.kind in (UNIVERSAL6, UNIVERSAL13):
        want_size = 2 if w.kind == UNIVERSAL6 else 4
        want_len = 6 if w.kind == UNIVERSAL6 else 13
        if len(set(w.vertices)) != want_len:
            raise WitnessError(f"{w.kind} vertex set has size {len(set(w.vertices))}")
        if tuple(m.avoided for m in w.matchings) != COLOURS:
            raise WitnessError(f"{w.kind} must carry avoid-1/2/3 matchings in order")
        for m in w.matchings:
            if not m.vertices <= set(w.vertices):
                raise WitnessError(f"matching {m.triples} leaves the witness set")
            rep = verify_matching(c, m, want_size)
            if not rep.valid:
                raise WitnessError(f"{w.kind} matching failed: {rep.violations}")
    elif w.kind in (FOREIGN_SPREAD, LEVEL_UPGRADE):
        if w.spread is None:
            raise WitnessError(f"{w.kind} witness carries no spread")
        verify_spread(c, w.spread)
        if w.kind == LEVEL_UPGRADE and w.spread.level != 2:
            raise WitnessError("level upgrade must produce a level-2 spread")
    # Faithfulness witnesses are pure error reports; nothing to recheck.


# ---------------------------------------------------------------------------
# Bulk scans.  The per-sextuple census above is fine for witnesses; peeling
# and dispatch classify every sextuple of the active set at once instead.

@lru_cache(maxsize=4)
def sextuple_position_table(m: int) -> np.ndarray:
    """All 6-subsets of range(m) as int16 rows in colex order, read-only."""
    if m < 6:
        arr = np.empty((0, 6), dtype=np.int16)
    else:
        flat = np.fromiter(chain.from_iterable(combinations(range(m), 6)),
                           dtype=np.int16)
        arr = flat.reshape(-1, 6)
        arr = arr[np.lexsort(arr.T)]    # last key (= largest member) primary
    arr.flags.writeable = False
    return arr


def _oriented_inter2() -> np.ndarray:
    # 20 oriented halves: index 2*t + side; entry true iff the two halves
    # share exactly 2 positions (the level-2 test between demonstrations).
    halves = []
    for t in range(10):
        halves.append(set(_SPLIT_FIRST[t].tolist()))
        halves.append(set(_SPLIT_SECOND[t].tolist()))
    out = np.zeros((20, 20), dtype=bool)
    for i, hi in enumerate(halves):
        for j, hj in enumerate(halves):
            out[i, j] = len(hi & hj) == 2
    return out


_INTER2 = _oriented_inter2()


@dataclass
class SextupleFlags:
    """Vectorized census of every sextuple inside a vertex set.

    Rows follow colex order of the vertex sets.  spread/level2 are indexed by
    colour-1; level2 marks spreads that admit a level-2 demonstration pair.
    """

    verts: np.ndarray       # sorted vertex ids
    subs: np.ndarray        # (R, 6) vertex ids
    universal: np.ndarray   # (R,) bool
    spread: np.ndarray      # (3, R) bool
    level2: np.ndarray      # (3, R) bool


def bulk_sextuple_flags(c: Colouring, vertices: Sequence[int],
                        chunk: int = 1 << 18) -> SextupleFlags:
    verts = np.asarray(sorted(set(vertices)), dtype=np.int16)
    subs = verts[sextuple_position_table(len(verts))]
    r = len(subs)
    universal = np.zeros(r, dtype=bool)
    spread = np.zeros((3, r), dtype=bool)
    level2 = np.zeros((3, r), dtype=bool)
    inter2 = _INTER2.astype(np.uint8)
    for lo in range(0, r, chunk):
        rows = subs[lo:lo + chunk]
        hc = np.empty((len(rows), 20), dtype=np.uint8)
        hc[:, 0::2] = c.table[rank_rows(rows[:, _SPLIT_FIRST], c.n)]
        hc[:, 1::2] = c.table[rank_rows(rows[:, _SPLIT_SECOND], c.n)]
        dom = np.stack([((hc[:, 0::2] == a) | (hc[:, 1::2] == a)).all(axis=1)
                        for a in COLOURS])
        universal[lo:lo + chunk] = ~dom.any(axis=0)
        other = hc[:, np.arange(20) ^ 1]    # colour of each half's complement
        for a in COLOURS:
            up, down = shift_colour(a, 1), shift_colour(a, -1)
            plus = (hc == a) & (other == up)
            minus = (hc == a) & (other == down)
            flag = dom[a - 1] & plus.any(axis=1) & minus.any(axis=1)
            spread[a - 1, lo:lo + chunk] = flag
            if flag.any():
                idx = np.nonzero(flag)[0]
                reach = (plus[idx].astype(np.uint8) @ inter2) > 0
                level2[a - 1, lo + idx] = (reach & minus[idx]).any(axis=1)
    return SextupleFlags(verts=verts, subs=subs, universal=universal,
                         spread=spread, level2=level2)
