"""Constructive pipeline from colouring to 2-coloured near-perfect matching.

The flow: peel disjoint universal sextuples, then repeatedly classify the
spread inventory of the remaining active set and run the matching procedure
for the case at hand (no spreads / one spread colour / two disjoint spread
colours / two intersecting spread colours).  Every colour the argument
forces is re-checked against the colouring; a failed check either produces
a Witness (a universal set or a foreign spread, which restarts the dispatch
with more structure) or raises FaithfulnessError, which would mean the
guaranteed bound is unattainable and is treated as an internal bug.

All scans pick lowest-colex candidates so a run is a pure function of the
input colouring; the Trace records every peel, case entry, witness, forcing
vertex and restart, and can be replayed against the colouring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np

from .errors import FaithfulnessError
from .model import (COLOURS, Colouring, Matching, Triple, colex_subsets,
                    greedy_matching, m_bound, near_perfect_size, rank_rows,
                    shift_colour, verify_matching)
from .oracle import perfect_two_coloured_12, max_matching_in_colours, max_two_coloured
from .structure import (FOREIGN_SPREAD, LEVEL_UPGRADE, UNIVERSAL6, UNIVERSAL13,
                        SextupleClass, SpreadInfo, Splitting, Witness,
                        bulk_sextuple_flags, check_universal_13,
                        classify_sextuple, find_witness, is_clique, is_forcing,
                        universal_matchings, verify_spread, verify_witness)

__all__ = [
    "Trace", "SolveState", "HatSets",
    "MatchingAvoiding", "NoTriplesOfColour", "Escalate", "OneSpreadOutcome",
    "solve", "peel_phase", "dispatch", "assemble", "case_no_spreads",
    "proc_two_spreads", "cliques2matching", "proc_one_spread", "endgame",
    "replay_trace",
]


# ---------------------------------------------------------------------------
# Artifact types.

class Trace:
    """Ordered, JSON-ready event log of one solve run."""

    def __init__(self) -> None:
        self.events: list[dict] = []

    def emit(self, event: str, **payload) -> None:
        self.events.append({"event": event, **payload})

    def __iter__(self):
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)


def _mp(m: Matching) -> dict:
    return {"triples": [list(t) for t in m.triples], "avoided": m.avoided}


def _sp(sp: SpreadInfo) -> dict:
    return {"colour": sp.colour, "level": sp.level,
            "m_plus": list(sp.m_plus), "p_half": list(sp.p_half),
            "m_minus": list(sp.m_minus), "n_half": list(sp.n_half)}


@dataclass
class SolveState:
    """Mutable run state: the colouring plus what has been peeled off so far."""

    colouring: Colouring
    active: list[int]
    peeled6: list[tuple[tuple[int, ...], tuple[Matching, ...]]] = field(default_factory=list)
    peeled13: list[tuple[tuple[int, ...], tuple[Matching, ...]]] = field(default_factory=list)
    trace: Trace = field(default_factory=Trace)
    restart_measure: Optional[tuple[int, int, int]] = None


@dataclass(frozen=True)
class MatchingAvoiding:
    """Near-perfect matching on the queried set that avoids one colour."""

    matching: Matching
    avoided: int


@dataclass(frozen=True)
class NoTriplesOfColour:
    """The queried set has no triple of the named colour at all."""

    colour: int


@dataclass(frozen=True)
class Escalate:
    """A structural discovery that must restart the dispatcher."""

    witness: Witness


OneSpreadOutcome = Union[MatchingAvoiding, NoTriplesOfColour, Escalate]


@dataclass
class HatSets:
    """The grown extension sets of a disjoint spread pair.

    hat1/hat2 start at the spreads' dominating vertices and absorb every
    other active vertex while the swap-closure below holds.  verify() is the
    on-demand recheck of those closure properties.
    """

    spreads: tuple[SpreadInfo, SpreadInfo]
    hat1: list[int]
    hat2: list[int]

    def verify(self, c: Colouring) -> None:
        for sp, hat in zip(self.spreads, (self.hat1, self.hat2)):
            other = self.spreads[1] if sp is self.spreads[0] else self.spreads[0]
            if not set(sp.dominating) <= set(hat):
                raise FaithfulnessError(f"hat lost its dominating vertices: {hat}")
            if set(hat) & (set(sp.core) | set(other.vertices)):
                raise FaithfulnessError(f"hat {hat} overlaps a forbidden zone")
            for w in hat:
                rest = [v for v in hat if v != w]
                if rest and not _addable_to_hat(c, w, rest, sp):
                    raise FaithfulnessError(
                        f"hat member {w} fails the closure against {rest}")


# ---------------------------------------------------------------------------
# Small shared helpers.

_RANK = {"two_spreads": 0, "endgame": 1, "one_spread": 2, "no_spreads": 3,
         "trivial": 3}


def _triple_rows(c: Colouring, verts: Sequence[int]) -> tuple[list[Triple], list[int]]:
    """All triples of verts in colex order with their colours."""
    rows = list(colex_subsets(sorted(verts), 3))
    if not rows:
        return [], []
    arr = np.asarray(rows, dtype=np.int64)
    cols = c.table[rank_rows(arr, c.n)].tolist()
    return rows, cols


def _present_colours(c: Colouring, verts: Sequence[int]) -> list[int]:
    _, cols = _triple_rows(c, verts)
    return sorted(set(cols))


def _smallest_unused(c: Colouring, m: Matching) -> int:
    used = m.colours_used(c)
    return min(a for a in COLOURS if a not in used)


def _escalate_from_pair(c: Colouring, six: Sequence[int], alpha: int,
                        context: str) -> Witness:
    """Escalation for a 3-coloured sextuple with a splitting free of alpha.

    Not alpha-dominated, so it is universal or dominated in another colour;
    a dominated colour with both other colours present always has its two
    demonstration splittings, hence a foreign spread.  Reaching the error
    needs classify and the caller to disagree about the same 20 triples.
    """
    six = tuple(sorted(six))
    cls = classify_sextuple(c, six)
    if cls.universal:
        return Witness(UNIVERSAL6, six, universal_matchings(cls), context=context)
    for sp in cls.spreads:
        if sp.colour != alpha:
            return Witness(FOREIGN_SPREAD, six, spread=sp, context=context)
    raise FaithfulnessError(
        f"{context}: sextuple {six} admits no escalation and no domination")


def _expect_alpha_dominated(c: Colouring, six: Sequence[int], alpha: int,
                            context: str) -> tuple[Optional[SextupleClass], Optional[Witness]]:
    """Classify a sextuple the argument needs to be alpha-dominated."""
    six = tuple(sorted(six))
    cls = classify_sextuple(c, six)
    if cls.universal:
        return None, Witness(UNIVERSAL6, six, universal_matchings(cls),
                             context=context)
    if alpha not in cls.dominated:
        for sp in cls.spreads:
            if sp.colour != alpha:
                return None, Witness(FOREIGN_SPREAD, six, spread=sp,
                                     context=context)
        raise FaithfulnessError(
            f"{context}: sextuple {six} dominated only in {sorted(cls.dominated)} "
            f"yet offers no foreign spread")
    return cls, None


def _forced_colour(c: Colouring, t: Sequence[int], want: int, context: str) -> None:
    got = c.colour(t)
    if got != want:
        raise FaithfulnessError(
            f"{context}: triple {tuple(sorted(t))} has colour {got}, forced {want}")


def _avoid_splitting(sp: SpreadInfo, avoided: int) -> tuple[Triple, Triple]:
    """The demonstration splitting of a spread that avoids the given colour."""
    if avoided == shift_colour(sp.colour, 1):
        return sp.m_minus, sp.n_half
    if avoided == shift_colour(sp.colour, -1):
        return sp.m_plus, sp.p_half
    raise ValueError(f"no splitting of a colour-{sp.colour} spread avoids {avoided}")


# ---------------------------------------------------------------------------
# Peeling.

def peel_phase(st: SolveState) -> SolveState:
    """Greedily remove disjoint universal sextuples, lowest colex first.

    A single pass is enough: any universal sextuple still inside the leftover
    set was disjoint from everything taken before it was visited, so it would
    have been taken.  Universality depends only on the sextuple's own triples,
    hence later witness peels cannot create new ones.
    """
    if len(st.active) < 6:
        return st
    flags = bulk_sextuple_flags(st.colouring, st.active)
    used: set[int] = set()
    for row in np.flatnonzero(flags.universal):
        six = tuple(int(v) for v in flags.subs[row])
        if used & set(six):
            continue
        cls = classify_sextuple(st.colouring, six)
        ms = universal_matchings(cls)
        st.peeled6.append((six, ms))
        st.trace.emit("PEEL6", vertices=list(six), matchings=[_mp(m) for m in ms])
        used.update(six)
    if used:
        st.active = [v for v in st.active if v not in used]
    return st


# ---------------------------------------------------------------------------
# Case: no spreads at all.

def case_no_spreads(st: SolveState) -> Matching:
    """With no spreads and no universal sextuples only two colours can occur."""
    c = st.colouring
    present = _present_colours(c, st.active)
    if len(present) >= 3:
        raise FaithfulnessError(
            f"three colours present on {len(st.active)} vertices without any "
            f"spread or universal sextuple")
    m = greedy_matching(c, st.active, set(present) or {1})
    avoided = min(a for a in COLOURS if a not in present)
    return Matching.of(m.triples, avoided=avoided)


# ---------------------------------------------------------------------------
# Case: two disjoint spreads of different colours.

def _addable_to_hat(c: Colouring, w: int, hat: Sequence[int],
                    sp: SpreadInfo) -> bool:
    """Swap-closure test for joining w to a hat.

    Level 1 needs both replaced dominating triples through w and colour-pure
    pairs of w with every current member against the four half leftovers;
    level 2 needs the two leftover vertices pure against every pair {d, w}
    and every pure triple inside the enlarged hat.
    """
    i = sp.colour
    col = c.colour
    if sp.level == 1:
        q1, q2 = sp.q_half
        r1, r2 = sp.r_half
        if col((q1, q2, w)) != i or col((r1, r2, w)) != i:
            return False
        for d in hat:
            for x in (q1, q2, r1, r2):
                if col((x, d, w)) != i:
                    return False
    else:
        q, = sp.q_half
        r, = sp.r_half
        for d in hat:
            if col((q, d, w)) != i or col((r, d, w)) != i:
                return False
        for d1, d2 in combinations(hat, 2):
            if col((d1, d2, w)) != i:
                return False
    return True


def _failing_swap(c: Colouring, w: int, hat: Sequence[int],
                  sp: SpreadInfo) -> list[int]:
    """The lowest dominating-subset replacement that rejects w."""
    i = sp.colour
    col = c.colour
    hat = sorted(hat)
    if sp.level == 1:
        q1, q2 = sp.q_half
        r1, r2 = sp.r_half
        if col((q1, q2, w)) != i or col((r1, r2, w)) != i:
            return [hat[0]]
        for d in hat:
            for x in (q1, q2, r1, r2):
                if col((x, d, w)) != i:
                    return [d]
    else:
        q, = sp.q_half
        r, = sp.r_half
        for d in hat:
            if col((q, d, w)) != i or col((r, d, w)) != i:
                mate = min(x for x in hat if x != d)
                return sorted((d, mate))
        for d1, d2 in combinations(hat, 2):
            if col((d1, d2, w)) != i:
                return [d1, d2]
    raise FaithfulnessError(f"vertex {w} was reported stuck but joins the hat")


def _stuck_thirteen(c: Colouring, w: int, hats: Sequence[Sequence[int]],
                    spreads: Sequence[SpreadInfo]) -> Witness:
    """A vertex no hat accepts pins down a universal 13-set."""
    parts: list[int] = [w]
    for hat, sp in zip(hats, spreads):
        parts.extend(sp.core)
        parts.extend(_failing_swap(c, w, hat, sp))
    x13 = sorted(parts)
    if len(set(x13)) != 13:
        raise FaithfulnessError(f"stuck-vertex 13-set collapsed: {x13}")
    ms = check_universal_13(c, x13)
    if ms is None:
        raise FaithfulnessError(
            f"13-set {x13} from stuck vertex {w} failed the universality census")
    return Witness(UNIVERSAL13, tuple(x13), ms,
                   context=f"vertex {w} unaddable to either hat")


def _level1_breach_chain(c: Colouring, sp: SpreadInfo, t: Triple,
                         context: str) -> Witness:
    """A non-pure triple inside a level-1 hat yields a level-2 spread.

    Walks three forced sextuples; each classify may instead surface a
    universal sextuple, which is returned as is.
    """
    i = sp.colour
    x1, x2, x3 = sorted(t)
    v2, v3 = sp.q_half
    v4, v5 = sp.r_half
    (v6,) = set(sp.core) - {v2, v3, v4, v5}
    ct = c.colour(t)
    if ct == shift_colour(i, 1):
        side_pair, side_tri = (v4, v5), sp.p_half          # breach leans +1
        other_pair, other_tri = (v2, v3), sp.n_half
        lean = shift_colour(i, 1)
    else:
        side_pair, side_tri = (v2, v3), sp.n_half
        other_pair, other_tri = (v4, v5), sp.p_half
        lean = shift_colour(i, -1)

    _forced_colour(c, (x1,) + side_pair, i, context + " (swap closure)")
    s1 = sorted(set(side_tri) | set(t))
    _, wit = _expect_alpha_dominated(c, s1, lean, context + " first probe")
    if wit is not None:
        return wit
    _forced_colour(c, (x2, x3, v6), lean, context + " first complement")

    _forced_colour(c, (x1,) + other_pair, i, context + " (swap closure)")
    _forced_colour(c, (x2, x3, other_pair[1]), i, context + " (swap closure)")
    s2 = sorted(set(t) | set(other_tri))
    _, wit = _expect_alpha_dominated(c, s2, lean, context + " second probe")
    if wit is not None:
        return wit
    z = tuple(sorted({x1, other_pair[0], v6}))
    _forced_colour(c, z, lean, context + " second complement")

    s3 = sorted(set(sp.core) | {x1})
    _, wit = _expect_alpha_dominated(c, s3, i, context + " third probe")
    if wit is not None:
        return wit
    closer = tuple(sorted(set(s3) - set(z)))
    _forced_colour(c, closer, i, context + " third complement")

    hat_half = tuple(sorted((x1,) + side_pair))
    leftover_half = tuple(sorted((other_pair[0], other_pair[1], v6)))
    if lean == shift_colour(i, 1):
        plus = Splitting(closer, z)
        minus = Splitting(hat_half, leftover_half)
    else:
        plus = Splitting(hat_half, leftover_half)
        minus = Splitting(closer, z)
    dom = tuple(sorted(set(plus.first) & set(minus.first)))
    upgraded = SpreadInfo(colour=i, plus_split=plus, minus_split=minus,
                          level=len(dom), dominating=dom,
                          core=tuple(v for v in sorted(s3) if v not in dom))
    verify_spread(c, upgraded)
    if upgraded.level != 2:
        raise FaithfulnessError(f"{context}: breach chain built level "
                                f"{upgraded.level}, wanted 2")
    return Witness(LEVEL_UPGRADE, tuple(sorted(s3)), spread=upgraded,
                   context=context)


def proc_two_spreads(st: SolveState, a1: SpreadInfo, a2: SpreadInfo
                     ) -> Union[Matching, Witness]:
    """Two disjoint spreads of consecutive colours carve the active set in two.

    Grows one hat per spread over every remaining vertex; a vertex neither
    hat accepts certifies a universal 13-set.  Full coverage leaves two
    monochromatic cliques that merge into a near-perfect matching, topped up
    with one demonstration half from each spread.
    """
    c = st.colouring
    i1, i2 = a1.colour, a2.colour
    if shift_colour(i1, 1) != i2:
        raise ValueError(f"spread pair must have consecutive colours, got {i1},{i2}")
    if set(a1.vertices) & set(a2.vertices):
        raise ValueError("spread pair must be disjoint")
    spreads = (a1, a2)
    hats = [sorted(a1.dominating), sorted(a2.dominating)]
    blocked = set(a1.vertices) | set(a2.vertices)
    for w in st.active:
        if w in blocked:
            continue
        for side in (0, 1):
            if _addable_to_hat(c, w, hats[side], spreads[side]):
                hats[side].append(w)
                hats[side].sort()
                break
        else:
            return _stuck_thirteen(c, w, hats, spreads)

    u_set = sorted(set(hats[0]) | set(a1.q_half))
    w_set = sorted(set(hats[1]) | set(a2.r_half))
    for verts, sp, hat in ((u_set, a1, hats[0]), (w_set, a2, hats[1])):
        offender = is_clique(c, verts, sp.colour)
        if offender is None:
            continue
        if sp.level == 1 and set(offender) <= set(hat):
            return _level1_breach_chain(
                c, sp, offender,
                context=f"colour-{sp.colour} clique breach {offender}")
        raise FaithfulnessError(
            f"swap closure guarantees triple {offender} in colour {sp.colour}, "
            f"level {sp.level}")

    merged = cliques2matching(c, u_set, w_set, (i1, i2))
    if isinstance(merged, Witness):
        return merged
    _forced_colour(c, a1.p_half, i2, "cross half of the first spread")
    _forced_colour(c, a2.n_half, i1, "cross half of the second spread")
    st.trace.emit("CLIQUE_MERGE", u=list(u_set), w=list(w_set),
                  colours=[i1, i2],
                  extras=[list(a1.p_half), list(a2.n_half)])
    avoided = shift_colour(i2, 1)
    total = Matching.of(merged.triples + (a1.p_half, a2.n_half), avoided=avoided)
    if total.size != near_perfect_size(len(st.active)):
        raise FaithfulnessError(
            f"two-spread assembly reached {total.size} triples, wanted "
            f"{near_perfect_size(len(st.active))}")
    return total


def cliques2matching(c: Colouring, u: Sequence[int], w: Sequence[int],
                     colours: tuple[int, int]) -> Union[Matching, Witness]:
    """Near-perfect matching of two disjoint monochromatic cliques.

    Residues 2+1 or 2+2 need one cross triple with two vertices on the
    residue-2 side; if no such triple carries either clique colour, six of
    the involved vertices form a universal sextuple instead.
    """
    cu, cw = colours
    u = sorted(set(u))
    w = sorted(set(w))
    if len(u) < 3 or len(w) < 3:
        raise ValueError("both cliques need at least 3 vertices")
    if set(u) & set(w):
        raise ValueError("cliques must be disjoint")

    def partition(verts: Sequence[int], colour: int) -> tuple[Triple, ...]:
        got = greedy_matching(c, verts, {colour})
        if got.size != len(verts) // 3:
            raise FaithfulnessError(
                f"clique partition of {len(verts)} vertices in colour {colour} "
                f"stalled at {got.size} triples")
        return got.triples

    if len(u) % 3 + len(w) % 3 <= 2:
        triples = partition(u, cu) + partition(w, cw)
        return Matching.of(triples)

    if len(u) % 3 == 2:
        xs, os_, cx, co = u, w, cu, cw
    else:
        xs, os_, cx, co = w, u, cw, cu
    cross: Optional[Triple] = None
    for a, b in combinations(xs, 2):
        for o in os_:
            t = tuple(sorted((a, b, o)))
            if c.colour(t) in (cu, cw):
                if cross is None or t[::-1] < cross[::-1]:
                    cross = t
    if cross is None:
        return _no_cross_universal(c, xs, os_, cx, co)
    u2 = [v for v in u if v not in cross]
    w2 = [v for v in w if v not in cross]
    triples = partition(u2, cu) + partition(w2, cw) + (cross,)
    got = Matching.of(triples)
    if got.size != (len(u) + len(w)) // 3:
        raise FaithfulnessError("cross merge lost a triple")
    return got


def _no_cross_universal(c: Colouring, xs: Sequence[int], os_: Sequence[int],
                        cx: int, co: int) -> Witness:
    # With every 2+1 cross triple in the third colour, four low vertices of
    # the residue-2 side and two of the other pin the third-colour forcing,
    # and swapping in a third outside vertex completes a universal sextuple.
    third = 6 - cx - co
    x1, x2, x3, x4 = xs[:4]
    o1, o2, o3 = os_[:3]
    probe = sorted((x1, x2, x3, x4, o1, o2))
    cls = classify_sextuple(c, probe)
    context = (f"cliques without a cross triple in colours {cx},{co}")
    if cls.universal:
        return Witness(UNIVERSAL6, tuple(probe), universal_matchings(cls),
                       context=context)
    if third not in cls.dominated:
        raise FaithfulnessError(
            f"{context}: probe {probe} dominated in {sorted(cls.dominated)}")
    _forced_colour(c, (x2, x3, x4), cx, context)
    _forced_colour(c, (x1, o1, o2), third, context)
    six = tuple(sorted((x1, x2, x3, o1, o2, o3)))
    halves = {
        third: ((x1, x2, x3), (o1, o2, o3)),
        cx: (tuple(sorted((x2, x3, o3))), (x1, o1, o2)),
        co: (tuple(sorted((x2, x3, o3))), (x1, o1, o2)),
    }
    _forced_colour(c, (x1, x2, x3), cx, context)
    _forced_colour(c, (o1, o2, o3), co, context)
    _forced_colour(c, halves[cx][0], third, context)
    ms = tuple(Matching.of(halves[g], avoided=g) for g in COLOURS)
    return Witness(UNIVERSAL6, six, ms, context=context)


# ---------------------------------------------------------------------------
# Case: all spreads share one colour.

@dataclass
class _Census:
    per: dict[int, list[Triple]]
    pair_low: dict[int, dict[tuple[int, int], int]]
    vert_low: dict[int, dict[int, Triple]]
    colour_of: dict[Triple, int]


def _census(c: Colouring, verts: Sequence[int]) -> _Census:
    per: dict[int, list[Triple]] = {a: [] for a in COLOURS}
    pair_low: dict[int, dict[tuple[int, int], int]] = {a: {} for a in COLOURS}
    vert_low: dict[int, dict[int, Triple]] = {a: {} for a in COLOURS}
    colour_of: dict[Triple, int] = {}
    rows, cols = _triple_rows(c, verts)
    for t, a in zip(rows, cols):
        per[a].append(t)
        colour_of[t] = a
        x, y, z = t
        for p, extra in (((x, y), z), ((x, z), y), ((y, z), x)):
            if p not in pair_low[a]:
                pair_low[a][p] = extra
        for v in t:
            vert_low[a].setdefault(v, t)
    return _Census(per, pair_low, vert_low, colour_of)


def _covered_config(cen: _Census, alpha: int
                    ) -> Optional[tuple[Triple, Triple, Triple, int, int, int]]:
    """Lowest alpha-triple covered by one triple of each other colour.

    Returns (A, B, C, beta, gamma, v1) where B shares a pair with A in colour
    beta and C holds the leftover vertex v1 in colour gamma.
    """
    orients = ((shift_colour(alpha, 1), shift_colour(alpha, -1)),
               (shift_colour(alpha, -1), shift_colour(alpha, 1)))
    for a_t in cen.per[alpha]:
        pairs = ((a_t[0], a_t[1]), (a_t[0], a_t[2]), (a_t[1], a_t[2]))
        leftovers = (a_t[2], a_t[1], a_t[0])
        for p, v1 in zip(pairs, leftovers):
            for beta, gamma in orients:
                x = cen.pair_low[beta].get(p)
                if x is None:
                    continue
                c_t = cen.vert_low[gamma].get(v1)
                if c_t is None:
                    continue
                b_t = tuple(sorted(p + (x,)))
                return a_t, b_t, c_t, beta, gamma, v1
    return None


def _outside_offender(c: Colouring, offender: Triple, alpha: int,
                      mate: Triple, link: Sequence[int], probe: Sequence[int],
                      context: str) -> Witness:
    """Escalate a non-alpha triple found outside a covered gadget.

    The gadget argument forces the link triple (inside offender + mate) to
    alpha; granted that, offender + mate is a 3-coloured sextuple with an
    alpha-free splitting.  If the link check fails instead, the same holds
    for the probe sextuple around the gadget.  Either way escalation cannot
    miss.
    """
    link = tuple(sorted(link))
    if c.colour(link) != alpha:
        return _escalate_from_pair(c, probe, alpha,
                                   context + f" link {link} not alpha")
    return _escalate_from_pair(c, sorted(set(offender) | set(mate)), alpha,
                               context + f" offender {offender}")


def _complete_with_forcing(c: Colouring, triples: list[Triple],
                           s_top: Sequence[int], alpha: int,
                           forcing: Sequence[tuple[int, tuple[int, ...]]],
                           avoided: int) -> MatchingAvoiding:
    """Top the matching up with triples led by set-aside forcing vertices."""
    covered = {v for t in triples for v in t}
    pool = sorted(set(s_top) - covered)
    order = [v for v, _ in forcing if v in pool]
    while len(pool) >= 3 and order:
        lead = order.pop(0)
        rest = [v for v in pool if v != lead][:2]
        t = tuple(sorted([lead] + rest))
        _forced_colour(c, t, alpha, f"completion via forcing vertex {lead}")
        triples.append(t)
        pool = [v for v in pool if v not in t]
        order = [v for v in order if v not in t]
    m = Matching.of(triples, avoided=avoided)
    want = near_perfect_size(len(s_top))
    if m.size != want:
        raise FaithfulnessError(
            f"one-spread assembly reached {m.size} triples, wanted {want}")
    return MatchingAvoiding(m, avoided)


def _case_share2(c: Colouring, s_cur: Sequence[int], alpha: int,
                 a_t: Triple, b_t: Triple, c_t: Triple, beta: int, gamma: int
                 ) -> Union[tuple[list[Triple], int], Witness]:
    gadget = sorted(set(a_t) | set(b_t))          # 4 vertices, 3 colours inside
    (v1,) = set(a_t) - set(b_t)                   # also the A-vertex inside C
    (v3,) = (set(a_t) & set(b_t)) - set(c_t)
    outside = [v for v in s_cur if v not in gadget]
    if len(outside) >= 3:
        offender = is_clique(c, outside, alpha)
        if offender is not None:
            d1, d2 = offender[0], offender[1]
            if c.colour(offender) == beta:
                mate, linkv = c_t, v1
            else:
                mate, linkv = b_t, v3
            return _outside_offender(
                c, offender, alpha, mate, (d1, d2, linkv),
                sorted(set(gadget) | {d1, d2}), "4-vertex gadget")
    part = greedy_matching(c, outside, {alpha}).triples
    r = len(s_cur) % 3
    if r in (1, 2):
        return list(part) + [a_t], shift_colour(alpha, 1)
    leftover = sorted(set(outside) - {v for t in part for v in t})
    last = tuple(sorted(leftover + [v1]))
    if c.colour(last) != alpha:
        probe = sorted(set(gadget) | set(leftover))
        _, wit = _expect_alpha_dominated(c, probe, alpha, "gadget pair closure")
        if wit is not None:
            return wit
        raise FaithfulnessError(
            f"triple {last} not alpha although {probe} is alpha-dominated")
    return list(part) + [b_t, last], gamma


def _case_share1(c: Colouring, s_cur: Sequence[int], alpha: int,
                 a_t: Triple, b_t: Triple, c_t: Triple, beta: int, gamma: int
                 ) -> Union[tuple[list[Triple], int], Witness]:
    gadget = sorted(set(a_t) | set(b_t) | set(c_t))   # 5 vertices
    gb = sorted(set(gadget) - set(b_t))               # joins with B missing
    gc = sorted(set(gadget) - set(c_t))
    outside = [v for v in s_cur if v not in gadget]
    if len(outside) >= 3:
        offender = is_clique(c, outside, alpha)
        if offender is not None:
            d1 = offender[0]
            if c.colour(offender) == beta:
                mate, pairv = c_t, gb
            else:
                mate, pairv = b_t, gc
            return _outside_offender(
                c, offender, alpha, mate, (d1,) + tuple(pairv),
                sorted(set(gadget) | {d1}), "5-vertex gadget")
    part = list(greedy_matching(c, outside, {alpha}).triples)
    leftover = sorted(set(outside) - {v for t in part for v in t})

    def forced_join(y: int, pair: Sequence[int]) -> Union[Triple, Witness]:
        t = tuple(sorted([y] + list(pair)))
        if c.colour(t) == alpha:
            return t
        probe = sorted(set(gadget) | {y})
        _, w = _expect_alpha_dominated(c, probe, alpha, "gadget join closure")
        if w is not None:
            return w
        raise FaithfulnessError(
            f"triple {t} not alpha although {probe} is alpha-dominated")

    if not leftover:
        return part + [a_t], shift_colour(alpha, 1)
    if len(leftover) == 1:
        t1 = forced_join(leftover[0], gb)
        if isinstance(t1, Witness):
            return t1
        return part + [t1, b_t], gamma
    t1 = forced_join(leftover[0], gb)
    if isinstance(t1, Witness):
        return t1
    t2 = forced_join(leftover[1], gc)
    if isinstance(t2, Witness):
        return t2
    return part + [t1, t2], shift_colour(alpha, 1)


def _adjacent_mixed_pair(c: Colouring, cen: _Census, verts: Sequence[int],
                         alpha: int) -> tuple[Triple, Triple]:
    """Lowest 4-set holding an alpha triple next to a non-alpha one."""
    for quad in colex_subsets(sorted(verts), 4):
        tris = [tuple(sorted(set(quad) - {d})) for d in reversed(quad)]
        a_t = next((t for t in tris if cen.colour_of[t] == alpha), None)
        b_t = next((t for t in tris if cen.colour_of[t] != alpha), None)
        if a_t is not None and b_t is not None:
            return a_t, b_t
    raise FaithfulnessError(
        "both colour classes present yet no adjacent mixed pair exists")


def _forcing_step(c: Colouring, s_cur: list[int], alpha: int, cen: _Census
                  ) -> Union[tuple[str, object], Witness]:
    """Resolve an adjacent mixed pair into a matching, a forcing vertex, or a witness."""
    a_t, b_t = _adjacent_mixed_pair(c, cen, s_cur, alpha)
    delta = cen.colour_of[b_t]
    deltap = next(a for a in COLOURS if a not in (alpha, delta))
    (v1,) = set(a_t) - set(b_t)
    if cen.vert_low[deltap].get(v1) is not None:
        raise FaithfulnessError(
            f"covered-configuration scan missed a colour-{deltap} triple at {v1}")
    blocked = set(a_t) | set(b_t)
    c_t = next((t for t in cen.per[deltap] if not set(t) & blocked), None)
    if c_t is None:
        # every remaining colour-deltap triple meets B, so B plus any maximal
        # matching beside it stays within two colours
        rest = [v for v in s_cur if v not in b_t]
        m = greedy_matching(c, rest, {alpha, delta})
        if m.size != len(rest) // 3:
            raise FaithfulnessError(
                f"matching beside {b_t} stalled: colour-{deltap} material "
                f"survived where none may exist")
        return "matching", (list(m.triples) + [b_t], deltap)
    x = c_t[0]
    d_t = tuple(sorted((set(a_t) & set(b_t)) | {x}))
    cd = c.colour(d_t)
    if cd == alpha:
        return _escalate_from_pair(c, sorted(set(b_t) | set(c_t)), alpha,
                                   f"covered triple {d_t} coloured {alpha}")
    if cd == delta:
        probe = sorted(set(a_t) | set(c_t))
        _, wit = _expect_alpha_dominated(c, probe, alpha, "forcing probe")
        if wit is not None:
            return wit
        e_t = tuple(sorted(set(probe) - set(d_t)))
        _forced_colour(c, e_t, alpha, "forcing probe complement")
    if not is_forcing(c, s_cur, v1, alpha):
        others = sorted(v for v in s_cur if v != v1)
        offender = next(p for p in sorted(combinations(others, 2),
                                          key=lambda p: p[::-1])
                        if c.colour((v1,) + p) != alpha)
        involved = set(a_t) | set(b_t) | set(c_t) | set(offender) | {v1}
        wit = find_witness(c, sorted(involved), colour_context=alpha)
        if wit is None:
            raise FaithfulnessError(
                f"vertex {v1} fails to force colour {alpha} at "
                f"{tuple(sorted((v1,) + offender))} and the neighbourhood "
                f"offers no witness")
        return wit
    return "forcing", v1


def _remainder_phase(c: Colouring, s_top: Sequence[int], remainder: list[int],
                     alpha: int,
                     forcing: Sequence[tuple[int, tuple[int, ...]]]
                     ) -> OneSpreadOutcome:
    """Alpha-free remainder plus forcing vertices.

    Greedily collects vertex pairs completed in both remaining colours;
    three disjoint ones plus a forcing vertex make a universal 13-set, and
    short of that the uncollected part is one clique to partition.
    """
    beta, gamma = shift_colour(alpha, 1), shift_colour(alpha, -1)
    col = c.colour
    used: set[int] = set()
    pairs: list[tuple[int, int, int, int]] = []       # (a, b, x_beta, y_gamma)
    rem = sorted(remainder)
    for a, b in sorted(combinations(rem, 2), key=lambda p: p[::-1]):
        if a in used or b in used:
            continue
        x = next((v for v in rem if v not in used and v not in (a, b)
                  and col((a, b, v)) == beta), None)
        if x is None:
            continue
        y = next((v for v in rem if v not in used and v not in (a, b, x)
                  and col((a, b, v)) == gamma), None)
        if y is None:
            continue
        pairs.append((a, b, x, y))
        used.update((a, b, x, y))
        if len(pairs) == 3:
            lead = forcing[0][0]
            x13 = sorted({lead} | used)
            ms = check_universal_13(c, x13)
            if ms is None:
                raise FaithfulnessError(
                    f"constructed 13-set {x13} failed the universality census")
            return Escalate(Witness(
                UNIVERSAL13, tuple(x13), ms,
                context="three disjoint mixed pairs beside a forcing vertex"))

    prime = [v for v in rem if v not in used]
    if len(prime) >= 3:
        eps = col(tuple(prime[:3]))
        offender = is_clique(c, prime, eps)
        if offender is not None:
            raise FaithfulnessError(
                f"two-coloured remainder core {prime} is not a clique: "
                f"{offender} breaks colour {eps}")
    else:
        eps = beta
    other = gamma if eps == beta else beta

    eps_triples: list[Triple] = []
    stragglers: list[int] = []
    for a, b, x, y in pairs:
        if eps == beta:
            eps_triples.append(tuple(sorted((a, b, x))))
            stragglers.append(y)
        else:
            eps_triples.append(tuple(sorted((a, b, y))))
            stragglers.append(x)

    lead = forcing[0][0]
    members = [lead] + sorted(stragglers)
    pad: list[int] = []
    for v in prime:
        if len(members) + len(pad) >= 3:
            break
        pad.append(v)
    spare = [v for v, _ in forcing[1:]]
    while len(members) + len(pad) < 3 and spare:
        pad.append(spare.pop(0))
    triples: list[Triple] = []
    if len(members) + len(pad) >= 3:
        t1 = tuple(sorted(members + pad))
        _forced_colour(c, t1, alpha, f"forcing vertex {lead} absorbs stragglers")
        triples.append(t1)
    part = greedy_matching(c, [v for v in prime if v not in pad], {eps})
    if part.size != len([v for v in prime if v not in pad]) // 3:
        raise FaithfulnessError("clique partition of the remainder core stalled")
    triples.extend(eps_triples)
    triples.extend(part.triples)
    return _complete_with_forcing(c, triples, s_top, alpha, forcing, other)


def proc_one_spread(c: Colouring, s: Sequence[int], alpha: int,
                    trace: Optional[Trace] = None) -> OneSpreadOutcome:
    """Matching extraction when every spread in s has colour alpha.

    Loops: a covered configuration resolves into a matching around a 4- or
    5-vertex gadget; otherwise an adjacent mixed pair yields either a
    two-colour matching directly or a vertex all of whose triples are alpha,
    which is set aside.  The loop ends with a matching, an alpha-free
    remainder, or an escalation.
    """
    s_top = sorted(set(s))
    s_cur = list(s_top)
    forcing: list[tuple[int, tuple[int, ...]]] = []
    while True:
        cen = _census(c, s_cur) if len(s_cur) >= 3 else None
        has_alpha = cen is not None and bool(cen.per[alpha])
        has_other = cen is not None and any(
            cen.per[a] for a in COLOURS if a != alpha)
        if not has_alpha:
            if not forcing:
                return NoTriplesOfColour(alpha)
            return _remainder_phase(c, s_top, s_cur, alpha, forcing)
        if not has_other:
            part = greedy_matching(c, s_cur, {alpha})
            if part.size != len(s_cur) // 3:
                raise FaithfulnessError("monochromatic partition stalled")
            return _complete_with_forcing(c, list(part.triples), s_top, alpha,
                                          forcing, shift_colour(alpha, 1))
        cfg = _covered_config(cen, alpha)
        if cfg is not None:
            a_t, b_t, c_t, beta, gamma, v1 = cfg
            if not set(c_t) & set(b_t):
                return Escalate(_escalate_from_pair(
                    c, sorted(set(b_t) | set(c_t)), alpha,
                    f"disjoint covering pair over {a_t}"))
            if len(set(c_t) & set(b_t)) == 2:
                out = _case_share2(c, s_cur, alpha, a_t, b_t, c_t, beta, gamma)
            else:
                out = _case_share1(c, s_cur, alpha, a_t, b_t, c_t, beta, gamma)
            if isinstance(out, Witness):
                return Escalate(out)
            triples, avoided = out
            return _complete_with_forcing(c, triples, s_top, alpha, forcing,
                                          avoided)
        step = _forcing_step(c, s_cur, alpha, cen)
        if isinstance(step, Witness):
            return Escalate(step)
        kind, payload = step
        if kind == "matching":
            triples, avoided = payload
            return _complete_with_forcing(c, triples, s_top, alpha, forcing,
                                          avoided)
        v1 = payload
        forcing.append((v1, tuple(s_cur)))
        if trace is not None:
            trace.emit("FORCING", vertex=v1, colour=alpha, scope=list(s_cur))
        s_cur = [v for v in s_cur if v != v1]


# ---------------------------------------------------------------------------
# Case: two intersecting spread colours (endgame).

def _best_mono(c: Colouring, verts: Sequence[int], pair: Sequence[int]
               ) -> tuple[Matching, int]:
    best: Optional[Matching] = None
    best_col = 0
    for colx in sorted(pair):
        res = max_matching_in_colours(c, verts, {colx})
        if best is None or res.size > best.size:
            best, best_col = res.matching, colx
    return best, best_col


def endgame(st: SolveState, u: SpreadInfo, w: SpreadInfo) -> Matching:
    """Strategies for intersecting spreads once both side calls say no-triples.

    Everything outside the two sextuples is a clique in the third colour;
    a maximal third-colour matching leaves at most 10 vertices, and the
    first strategy that reaches the bound wins.
    """
    c = st.colouring
    active = st.active
    cu, cw = u.colour, w.colour
    tau = 6 - cu - cw
    u_set, w_set = set(u.vertices), set(w.vertices)
    if not u_set & w_set:
        raise ValueError("endgame needs intersecting spreads")
    outside = [v for v in active if v not in u_set | w_set]
    if len(outside) >= 3:
        offender = is_clique(c, outside, tau)
        if offender is not None:
            raise FaithfulnessError(
                f"outside triple {offender} dodges colour {tau} although both "
                f"side scans returned no-triples")

    part = greedy_matching(c, outside, {tau})
    rem = [v for v in active if v not in part.vertices]
    ext = greedy_matching(c, rem, {tau})
    m3 = list(part.triples) + list(ext.triples)
    covered = {v for t in m3 for v in t}
    leftover = [v for v in active if v not in covered]
    if len(leftover) > 10:
        raise FaithfulnessError(
            f"maximal colour-{tau} matching left {len(leftover)} vertices")
    for t in colex_subsets(leftover, 3):
        if c.colour(t) == tau:
            raise FaithfulnessError(
                f"leftover triple {t} has colour {tau} beside a maximal matching")
    target = m_bound(len(active))

    # s1: swap two clique leftovers into the sextuple zone.
    exhausted = True
    zone = sorted(u_set | w_set)
    for a, b in sorted(combinations(outside, 2), key=lambda p: p[::-1]):
        local = sorted(set(zone) | {a, b})
        taus = [t for t in colex_subsets(local, 3) if c.colour(t) == tau]
        found = next(((t1, t2) for i, t1 in enumerate(taus)
                      for t2 in taus[i + 1:] if not set(t1) & set(t2)), None)
        if found is None:
            continue
        exhausted = False
        part1 = greedy_matching(c, [v for v in outside if v not in (a, b)], {tau})
        base = list(part1.triples) + list(found)
        cov = {v for t in base for v in t}
        ext1 = greedy_matching(c, [v for v in active if v not in cov], {tau})
        base += list(ext1.triples)
        cov = {v for t in base for v in t}
        l1 = [v for v in active if v not in cov]
        mono, mcol = _best_mono(c, l1, (cu, cw))
        total = len(base) + mono.size
        st.trace.emit("ENDGAME_STRATEGY", strategy="s1", total=total,
                      target=target, chosen=total >= target)
        if total >= target:
            avoided = cu + cw - mcol
            return Matching.of(base + list(mono.triples), avoided=avoided)

    # s2: small active sets go to the exact searchers.
    if len(active) == 12:
        got = perfect_two_coloured_12(c, active)
        st.trace.emit("ENDGAME_STRATEGY", strategy="s2", total=got.size,
                      target=target, chosen=True)
        return got
    if len(active) <= 13:
        pair, res = max_two_coloured(c, active)
        st.trace.emit("ENDGAME_STRATEGY", strategy="s2", total=res.size,
                      target=target, chosen=res.exact and res.size >= target)
        if res.exact and res.size >= target:
            avoided = min(set(COLOURS) - pair)
            return Matching.of(res.matching.triples, avoided=avoided)

    # s3: keep the third-colour matching, solve the leftover exactly.
    mono, mcol = _best_mono(c, leftover, (cu, cw))
    total = len(m3) + mono.size
    st.trace.emit("ENDGAME_STRATEGY", strategy="s3", total=total,
                  target=target, chosen=total >= target)
    if total >= target:
        avoided = cu + cw - mcol
        return Matching.of(m3 + list(mono.triples), avoided=avoided)

    # s4: cover side and outside vertices by mixed triples, which all carry
    # the two spread colours once s1 is exhausted.
    if len(outside) >= 2 and exhausted:
        got = _mixed_cover(c, st, u, w, outside, target)
        if got is not None:
            return got

    raise FaithfulnessError(
        f"every endgame strategy stayed below {target} on {len(active)} vertices")


def _mixed_cover(c: Colouring, st: SolveState, u: SpreadInfo, w: SpreadInfo,
                 outside: Sequence[int], target: int) -> Optional[Matching]:
    cu, cw = u.colour, w.colour
    tau = 6 - cu - cw
    side_u = sorted(set(u.vertices) - set(w.vertices))
    side_w = sorted(set(w.vertices) - set(u.vertices))
    bases: list[tuple[str, tuple[Triple, ...], frozenset[int]]] = [
        ("none", (), frozenset())]
    for tag, sp in (("u", u), ("w", w)):
        pair = _avoid_splitting(sp, tau)
        bases.append((tag, pair, frozenset(sp.vertices)))

    best = None
    for b_idx, (tag, pair, covered) in enumerate(bases):
        su = [v for v in side_u if v not in covered]
        sw = [v for v in side_w if v not in covered]
        for x_u in range(len(su) + 1):
            for y_u in range((len(su) - x_u) // 2 + 1):
                for x_w in range(len(sw) + 1):
                    for y_w in range((len(sw) - x_w) // 2 + 1):
                        if 2 * (x_u + x_w) + y_u + y_w > len(outside):
                            continue
                        score = len(pair) + x_u + y_u + x_w + y_w
                        key = (-score, b_idx, x_u, y_u, x_w, y_w)
                        if best is None or key < best[0]:
                            best = (key, b_idx, (x_u, y_u, x_w, y_w))
    if best is None:
        return None
    (_, b_idx, counts) = best
    score = -best[0][0]
    st.trace.emit("ENDGAME_STRATEGY", strategy="s4", total=score,
                  target=target, chosen=score >= target)
    if score < target:
        return None
    tag, pair, covered = bases[b_idx]
    x_u, y_u, x_w, y_w = counts
    triples: list[Triple] = []
    for t in pair:
        if c.colour(t) not in (cu, cw):
            raise FaithfulnessError(f"base splitting triple {t} leaves {cu},{cw}")
        triples.append(t)
    o_it = iter(outside)
    for side, x_n, y_n in ((sorted(set(side_u) - covered), x_u, y_u),
                           (sorted(set(side_w) - covered), x_w, y_w)):
        s_it = iter(side)
        for _ in range(x_n):
            t = tuple(sorted((next(s_it), next(o_it), next(o_it))))
            if c.colour(t) not in (cu, cw):
                raise FaithfulnessError(
                    f"mixed triple {t} leaves colours {cu},{cw} although the "
                    f"swap search was exhausted")
            triples.append(t)
        for _ in range(y_n):
            t = tuple(sorted((next(s_it), next(s_it), next(o_it))))
            if c.colour(t) not in (cu, cw):
                raise FaithfulnessError(
                    f"mixed triple {t} leaves colours {cu},{cw} although the "
                    f"swap search was exhausted")
            triples.append(t)
    return Matching.of(triples, avoided=tau)


def _endgame_route(st: SolveState, u: SpreadInfo, w: SpreadInfo
                   ) -> Union[Matching, Witness]:
    """Side calls first; only double no-triples reaches the strategy list."""
    c = st.colouring
    for sp in (u, w):
        side = [v for v in st.active if v not in set(sp.vertices)]
        out = proc_one_spread(c, side, sp.colour, trace=st.trace)
        if isinstance(out, Escalate):
            return out.witness
        if isinstance(out, MatchingAvoiding):
            extra = _avoid_splitting(sp, out.avoided)
            for t in extra:
                if c.colour(t) == out.avoided:
                    raise FaithfulnessError(
                        f"splitting half {t} carries the avoided colour")
            total = Matching.of(out.matching.triples + extra,
                                avoided=out.avoided)
            if total.size != near_perfect_size(len(st.active)):
                raise FaithfulnessError("side matching plus splitting fell short")
            return total
        # NoTriplesOfColour: the sextuple really does meet every triple of
        # its colour; try the other side, then the strategies.
    return endgame(st, u, w)


# ---------------------------------------------------------------------------
# Dispatch loop, assembly, solve.

def _pick_spread(c: Colouring, flags, exclude_colour: Optional[int]
                 ) -> Optional[SpreadInfo]:
    spread = flags.spread.copy()
    level2 = flags.level2.copy()
    if exclude_colour is not None:
        spread[exclude_colour - 1] = False
        level2[exclude_colour - 1] = False
    if not spread.any():
        return None
    # level-2 spreads keep the restart measure strictly decreasing, so they
    # win over level-1 ones before colex position breaks the tie
    masks = level2 if level2.any() else spread
    rows = masks.any(axis=0)
    row = int(np.argmax(rows))
    six = tuple(int(v) for v in flags.subs[row])
    colour = next(a for a in COLOURS if masks[a - 1, row])
    cls = classify_sextuple(c, six)
    return next(s for s in cls.spreads if s.colour == colour)


def _orient_pair(a: SpreadInfo, b: SpreadInfo) -> tuple[SpreadInfo, SpreadInfo]:
    return (a, b) if shift_colour(a.colour, 1) == b.colour else (b, a)


def _route(st: SolveState, hint: Optional[tuple[SpreadInfo, SpreadInfo]]):
    c = st.colouring
    active = set(st.active)
    if hint is not None:
        a, b = hint
        for sp in (a, b):
            verify_spread(c, sp)
            if not set(sp.vertices) <= active:
                raise FaithfulnessError(f"hinted spread {sp.vertices} left the "
                                        f"active set")
        if set(a.vertices) & set(b.vertices) or a.colour == b.colour:
            raise FaithfulnessError("hinted spread pair is not a disjoint "
                                    "two-colour pair")
        return "two_spreads", _orient_pair(a, b)
    flags = bulk_sextuple_flags(c, st.active)
    if flags.universal.any():
        row = int(np.argmax(flags.universal))
        raise FaithfulnessError(
            f"universal sextuple {flags.subs[row].tolist()} survived peeling")
    if not flags.spread.any():
        return "no_spreads", None
    u = _pick_spread(c, flags, None)
    rest = [v for v in st.active if v not in set(u.vertices)]
    if len(rest) >= 6:
        partner = _pick_spread(c, bulk_sextuple_flags(c, rest), u.colour)
        if partner is not None:
            return "two_spreads", _orient_pair(u, partner)
    partner = _pick_spread(c, flags, u.colour)
    if partner is not None:
        return "endgame", (u, partner)
    return "one_spread", u


def _payload_summary(route: str, payload) -> dict:
    if route == "two_spreads":
        return {"spreads": [_sp(sp) for sp in payload]}
    if route == "endgame":
        return {"spreads": [_sp(sp) for sp in payload]}
    if route == "one_spread":
        return {"spreads": [_sp(payload)]}
    return {}


def _deficit(route: str, payload) -> int:
    if route == "two_spreads":
        return 2 - sum(1 for sp in payload if sp.level == 2)
    return 2


def dispatch(st: SolveState) -> tuple[Matching, Trace]:
    """Route on the spread inventory until a case returns a core matching."""
    c = st.colouring
    hint: Optional[tuple[SpreadInfo, SpreadInfo]] = None
    restarts = 0
    cap = c.n + 2

    def enter(route: str, payload) -> None:
        nonlocal restarts
        measure = (len(st.active), _deficit(route, payload), _RANK[route])
        if st.restart_measure is not None and measure >= st.restart_measure:
            raise FaithfulnessError(
                f"restart measure failed to decrease: {st.restart_measure} -> "
                f"{measure}")
        st.restart_measure = measure
        st.trace.emit("CASE_ENTER", case=route, active=len(st.active),
                      measure=list(measure), **_payload_summary(route, payload))

    while True:
        if len(st.active) < 9:
            enter("trivial", None)
            m = greedy_matching(c, st.active, COLOURS)
            core = Matching.of(m.triples, avoided=_smallest_unused(c, m))
            return core, st.trace
        route, payload = _route(st, hint)
        hint = None
        enter(route, payload)
        if route == "no_spreads":
            return case_no_spreads(st), st.trace

        if route == "one_spread":
            out = proc_one_spread(c, st.active, payload.colour, trace=st.trace)
            if isinstance(out, MatchingAvoiding):
                return out.matching, st.trace
            if isinstance(out, NoTriplesOfColour):
                raise FaithfulnessError(
                    f"one-spread case reported no colour-{out.colour} triples "
                    f"although the chosen spread provides one")
            wit = out.witness
        elif route == "two_spreads":
            res = proc_two_spreads(st, *payload)
            if isinstance(res, Matching):
                return res, st.trace
            wit = res
        else:
            res = _endgame_route(st, *payload)
            if isinstance(res, Matching):
                return res, st.trace
            wit = res

        verify_witness(c, wit)
        ev = {"kind": wit.kind, "vertices": sorted(wit.vertices),
              "context": wit.context}
        if wit.matchings:
            ev["matchings"] = [_mp(m) for m in wit.matchings]
        if wit.spread is not None:
            ev["spread"] = _sp(wit.spread)
        st.trace.emit("WITNESS", **ev)

        if wit.kind in (UNIVERSAL6, UNIVERSAL13):
            entry = (tuple(sorted(wit.vertices)), wit.matchings)
            if wit.kind == UNIVERSAL6:
                st.peeled6.append(entry)
                st.trace.emit("PEEL6", vertices=sorted(wit.vertices),
                              matchings=[_mp(m) for m in wit.matchings])
            else:
                st.peeled13.append(entry)
                st.trace.emit("PEEL13", vertices=sorted(wit.vertices),
                              matchings=[_mp(m) for m in wit.matchings])
            drop = set(wit.vertices)
            st.active = [v for v in st.active if v not in drop]
        elif wit.kind == LEVEL_UPGRADE:
            if route != "two_spreads":
                raise FaithfulnessError("level upgrade outside the two-spread case")
            a1, a2 = payload
            other = a2 if wit.spread.colour == a1.colour else a1
            hint = (wit.spread, other)
        elif wit.kind == FOREIGN_SPREAD:
            refs = list(payload) if route == "endgame" else \
                ([payload] if route == "one_spread" else [])
            mate = next((sp for sp in refs
                         if sp.colour != wit.spread.colour
                         and not set(sp.vertices) & set(wit.spread.vertices)),
                        None)
            if mate is None:
                raise FaithfulnessError(
                    f"foreign spread {wit.spread.vertices} cannot pair with "
                    f"the case spreads")
            hint = (wit.spread, mate)
        else:
            raise FaithfulnessError(f"unroutable witness kind {wit.kind}")

        restarts += 1
        if restarts > cap:
            raise FaithfulnessError(f"restart budget {cap} exhausted")
        st.trace.emit("RESTART", reason=wit.kind, restarts=restarts,
                      active=len(st.active))


def assemble(st: SolveState, core: Matching, avoided: int) -> Matching:
    """Append each peeled set's stored matching that avoids the core's colour."""
    triples = list(core.triples)
    for verts, ms in st.peeled6 + st.peeled13:
        m = ms[avoided - 1]
        if m.avoided != avoided:
            raise FaithfulnessError("peeled matchings are out of colour order")
        triples.extend(m.triples)
    return Matching.of(triples, avoided=avoided)


def solve(c: Colouring) -> tuple[Matching, Trace]:
    """Extract a 2-coloured matching of size at least m_bound(n)."""
    st = SolveState(colouring=c, active=list(range(c.n)))
    peel_phase(st)
    core, trace = dispatch(st)
    avoided = core.avoided
    if avoided is None:
        avoided = _smallest_unused(c, core)
    final = assemble(st, core, avoided)
    report = verify_matching(c, final, min_size=m_bound(c.n))
    if not report.valid:
        raise FaithfulnessError(
            f"final verification failed: {report.violations}")
    trace.emit("RESULT", size=final.size, avoided=avoided,
               colours=sorted(report.colours_used),
               matching=[list(t) for t in final.triples])
    return final, trace


# ---------------------------------------------------------------------------
# Trace replay.

def replay_trace(c: Colouring, trace: Union[Trace, Sequence[dict]]) -> int:
    """Re-validate every colour assertion a trace records; return the count."""
    events = trace.events if isinstance(trace, Trace) else list(trace)
    checks = 0

    def check_matchings(ev: dict, want_size: int) -> int:
        done = 0
        verts = set(ev["vertices"])
        for g, mp in zip(COLOURS, ev["matchings"]):
            m = Matching.of([tuple(t) for t in mp["triples"]],
                            avoided=mp["avoided"])
            if m.avoided != g:
                raise FaithfulnessError(f"avoid matchings out of order: {ev}")
            if not m.vertices <= verts:
                raise FaithfulnessError(f"matching leaves its vertex set: {ev}")
            rep = verify_matching(c, m, want_size)
            if not rep.valid:
                raise FaithfulnessError(f"recorded matching fails: {rep.violations}")
            done += 1
        return done

    for ev in events:
        kind = ev["event"]
        if kind == "PEEL6":
            checks += check_matchings(ev, 2)
        elif kind == "PEEL13":
            checks += check_matchings(ev, 4)
        elif kind == "WITNESS":
            if "matchings" in ev:
                want = 2 if len(ev["vertices"]) == 6 else 4
                checks += check_matchings(ev, want)
            if "spread" in ev:
                sp = ev["spread"]
                for half, want in (("m_plus", sp["colour"]),
                                   ("m_minus", sp["colour"]),
                                   ("p_half", shift_colour(sp["colour"], 1)),
                                   ("n_half", shift_colour(sp["colour"], -1))):
                    if c.colour(tuple(sp[half])) != want:
                        raise FaithfulnessError(
                            f"recorded spread half {half} contradicts the "
                            f"colouring: {sp}")
                    checks += 1
        elif kind == "FORCING":
            if not is_forcing(c, ev["scope"], ev["vertex"], ev["colour"]):
                raise FaithfulnessError(f"recorded forcing vertex fails: {ev}")
            checks += 1
        elif kind == "CLIQUE_MERGE":
            for key, colour in (("u", ev["colours"][0]), ("w", ev["colours"][1])):
                if is_clique(c, ev[key], colour) is not None:
                    raise FaithfulnessError(f"recorded clique breaks: {ev}")
                checks += 1
        elif kind == "RESULT":
            m = Matching.of([tuple(t) for t in ev["matching"]],
                            avoided=ev["avoided"])
            rep = verify_matching(c, m, m_bound(c.n))
            if not rep.valid:
                raise FaithfulnessError(f"recorded result fails: {rep.violations}")
            checks += 1
    return checks
