"""Exact reference solvers.

The matching maximizer is a memoized branch-and-bound over vertex bitmasks.
It is meant for small windows (exact within seconds up to ~18 vertices); a
node budget guards larger calls and flips the result to a greedy fallback
marked inexact rather than hanging.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .errors import FaithfulnessError, WitnessError
from .model import (COLOURS, Colouring, Matching, greedy_matching, rank_rows,
                    triple_table)
from .structure import (check_universal_13, classify_sextuple,
                        perfect_matching_patterns_12, universal_matchings)

DEFAULT_BUDGET = 10 ** 8


@dataclass(frozen=True)
class OracleResult:
    matching: Matching
    exact: bool
    explored: int
    budget_hit: bool

    @property
    def size(self) -> int:
        return self.matching.size


class _BudgetExceeded(Exception):
    pass


def max_matching_in_colours(c: Colouring, vertices: Sequence[int],
                            allowed: Sequence[int],
                            budget: Optional[int] = None) -> OracleResult:
    """Maximum matching using only the allowed colours, by exact search.

    Branches on the lowest uncovered vertex: cover it with each allowed triple
    through it (partner pairs in colex order) or leave it uncovered.  States
    are memoized on the uncovered-vertex bitmask; explored counts memo misses.
    Pruning: a state cannot beat floor(uncovered/3).
    """
    allowed_set = frozenset(allowed)
    if not allowed_set or not allowed_set <= set(COLOURS):
        raise ValueError(f"allowed colours must be a nonempty subset of 1..3: {allowed}")
    budget = DEFAULT_BUDGET if budget is None else budget
    verts = sorted(set(vertices))
    nv = len(verts)
    if nv < 3:
        return OracleResult(Matching(()), True, 0, False)

    varr = np.asarray(verts, dtype=np.int32)
    cols = c.table[rank_rows(varr[triple_table(nv)], c.n)]
    c2 = [j * (j - 1) // 2 for j in range(nv)]
    c3 = [k * (k - 1) * (k - 2) // 6 for k in range(nv)]
    ok = [col in allowed_set for col in cols.tolist()]

    memo: dict[int, int] = {}
    explored = 0

    def best_of(mask: int) -> int:
        nonlocal explored
        if mask == 0:
            return 0
        hit = memo.get(mask)
        if hit is not None:
            return hit
        explored += 1
        if explored > budget:
            raise _BudgetExceeded
        members = []
        m = mask
        while m:
            low = m & -m
            members.append(low.bit_length() - 1)
            m ^= low
        ub = len(members) // 3
        v = members[0]
        best = 0
        if ub:
            for bi in range(2, len(members)):
                b = members[bi]
                for ai in range(1, bi):
                    a = members[ai]
                    if ok[v + c2[a] + c3[b]]:
                        got = 1 + best_of(mask & ~((1 << v) | (1 << a) | (1 << b)))
                        if got > best:
                            best = got
                            if best == ub:
                                memo[mask] = best
                                return best
        skipped = best_of(mask & ~(1 << v))
        if skipped > best:
            best = skipped
        memo[mask] = best
        return best

    full = (1 << nv) - 1
    try:
        top = best_of(full)
    except _BudgetExceeded:
        fallback = greedy_matching(c, verts, allowed_set)
        return OracleResult(Matching(fallback.triples), False, explored, True)

    # walk the memo table back into an explicit matching, triples first
    triples = []
    mask = full
    while mask and best_of(mask) > 0:
        members = [i for i in range(nv) if mask >> i & 1]
        v = members[0]
        want = best_of(mask)
        chosen = None
        for bi in range(2, len(members)):
            b = members[bi]
            for ai in range(1, bi):
                a = members[ai]
                if ok[v + c2[a] + c3[b]]:
                    rest = mask & ~((1 << v) | (1 << a) | (1 << b))
                    if 1 + best_of(rest) == want:
                        chosen = (v, a, b)
                        break
            if chosen:
                break
        if chosen is None:
            mask &= ~(1 << v)
            continue
        triples.append(tuple(verts[i] for i in chosen))
        mask &= ~sum(1 << i for i in chosen)
    assert len(triples) == top
    return OracleResult(Matching.of(triples), True, explored, False)


def max_two_coloured(c: Colouring, vertices: Sequence[int],
                     budget: Optional[int] = None
                     ) -> tuple[frozenset[int], OracleResult]:
    """Best matching over the three colour pairs; ties go to the smallest pair."""
    best_pair, best = None, None
    all_exact, any_budget, explored = True, False, 0
    for pair in combinations(COLOURS, 2):
        res = max_matching_in_colours(c, vertices, pair, budget)
        explored += res.explored
        all_exact &= res.exact
        any_budget |= res.budget_hit
        if best is None or res.size > best.size:
            best_pair, best = frozenset(pair), res
    return best_pair, OracleResult(best.matching, all_exact, explored, any_budget)


def largest_mono_matching(c: Colouring, vertices: Sequence[int]) -> Matching:
    """Largest monochromatic matching of a set whose triples use ≤ 2 colours.

    The interesting guarantee (size at least floor((|S|+1)/4), e.g. one triple
    from 3 vertices, two from 7) belongs to the tests; here we just find the
    exact per-colour maximum and reject 3-coloured inputs.
    """
    verts = sorted(set(vertices))
    present = {c.colour(t) for t in combinations(verts, 3)}
    if len(present) > 2:
        raise ValueError(f"input uses all three colours: {sorted(present)}")
    best = Matching(())
    for colour in sorted(present):
        res = max_matching_in_colours(c, verts, {colour})
        if res.size > best.size:
            best = res.matching
    return best


def perfect_two_coloured_12(c: Colouring, vertices: Sequence[int]) -> Matching:
    """Perfect matching of 12 vertices using at most 2 colours.

    Checks all 15400 partitions into 4 triples and returns the first that
    qualifies.  One always exists; if none is found the colour table itself
    is inconsistent, which is an implementation bug, not an instance property.
    """
    verts = np.asarray(sorted(set(vertices)), dtype=np.int32)
    if verts.shape != (12,):
        raise ValueError(f"need exactly 12 distinct vertices, got {len(verts)}")
    pm = perfect_matching_patterns_12()
    assert pm.shape[0] == 15400
    packs = verts[pm]
    cols = c.table[rank_rows(packs, c.n)]
    used = np.stack([(cols == a).any(axis=1) for a in COLOURS])
    good = used.sum(axis=0) <= 2
    idx = int(np.argmax(good))
    if not good[idx]:
        raise FaithfulnessError(
            f"no 2-colour perfect matching among 15400 candidates on {verts.tolist()}")
    triples = [tuple(int(v) for v in row) for row in packs[idx]]
    missing = [a for a in COLOURS if not used[a - 1, idx]]
    return Matching.of(triples, avoided=min(missing))


def pair_avoiding_matchings(c: Colouring, s: Sequence[int]
                            ) -> tuple[Matching, Matching, Matching]:
    """The three per-colour avoiding matchings of a universal 6- or 13-set."""
    verts = sorted(set(s))
    if len(verts) == 6:
        cls = classify_sextuple(c, verts)
        if not cls.universal:
            raise WitnessError(f"sextuple {verts} is not universal: "
                               f"dominated by {sorted(cls.dominated)}")
        return universal_matchings(cls)
    if len(verts) == 13:
        ms = check_universal_13(c, verts)
        if ms is None:
            raise WitnessError(f"13-set {verts} is not universal")
        return ms
    raise ValueError(f"universal sets have 6 or 13 vertices, got {len(verts)}")
