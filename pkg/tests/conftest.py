"""Shared helpers: an independent brute-force maximum and crafted colourings.

The brute force here is deliberately naive (plain recursion, no masks, no
memo) so it shares no code or ideas with the package's branch-and-bound
oracle; tests use it as the ground truth at small n.
"""

from itertools import combinations

from hypermatch.model import COLOURS, Colouring
from hypermatch.generators import fixture


def brute_pair_max(c: Colouring, verts, pair) -> int:
    """Maximum matching size using only the given colours, by raw recursion."""
    pair = set(pair)

    def rec(avail):
        if len(avail) < 3:
            return 0
        v = avail[0]
        best = rec(avail[1:])
        for q, r in combinations(avail[1:], 2):
            if c.colour((v, q, r)) in pair:
                rest = [x for x in avail[1:] if x != q and x != r]
                best = max(best, 1 + rec(rest))
        return best

    return rec(sorted(verts))


def brute_best_two_coloured(c: Colouring, verts) -> int:
    return max(brute_pair_max(c, verts, p) for p in combinations(COLOURS, 2))


def build(updates_fn, n: int, base: int = 1) -> Colouring:
    """Colouring from a rule triple -> colour (None keeps the base colour)."""
    upd = {}
    for t in combinations(range(n), 3):
        col = updates_fn(t, set(t))
        if col is not None:
            upd[t] = col
    return Colouring.constant(n, base).with_updates(upd)


def embed6(name: str, n: int, filler: int = 1) -> Colouring:
    """Named 6-vertex colouring on vertices 0..5 inside a constant filler."""
    base = fixture(name)
    upd = {t: base.colour(t) for t in combinations(range(6), 3)}
    return Colouring.constant(n, filler).with_updates(upd)


# --- two disjoint spread blocks -------------------------------------------
# Block one on 0..5 is a colour-1 level-1 spread (constant 1 with a 2-triple
# and a 3-triple), block two on 6..11 is its colour-2 counterpart.

def two_block(n: int = 15, cross=None):
    def rule(t, s):
        if s <= {0, 1, 2, 3, 4, 5}:
            return {(3, 4, 5): 2, (1, 2, 5): 3}.get(t, 1)
        if s <= {6, 7, 8, 9, 10, 11}:
            return {(9, 10, 11): 3, (7, 8, 11): 1}.get(t, 2)
        return 2 if cross is None else cross(t, s)
    return build(rule, n)


def stuck_u13_16() -> Colouring:
    # vertex 15 spoils the first hat through the cross colour and the second
    # through the one recoloured triple, so neither side can absorb it
    return two_block(16, cross=lambda t, s: 1 if t == (7, 8, 15) else 2)


def _breach_updates(n: int, keep_first_hat_clean: bool):
    hat_new = [12, 13, 14]
    upd = {}
    for t in combinations(range(n), 3):
        s = set(t)
        if s <= {0, 1, 2, 3, 4, 5}:
            upd[t] = {(3, 4, 5): 2, (1, 2, 5): 3}.get(t, 1)
        elif s <= {6, 7, 8, 9, 10, 11}:
            upd[t] = {(9, 10, 11): 3, (7, 8, 11): 1}.get(t, 2)
        else:
            upd[t] = 2
    # make 12..14 acceptable to the first spread's growth checks
    for w in hat_new:
        for x in (1, 2, 3, 4):
            for d in [0] + [v for v in hat_new if v < w]:
                upd[tuple(sorted((x, d, w)))] = 1
        upd[tuple(sorted((1, 2, w)))] = 1
        upd[tuple(sorted((3, 4, w)))] = 1
    if keep_first_hat_clean:
        for a, b in combinations(hat_new, 2):
            upd[(0, a, b)] = 1
    upd[(12, 13, 14)] = 2  # the offending triple inside the grown set
    return upd


def breach_upgrade_15() -> Colouring:
    return Colouring.constant(15, 1).with_updates(_breach_updates(15, True))


def breach_universal6_15() -> Colouring:
    return Colouring.constant(15, 1).with_updates(_breach_updates(15, False))


def clique_blocks_12() -> Colouring:
    def rule(t, s):
        if s <= {3, 4, 5, 6}:
            return 2
        if s <= {6, 7, 8, 9}:
            return 3
        if s <= {3, 4, 5, 6, 7, 8, 9}:
            return 2
        return 1
    return build(rule, 12)


def organic_endgame_13() -> Colouring:
    # one colour-1 spread on 0..5 overlapping a colour-2 spread on 1..6;
    # everything touching 7..12 is colour 3
    def rule(t, s):
        if s & set(range(7, 13)):
            return 3
        if 0 in s:
            return 1
        if 6 in s:
            return 2
        return {(1, 2, 3): 2, (3, 4, 5): 3}.get(t, 1)
    return build(rule, 13)


def double_spread(n: int, cross: dict) -> Colouring:
    """Colour-1 spread on 0..5 sharing vertex 5 with a colour-2 spread on 5..10."""
    def rule(t, s):
        if s <= {0, 1, 2, 3, 4, 5}:
            return {(3, 4, 5): 2, (1, 2, 5): 3}.get(t, 1)
        if s <= {5, 6, 7, 8, 9, 10}:
            return {(8, 9, 10): 3, (6, 7, 10): 1}.get(t, 2)
        return cross.get(t, 1)
    return build(rule, n)
