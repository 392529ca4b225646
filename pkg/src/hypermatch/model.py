"""Core model: coloured complete 3-uniform hypergraphs and matchings.

Vertices are 0-based dense integers.  A colouring assigns one of the colours
{1,2,3} to every 3-element vertex subset (triple).  Triples are kept as
strictly increasing tuples and indexed by colexicographic rank, which has a
closed form in both directions and keeps the dense colour table enumeration
friendly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

COLOURS = (1, 2, 3)

Triple = tuple[int, int, int]


def shift_colour(alpha: int, d: int) -> int:
    """Cyclic colour arithmetic on {1,2,3}: shift_colour(3, +1) == 1."""
    return (alpha - 1 + d) % 3 + 1


def rank_triple(i: int, j: int, k: int) -> int:
    """Colex rank of a strictly increasing triple: i + C(j,2) + C(k,3)."""
    if not 0 <= i < j < k:
        raise ValueError(f"triple must be strictly increasing, got ({i},{j},{k})")
    return i + j * (j - 1) // 2 + k * (k - 1) * (k - 2) // 6


def unrank_triple(rank: int, n: int) -> Triple:
    """Inverse of rank_triple for ranks below C(n,3)."""
    if not 0 <= rank < n_triples(n):
        raise IndexError(f"rank {rank} out of range for n={n}")
    k = 2
    while (k + 1) * k * (k - 1) // 6 <= rank:
        k += 1
    rank -= k * (k - 1) * (k - 2) // 6
    j = 1
    while (j + 1) * j // 2 <= rank:
        j += 1
    i = rank - j * (j - 1) // 2
    return (i, j, k)


def n_triples(n: int) -> int:
    return n * (n - 1) * (n - 2) // 6 if n >= 3 else 0


def m_bound(n: int) -> int:
    """Guaranteed 2-coloured matching size on n vertices: floor(4(n+1)/13)."""
    if n < 0:
        raise ValueError("vertex count must be nonnegative")
    return 4 * (n + 1) // 13


def smallest_n_for(k: int) -> int:
    """Least n with m_bound(n) >= k, in closed form: 3k + floor((k-1)/4)."""
    if k < 1:
        raise ValueError("matching size must be positive")
    return 3 * k + (k - 1) // 4


def near_perfect_size(n: int) -> int:
    """Size of a near perfect matching on n vertices: floor(n/3)."""
    if n < 0:
        raise ValueError("vertex count must be nonnegative")
    return n // 3


def colex_subsets(vertices: Sequence[int], k: int) -> Iterator[tuple[int, ...]]:
    """Yield all k-subsets of a sorted vertex sequence in colex order.

    Colex compares largest elements first, so the recursion fixes the largest
    member last and enumerates the prefix choices below it.
    """
    if k == 0:
        yield ()
        return
    for top in range(k - 1, len(vertices)):
        for rest in colex_subsets(vertices[:top], k - 1):
            yield rest + (vertices[top],)


@lru_cache(maxsize=None)
def triple_table(n: int) -> np.ndarray:
    """All triples of range(n) as an int16 array in colex rank order (read-only)."""
    if n < 3:
        arr = np.empty((0, 3), dtype=np.int16)
    else:
        arr = np.array(sorted(combinations(range(n), 3), key=lambda t: t[::-1]),
                       dtype=np.int16)
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=None)
def _binom_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    v = np.arange(n, dtype=np.int64)
    c2 = v * (v - 1) // 2
    c3 = v * (v - 1) * (v - 2) // 6
    return c2, c3


def rank_rows(rows: np.ndarray, n: int) -> np.ndarray:
    """Vectorized rank_triple over an array of shape (..., 3) with sorted rows."""
    c2, c3 = _binom_tables(n)
    r = rows.astype(np.int64, copy=False)
    return r[..., 0] + c2[r[..., 1]] + c3[r[..., 2]]


class Colouring:
    """Immutable colour assignment for the complete 3-uniform hypergraph.

    The table holds one colour per triple, indexed by colex rank.  Instances
    never mutate after construction, so they are safe to share across scans.
    """

    __slots__ = ("n", "table")

    def __init__(self, n: int, table: Iterable[int] | np.ndarray):
        arr = np.asarray(table, dtype=np.uint8).copy()
        if arr.shape != (n_triples(n),):
            raise ValueError(f"table length {arr.shape} does not match C({n},3)")
        if arr.size and (arr.min() < 1 or arr.max() > 3):
            raise ValueError("colours must lie in {1,2,3}")
        arr.flags.writeable = False
        self.n = n
        self.table = arr

    @classmethod
    def constant(cls, n: int, colour: int) -> "Colouring":
        if colour not in COLOURS:
            raise ValueError(f"bad colour {colour}")
        return cls(n, np.full(n_triples(n), colour, dtype=np.uint8))

    def colour(self, t: Sequence[int]) -> int:
        i, j, k = sorted(t)
        if k >= self.n:
            raise IndexError(f"vertex {k} out of range for n={self.n}")
        return int(self.table[rank_triple(i, j, k)])

    def with_updates(self, updates: dict[Triple, int]) -> "Colouring":
        """New colouring with the given triples recoloured (fixture plumbing)."""
        table = self.table.copy()
        for t, col in updates.items():
            i, j, k = sorted(t)
            table[rank_triple(i, j, k)] = col
        return Colouring(self.n, table)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Colouring) and self.n == other.n
                and np.array_equal(self.table, other.table))

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def __repr__(self):
        return f"Colouring(n={self.n})"


def colour_of(c: Colouring, t: Sequence[int]) -> int:
    """Colour of one triple; raises on out-of-range vertices."""
    return c.colour(t)


@dataclass(frozen=True)
class Matching:
    """Pairwise disjoint triples, optionally tagged with an avoided colour."""

    triples: tuple[Triple, ...]
    avoided: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.triples)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for t in self.triples for v in t)

    def colours_used(self, c: Colouring) -> frozenset[int]:
        return frozenset(c.colour(t) for t in self.triples)

    @staticmethod
    def of(triples: Iterable[Sequence[int]], avoided: Optional[int] = None) -> "Matching":
        norm = tuple(tuple(sorted(t)) for t in triples)
        return Matching(tuple(sorted(norm, key=lambda t: t[::-1])), avoided)


@dataclass
class VerificationReport:
    valid: bool
    size: int
    colours_used: frozenset[int]
    violations: list[str] = field(default_factory=list)


def verify_matching(c: Colouring, m: Matching, min_size: int) -> VerificationReport:
    """Check disjointness, the 2-colour cap, the size floor and the avoided tag.

    Violations are collected, not raised; `valid` is true iff none were found.
    """
    violations: list[str] = []
    seen: set[int] = set()
    colours: set[int] = set()
    for t in m.triples:
        if len(set(t)) != 3 or list(t) != sorted(t):
            violations.append(f"malformed triple {t}")
            continue
        if t[2] >= c.n or t[0] < 0:
            violations.append(f"triple {t} out of range for n={c.n}")
            continue
        if seen & set(t):
            violations.append(f"triple {t} overlaps earlier triples")
        seen |= set(t)
        colours.add(c.colour(t))
    if len(colours) > 2:
        violations.append(f"uses {len(colours)} colours: {sorted(colours)}")
    if m.avoided is not None and m.avoided in colours:
        violations.append(f"avoided colour {m.avoided} appears in the matching")
    if m.size < min_size:
        violations.append(f"size {m.size} below required {min_size}")
    return VerificationReport(not violations, m.size, frozenset(colours), violations)


def greedy_matching(c: Colouring, vertices: Iterable[int],
                    allowed: Iterable[int]) -> Matching:
    """Maximal matching using only allowed colours, lowest colex triple first.

    A single colex pass is maximal: the covered set only grows, so any triple
    that remains fully uncovered at the end would have been taken when visited.
    """
    allowed = frozenset(allowed)
    if not allowed:
        raise ValueError("allowed colour set must be nonempty")
    verts = sorted(set(vertices))
    taken: list[Triple] = []
    covered: set[int] = set()
    for t in colex_subsets(verts, 3):
        if covered.isdisjoint(t) and c.colour(t) in allowed:
            taken.append(t)
            covered.update(t)
    return Matching(tuple(taken))
