"""Instance generators: layered extremal colourings, seeded random colourings,
named fixtures, and the general lower-bound formula for the conjectured
matching threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Colouring, n_triples, smallest_n_for, triple_table

# Fixed, versioned generator for reproducible random instances.  The name is
# written into instance file headers so certificates stay replayable.
RNG_NAME = "splitmix64-v1"

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class LayerSpec:
    """Sizes of the three vertex layers, one per colour."""

    sizes: tuple[int, int, int]

    def __post_init__(self):
        if len(self.sizes) != 3 or any(s < 0 for s in self.sizes):
            raise ValueError(f"need 3 nonnegative layer sizes, got {self.sizes}")

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @staticmethod
    def of(layers: "LayerSpec | Sequence[int]") -> "LayerSpec":
        if isinstance(layers, LayerSpec):
            return layers
        return LayerSpec(tuple(int(s) for s in layers))


def layered_lowest_colour(layers: LayerSpec | Sequence[int]) -> Colouring:
    """Colour each triple by the lowest layer it touches.

    Vertices 0..a-1 sit in layer 1, the next b in layer 2, the last c in
    layer 3.  Layers are monotone in the vertex index, so a triple's colour
    is just the layer of its smallest vertex.
    """
    a, b, _ = LayerSpec.of(layers).sizes
    n = LayerSpec.of(layers).n
    if n < 3:
        raise ValueError(f"need at least 3 vertices, got {n}")
    vcol = (np.searchsorted([a, a + b], np.arange(n), side="right") + 1).astype(np.uint8)
    return Colouring(n, vcol[triple_table(n)[:, 0]])


def layered_upper_bounds(layers: LayerSpec | Sequence[int]) -> tuple[int, int, int]:
    """Per-avoided-colour matching caps implied by the layered construction.

    Avoiding colour 1 confines the matching to the top two layers; avoiding
    colour 2 allows at most one triple per layer-1 vertex plus triples inside
    layer 3; avoiding colour 3 forces every triple to touch the bottom two
    layers.  The maximum 2-coloured matching is at most the largest of the
    three.
    """
    a, b, c = LayerSpec.of(layers).sizes
    n = a + b + c
    return ((b + c) // 3, a + c // 3, min(a + b, n // 3))


def sharpness_instance(k: int) -> Colouring:
    """Layered colouring on smallest_n_for(k)-1 vertices with no 2-coloured
    matching of size k.

    Exact search: for each (a, b) take the largest c keeping all three layer
    bounds at most k-1 (the bounds are monotone in c), then keep the largest
    vertex count.  Ties go to the sizes closest to the 1:3:9 proportion in L1
    distance, then lexicographically.
    """
    if k < 2:
        raise ValueError(f"sharpness construction needs k >= 2, got {k}")
    best: tuple[int, int, tuple[int, int, int]] | None = None
    for a in range(k + 1):
        for b in range(3 * k + 1):
            for c in range(4 * k, -1, -1):
                if max(layered_upper_bounds((a, b, c))) <= k - 1:
                    break
            else:
                continue
            n = a + b + c
            if n < 3:
                continue
            # distances to n*(1,3,9)/13, scaled by 13 to stay integral
            dist = (abs(13 * a - n) + abs(13 * b - 3 * n) + abs(13 * c - 9 * n))
            cand = (-n, dist, (a, b, c))
            if best is None or cand < best:
                best = cand
    assert best is not None and -best[0] == smallest_n_for(k) - 1, \
        f"layer search missed the extremal vertex count for k={k}"
    return layered_lowest_colour(best[2])


def _splitmix64_unit(seed: int, count: int) -> np.ndarray:
    """count floats in [0,1) from the splitmix64 stream at the given seed."""
    idx = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + idx * np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def random_colouring(n: int, seed: int,
                     weights: Sequence[float] = (1.0, 1.0, 1.0)) -> Colouring:
    """Independent per-triple colours with the given weights (splitmix64-v1).

    Byte-for-byte reproducible for fixed (n, seed, weights): the i-th triple
    in colex order consumes the i-th stream value, and the cut points are the
    normalized cumulative weights with ties resolved upward.
    """
    if n < 3:
        raise ValueError(f"need at least 3 vertices, got {n}")
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (3,) or (w < 0).any() or not w.sum() > 0:
        raise ValueError(f"weights must be 3 nonnegative reals, not all zero: {weights}")
    cum = np.cumsum(w) / w.sum()
    u = _splitmix64_unit(seed, n_triples(n))
    return Colouring(n, (np.searchsorted(cum, u, side="right") + 1).astype(np.uint8))


@dataclass(frozen=True)
class ConjectureParams:
    """Parameters of the general threshold formula.

    r: edge size (uniformity); t: total colours; s: colours the matching may
    use; k: matching size.
    """

    r: int
    t: int
    s: int
    k: int

    def __post_init__(self):
        if not (1 <= self.s <= self.t and self.r >= 2 and self.k >= 1):
            raise ValueError(f"need 1 <= s <= t, r >= 2, k >= 1; got {self}")


def conjecture_bound(p: ConjectureParams) -> int:
    """Conjectured vertex threshold: kr + floor((k-1)(t-s) / (1+r+...+r^(s-1)))."""
    denom = sum(p.r ** i for i in range(p.s))
    return p.k * p.r + (p.k - 1) * (p.t - p.s) // denom


# Six-vertex fixtures used throughout the structure tests: a level-1 spread,
# a universal sextuple, and a level-2 spread, all in colour 1 on the rest.
_FIXTURES: dict[str, dict[tuple[int, int, int], int]] = {
    "FIX-A": {(3, 4, 5): 2, (1, 2, 5): 3},
    "FIX-B": {(0, 1, 3): 2, (2, 4, 5): 2, (0, 1, 4): 3, (2, 3, 5): 3},
    "FIX-C": {(3, 4, 5): 2, (2, 4, 5): 3},
}


def fixture(name: str) -> Colouring:
    """Named six-vertex test colouring; raises KeyError on unknown names."""
    try:
        updates = _FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; expected one of {sorted(_FIXTURES)}") from None
    return Colouring.constant(6, 1).with_updates(updates)
