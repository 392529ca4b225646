from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypermatch.generators import (RNG_NAME, ConjectureParams, LayerSpec,
                                   conjecture_bound, fixture,
                                   layered_lowest_colour, layered_upper_bounds,
                                   random_colouring, sharpness_instance)
from hypermatch.model import Colouring, m_bound, n_triples, smallest_n_for
from hypermatch.oracle import max_two_coloured

from conftest import brute_best_two_coloured


# --- layered constructions ----------------------------------------------------

def test_layered_single_layer_is_constant():
    c = layered_lowest_colour((0, 0, 6))
    assert all(c.colour(t) == 3 for t in combinations(range(6), 3))


def test_layered_lowest_colour_rule():
    c = layered_lowest_colour((1, 3, 9))
    assert c.n == 13
    assert c.colour((0, 1, 4)) == 1     # vertex 0 sits in the colour-1 layer
    assert c.colour((4, 5, 12)) == 3    # all three in the colour-3 layer
    assert c.colour((1, 4, 5)) == 2     # vertex 1..3 are the colour-2 layer


def test_layered_rejects_tiny():
    with pytest.raises(ValueError):
        layered_lowest_colour((1, 1, 0))


@settings(max_examples=50, deadline=None)
@given(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4))
       .filter(lambda t: sum(t) >= 4))
def test_layered_removal_monotone(sizes):
    # deleting the top vertex leaves every surviving triple's colour alone
    c = layered_lowest_colour(sizes)
    a, b, _ = sizes
    smaller = (a, b, sum(sizes) - a - b - 1) if sizes[2] else \
        (a, b - 1, 0) if b else (a - 1, 0, 0)
    d = layered_lowest_colour(smaller)
    for t in combinations(range(d.n), 3):
        assert d.colour(t) == c.colour(t)


def test_layered_upper_bounds_values():
    assert layered_upper_bounds((1, 3, 9)) == (4, 4, 4)
    assert layered_upper_bounds((1, 2, 8)) == (3, 3, 3)
    assert layered_upper_bounds((0, 0, 9)) == (3, 3, 0)


def test_layered_bounds_dominate_oracle():
    # every split of up to 14 vertices stays within the formula caps
    for n in range(3, 15):
        for a in range(n + 1):
            for b in range(n - a + 1):
                spec = (a, b, n - a - b)
                _, res = max_two_coloured(layered_lowest_colour(spec), range(n))
                assert res.exact
                assert res.size <= max(layered_upper_bounds(spec)), spec


# --- sharpness ------------------------------------------------------------------

@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_sharpness_instances_are_tight(k):
    c = sharpness_instance(k)
    assert c.n == smallest_n_for(k) - 1
    assert m_bound(c.n) == k - 1
    _, res = max_two_coloured(c, range(c.n))
    assert res.exact and res.size == k - 1


def test_sharpness_k4_matches_brute_force():
    c = sharpness_instance(4)
    assert c.n == 11
    assert brute_best_two_coloured(c, range(11)) == 3


# --- seeded random colourings -----------------------------------------------------

def test_random_colouring_deterministic():
    a = random_colouring(9, 7)
    b = random_colouring(9, 7)
    assert a == b and a.table.tobytes() == b.table.tobytes()


def test_random_colouring_seed_sensitivity():
    assert random_colouring(9, 7) != random_colouring(9, 8)


def test_random_colouring_degenerate_weights():
    c = random_colouring(8, 123, (1.0, 0.0, 0.0))
    assert np.all(c.table == 1)
    with pytest.raises(ValueError):
        random_colouring(8, 1, (0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        random_colouring(2, 1)


def test_random_colouring_roughly_weighted():
    c = random_colouring(16, 5, (1.0, 1.0, 2.0))
    counts = np.bincount(c.table, minlength=4)[1:]
    assert counts.sum() == n_triples(16)
    assert counts[2] > counts[0] and counts[2] > counts[1]


def test_rng_is_named_and_versioned():
    assert RNG_NAME == "splitmix64-v1"


# --- bound formula -----------------------------------------------------------------

def test_conjecture_bound_values():
    assert conjecture_bound(ConjectureParams(3, 3, 2, 4)) == 12
    assert conjecture_bound(ConjectureParams(3, 3, 2, 1)) == 3
    assert conjecture_bound(ConjectureParams(3, 3, 2, 12)) == 38
    assert conjecture_bound(ConjectureParams(2, 3, 2, 4)) == 9


@given(st.integers(1, 300))
def test_conjecture_bound_specializes(k):
    assert conjecture_bound(ConjectureParams(3, 3, 2, k)) == smallest_n_for(k)


def test_conjecture_params_validation():
    with pytest.raises(ValueError):
        ConjectureParams(3, 2, 3, 1)    # more allowed colours than colours
    with pytest.raises(ValueError):
        ConjectureParams(1, 3, 2, 1)
    with pytest.raises(ValueError):
        ConjectureParams(3, 3, 2, 0)


# --- fixtures ------------------------------------------------------------------------

def test_fixture_tables():
    a = fixture("FIX-A")
    assert a.n == 6
    assert a.colour((3, 4, 5)) == 2 and a.colour((1, 2, 5)) == 3
    assert a.colour((0, 1, 2)) == 1
    b = fixture("FIX-B")
    assert {b.colour(t) for t in ((0, 1, 3), (2, 4, 5))} == {2}
    assert {b.colour(t) for t in ((0, 1, 4), (2, 3, 5))} == {3}
    with pytest.raises(KeyError):
        fixture("FIX-Z")


def test_layer_spec_sugar():
    spec = LayerSpec.of((1, 3, 9))
    assert spec.n == 13
    assert LayerSpec.of(spec) is spec
    with pytest.raises(ValueError):
        LayerSpec.of((1, -1, 2))
