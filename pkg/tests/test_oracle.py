from itertools import combinations

import pytest

from hypermatch.generators import random_colouring
from hypermatch.model import COLOURS, Colouring, Matching, verify_matching
from hypermatch.oracle import (DEFAULT_BUDGET, OracleResult,
                               largest_mono_matching, max_matching_in_colours,
                               max_two_coloured, perfect_two_coloured_12)

from conftest import brute_best_two_coloured, brute_pair_max


def check_result(c, verts, allowed, res: OracleResult):
    m = res.matching
    flat = [v for t in m.triples for v in t]
    assert len(flat) == len(set(flat)) and set(flat) <= set(verts)
    assert all(c.colour(t) in set(allowed) for t in m.triples)
    assert res.size == len(m.triples)


# --- exactness against the naive recursion ------------------------------------

@pytest.mark.parametrize("seed", range(8))
def test_matches_brute_force_all_pairs(seed):
    c = random_colouring(8, seed)
    verts = range(8)
    for pair in combinations(COLOURS, 2):
        res = max_matching_in_colours(c, verts, pair)
        assert res.exact and not res.budget_hit
        check_result(c, verts, pair, res)
        assert res.size == brute_pair_max(c, verts, pair)


@pytest.mark.parametrize("seed", [11, 12, 13])
def test_matches_brute_force_single_colour(seed):
    c = random_colouring(9, seed, (3.0, 1.0, 1.0))
    res = max_matching_in_colours(c, range(9), {1})
    assert res.exact
    check_result(c, range(9), {1}, res)
    assert res.size == brute_pair_max(c, range(9), {1})


@pytest.mark.parametrize("seed", range(6))
def test_best_pair_matches_brute_force(seed):
    c = random_colouring(9, 100 + seed)
    pair, res = max_two_coloured(c, range(9))
    assert res.exact
    check_result(c, range(9), pair, res)
    assert res.size == brute_best_two_coloured(c, range(9))


def test_subwindow_vertices():
    c = random_colouring(12, 4)
    verts = [0, 2, 3, 7, 8, 9, 11]
    res = max_matching_in_colours(c, verts, (1, 2))
    check_result(c, verts, (1, 2), res)
    assert res.size == brute_pair_max(c, verts, (1, 2))


# --- argument handling -----------------------------------------------------------

def test_rejects_bad_colour_sets():
    c = Colouring.constant(6, 1)
    with pytest.raises(ValueError):
        max_matching_in_colours(c, range(6), ())
    with pytest.raises(ValueError):
        max_matching_in_colours(c, range(6), {0, 1})


def test_tiny_windows_are_exact_and_empty():
    c = Colouring.constant(6, 1)
    res = max_matching_in_colours(c, [1, 4], (1, 2))
    assert res.exact and res.size == 0 and res.explored == 0


def test_duplicate_vertices_collapse():
    c = Colouring.constant(6, 1)
    res = max_matching_in_colours(c, [0, 0, 1, 1, 2], (1,))
    assert res.size == 1


# --- budget behaviour ------------------------------------------------------------

def test_budget_flips_to_inexact_greedy():
    c = random_colouring(12, 9)
    exact = max_matching_in_colours(c, range(12), (1, 2))
    assert exact.exact and exact.explored > 1
    capped = max_matching_in_colours(c, range(12), (1, 2), budget=1)
    assert capped.budget_hit and not capped.exact
    check_result(c, range(12), (1, 2), capped)
    assert capped.size <= exact.size
    assert capped.explored <= exact.explored


def test_default_budget_is_generous():
    assert DEFAULT_BUDGET == 10 ** 8


def test_budget_propagates_through_best_pair():
    c = random_colouring(12, 9)
    _, res = max_two_coloured(c, range(12), budget=1)
    assert res.budget_hit and not res.exact


# --- tie-breaking ------------------------------------------------------------------

def test_best_pair_tie_goes_to_smallest():
    pair, res = max_two_coloured(Colouring.constant(9, 1), range(9))
    assert pair == frozenset({1, 2})
    assert res.size == 3

    # colour 3 strictly better: a monochrome-3 block beats the others
    c = Colouring.constant(9, 3).with_updates({(0, 1, 2): 1})
    pair, res = max_two_coloured(c, range(9))
    assert res.size == 3
    assert pair == frozenset({1, 3})   # {1,3} ties {2,3} at 3, smaller wins


# --- monochromatic floor ------------------------------------------------------------

def test_mono_matching_rejects_three_colours():
    c = Colouring.constant(6, 1).with_updates({(0, 1, 2): 2, (3, 4, 5): 3})
    with pytest.raises(ValueError):
        largest_mono_matching(c, range(6))


@pytest.mark.parametrize("n", range(3, 11))
@pytest.mark.parametrize("seed", range(5))
def test_mono_matching_floor_on_two_coloured_sets(n, seed):
    # floor((n+1)/4): 1 triple from 3 vertices, 2 from 7, 3 from 11, ...
    c = random_colouring(n, seed, (1.0, 1.0, 0.0))
    m = largest_mono_matching(c, range(n))
    assert m.size >= (n + 1) // 4
    assert len({c.colour(t) for t in m.triples}) <= 1
    expected = max(brute_pair_max(c, range(n), {a}) for a in (1, 2))
    assert m.size == expected


def test_mono_matching_constant_input():
    m = largest_mono_matching(Colouring.constant(9, 2), range(9))
    assert m.size == 3 and all(c == 2 for c in
                               (Colouring.constant(9, 2).colour(t) for t in m.triples))


# --- perfect 12-vertex matchings ------------------------------------------------------

def test_perfect_12_constant():
    m = perfect_two_coloured_12(Colouring.constant(12, 1), range(12))
    assert m.size == 4
    assert m.avoided == 2          # colours 2 and 3 both unused; report the smaller
    assert {v for t in m.triples for v in t} == set(range(12))


@pytest.mark.parametrize("seed", range(25))
def test_perfect_12_random(seed):
    c = random_colouring(12, 1000 + seed)
    m = perfect_two_coloured_12(c, range(12))
    assert {v for t in m.triples for v in t} == set(range(12))
    used = {c.colour(t) for t in m.triples}
    assert len(used) <= 2 and m.avoided not in used
    report = verify_matching(c, m, min_size=4)
    assert report.valid, report.violations


def test_perfect_12_subwindow():
    c = random_colouring(16, 77)
    verts = [1, 2, 3, 5, 6, 7, 8, 10, 11, 13, 14, 15]
    m = perfect_two_coloured_12(c, verts)
    assert {v for t in m.triples for v in t} == set(verts)
    assert len({c.colour(t) for t in m.triples}) <= 2


def test_perfect_12_wrong_count():
    c = Colouring.constant(13, 1)
    with pytest.raises(ValueError):
        perfect_two_coloured_12(c, range(11))
    with pytest.raises(ValueError):
        perfect_two_coloured_12(c, range(13))
