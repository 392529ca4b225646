from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypermatch.errors import WitnessError
from hypermatch.generators import fixture, random_colouring
from hypermatch.model import COLOURS, Colouring, Matching, n_triples
from hypermatch.oracle import max_matching_in_colours, pair_avoiding_matchings
from hypermatch.structure import (SextupleClass, Witness, bulk_sextuple_flags,
                                  check_universal_13, classify_sextuple,
                                  critical_pairs, find_universal_sextuple,
                                  is_clique, is_forcing,
                                  packing_patterns_13,
                                  perfect_matching_patterns_12, scan_spreads,
                                  splittings_of, universal_matchings,
                                  verify_spread, verify_witness)

from conftest import embed6


# --- naive recount of the definitions, used as the in-test oracle -----------

def naive_splittings(s):
    v = sorted(s)
    seen = set()
    out = []
    for half in combinations(v, 3):
        other = tuple(x for x in v if x not in half)
        key = frozenset((half, other))
        if key not in seen:
            seen.add(key)
            out.append((half, other))
    return out


def naive_dominated(c, s):
    doms = set()
    for a in COLOURS:
        if all(c.colour(h1) == a or c.colour(h2) == a
               for h1, h2 in naive_splittings(s)):
            doms.add(a)
    return doms


def naive_is_spread(c, s, a):
    if a not in naive_dominated(c, s):
        return False
    demos = {frozenset((c.colour(h1), c.colour(h2)))
             for h1, h2 in naive_splittings(s)}
    up, down = a % 3 + 1, (a - 2) % 3 + 1
    return frozenset((a, up)) in demos and frozenset((a, down)) in demos


# --- splittings --------------------------------------------------------------

def test_splittings_shape():
    sp = splittings_of([3, 1, 4, 0, 9, 7])
    assert len(sp) == 10
    for s in sp:
        assert sorted(s.first + s.second) == [0, 1, 3, 4, 7, 9]
        assert s.first[0] == 0          # smallest vertex pinned to first half
    assert len({frozenset((s.first, s.second)) for s in sp}) == 10


def test_splittings_need_six_distinct():
    with pytest.raises(ValueError):
        splittings_of([0, 1, 2, 3, 4, 4])


# --- fixtures classify as documented -----------------------------------------

def test_fixture_a_level1_spread():
    cls = classify_sextuple(fixture("FIX-A"), range(6))
    assert not cls.universal
    assert cls.dominated == frozenset({1})
    (sp,) = cls.spreads
    assert (sp.colour, sp.level) == (1, 1)
    assert sp.m_plus == (0, 1, 2) and sp.p_half == (3, 4, 5)
    assert sp.m_minus == (0, 3, 4) and sp.n_half == (1, 2, 5)
    assert sp.dominating == (0,)
    assert sorted(sp.core) == [1, 2, 3, 4, 5]
    verify_spread(fixture("FIX-A"), sp)


def test_fixture_c_level2_spread():
    cls = classify_sextuple(fixture("FIX-C"), range(6))
    (sp,) = cls.spreads
    assert (sp.colour, sp.level) == (1, 2)
    assert sp.m_plus == (0, 1, 2) and sp.m_minus == (0, 1, 3)
    assert sp.dominating == (0, 1)
    assert sorted(sp.core) == [2, 3, 4, 5]


def test_fixture_b_universal():
    c = fixture("FIX-B")
    cls = classify_sextuple(c, range(6))
    assert cls.universal and not cls.dominated and not cls.spreads
    for g in COLOURS:
        sp = cls.avoiding_splits[g]
        assert c.colour(sp.first) != g and c.colour(sp.second) != g
    ms = universal_matchings(cls)
    assert [m.avoided for m in ms] == [1, 2, 3]
    assert all(m.size == 2 for m in ms)


def test_universal_matchings_rejects_dominated():
    cls = classify_sextuple(fixture("FIX-A"), range(6))
    with pytest.raises(WitnessError):
        universal_matchings(cls)


# --- classification agrees with the naive recount ---------------------------

@settings(max_examples=150, deadline=None)
@given(st.lists(st.sampled_from(COLOURS), min_size=20, max_size=20))
def test_classify_matches_recount(table):
    c = Colouring(6, table)
    s = list(range(6))
    cls = classify_sextuple(c, s)
    assert cls.dominated == naive_dominated(c, s)
    assert cls.universal == (not cls.dominated)
    spread_colours = {sp.colour for sp in cls.spreads}
    assert spread_colours == {a for a in COLOURS if naive_is_spread(c, s, a)}
    for sp in cls.spreads:
        verify_spread(c, sp)
        assert sp.level == len(set(sp.m_plus) & set(sp.m_minus))
    for g, sp in cls.avoiding_splits.items():
        if sp is not None:
            assert c.colour(sp.first) != g and c.colour(sp.second) != g


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_bulk_flags_match_classify(seed):
    c = random_colouring(9, seed)
    flags = bulk_sextuple_flags(c, range(9))
    for row, six in enumerate(flags.subs):
        cls = classify_sextuple(c, six.tolist())
        assert flags.universal[row] == cls.universal
        for a in COLOURS:
            sps = [sp for sp in cls.spreads if sp.colour == a]
            assert flags.spread[a - 1, row] == bool(sps)
            lvl2 = any(sp.level == 2 for sp in sps)
            assert flags.level2[a - 1, row] == lvl2


def test_scan_and_find_on_embedded_fixture():
    c = embed6("FIX-B", 9)
    found = find_universal_sextuple(c, range(9))
    assert found is not None
    verts, cls = found
    assert sorted(verts) == [0, 1, 2, 3, 4, 5] and cls.universal
    ca = embed6("FIX-A", 9)
    assert find_universal_sextuple(ca, range(9)) is None
    spreads = scan_spreads(ca, range(9))
    assert any(sorted(sp.vertices) == [0, 1, 2, 3, 4, 5] and sp.colour == 1
               for sp in spreads)


# --- critical pairs, cliques, forcing vertices -------------------------------

def test_critical_pairs_cover_both_triples():
    (sp,) = classify_sextuple(fixture("FIX-A"), range(6)).spreads
    pairs = set(critical_pairs(sp))
    want = {p for t in ((0, 1, 2), (0, 3, 4)) for p in combinations(t, 2)}
    assert pairs == want


def test_is_clique():
    c = Colouring.constant(6, 2).with_updates({(1, 2, 3): 1})
    assert is_clique(c, range(6), 2) == (1, 2, 3)
    assert is_clique(c, [0, 1, 2, 4], 2) is None


def test_is_forcing():
    c = Colouring.constant(7, 3).with_updates({(0, 1, 2): 1})
    assert is_forcing(c, range(7), 6, 3)
    assert not is_forcing(c, range(7), 0, 3)


# --- pattern tables -----------------------------------------------------------

def test_pattern_counts():
    pm = perfect_matching_patterns_12()
    assert pm.shape == (15400, 4, 3)
    assert np.all(np.sort(pm.reshape(-1, 12), axis=1) == np.arange(12))
    pk = packing_patterns_13()
    assert pk.shape == (200200, 4, 3)
    assert pk.max() == 12
    flat = pk.reshape(-1, 12)
    assert all(len(set(row.tolist())) == 12 for row in flat[:100])


# --- universal 13-sets ---------------------------------------------------------

def exact_universal_13(c, verts):
    # ground truth: 13 vertices are universal iff each colour can be avoided
    # by a size-4 matching, checked with the exact searcher
    return all(
        max_matching_in_colours(c, verts, set(COLOURS) - {g}).size >= 4
        for g in COLOURS)


def test_check_universal_13_against_exact():
    hits = 0
    for seed in range(40):
        c = random_colouring(13, 1000 + seed)
        verts = list(range(13))
        ms = check_universal_13(c, verts)
        assert (ms is not None) == exact_universal_13(c, verts)
        if ms is not None:
            hits += 1
            for g, m in zip(COLOURS, ms):
                assert m.avoided == g and m.size == 4
                assert g not in m.colours_used(c)
    assert hits > 0  # uniform random 13-sets are usually universal


def test_check_universal_13_rejects_monochrome():
    assert check_universal_13(Colouring.constant(13, 1), range(13)) is None


def test_pair_avoiding_matchings_surface():
    ms = pair_avoiding_matchings(fixture("FIX-B"), range(6))
    assert [m.avoided for m in ms] == [1, 2, 3]
    with pytest.raises(WitnessError):
        pair_avoiding_matchings(fixture("FIX-A"), range(6))
    with pytest.raises(ValueError):
        pair_avoiding_matchings(fixture("FIX-B"), range(5))


# --- witness objects -----------------------------------------------------------

def test_verify_witness_catches_tampering():
    c = embed6("FIX-B", 9)
    cls = classify_sextuple(c, range(6))
    good = Witness("Universal6", tuple(range(6)), universal_matchings(cls))
    verify_witness(c, good)  # passes

    wrong_set = Witness("Universal6", (0, 1, 2, 3, 4, 6),
                        universal_matchings(cls))
    with pytest.raises(WitnessError):
        verify_witness(c, wrong_set)

    with pytest.raises(ValueError):
        Witness("NotAKind", tuple(range(6)))
