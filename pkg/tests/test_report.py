"""Stress-sweep plumbing: rows, summaries, minimization, disk output.

The CLI tests already drive cmd_stress end to end; this file pins the
library surface those commands are built from.
"""

import csv

import pytest

import hypermatch.report as report_mod
from hypermatch.model import Colouring, m_bound
from hypermatch.generators import random_colouring
from hypermatch.report import (
    CSV_FIELDS,
    StressReport,
    StressRow,
    instance_seed,
    minimize_failure,
    restrict_colouring,
    run_one,
    run_stress,
    summarize,
    write_csv,
    write_report,
)


@pytest.fixture(scope="module")
def small_report():
    return run_stress([9], count=2, seed=11, oracle_max_n=9)


# --- seeding -----------------------------------------------------------------

def test_instance_seed_deterministic_and_distinct():
    assert instance_seed(7, 12, 3) == instance_seed(7, 12, 3)
    seen = {instance_seed(7, n, i) for n in range(9, 17) for i in range(100)}
    assert len(seen) == 8 * 100
    assert all(0 <= s < 2 ** 63 for s in seen)


def test_instance_seed_base_changes_stream():
    assert instance_seed(1, 12, 0) != instance_seed(2, 12, 0)


# --- run_one -----------------------------------------------------------------

def test_run_one_ok_with_oracle_crosscheck():
    row = run_one(12, 0, seed=5, weights=(1.0, 1.0, 1.0), oracle_max_n=12)
    assert row.ok and row.error == ""
    assert row.bound == m_bound(12) == 4
    assert row.margin == row.size - row.bound >= 0
    assert row.oracle_exact is True and row.size <= row.oracle_size
    assert row.checks >= 1
    assert 0 <= row.restarts <= 12 + 2
    assert row.elapsed_ms > 0


def test_run_one_skips_oracle_above_cutoff():
    row = run_one(13, 0, seed=5, weights=(1.0, 1.0, 1.0), oracle_max_n=12)
    assert row.ok
    assert row.oracle_size is None and row.oracle_exact is None


def test_run_one_captures_solver_blowup(monkeypatch):
    def boom(c):
        raise RuntimeError("injected failure")

    monkeypatch.setattr(report_mod, "solve", boom)
    row = run_one(9, 0, seed=1, weights=(1.0, 1.0, 1.0), oracle_max_n=0)
    assert not row.ok
    assert row.error.startswith("RuntimeError")
    assert row.size == -1 and row.margin == -1


# --- run_stress --------------------------------------------------------------

def test_run_stress_rows_ordered_and_seeded(small_report):
    rows = small_report.rows
    assert [(r.n, r.index) for r in rows] == [(9, 0), (9, 1)]
    assert [r.seed for r in rows] == [instance_seed(11, 9, i) for i in (0, 1)]
    assert all(r.ok for r in rows)
    assert small_report.passed == 2 and small_report.failures == []
    assert set(small_report.by_n()) == {9}


def test_run_stress_progress_callback():
    seen = []
    run_stress([9], count=2, seed=3, progress=seen.append)
    assert [r.index for r in seen] == [0, 1]


def test_run_stress_parallel_matches_serial(small_report):
    par = run_stress([9], count=2, seed=11, oracle_max_n=9, workers=2)
    key = lambda r: (r.n, r.index, r.seed, r.size, r.oracle_size, r.ok)
    assert [key(r) for r in par.rows] == [key(r) for r in small_report.rows]


# --- summaries ---------------------------------------------------------------

def _fake_rows():
    ok = StressRow(n=9, index=0, seed=1, size=4, bound=3, margin=1,
                   oracle_size=4, oracle_exact=True, checks=5,
                   elapsed_ms=1.0, ok=True)
    bad = StressRow(n=9, index=1, seed=2, elapsed_ms=2.0, ok=False,
                    error="AssertionError: boom")
    return [ok, bad]


def test_summarize_text_shape():
    lines = summarize(StressReport(_fake_rows()))
    assert lines[0] == "n=9  count=2  pass=1  fail=1  margin=1..1  oracle_gap_max=0  ms_mean=1.5"
    assert lines[-1] == "total pass=1 fail=1"


def test_summarize_omits_margin_when_nothing_passed():
    rows = [r for r in _fake_rows() if not r.ok]
    lines = summarize(StressReport(rows))
    assert "margin" not in lines[0] and "fail=1" in lines[0]


# --- minimization ------------------------------------------------------------

def test_restrict_colouring_relabels():
    c = random_colouring(9, seed=3)
    keep = [0, 2, 3, 5, 6, 8]
    sub = restrict_colouring(c, keep)
    assert sub.n == 6
    from itertools import combinations
    for t in combinations(range(6), 3):
        assert sub.colour(t) == c.colour(tuple(keep[v] for v in t))


def test_restrict_colouring_needs_three():
    with pytest.raises(ValueError):
        restrict_colouring(random_colouring(9, 0), [1, 2])


def test_minimize_failure_greedy_shrink():
    c = Colouring.constant(10, 1)
    small = minimize_failure(c, still_fails=lambda cand: cand.n >= 6)
    assert small.n == 6


def test_minimize_failure_keeps_stubborn_instance():
    c = Colouring.constant(5, 1)
    calls = []

    def never_smaller(cand):
        calls.append(cand.n)
        return False

    assert minimize_failure(c, still_fails=never_smaller) is c
    assert calls == [4] * 5   # one probe per deleted vertex, then give up


# --- disk output -------------------------------------------------------------

def test_write_csv_roundtrip(small_report, tmp_path):
    path = tmp_path / "rows.csv"
    write_csv(small_report, str(path))
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert list(rows[0]) == CSV_FIELDS
    assert rows[0]["ok"] == "True" and rows[0]["n"] == "9"


def test_write_report_renders_figures(small_report, tmp_path):
    paths = write_report(small_report, str(tmp_path / "out"))
    names = [p.rsplit("/", 1)[-1] for p in paths]
    assert names == ["stress.csv", "margins.png", "runtime.png"]
    for p in paths[1:]:
        with open(p, "rb") as fh:
            assert fh.read(8) == b"\x89PNG\r\n\x1a\n"
