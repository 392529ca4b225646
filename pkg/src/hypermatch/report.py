"""Stress sweeps: batched solve/verify runs with CSV output and figures.

One row per instance.  Every run re-verifies its own trace (all recorded
universal sets and forcing vertices are checked again by enumeration) and
enforces the restart budget, so a green sweep is a real certificate, not
just "solve did not crash".
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .extractor import replay_trace, solve
from .generators import random_colouring
from .model import Colouring, m_bound, verify_matching
from .oracle import max_two_coloured

Weights = tuple[float, float, float]


def instance_seed(base: int, n: int, index: int) -> int:
    """Stable per-instance seed; the mixing keeps per-n streams disjoint."""
    return (base * 0x9E3779B97F4A7C15 + n * 0x100000001B3 + index) % 2 ** 63


@dataclass
class StressRow:
    n: int
    index: int
    seed: int
    size: int = -1
    bound: int = 0
    margin: int = -1            # size - bound
    oracle_size: Optional[int] = None
    oracle_exact: Optional[bool] = None
    restarts: int = 0
    checks: int = 0             # trace assertions re-validated on replay
    elapsed_ms: float = 0.0
    ok: bool = False
    error: str = ""


@dataclass
class StressReport:
    rows: list[StressRow]
    weights: Weights = (1.0, 1.0, 1.0)

    @property
    def failures(self) -> list[StressRow]:
        return [r for r in self.rows if not r.ok]

    @property
    def passed(self) -> int:
        return sum(r.ok for r in self.rows)

    def by_n(self) -> dict[int, list[StressRow]]:
        out: dict[int, list[StressRow]] = {}
        for r in self.rows:
            out.setdefault(r.n, []).append(r)
        return out


def run_one(n: int, index: int, seed: int, weights: Weights,
            oracle_max_n: int) -> StressRow:
    """Solve one random instance and collect every check the sweep promises."""
    row = StressRow(n=n, index=index, seed=seed, bound=m_bound(n))
    c = random_colouring(n, seed, weights)
    t0 = time.perf_counter()
    try:
        matching, trace = solve(c)
        row.size = matching.size
        row.margin = row.size - row.bound
        report = verify_matching(c, matching, min_size=row.bound)
        if not report.valid:
            raise AssertionError(f"verify failed: {report.violations}")
        row.checks = replay_trace(c, trace)
        row.restarts = sum(ev["event"] == "RESTART" for ev in trace)
        if row.restarts > n + 2:
            raise AssertionError(f"{row.restarts} restarts exceeds budget {n + 2}")
        if n <= oracle_max_n:
            _, res = max_two_coloured(c, range(n))
            row.oracle_size, row.oracle_exact = res.size, res.exact
            if not res.exact:
                raise AssertionError("oracle hit its budget; result not exact")
            if row.size > res.size:
                raise AssertionError(
                    f"solve found {row.size} but exact maximum is {res.size}")
        row.ok = True
    except Exception as e:  # noqa: BLE001 - a sweep must survive any failure
        row.ok = False
        row.error = f"{type(e).__name__}: {e}"
    row.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return row


def _run_one_packed(args: tuple) -> StressRow:
    return run_one(*args)


def run_stress(n_values: Sequence[int], count: int, seed: int,
               weights: Weights = (1.0, 1.0, 1.0), oracle_max_n: int = 0,
               workers: int = 1,
               progress: Optional[Callable[[StressRow], None]] = None
               ) -> StressReport:
    """Run count instances per n.  Row order is (n, index) however workers race."""
    tasks = [(n, i, instance_seed(seed, n, i), weights, oracle_max_n)
             for n in n_values for i in range(count)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one_packed, tasks, chunksize=8))
    else:
        rows = []
        for t in tasks:
            rows.append(run_one(*t))
            if progress is not None:
                progress(rows[-1])
    rows.sort(key=lambda r: (r.n, r.index))
    return StressReport(rows, weights)


def summarize(report: StressReport) -> list[str]:
    """Human lines: one per n, then a total with the worst observed gaps."""
    lines = []
    for n, rows in sorted(report.by_n().items()):
        fails = [r for r in rows if not r.ok]
        margins = [r.margin for r in rows if r.ok]
        gaps = [r.oracle_size - r.size for r in rows
                if r.ok and r.oracle_size is not None]
        bits = [f"n={n}", f"count={len(rows)}",
                f"pass={len(rows) - len(fails)}", f"fail={len(fails)}"]
        if margins:
            bits.append(f"margin={min(margins)}..{max(margins)}")
        if gaps:
            bits.append(f"oracle_gap_max={max(gaps)}")
        bits.append(f"ms_mean={sum(r.elapsed_ms for r in rows) / len(rows):.1f}")
        lines.append("  ".join(bits))
    lines.append(f"total pass={report.passed} fail={len(report.failures)}")
    return lines


# ---------------------------------------------------------------------------
# Failure minimization.

def restrict_colouring(c: Colouring, keep: Sequence[int]) -> Colouring:
    """Induced colouring on a vertex subset, relabelled to 0..len(keep)-1."""
    from itertools import combinations

    keep = sorted(keep)
    if len(keep) < 3:
        raise ValueError("need at least 3 surviving vertices")
    updates = {}
    for new_t in combinations(range(len(keep)), 3):
        old_t = tuple(keep[v] for v in new_t)
        updates[new_t] = c.colour(old_t)
    base = Colouring.constant(len(keep), 1)
    return base.with_updates(updates)


def solve_fails(c: Colouring) -> bool:
    try:
        matching, _ = solve(c)
    except Exception:  # noqa: BLE001 - any blow-up counts as a failure
        return True
    return not verify_matching(c, matching, min_size=m_bound(c.n)).valid


def minimize_failure(c: Colouring,
                     still_fails: Callable[[Colouring], bool] = solve_fails
                     ) -> Colouring:
    """Greedy vertex deletion: drop any vertex whose removal keeps the failure."""
    current = c
    shrunk = True
    while shrunk and current.n > 3:
        shrunk = False
        for v in range(current.n):
            candidate = restrict_colouring(
                current, [u for u in range(current.n) if u != v])
            if still_fails(candidate):
                current = candidate
                shrunk = True
                break
    return current


# ---------------------------------------------------------------------------
# Disk output: CSV plus rendered figures.

CSV_FIELDS = ["n", "index", "seed", "size", "bound", "margin", "oracle_size",
              "oracle_exact", "restarts", "checks", "elapsed_ms", "ok", "error"]


def write_csv(report: StressReport, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for r in report.rows:
            row = {k: getattr(r, k) for k in CSV_FIELDS}
            row["elapsed_ms"] = f"{r.elapsed_ms:.3f}"
            writer.writerow(row)


def render_figures(report: StressReport, outdir: str) -> list[str]:
    """Margin distribution and runtime profile as PNGs next to the CSV."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    groups = sorted(report.by_n().items())
    ns = [n for n, _ in groups]

    fig, ax = plt.subplots(figsize=(7, 4))
    margins = sorted({r.margin for _, rows in groups for r in rows if r.ok})
    width = 0.8 / max(len(margins), 1)
    for j, margin in enumerate(margins):
        counts = [sum(r.ok and r.margin == margin for r in rows)
                  for _, rows in groups]
        xs = [n + (j - (len(margins) - 1) / 2) * width for n in ns]
        ax.bar(xs, counts, width=width, label=f"size - bound = {margin}")
    ax.set_xlabel("vertices")
    ax.set_ylabel("instances")
    ax.set_title("matching size margin over the guaranteed bound")
    ax.set_xticks(ns)
    if margins:        # all-failure reports have no bars to label
        ax.legend()
    fig.tight_layout()
    p = os.path.join(outdir, "margins.png")
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(7, 4))
    means = [sum(r.elapsed_ms for r in rows) / len(rows) for _, rows in groups]
    worst = [max(r.elapsed_ms for r in rows) for _, rows in groups]
    ax.plot(ns, means, marker="o", label="mean")
    ax.plot(ns, worst, marker="s", linestyle="--", label="max")
    ax.set_xlabel("vertices")
    ax.set_ylabel("solve time (ms)")
    ax.set_title("solve runtime")
    ax.set_xticks(ns)
    ax.legend()
    fig.tight_layout()
    p = os.path.join(outdir, "runtime.png")
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)
    return paths


def write_report(report: StressReport, outdir: str) -> list[str]:
    """CSV plus figures in one directory; returns the written paths."""
    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, "stress.csv")
    write_csv(report, csv_path)
    return [csv_path] + render_figures(report, outdir)
