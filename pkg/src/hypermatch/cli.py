"""Command line front end.

Exit codes are a stable contract: 0 success, 1 verification or assertion
failure, 2 usage or input error, 3 faithfulness error (the pipeline could
not honour its own guarantee, which means a bug, not a bad instance).
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import report as report_mod
from .errors import FaithfulnessError, FormatError, HypermatchError
from .extractor import solve
from .formats import (dump_instance, dump_json, dump_trace, document_matching,
                      load_matching_document, matching_document, read_instance,
                      write_instance)
from .generators import (RNG_NAME, ConjectureParams, conjecture_bound, fixture,
                         layered_lowest_colour, random_colouring,
                         sharpness_instance)
from .model import (Colouring, colex_subsets, m_bound, smallest_n_for,
                    verify_matching)
from .oracle import max_matching_in_colours, max_two_coloured
from .structure import classify_sextuple


class _Usage(Exception):
    """Bad flag combinations or malformed values; maps to exit 2."""


def _ints(text: str, count: Optional[int], what: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise _Usage(f"{what} must be comma-separated integers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise _Usage(f"{what} needs exactly {count} values, got {len(vals)}")
    return vals


def _floats(text: str, count: int, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise _Usage(f"{what} must be comma-separated numbers, got {text!r}") from None
    if len(vals) != count:
        raise _Usage(f"{what} needs exactly {count} values, got {len(vals)}")
    return vals


def _fmt_weights(w: Sequence[float]) -> str:
    return ",".join(f"{x:g}" for x in w)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit(args, doc: dict, human: str) -> None:
    print(dump_json(doc).rstrip("\n") if args.json else human)


# ---------------------------------------------------------------------------
# generate

def cmd_generate(args) -> int:
    if args.random is None and (args.weights is not None or args.seed is not None):
        raise _Usage("--weights/--seed only apply to --random")
    if args.layers is not None:
        sizes = _ints(args.layers, 3, "--layers")
        colouring = layered_lowest_colour(sizes)
        mode = f"layered {_fmt_weights(sizes)}"
    elif args.sharpness is not None:
        colouring = sharpness_instance(args.sharpness)
        mode = f"sharpness k={args.sharpness}"
    elif args.random is not None:
        seed = 0 if args.seed is None else args.seed
        weights = (1.0, 1.0, 1.0) if args.weights is None else \
            _floats(args.weights, 3, "--weights")
        colouring = random_colouring(args.random, seed, weights)
        mode = f"rng {RNG_NAME} seed {seed} weights {_fmt_weights(weights)}"
    else:
        colouring = fixture(args.fixture)
        mode = f"fixture {args.fixture}"

    text = dump_instance(colouring, comments=[mode])
    if args.output:
        _write_text(args.output, text)
        _emit(args, {"n": colouring.n, "mode": mode, "path": args.output},
              f"n={colouring.n} {mode} -> {args.output}")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# solve

def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    c = inst.colouring
    matching, trace = solve(c)
    if args.trace:
        _write_text(args.trace, dump_trace(trace))
    doc = matching_document(c, matching, "solve", trace_ref=args.trace)
    if args.output:
        _write_text(args.output, dump_json(doc))
    colours = ",".join(str(g) for g in sorted(matching.colours_used(c)))
    _emit(args, doc,
          f"n={c.n} size={matching.size} avoided={matching.avoided} "
          f"bound={m_bound(c.n)} colours={colours}")
    return 0


# ---------------------------------------------------------------------------
# oracle

def cmd_oracle(args) -> int:
    inst = read_instance(args.instance)
    c = inst.colouring
    if args.pair is not None:
        colours = _ints(args.pair, 2, "--pair")
        if not set(colours) <= {1, 2, 3} or colours[0] == colours[1]:
            raise _Usage(f"--pair needs two distinct colours from 1,2,3, got {args.pair}")
        pair = frozenset(colours)
        res = max_matching_in_colours(c, range(c.n), pair, args.budget)
    else:
        pair, res = max_two_coloured(c, range(c.n), args.budget)
    doc = matching_document(c, res.matching, "oracle", extra={
        "pair": sorted(pair), "exact": res.exact,
        "explored": res.explored, "budget_hit": res.budget_hit,
    })
    if args.output:
        _write_text(args.output, dump_json(doc))
    tag = "exact" if res.exact else "inexact (budget hit)"
    _emit(args, doc,
          f"n={c.n} size={res.size} pair={_fmt_weights(sorted(pair))} "
          f"{tag} explored={res.explored}")
    if args.require_exact and not res.exact:
        print("error: result is not exact under the given budget", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    inst = read_instance(args.instance)
    c = inst.colouring
    with open(args.matching, "r", encoding="utf-8") as fh:
        doc = load_matching_document(fh.read())
    matching = document_matching(doc)
    min_size = m_bound(c.n) if args.min is None else args.min
    rep = verify_matching(c, matching, min_size)
    violations = list(rep.violations)
    if doc["n"] != c.n:
        violations.append(f"document says n={doc['n']}, instance has n={c.n}")
    valid = rep.valid and not violations
    out = {"valid": valid, "size": rep.size, "min_size": min_size,
           "colours": sorted(rep.colours_used), "violations": violations}
    if valid:
        _emit(args, out, f"ok size={rep.size} >= {min_size} "
              f"colours={_fmt_weights(sorted(rep.colours_used))}")
        return 0
    _emit(args, out, "FAIL\n" + "\n".join(f"  - {v}" for v in violations))
    return 1


# ---------------------------------------------------------------------------
# classify

def _split_str(sp) -> str:
    return "{}|{}".format(",".join(map(str, sp.first)), ",".join(map(str, sp.second)))


def _class_label(cls) -> str:
    if cls.universal:
        return "universal"
    return "dominated{%s}" % ",".join(str(g) for g in sorted(cls.dominated))


def _class_doc(cls) -> dict:
    doc = {"universal": cls.universal,
           "dominated": sorted(cls.dominated),
           "spreads": [{"colour": sp.colour, "level": sp.level,
                        "plus": _split_str(sp.plus_split),
                        "minus": _split_str(sp.minus_split),
                        "dominating": list(sp.dominating)}
                       for sp in cls.spreads]}
    if cls.universal:
        doc["avoiding"] = {g: _split_str(sp)
                           for g, sp in cls.avoiding_splits.items() if sp}
    return doc


def _class_human(cls) -> str:
    if cls.universal:
        avoid = "  ".join(f"avoid{g}={_split_str(sp)}"
                          for g, sp in sorted(cls.avoiding_splits.items()) if sp)
        return f"universal  {avoid}"
    line = _class_label(cls)
    for sp in cls.spreads:
        line += (f"\nspread colour={sp.colour} level={sp.level}"
                 f" plus={_split_str(sp.plus_split)}"
                 f" minus={_split_str(sp.minus_split)}")
    return line


def cmd_classify(args) -> int:
    inst = read_instance(args.instance)
    c = inst.colouring
    if args.sextuple is not None:
        verts = _ints(args.sextuple, 6, "--sextuple")
        if len(set(verts)) != 6 or min(verts) < 0 or max(verts) >= c.n:
            raise _Usage(f"--sextuple needs 6 distinct vertices below n={c.n}")
        cls = classify_sextuple(c, verts)
        _emit(args, _class_doc(cls), _class_human(cls))
        return 0

    # scan mode: census over all C(n,6) sextuples with lowest-colex examples
    counts: dict[str, int] = {}
    first: dict[str, tuple[int, ...]] = {}
    spread_total = 0
    for six in colex_subsets(list(range(c.n)), 6):
        cls = classify_sextuple(c, six)
        labels = [_class_label(cls)]
        labels += [f"spread colour={sp.colour} level={sp.level}" for sp in cls.spreads]
        spread_total += bool(cls.spreads)
        for lab in labels:
            counts[lab] = counts.get(lab, 0) + 1
            first.setdefault(lab, six)
    counts.setdefault("universal", 0)
    if args.spreads_only:
        show = sorted(k for k in counts if k.startswith("spread "))
    else:
        show = sorted(counts)
    doc = {"counts": {k: counts[k] for k in show},
           "first": {k: list(first[k]) for k in show if k in first},
           "sextuples_with_spreads": spread_total}
    lines = [f"{k}: {counts[k]}" + (f"  first={_fmt_weights(first[k])}" if k in first else "")
             for k in show]
    if not args.spreads_only:
        lines.append(f"spreads: {spread_total}")
    _emit(args, doc, "\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# stress

def _parse_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
    else:
        lo = hi = text
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise _Usage(f"--n-range wants 'a..b', got {text!r}") from None
    if a < 3 or b < a:
        raise _Usage(f"--n-range {text!r} is empty or below n=3")
    return a, b


def cmd_stress(args) -> int:
    lo, hi = _parse_range(args.n_range)
    weights = (1.0, 1.0, 1.0) if args.weights is None else \
        _floats(args.weights, 3, "--weights")
    rep = report_mod.run_stress(range(lo, hi + 1), args.count, args.seed,
                                weights=weights, oracle_max_n=args.oracle_max_n,
                                workers=args.workers)
    lines = report_mod.summarize(rep)
    written: list[str] = []
    if args.report_dir:
        written = report_mod.write_report(rep, args.report_dir)
        lines += [f"wrote {p}" for p in written]

    failures = rep.failures
    repro_path = None
    if failures:
        worst = failures[0]
        bad = random_colouring(worst.n, worst.seed, weights)
        small = report_mod.minimize_failure(bad)
        repro_path = os.path.join(args.report_dir or ".",
                                  f"stress_repro_n{small.n}.hcg")
        if args.report_dir:
            os.makedirs(args.report_dir, exist_ok=True)
        write_instance(repro_path, small, comments=[
            f"minimized from n={worst.n} seed={worst.seed} "
            f"weights {_fmt_weights(weights)}",
            f"original failure: {worst.error}",
        ])
        lines.append(f"FAIL: {len(failures)} instances; repro -> {repro_path}")
    doc = {"pass": rep.passed, "fail": len(failures),
           "summary": report_mod.summarize(rep), "outputs": written,
           "repro": repro_path}
    _emit(args, doc, "\n".join(lines))
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# bound

def cmd_bound(args) -> int:
    if args.n is not None:
        value, human = m_bound(args.n), f"m_bound({args.n}) = {{}}"
    elif args.k is not None:
        value, human = smallest_n_for(args.k), f"smallest_n_for({args.k}) = {{}}"
    else:
        r, t, s, k = _ints(args.general, 4, "--general")
        value = conjecture_bound(ConjectureParams(r, t, s, k))
        human = f"conjecture_bound(r={r},t={t},s={s},k={k}) = {{}}"
    _emit(args, {"value": value}, human.format(value))
    return 0


# ---------------------------------------------------------------------------
# parser plumbing

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hypermatch",
        description="2-coloured matchings in 3-coloured complete 3-uniform "
                    "hypergraphs: generate, solve, verify, stress.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_json(sp):
        sp.add_argument("--json", action="store_true",
                        help="machine-readable stdout")

    g = sub.add_parser("generate", help="write an instance file")
    mode = g.add_mutually_exclusive_group(required=True)
    mode.add_argument("--layers", metavar="A,B,C")
    mode.add_argument("--sharpness", type=int, metavar="K")
    mode.add_argument("--random", type=int, metavar="N")
    mode.add_argument("--fixture", metavar="NAME")
    g.add_argument("--weights", metavar="W1,W2,W3")
    g.add_argument("--seed", type=int)
    g.add_argument("-o", "--output", metavar="PATH")
    add_json(g)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="extract a 2-coloured matching")
    s.add_argument("instance")
    s.add_argument("--trace", metavar="PATH", help="write the event trace")
    s.add_argument("-o", "--output", metavar="PATH", help="write the matching document")
    add_json(s)
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exact maximum matching search")
    o.add_argument("instance")
    which = o.add_mutually_exclusive_group(required=True)
    which.add_argument("--pair", metavar="A,B", help="restrict to two colours")
    which.add_argument("--best-pair", action="store_true",
                       help="maximize over all three colour pairs")
    o.add_argument("--budget", type=int, metavar="N", help="search-state cap")
    o.add_argument("--require-exact", action="store_true",
                   help="exit 1 if the budget truncated the search")
    o.add_argument("-o", "--output", metavar="PATH")
    add_json(o)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="check a matching document")
    v.add_argument("instance")
    v.add_argument("matching")
    v.add_argument("--min", type=int, metavar="SIZE",
                   help="required size (default: the n-derived bound)")
    add_json(v)
    v.set_defaults(func=cmd_verify)

    cl = sub.add_parser("classify", help="sextuple structure census")
    cl.add_argument("instance")
    what = cl.add_mutually_exclusive_group(required=True)
    what.add_argument("--sextuple", metavar="V1,...,V6")
    what.add_argument("--scan", action="store_true")
    cl.add_argument("--spreads-only", action="store_true")
    add_json(cl)
    cl.set_defaults(func=cmd_classify)

    st = sub.add_parser("stress", help="randomized solve/verify sweep")
    st.add_argument("--n-range", required=True, metavar="A..B")
    st.add_argument("--count", type=int, required=True)
    st.add_argument("--seed", type=int, required=True)
    st.add_argument("--oracle-max-n", type=int, default=0,
                    help="cross-check against the exact oracle up to this n")
    st.add_argument("--weights", metavar="W1,W2,W3")
    st.add_argument("--workers", type=int, default=1)
    st.add_argument("--report-dir", metavar="DIR",
                    help="write stress.csv and figures here")
    add_json(st)
    st.set_defaults(func=cmd_stress)

    b = sub.add_parser("bound", help="bound arithmetic")
    pick = b.add_mutually_exclusive_group(required=True)
    pick.add_argument("--n", type=int)
    pick.add_argument("--k", type=int)
    pick.add_argument("--general", metavar="R,T,S,K")
    add_json(b)
    b.set_defaults(func=cmd_bound)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse exits on usage errors and --help
        return int(e.code or 0)
    try:
        return args.func(args)
    except FaithfulnessError as e:
        print(f"faithfulness error: {e}", file=sys.stderr)
        return 3
    except (_Usage, FormatError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 2
    except HypermatchError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
