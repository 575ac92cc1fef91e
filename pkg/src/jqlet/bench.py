"""Benchmark harness: size-parametrised workloads with timing, CSV, and
figures.

Every case is checked against its closed-form expected output on every run;
a timing is only reported for correct runs.  Timing covers evaluation only:
the program is compiled once and the input is built before the clock starts.
The report path writes one CSV (``name,n,engine,ms,summary``) and renders a
runtime figure next to it.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence

from .interp import Program, compile_program
from .values import Err, Value, eq_value, from_python, render_value


class BenchError(Exception):
    pass


@dataclass(frozen=True)
class BenchCase:
    """One workload: a program, an input built from n, and the expected
    outputs as a function of n."""

    name: str
    program: str
    make_input: Callable[[int], Value]
    expected: Callable[[int], list]
    default_ns: Sequence[int]
    # when set, one timed run is n invocations on the same input
    repeat_calls: bool = False


@dataclass(frozen=True)
class BenchRecord:
    name: str
    n: int
    engine: str
    ms: float  # median wall time over the repetitions
    summary: str


_TREE_WALK = "recurse(if isarr then .[] else empty end)"

CASES: List[BenchCase] = [
    BenchCase(
        name="empty",
        program="empty",
        make_input=lambda n: None,
        expected=lambda n: [],
        default_ns=(256, 1024, 4096),
        repeat_calls=True,
    ),
    BenchCase(
        name="reverse",
        program="[range(.)] | reverse | length",
        make_input=lambda n: n,
        expected=lambda n: [n],
        default_ns=(1 << 12, 1 << 14, 1 << 16),
    ),
    BenchCase(
        name="sort",
        program="[range(.) | -.] | sort | length",
        make_input=lambda n: n,
        expected=lambda n: [n],
        default_ns=(1 << 12, 1 << 14, 1 << 16),
    ),
    BenchCase(
        # concatenates n singleton arrays; the [[]] seed keeps the result an
        # array even for n = 0, where the null fold seed would otherwise leak
        name="add",
        program="[[]] + [range(.) | [.]] | add | length",
        make_input=lambda n: n,
        expected=lambda n: [n],
        default_ns=(1 << 12, 1 << 14, 1 << 16),
    ),
    BenchCase(
        name="reduce",
        program="reduce range(.) as $x ([0]; . + [$x + .[-1]]) | length",
        make_input=lambda n: n,
        expected=lambda n: [n + 1],
        default_ns=(1 << 10, 1 << 12, 1 << 14),
    ),
    BenchCase(
        name="tree-flatten",
        program="nth(.; 0 | trees) | flatten | length",
        make_input=lambda n: n,
        expected=lambda n: [2**n],
        default_ns=(8, 10, 12),
    ),
    BenchCase(
        name="tree-update",
        program=f"nth(.; 0 | trees) | {_TREE_WALK} |= "
        "(if isarr then . else . + 1 end) | flatten | add",
        make_input=lambda n: n,
        expected=lambda n: [2**n],
        default_ns=(8, 10, 12),
    ),
]

CASE_BY_NAME = {c.name: c for c in CASES}


def _check(case: BenchCase, n: int, got: list):
    want = case.expected(n)
    if len(got) != len(want) or not all(eq_value(g, w) for g, w in zip(got, want)):
        raise BenchError(
            f"{case.name}-{n}: wrong output\n"
            f"  expected: {[render_value(w) for w in want]}\n"
            f"  got:      {[r.msg if isinstance(r, Err) else render_value(r) for r in got]}"
        )


def _summary(outputs: list) -> str:
    if not outputs:
        return ""
    return render_value(outputs[-1])


def run_case(case: BenchCase, n: int, engine: str = "new", reps: int = 3) -> BenchRecord:
    """Time one case at one size; validates the output of every repetition."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if reps < 3:
        raise ValueError("at least 3 repetitions are required")
    prog = compile_program(case.program, engine=engine)
    value = from_python(case.make_input(n))
    calls = n if case.repeat_calls else 1
    times = []
    outputs: list = []
    for _ in range(reps):
        start = time.perf_counter()
        outputs = []
        for _ in range(calls):
            outputs.extend(prog.run(value))
        times.append((time.perf_counter() - start) * 1000.0)
        _check(case, n, outputs)
    return BenchRecord(case.name, n, engine, statistics.median(times), _summary(outputs))


def run_suite(
    cases: Iterable[BenchCase],
    ns: Optional[Sequence[int]] = None,
    engines: Sequence[str] = ("new",),
    reps: int = 3,
) -> List[BenchRecord]:
    records = []
    for case in cases:
        for n in (ns if ns is not None else case.default_ns):
            for engine in engines:
                records.append(run_case(case, n, engine, reps))
    return records


def emit_csv(records: Iterable[BenchRecord]) -> str:
    lines = ["name,n,engine,ms,summary"]
    for r in records:
        lines.append(f"{r.name},{r.n},{r.engine},{r.ms:.3f},{r.summary}")
    return "\n".join(lines) + "\n"


def render_figure(records: Sequence[BenchRecord], path: str):
    """Runtime-versus-size figure, one line per case and engine."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    series = {}
    for r in records:
        series.setdefault((r.name, r.engine), []).append((r.n, r.ms))
    for (name, engine), points in sorted(series.items()):
        points.sort()
        label = name if engine == "new" else f"{name} ({engine})"
        style = "-o" if engine == "new" else "--s"
        ax.plot([p[0] for p in points], [p[1] for p in points], style, label=label)
    ax.set_xlabel("n")
    ax.set_ylabel("median wall time [ms]")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="jqlet-bench", description="Run the jqlet benchmark suite."
    )
    ap.add_argument("--cases", metavar="a,b,...",
                    help=f"cases to run (default: all of {','.join(CASE_BY_NAME)})")
    ap.add_argument("--n", metavar="LIST", dest="ns",
                    help="comma-separated sizes, overriding per-case defaults")
    ap.add_argument("--engine", choices=("new", "legacy", "both"), default="new")
    ap.add_argument("--reps", type=int, default=3, metavar="R",
                    help="repetitions per measurement, median reported (default 3)")
    ap.add_argument("--csv", metavar="FILE", help="write CSV here (default: stdout)")
    ap.add_argument("--plot", metavar="FILE",
                    help="figure file (default: next to the CSV)")
    ap.add_argument("--no-plot", action="store_true", help="skip the figure")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.cases:
        try:
            cases = [CASE_BY_NAME[name.strip()] for name in args.cases.split(",")]
        except KeyError as exc:
            print(f"jqlet-bench: unknown case {exc.args[0]!r}", file=sys.stderr)
            return 2
    else:
        cases = list(CASES)
    ns = None
    if args.ns:
        try:
            ns = [int(s) for s in args.ns.split(",")]
        except ValueError:
            print(f"jqlet-bench: bad --n list {args.ns!r}", file=sys.stderr)
            return 2
    engines = ("new", "legacy") if args.engine == "both" else (args.engine,)

    try:
        records = run_suite(cases, ns, engines, args.reps)
    except (BenchError, ValueError) as exc:
        print(f"jqlet-bench: {exc}", file=sys.stderr)
        return 1

    csv_text = emit_csv(records)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)

    plot_path = args.plot
    if plot_path is None and args.csv and not args.no_plot:
        stem = args.csv.rsplit(".", 1)[0] if "." in args.csv else args.csv
        plot_path = stem + ".png"
    if plot_path and not args.no_plot:
        render_figure(records, plot_path)
    return 0


def entry():  # console script hook
    raise SystemExit(main())
