"""``artinian verify``: run verification suites and report.

Exit status is 0 when every suite passes or shows the documented
small-field behaviour, 2 when any suite fails, and 3 for usage or
size-guard errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import matgrp as mg
from .pointsets import SizeGuardError
from .rings import RingSpecError, ring_make
from .suites import FAIL, SUITES, SuiteResult, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 2, 3

DEFAULT_MATRIX = (
    [(kind, 2, ring) for kind in ("GL", "SL") for ring in ("F2[t]/t^2", "F3[t]/t^2", "Z/4", "Z/9", "Z/8")]
    + [("GL", 3, "F2[t]/t^2"), ("GL", 3, "Z/8")]
)
DEFAULT_SUITES = ("filtration", "scheme", "cartan", "torus", "parabolic", "borel")
EXHAUSTIVE_SUITES = ("order", "radical")
EXHAUSTIVE_LIMIT = 10**5

COLUMNS = ("suite", "group", "ring", "verdict", "key sizes", "ms")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Task:
    suite: str
    kind: str
    n: int
    ring: str
    seed: int
    guard: int
    trials: int
    pairs: int
    shape: tuple[int, ...] | None
    timing: bool

    def run(self) -> SuiteResult:
        trials = self.pairs if self.suite == "torus" else self.trials
        return run_suite(self.suite, self.kind, self.n, self.ring, seed=self.seed, guard=self.guard,
                         trials=trials, shape=self.shape, timing=self.timing)


def _run_batch(tasks: list[Task]) -> list:
    out = []
    for task in tasks:
        try:
            out.append(task.run())
        except SizeGuardError as exc:
            out.append(exc)
    return out


def parse_group(text: str) -> tuple[str, int]:
    m = re.fullmatch(r"(GL|SL)(\d+)", text.strip())
    if not m or int(m[2]) < 1:
        raise UsageError(f"cannot parse group {text!r}; expected GL<n> or SL<n>")
    return m[1], int(m[2])


def parse_suites(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in names if s not in SUITES]
    if bad or not names:
        raise UsageError(f"unknown suite {', '.join(bad) or '(none)'}; valid suites: {', '.join(SUITES)}")
    return names


def parse_shape(text: str | None):
    if text is None:
        return None
    try:
        shape = tuple(int(b) for b in text.split(","))
    except ValueError:
        raise UsageError(f"shape {text!r} must be comma-separated block sizes") from None
    if not shape or min(shape) < 1:
        raise UsageError(f"shape {text!r} must have positive blocks")
    return shape


def resolve_guard(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("GREENBERG_GUARD")
    if env:
        try:
            return int(float(env))
        except ValueError:
            raise UsageError(f"GREENBERG_GUARD={env!r} is not a number") from None
    return mg.DEFAULT_GUARD


def precheck(kind: str, n: int, ring: str, guard: int):
    """Reject instances whose residue group or top layer exceeds the guard."""
    try:
        A = ring_make(ring)
    except RingSpecError as exc:
        raise UsageError(str(exc)) from None
    G = mg.ambient_group(kind, n, A)
    residue = G.at_length(1).order()
    layer = A.q**G.dim
    if residue > guard or layer > guard:
        raise UsageError(f"{kind}{n}({A}): |G(k)| = {residue} and q^dim = {layer}, guard is {guard}")
    return A


def build_tasks(args) -> list[Task]:
    guard = resolve_guard(args.guard)
    shape = parse_shape(args.shape)
    common = dict(seed=args.seed, guard=guard, trials=args.trials, pairs=args.pairs, timing=args.timing)
    tasks = []
    if args.all:
        if args.group or args.ring or args.suites:
            raise UsageError("--all runs the default matrix; drop --group/--ring/--suites")
        for kind, n, ring in DEFAULT_MATRIX:
            A = precheck(kind, n, ring, guard)
            names = list(DEFAULT_SUITES)
            if mg.ambient_group(kind, n, A).order() <= EXHAUSTIVE_LIMIT:
                names = list(EXHAUSTIVE_SUITES) + names
            tasks += [Task(s, kind, n, ring, shape=None, **common) for s in names]
        return tasks
    if not args.group or not args.ring:
        raise UsageError("--group and --ring are required unless --all is given")
    kind, n = parse_group(args.group)
    precheck(kind, n, args.ring, guard)
    if shape is not None and sum(shape) != n:
        raise UsageError(f"shape {shape} is not a composition of {n}")
    names = parse_suites(args.suites) if args.suites else list(DEFAULT_SUITES)
    return [Task(s, kind, n, args.ring, shape=shape, **common) for s in names]


def execute(tasks: list[Task], workers: int = 1) -> list[SuiteResult]:
    """Run tasks, keeping declaration order whatever the completion order.

    Parallel runs hand each worker all suites of one instance so the
    per-process normalizer caches are shared between them.
    """
    batches = [list(g) for _, g in itertools.groupby(tasks, key=lambda t: (t.kind, t.n, t.ring))]
    if workers > 1 and len(batches) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = [r for batch in pool.map(_run_batch, batches) for r in batch]
    else:
        out = _run_batch(tasks)
    for item in out:
        if isinstance(item, SizeGuardError):
            raise UsageError(f"size guard: {item}")
    return out


def report_json(results: list[SuiteResult], seed: int, guard: int) -> str:
    doc = {"seed": seed, "guard": guard, "results": [r.to_dict() for r in results]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _sizes_text(sizes: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in sizes.items())


def report_table(results: list[SuiteResult]) -> str:
    rows = [COLUMNS] + [
        (r.suite, r.group, r.ring, r.verdict, _sizes_text(r.sizes), str(r.millis)) for r in results
    ]
    widths = [max(len(row[i]) for row in rows) for i in range(len(COLUMNS))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def exit_code(results: list[SuiteResult]) -> int:
    return EXIT_FAIL if any(r.verdict == FAIL for r in results) else EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artinian", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--group", help="GL<n> or SL<n>")
    v.add_argument("--ring", help="F<q>[t]/t^<r>, W<r>(F<q>), Z/<p>^<r> or Z/<p^r>")
    v.add_argument("--suites", help=f"comma-separated subset of: {', '.join(SUITES)}")
    v.add_argument("--all", action="store_true", help="run the default suite matrix")
    v.add_argument("--trials", type=int, default=50, help="Borel conjugacy trials (default 50)")
    v.add_argument("--pairs", type=int, default=500, help="torus injectivity pairs (default 500)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--guard", type=int, default=None, help="size guard (default 10^7)")
    v.add_argument("--shape", help="parabolic block sizes, e.g. 2,1")
    v.add_argument("--format", choices=("json", "table"), default="table")
    v.add_argument("--workers", type=int, default=1, help="run suites in parallel processes")
    v.add_argument("--timing", action="store_true", help="record wall-clock milliseconds")
    v.add_argument("--output", help="write the report here instead of stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.trials < 1 or args.pairs < 1 or args.workers < 1:
            raise UsageError("--trials, --pairs and --workers must be positive")
        tasks = build_tasks(args)
        results = execute(tasks, args.workers)
    except UsageError as exc:
        print(f"artinian: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    guard = resolve_guard(args.guard)
    text = report_json(results, args.seed, guard) if args.format == "json" else report_table(results)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return exit_code(results)


if __name__ == "__main__":
    sys.exit(main())
