"""Command-line entry point: ``dasc solve|check|gen-toy|bench|dump-graph``."""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import __version__
from .coloring import SearchStats, answer_set_of, solve
from .oracle import check_answer_set
from .program import GroundProgram, ParseError, parse_program
from .rdg import build_rdg_classic, build_rdg_prime
from .runtime import DISTRIBUTIONS, TRANSPORTS, RunStats, distributed_solve
from .toy import gen_toy

EXIT_SAT, EXIT_UNSAT, EXIT_ERROR = 10, 20, 1
CHECK_OK, CHECK_FAIL, CHECK_INPUT_ERROR = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # bad flags are ordinary errors (exit 1), not usage code 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    raw = os.environ.get("DASC_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"dasc: error: DASC_SEED must be an integer, got {raw!r}") from None


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _load(path: str) -> GroundProgram:
    return parse_program(_read_text(path))


def _print_stats(stats: RunStats, timing: bool, out) -> None:
    d = stats.as_dict()
    if not timing:
        d.pop("wall_time")
    else:
        d["wall_time"] = f"{stats.wall_time:.4f}"
    for key, value in d.items():
        print(f"{key}: {value}", file=out)


def cmd_solve(args) -> int:
    try:
        program = _load(args.program)
    except (OSError, ParseError) as exc:
        print(f"dasc: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.workers < 1:
        print("dasc: --workers must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    if args.models < 0:
        print("dasc: --models must be non-negative", file=sys.stderr)
        return EXIT_ERROR
    if args.trace and args.workers != 1:
        print("dasc: --trace is only available with --workers 1", file=sys.stderr)
        return EXIT_ERROR
    g = build_rdg_prime(program)
    limit = args.models or None
    if args.workers == 1:
        trace = (lambda line: print(line, file=sys.stderr)) if args.trace else None
        search = SearchStats()
        t0 = time.perf_counter()
        models = [answer_set_of(g, c) for c in solve(g, limit, trace=trace, stats=search)]
        stats = RunStats(models=len(models), wall_time=time.perf_counter() - t0,
                         decisions=search.decisions, backtracks=search.backtracks,
                         distribution=args.distribution, transport="sequential")
    else:
        try:
            models, stats = distributed_solve(g, args.workers, args.distribution, limit,
                                              transport=args.transport, seed=args.seed)
        except (RuntimeError, OSError) as exc:
            print(f"dasc: {exc}", file=sys.stderr)
            return EXIT_ERROR
    out = sys.stdout
    for i, m in enumerate(models, 1):
        print(" ".join([f"Answer {i}:"] + program.format_atoms(m)), file=out)
    print("SATISFIABLE" if models else "UNSATISFIABLE", file=out)
    if args.stats:
        _print_stats(stats, args.time, out)
    return EXIT_SAT if models else EXIT_UNSAT


def _model_atoms(program: GroundProgram, text: str) -> frozenset:
    atoms = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("%", 1)[0]
        name = "".join(line.split())
        if not name:
            continue
        try:
            atoms.add(program.atom_id(name))
        except KeyError:
            raise ValueError(f"line {lineno}: unknown atom {name!r}") from None
    return frozenset(atoms)


def _fmt_set(program: GroundProgram, atoms) -> str:
    return "{" + ", ".join(program.format_atoms(atoms)) + "}"


def cmd_check(args) -> int:
    try:
        program = _load(args.program)
        x = _model_atoms(program, _read_text(args.model))
    except (OSError, ParseError, ValueError) as exc:
        print(f"dasc: {exc}", file=sys.stderr)
        return CHECK_INPUT_ERROR
    diag = check_answer_set(program, x)
    if diag["reduct_ok"] != diag["generating_ok"]:
        raise AssertionError("answer set characterizations disagree")
    if diag["reduct_ok"]:
        print("answer set")
        return CHECK_OK
    print("not an answer set")
    print(f"reduct: Cn(P^X) = {_fmt_set(program, diag['reduct_fixpoint'])}"
          f" differs from X = {_fmt_set(program, x)}")
    print(f"generating rules: {len(diag['generating_rules'])} rules,"
          f" Cn = {_fmt_set(program, diag['generating_fixpoint'])}")
    return CHECK_FAIL


def cmd_gen_toy(args) -> int:
    try:
        sys.stdout.write(gen_toy(args.n, args.arity))
    except ValueError as exc:
        print(f"dasc: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return 0


def cmd_bench(args) -> int:
    from .bench import BenchConfig, run_bench, write_csv

    if any(n < 1 for n in args.n) or any(k < 1 for k in args.k):
        print("dasc: domain sizes and worker counts must be positive", file=sys.stderr)
        return EXIT_ERROR
    config = BenchConfig(ns=tuple(args.n), ks=tuple(args.k),
                         distributions=tuple(args.distribution), transport=args.transport,
                         seed=args.seed, arity=args.arity)
    rows = run_bench(config)
    timing = not args.no_timing
    if args.out:
        out = Path(args.out)
        with out.open("w", encoding="utf-8") as fh:
            write_csv(rows, fh, timing)
        figure = args.figure or str(out.with_suffix(".png"))
    else:
        write_csv(rows, sys.stdout, timing)
        figure = args.figure
    if figure:
        from .report import plot_bench
        plot_bench(rows, figure, timing)
        print(f"figure written to {figure}", file=sys.stderr)
    return 0


def cmd_dump_graph(args) -> int:
    try:
        program = _load(args.program)
    except (OSError, ParseError) as exc:
        print(f"dasc: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.classic:
        g = build_rdg_classic(program)
        groups = (("e0", g.e0), ("e1", g.e1))
        label = (lambda v: f"r{v}") if args.labels else str
    else:
        g = build_rdg_prime(program)
        groups = (("e0", g.e0), ("e1", g.e1), ("e2", g.e2))
        label = g.vertex_label if args.labels else str
    for kind, edges in groups:
        for u, v in edges:
            print(f"{kind} {label(u)} {label(v)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dasc", description="Distributed answer set solving by rule graph coloring.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="compute answer sets")
    s.add_argument("program", help="ground program file, or - for stdin")
    s.add_argument("--workers", "-k", type=int, default=1)
    s.add_argument("--distribution", choices=DISTRIBUTIONS, default="rr")
    s.add_argument("--transport", choices=TRANSPORTS, default="sim")
    s.add_argument("--seed", type=int, default=None, help="scheduler seed (env DASC_SEED)")
    s.add_argument("--models", "-n", type=int, default=0, help="stop after n models; 0 = all")
    s.add_argument("--stats", action="store_true", help="append run statistics")
    s.add_argument("--time", action="store_true", help="include wall time in --stats")
    s.add_argument("--trace", action="store_true", help="log operator applications to stderr")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="test whether a set of atoms is an answer set")
    c.add_argument("program")
    c.add_argument("model", help="file with one atom per line")
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("gen-toy", help="print the ground selection benchmark")
    t.add_argument("n", type=int)
    t.add_argument("--arity", type=int, default=6)
    t.set_defaults(func=cmd_gen_toy)

    b = sub.add_parser("bench", help="toy benchmark as CSV")
    b.add_argument("--n", type=int, nargs="+", default=[2])
    b.add_argument("--k", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    b.add_argument("--distribution", choices=DISTRIBUTIONS, nargs="+",
                   default=list(DISTRIBUTIONS))
    b.add_argument("--transport", choices=TRANSPORTS, default="sim")
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--arity", type=int, default=6)
    b.add_argument("--out", help="write the CSV here (figure goes next to it)")
    b.add_argument("--figure", help="figure path (png, pdf, svg)")
    b.add_argument("--no-timing", action="store_true",
                   help="omit wall time so output is byte-stable")
    b.set_defaults(func=cmd_bench)

    d = sub.add_parser("dump-graph", help="print graph edges as 'kind src dst'")
    d.add_argument("program")
    d.add_argument("--classic", action="store_true", help="rule-to-rule graph")
    d.add_argument("--labels", action="store_true", help="print vertex names")
    d.set_defaults(func=cmd_dump_graph)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
