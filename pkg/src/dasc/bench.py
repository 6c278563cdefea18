"""Toy benchmark over worker counts and placement strategies."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, fields
from typing import TextIO

from .program import parse_program
from .rdg import build_rdg_prime
from .runtime import distributed_solve
from .toy import gen_toy

NOT_RELEVANT = "NR"


@dataclass
class BenchConfig:
    ns: tuple = (2,)
    ks: tuple = (1, 2, 3, 4, 5)
    distributions: tuple = ("rr", "greedy")
    transport: str = "sim"
    seed: int = 0
    arity: int = 6


@dataclass
class BenchRow:
    n: int
    k: int
    distribution: str
    rules: int
    models: int
    wall_time: float
    decisions: int
    backtracks: int
    cross_worker_messages: int
    coordination_messages: int
    initial_cut: int
    final_cut: int
    swaps: int


def run_bench(config: BenchConfig | None = None, progress=None) -> list[BenchRow]:
    """One row per (n, k, distribution).

    With a single worker there is nothing to place, so the greedy row is
    still run but labelled ``NR``.
    """
    config = config or BenchConfig()
    rows = []
    for n in config.ns:
        program = parse_program(gen_toy(n, config.arity))
        g = build_rdg_prime(program)
        for k in config.ks:
            for dist in config.distributions:
                _, st = distributed_solve(g, k, dist, transport=config.transport,
                                          seed=config.seed)
                label = NOT_RELEVANT if k == 1 and dist != "rr" else dist
                row = BenchRow(n, k, label, len(program.rules), st.models, st.wall_time,
                               st.decisions, st.backtracks, st.cross_worker_messages,
                               st.coordination_messages, st.initial_cut, st.final_cut, st.swaps)
                rows.append(row)
                if progress is not None:
                    progress(row)
    return rows


def columns(timing: bool = True) -> list[str]:
    names = [f.name for f in fields(BenchRow)]
    if not timing:
        names.remove("wall_time")
    return names


def write_csv(rows: list[BenchRow], stream: TextIO, timing: bool = True) -> None:
    cols = columns(timing)
    w = csv.DictWriter(stream, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in rows:
        d = asdict(row)
        d["wall_time"] = f"{row.wall_time:.4f}"
        w.writerow(d)
