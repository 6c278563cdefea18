"""Distributed coloring search over k workers."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

from ..partition import Partition, cut_size, greedy_redistribute, round_robin
from ..program import GroundProgram
from ..rdg import RdgPrime, build_rdg_prime
from .coordinator import Coordinator, coordinate_branch
from .messages import COORDINATOR, Kind, Message, decode, encode
from .sim import SimRuntime
from .worker import Worker, notify_change_step

DISTRIBUTIONS = ("rr", "greedy")
TRANSPORTS = ("sim", "proc")

__all__ = [
    "COORDINATOR", "Coordinator", "Kind", "Message", "RunStats", "SimRuntime", "Worker",
    "coordinate_branch", "decode", "distributed_solve", "encode", "notify_change_step",
    "place", "quiescence_reached",
]


@dataclass
class RunStats:
    models: int = 0
    wall_time: float = 0.0
    decisions: int = 0
    backtracks: int = 0
    cross_worker_messages: int = 0
    coordination_messages: int = 0
    token_rounds: int = 0
    initial_cut: int = 0
    final_cut: int = 0
    swaps: int = 0
    k: int = 1
    distribution: str = "rr"
    transport: str = "sim"

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class Placement:
    partition: Partition
    initial_cut: int
    final_cut: int
    swaps: int = 0


def place(g: RdgPrime, k: int, distribution: str = "rr") -> Placement:
    """Round-robin placement, optionally refined by greedy swapping.

    With one worker there is nothing to redistribute and ``greedy``
    falls back to round robin.
    """
    if distribution not in DISTRIBUTIONS:
        raise ValueError(f"unknown distribution {distribution!r}")
    p = round_robin(g.num_vertices, k)
    cut = cut_size(g, p).cut_size
    if distribution == "rr" or k < 2:
        return Placement(p, cut, cut)
    res = greedy_redistribute(g, p)
    return Placement(res.partition, res.initial_cut, res.final_cut, res.swaps)


def quiescence_reached(runtime: SimRuntime) -> bool:
    """Global inspection: no pending task and no message in flight.

    Termination-detection tokens do not count as activity.
    """
    if any(w.stack for w in runtime.workers):
        return False
    return all(m.kind == Kind.QUIESCENCE_TOKEN
               for ch in runtime.channels.values() for _, m in ch)


def distributed_solve(program: GroundProgram | RdgPrime, k: int = 1, distribution: str = "rr",
                      max_models: int | None = None, transport: str = "sim", seed: int = 0,
                      scheduler: str = "random",
                      partition: Partition | None = None) -> tuple[list[frozenset], RunStats]:
    """Solve with ``k`` workers; returns the answer sets and run statistics."""
    if k < 1:
        raise ValueError("need at least one worker")
    if transport not in TRANSPORTS:
        raise ValueError(f"unknown transport {transport!r}")
    g = program if isinstance(program, RdgPrime) else build_rdg_prime(program)
    if partition is None:
        placement = place(g, k, distribution)
    else:
        cut = cut_size(g, partition).cut_size
        placement = Placement(partition, cut, cut)
    stats = RunStats(k=placement.partition.k, distribution=distribution, transport=transport,
                     initial_cut=placement.initial_cut, final_cut=placement.final_cut,
                     swaps=placement.swaps)
    t0 = time.perf_counter()
    if transport == "sim":
        rt = SimRuntime(g, placement.partition, max_models, seed=seed, scheduler=scheduler)
        models = rt.run()
        coord = rt.coordinator
        stats.cross_worker_messages = rt.cross_worker_messages
        stats.coordination_messages = rt.coordination_messages + rt.token_messages
    else:
        from .proc import run_processes
        models, coord, counts = run_processes(g, placement.partition, max_models)
        stats.cross_worker_messages = counts["cross_worker_messages"]
        stats.coordination_messages = counts["coordination_messages"]
    stats.wall_time = time.perf_counter() - t0
    stats.models = len(models)
    stats.decisions = coord.stats.decisions
    stats.backtracks = coord.stats.backtracks
    stats.token_rounds = coord.stats.token_rounds
    return models, stats
