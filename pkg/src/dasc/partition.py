"""Vertex placement over workers: round robin and greedy cut reduction.

The functions accept any graph exposing ``num_vertices`` and ``edges()``
(an ``RdgPrime``, an ``RdgClassic`` or a plain ``EdgeGraph``).  Every edge
counts once toward the cut, whatever its kind.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class EdgeGraph:
    num_vertices: int
    edge_list: tuple[tuple[int, int], ...]

    def edges(self):
        return iter(self.edge_list)


@dataclass(frozen=True)
class Partition:
    assignment: tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("need at least one worker")
        if any(not 0 <= w < self.k for w in self.assignment):
            raise ValueError("worker id out of range")

    def __getitem__(self, v: int) -> int:
        return self.assignment[v]

    def __len__(self) -> int:
        return len(self.assignment)

    def sizes(self) -> list[int]:
        return np.bincount(np.asarray(self.assignment, dtype=np.int64), minlength=self.k).tolist()

    def owned(self, w: int) -> list[int]:
        return [v for v, o in enumerate(self.assignment) if o == w]


@dataclass(frozen=True)
class CutReport:
    cut_size: int
    pairs: tuple[tuple[int, ...], ...]  # symmetric k x k matrix of cross edges
    external_degree: tuple[int, ...]


@dataclass
class RedistributionResult:
    partition: Partition
    swaps: int
    passes: int
    initial_cut: int
    final_cut: int


def round_robin(num_vertices: int, k: int) -> Partition:
    if k < 1:
        raise ValueError("need at least one worker")
    return Partition(tuple(v % k for v in range(num_vertices)), k)


def _edge_array(g) -> np.ndarray:
    e = np.fromiter((x for edge in g.edges() for x in edge), dtype=np.int64)
    return e.reshape(-1, 2)


def cut_size(g, p: Partition) -> CutReport:
    if len(p) != g.num_vertices:
        raise ValueError(f"partition covers {len(p)} vertices, graph has {g.num_vertices}")
    e = _edge_array(g)
    a = np.asarray(p.assignment, dtype=np.int64)
    pairs = np.zeros((p.k, p.k), dtype=np.int64)
    ext = np.zeros(g.num_vertices, dtype=np.int64)
    if len(e):
        wu, wv = a[e[:, 0]], a[e[:, 1]]
        cross = wu != wv
        np.add.at(pairs, (wu[cross], wv[cross]), 1)
        np.add.at(ext, e[cross, 0], 1)
        np.add.at(ext, e[cross, 1], 1)
    pairs = pairs + pairs.T
    cut = int(np.triu(pairs, 1).sum())
    return CutReport(cut, tuple(map(tuple, pairs.tolist())), tuple(ext.tolist()))


def _adjacency(n: int, edges: np.ndarray) -> list[list[int]]:
    adj = [[] for _ in range(n)]
    for u, v in edges.tolist():
        adj[u].append(v)
        adj[v].append(u)
    return adj


def greedy_redistribute(g, p: Partition) -> RedistributionResult:
    """Swap the most cut-heavy vertex pair between two workers while the
    cut strictly shrinks; sweep worker pairs until a pass makes no swap.

    Ties on external degree go to the lowest vertex id.
    """
    if p.k < 2:
        raise ValueError("redistribution needs at least two workers")
    n, k = g.num_vertices, p.k
    if len(p) != n:
        raise ValueError(f"partition covers {len(p)} vertices, graph has {n}")
    e = _edge_array(g)
    adj = _adjacency(n, e)
    owner = np.asarray(p.assignment, dtype=np.int64)
    # deg[v, w]: edges between v and vertices on worker w
    deg = np.zeros((n, k), dtype=np.int64)
    if len(e):
        np.add.at(deg, (e[:, 0], owner[e[:, 1]]), 1)
        np.add.at(deg, (e[:, 1], owner[e[:, 0]]), 1)
    initial = cut = int((owner[e[:, 0]] != owner[e[:, 1]]).sum()) if len(e) else 0

    def move(v: int, src: int, dst: int) -> None:
        owner[v] = dst
        for x in adj[v]:
            deg[x, src] -= 1
            deg[x, dst] += 1

    swaps = passes = 0
    while True:
        passes += 1
        swapped = False
        for i in range(k):
            for j in range(i + 1, k):
                while True:
                    on_i = np.flatnonzero(owner == i)
                    on_j = np.flatnonzero(owner == j)
                    if not len(on_i) or not len(on_j):
                        break
                    u = int(on_i[np.argmax(deg[on_i, j])])
                    v = int(on_j[np.argmax(deg[on_j, i])])
                    shared = adj[u].count(v)
                    delta = int(deg[u, i] - deg[u, j] + deg[v, j] - deg[v, i]) + 2 * shared
                    if delta >= 0:
                        break
                    move(u, i, j)
                    move(v, j, i)
                    cut += delta
                    swaps += 1
                    swapped = True
        if not swapped:
            break
    part = Partition(tuple(owner.tolist()), k)
    return RedistributionResult(part, swaps, passes, initial, cut)


def partition_from_groups(groups: Iterable[Iterable[int]], num_vertices: int) -> Partition:
    """Place each listed vertex group on the worker with the group's index."""
    assignment = [None] * num_vertices
    groups = [list(gr) for gr in groups]
    for w, gr in enumerate(groups):
        for v in gr:
            assignment[v] = w
    if any(a is None for a in assignment):
        raise ValueError("every vertex must be placed")
    return Partition(tuple(assignment), len(groups))
