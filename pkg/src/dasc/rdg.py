"""Rule dependency graphs.

``RdgClassic`` links rules to rules and exists for cross-checking.  The
solver works on ``RdgPrime``, which routes every dependency through an
atom node: rule nodes keep their rule id as vertex id, atom nodes follow
at ``num_rules + index``.  A constraint has no head edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .program import GroundProgram, atoms_of


@dataclass(frozen=True)
class EdgeStats:
    e0: int = 0
    e1: int = 0
    e2: int = 0
    rule_vertices: int = 0
    atom_vertices: int = 0

    @property
    def dependency_edges(self) -> int:
        return self.e0 + self.e1

    @property
    def total_edges(self) -> int:
        return self.e0 + self.e1 + self.e2


@dataclass(frozen=True)
class RdgClassic:
    num_rules: int
    e0: tuple[tuple[int, int], ...]
    e1: tuple[tuple[int, int], ...]

    @property
    def num_vertices(self) -> int:
        return self.num_rules

    def edges(self) -> Iterator[tuple[int, int]]:
        yield from self.e0
        yield from self.e1


def build_rdg_classic(program: GroundProgram) -> RdgClassic:
    definers = {}
    for r in program.rules:
        if r.head is not None:
            definers.setdefault(r.head, []).append(r.id)
    e0, e1 = [], []
    for r in program.rules:
        for a in sorted(r.body_pos):
            e0.extend((d, r.id) for d in definers.get(a, ()))
        for a in sorted(r.body_neg):
            e1.extend((d, r.id) for d in definers.get(a, ()))
    return RdgClassic(len(program.rules), tuple(sorted(e0)), tuple(sorted(e1)))


class RdgPrime:
    """Bipartite rule/atom graph with positive, negative and head edges.

    Besides the three edge lists the graph carries the adjacency the
    solver needs, indexed by atom *index* (vertex id minus ``num_rules``).
    """

    def __init__(self, program: GroundProgram):
        self.program = program
        rules = program.rules
        self.num_rules = len(rules)
        self.atoms = tuple(sorted(atoms_of(program)))
        self.atom_index = {a: i for i, a in enumerate(self.atoms)}
        self.num_atoms = len(self.atoms)
        self.num_vertices = self.num_rules + self.num_atoms

        idx = self.atom_index
        self.rule_pos = tuple(tuple(idx[a] for a in sorted(r.body_pos)) for r in rules)
        self.rule_neg = tuple(tuple(idx[a] for a in sorted(r.body_neg)) for r in rules)
        self.rule_head = tuple(None if r.head is None else idx[r.head] for r in rules)

        pos_succ = [[] for _ in self.atoms]
        neg_succ = [[] for _ in self.atoms]
        definers = [[] for _ in self.atoms]
        for r in range(self.num_rules):
            for a in self.rule_pos[r]:
                pos_succ[a].append(r)
            for a in self.rule_neg[r]:
                neg_succ[a].append(r)
            h = self.rule_head[r]
            if h is not None:
                definers[h].append(r)
        self.pos_succ = tuple(map(tuple, pos_succ))
        self.neg_succ = tuple(map(tuple, neg_succ))
        self.definers = tuple(map(tuple, definers))

        n = self.num_rules
        self.e0 = tuple((n + a, r) for r in range(n) for a in self.rule_pos[r])
        self.e1 = tuple((n + a, r) for r in range(n) for a in self.rule_neg[r])
        self.e2 = tuple((r, n + h) for r, h in enumerate(self.rule_head) if h is not None)

    def is_rule(self, v: int) -> bool:
        return v < self.num_rules

    def atom_vertex(self, atom_id: int) -> int:
        return self.num_rules + self.atom_index[atom_id]

    def vertex_label(self, v: int) -> str:
        if v < self.num_rules:
            return f"r{v}"
        return self.program.atom_text(self.atoms[v - self.num_rules])

    def is_constraint(self, r: int) -> bool:
        return self.rule_head[r] is None

    def edges(self) -> Iterator[tuple[int, int]]:
        yield from self.e0
        yield from self.e1
        yield from self.e2

    def neighbors(self) -> list[list[int]]:
        """Undirected adjacency lists, one entry per incident edge."""
        adj = [[] for _ in range(self.num_vertices)]
        for u, v in self.edges():
            adj[u].append(v)
            adj[v].append(u)
        return adj


def build_rdg_prime(program: GroundProgram) -> RdgPrime:
    return RdgPrime(program)


def edge_stats(g: RdgClassic | RdgPrime) -> EdgeStats:
    if isinstance(g, RdgPrime):
        return EdgeStats(len(g.e0), len(g.e1), len(g.e2), g.num_rules, g.num_atoms)
    return EdgeStats(len(g.e0), len(g.e1), 0, g.num_rules, 0)
