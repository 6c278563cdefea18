"""Coloring operators over the rule/atom dependency graph and the
sequential backtracking search built on them.

A coloring assigns rules to ``PLUS`` (generating) or ``MINUS``
(excluded).  Rule status is read off per-atom counters: an atom is
proven true once one defining rule is ``PLUS`` and proven false once all
of its defining rules are ``MINUS`` (immediately, if it has none).

The functional operators (``op_P``, ``op_V``, ...) take and return
immutable ``Coloring`` values and are meant for testing and inspection.
``solve`` drives a ``Propagator``, which keeps the same counters
incrementally and undoes them from a trail on backtracking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator

from .rdg import RdgPrime

PLUS = 1
MINUS = -1
UNCOLORED = 0


@dataclass(frozen=True)
class Coloring:
    plus: frozenset = frozenset()
    minus: frozenset = frozenset()

    @classmethod
    def of(cls, plus=(), minus=()) -> "Coloring":
        return cls(frozenset(plus), frozenset(minus))

    @property
    def colored(self) -> frozenset:
        return self.plus | self.minus

    def is_total(self, num_rules: int) -> bool:
        return len(self.plus | self.minus) == num_rules

    def leq(self, other: "Coloring") -> bool:
        return self.plus <= other.plus and self.minus <= other.minus


@dataclass(frozen=True)
class Conflict:
    """Outcome of an operator whose result is not a coloring."""

    rules: frozenset


@dataclass(frozen=True)
class RuleStatus:
    supported: bool
    unsupported: bool
    blocked: bool
    unblocked: bool


@dataclass(frozen=True)
class AtomState:
    total_defining: int
    minus_defining: int
    proven_true: bool

    @property
    def proven_false(self) -> bool:
        return self.minus_defining == self.total_defining


class ColoringState:
    """Mutable coloring with incrementally maintained support counters."""

    def __init__(self, g: RdgPrime):
        self.g = g
        self.color = [UNCOLORED] * g.num_rules
        self.n_def = [len(d) for d in g.definers]
        self.plus_def = [0] * g.num_atoms
        self.minus_def = [0] * g.num_atoms
        self.npos = [len(p) for p in g.rule_pos]
        self.nneg = [len(n) for n in g.rule_neg]
        self.pos_true = [0] * g.num_rules
        self.neg_true = [0] * g.num_rules
        undefined = [n == 0 for n in self.n_def]
        self.pos_false = [sum(undefined[a] for a in p) for p in g.rule_pos]
        self.neg_false = [sum(undefined[a] for a in n) for n in g.rule_neg]

    @classmethod
    def from_coloring(cls, g: RdgPrime, c: Coloring) -> "ColoringState":
        st = cls(g)
        for r in sorted(c.plus):
            st.assign(r, PLUS)
        for r in sorted(c.minus):
            st.assign(r, MINUS)
        return st

    def assign(self, r: int, c: int) -> tuple[int, ...]:
        """Color ``r`` and return the rules whose counters moved."""
        self.color[r] = c
        h = self.g.rule_head[r]
        if h is None:
            return ()
        if c == PLUS:
            self.plus_def[h] += 1
            if self.plus_def[h] != 1:
                return ()
            pos_cnt, neg_cnt = self.pos_true, self.neg_true
        else:
            self.minus_def[h] += 1
            if self.minus_def[h] != self.n_def[h]:
                return ()
            pos_cnt, neg_cnt = self.pos_false, self.neg_false
        ps, ns = self.g.pos_succ[h], self.g.neg_succ[h]
        for r2 in ps:
            pos_cnt[r2] += 1
        for r2 in ns:
            neg_cnt[r2] += 1
        return ps + ns

    def unassign(self, r: int) -> None:
        c = self.color[r]
        self.color[r] = UNCOLORED
        h = self.g.rule_head[r]
        if h is None:
            return
        if c == PLUS:
            changed = self.plus_def[h] == 1
            self.plus_def[h] -= 1
            pos_cnt, neg_cnt = self.pos_true, self.neg_true
        else:
            changed = self.minus_def[h] == self.n_def[h]
            self.minus_def[h] -= 1
            pos_cnt, neg_cnt = self.pos_false, self.neg_false
        if changed:
            for r2 in self.g.pos_succ[h]:
                pos_cnt[r2] -= 1
            for r2 in self.g.neg_succ[h]:
                neg_cnt[r2] -= 1

    def supported(self, r: int) -> bool:
        return self.pos_true[r] == self.npos[r]

    def status(self, r: int) -> RuleStatus:
        return RuleStatus(
            supported=self.pos_true[r] == self.npos[r],
            unsupported=self.pos_false[r] > 0,
            blocked=self.neg_true[r] > 0,
            unblocked=self.neg_false[r] == self.nneg[r],
        )

    def atom_state(self, a: int) -> AtomState:
        return AtomState(self.n_def[a], self.minus_def[a], self.plus_def[a] > 0)

    def coloring(self) -> Coloring:
        return Coloring(
            frozenset(r for r, c in enumerate(self.color) if c == PLUS),
            frozenset(r for r, c in enumerate(self.color) if c == MINUS),
        )

    def counters(self) -> tuple:
        return (self.plus_def, self.minus_def, self.pos_true, self.pos_false,
                self.neg_true, self.neg_false)

    def recount(self) -> tuple:
        """The counters of ``counters()``, recomputed from the colors alone."""
        g = self.g
        plus_def = [sum(self.color[r] == PLUS for r in d) for d in g.definers]
        minus_def = [sum(self.color[r] == MINUS for r in d) for d in g.definers]
        true = [p > 0 for p in plus_def]
        false = [m == n for m, n in zip(minus_def, self.n_def)]
        return (
            plus_def, minus_def,
            [sum(true[a] for a in p) for p in g.rule_pos],
            [sum(false[a] for a in p) for p in g.rule_pos],
            [sum(true[a] for a in n) for n in g.rule_neg],
            [sum(false[a] for a in n) for n in g.rule_neg],
        )

    def counters_consistent(self) -> bool:
        return self.counters() == self.recount()


def _state(g: RdgPrime, c: Coloring) -> ColoringState:
    if c.plus & c.minus:
        raise ValueError("coloring is not conflict-free")
    return ColoringState.from_coloring(g, c)


def rule_status(g: RdgPrime, c: Coloring, r: int) -> RuleStatus:
    return _state(g, c).status(r)


def atom_state(g: RdgPrime, c: Coloring, atom_id: int) -> AtomState:
    return _state(g, c).atom_state(g.atom_index[atom_id])


def op_P(g: RdgPrime, c: Coloring) -> Coloring | Conflict:
    st = _state(g, c)
    plus, minus = set(c.plus), set(c.minus)
    for r in range(g.num_rules):
        s = st.status(r)
        if s.supported and s.unblocked:
            plus.add(r)
        if s.unsupported or s.blocked:
            minus.add(r)
    bad = (plus & minus) | {r for r in plus if g.rule_head[r] is None}
    if bad:
        return Conflict(frozenset(bad))
    return Coloring(frozenset(plus), frozenset(minus))


def op_T_star(g: RdgPrime, c: Coloring) -> Coloring:
    """Close ``c`` under adding supported rules that are not ``MINUS``."""
    st = _state(g, c)
    work = list(range(g.num_rules - 1, -1, -1))
    while work:
        r = work.pop()
        if st.color[r] == UNCOLORED and st.supported(r):
            work.extend(st.assign(r, PLUS))
    return Coloring(frozenset(r for r, col in enumerate(st.color) if col == PLUS), c.minus)


def founded_rules(g: RdgPrime, c: Coloring) -> frozenset:
    """Rules reachable by support from scratch without using ``MINUS`` rules."""
    return op_T_star(g, Coloring(frozenset(), c.minus)).plus


def op_V(g: RdgPrime, c: Coloring) -> Coloring | Conflict:
    unfounded = frozenset(range(g.num_rules)) - founded_rules(g, c)
    if c.plus & unfounded:
        return Conflict(c.plus & unfounded)
    return Coloring(c.plus, c.minus | unfounded)


def op_PV_star(g: RdgPrime, c: Coloring) -> Coloring | Conflict:
    while True:
        p = op_P(g, c)
        if isinstance(p, Conflict):
            return p
        v = op_V(g, p)
        if isinstance(v, Conflict) or v == c:
            return v
        c = v


def branch_D(g: RdgPrime, c: Coloring, r: int, color: int) -> Coloring:
    if r in c.plus or r in c.minus:
        raise ValueError(f"rule {r} is already colored")
    if not _state(g, c).supported(r):
        raise ValueError(f"rule {r} is not supported")
    if color == PLUS:
        if g.rule_head[r] is None:
            raise ValueError(f"constraint {r} cannot be colored PLUS")
        return Coloring(c.plus | {r}, c.minus)
    if color == MINUS:
        return Coloring(c.plus, c.minus | {r})
    raise ValueError(f"unknown color {color!r}")


def is_admissible(g: RdgPrime, c: Coloring) -> bool:
    if not c.is_total(g.num_rules):
        raise ValueError("admissibility is defined for total colorings only")
    st = _state(g, c)
    for r in range(g.num_rules):
        s = st.status(r)
        if r in c.plus:
            if g.rule_head[r] is None or not (s.supported and s.unblocked):
                return False
        elif not (s.unsupported or s.blocked):
            return False
    return op_V(g, c) == c


def answer_set_of(g: RdgPrime, c: Coloring) -> frozenset:
    return frozenset(g.atoms[g.rule_head[r]] for r in c.plus)


# ---------------------------------------------------------------- search

@dataclass
class SearchStats:
    decisions: int = 0
    backtracks: int = 0
    conflicts: int = 0
    models: int = 0
    decision_log: list = field(default_factory=list)


class Propagator(ColoringState):
    """Incremental PV closure with a trail segmented by decision level."""

    def __init__(self, g: RdgPrime, trace: Callable[[str], None] | None = None,
                 check_counters: bool = False):
        super().__init__(g)
        self.trail = []
        self.marks = []
        self.conflict = False
        self.trace = trace
        self.check_counters = check_counters

    @property
    def level(self) -> int:
        """Current decision level; the root closure is level 0."""
        return max(len(self.marks) - 1, 0)

    def _log(self, text: str) -> None:
        if self.trace is not None:
            self.trace(f"[{self.level}] {text}")

    def _evaluate(self, r: int, work: list) -> None:
        c = self.color[r]
        sup = self.pos_true[r] == self.npos[r]
        unblk = self.neg_false[r] == self.nneg[r]
        out = self.pos_false[r] > 0 or self.neg_true[r] > 0
        if c == UNCOLORED:
            if sup and unblk:
                if self.g.rule_head[r] is None:
                    self.conflict = True
                else:
                    self._assign(r, PLUS, work)
            elif out:
                self._assign(r, MINUS, work)
        elif c == PLUS:
            if out:
                self.conflict = True
        elif sup and unblk:
            self.conflict = True

    def _assign(self, r: int, c: int, work: list) -> None:
        self.trail.append(r)
        work.extend(self.assign(r, c))
        work.append(r)

    def _close_p(self, work: list) -> bool:
        before = len(self.trail)
        while work and not self.conflict:
            self._evaluate(work.pop(), work)
        if self.trace is not None:
            added = self.trail[before:]
            np = sum(self.color[r] == PLUS for r in added)
            self._log(f"P +{np} -{len(added) - np}" + (" conflict" if self.conflict else ""))
        self._verify()
        return not self.conflict

    def _apply_v(self, work: list) -> int:
        g = self.g
        founded = bytearray(g.num_rules)
        atom_founded = bytearray(g.num_atoms)
        count = [0] * g.num_rules
        stack = [r for r in range(g.num_rules) if self.npos[r] == 0 and self.color[r] != MINUS]
        while stack:
            r = stack.pop()
            if founded[r]:
                continue
            founded[r] = 1
            h = g.rule_head[r]
            if h is None or atom_founded[h]:
                continue
            atom_founded[h] = 1
            for r2 in g.pos_succ[h]:
                count[r2] += 1
                if count[r2] == self.npos[r2] and self.color[r2] != MINUS:
                    stack.append(r2)
        swept = 0
        for r in range(g.num_rules):
            if founded[r]:
                continue
            if self.color[r] == PLUS:
                self.conflict = True
            elif self.color[r] == UNCOLORED:
                self._assign(r, MINUS, work)
                swept += 1
        self._log(f"V -{swept}" + (" conflict" if self.conflict else ""))
        self._verify()
        return swept

    def _verify(self) -> None:
        if self.check_counters and not self.counters_consistent():
            raise AssertionError("incremental counters diverged from recount")

    def _fixpoint(self, work: list) -> bool:
        while self._close_p(work):
            if self._apply_v(work) == 0 or self.conflict:
                break
        return not self.conflict

    def start(self) -> bool:
        """Open level 0 and compute the initial PV closure."""
        self.marks.append(0)
        return self._fixpoint(list(range(self.g.num_rules - 1, -1, -1)))

    def decide(self, r: int, c: int) -> bool:
        self.marks.append(len(self.trail))
        self._log(f"D{'+' if c == PLUS else '-'} r{r}")
        work = []
        self._assign(r, c, work)
        return self._fixpoint(work)

    def undo_level(self) -> None:
        mark = self.marks.pop()
        while len(self.trail) > mark:
            self.unassign(self.trail.pop())
        self.conflict = False
        self._log("backtrack")

    def branch_candidate(self) -> int | None:
        """Lowest-id uncolored, supported rule that is not a constraint."""
        head = self.g.rule_head
        for r, c in enumerate(self.color):
            if c == UNCOLORED and head[r] is not None and self.pos_true[r] == self.npos[r]:
                return r
        return None

    def is_total(self) -> bool:
        return len(self.trail) == self.g.num_rules


def solve(g: RdgPrime, max_models: int | None = None,
          trace: Callable[[str], None] | None = None,
          stats: SearchStats | None = None,
          check_counters: bool = False) -> Iterator[Coloring]:
    """Yield admissible colorings by depth-first search.

    Branches on the lowest-id supported uncolored rule, ``PLUS`` first,
    and backtracks chronologically.  ``max_models`` of ``None`` or 0
    means enumerate everything.
    """
    stats = stats if stats is not None else SearchStats()
    prop = Propagator(g, trace=trace, check_counters=check_counters)
    ok = prop.start()
    decisions = []  # (rule, color) per open level above 0
    while True:
        if ok:
            r = prop.branch_candidate()
            if r is not None:
                decisions.append((r, PLUS))
                stats.decisions += 1
                stats.decision_log.append((r, PLUS))
                ok = prop.decide(r, PLUS)
                continue
            if prop.is_total():
                c = prop.coloring()
                if is_admissible(g, c):
                    stats.models += 1
                    prop._log("model")
                    yield c
                    if max_models and stats.models >= max_models:
                        return
        else:
            stats.conflicts += 1
        # backtrack to the deepest decision whose MINUS branch is untried
        while decisions:
            r, c = decisions.pop()
            prop.undo_level()
            stats.backtracks += 1
            if c == PLUS:
                decisions.append((r, MINUS))
                stats.decisions += 1
                stats.decision_log.append((r, MINUS))
                ok = prop.decide(r, MINUS)
                break
        else:
            return
