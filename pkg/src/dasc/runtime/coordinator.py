"""Search control for the distributed solver.

The coordinator is co-located with worker 0.  It never touches graph
state; it only sequences phases and waits for quiescence between them:

    propagate -> report -> found -> sweep -> report -> (found ... | branch)

Quiescence uses a token ring with message counters and black/white
marks (Safra's scheme): the coordinator launches a token through workers
0..k-1, each adds its sent-minus-received count and taints the token if
it received anything since the token last passed.  A clean wave with a
zero total means no task is pending and nothing is in flight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..coloring import MINUS, PLUS
from .messages import COORDINATOR, Kind, Message


@dataclass
class Decision:
    kind: str                 # "decide", "backtrack", "model", "halt"
    rule: int | None = None
    color: int | None = None
    level: int | None = None


def coordinate_branch(reports, decisions) -> Decision:
    """Choose the next step from quiescent per-worker reports.

    ``reports`` holds ``(candidate, conflict, uncolored, swept)`` tuples;
    ``decisions`` is the stack of ``(rule, color)`` choices so far.
    """
    if any(rep[1] for rep in reports):
        return _backtrack(decisions)
    candidates = [rep[0] for rep in reports if rep[0] >= 0]
    if candidates:
        return Decision("decide", min(candidates), PLUS, len(decisions) + 1)
    if sum(rep[2] for rep in reports) == 0:
        return Decision("model")
    return _backtrack(decisions)


def _backtrack(decisions) -> Decision:
    for depth in range(len(decisions) - 1, -1, -1):
        rule, color = decisions[depth]
        if color == PLUS:
            return Decision("backtrack", rule, MINUS, depth)
    return Decision("halt")


@dataclass
class CoordinatorStats:
    decisions: int = 0
    backtracks: int = 0
    token_rounds: int = 0
    quiescences: int = 0
    pv_rounds: int = 0
    rejected_models: int = 0
    decision_log: list = field(default_factory=list)


class Coordinator:
    def __init__(self, k: int, max_models: int | None = None,
                 observer: Callable[[str, "Coordinator"], None] | None = None):
        self.k = k
        self.max_models = max_models or None
        self.observer = observer
        self.stats = CoordinatorStats()
        self.decisions = []
        self.models = []
        self.serial = 0
        self.epoch = 0
        self.phase = "idle"
        self.waiting_for = None
        self.replies = {}
        self.worker_totals = {}
        self.done = False
        self.count = 0
        self.black = False

    def _notify(self, event: str) -> None:
        if self.observer is not None:
            self.observer(event, self)

    def _broadcast(self, kind: int, payload: tuple = ()) -> list[Message]:
        self.count += self.k
        return [Message(kind, COORDINATOR, w, payload) for w in range(self.k)]

    def _token(self) -> Message:
        self.black = False
        self.stats.token_rounds += 1
        return Message(Kind.QUIESCENCE_TOKEN, COORDINATOR, 0, (0, 0))

    def _await_quiescence(self, phase: str, out: list) -> list[Message]:
        self.phase = phase
        self.waiting_for = None
        out.append(self._token())
        return out

    def _request(self, kind: int, phase: str) -> list[Message]:
        self.phase = phase
        self.waiting_for = kind
        self.replies = {}
        return self._broadcast(kind)

    def start(self) -> list[Message]:
        return self._await_quiescence("propagate", self._broadcast(Kind.START))

    def handle(self, msg: Message) -> list[Message]:
        if msg.kind == Kind.QUIESCENCE_TOKEN:
            black, total = msg.payload
            if black or self.black or total + self.count != 0:
                return [self._token()]
            self.stats.quiescences += 1
            self._notify("quiescence")
            return self._after_quiescence()
        self.count -= 1
        self.black = True
        if msg.kind != self.waiting_for:
            raise RuntimeError(f"unexpected {Kind(msg.kind).name} in phase {self.phase}")
        self.replies[msg.src] = msg.payload
        if len(self.replies) < self.k:
            return []
        replies = [self.replies[w] for w in range(self.k)]
        self.waiting_for = None
        if msg.kind == Kind.REPORT_CANDIDATES:
            return self._after_report(replies)
        if msg.kind == Kind.MODEL_FOUND:
            return self._after_model(replies)
        self.worker_totals = dict(enumerate(replies))
        self.phase = "done"
        self.done = True
        return []

    def _after_quiescence(self) -> list[Message]:
        if self.phase == "found":
            return self._await_quiescence("sweep", self._broadcast(Kind.SWEEP, (self.epoch,)))
        return self._request(Kind.REPORT_CANDIDATES, self.phase + "-report")

    def _found(self) -> list[Message]:
        self.epoch += 1
        self.stats.pv_rounds += 1
        return self._await_quiescence("found", self._broadcast(Kind.FOUND_START, (self.epoch,)))

    def _after_report(self, reports) -> list[Message]:
        conflict = any(rep[1] for rep in reports)
        if not conflict:
            if self.phase == "propagate-report":
                return self._found()
            if sum(rep[3] for rep in reports) > 0:
                return self._found()
            self._notify("fixpoint")
        d = coordinate_branch(reports, self.decisions)
        return self._apply(d)

    def _apply(self, d: Decision) -> list[Message]:
        if d.kind == "decide":
            self.decisions.append((d.rule, PLUS))
            return self._decide(d.rule, PLUS)
        if d.kind == "model":
            return self._request(Kind.MODEL_FOUND, "model")
        if d.kind == "halt":
            self.stats.backtracks += len(self.decisions)
            self.decisions.clear()
            return self._halt()
        # backtrack: drop levels above d.level and flip that decision
        self.stats.backtracks += len(self.decisions) - d.level
        del self.decisions[d.level:]
        self.decisions.append((d.rule, MINUS))
        out = self._broadcast(Kind.BACKTRACK, (d.level, self.serial + 1))
        self._notify("backtrack")
        return out + self._decide(d.rule, MINUS)

    def _decide(self, rule: int, color: int) -> list[Message]:
        self.serial += 1
        self.stats.decisions += 1
        self.stats.decision_log.append((rule, color))
        out = self._broadcast(Kind.DECIDE, (len(self.decisions), self.serial, rule, color))
        return self._await_quiescence("propagate", out)

    def _after_model(self, parts) -> list[Message]:
        if all(p[0] for p in parts):
            self.models.append(frozenset(a for p in parts for a in p[1:]))
            self._notify("model")
            if self.max_models and len(self.models) >= self.max_models:
                return self._halt()
        else:
            self.stats.rejected_models += 1
        return self._apply(_backtrack(self.decisions))

    def _halt(self) -> list[Message]:
        return self._request(Kind.HALT, "halt")
