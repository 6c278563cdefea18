"""A worker owns a slice of the rule/atom graph and propagates changes
by notify_change: a vertex whose state changes tells its successors, and
only those.  Notifications for owned vertices go on the local task
stack; everything else leaves as a message.

Propagation messages are tagged with ``(level, serial)``.  A message can
overtake the coordinator's ``DECIDE``/``BACKTRACK`` on another channel,
so a worker opens or rewinds decision levels lazily: a tag with a serial
it has not seen at that level means the old branch is dead.
"""

from __future__ import annotations

from ..coloring import MINUS, PLUS, UNCOLORED
from ..rdg import RdgPrime
from .messages import COORDINATOR, E_HEAD, E_NEG, E_POS, Kind, Message

# trail entry codes
_COLOR, _PLUS_DEF, _MINUS_DEF, _POS_TRUE, _POS_FALSE, _NEG_TRUE, _NEG_FALSE, _CONFLICT = range(8)


class NotOwned(LookupError):
    pass


class Worker:
    def __init__(self, wid: int, g: RdgPrime, owner, k: int):
        self.id = wid
        self.g = g
        self.owner = owner
        self.k = k
        R = g.num_rules
        self.rules = [r for r in range(R) if owner[r] == wid]
        self.atoms = [a for a in range(g.num_atoms) if owner[R + a] == wid]

        self.color = dict.fromkeys(self.rules, UNCOLORED)
        self.pos_true = dict.fromkeys(self.rules, 0)
        self.pos_false = dict.fromkeys(self.rules, 0)
        self.neg_true = dict.fromkeys(self.rules, 0)
        self.neg_false = dict.fromkeys(self.rules, 0)
        self.n_def = {a: len(g.definers[a]) for a in self.atoms}
        self.plus_def = dict.fromkeys(self.atoms, 0)
        self.minus_def = dict.fromkeys(self.atoms, 0)

        self.serials = [0]      # serial of each open decision level
        self.marks = [0]        # trail length when each level opened
        self.trail = []
        self.conflict = False
        self.stack = []

        self.epoch = 0
        self.founded = set()
        self.found_cnt = {}
        self.atom_founded = set()
        self.swept = 0

        # termination detection: basic messages sent minus received
        self.count = 0
        self.black = False

        self.cross_sent = 0
        self.control_sent = 0
        self.local_events = 0
        self.handled = 0

    @property
    def level(self) -> int:
        return len(self.serials) - 1

    # ------------------------------------------------------------ levels

    def _sync(self, level: int, serial: int) -> None:
        if level > self.level:
            if level != self.level + 1:
                raise RuntimeError(f"worker {self.id} skipped to level {level} from {self.level}")
            self._open(serial)
        elif self.serials[level] != serial:
            if serial < self.serials[level]:
                raise RuntimeError(f"worker {self.id} got a stale message for level {level}")
            self.undo_to(level - 1)
            self._open(serial)

    def _open(self, serial: int) -> None:
        self.serials.append(serial)
        self.marks.append(len(self.trail))

    def undo_to(self, level: int) -> None:
        """Drop every level above ``level``, restoring the state it had."""
        while self.level > level:
            self.serials.pop()
            mark = self.marks.pop()
            trail = self.trail
            while len(trail) > mark:
                code, x = trail.pop()
                if code == _COLOR:
                    self.color[x] = UNCOLORED
                elif code == _PLUS_DEF:
                    self.plus_def[x] -= 1
                elif code == _MINUS_DEF:
                    self.minus_def[x] -= 1
                elif code == _POS_TRUE:
                    self.pos_true[x] -= 1
                elif code == _POS_FALSE:
                    self.pos_false[x] -= 1
                elif code == _NEG_TRUE:
                    self.neg_true[x] -= 1
                elif code == _NEG_FALSE:
                    self.neg_false[x] -= 1
                else:
                    self.conflict = False

    # ------------------------------------------------------- propagation

    def _route(self, kind: int, target: int, payload: tuple, out: list) -> None:
        w = self.owner[target]
        if w == self.id:
            self.stack.append((kind, payload))
        else:
            out.append(Message(kind, self.id, w, payload))
            self.cross_sent += 1

    def _set_conflict(self) -> None:
        if not self.conflict:
            self.conflict = True
            self.trail.append((_CONFLICT, 0))

    def _color(self, r: int, c: int) -> None:
        self.color[r] = c
        self.trail.append((_COLOR, r))
        self.stack.append((Kind.RULE_COLORED, (r, c)))

    def _evaluate(self, r: int) -> None:
        g = self.g
        c = self.color[r]
        sup = self.pos_true[r] == len(g.rule_pos[r])
        unblk = self.neg_false[r] == len(g.rule_neg[r])
        out = self.pos_false[r] > 0 or self.neg_true[r] > 0
        if c == UNCOLORED:
            if sup and unblk:
                if g.rule_head[r] is None:
                    self._set_conflict()
                else:
                    self._color(r, PLUS)
            elif out:
                self._color(r, MINUS)
        elif c == PLUS:
            if out:
                self._set_conflict()
        elif sup and unblk:
            self._set_conflict()

    def _notify_atom(self, a: int, kind: int, out: list) -> None:
        g = self.g
        v = g.num_rules + a
        tag = (self.level, self.serials[-1])
        for r in g.pos_succ[a]:
            self._route(kind, r, (r, v, E_POS) + tag, out)
        for r in g.neg_succ[a]:
            self._route(kind, r, (r, v, E_NEG) + tag, out)

    def step(self, kind: int, payload: tuple, out: list) -> None:
        """Process one local event; follow-ups go to the stack or ``out``."""
        g = self.g
        R = g.num_rules
        self.local_events += 1
        if kind == Kind.RULE_COLORED:
            r, c = payload
            h = g.rule_head[r]
            if h is not None:
                k = Kind.ATOM_PROVEN_TRUE if c == PLUS else Kind.ATOM_DEFINER_DISABLED
                self._route(k, R + h, (R + h, r, E_HEAD, self.level, self.serials[-1]), out)
            self._evaluate(r)
            return
        target, source, edge = payload[0], payload[1], payload[2]
        if self.owner[target] != self.id:
            raise NotOwned(f"worker {self.id} does not own vertex {target}")
        if kind == Kind.FOUNDED:
            self._on_founded(target, payload[3], out)
        elif target >= R:
            a = target - R
            if kind == Kind.ATOM_PROVEN_TRUE:
                self.plus_def[a] += 1
                self.trail.append((_PLUS_DEF, a))
                if self.plus_def[a] == 1:
                    self._notify_atom(a, Kind.ATOM_PROVEN_TRUE, out)
            else:
                self.minus_def[a] += 1
                self.trail.append((_MINUS_DEF, a))
                if self.minus_def[a] == self.n_def[a]:
                    self._notify_atom(a, Kind.ATOM_PROVEN_FALSE, out)
        else:
            r = target
            if kind == Kind.ATOM_PROVEN_TRUE:
                if edge == E_POS:
                    self.pos_true[r] += 1
                    self.trail.append((_POS_TRUE, r))
                else:
                    self.neg_true[r] += 1
                    self.trail.append((_NEG_TRUE, r))
            elif edge == E_POS:
                self.pos_false[r] += 1
                self.trail.append((_POS_FALSE, r))
            else:
                self.neg_false[r] += 1
                self.trail.append((_NEG_FALSE, r))
            self._evaluate(r)

    def _drain(self, out: list) -> None:
        stack = self.stack
        while stack:
            kind, payload = stack.pop()
            self.step(kind, payload, out)

    # ---------------------------------------------------------- founding

    def _found_sync(self, epoch: int) -> None:
        if epoch > self.epoch:
            self.epoch = epoch
            self.founded = set()
            self.found_cnt = {}
            self.atom_founded = set()
            self.swept = 0

    def _found_rule(self, r: int, out: list) -> None:
        self.founded.add(r)
        h = self.g.rule_head[r]
        if h is not None:
            v = self.g.num_rules + h
            self._route(Kind.FOUNDED, v, (v, r, E_HEAD, self.epoch), out)

    def _on_founded(self, target: int, epoch: int, out: list) -> None:
        self._found_sync(epoch)
        g = self.g
        R = g.num_rules
        if target >= R:
            a = target - R
            if a not in self.atom_founded:
                self.atom_founded.add(a)
                for r in g.pos_succ[a]:
                    self._route(Kind.FOUNDED, r, (r, target, E_POS, epoch), out)
        else:
            r = target
            n = self.found_cnt.get(r, 0) + 1
            self.found_cnt[r] = n
            if n == len(g.rule_pos[r]) and self.color[r] != MINUS and r not in self.founded:
                self._found_rule(r, out)

    # ---------------------------------------------------------- messages

    def handle(self, msg: Message) -> list[Message]:
        out = []
        kind = msg.kind
        p = msg.payload
        if kind == Kind.QUIESCENCE_TOKEN:
            nxt = self.id + 1 if self.id + 1 < self.k else COORDINATOR
            token = (int(p[0] or self.black), p[1] + self.count)
            self.black = False
            if max(nxt, 0) != self.id:
                self.control_sent += 1
            return [Message(Kind.QUIESCENCE_TOKEN, self.id, nxt, token)]
        self.count -= 1
        self.black = True
        self.handled += 1

        if kind in (Kind.ATOM_PROVEN_TRUE, Kind.ATOM_DEFINER_DISABLED, Kind.ATOM_PROVEN_FALSE):
            self._sync(p[3], p[4])
            self.stack.append((kind, p))
        elif kind == Kind.FOUNDED:
            self.stack.append((kind, p))
        elif kind == Kind.START:
            self._start(out)
        elif kind == Kind.DECIDE:
            level, serial, r, c = p
            self._sync(level, serial)
            if self.owner[r] == self.id:
                self._color(r, c)
        elif kind == Kind.BACKTRACK:
            level, serial = p
            if self.level > level and self.serials[level + 1] < serial:
                self.undo_to(level)
        elif kind == Kind.FOUND_START:
            self._found_sync(p[0])
            for r in self.rules:
                if not self.g.rule_pos[r] and self.color[r] != MINUS and r not in self.founded:
                    self._found_rule(r, out)
        elif kind == Kind.SWEEP:
            self._found_sync(p[0])
            for r in self.rules:
                if r in self.founded:
                    continue
                if self.color[r] == PLUS:
                    self._set_conflict()
                elif self.color[r] == UNCOLORED:
                    self._color(r, MINUS)
                    self.swept += 1
        elif kind == Kind.REPORT_CANDIDATES:
            out.append(Message(Kind.REPORT_CANDIDATES, self.id, COORDINATOR, self.report()))
        elif kind == Kind.MODEL_FOUND:
            out.append(Message(Kind.MODEL_FOUND, self.id, COORDINATOR, self.model_part()))
        elif kind == Kind.HALT:
            out.append(Message(Kind.HALT, self.id, COORDINATOR,
                               (self.cross_sent, self.control_sent + (self.id != 0),
                                self.local_events, self.handled)))
        else:
            raise ValueError(f"worker {self.id} cannot handle {kind!r}")
        self._drain(out)
        self.count += len(out)
        if self.id != 0 and kind in (Kind.REPORT_CANDIDATES, Kind.MODEL_FOUND):
            self.control_sent += 1
        return out

    def _start(self, out: list) -> None:
        for a in self.atoms:
            if self.n_def[a] == 0:
                self._notify_atom(a, Kind.ATOM_PROVEN_FALSE, out)
        for r in self.rules:
            self._evaluate(r)

    def report(self) -> tuple:
        head, npos = self.g.rule_head, self.g.rule_pos
        candidate = -1
        uncolored = 0
        for r in self.rules:
            if self.color[r] == UNCOLORED:
                uncolored += 1
                if candidate < 0 and head[r] is not None and self.pos_true[r] == len(npos[r]):
                    candidate = r
        return (candidate, int(self.conflict), uncolored, self.swept)

    def model_part(self) -> tuple:
        """Locally checkable admissibility plus the owned true atoms."""
        g = self.g
        ok = True
        for r in self.rules:
            sup = self.pos_true[r] == len(g.rule_pos[r])
            unblk = self.neg_false[r] == len(g.rule_neg[r])
            c = self.color[r]
            if c == PLUS:
                ok &= g.rule_head[r] is not None and sup and unblk
            elif c == MINUS:
                ok &= self.pos_false[r] > 0 or self.neg_true[r] > 0
            else:
                ok = False
        atoms = tuple(g.atoms[a] for a in self.atoms if self.plus_def[a] > 0)
        return (int(ok),) + atoms

    def snapshot(self) -> dict:
        return {
            "color": dict(self.color),
            "pos_true": dict(self.pos_true), "pos_false": dict(self.pos_false),
            "neg_true": dict(self.neg_true), "neg_false": dict(self.neg_false),
            "plus_def": dict(self.plus_def), "minus_def": dict(self.minus_def),
        }


def notify_change_step(worker: Worker, kind: int, payload: tuple) -> list[Message]:
    """Run one event on ``worker`` and return the messages it emits."""
    out = []
    worker.step(kind, payload, out)
    return out
