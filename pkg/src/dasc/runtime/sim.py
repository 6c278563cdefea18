"""Deterministic in-process transport.

Each ordered endpoint pair has a FIFO channel.  A scheduler picks which
non-empty channel delivers next; the receiving endpoint handles the
message to completion (draining its task stack) before the next pick.
"""

from __future__ import annotations

import random
from collections import deque
from typing import Callable

from ..partition import Partition
from ..rdg import RdgPrime
from .coordinator import Coordinator
from .messages import COORDINATOR, PROPAGATION, Kind, Message, encode
from .worker import Worker

SCHEDULERS = ("random", "fifo")


class SimRuntime:
    def __init__(self, g: RdgPrime, partition: Partition, max_models: int | None = None,
                 seed: int = 0, scheduler: str = "random", record: bool = False,
                 check_quiescence: bool = True,
                 observer: Callable[[str, "SimRuntime"], None] | None = None):
        if scheduler not in SCHEDULERS:
            raise ValueError(f"unknown scheduler {scheduler!r}")
        if len(partition) != g.num_vertices:
            raise ValueError("partition does not cover the graph")
        self.g = g
        self.k = partition.k
        self.partition = partition
        self.workers = [Worker(w, g, partition.assignment, self.k) for w in range(self.k)]
        self.coordinator = Coordinator(self.k, max_models, observer=self._observe)
        self.scheduler = scheduler
        self.rng = random.Random(seed)
        self.check_quiescence = check_quiescence
        self.observer = observer
        self.channels = {}
        self.active = []
        self.seq = 0
        self.transcript = [] if record else None
        self.delivered = 0
        self.cross_worker_messages = 0
        self.coordination_messages = 0
        self.token_messages = 0

    def _observe(self, event: str, coordinator: Coordinator) -> None:
        if event == "quiescence" and self.check_quiescence:
            pending = [key for key, ch in self.channels.items() if ch]
            busy = [w.id for w in self.workers if w.stack]
            if pending or busy:
                raise AssertionError(f"false quiescence: channels {pending}, stacks {busy}")
        if self.observer is not None:
            self.observer(event, self)

    def _send(self, msgs: list[Message]) -> None:
        for m in msgs:
            key = (m.src, m.dst)
            ch = self.channels.get(key)
            if ch is None:
                ch = self.channels[key] = deque()
            if not ch:
                self.active.append(key)
            ch.append((self.seq, m))
            self.seq += 1
            if m.kind in PROPAGATION:
                self.cross_worker_messages += 1
            elif max(m.src, 0) != max(m.dst, 0):
                if m.kind == Kind.QUIESCENCE_TOKEN:
                    self.token_messages += 1
                else:
                    self.coordination_messages += 1

    def _pick(self) -> Message:
        active = self.active
        if self.scheduler == "random":
            i = self.rng.randrange(len(active))
        else:
            i = min(range(len(active)), key=lambda j: self.channels[active[j]][0][0])
        ch = self.channels[active[i]]
        _, m = ch.popleft()
        if not ch:
            active[i] = active[-1]
            active.pop()
        return m

    def start(self) -> None:
        self._send(self.coordinator.start())

    def step(self) -> Message:
        """Deliver one message and queue whatever the receiver sends back."""
        if not self.active:
            raise RuntimeError("deadlock: no message in flight and no result")
        m = self._pick()
        self.delivered += 1
        if self.transcript is not None:
            self.transcript.append(encode(m))
        target = self.coordinator if m.dst == COORDINATOR else self.workers[m.dst]
        self._send(target.handle(m))
        return m

    def run(self) -> list[frozenset]:
        self.start()
        while not self.coordinator.done:
            self.step()
        return self.coordinator.models
