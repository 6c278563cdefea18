"""Multi-process transport over local stream sockets.

The calling process hosts the coordinator and worker 0; workers 1..k-1
run in forked processes.  Every pair of processes shares one socket, so
each (source, destination) channel is FIFO.  Frames use the binary
layout of ``messages.encode``.
"""

from __future__ import annotations

import multiprocessing as mp
import os
import selectors
import socket
import time
import traceback
from collections import deque

from ..partition import Partition
from ..rdg import RdgPrime
from .coordinator import Coordinator
from .messages import COORDINATOR, FrameReader, Kind, encode
from .worker import Worker


class TransportError(RuntimeError):
    pass


def _proc_of(endpoint: int) -> int:
    return 0 if endpoint == COORDINATOR else endpoint


class _Node:
    """Event loop for one process and the endpoints it hosts."""

    def __init__(self, me: int, endpoints: dict, socks: dict, deadline: float | None):
        self.me = me
        self.endpoints = endpoints
        self.socks = socks
        self.readers = {p: FrameReader() for p in socks}
        self.outbuf = {p: bytearray() for p in socks}
        self.local = deque()
        self.deadline = deadline
        self.sel = selectors.DefaultSelector()
        for p, s in socks.items():
            s.setblocking(False)
            self.sel.register(s, selectors.EVENT_READ, p)
        self.coordinator_out = 0
        self.eof_ok = lambda p: False

    def dispatch(self, msgs) -> None:
        for m in msgs:
            p = _proc_of(m.dst)
            if p == self.me:
                self.local.append(m)
            else:
                self.outbuf[p] += encode(m)
                if m.src == COORDINATOR:
                    self.coordinator_out += 1

    def _flush(self) -> None:
        for p, sock in self.socks.items():
            buf = self.outbuf[p]
            if buf:
                try:
                    n = sock.send(buf)
                except BlockingIOError:
                    continue
                del buf[:n]

    def pending_output(self) -> bool:
        return any(self.outbuf[p] for p in self.socks)

    def run(self, finished) -> None:
        while not finished():
            while self.local:
                m = self.local.popleft()
                self.dispatch(self.endpoints[m.dst].handle(m))
                if finished():
                    break
            self._flush()
            if finished():
                break
            timeout = None if self.deadline is None else max(0.0, self.deadline - time.monotonic())
            for p, s in list(self.socks.items()):
                mask = selectors.EVENT_READ | (selectors.EVENT_WRITE if self.outbuf[p] else 0)
                self.sel.modify(s, mask, p)
            events = self.sel.select(timeout)
            if not events and self.deadline is not None and time.monotonic() >= self.deadline:
                raise TransportError("timed out waiting for peers")
            for key, mask in events:
                p = key.data
                if mask & selectors.EVENT_READ:
                    try:
                        data = self.socks[p].recv(1 << 16)
                    except BlockingIOError:
                        continue
                    if not data:
                        if self.eof_ok(p):
                            # the peer halted first; it has nothing more to say
                            self.sel.unregister(self.socks.pop(p))
                            continue
                        raise TransportError(f"process {p} closed its connection")
                    self.local.extend(self.readers[p].feed(data))
        # drain what is still queued for peers (e.g. the final HALT reply)
        while self.pending_output():
            for p, s in self.socks.items():
                if self.outbuf[p]:
                    s.setblocking(True)
                    s.sendall(self.outbuf[p])
                    self.outbuf[p].clear()


def _child(wid: int, g: RdgPrime, owner, k: int, socks: dict, deadline) -> None:
    try:
        worker = Worker(wid, g, owner, k)
        node = _Node(wid, {wid: worker}, socks, deadline)
        node.eof_ok = lambda p: p != 0
        halted = []
        orig = worker.handle

        def handle(m):
            if m.kind == Kind.HALT:
                halted.append(True)
            return orig(m)

        worker.handle = handle
        node.run(lambda: bool(halted) and not node.local)
        for s in socks.values():
            s.close()
    except BaseException:
        traceback.print_exc()
        os._exit(1)
    os._exit(0)


def run_processes(g: RdgPrime, partition: Partition, max_models: int | None = None,
                  timeout: float | None = 600.0):
    k = partition.k
    pairs = {}
    for i in range(k):
        for j in range(i + 1, k):
            pairs[i, j] = socket.socketpair()
    deadline = None if timeout is None else time.monotonic() + timeout
    ctx = mp.get_context("fork")
    procs = []
    for w in range(1, k):
        socks = {}
        for (i, j), (a, b) in pairs.items():
            if i == w:
                socks[j] = a
            elif j == w:
                socks[i] = b
        pr = ctx.Process(target=_child, args=(w, g, partition.assignment, k, socks, deadline),
                         daemon=True)
        pr.start()
        procs.append(pr)
    own = {j: a for (i, j), (a, b) in pairs.items() if i == 0}
    for (i, j), (a, b) in pairs.items():
        # close the ends that belong to other processes
        if i != 0:
            a.close()
        b.close()
    coordinator = Coordinator(k, max_models)
    worker0 = Worker(0, g, partition.assignment, k)
    node = _Node(0, {COORDINATOR: coordinator, 0: worker0}, own, deadline)
    node.eof_ok = lambda p: coordinator.phase == "halt"
    try:
        node.dispatch(coordinator.start())
        node.run(lambda: coordinator.done)
    except TransportError as exc:
        for pr in procs:
            pr.kill()
        raise TransportError(f"run aborted: {exc}") from exc
    finally:
        for s in own.values():
            s.close()
    for pr in procs:
        pr.join(timeout=30)
        if pr.exitcode != 0:
            raise TransportError(f"worker process exited with {pr.exitcode}")
    totals = coordinator.worker_totals
    cross = sum(t[0] for t in totals.values())
    # workers count their own control sends; the coordinator's are counted here
    control = sum(t[1] for t in totals.values()) + node.coordinator_out
    counts = {"cross_worker_messages": cross, "coordination_messages": control}
    return coordinator.models, coordinator, counts
