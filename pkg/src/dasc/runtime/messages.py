"""Message kinds and the binary frame used by socket transports.

Frame layout: 4-byte little-endian length of the rest, 1-byte kind, then
4-byte little-endian signed ints: source endpoint, destination endpoint
and the payload.  The coordinator endpoint is ``COORDINATOR`` (-1).
"""

from __future__ import annotations

import struct
from enum import IntEnum
from typing import NamedTuple

COORDINATOR = -1


class Kind(IntEnum):
    # propagation along graph edges: (target, source, edge, level, serial)
    ATOM_PROVEN_TRUE = 1
    ATOM_DEFINER_DISABLED = 2
    ATOM_PROVEN_FALSE = 3
    # local task only: (rule, color, level, serial)
    RULE_COLORED = 4
    # founding cascade: (target, source, edge, epoch)
    FOUNDED = 5
    # coordination
    START = 10
    DECIDE = 11              # (level, serial, rule, color)
    BACKTRACK = 12           # (level, serial)
    FOUND_START = 13         # (epoch,)
    SWEEP = 14               # (epoch,)
    REPORT_CANDIDATES = 15   # request (); reply (candidate, conflict, uncolored, swept)
    QUIESCENCE_TOKEN = 16    # (black, count)
    MODEL_FOUND = 17         # request (); reply (ok, atom ids...)
    HALT = 18                # request (); reply (cross msgs, control msgs, local events, handled)


PROPAGATION = frozenset({Kind.ATOM_PROVEN_TRUE, Kind.ATOM_DEFINER_DISABLED,
                         Kind.ATOM_PROVEN_FALSE, Kind.FOUNDED})

# edge labels carried in propagation payloads
E_POS, E_NEG, E_HEAD = 0, 1, 2


class Message(NamedTuple):
    kind: int
    src: int
    dst: int
    payload: tuple = ()


def encode(msg: Message) -> bytes:
    ints = (msg.src, msg.dst) + tuple(msg.payload)
    body = struct.pack(f"<B{len(ints)}i", msg.kind, *ints)
    return struct.pack("<I", len(body)) + body


def decode(frame: bytes) -> Message:
    """Decode one frame (length prefix included)."""
    (length,) = struct.unpack_from("<I", frame)
    if length != len(frame) - 4 or length < 9 or (length - 1) % 4:
        raise ValueError(f"malformed frame of {len(frame)} bytes")
    n = (length - 1) // 4
    kind, *ints = struct.unpack_from(f"<B{n}i", frame, 4)
    return Message(Kind(kind), ints[0], ints[1], tuple(ints[2:]))


class FrameReader:
    """Accumulates a byte stream and yields complete messages."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[Message]:
        self._buf += data
        out = []
        while len(self._buf) >= 4:
            (length,) = struct.unpack_from("<I", self._buf)
            if len(self._buf) < 4 + length:
                break
            out.append(decode(bytes(self._buf[:4 + length])))
            del self._buf[:4 + length]
        return out
