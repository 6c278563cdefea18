import struct

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dasc.runtime.messages import COORDINATOR, FrameReader, Kind, Message, decode, encode


def test_known_frame_bytes():
    m = Message(Kind.DECIDE, COORDINATOR, 2, (1, 5, 3, 1))
    frame = encode(m)
    assert frame == (b"\x19\x00\x00\x00" + b"\x0b"
                     + struct.pack("<6i", -1, 2, 1, 5, 3, 1))
    assert decode(frame) == m


def test_empty_payload():
    m = Message(Kind.HALT, COORDINATOR, 0)
    assert len(encode(m)) == 4 + 1 + 8
    assert decode(encode(m)) == m


@pytest.mark.parametrize("frame", [
    b"\x05\x00\x00\x00\x0b\x00\x00\x00\x00",   # length disagrees with the body
    b"\x01\x00\x00\x00\x0b",                   # no endpoints
    b"\x0a\x00\x00\x00" + b"\x0b" + b"\x00" * 9,  # body not a whole number of ints
])
def test_malformed_frames(frame):
    with pytest.raises(ValueError):
        decode(frame)


def test_unknown_kind():
    with pytest.raises(ValueError):
        decode(b"\x09\x00\x00\x00" + b"\x63" + struct.pack("<2i", 0, 1))


_msg = st.builds(
    Message,
    st.sampled_from(list(Kind)),
    st.integers(-1, 64),
    st.integers(-1, 64),
    st.lists(st.integers(-2**31, 2**31 - 1), max_size=6).map(tuple),
)


@given(st.lists(_msg, max_size=20), st.integers(1, 17))
def test_stream_reassembly(msgs, chunk):
    data = b"".join(encode(m) for m in msgs)
    reader = FrameReader()
    got = []
    for i in range(0, len(data), chunk):
        got += reader.feed(data[i:i + chunk])
    assert got == msgs
