import pytest
from hypothesis import given, settings, strategies as st

from aoisim.frames import (
    BROADCAST_ID,
    Beacon,
    CodecError,
    Feedback,
    FrameEncodeError,
    FrameFormatError,
    FrameIntegrityError,
    FrameLengthError,
    StatusUpdate,
    crc16_ccitt_false,
    decode,
    encode,
)


def crc16_reference(data: bytes) -> int:
    """Independent bit-by-bit CRC-16/CCITT-FALSE."""
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021) & 0xFFFF if crc & 0x8000 else (crc << 1) & 0xFFFF
    return crc


def test_crc_known_check_value():
    # the conventional check string for this CRC variant
    assert crc16_reference(b"123456789") == 0x29B1
    assert crc16_ccitt_false(b"123456789") == 0x29B1


@given(st.binary(min_size=0, max_size=64))
def test_crc_table_matches_bitwise_reference(data):
    assert crc16_ccitt_false(data) == crc16_reference(data)


def test_feedback_worked_example():
    frame = Feedback(bitrate_code=0x01, source_id=0x0001, slot_number=7,
                     feedback_id=0x0003)
    blob = encode(frame)
    head = bytes([0x03, 0x01, 0xFF, 0xFF, 0x00, 0x01,
                  0x00, 0x00, 0x00, 0x07, 0x00, 0x03, 0x00, 0x00])
    assert blob[:-2] == head
    assert blob[-2:] == crc16_reference(head).to_bytes(2, "big")
    assert decode(blob) == frame


def test_feedback_none_sentinel_roundtrip():
    frame = Feedback(bitrate_code=1, source_id=1, slot_number=9, feedback_id=None)
    blob = encode(frame)
    # wire carries 0x0000 in the feedback id field
    assert blob[10:12] == b"\x00\x00"
    assert decode(blob).feedback_id is None


def test_beacon_carries_interval():
    frame = Beacon(bitrate_code=2, source_id=1, beacon_number=12,
                   interval_slots=100)
    decoded = decode(encode(frame))
    assert decoded == frame
    assert decoded.interval_slots == 100


_beacons = st.builds(
    Beacon,
    bitrate_code=st.integers(0, 255),
    source_id=st.integers(0, 0xFFFF),
    beacon_number=st.integers(0, 0xFFFFFFFF),
    interval_slots=st.integers(0, 0xFFFFFFFF),
)
_status = st.builds(
    StatusUpdate,
    bitrate_code=st.integers(0, 255),
    destination_id=st.integers(0, 0xFFFF),
    source_id=st.integers(0, 0xFFFF),
    slot_number=st.integers(0, 0xFFFFFFFF),
    payload=st.binary(min_size=0, max_size=96),
)
_feedback = st.builds(
    Feedback,
    bitrate_code=st.integers(0, 255),
    source_id=st.integers(0, 0xFFFF),
    slot_number=st.integers(0, 0xFFFFFFFF),
    feedback_id=st.one_of(st.none(), st.integers(1, 0xFFFF)),
    payload=st.binary(min_size=0, max_size=96),
)
_frames = st.one_of(_beacons, _status, _feedback)


@given(_frames)
def test_roundtrip_identity(frame):
    assert decode(encode(frame)) == frame


@given(_frames)
def test_encoding_is_canonical(frame):
    assert encode(frame) == encode(frame)


def test_oversize_payload_rejected():
    with pytest.raises(FrameEncodeError):
        encode(StatusUpdate(0, 1, 2, 3, payload=b"x" * 1025))
    encode(StatusUpdate(0, 1, 2, 3, payload=b"x" * 1024))  # boundary fine


def test_field_range_checks():
    with pytest.raises(FrameEncodeError):
        encode(StatusUpdate(bitrate_code=256, destination_id=1, source_id=2,
                            slot_number=3))
    with pytest.raises(FrameEncodeError):
        encode(StatusUpdate(bitrate_code=0, destination_id=1, source_id=2,
                            slot_number=2**32))


def test_broadcast_enforced_on_encode():
    with pytest.raises(FrameEncodeError):
        encode(Beacon(bitrate_code=0, source_id=1, beacon_number=1,
                      interval_slots=100, destination_id=0x0001))
    with pytest.raises(FrameEncodeError):
        encode(Feedback(bitrate_code=0, source_id=1, slot_number=1,
                        feedback_id=None, destination_id=0x0001))


def test_explicit_zero_feedback_id_rejected():
    with pytest.raises(FrameEncodeError):
        encode(Feedback(bitrate_code=0, source_id=1, slot_number=1,
                        feedback_id=0))


def test_empty_bytes_is_length_error():
    with pytest.raises(FrameLengthError):
        decode(b"")


def test_unknown_tag_is_format_error():
    blob = bytearray(encode(Beacon(0, 1, 1, 100)))
    blob[0] = 0x7F
    with pytest.raises(FrameFormatError):
        decode(bytes(blob))


def test_truncation_is_length_error():
    blob = encode(StatusUpdate(0, 1, 2, 3, payload=b"hello"))
    for cut in range(len(blob)):
        with pytest.raises(FrameLengthError):
            decode(blob[:cut])


def test_trailing_bytes_rejected():
    blob = encode(Beacon(0, 1, 1, 100))
    with pytest.raises(FrameLengthError):
        decode(blob + b"\x00")


def test_corrupted_crc_detected():
    blob = bytearray(encode(Beacon(0, 1, 1, 100)))
    blob[-1] ^= 0xFF
    with pytest.raises(FrameIntegrityError):
        decode(bytes(blob))


FIXED_FRAMES = [
    Beacon(bitrate_code=1, source_id=0x0001, beacon_number=42,
           interval_slots=100),
    StatusUpdate(bitrate_code=1, destination_id=0x0001, source_id=0x0005,
                 slot_number=1234, payload=b"temperature=21.5"),
    Feedback(bitrate_code=1, source_id=0x0001, slot_number=1234,
             feedback_id=0x0005, payload=b"ok"),
]


@pytest.mark.parametrize("frame", FIXED_FRAMES, ids=["beacon", "status", "feedback"])
def test_every_single_bit_flip_detected(frame):
    blob = encode(frame)
    for byte_index in range(len(blob)):
        for bit in range(8):
            corrupted = bytearray(blob)
            corrupted[byte_index] ^= 1 << bit
            with pytest.raises(CodecError):
                decode(bytes(corrupted))


@settings(max_examples=300)
@given(_frames, st.data())
def test_random_single_bit_flip_never_silently_wrong(frame, data):
    blob = encode(frame)
    index = data.draw(st.integers(0, len(blob) * 8 - 1))
    corrupted = bytearray(blob)
    corrupted[index // 8] ^= 1 << (index % 8)
    try:
        decoded = decode(bytes(corrupted))
    except CodecError:
        return
    pytest.fail(f"corrupted frame decoded silently: {decoded!r}")
