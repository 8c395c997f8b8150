"""Bit-exact wire codec for the three over-the-air frame types.

Layout (all multi-byte fields big-endian):

    offset  size  field
    0       1     type tag: 0x01 beacon, 0x02 status update, 0x03 feedback
    1       1     bitrate code (opaque modulation label)
    2       2     destination id (0xFFFF = broadcast)
    4       2     source id
    6       4     beacon number (beacon) / slot number (others)
    10      2     feedback id, feedback frames only (0x0000 = no delivery)
    then    2     payload length
    then    var   payload (beacon: 4-byte beacon interval in slots)
    last    2     CRC-16/CCITT-FALSE over all preceding bytes

Beacons and feedback are broadcast (destination 0xFFFF); status updates
are addressed to the access point.  Encoding is canonical: equal frames
produce identical bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Union

BROADCAST_ID = 0xFFFF
NO_FEEDBACK_ID = 0x0000
MAX_PAYLOAD = 1024

TAG_BEACON = 0x01
TAG_STATUS_UPDATE = 0x02
TAG_FEEDBACK = 0x03


class CodecError(Exception):
    """Base for all encode/decode failures."""


class FrameEncodeError(CodecError):
    """Frame violates the wire contract (field range, payload size)."""


class FrameFormatError(CodecError):
    """Bytes are structurally not a known frame."""


class FrameLengthError(CodecError):
    """Byte sequence truncated or carrying trailing garbage."""


class FrameIntegrityError(CodecError):
    """Checksum mismatch."""


def crc16_ccitt_false(data: bytes) -> int:
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection."""
    crc = 0xFFFF
    for byte in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC_TABLE[(crc >> 8) ^ byte]
    return crc


def _build_crc_table() -> tuple[int, ...]:
    table = []
    for value in range(256):
        crc = value << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021) if crc & 0x8000 else (crc << 1)
        table.append(crc & 0xFFFF)
    return tuple(table)


_CRC_TABLE = _build_crc_table()


@dataclass(frozen=True)
class Beacon:
    """Timing reference broadcast by the access point; the payload
    carries the beacon interval as a 4-byte slot count."""

    bitrate_code: int
    source_id: int
    beacon_number: int
    interval_slots: int
    destination_id: int = BROADCAST_ID


@dataclass(frozen=True)
class StatusUpdate:
    """Device-to-AP report generated at will in the slot it is sent."""

    bitrate_code: int
    destination_id: int
    source_id: int
    slot_number: int
    payload: bytes = b""


@dataclass(frozen=True)
class Feedback:
    """AP broadcast naming the device whose update was received this
    slot; ``feedback_id`` None means nothing was received."""

    bitrate_code: int
    source_id: int
    slot_number: int
    feedback_id: int | None
    payload: bytes = b""
    destination_id: int = BROADCAST_ID


Frame = Union[Beacon, StatusUpdate, Feedback]


def _check_u8(value: int, name: str) -> None:
    if not 0 <= value <= 0xFF:
        raise FrameEncodeError(f"{name} out of range for 1 byte: {value}")


def _check_u16(value: int, name: str) -> None:
    if not 0 <= value <= 0xFFFF:
        raise FrameEncodeError(f"{name} out of range for 2 bytes: {value}")


def _check_u32(value: int, name: str) -> None:
    if not 0 <= value <= 0xFFFFFFFF:
        raise FrameEncodeError(f"{name} out of range for 4 bytes: {value}")


def encode(frame: Frame) -> bytes:
    """Serialize a frame, appending the CRC over everything before it."""
    if isinstance(frame, Beacon):
        if frame.destination_id != BROADCAST_ID:
            raise FrameEncodeError("beacons are broadcast frames")
        _check_u32(frame.beacon_number, "beacon_number")
        _check_u32(frame.interval_slots, "interval_slots")
        payload = struct.pack(">I", frame.interval_slots)
        body = struct.pack(
            ">BBHHI",
            TAG_BEACON,
            _checked_bitrate(frame),
            frame.destination_id,
            _checked_source(frame),
            frame.beacon_number,
        )
    elif isinstance(frame, StatusUpdate):
        _check_u16(frame.destination_id, "destination_id")
        _check_u32(frame.slot_number, "slot_number")
        payload = frame.payload
        body = struct.pack(
            ">BBHHI",
            TAG_STATUS_UPDATE,
            _checked_bitrate(frame),
            frame.destination_id,
            _checked_source(frame),
            frame.slot_number,
        )
    elif isinstance(frame, Feedback):
        if frame.destination_id != BROADCAST_ID:
            raise FrameEncodeError("feedback packets are broadcast frames")
        _check_u32(frame.slot_number, "slot_number")
        fid = NO_FEEDBACK_ID if frame.feedback_id is None else frame.feedback_id
        if fid == NO_FEEDBACK_ID and frame.feedback_id is not None:
            raise FrameEncodeError(
                "feedback_id 0 is the reserved no-delivery sentinel; use None"
            )
        _check_u16(fid, "feedback_id")
        payload = frame.payload
        body = struct.pack(
            ">BBHHIH",
            TAG_FEEDBACK,
            _checked_bitrate(frame),
            frame.destination_id,
            _checked_source(frame),
            frame.slot_number,
            fid,
        )
    else:
        raise FrameEncodeError(f"not a frame: {frame!r}")

    if len(payload) > MAX_PAYLOAD:
        raise FrameEncodeError(
            f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}"
        )
    head = body + struct.pack(">H", len(payload)) + payload
    return head + struct.pack(">H", crc16_ccitt_false(head))


def _checked_bitrate(frame: Frame) -> int:
    _check_u8(frame.bitrate_code, "bitrate_code")
    return frame.bitrate_code


def _checked_source(frame: Frame) -> int:
    _check_u16(frame.source_id, "source_id")
    return frame.source_id


def decode(data: bytes) -> Frame:
    """Exact inverse of :func:`encode`.

    Rejects anything that is not one whole, checksum-valid frame:
    unknown tags raise :class:`FrameFormatError`, truncation or trailing
    bytes raise :class:`FrameLengthError`, checksum failures raise
    :class:`FrameIntegrityError`.
    """
    if len(data) < 1:
        raise FrameLengthError("empty byte sequence")
    tag = data[0]
    if tag == TAG_BEACON:
        header_len = 10
    elif tag == TAG_STATUS_UPDATE:
        header_len = 10
    elif tag == TAG_FEEDBACK:
        header_len = 12
    else:
        raise FrameFormatError(f"unknown frame tag 0x{tag:02x}")

    if len(data) < header_len + 2:
        raise FrameLengthError(
            f"truncated frame: {len(data)} bytes, need >= {header_len + 2}"
        )
    (payload_len,) = struct.unpack_from(">H", data, header_len)
    total = header_len + 2 + payload_len + 2
    if len(data) < total:
        raise FrameLengthError(
            f"truncated frame: {len(data)} bytes, declared {total}"
        )
    if len(data) > total:
        raise FrameLengthError(
            f"{len(data) - total} trailing bytes after frame"
        )

    (crc_stored,) = struct.unpack_from(">H", data, total - 2)
    crc_actual = crc16_ccitt_false(data[: total - 2])
    if crc_stored != crc_actual:
        raise FrameIntegrityError(
            f"CRC mismatch: stored 0x{crc_stored:04x}, "
            f"computed 0x{crc_actual:04x}"
        )

    payload = data[header_len + 2 : header_len + 2 + payload_len]
    if tag == TAG_BEACON:
        _, bitrate, dest, source, number = struct.unpack_from(">BBHHI", data, 0)
        if dest != BROADCAST_ID:
            raise FrameFormatError("beacon with non-broadcast destination")
        if payload_len != 4:
            raise FrameFormatError(
                f"beacon payload must be 4 bytes, got {payload_len}"
            )
        (interval,) = struct.unpack(">I", payload)
        return Beacon(bitrate_code=bitrate, source_id=source,
                      beacon_number=number, interval_slots=interval)
    if tag == TAG_STATUS_UPDATE:
        _, bitrate, dest, source, number = struct.unpack_from(">BBHHI", data, 0)
        return StatusUpdate(bitrate_code=bitrate, destination_id=dest,
                            source_id=source, slot_number=number,
                            payload=payload)
    _, bitrate, dest, source, number, fid = struct.unpack_from(">BBHHIH", data, 0)
    if dest != BROADCAST_ID:
        raise FrameFormatError("feedback with non-broadcast destination")
    return Feedback(bitrate_code=bitrate, source_id=source, slot_number=number,
                    feedback_id=None if fid == NO_FEEDBACK_ID else fid,
                    payload=payload)
