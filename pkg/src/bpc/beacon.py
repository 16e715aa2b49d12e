"""Beacon message with piggybacked power fields and its 48-byte wire format.

Layout (big-endian)::

    offset  size  field
         0     2  seq            low 12 bits; high 4 bits (fragment) ignored
         2     2  interval_ms
         4     4  timestamp_ms
         8     8  elp            opaque identifier
        16     4  pos_x          signed, meters x 100
        20     4  pos_y          signed, meters x 100
        24     2  speed          m/s x 100
        26     2  dir            degrees x 10
        28     2  max_p          dBm x 100
        30     2  min_p          dBm x 100
        32     2  pow_u          dBm x 100
        34    14  reserved       zero
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from .errors import CorruptBeaconError, InvalidFieldError, TruncatedBeaconError

BEACON_SIZE = 48
SEQ_MODULUS = 4096
ELP_SIZE = 8
MAX_POWER_DBM = 33.0

_LAYOUT = struct.Struct(">HHI8siiHHHHH14x")
assert _LAYOUT.size == BEACON_SIZE

_INT32 = (-(2**31), 2**31 - 1)
_UINT16 = 0xFFFF


def make_elp(name: str | bytes) -> bytes:
    """Pad a short vehicle name to an 8-byte ELP."""
    raw = name.encode("ascii") if isinstance(name, str) else bytes(name)
    if len(raw) > ELP_SIZE:
        raise InvalidFieldError("elp", f"longer than {ELP_SIZE} bytes")
    return raw.ljust(ELP_SIZE, b"\x00")


def elp_label(elp: bytes) -> str:
    """Printable form of an ELP (trailing NUL padding removed)."""
    return elp.rstrip(b"\x00").decode("ascii", errors="replace")


@dataclass(frozen=True)
class Beacon:
    seq: int
    interval_ms: int
    timestamp_ms: int
    elp: bytes
    pos_x_m: float
    pos_y_m: float
    speed_mps: float
    dir_deg: float
    max_p_dbm: float
    min_p_dbm: float
    pow_u_dbm: float

    def __post_init__(self):
        if isinstance(self.elp, str):
            object.__setattr__(self, "elp", make_elp(self.elp))


def next_sequence(seq: int) -> int:
    return (seq + 1) % SEQ_MODULUS


def _check(b: Beacon, error):
    """Raise ``error(field, msg)`` for the first invariant ``b`` violates."""
    if not isinstance(b.seq, int) or not 0 <= b.seq < SEQ_MODULUS:
        raise error("seq", f"{b.seq!r} not in [0, {SEQ_MODULUS - 1}]")
    # 0 means "not declared"; receivers fall back to their default rate
    if not isinstance(b.interval_ms, int) or not 0 <= b.interval_ms <= _UINT16:
        raise error("interval_ms", f"{b.interval_ms!r} not a 16-bit integer")
    if not isinstance(b.timestamp_ms, int) or not 0 <= b.timestamp_ms < 2**32:
        raise error("timestamp_ms", f"{b.timestamp_ms!r} not a non-negative 32-bit integer")
    if not isinstance(b.elp, bytes) or len(b.elp) != ELP_SIZE:
        raise error("elp", f"must be {ELP_SIZE} bytes")
    for name in ("pos_x_m", "pos_y_m"):
        value = getattr(b, name)
        if not math.isfinite(value):
            raise error(name, "not finite")
        if not _INT32[0] <= round(value * 100) <= _INT32[1]:
            raise error(name, f"{value} outside the encodable range")
    if not math.isfinite(b.speed_mps) or not 0 <= round(b.speed_mps * 100) <= _UINT16:
        raise error("speed_mps", f"{b.speed_mps} not in [0, 655.35]")
    if not math.isfinite(b.dir_deg) or not 0 <= round(b.dir_deg * 10) < 3600:
        raise error("dir_deg", f"{b.dir_deg} not in [0, 360)")
    for name in ("max_p_dbm", "min_p_dbm", "pow_u_dbm"):
        value = getattr(b, name)
        if not math.isfinite(value) or not 0 <= round(value * 100) <= 3300:
            raise error(name, f"{value} not in [0, {MAX_POWER_DBM:g}] dBm")
    if round(b.min_p_dbm * 100) > round(b.max_p_dbm * 100):
        raise error("min_p_dbm", f"{b.min_p_dbm} exceeds max_p_dbm {b.max_p_dbm}")


def validate_beacon(b: Beacon) -> None:
    _check(b, InvalidFieldError)


def encode_beacon(b: Beacon) -> bytes:
    _check(b, InvalidFieldError)
    return _LAYOUT.pack(
        b.seq,
        b.interval_ms,
        b.timestamp_ms,
        b.elp,
        round(b.pos_x_m * 100),
        round(b.pos_y_m * 100),
        round(b.speed_mps * 100),
        round(b.dir_deg * 10),
        round(b.max_p_dbm * 100),
        round(b.min_p_dbm * 100),
        round(b.pow_u_dbm * 100),
    )


def decode_beacon(data: bytes) -> Beacon:
    if len(data) != BEACON_SIZE:
        raise TruncatedBeaconError(f"beacon must be {BEACON_SIZE} bytes, got {len(data)}")
    seq, interval, ts, elp, x, y, speed, direction, max_p, min_p, pow_u = _LAYOUT.unpack(data)
    b = Beacon(
        seq=seq & 0x0FFF,
        interval_ms=interval,
        timestamp_ms=ts,
        elp=elp,
        pos_x_m=x / 100,
        pos_y_m=y / 100,
        speed_mps=speed / 100,
        dir_deg=direction / 10,
        max_p_dbm=max_p / 100,
        min_p_dbm=min_p / 100,
        pow_u_dbm=pow_u / 100,
    )
    _check(b, CorruptBeaconError)
    return b
