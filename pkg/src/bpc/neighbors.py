"""Per-neighbor reception bookkeeping and the once-per-second channel assessment.

A :class:`NeighborTable` fuses three views of each neighbor: the sequence
numbers heard in the current window, the distance at last reception, and the
power fields of the most recent beacon. :meth:`NeighborTable.assess` turns
them into a :class:`ChannelAssessment` and opens a fresh window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .beacon import Beacon
from .errors import DegenerateDistanceError, NoNeighborsError, WindowOverflowError

DEFAULT_INTERVAL_MS = 100
WINDOW_MS = 1000
# co-located vehicles (e.g. overtaking in the 1-D model) would give d = 0
MIN_DISTANCE_M = 1.0


def reception_percentage(b: int, expected: int) -> float:
    if expected <= 0:
        raise ValueError(f"expected beacon count must be positive, got {expected}")
    if b < 0:
        raise ValueError(f"negative beacon count {b}")
    if b > expected:
        raise WindowOverflowError(f"{b} beacons received but only {expected} expected per window")
    return b / expected * 100.0


def fail_rate(p: float, d: float) -> float:
    """Beacons lost per meter of separation: ``(100 - p) / d``."""
    if d <= 0:
        raise DegenerateDistanceError(f"distance must be positive, got {d}")
    return (100.0 - p) / d


def projected_reception(p: float, f: float) -> float:
    """Reception percentage forecast one meter further out, floored at 0."""
    return max(p - f, 0.0)


def overall_fault(records) -> float:
    """Mean per-neighbor fail rate over ``records`` (NeighborRecords or floats)."""
    values = [r if isinstance(r, (int, float)) else r.f_per_m for r in records]
    if not values:
        raise NoNeighborsError("overall fault needs at least one neighbor")
    return math.fsum(values) / len(values)


def success_percentage(F: float, max_d: float, min_d: float) -> float:
    """Channel success percentage from the overall fault and the mean distance span."""
    s = 100.0 - (max_d + min_d) / 2.0 * F
    return min(max(s, 0.0), 100.0)


def expected_per_window(interval_ms: int) -> int:
    if interval_ms <= 0:
        interval_ms = DEFAULT_INTERVAL_MS
    return max(WINDOW_MS // interval_ms, 1)


@dataclass
class NeighborRecord:
    """One neighbor's row across the sequence list, distance table and ABL.

    Distance and power fields are read lazily from the latest beacon so that
    recording a reception stays cheap.
    """

    elp: bytes
    seq_window: set = field(default_factory=set)
    last_beacon: Beacon | None = None
    own_pos: tuple = (0.0, 0.0)
    road_length_m: float | None = None
    p_pct: float = 0.0
    f_per_m: float = 0.0
    proj_pct: float = 0.0

    @property
    def b(self) -> int:
        return len(self.seq_window)

    @property
    def d_m(self) -> float:
        b = self.last_beacon
        return separation(self.own_pos, (b.pos_x_m, b.pos_y_m), self.road_length_m)

    @property
    def interval_ms(self) -> int:
        return self.last_beacon.interval_ms or DEFAULT_INTERVAL_MS

    @property
    def last_max_p_dbm(self) -> float:
        return self.last_beacon.max_p_dbm

    @property
    def last_min_p_dbm(self) -> float:
        return self.last_beacon.min_p_dbm

    @property
    def last_pow_u_dbm(self) -> float:
        return self.last_beacon.pow_u_dbm

    def update_estimates(self, d_m: float | None = None) -> None:
        d = self.d_m if d_m is None else d_m
        self.p_pct = reception_percentage(self.b, expected_per_window(self.interval_ms))
        self.f_per_m = fail_rate(self.p_pct, d)
        self.proj_pct = projected_reception(self.p_pct, self.f_per_m)


def separation(a, b, road_length_m: float | None = None) -> float:
    """Euclidean distance, x periodic when ``road_length_m`` is set, floored at 1 m."""
    dx = abs(a[0] - b[0])
    if road_length_m:
        dx %= road_length_m
        if road_length_m - dx < dx:
            dx = road_length_m - dx
    d = math.hypot(dx, a[1] - b[1])
    return d if d > MIN_DISTANCE_M else MIN_DISTANCE_M


@dataclass(frozen=True)
class ChannelAssessment:
    F: float
    S_pct: float
    n: int
    max_d_m: float
    min_d_m: float
    max_bp_dbm: float
    min_bp_dbm: float
    ma_mp_dbm: float
    mi_mp_dbm: float
    d_max_sender_m: float
    window_end_ms: int
    # per-neighbor (elp, p, f, P, d) snapshot, sorted by elp
    neighbors: tuple = ()


class NeighborTable:
    """Neighbor state owned by one vehicle.

    ``road_length_m`` makes the x axis periodic (ring road) when computing
    distances; leave it ``None`` for plain Euclidean geometry.
    """

    def __init__(self, road_length_m: float | None = None):
        self.road_length_m = road_length_m
        self.records: dict[bytes, NeighborRecord] = {}

    def __len__(self):
        return len(self.records)

    def __contains__(self, elp):
        return elp in self.records

    def distance(self, a, b) -> float:
        return separation(a, b, self.road_length_m)

    def record_beacon(self, beacon: Beacon, own_pos, now_ms: int) -> NeighborRecord:
        rec = self.records.get(beacon.elp)
        if rec is None:
            rec = self.records[beacon.elp] = NeighborRecord(beacon.elp, road_length_m=self.road_length_m)
        rec.seq_window.add(beacon.seq)
        rec.last_beacon = beacon
        rec.own_pos = own_pos
        return rec

    def assess(self, now_ms: int) -> ChannelAssessment:
        """Close the current window and summarize it.

        Neighbors silent for the whole window are evicted; the rest keep their
        power fields but start the next window with an empty sequence set.
        Raises NoNeighborsError when nobody was heard.
        """
        live = [r for _, r in sorted(self.records.items()) if r.b > 0]
        self.records = {r.elp: r for r in live}
        if not live:
            raise NoNeighborsError(f"no beacons received in the window ending at {now_ms} ms")
        dist = {}
        try:
            for rec in live:
                dist[rec.elp] = d = rec.d_m
                rec.update_estimates(d)
        finally:
            for rec in live:
                rec.seq_window = set()

        F = overall_fault(live)
        max_d = max(dist.values())
        min_d = min(dist.values())
        max_bp = max(r.last_pow_u_dbm for r in live)
        # ties go to the farthest sender so the clear-channel boost stays conservative
        d_max_sender = max(dist[r.elp] for r in live if r.last_pow_u_dbm == max_bp)
        return ChannelAssessment(
            F=F,
            S_pct=success_percentage(F, max_d, min_d),
            n=len(live),
            max_d_m=max_d,
            min_d_m=min_d,
            max_bp_dbm=max_bp,
            min_bp_dbm=min(r.last_pow_u_dbm for r in live),
            ma_mp_dbm=max(r.last_max_p_dbm for r in live),
            mi_mp_dbm=min(r.last_max_p_dbm for r in live),
            d_max_sender_m=d_max_sender,
            window_end_ms=now_ms,
            neighbors=tuple((r.elp, r.p_pct, r.f_per_m, r.proj_pct, dist[r.elp]) for r in live),
        )
