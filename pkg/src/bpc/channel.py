"""Deterministic unit-disc broadcast medium.

Transmit power maps to a radio range through log-distance path loss anchored
at 33 dBm -> 300 m. A receiver is covered by a transmission when it is
strictly closer than that range; two or more covering transmissions in the
same slot collide at that receiver.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidPowerError


@dataclass(frozen=True)
class PathLossModel:
    ref_power_dbm: float = 33.0
    ref_range_m: float = 300.0
    path_loss_exponent: float = 2.5

    def __post_init__(self):
        if not self.path_loss_exponent > 1:
            raise ValueError("path_loss_exponent must be > 1")
        if not self.ref_range_m > 0:
            raise ValueError("ref_range_m must be positive")


class Outcome(str, enum.Enum):
    DELIVERED = "delivered"
    OUT_OF_RANGE = "out_of_range"
    COLLIDED = "collided"


class Transmission(NamedTuple):
    sender: object
    pos: tuple
    power_dbm: float


def range_for_power(p: float, model: PathLossModel = PathLossModel()) -> float:
    if not 0 <= p <= 33:
        raise InvalidPowerError(f"transmit power {p} dBm outside [0, 33]")
    if p == model.ref_power_dbm:
        return model.ref_range_m
    return model.ref_range_m * 10 ** ((p - model.ref_power_dbm) / (10 * model.path_loss_exponent))


def planar_distance(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def resolve_slot(transmissions, receivers, model: PathLossModel = PathLossModel(), distance=None):
    """Return ``{(sender, receiver): Outcome}`` for one slot.

    Every (transmission, receiver) pair gets exactly one outcome; a node never
    receives its own transmission. ``distance`` defaults to planar Euclidean.
    """
    distance = distance or planar_distance
    ranges = [range_for_power(t.power_dbm, model) for t in transmissions]
    outcomes = {}
    for rid, rpos in receivers:
        covering = []
        for t, r in zip(transmissions, ranges):
            if t.sender == rid:
                continue
            if distance(t.pos, rpos) < r:
                covering.append(t.sender)
            else:
                outcomes[(t.sender, rid)] = Outcome.OUT_OF_RANGE
        hit = Outcome.DELIVERED if len(covering) == 1 else Outcome.COLLIDED
        for sender in covering:
            outcomes[(sender, rid)] = hit
    return outcomes


def coverage(tx_pos, tx_range, rx_pos, road_length_m: float | None = None):
    """Vectorized coverage test: boolean matrix ``[tx, rx]`` of distance < range.

    Positions are ``(k, 2)`` arrays; with ``road_length_m`` the x axis wraps.
    Callers mask out self-pairs.
    """
    dx = np.abs(tx_pos[:, None, 0] - rx_pos[None, :, 0])
    if road_length_m:
        dx = np.mod(dx, road_length_m)
        dx = np.minimum(dx, road_length_m - dx)
    dy = tx_pos[:, None, 1] - rx_pos[None, :, 1]
    return np.hypot(dx, dy) < np.asarray(tx_range)[:, None]


def is_covered(pos, transmissions, model: PathLossModel = PathLossModel(), distance=None, exclude=None) -> bool:
    distance = distance or planar_distance
    return any(
        t.sender != exclude and distance(t.pos, pos) < range_for_power(t.power_dbm, model)
        for t in transmissions
    )


def busy_ratio(slot_history, pos, model: PathLossModel = PathLossModel(), distance=None, exclude=None) -> float:
    """Fraction of slots in which at least one transmission covered ``pos``.

    ``slot_history`` is a sequence of per-slot transmission lists; ``exclude``
    names a node whose own transmissions do not count.
    """
    if not slot_history:
        raise ValueError("busy ratio needs a non-empty slot window")
    busy = sum(1 for slot in slot_history if is_covered(pos, slot, model, distance, exclude))
    return busy / len(slot_history)
