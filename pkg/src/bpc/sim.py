"""Time-stepped beaconing simulation.

Time is integer milliseconds, advanced one slot at a time. Beaconing is
organized in frames of one beacon interval: every vehicle transmits exactly
once per frame, in a slot given by its phase offset plus an optional random
access delay (a stand-in for CSMA backoff). Assessment windows are one second
long and aligned to frame boundaries, so a neighbor can contribute at most
``1000 / interval`` beacons to a window.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, fields
from typing import Callable

import numpy as np

from . import channel
from .beacon import Beacon, decode_beacon, elp_label, encode_beacon, make_elp, next_sequence
from .channel import PathLossModel
from .errors import NoNeighborsError, ScenarioError
from .neighbors import WINDOW_MS, ChannelAssessment, NeighborTable
from .power import (
    PowerConfig,
    PowerDecision,
    decide_power,
    fixed_power_baseline,
    initial_decision,
)

PROTOCOLS = ("bpc", "fixed")
LANE_WIDTH_M = 3.5


@dataclass(frozen=True)
class Scenario:
    road_length_m: float
    vehicles: int
    spacing_m: float
    duration_s: int
    speed_mps: float = 25.0
    speed_jitter_mps: float = 0.0
    lanes: int = 1
    beacon_interval_ms: int = 100
    slot_ms: int = 1
    seed: int = 0
    protocol: str = "bpc"
    path_loss_exponent: float = 2.5
    congestion_gate_pct: float = 0.0
    max_power_dbm: float = 33.0
    # spread of per-vehicle start power below the cap; 0 starts everyone at the cap
    power_spread_db: float = 0.0
    # random access delay drawn per frame in [0, access_jitter_ms)
    access_jitter_ms: int = 0

    def problems(self) -> list[str]:
        errs = []
        if not (isinstance(self.vehicles, int) and self.vehicles >= 1):
            errs.append(f"vehicles must be a positive integer, got {self.vehicles!r}")
        if not self.spacing_m > 0:
            errs.append(f"spacing_m must be > 0, got {self.spacing_m!r}")
        if not self.road_length_m > 0:
            errs.append(f"road_length_m must be > 0, got {self.road_length_m!r}")
        elif self.spacing_m > 0 and isinstance(self.vehicles, int) and self.vehicles >= 1:
            per_lane = math.ceil(self.vehicles / max(self.lanes, 1))
            if (per_lane - 1) * self.spacing_m * max(self.lanes, 1) >= self.road_length_m:
                errs.append("vehicles do not fit on the road at the given spacing")
        if not (isinstance(self.duration_s, int) and self.duration_s > 1):
            errs.append(f"duration_s must be an integer > 1, got {self.duration_s!r}")
        if not self.speed_mps >= 0:
            errs.append(f"speed_mps must be >= 0, got {self.speed_mps!r}")
        if not self.speed_jitter_mps >= 0:
            errs.append(f"speed_jitter_mps must be >= 0, got {self.speed_jitter_mps!r}")
        if not (isinstance(self.lanes, int) and self.lanes >= 1):
            errs.append(f"lanes must be a positive integer, got {self.lanes!r}")
        if not (isinstance(self.slot_ms, int) and self.slot_ms >= 1):
            errs.append(f"slot_ms must be a positive integer, got {self.slot_ms!r}")
        if not (isinstance(self.beacon_interval_ms, int) and 0 < self.beacon_interval_ms <= WINDOW_MS):
            errs.append(f"beacon_interval_ms must be in (0, {WINDOW_MS}], got {self.beacon_interval_ms!r}")
        elif isinstance(self.slot_ms, int) and self.slot_ms >= 1:
            if self.beacon_interval_ms % self.slot_ms:
                errs.append("beacon_interval_ms must be divisible by slot_ms")
            if WINDOW_MS % self.beacon_interval_ms:
                errs.append(f"beacon_interval_ms must divide {WINDOW_MS}")
        if not isinstance(self.seed, int):
            errs.append(f"seed must be an integer, got {self.seed!r}")
        if self.protocol not in PROTOCOLS:
            errs.append(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if not self.path_loss_exponent > 1:
            errs.append(f"path_loss_exponent must be > 1, got {self.path_loss_exponent!r}")
        if not 0 <= self.congestion_gate_pct <= 100:
            errs.append(f"congestion_gate_pct must be in [0, 100], got {self.congestion_gate_pct!r}")
        if not 0 < self.max_power_dbm <= 33:
            errs.append(f"max_power_dbm must be in (0, 33], got {self.max_power_dbm!r}")
        if not 0 <= self.power_spread_db <= self.max_power_dbm:
            errs.append(f"power_spread_db must be in [0, max_power_dbm], got {self.power_spread_db!r}")
        if not (isinstance(self.access_jitter_ms, int) and 0 <= self.access_jitter_ms <= self.beacon_interval_ms):
            errs.append(f"access_jitter_ms must be an integer in [0, beacon_interval_ms], got {self.access_jitter_ms!r}")
        return errs

    def validate(self) -> "Scenario":
        errs = self.problems()
        if errs:
            raise ScenarioError(errs)
        return self

    def with_(self, **changes) -> "Scenario":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return Scenario(**values)

    @property
    def power_config(self) -> PowerConfig:
        return PowerConfig(
            max_power_dbm=self.max_power_dbm,
            congestion_gate_pct=self.congestion_gate_pct,
            initial_power_dbm=self.max_power_dbm,
        )

    @property
    def path_loss(self) -> PathLossModel:
        return PathLossModel(path_loss_exponent=self.path_loss_exponent)


@dataclass
class Vehicle:
    elp: bytes
    x0_m: float
    y_m: float
    speed_mps: float
    dir_deg: float
    protocol: str
    decision: PowerDecision
    table: NeighborTable
    phase_ms: int
    seq: int = 0
    # counters for the window in progress
    sent: int = 0
    received: int = 0
    collided: int = 0
    busy_slots: int = 0

    @property
    def label(self) -> str:
        return elp_label(self.elp)

    def reset_counters(self):
        self.sent = self.received = self.collided = self.busy_slots = 0


@dataclass(frozen=True)
class Row:
    t_s: int
    elp: str
    pow_u_dbm: float
    s_pct: float | None
    f_per_m: float | None
    neighbors: int
    sent: int
    received: int
    collided: int
    busy_ratio: float
    branch: str = ""


@dataclass
class MetricsLog:
    scenario: Scenario
    rows: list = field(default_factory=list)
    # whole-run per-transmission outcome totals (conservation check)
    transmissions: int = 0
    delivered: int = 0
    collided: int = 0
    out_of_range: int = 0
    pairs: int = 0

    @property
    def protocol(self) -> str:
        return self.scenario.protocol

    @property
    def seed(self) -> int:
        return self.scenario.seed


LossFilter = Callable[[bytes, bytes, int], bool]


class Simulator:
    """One simulation instance; drive it with :meth:`step` or :meth:`run`.

    ``loss_filter(sender_elp, receiver_elp, seq)`` returning True discards an
    otherwise delivered beacon (counted as collided); scripted fixtures use it
    to reproduce a given reception pattern.
    """

    def __init__(self, scenario: Scenario, vehicles: list[Vehicle] | None = None,
                 loss_filter: LossFilter | None = None):
        self.scenario = scenario.validate()
        self.cfg = scenario.power_config
        self.model = scenario.path_loss
        self.loss_filter = loss_filter
        self.t_ms = 0
        self.log = MetricsLog(scenario)
        rng = random.Random(scenario.seed)
        self.vehicles = vehicles if vehicles is not None else self._place(rng)
        self._access_rng = random.Random(f"access:{scenario.seed}")
        self._frame_plan: dict[int, list[Vehicle]] = {}
        self._last_assessment: dict[bytes, ChannelAssessment | None] = {}
        self._index = {v.elp: i for i, v in enumerate(self.vehicles)}
        self._x0 = np.array([v.x0_m for v in self.vehicles], dtype=float)
        self._speed = np.array([v.speed_mps for v in self.vehicles], dtype=float)
        self._y = np.array([v.y_m for v in self.vehicles], dtype=float)

    def _place(self, rng: random.Random) -> list[Vehicle]:
        sc = self.scenario
        interval_slots = sc.beacon_interval_ms // sc.slot_ms
        out = []
        for i in range(sc.vehicles):
            lane = i % sc.lanes
            phase = rng.randrange(interval_slots) * sc.slot_ms
            jitter = rng.uniform(-sc.speed_jitter_mps, sc.speed_jitter_mps) if sc.speed_jitter_mps else 0.0
            spread = rng.uniform(0.0, sc.power_spread_db) if sc.power_spread_db else 0.0
            start_power = round(sc.max_power_dbm - spread, 2)
            decision = (
                initial_decision(self.cfg, start_power) if sc.protocol == "bpc"
                else fixed_power_baseline(self.cfg)
            )
            out.append(Vehicle(
                elp=make_elp(f"V{i:05d}"),
                x0_m=float(i * sc.spacing_m),
                y_m=lane * LANE_WIDTH_M,
                speed_mps=max(sc.speed_mps + jitter, 0.0),
                dir_deg=0.0,
                protocol=sc.protocol,
                decision=decision,
                table=NeighborTable(road_length_m=sc.road_length_m),
                phase_ms=phase,
            ))
        return out

    def position(self, v: Vehicle, t_ms: int | None = None):
        t = self.t_ms if t_ms is None else t_ms
        return ((v.x0_m + v.speed_mps * (t / 1000.0)) % self.scenario.road_length_m, v.y_m)

    def distance(self, a, b) -> float:
        L = self.scenario.road_length_m
        dx = abs(a[0] - b[0]) % L
        return math.hypot(min(dx, L - dx), a[1] - b[1])

    def _plan_frame(self, frame_start: int):
        sc = self.scenario
        interval = sc.beacon_interval_ms
        plan: dict[int, list[Vehicle]] = {}
        for v in self.vehicles:
            offset = v.phase_ms
            if sc.access_jitter_ms:
                offset += self._access_rng.randrange(0, sc.access_jitter_ms, sc.slot_ms)
            plan.setdefault(frame_start + offset % interval, []).append(v)
        self._frame_plan = plan

    def _beacon(self, v: Vehicle, pos) -> Beacon:
        d = v.decision
        b = Beacon(
            seq=v.seq,
            interval_ms=self.scenario.beacon_interval_ms,
            timestamp_ms=self.t_ms,
            elp=v.elp,
            pos_x_m=round(pos[0], 2),
            pos_y_m=round(pos[1], 2),
            speed_mps=round(v.speed_mps, 2),
            dir_deg=v.dir_deg,
            max_p_dbm=round(d.advertise_max_p_dbm, 2),
            min_p_dbm=round(min(d.advertise_min_p_dbm, d.advertise_max_p_dbm), 2),
            pow_u_dbm=round(d.pow_u_dbm, 2),
        )
        v.seq = next_sequence(v.seq)
        # every beacon crosses the wire format once
        return decode_beacon(encode_beacon(b))

    def step(self) -> None:
        """Advance one slot: transmit, resolve, deliver, then run any 1 s boundary."""
        sc = self.scenario
        t = self.t_ms
        if t % sc.beacon_interval_ms == 0:
            self._plan_frame(t)
        senders = self._frame_plan.get(t, ())
        if senders:
            self._transmit(senders)
        self.t_ms = t + sc.slot_ms
        if self.t_ms % WINDOW_MS == 0:
            self._boundary()

    def _transmit(self, senders):
        vehicles = self.vehicles
        L = self.scenario.road_length_m
        t = self.t_ms
        xs = np.mod(self._x0 + self._speed * (t / 1000.0), L)
        pos = np.column_stack((xs, self._y))
        idx = [self._index[v.elp] for v in senders]
        beacons = []
        ranges = []
        for v, i in zip(senders, idx):
            beacons.append(self._beacon(v, (float(xs[i]), float(self._y[i]))))
            ranges.append(channel.range_for_power(v.decision.pow_u_dbm, self.model))
            v.sent += 1
        cov = channel.coverage(pos[idx], ranges, pos, L)
        cov[np.arange(len(idx)), idx] = False
        hits = cov.sum(axis=0)

        log = self.log
        n_rx = len(vehicles) - 1
        log.transmissions += len(idx)
        log.pairs += len(idx) * n_rx
        covered_pairs = int(hits.sum())
        log.out_of_range += len(idx) * n_rx - covered_pairs
        first = cov.argmax(axis=0).tolist()
        ys = self._y
        for j, h in enumerate(hits.tolist()):
            if not h:
                continue
            rx = vehicles[j]
            rx.busy_slots += 1
            if h > 1:
                rx.collided += h
                log.collided += h
                continue
            b = beacons[first[j]]
            if self.loss_filter and self.loss_filter(b.elp, rx.elp, b.seq):
                rx.collided += 1
                log.collided += 1
                continue
            rx.received += 1
            log.delivered += 1
            rx.table.record_beacon(b, (float(xs[j]), float(ys[j])), t)

    def _boundary(self):
        t_s = self.t_ms // WINDOW_MS
        slots = WINDOW_MS // self.scenario.slot_ms
        for v in self.vehicles:
            try:
                a = v.table.assess(self.t_ms)
            except NoNeighborsError:
                a = None
            self._last_assessment[v.elp] = a
            if v.protocol == "bpc":
                v.decision = decide_power(a, v.decision, self.cfg)
            elif v.protocol == "fixed":
                v.decision = fixed_power_baseline(self.cfg)
            # any other protocol tag is scripted: the decision is left as set
            self.log.rows.append(Row(
                t_s=t_s,
                elp=v.label,
                pow_u_dbm=v.decision.pow_u_dbm,
                s_pct=a.S_pct if a else None,
                f_per_m=a.F if a else None,
                neighbors=a.n if a else 0,
                sent=v.sent,
                received=v.received,
                collided=v.collided,
                busy_ratio=v.busy_slots / slots,
                branch=v.decision.branch.value,
            ))
            v.reset_counters()

    def last_assessment(self, elp) -> ChannelAssessment | None:
        return self._last_assessment.get(make_elp(elp) if isinstance(elp, str) else elp)

    def run(self) -> MetricsLog:
        end = self.scenario.duration_s * WINDOW_MS
        while self.t_ms < end:
            self.step()
        return self.log


def init(scenario: Scenario) -> Simulator:
    return Simulator(scenario)


def step(sim: Simulator) -> Simulator:
    sim.step()
    return sim


def run(scenario: Scenario) -> MetricsLog:
    return Simulator(scenario).run()
