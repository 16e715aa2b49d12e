"""Transmit power decisions driven by a channel assessment."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InconsistentAssessmentError
from .neighbors import ChannelAssessment

REGULATORY_CAP_DBM = 33.0
CLEAR_TOLERANCE = 1e-9


class Branch(str, enum.Enum):
    CONGESTED = "congested"
    CLEAR_FAR = "clear_far"
    CLEAR_MID = "clear_mid"
    CLEAR_NEAR = "clear_near"
    CAPPED = "capped"
    # reserved: the send algorithm's "Die" is mapped to HOLD, never emitted
    SUPPRESSED = "suppressed"
    HOLD = "hold"


@dataclass(frozen=True)
class PowerConfig:
    max_power_dbm: float = REGULATORY_CAP_DBM
    congestion_gate_pct: float = 0.0
    far_threshold_m: float = 200.0
    mid_threshold_m: float = 100.0
    initial_power_dbm: float = REGULATORY_CAP_DBM

    def __post_init__(self):
        if not 0 < self.mid_threshold_m < self.far_threshold_m:
            raise ValueError("need 0 < mid_threshold_m < far_threshold_m")
        if not 0 < self.max_power_dbm <= REGULATORY_CAP_DBM:
            raise ValueError(f"max_power_dbm must be in (0, {REGULATORY_CAP_DBM:g}]")
        if not 0 <= self.initial_power_dbm <= REGULATORY_CAP_DBM:
            raise ValueError(f"initial_power_dbm must be in [0, {REGULATORY_CAP_DBM:g}]")
        if not 0 <= self.congestion_gate_pct <= 100:
            raise ValueError("congestion_gate_pct must be in [0, 100]")


@dataclass(frozen=True)
class PowerDecision:
    pow_u_dbm: float
    branch: Branch
    advertise_max_p_dbm: float
    advertise_min_p_dbm: float
    pd_dbm: float = 0.0


def initial_decision(cfg: PowerConfig, power_dbm: float | None = None) -> PowerDecision:
    """Decision in force before the first assessment: advertise our own power."""
    p = min(cfg.initial_power_dbm if power_dbm is None else power_dbm, cfg.max_power_dbm)
    return PowerDecision(p, Branch.HOLD, p, p, 0.0)


def power_difference(max_bp: float, min_bp: float) -> float:
    if max_bp < min_bp:
        raise InconsistentAssessmentError(f"MaxBP {max_bp} below MinBP {min_bp}")
    return max_bp - min_bp


def _hold(a: ChannelAssessment, prev: PowerDecision | None, cfg: PowerConfig, pd: float):
    power = prev.pow_u_dbm if prev is not None else cfg.initial_power_dbm
    return PowerDecision(
        min(power, cfg.max_power_dbm), Branch.HOLD, a.max_bp_dbm, a.min_bp_dbm, pd
    )


def congested_power(
    a: ChannelAssessment, cfg: PowerConfig, prev: PowerDecision | None = None
) -> PowerDecision:
    """Scale between the weakest and strongest neighbor power by the success fraction.

    The candidate is only adopted strictly inside (MiMP, MaMP); otherwise the
    previous power (or the configured initial power) is kept.
    """
    pd = power_difference(a.max_bp_dbm, a.min_bp_dbm)
    candidate = a.min_bp_dbm + pd * (a.S_pct / 100.0)
    if not a.mi_mp_dbm < candidate < a.ma_mp_dbm:
        return _hold(a, prev, cfg, pd)
    return PowerDecision(
        min(candidate, cfg.max_power_dbm), Branch.CONGESTED, a.max_bp_dbm, a.min_bp_dbm, pd
    )


def clear_channel_power(a: ChannelAssessment, cfg: PowerConfig) -> PowerDecision:
    pd = power_difference(a.max_bp_dbm, a.min_bp_dbm)
    cap = cfg.max_power_dbm
    d = a.d_max_sender_m
    if d > cfg.far_threshold_m:
        power, branch = a.max_bp_dbm, Branch.CLEAR_FAR
    elif d > cfg.mid_threshold_m:
        power, branch = a.max_bp_dbm + pd * 0.5, Branch.CLEAR_MID
    else:
        power, branch = a.max_bp_dbm + pd, Branch.CLEAR_NEAR
    if power > cap:
        power, branch = cap, Branch.CAPPED
    return PowerDecision(power, branch, a.max_bp_dbm, a.min_bp_dbm, pd)


def decide_power(
    a: ChannelAssessment | None, prev: PowerDecision | None, cfg: PowerConfig
) -> PowerDecision:
    """Pick the next transmit power; ``a=None`` means nobody was heard."""
    if a is None:
        if prev is None:
            return initial_decision(cfg)
        return PowerDecision(
            prev.pow_u_dbm, Branch.HOLD, prev.advertise_max_p_dbm, prev.advertise_min_p_dbm, 0.0
        )
    if a.S_pct >= 100.0 - CLEAR_TOLERANCE:
        return clear_channel_power(a, cfg)
    if cfg.congestion_gate_pct > 0 and a.S_pct >= cfg.congestion_gate_pct:
        return _hold(a, prev, cfg, power_difference(a.max_bp_dbm, a.min_bp_dbm))
    return congested_power(a, cfg, prev)


def fixed_power_baseline(cfg: PowerConfig) -> PowerDecision:
    p = cfg.max_power_dbm
    return PowerDecision(p, Branch.HOLD, p, p, 0.0)
