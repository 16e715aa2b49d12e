"""Beacon power control for vehicular safety beaconing, with a deterministic simulator."""

from .beacon import Beacon, decode_beacon, encode_beacon, make_elp, next_sequence
from .channel import PathLossModel, range_for_power, resolve_slot
from .neighbors import ChannelAssessment, NeighborRecord, NeighborTable
from .power import Branch, PowerConfig, PowerDecision, decide_power
from .sim import MetricsLog, Scenario, Simulator, run

__all__ = [
    "Beacon", "decode_beacon", "encode_beacon", "make_elp", "next_sequence",
    "PathLossModel", "range_for_power", "resolve_slot",
    "ChannelAssessment", "NeighborRecord", "NeighborTable",
    "Branch", "PowerConfig", "PowerDecision", "decide_power",
    "MetricsLog", "Scenario", "Simulator", "run",
]
