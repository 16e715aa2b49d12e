"""Worked example: vehicle X and its five neighbors A..E.

The fixture reproduces the reference scenario: the sequence numbers X heard
from each neighbor during one second, each neighbor's distance from X, and the
power fields carried in each neighbor's latest beacon. It can be replayed
directly against a :class:`NeighborTable` or as a scripted six-vehicle
simulation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .beacon import Beacon, decode_beacon, encode_beacon, make_elp
from .neighbors import ChannelAssessment, NeighborTable
from .power import Branch, PowerConfig, PowerDecision, decide_power, power_difference
from .sim import Scenario, Simulator, Vehicle

RECEIVED = {
    "A": (15, 16, 17, 18, 20, 21, 23, 24),
    "B": (71, 72, 75, 78, 79, 80),
    "C": (89, 90, 96, 97),
    "D": (22, 23, 24, 25, 26, 27, 29, 30),
    "E": (61, 62, 63, 67, 69, 70),
}
# first sequence number of each neighbor's ten-beacon second
FIRST_SEQ = {"A": 15, "B": 71, "C": 89, "D": 22, "E": 61}
DISTANCE_M = {"A": 13.0, "B": 18.0, "C": 23.0, "D": 18.0, "E": 15.0}
# (MaxP, MinP, PowU) from the active beacon list
POWER_FIELDS = {
    "A": (28.0, 24.0, 25.0),
    "B": (29.0, 23.0, 28.0),
    "C": (28.0, 24.0, 29.0),
    "D": (27.0, 24.0, 28.0),
    "E": (26.0, 23.0, 28.0),
}
X_POS = (100.0, 0.0)
# neighbor positions at the listed distances from X
POSITIONS = {
    "A": (113.0, 0.0),
    "B": (82.0, 0.0),
    "C": (123.0, 0.0),
    "D": (100.0, 18.0),
    "E": (85.0, 0.0),
}
INTERVAL_MS = 100


@dataclass(frozen=True)
class GoldenResult:
    assessment: ChannelAssessment
    decision: PowerDecision

    @property
    def pd_dbm(self) -> float:
        return power_difference(self.assessment.max_bp_dbm, self.assessment.min_bp_dbm)


def worked_example_beacons():
    """Beacons X received, in reception order, after a trip through the codec."""
    out = []
    for name in sorted(RECEIVED):
        max_p, min_p, pow_u = POWER_FIELDS[name]
        x, y = POSITIONS[name]
        for seq in RECEIVED[name]:
            b = Beacon(
                seq=seq,
                interval_ms=INTERVAL_MS,
                timestamp_ms=(seq - FIRST_SEQ[name]) * INTERVAL_MS,
                elp=make_elp(name),
                pos_x_m=x,
                pos_y_m=y,
                speed_mps=0.0,
                dir_deg=90.0,
                max_p_dbm=max_p,
                min_p_dbm=min_p,
                pow_u_dbm=pow_u,
            )
            out.append(decode_beacon(encode_beacon(b)))
    return out


def replay_worked_example(cfg: PowerConfig | None = None) -> GoldenResult:
    cfg = cfg or PowerConfig()
    table = NeighborTable()
    for b in worked_example_beacons():
        table.record_beacon(b, X_POS, b.timestamp_ms)
    assessment = table.assess(1000)
    return GoldenResult(assessment, decide_power(assessment, None, cfg))


def worked_example_simulator() -> Simulator:
    """Six stationary vehicles; beacons X should miss are dropped at X only.

    Neighbors keep their listed powers (scripted); X runs the protocol.
    """
    scenario = Scenario(road_length_m=1000.0, vehicles=6, spacing_m=1.0, duration_s=2, speed_mps=0.0)
    vehicles = []
    for slot, name in enumerate(["X", *sorted(RECEIVED)]):
        if name == "X":
            pos, fields, protocol, seq = X_POS, (33.0, 33.0, 33.0), "bpc", 0
        else:
            pos, fields, protocol, seq = POSITIONS[name], POWER_FIELDS[name], "scripted", FIRST_SEQ[name]
        max_p, min_p, pow_u = fields
        vehicles.append(Vehicle(
            elp=make_elp(name),
            x0_m=pos[0],
            y_m=pos[1],
            speed_mps=0.0,
            dir_deg=90.0,
            protocol=protocol,
            decision=PowerDecision(pow_u, Branch.HOLD, max_p, min_p, 0.0),
            table=NeighborTable(road_length_m=scenario.road_length_m),
            phase_ms=slot * 10,
            seq=seq,
        ))
    x_elp = make_elp("X")
    heard = {make_elp(n): set(seqs) for n, seqs in RECEIVED.items()}

    def drop(sender, receiver, seq):
        return receiver == x_elp and seq not in heard[sender]

    return Simulator(scenario, vehicles=vehicles, loss_filter=drop)


def replay_worked_example_sim() -> tuple[Simulator, GoldenResult]:
    """Run the scripted fixture through its first one-second boundary."""
    sim = worked_example_simulator()
    while sim.t_ms < 1000:
        sim.step()
    x = next(v for v in sim.vehicles if v.label == "X")
    return sim, GoldenResult(sim.last_assessment(x.elp), x.decision)
