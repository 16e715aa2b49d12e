"""Summary statistics and CSV output for simulation logs."""

from __future__ import annotations

import csv
import math
import os
import statistics
from dataclasses import dataclass

from .sim import MetricsLog

PER_SECOND_HEADER = (
    "t_s", "elp", "pow_u_dbm", "s_pct", "f_per_m", "neighbors",
    "sent", "received", "collided", "busy_ratio",
)
SUMMARY_HEADER = ("protocol", "seed", "mean_delivery", "mean_busy", "mean_pow_u", "convergence_s")
PER_SECOND_FILE = "per_second.csv"
SUMMARY_FILE = "summary.csv"

CONVERGENCE_DBM = 0.1
CONVERGENCE_SECONDS = 5


@dataclass(frozen=True)
class Spread:
    mean: float
    min: float
    max: float

    @classmethod
    def of(cls, values) -> "Spread":
        values = list(values)
        if not values:
            return cls(math.nan, math.nan, math.nan)
        return cls(math.fsum(values) / len(values), min(values), max(values))


@dataclass(frozen=True)
class SummaryStats:
    protocol: str
    seed: int
    delivery: Spread
    busy: Spread
    pow_u: Spread
    convergence_s: int | None
    loss_ratio: float

    @property
    def converged(self) -> bool:
        return self.convergence_s is not None


def delivery_ratio(row) -> float | None:
    """Share of covering beacons that arrived intact; None if nothing reached the row's vehicle."""
    heard = row.received + row.collided
    return row.received / heard if heard else None


def fleet_mean_power(log: MetricsLog) -> list[float]:
    by_second: dict[int, list[float]] = {}
    for r in log.rows:
        by_second.setdefault(r.t_s, []).append(r.pow_u_dbm)
    return [statistics.fmean(by_second[t]) for t in sorted(by_second)]


def convergence_time(means, tol: float = CONVERGENCE_DBM, run: int = CONVERGENCE_SECONDS) -> int | None:
    """First second t after which the next ``run`` changes of ``means`` are all below ``tol``.

    ``means[0]`` is second 1. Returns None when that never happens.
    """
    for i in range(len(means) - run):
        if all(abs(means[i + k] - means[i + k - 1]) < tol for k in range(1, run + 1)):
            return i + 1
    return None


def summarize(log: MetricsLog) -> SummaryStats:
    rows = log.rows
    ratios = [d for d in map(delivery_ratio, rows) if d is not None]
    received = sum(r.received for r in rows)
    collided = sum(r.collided for r in rows)
    return SummaryStats(
        protocol=log.protocol,
        seed=log.seed,
        delivery=Spread.of(ratios),
        busy=Spread.of(r.busy_ratio for r in rows),
        pow_u=Spread.of(r.pow_u_dbm for r in rows),
        convergence_s=convergence_time(fleet_mean_power(log)),
        loss_ratio=collided / (received + collided) if received + collided else 0.0,
    )


def _fmt(value, digits: int) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return f"{value:.{digits}f}"


def per_second_records(log: MetricsLog):
    for r in log.rows:
        yield (
            str(r.t_s), r.elp, _fmt(r.pow_u_dbm, 2), _fmt(r.s_pct, 2), _fmt(r.f_per_m, 4),
            str(r.neighbors), str(r.sent), str(r.received), str(r.collided), _fmt(r.busy_ratio, 4),
        )


def summary_record(stats: SummaryStats):
    return (
        stats.protocol,
        str(stats.seed),
        _fmt(stats.delivery.mean, 4),
        _fmt(stats.busy.mean, 4),
        _fmt(stats.pow_u.mean, 2),
        "" if stats.convergence_s is None else str(stats.convergence_s),
    )


def _write_csv(path, header, records):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(records)


def write_summary(stats_list, path) -> None:
    _write_csv(path, SUMMARY_HEADER, [summary_record(s) for s in stats_list])


def write_metrics(log: MetricsLog, destination) -> SummaryStats:
    """Write ``per_second.csv`` and ``summary.csv`` into ``destination``."""
    os.makedirs(destination, exist_ok=True)
    stats = summarize(log)
    _write_csv(os.path.join(destination, PER_SECOND_FILE), PER_SECOND_HEADER, per_second_records(log))
    write_summary([stats], os.path.join(destination, SUMMARY_FILE))
    return stats
