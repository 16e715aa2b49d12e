"""``key = value`` scenario files.

Blank lines and ``#`` comments are ignored. Every problem in a file is
collected and reported together, each tagged with its line number.
"""

from __future__ import annotations

from dataclasses import fields

from .errors import ScenarioError
from .sim import Scenario

REQUIRED = ("road_length_m", "vehicles", "spacing_m", "duration_s")

_TYPES = {
    "road_length_m": float,
    "vehicles": int,
    "spacing_m": float,
    "speed_mps": float,
    "duration_s": int,
    "beacon_interval_ms": int,
    "seed": int,
    "protocol": str,
    "path_loss_exponent": float,
    "congestion_gate_pct": float,
    "max_power_dbm": float,
    # optional extensions
    "lanes": int,
    "slot_ms": int,
    "speed_jitter_mps": float,
    "power_spread_db": float,
    "access_jitter_ms": int,
}
KEYS = tuple(_TYPES)
assert set(KEYS) == {f.name for f in fields(Scenario)}


def _convert(key: str, raw: str):
    kind = _TYPES[key]
    if kind is str:
        return raw
    if kind is int:
        return int(raw, 10)
    return float(raw)


def parse_scenario(text: str) -> Scenario:
    errors = []
    values = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            errors.append(f"line {lineno}: expected 'key = value', got {content!r}")
            continue
        key, raw = (part.strip() for part in content.split("=", 1))
        if key not in _TYPES:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in lines:
            errors.append(f"line {lineno}: duplicate key {key!r} (first set on line {lines[key]})")
            continue
        lines[key] = lineno
        try:
            values[key] = _convert(key, raw)
        except ValueError:
            errors.append(f"line {lineno}: {key}: cannot parse {raw!r} as {_TYPES[key].__name__}")
    for key in REQUIRED:
        if key not in lines:
            errors.append(f"missing required key {key!r}")
    if errors:
        raise ScenarioError(errors)

    scenario = Scenario(**values)
    problems = scenario.problems()
    if problems:
        tagged = []
        for msg in problems:
            key = msg.split()[0]
            tagged.append(f"line {lines[key]}: {msg}" if key in lines else msg)
        raise ScenarioError(tagged)
    return scenario


def render_scenario(s: Scenario) -> str:
    """Canonical text form; ``parse_scenario(render_scenario(s)) == s``."""
    out = []
    for key in KEYS:
        value = getattr(s, key)
        out.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(out) + "\n"


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())
