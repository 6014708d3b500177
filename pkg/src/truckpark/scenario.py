"""Experiment configuration: zones, demand, parking durations, seeds.

A scenario is loaded from a JSON config file (or built in code) and must pass
``validate_config`` before anything downstream will accept it.  Validation
normalizes sequences to tuples, fills defaults and computes a stable
fingerprint so that every artifact produced later can be traced back to the
exact configuration that generated it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import IntEnum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

__all__ = [
    "ConfigError",
    "ZoneId",
    "ZoneCapacities",
    "MixtureComponent",
    "DurationMixture",
    "ArrivalProfile",
    "Scenario",
    "PenetrationRate",
    "validate_config",
    "scenario_from_dict",
    "scenario_to_dict",
    "load_config",
    "save_config",
    "default_scenario_path",
    "load_default_scenario",
    "derive_stream_seed",
    "STREAM_ARRIVALS",
    "STREAM_DURATIONS",
    "STREAM_ZONE_TIEBREAK",
    "STREAM_APP_USERS",
]

SECONDS_PER_DAY = 86400

# Named RNG sub-streams.  The traffic streams (0-2) are independent of the
# app-user stream (3) so that changing the penetration sampling never
# perturbs the simulated traffic.
STREAM_ARRIVALS = 0
STREAM_DURATIONS = 1
STREAM_ZONE_TIEBREAK = 2  # reserved; zone choice is currently deterministic
STREAM_APP_USERS = 3

_SEED_MULTIPLIER = 0x9E3779B97F4A7C15
_U64 = 1 << 64


class ConfigError(ValueError):
    """Raised when a configuration violates an invariant."""


class ZoneId(IntEnum):
    """Parking zones in overflow priority order.

    GREEN holds the designated truck spaces, YELLOW the legal non-truck
    spaces, RED the spots where truck parking is illegal.  A truck takes the
    first zone with a free space, in this order.
    """

    GREEN = 0
    YELLOW = 1
    RED = 2

    @property
    def token(self) -> str:
        return self.name.lower()

    @classmethod
    def from_token(cls, token: str) -> "ZoneId":
        try:
            return cls[token.upper()]
        except KeyError:
            raise ConfigError(f"unknown zone {token!r}") from None


@dataclass(frozen=True)
class ZoneCapacities:
    """Number of spaces per zone; green must exist, overflow zones may be 0."""

    green: int
    yellow: int = 0
    red: int = 0

    @property
    def total(self) -> int:
        return self.green + self.yellow + self.red

    def of(self, zone: ZoneId) -> int:
        return (self.green, self.yellow, self.red)[zone]


@dataclass(frozen=True)
class MixtureComponent:
    """One Gaussian component of the parking duration mixture (minutes)."""

    weight: float
    mean_minutes: float
    stddev_minutes: float


@dataclass(frozen=True)
class DurationMixture:
    """Gaussian mixture over parking durations, truncated from below.

    The default setup distinguishes short breaks from long overnight rests;
    draws below ``min_duration_minutes`` are rejected and redrawn.
    """

    components: tuple[MixtureComponent, ...]
    min_duration_minutes: float = 5.0


@dataclass(frozen=True)
class ArrivalProfile:
    """Piecewise-constant demand: trucks/hour for each hour of the day.

    ``weekday_multipliers`` scales the whole profile per weekday (day index
    modulo 7, no calendar attached).  These values are stand-ins for real
    demand data and are meant to be tuned per site.
    """

    hourly_rates: tuple[float, ...]
    weekday_multipliers: tuple[float, ...] = tuple(1.0 for _ in range(7))

    def rate_at(self, t_s: float) -> float:
        """Arrival rate (trucks/hour) in effect at absolute second ``t_s``."""
        day = int(t_s // SECONDS_PER_DAY)
        hour = int(t_s % SECONDS_PER_DAY) // 3600
        return self.hourly_rates[hour] * self.weekday_multipliers[day % 7]

    def max_rate(self) -> float:
        return max(self.hourly_rates) * max(self.weekday_multipliers)


@dataclass(frozen=True)
class Scenario:
    """Validated, immutable description of one experiment.

    Construct via ``validate_config`` / ``load_config`` rather than directly;
    direct construction skips invariant checks.
    """

    capacities: ZoneCapacities
    arrivals: ArrivalProfile
    durations: DurationMixture
    master_seed: int
    horizon_days: int = 22
    grid_step_s: int = 60
    eval_step_s: int = 300

    @property
    def horizon_s(self) -> int:
        return self.horizon_days * SECONDS_PER_DAY

    def stream_seed(self, stream_id: int) -> int:
        return derive_stream_seed(self.master_seed, stream_id)

    def fingerprint(self) -> str:
        """Stable hex digest of the canonical JSON form."""
        blob = json.dumps(scenario_to_dict(self), sort_keys=True,
                          separators=(",", ":"))
        return hashlib.sha256(blob.encode("ascii")).hexdigest()[:16]


@dataclass(frozen=True)
class PenetrationRate:
    """Fraction of trucks that report through the app; must lie in (0, 1]."""

    p: float

    def __post_init__(self) -> None:
        if not (0.0 < self.p <= 1.0):
            raise ConfigError("p must be in (0,1]")

    def __float__(self) -> float:
        return self.p


def derive_stream_seed(master_seed: int, stream_id: int) -> int:
    """Derive the seed of a named RNG sub-stream from the master seed.

    Uses ``master_seed XOR (stream_id * 0x9E3779B97F4A7C15)`` with wrapping
    64-bit arithmetic.  Distinct stream ids give distinct seeds for any
    master seed, so the four streams never collide.
    """
    return (master_seed ^ (stream_id * _SEED_MULTIPLIER % _U64)) % _U64


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _is_finite(x: float) -> bool:
    return x == x and abs(x) != float("inf")


def _validate_capacities(c: ZoneCapacities) -> ZoneCapacities:
    for name in ("green", "yellow", "red"):
        v = getattr(c, name)
        _check(isinstance(v, int) and not isinstance(v, bool),
               f"capacities.{name} must be an integer")
    _check(c.green >= 1, "capacities.green must be >= 1")
    _check(c.yellow >= 0, "capacities.yellow must be >= 0")
    _check(c.red >= 0, "capacities.red must be >= 0")
    return c


def _validate_arrivals(a: ArrivalProfile) -> ArrivalProfile:
    rates = tuple(float(r) for r in a.hourly_rates)
    mults = tuple(float(m) for m in a.weekday_multipliers)
    _check(len(rates) == 24, "arrivals.hourly_rates must have 24 entries")
    _check(len(mults) == 7, "arrivals.weekday_multipliers must have 7 entries")
    for i, r in enumerate(rates):
        _check(_is_finite(r) and r >= 0.0,
               f"arrivals.hourly_rates[{i}] must be finite and >= 0")
    _check(any(r > 0.0 for r in rates),
           "arrivals.hourly_rates must contain at least one positive rate")
    for i, m in enumerate(mults):
        _check(_is_finite(m) and m >= 0.0,
               f"arrivals.weekday_multipliers[{i}] must be finite and >= 0")
    return ArrivalProfile(rates, mults)


def _validate_durations(d: DurationMixture) -> DurationMixture:
    comps = tuple(MixtureComponent(float(c.weight), float(c.mean_minutes),
                                   float(c.stddev_minutes))
                  for c in d.components)
    _check(len(comps) >= 1, "durations.components must not be empty")
    for i, c in enumerate(comps):
        _check(_is_finite(c.weight) and c.weight > 0.0,
               f"durations.components[{i}].weight must be > 0")
        _check(_is_finite(c.mean_minutes) and c.mean_minutes > 0.0,
               f"durations.components[{i}].mean_minutes must be > 0")
        _check(_is_finite(c.stddev_minutes) and c.stddev_minutes > 0.0,
               f"durations.components[{i}].stddev_minutes must be > 0")
    total = sum(c.weight for c in comps)
    _check(abs(total - 1.0) <= 1e-9, "durations.components weights must sum to 1")
    m = float(d.min_duration_minutes)
    _check(_is_finite(m) and m > 0.0, "durations.min_duration_minutes must be > 0")
    return DurationMixture(comps, m)


def validate_config(raw: Scenario) -> Scenario:
    """Validate every invariant and return a normalized scenario.

    Idempotent: validating a validated scenario returns an equal scenario.
    Raises ConfigError naming the first violated field.
    """
    capacities = _validate_capacities(raw.capacities)
    arrivals = _validate_arrivals(raw.arrivals)
    durations = _validate_durations(raw.durations)
    _check(isinstance(raw.master_seed, int) and not isinstance(raw.master_seed, bool),
           "master_seed must be an integer")
    _check(0 <= raw.master_seed < _U64, "master_seed must fit in 64 bits")
    _check(isinstance(raw.horizon_days, int) and raw.horizon_days >= 1,
           "horizon_days must be >= 1")
    _check(isinstance(raw.grid_step_s, int) and raw.grid_step_s >= 1,
           "grid_step_s must be >= 1")
    _check(isinstance(raw.eval_step_s, int) and raw.eval_step_s >= 1,
           "eval_step_s must be >= 1")
    _check(raw.eval_step_s % raw.grid_step_s == 0,
           "eval_step_s must be a multiple of grid_step_s")
    return Scenario(capacities=capacities, arrivals=arrivals,
                    durations=durations, master_seed=raw.master_seed,
                    horizon_days=raw.horizon_days, grid_step_s=raw.grid_step_s,
                    eval_step_s=raw.eval_step_s)


_TOP_KEYS = {"capacities", "arrivals", "durations", "master_seed",
             "horizon_days", "grid_step_s", "eval_step_s"}
_OPTIONAL_TOP = {"horizon_days", "grid_step_s", "eval_step_s"}


def _require_keys(d: Mapping, allowed: Iterable[str], optional: Iterable[str],
                  where: str) -> None:
    allowed = set(allowed)
    optional = set(optional)
    unknown = set(d) - allowed
    _check(not unknown, f"unknown key {sorted(unknown)[0]!r} in {where}")
    missing = allowed - optional - set(d)
    _check(not missing, f"missing key {sorted(missing)[0]!r} in {where}")


def scenario_from_dict(d: Mapping) -> Scenario:
    """Build and validate a Scenario from plain JSON data.

    Unknown keys are rejected so that typos in config files fail loudly.
    """
    _require_keys(d, _TOP_KEYS, _OPTIONAL_TOP, "config")
    cap = d["capacities"]
    _require_keys(cap, {"green", "yellow", "red"}, {"yellow", "red"},
                  "capacities")
    arr = d["arrivals"]
    _require_keys(arr, {"hourly_rates", "weekday_multipliers"},
                  {"weekday_multipliers"}, "arrivals")
    dur = d["durations"]
    _require_keys(dur, {"components", "min_duration_minutes"},
                  {"min_duration_minutes"}, "durations")
    comps = []
    for i, c in enumerate(dur["components"]):
        _require_keys(c, {"weight", "mean_minutes", "stddev_minutes"}, (),
                      f"durations.components[{i}]")
        comps.append(MixtureComponent(c["weight"], c["mean_minutes"],
                                      c["stddev_minutes"]))
    raw = Scenario(
        capacities=ZoneCapacities(green=cap["green"],
                                  yellow=cap.get("yellow", 0),
                                  red=cap.get("red", 0)),
        arrivals=ArrivalProfile(
            hourly_rates=tuple(arr["hourly_rates"]),
            weekday_multipliers=tuple(arr.get("weekday_multipliers",
                                              [1.0] * 7))),
        durations=DurationMixture(tuple(comps),
                                  dur.get("min_duration_minutes", 5.0)),
        master_seed=d["master_seed"],
        horizon_days=d.get("horizon_days", 22),
        grid_step_s=d.get("grid_step_s", 60),
        eval_step_s=d.get("eval_step_s", 300),
    )
    return validate_config(raw)


def scenario_to_dict(s: Scenario) -> dict:
    """Inverse of scenario_from_dict (field-for-field JSON mirror)."""
    return {
        "capacities": {"green": s.capacities.green,
                       "yellow": s.capacities.yellow,
                       "red": s.capacities.red},
        "arrivals": {"hourly_rates": list(s.arrivals.hourly_rates),
                     "weekday_multipliers": list(s.arrivals.weekday_multipliers)},
        "durations": {
            "components": [{"weight": c.weight,
                            "mean_minutes": c.mean_minutes,
                            "stddev_minutes": c.stddev_minutes}
                           for c in s.durations.components],
            "min_duration_minutes": s.durations.min_duration_minutes,
        },
        "master_seed": s.master_seed,
        "horizon_days": s.horizon_days,
        "grid_step_s": s.grid_step_s,
        "eval_step_s": s.eval_step_s,
    }


def load_config(path: str | Path) -> Scenario:
    """Load and validate a scenario from a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config root must be an object")
    return scenario_from_dict(data)


def save_config(s: Scenario, path: str | Path) -> None:
    """Write the canonical JSON form (stable bytes for equal scenarios)."""
    blob = json.dumps(scenario_to_dict(s), indent=2, sort_keys=True)
    Path(path).write_text(blob + "\n", encoding="utf-8")


def default_scenario_path() -> Path:
    """Path of the default scenario config shipped with the package."""
    return Path(resources.files("truckpark").joinpath("data/default_scenario.json"))


def load_default_scenario() -> Scenario:
    return load_config(default_scenario_path())
