"""Sparse observation sampling at a given app penetration rate.

Each truck either runs the recommendation app or not (one flag per truck,
drawn once), so the observable signal is the park/depart events of the
participating subset.  Scaling the observed count by 1 / (p * green
capacity) gives an unbiased estimate of the true occupancy ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import ConfigError, PenetrationRate
from .simulate import EventLog
from .series import ObservedSeries

__all__ = [
    "FlaggedEventLog",
    "assign_app_users",
    "observed_count_series",
    "scale_series",
]


@dataclass(frozen=True)
class FlaggedEventLog:
    """An event log plus one app-user flag per event (same order)."""

    log: EventLog
    app_user: np.ndarray  # bool, aligned with log.events

    def __post_init__(self) -> None:
        if len(self.app_user) != len(self.log.events):
            raise ValueError("flag vector length must match event count")

    def __len__(self) -> int:
        return len(self.log.events)

    def observed_fraction(self) -> float:
        return float(np.mean(self.app_user)) if len(self) else 0.0


def _penetration(p: float | PenetrationRate) -> float:
    p = float(p)
    if not (0.0 < p <= 1.0):
        raise ConfigError("p must be in (0,1]")
    return p


def assign_app_users(events: EventLog, p: float | PenetrationRate,
                     rng_seed: int) -> FlaggedEventLog:
    """Flag each truck as an app user independently with probability p.

    Deterministic per (seed, p).  For a fixed seed the flag sets are nested
    across penetrations: every truck flagged at p is also flagged at any
    p' > p.
    """
    p = _penetration(p)
    rng = np.random.default_rng(rng_seed)
    flags = rng.random(len(events)) < p
    return FlaggedEventLog(events, flags)


def observed_count_series(flagged: FlaggedEventLog, start_s: int, step_s: int,
                          end_s: int) -> ObservedSeries:
    """Count app-user trucks parked at each grid point (counts only).

    Same half-open [arrival, departure) semantics as the true occupancy
    counting.
    """
    ticks = np.arange(start_s, end_s, step_s, dtype=np.int64)
    arr = flagged.log.arrivals()[flagged.app_user]
    dep = np.sort(flagged.log.departures()[flagged.app_user])
    n_in = np.searchsorted(arr, ticks, side="right")
    n_out = np.searchsorted(dep, ticks, side="right")
    return ObservedSeries(int(start_s), int(step_s),
                          (n_in - n_out).astype(np.int64), None)


def scale_series(observed: ObservedSeries, p: float | PenetrationRate,
                 green_capacity: int) -> ObservedSeries:
    """Fill the scaled occupancy estimate: count / (p * green capacity)."""
    p = _penetration(p)
    scaled = observed.observed_count / (p * float(green_capacity))
    return ObservedSeries(observed.start_s, observed.step_s,
                          observed.observed_count, scaled)
