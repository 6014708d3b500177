"""Discrete-event simulation of a truck parking lot.

Demand is a non-homogeneous Poisson process with piecewise-constant hourly
rates (sampled by thinning against the peak rate); parking durations come
from a truncated Gaussian mixture.  Each truck parks exactly once, taking
the first free zone in order green, yellow, red; trucks that find every
zone full are rejected and only counted.

Event times are integer seconds and ties are broken by truck id, so a given
scenario always produces the identical event log.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .scenario import (SECONDS_PER_DAY, STREAM_ARRIVALS, STREAM_DURATIONS,
                       ArrivalProfile, DurationMixture, Scenario, ZoneCapacities,
                       ZoneId)
from .series import OccupancySeries

__all__ = [
    "ParkingEvent",
    "EventLog",
    "SimulationResult",
    "sample_arrivals",
    "sample_duration",
    "simulate",
    "occupancy_from_events",
]

_RESAMPLE_CAP = 1000


@dataclass(frozen=True)
class ParkingEvent:
    """One truck's stay: parked during [arrival_s, departure_s)."""

    truck_id: int
    arrival_s: int
    departure_s: int
    zone: ZoneId


@dataclass(frozen=True)
class EventLog:
    """All parking events of a run, sorted by arrival (ties by truck id)."""

    events: tuple[ParkingEvent, ...]
    scenario_fingerprint: str = ""

    def __len__(self) -> int:
        return len(self.events)

    def arrivals(self) -> np.ndarray:
        return np.fromiter((e.arrival_s for e in self.events), dtype=np.int64,
                           count=len(self.events))

    def departures(self) -> np.ndarray:
        return np.fromiter((e.departure_s for e in self.events),
                           dtype=np.int64, count=len(self.events))

    def zones(self) -> np.ndarray:
        return np.fromiter((int(e.zone) for e in self.events), dtype=np.int8,
                           count=len(self.events))


@dataclass(frozen=True)
class SimulationResult:
    events: EventLog
    occupancy: OccupancySeries
    rejected_arrivals: int


def _rates_at(profile: ArrivalProfile, t_s: np.ndarray) -> np.ndarray:
    """Hourly arrival rate in effect at each absolute time (vectorized)."""
    rates = np.asarray(profile.hourly_rates, dtype=np.float64)
    mults = np.asarray(profile.weekday_multipliers, dtype=np.float64)
    hour = (t_s.astype(np.int64) % SECONDS_PER_DAY) // 3600
    day = t_s.astype(np.int64) // SECONDS_PER_DAY
    return rates[hour] * mults[day % 7]


def sample_arrivals(profile: ArrivalProfile, horizon_days: int,
                    rng_seed: int) -> np.ndarray:
    """Draw arrival times (seconds, strictly increasing floats) by thinning.

    A homogeneous Poisson stream at the peak hourly rate is generated over
    the horizon and each candidate is kept with probability
    rate(t) / peak_rate, which yields the target non-homogeneous process.
    """
    horizon_s = float(horizon_days * SECONDS_PER_DAY)
    peak_hourly = profile.max_rate()
    if peak_hourly <= 0.0:
        return np.empty(0, dtype=np.float64)
    lam_s = peak_hourly / 3600.0
    rng = np.random.default_rng(rng_seed)
    chunk = 8192
    out = []
    t = 0.0
    while t < horizon_s:
        gaps = rng.exponential(1.0 / lam_s, size=chunk)
        cand = t + np.cumsum(gaps)
        u = rng.random(chunk)
        keep = (cand < horizon_s) & (u * peak_hourly < _rates_at(profile, cand))
        out.append(cand[keep])
        t = float(cand[-1])
    return np.concatenate(out) if out else np.empty(0, dtype=np.float64)


def sample_duration(mixture: DurationMixture, rng: np.random.Generator) -> float:
    """Draw one parking duration in seconds.

    Picks a mixture component by weight and draws from its Gaussian; draws
    below the minimum duration are fully redrawn (component included).  After
    1000 failed attempts the minimum duration itself is returned.
    """
    weights = np.array([c.weight for c in mixture.components])
    cum = np.cumsum(weights)
    min_minutes = mixture.min_duration_minutes
    for _ in range(_RESAMPLE_CAP):
        k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        k = min(k, len(mixture.components) - 1)
        comp = mixture.components[k]
        x = rng.normal(comp.mean_minutes, comp.stddev_minutes)
        if x >= min_minutes:
            return float(x) * 60.0
    return float(min_minutes) * 60.0


def simulate(scenario: Scenario) -> SimulationResult:
    """Run the full scenario and return events, occupancy and rejections."""
    arrivals_f = sample_arrivals(scenario.arrivals, scenario.horizon_days,
                                 scenario.stream_seed(STREAM_ARRIVALS))
    rng_dur = np.random.default_rng(scenario.stream_seed(STREAM_DURATIONS))
    caps = scenario.capacities
    cap_by_zone = (caps.green, caps.yellow, caps.red)
    parked: list[list[int]] = [[], [], []]  # departure min-heaps per zone
    events: list[ParkingEvent] = []
    rejected = 0
    for t_f in arrivals_f:
        arrival_s = int(t_f)
        duration_s = sample_duration(scenario.durations, rng_dur)
        departure_s = arrival_s + max(1, int(round(duration_s)))
        for heap in parked:
            while heap and heap[0] <= arrival_s:
                heapq.heappop(heap)
        for zone in (ZoneId.GREEN, ZoneId.YELLOW, ZoneId.RED):
            heap = parked[zone]
            if len(heap) < cap_by_zone[zone]:
                heapq.heappush(heap, departure_s)
                events.append(ParkingEvent(len(events), arrival_s,
                                           departure_s, zone))
                break
        else:
            rejected += 1
    log = EventLog(tuple(events), scenario.fingerprint())
    occupancy = occupancy_from_events(log, 0, scenario.grid_step_s,
                                      scenario.horizon_s, caps)
    return SimulationResult(log, occupancy, rejected)


def occupancy_from_events(events: EventLog, start_s: int, step_s: int,
                          end_s: int, capacities: ZoneCapacities) -> OccupancySeries:
    """Count parked trucks per zone at every grid point in [start_s, end_s).

    A truck parked during [arrival, departure) is counted at grid point t
    iff arrival <= t < departure.  Input must be sorted by arrival time.
    """
    arr = events.arrivals()
    if np.any(np.diff(arr) < 0):
        raise ValueError("event log must be sorted by arrival time")
    ticks = np.arange(start_s, end_s, step_s, dtype=np.int64)
    zones = events.zones()
    dep = events.departures()
    counts = []
    for zone in (ZoneId.GREEN, ZoneId.YELLOW, ZoneId.RED):
        mask = zones == int(zone)
        arr_z = arr[mask]  # sorted because arr is sorted
        dep_z = np.sort(dep[mask])
        n_in = np.searchsorted(arr_z, ticks, side="right")
        n_out = np.searchsorted(dep_z, ticks, side="right")
        counts.append((n_in - n_out).astype(np.int64))
    total = counts[0] + counts[1] + counts[2]
    ratio = total / float(capacities.green)
    return OccupancySeries(int(start_s), int(step_s), counts[0], counts[1],
                           counts[2], total, ratio)
