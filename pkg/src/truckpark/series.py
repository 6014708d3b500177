"""Regular-grid time series containers shared across the pipeline."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .scenario import SECONDS_PER_DAY

__all__ = ["StateLabel", "OccupancySeries", "ObservedSeries", "LabelSeries"]


class StateLabel(IntEnum):
    """Discrete occupancy states, totally ordered by fill level."""

    EMPTY = 0
    SLIGHTLY_FILLED = 1
    FULL = 2

    @property
    def token(self) -> str:
        return self.name.lower()

    @classmethod
    def from_token(cls, token: str) -> "StateLabel":
        try:
            return cls[token.upper()]
        except KeyError:
            raise ValueError(f"unknown label {token!r}") from None


def _times(start_s: int, step_s: int, n: int) -> np.ndarray:
    return start_s + step_s * np.arange(n, dtype=np.int64)


@dataclass(frozen=True)
class OccupancySeries:
    """True parked-truck counts per zone on a regular grid.

    ``ratio`` is total count over green capacity and may exceed 1.0 while
    overflow zones are occupied.
    """

    start_s: int
    step_s: int
    count_green: np.ndarray
    count_yellow: np.ndarray
    count_red: np.ndarray
    count_total: np.ndarray
    ratio: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.count_total)
        for name in ("count_green", "count_yellow", "count_red", "ratio"):
            if len(getattr(self, name)) != n:
                raise ValueError("occupancy columns must have equal length")

    def __len__(self) -> int:
        return len(self.count_total)

    def times(self) -> np.ndarray:
        return _times(self.start_s, self.step_s, len(self))

    def day_slice(self, day: int) -> "OccupancySeries":
        i0, i1 = _day_bounds(self.start_s, self.step_s, len(self), day)
        return OccupancySeries(self.start_s + i0 * self.step_s, self.step_s,
                               self.count_green[i0:i1],
                               self.count_yellow[i0:i1],
                               self.count_red[i0:i1],
                               self.count_total[i0:i1],
                               self.ratio[i0:i1])


@dataclass(frozen=True)
class ObservedSeries:
    """App-visible parked-truck counts and their scaled occupancy estimate.

    ``scaled_ratio`` is None until the series went through scaling by the
    penetration rate.
    """

    start_s: int
    step_s: int
    observed_count: np.ndarray
    scaled_ratio: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.observed_count)

    def times(self) -> np.ndarray:
        return _times(self.start_s, self.step_s, len(self))

    def day_slice(self, day: int) -> "ObservedSeries":
        i0, i1 = _day_bounds(self.start_s, self.step_s, len(self), day)
        ratio = None if self.scaled_ratio is None else self.scaled_ratio[i0:i1]
        return ObservedSeries(self.start_s + i0 * self.step_s, self.step_s,
                              self.observed_count[i0:i1], ratio)


@dataclass(frozen=True)
class LabelSeries:
    """One StateLabel per evaluation tick, stored as int8 enum values."""

    start_s: int
    step_s: int
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    def times(self) -> np.ndarray:
        return _times(self.start_s, self.step_s, len(self))

    def label_at(self, i: int) -> StateLabel:
        return StateLabel(int(self.labels[i]))

    def day_slice(self, day: int) -> "LabelSeries":
        i0, i1 = _day_bounds(self.start_s, self.step_s, len(self), day)
        return LabelSeries(self.start_s + i0 * self.step_s, self.step_s,
                           self.labels[i0:i1])


def _day_bounds(start_s: int, step_s: int, n: int, day: int) -> tuple[int, int]:
    """Index range [i0, i1) of grid points inside day ``day`` (absolute)."""
    lo = day * SECONDS_PER_DAY
    hi = lo + SECONDS_PER_DAY
    i0 = max(0, -(-(lo - start_s) // step_s))
    i1 = min(n, -(-(hi - start_s) // step_s))
    return i0, max(i0, i1)


def same_grid(a, b) -> bool:
    """True when two series share start, step and length."""
    return (a.start_s == b.start_s and a.step_s == b.step_s
            and len(a) == len(b))
