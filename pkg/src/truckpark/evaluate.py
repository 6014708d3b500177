"""Transition extraction, matching and delay bookkeeping.

The quantity of interest is not the occupancy value itself but how quickly
state changes (empty / slightly filled / full) are detected.  True and
estimated label series are reduced to transition events, matched greedily in
time order, and aggregated into a per-transition-type delay table.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .series import LabelSeries, StateLabel

__all__ = [
    "Transition",
    "TransitionMatch",
    "MatchResult",
    "DelayTable",
    "PairStats",
    "ADJACENT_PAIRS",
    "CRITICAL_PAIRS",
    "extract_transitions",
    "match_transitions",
    "delay_table",
    "render_delay_table",
]

DEFAULT_EARLY_WINDOW_S = 1800
DEFAULT_LATE_WINDOW_S = 21600

# Ordered (from, to) pairs one level apart; two-level jumps are decomposed.
ADJACENT_PAIRS: tuple[tuple[StateLabel, StateLabel], ...] = (
    (StateLabel.EMPTY, StateLabel.SLIGHTLY_FILLED),
    (StateLabel.SLIGHTLY_FILLED, StateLabel.FULL),
    (StateLabel.FULL, StateLabel.SLIGHTLY_FILLED),
    (StateLabel.SLIGHTLY_FILLED, StateLabel.EMPTY),
)

# The transitions that matter for warning drivers about a filling lot.
CRITICAL_PAIRS: tuple[tuple[StateLabel, StateLabel], ...] = (
    (StateLabel.SLIGHTLY_FILLED, StateLabel.FULL),
    (StateLabel.FULL, StateLabel.SLIGHTLY_FILLED),
)


@dataclass(frozen=True)
class Transition:
    """A state change at a tick, attributed to the tick where it appears."""

    time_s: int
    from_state: StateLabel
    to_state: StateLabel

    def __post_init__(self) -> None:
        if self.from_state == self.to_state:
            raise ValueError("transition must change the state")

    @property
    def pair(self) -> tuple[StateLabel, StateLabel]:
        return (self.from_state, self.to_state)


@dataclass(frozen=True)
class TransitionMatch:
    truth: Transition
    estimate: Transition

    @property
    def delay_s(self) -> int:
        """Signed delay; negative means the estimate was early."""
        return self.estimate.time_s - self.truth.time_s


@dataclass(frozen=True)
class MatchResult:
    matches: tuple[TransitionMatch, ...]
    misses: tuple[Transition, ...]
    false_alarms: tuple[Transition, ...]


def extract_transitions(labels: LabelSeries) -> list[Transition]:
    """List every label change, timestamped at the tick where it shows up.

    A jump across two levels (empty <-> full) is decomposed into two
    single-level transitions through the slightly-filled state, both carrying
    the same timestamp.
    """
    values = np.asarray(labels.labels)
    times = labels.times()
    out: list[Transition] = []
    for i in np.flatnonzero(np.diff(values)):
        a = StateLabel(int(values[i]))
        b = StateLabel(int(values[i + 1]))
        t = int(times[i + 1])
        if abs(int(b) - int(a)) == 2:
            mid = StateLabel.SLIGHTLY_FILLED
            out.append(Transition(t, a, mid))
            out.append(Transition(t, mid, b))
        else:
            out.append(Transition(t, a, b))
    return out


def _sort_key(tr: Transition):
    return (tr.time_s, int(tr.from_state), int(tr.to_state))


def match_transitions(truth: list[Transition], estimate: list[Transition],
                      early_window_s: int = DEFAULT_EARLY_WINDOW_S,
                      late_window_s: int = DEFAULT_LATE_WINDOW_S) -> MatchResult:
    """Greedy chronological matching of estimated to true transitions.

    Each true transition, in time order, takes the earliest still-unmatched
    estimated transition of the identical (from, to) type whose time lies in
    [t_true - early_window_s, t_true + late_window_s].  True transitions
    without a partner are misses; leftover estimated ones are false alarms.
    The window is asymmetric because a sparse estimator is systematically
    late: a long late window keeps slow detections as (large-delay) matches
    instead of a miss plus a false alarm.
    """
    truth = sorted(truth, key=_sort_key)
    estimate = sorted(estimate, key=_sort_key)
    by_pair: dict[tuple, list[Transition]] = {}
    for tr in estimate:
        by_pair.setdefault(tr.pair, []).append(tr)
    cursor = {pair: 0 for pair in by_pair}
    matches: list[TransitionMatch] = []
    misses: list[Transition] = []
    matched_est: set[int] = set()
    for tr in truth:
        pool = by_pair.get(tr.pair)
        if pool is None:
            misses.append(tr)
            continue
        i = cursor[tr.pair]
        # candidates below the early edge can never match a later truth
        # either (later truths have later early edges), so skip permanently
        while i < len(pool) and pool[i].time_s < tr.time_s - early_window_s:
            i += 1
        cursor[tr.pair] = i
        if i < len(pool) and pool[i].time_s <= tr.time_s + late_window_s:
            matches.append(TransitionMatch(tr, pool[i]))
            matched_est.add(id(pool[i]))
            cursor[tr.pair] = i + 1
        else:
            misses.append(tr)
    false_alarms = [tr for tr in estimate if id(tr) not in matched_est]
    return MatchResult(tuple(matches), tuple(misses), tuple(false_alarms))


@dataclass(frozen=True)
class PairStats:
    """Aggregated delay statistics for one (from, to) transition type."""

    matched: int = 0
    missed: int = 0
    false_alarms: int = 0
    mean_signed_delay_min: float | None = None
    mean_abs_delay_min: float | None = None


@dataclass(frozen=True)
class DelayTable:
    """Per transition-type delay summary (full precision, unrounded)."""

    stats: dict[tuple[StateLabel, StateLabel], PairStats] = field(
        default_factory=dict)

    def get(self, pair: tuple[StateLabel, StateLabel]) -> PairStats:
        return self.stats.get(pair, PairStats())

    def to_dict(self) -> dict:
        out = {}
        for pair, st in self.stats.items():
            key = f"{pair[0].token}->{pair[1].token}"
            out[key] = {
                "matched": st.matched,
                "missed": st.missed,
                "false_alarms": st.false_alarms,
                "mean_signed_delay_min": st.mean_signed_delay_min,
                "mean_abs_delay_min": st.mean_abs_delay_min,
            }
        return out


def delay_table(result: MatchResult) -> DelayTable:
    """Aggregate a match result into per-pair mean delays and counts."""
    stats: dict[tuple[StateLabel, StateLabel], PairStats] = {}
    for pair in ADJACENT_PAIRS:
        delays = np.array([m.delay_s for m in result.matches
                           if m.truth.pair == pair], dtype=np.float64)
        missed = sum(1 for tr in result.misses if tr.pair == pair)
        fas = sum(1 for tr in result.false_alarms if tr.pair == pair)
        if delays.size:
            stats[pair] = PairStats(
                matched=int(delays.size), missed=missed, false_alarms=fas,
                mean_signed_delay_min=float(np.mean(delays) / 60.0),
                mean_abs_delay_min=float(np.mean(np.abs(delays)) / 60.0))
        else:
            stats[pair] = PairStats(matched=0, missed=missed,
                                    false_alarms=fas)
    return DelayTable(stats)


_RENDER_ORDER = (StateLabel.FULL, StateLabel.SLIGHTLY_FILLED, StateLabel.EMPTY)


def _render_name(label: StateLabel) -> str:
    return label.token.replace("_", " ")


def render_delay_table(table: DelayTable, *, signed: bool = False) -> str:
    """Human-readable delay matrix (rows = from, columns = to).

    Cells show the mean delay in minutes with one decimal; types without a
    match show a dash.  Cells marked with * are the critical ones for the
    application: the lot filling up or freeing up.
    """
    kind = "mean_signed_delay_min" if signed else "mean_abs_delay_min"

    def cell(pair) -> str:
        st = table.get(pair)
        if pair not in dict.fromkeys(ADJACENT_PAIRS) or st.matched == 0:
            return "-"
        mark = "*" if pair in CRITICAL_PAIRS else ""
        return f"{mark}{getattr(st, kind):.1f}'"

    names = [_render_name(s) for s in _RENDER_ORDER]
    width = max(len(n) for n in names + ["from \\ to"]) + 2
    colw = max(12, max(len(n) for n in names) + 2)
    lines = ["from \\ to".ljust(width) + "".join(n.rjust(colw) for n in names)]
    lines.append("-" * (width + colw * len(names)))
    for src in _RENDER_ORDER:
        row = [_render_name(src).ljust(width)]
        for dst in _RENDER_ORDER:
            row.append(("-" if src == dst else cell((src, dst))).rjust(colw))
        lines.append("".join(row))
    lines.append("")
    lines.append("counts (matched/missed/false alarms):")
    for pair in ADJACENT_PAIRS:
        st = table.get(pair)
        lines.append(f"  {_render_name(pair[0])} -> {_render_name(pair[1])}: "
                     f"{st.matched}/{st.missed}/{st.false_alarms}")
    lines.append("* critical transitions")
    return "\n".join(lines) + "\n"
