"""The six congestion-style feature patterns evaluated at a coordinate.

Per-window types:

* ``enter``   — steps of the segment whose first event falls in the window.
* ``exit``    — steps whose second event falls in the window.
* ``workload``— exit steps executed by one and the same resource.
* ``handover``— exit steps whose two events were executed by different
  resources (real work handover).

Window-pair types:

* ``batch``   — steps entering the segment in the first window and exiting
  in the second.
* ``delay``   — the batch steps, but only when the window distance reaches
  the segment's delay threshold; empty otherwise.

Every pattern value is the size of its step set. Steps with an empty or
blacklisted resource on either endpoint still count for enter/exit/batch/
delay but for neither workload nor handover.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable, NamedTuple

from .errors import ConfigError
from .event_log import Segment, Step
from .framing import Coordinate, StepIndex


class FeatureType(str, enum.Enum):
    ENTER = "enter"
    EXIT = "exit"
    WORKLOAD = "workload"
    HANDOVER = "handover"
    BATCH = "batch"
    DELAY = "delay"

    @property
    def uses_window_pair(self) -> bool:
        return self in (FeatureType.BATCH, FeatureType.DELAY)

    @classmethod
    def parse(cls, name: str) -> "FeatureType":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ConfigError(f"unknown feature type {name!r}") from None


ALL_FEATURE_TYPES: tuple[FeatureType, ...] = tuple(FeatureType)

# segment -> minimum window distance for the delay pattern
DelayThresholds = dict[Segment, int]


class PatternResult(NamedTuple):
    steps: frozenset[Step]
    value: float


def resource_qualifies(step: Step, blacklist: frozenset[str]) -> bool:
    """True when both endpoints carry a usable (non-empty, non-blacklisted)
    resource, i.e. the step may count for workload/handover."""
    r1, r2 = step.first.resource, step.second.resource
    return bool(r1) and bool(r2) and r1 not in blacklist and r2 not in blacklist


def nearest_rank(values: Iterable[float], p: float) -> float:
    """Nearest-rank percentile: element at rank floor(p*n/100)+1, capped at n.

    Deterministic and interpolation-free; p=0 gives the minimum, p=100 the
    maximum.
    """
    ordered = sorted(values)
    if not ordered:
        raise ValueError("percentile of empty population")
    if not 0 <= p <= 100:
        raise ConfigError(f"percentile must lie in [0, 100], got {p}")
    return ordered[min(len(ordered) - 1, math.floor(p * len(ordered) / 100))]


def evaluate_pattern(
    ftype: FeatureType,
    coordinate: Coordinate,
    idx: StepIndex,
    *,
    delay_thresholds: DelayThresholds | None = None,
    blacklist: frozenset[str] = frozenset(),
) -> PatternResult:
    """Evaluate one feature pattern at one coordinate.

    The coordinate's theta shape must match the type (single window for
    enter/exit/workload/handover, window pair for batch/delay); a mismatch
    raises ValueError. ``delay_thresholds`` is consulted only for delay.
    """
    segment, theta = coordinate
    if ftype.uses_window_pair != coordinate.is_pair:
        raise ValueError(
            f"coordinate shape mismatch: {ftype.value} at theta {theta!r}"
        )

    if ftype is FeatureType.ENTER:
        steps = idx.steps_entering(segment, theta)
    elif ftype is FeatureType.EXIT:
        steps = idx.steps_exiting(segment, theta)
    elif ftype is FeatureType.WORKLOAD:
        steps = tuple(
            s for s in idx.steps_exiting(segment, theta)
            if resource_qualifies(s, blacklist) and s.first.resource == s.second.resource
        )
    elif ftype is FeatureType.HANDOVER:
        steps = tuple(
            s for s in idx.steps_exiting(segment, theta)
            if resource_qualifies(s, blacklist) and s.first.resource != s.second.resource
        )
    elif ftype is FeatureType.BATCH:
        steps = idx.pair_steps(segment, theta)
    elif ftype is FeatureType.DELAY:
        if delay_thresholds is None:
            raise ValueError("delay pattern needs delay thresholds")
        w_in, w_out = theta
        if w_out - w_in >= delay_thresholds.get(segment, 1):
            steps = idx.pair_steps(segment, theta)
        else:
            steps = ()
    else:  # pragma: no cover - exhaustive over the enum
        raise ValueError(f"unhandled feature type {ftype}")

    step_set = frozenset(steps)
    return PatternResult(steps=step_set, value=float(len(step_set)))


def segment_delay_threshold(segment: Segment, idx: StepIndex, q: float) -> int:
    """Minimum window distance that counts as a delay for this segment.

    The q-th nearest-rank percentile (rounded up) of the window distances
    its steps take, floored at 1 — a distance of 0 must never count as
    delayed.
    """
    steps = idx.steps_of(segment)
    if not steps:
        raise ValueError(f"segment {segment} has no steps")
    distances = [
        idx.framing.window_index(s.second.time) - idx.framing.window_index(s.first.time)
        for s in steps
    ]
    return max(1, math.ceil(nearest_rank(distances, q)))


def compute_delay_thresholds(idx: StepIndex, q: float) -> DelayThresholds:
    """Per-segment delay thresholds for every retained segment with steps."""
    return {
        segment: segment_delay_threshold(segment, idx, q)
        for segment in idx.sorted_segments()
        if idx.steps_of(segment)
    }
