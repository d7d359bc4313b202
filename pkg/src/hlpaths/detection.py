"""Turning pattern values into discrete high-level events.

For every (feature type, segment) the values observed across the whole
frame form a population; the detection threshold is that population's
nearest-rank percentile. A coordinate whose value reaches the threshold —
and is at least 1, so empty coordinates never fire — yields a high-level
event carrying the participating steps, their cases and the spread of
their endpoint times.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import IO, Iterable, Iterator, Union

from .errors import ConfigError
from .event_log import Segment, Step
from .framing import Coordinate, StepIndex, Theta
from .patterns import (
    ALL_FEATURE_TYPES,
    DelayThresholds,
    FeatureType,
    evaluate_pattern,
)

PAIR_POPULATIONS = ("occupied", "all")


@dataclass(frozen=True, slots=True)
class ThresholdTable:
    """Per (type, segment) detection thresholds at one percentile."""

    percentile: float
    values: dict[tuple[FeatureType, Segment], float]

    def get(self, ftype: FeatureType, segment: Segment) -> float:
        try:
            return self.values[(ftype, segment)]
        except KeyError:
            raise ValueError(f"no threshold for {ftype.value} on {segment}") from None


@dataclass(frozen=True, slots=True)
class HighLevelEvent:
    id: int
    ftype: FeatureType
    segment: Segment
    theta: Theta
    value: float
    cases: frozenset[str]
    start_spread: tuple[datetime, datetime]
    end_spread: tuple[datetime, datetime]
    steps: frozenset[Step] = field(default=frozenset())

    @property
    def coordinate(self) -> tuple[FeatureType, Segment, Theta]:
        """Typed identity of the event: where in (type, segment, frame) it sits."""
        return (self.ftype, self.segment, self.theta)


def _rank_threshold(values: list[float], p: float) -> float:
    """Threshold = element at index floor(p*n/100) of the sorted population.

    At p=100 the index equals n, which we read as "above everything":
    the threshold becomes +inf and the (type, segment) stops firing.
    """
    if not values:
        return math.inf
    if not 0 <= p <= 100:
        raise ConfigError(f"percentile must lie in [0, 100], got {p}")
    ordered = sorted(values)
    pos = math.floor(p * len(ordered) / 100)
    if pos >= len(ordered):
        return math.inf
    return ordered[pos]


def _single_thetas(idx: StepIndex) -> range:
    return idx.window_range


def compute_thresholds(
    idx: StepIndex,
    p: float,
    *,
    delay_thresholds: DelayThresholds | None = None,
    blacklist: frozenset[str] = frozenset(),
    pair_population: str = "occupied",
    types: Iterable[FeatureType] = ALL_FEATURE_TYPES,
) -> ThresholdTable:
    """Build the threshold table at percentile ``p``.

    Single-window populations span every window of the frame, zeros
    included, so a segment that is quiet most days gets a low bar. Pair
    populations default to the occupied pairs only (an all-pairs population
    would drown in structural zeros); ``pair_population="all"`` widens them
    to every ordered pair within the frame.
    """
    if pair_population not in PAIR_POPULATIONS:
        raise ConfigError(
            f"pair_population must be one of {PAIR_POPULATIONS}, got {pair_population!r}"
        )
    requested = [t for t in ALL_FEATURE_TYPES if t in set(types)]
    if FeatureType.DELAY in requested and delay_thresholds is None:
        raise ValueError("delay pattern needs delay thresholds")
    values: dict[tuple[FeatureType, Segment], float] = {}
    for segment in idx.sorted_segments():
        for ftype in requested:
            if ftype.uses_window_pair:
                thetas: Iterable[Theta] = idx.occupied_pairs(segment)
                if pair_population == "all":
                    hi = idx.window_range[-1]
                    thetas = (
                        (a, b)
                        for a in idx.window_range
                        for b in range(a, hi + 1)
                    )
            else:
                thetas = _single_thetas(idx)
            population = [
                evaluate_pattern(
                    ftype,
                    Coordinate(segment, theta),
                    idx,
                    delay_thresholds=delay_thresholds,
                    blacklist=blacklist,
                ).value
                for theta in thetas
            ]
            values[(ftype, segment)] = _rank_threshold(population, p)
    return ThresholdTable(percentile=p, values=values)


def _theta_sort_key(theta: Theta) -> tuple:
    return (theta,) if isinstance(theta, int) else tuple(theta)


def detect_hles(
    idx: StepIndex,
    thresholds: ThresholdTable,
    *,
    delay_thresholds: DelayThresholds | None = None,
    blacklist: frozenset[str] = frozenset(),
    types: Iterable[FeatureType] = ALL_FEATURE_TYPES,
) -> list[HighLevelEvent]:
    """Detect every high-level event: coordinates whose pattern value
    reaches max(threshold, 1).

    Ids are assigned in a deterministic scan order — feature type, then
    segment, then theta — so equal inputs give equal outputs.
    """
    hles: list[HighLevelEvent] = []
    requested = [t for t in ALL_FEATURE_TYPES if t in set(types)]
    if FeatureType.DELAY in requested and delay_thresholds is None:
        raise ValueError("delay pattern needs delay thresholds")
    for ftype in requested:
        for segment in idx.sorted_segments():
            bar = max(thresholds.get(ftype, segment), 1.0)
            if math.isinf(bar):
                continue
            if ftype.uses_window_pair:
                thetas: Iterable[Theta] = sorted(
                    idx.occupied_pairs(segment), key=_theta_sort_key
                )
            else:
                thetas = _single_thetas(idx)
            for theta in thetas:
                result = evaluate_pattern(
                    ftype,
                    Coordinate(segment, theta),
                    idx,
                    delay_thresholds=delay_thresholds,
                    blacklist=blacklist,
                )
                if result.value < bar:
                    continue
                firsts = [s.first.time for s in result.steps]
                seconds = [s.second.time for s in result.steps]
                hles.append(
                    HighLevelEvent(
                        id=len(hles),
                        ftype=ftype,
                        segment=segment,
                        theta=theta,
                        value=result.value,
                        cases=frozenset(s.case for s in result.steps),
                        start_spread=(min(firsts), max(firsts)),
                        end_spread=(min(seconds), max(seconds)),
                        steps=result.steps,
                    )
                )
    return hles


def summarize_by_type(hles: Iterable[HighLevelEvent]) -> dict[str, int]:
    counts = {t.value: 0 for t in ALL_FEATURE_TYPES}
    for h in hles:
        counts[h.ftype.value] += 1
    return counts


# --- serialization ---------------------------------------------------------

def _theta_to_json(theta: Theta) -> Union[int, list[int]]:
    return theta if isinstance(theta, int) else list(theta)


def hle_to_dict(h: HighLevelEvent) -> dict:
    return {
        "id": h.id,
        "type": h.ftype.value,
        "segment": list(h.segment),
        "theta": _theta_to_json(h.theta),
        "value": h.value,
        "n_steps": len(h.steps),
        "cases": sorted(h.cases),
        "start_spread": [t.isoformat() for t in h.start_spread],
        "end_spread": [t.isoformat() for t in h.end_spread],
    }


def hle_from_dict(d: dict) -> HighLevelEvent:
    theta = d["theta"]
    start = tuple(datetime.fromisoformat(t) for t in d["start_spread"])
    end = tuple(datetime.fromisoformat(t) for t in d["end_spread"])
    return HighLevelEvent(
        id=int(d["id"]),
        ftype=FeatureType.parse(d["type"]),
        segment=Segment(*d["segment"]),
        theta=theta if isinstance(theta, int) else (int(theta[0]), int(theta[1])),
        value=float(d["value"]),
        cases=frozenset(d["cases"]),
        start_spread=(start[0], start[1]),
        end_spread=(end[0], end[1]),
    )


def write_hles(hles: Iterable[HighLevelEvent], fp: IO[str]) -> None:
    for h in hles:
        fp.write(json.dumps(hle_to_dict(h), sort_keys=True) + "\n")


def read_hles(fp: IO[str]) -> Iterator[HighLevelEvent]:
    for line in fp:
        line = line.strip()
        if line:
            yield hle_from_dict(json.loads(line))
