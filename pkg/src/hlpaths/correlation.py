"""Association between path participation and case-level attributes.

Cases split into those participating in a high-level path (the union of
the common cases of its episodes) and comparable non-participants: cases
that walk the same activity stretch — the path's folded activity chain as
a contiguous infix of their trace — without taking part in any of its
episodes. Participation against an attribute class (outcome, a throughput
time bin, ...) gives a contingency table; Pearson's chi-square test of
independence, without continuity correction, quantifies the association.
Multiple paths are tested at once, so p-values are adjusted with the
Benjamini-Hochberg procedure before calling anything significant.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from scipy.special import gammaincc

from .errors import ConfigError
from .event_log import EventLog
from .linkage import Episode, HighLevelPath
from .patterns import nearest_rank

# 95% critical values of the chi-square distribution for the table shapes
# that actually occur (2x2 and 2x3 / 3x2)
CHI2_CRITICAL_95 = {1: 3.8414588206941285, 2: 5.991464547107983}


def contains_infix(sequence: Sequence[str], infix: Sequence[str]) -> bool:
    """True when ``infix`` occurs in ``sequence`` as a contiguous run."""
    n, m = len(sequence), len(infix)
    if m == 0:
        return True
    return any(tuple(sequence[i : i + m]) == tuple(infix) for i in range(n - m + 1))


def participating_cases(
    path: HighLevelPath, grouped: Mapping[HighLevelPath, list[Episode]]
) -> frozenset[str]:
    cases: set[str] = set()
    for ep in grouped.get(path, ()):
        cases |= ep.common_cases
    return frozenset(cases)


def non_participating_cases(
    log: EventLog, path: HighLevelPath, participating: frozenset[str]
) -> frozenset[str]:
    """Cases that traverse the path's activity stretch without taking part.

    Restricting the comparison group to traversers keeps the two groups
    comparable — a case that never reaches those activities says nothing
    about what happens there.
    """
    chain = path.activity_chain()
    return frozenset(
        c
        for c in log.cases
        if c not in participating and contains_infix(log.activity_sequence(c), chain)
    )


# --- case attributes -------------------------------------------------------

def derive_outcome(
    log: EventLog,
    success_activity: str,
    *,
    positive: str = "success",
    negative: str = "failure",
) -> dict[str, str]:
    """Binary outcome per case: did the marker activity ever occur?"""
    out: dict[str, str] = {}
    for case in log.cases:
        seq = log.activity_sequence(case)
        out[case] = positive if success_activity in seq else negative
    return out


def derive_throughput(log: EventLog) -> dict[str, float]:
    """Throughput time per case in seconds, first event to last."""
    out: dict[str, float] = {}
    for case in log.cases:
        trace = log.trace(case)
        out[case] = (trace[-1].time - trace[0].time).total_seconds()
    return out


@dataclass(frozen=True, slots=True)
class AttributeBinning:
    """Half-open numeric bins: (-inf, e1), [e1, e2), ..., [ek, inf)."""

    edges: tuple[float, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.edges) + 1:
            raise ConfigError("need exactly one more label than edges")
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise ConfigError(f"bin edges must strictly increase, got {self.edges}")

    @classmethod
    def from_edges(
        cls, edges: Sequence[float], labels: Sequence[str] | None = None
    ) -> "AttributeBinning":
        edges = tuple(float(e) for e in edges)
        if labels is None:
            labels = (
                [f"<{edges[0]:g}"]
                + [f"[{a:g},{b:g})" for a, b in zip(edges, edges[1:])]
                + [f">={edges[-1]:g}"]
            )
        return cls(edges=edges, labels=tuple(labels))

    @classmethod
    def by_quantiles(cls, values: Iterable[float], k: int) -> "AttributeBinning":
        """k roughly equal-mass bins with edges at the i/k nearest-rank
        percentiles. Duplicate edges (heavy ties) collapse into fewer bins."""
        if k < 2:
            raise ConfigError(f"need at least 2 bins, got {k}")
        pool = list(values)
        if pool and min(pool) == max(pool):
            raise ConfigError("all values identical; cannot bin by quantiles")
        raw = [nearest_rank(pool, 100 * i / k) for i in range(1, k)]
        edges: list[float] = []
        for e in raw:
            if not edges or e > edges[-1]:
                edges.append(float(e))
        return cls.from_edges(edges)

    def classify(self, value: float) -> str:
        return self.labels[bisect.bisect_right(self.edges, value)]


def bin_cases(values: Mapping[str, float], binning: AttributeBinning) -> dict[str, str]:
    return {case: binning.classify(v) for case, v in values.items()}


# --- the test itself -------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ContingencyTable:
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.counts) != len(self.row_labels) or any(
            len(r) != len(self.col_labels) for r in self.counts
        ):
            raise ValueError("table shape does not match its labels")

    @property
    def total(self) -> int:
        return sum(sum(r) for r in self.counts)

    def row_totals(self) -> tuple[int, ...]:
        return tuple(sum(r) for r in self.counts)

    def col_totals(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.counts))


@dataclass(frozen=True, slots=True)
class ChiSquareResult:
    statistic: float
    dof: int
    p_value: float
    expected: tuple[tuple[float, ...], ...]
    low_expected: bool

    def significant_at(self, alpha: float = 0.05) -> bool:
        return self.p_value < alpha


def chi_square(table: ContingencyTable | Sequence[Sequence[int]]) -> ChiSquareResult:
    """Pearson's chi-square test of independence, no continuity correction.

    Expected counts come from the marginals; a zero row or column marginal
    leaves the test undefined and raises ValueError. Expected counts below
    5 only set ``low_expected`` — the caller decides what to make of it.
    """
    counts = table.counts if isinstance(table, ContingencyTable) else tuple(
        tuple(r) for r in table
    )
    if len(counts) < 2 or any(len(r) < 2 for r in counts):
        raise ValueError("need at least a 2x2 table")
    if len({len(r) for r in counts}) != 1:
        raise ValueError("ragged table")
    if any(v < 0 for row in counts for v in row):
        raise ValueError("negative count")
    row_totals = [sum(r) for r in counts]
    col_totals = [sum(c) for c in zip(*counts)]
    total = sum(row_totals)
    if any(t == 0 for t in row_totals) or any(t == 0 for t in col_totals):
        raise ValueError("zero marginal: drop the empty row or column first")
    expected = tuple(
        tuple(rt * ct / total for ct in col_totals) for rt in row_totals
    )
    stat = sum(
        (o - e) ** 2 / e for orow, erow in zip(counts, expected) for o, e in zip(orow, erow)
    )
    dof = (len(counts) - 1) * (len(counts[0]) - 1)
    p = float(gammaincc(dof / 2, stat / 2))
    low = any(e < 5 for row in expected for e in row)
    return ChiSquareResult(
        statistic=float(stat), dof=dof, p_value=p, expected=expected, low_expected=low
    )


def critical_value(dof: int, alpha: float = 0.05) -> float:
    """Chi-square critical value; tabulated for the common cases, bisection
    on the survival function otherwise."""
    if alpha == 0.05 and dof in CHI2_CRITICAL_95:
        return CHI2_CRITICAL_95[dof]
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    lo, hi = 0.0, 10.0
    while gammaincc(dof / 2, hi / 2) > alpha:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if gammaincc(dof / 2, mid / 2) > alpha:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def benjamini_hochberg(p_values: Sequence[float]) -> list[float]:
    """BH step-up adjusted p-values (q-values), order preserved."""
    n = len(p_values)
    if n == 0:
        return []
    order = sorted(range(n), key=lambda i: p_values[i])
    q = [0.0] * n
    running = math.inf
    for rank in range(n, 0, -1):
        i = order[rank - 1]
        running = min(running, p_values[i] * n / rank)
        q[i] = min(1.0, running)
    return q


# --- ranking paths against an attribute ------------------------------------

@dataclass(frozen=True, slots=True)
class PathAssociation:
    path: HighLevelPath
    frequency: int
    n_participating: int
    n_non_participating: int
    table: ContingencyTable | None
    result: ChiSquareResult | None
    q_value: float | None
    significant: bool
    skipped_reason: str | None = None


def participation_table(
    participating: frozenset[str],
    non_participating: frozenset[str],
    classes: Mapping[str, str],
    *,
    class_order: Sequence[str] | None = None,
) -> ContingencyTable:
    cols = tuple(class_order) if class_order else tuple(sorted(set(classes.values())))
    def row(group: frozenset[str]) -> tuple[int, ...]:
        tally = {c: 0 for c in cols}
        for case in group:
            label = classes.get(case)
            if label is not None:
                tally[label] += 1
        return tuple(tally[c] for c in cols)

    return ContingencyTable(
        row_labels=("participating", "non-participating"),
        col_labels=cols,
        counts=(row(participating), row(non_participating)),
    )


def rank_paths(
    log: EventLog,
    grouped: Mapping[HighLevelPath, list[Episode]],
    classes: Mapping[str, str],
    *,
    alpha: float = 0.05,
    class_order: Sequence[str] | None = None,
) -> list[PathAssociation]:
    """Test every path and rank by adjusted significance.

    Paths whose table has a zero marginal (nobody on one side, or an
    attribute class absent from both groups) cannot be tested; they are
    kept in the output, marked skipped, and excluded from the BH
    adjustment.
    """
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    paths = sorted(grouped, key=lambda p: (-len(grouped[p]), p.label()))
    tested: list[tuple[HighLevelPath, int, ContingencyTable, ChiSquareResult, int, int]] = []
    skipped: list[tuple[HighLevelPath, int, int, int, str]] = []
    for path in paths:
        freq = len(grouped[path])
        part = participating_cases(path, grouped)
        nonpart = non_participating_cases(log, path, part)
        table = participation_table(part, nonpart, classes, class_order=class_order)
        # drop attribute classes absent from both groups before testing
        keep = [j for j, t in enumerate(table.col_totals()) if t > 0]
        if len(keep) < len(table.col_labels):
            table = ContingencyTable(
                row_labels=table.row_labels,
                col_labels=tuple(table.col_labels[j] for j in keep),
                counts=tuple(tuple(r[j] for j in keep) for r in table.counts),
            )
        try:
            result = chi_square(table)
        except ValueError as exc:
            skipped.append((path, freq, len(part), len(nonpart), str(exc)))
            continue
        tested.append((path, freq, table, result, len(part), len(nonpart)))

    q_values = benjamini_hochberg([t[3].p_value for t in tested])
    out = [
        PathAssociation(
            path=path,
            frequency=freq,
            n_participating=n_p,
            n_non_participating=n_n,
            table=table,
            result=result,
            q_value=q,
            significant=q <= alpha,
        )
        for (path, freq, table, result, n_p, n_n), q in zip(tested, q_values)
    ]
    out.sort(key=lambda a: (a.result.p_value, -a.frequency, a.path.label()))
    out.extend(
        PathAssociation(
            path=path,
            frequency=freq,
            n_participating=n_p,
            n_non_participating=n_n,
            table=None,
            result=None,
            q_value=None,
            significant=False,
            skipped_reason=reason,
        )
        for path, freq, n_p, n_n, reason in sorted(
            skipped, key=lambda s: (-s[1], s[0].label())
        )
    )
    return out
