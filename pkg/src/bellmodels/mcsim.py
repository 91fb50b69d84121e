"""Seeded Monte Carlo simulation of i.i.d. Bell trials.

Trial ``i`` of a run is drawn by inverse CDF from the ``i``-th uniform of a
:class:`~bellmodels.rng.CounterRNG`, over the joint's cells in canonical
order (lexicographic in a, b, x, y with outcomes ascending). Runs are thus
bit-reproducible and can be generated in any index order.
"""
from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .bellstats import ChshReport, chsh_from_correlations
from .errors import EmptyTrials, MismatchedPairs, ValidationError
from .probcore import SETTING_PAIRS, CondFamily, JointDist
from .rng import CounterRNG

TRIAL_HEADER = ("index", "a", "b", "x", "y")


class TrialRecord(NamedTuple):
    index: int
    a: int
    b: int
    x: int
    y: int


class TrialLog(Sequence):
    """Column-stored sequence of :class:`TrialRecord`."""

    def __init__(self, index, a, b, x, y):
        self.index = np.asarray(index, dtype=np.int64)
        self.a = np.asarray(a, dtype=np.int8)
        self.b = np.asarray(b, dtype=np.int8)
        self.x = np.asarray(x, dtype=np.int8)
        self.y = np.asarray(y, dtype=np.int8)

    @classmethod
    def from_records(cls, records: Iterable[TrialRecord]) -> TrialLog:
        if isinstance(records, TrialLog):
            return records
        rows = [tuple(r) for r in records]
        if not rows:
            return cls([], [], [], [], [])
        return cls(*zip(*rows))

    def __len__(self) -> int:
        return len(self.index)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return TrialLog(self.index[i], self.a[i], self.b[i], self.x[i], self.y[i])
        return TrialRecord(int(self.index[i]), int(self.a[i]), int(self.b[i]), int(self.x[i]), int(self.y[i]))

    def __add__(self, other: TrialLog) -> TrialLog:
        other = TrialLog.from_records(other)
        cols = ("index", "a", "b", "x", "y")
        return TrialLog(*(np.concatenate([getattr(self, c), getattr(other, c)]) for c in cols))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrialLog):
            return NotImplemented
        return all(np.array_equal(getattr(self, c), getattr(other, c)) for c in ("index", "a", "b", "x", "y"))

    def postselected(self) -> TrialLog:
        keep = (self.x != 0) & (self.y != 0)
        return TrialLog(self.index[keep], self.a[keep], self.b[keep], self.x[keep], self.y[keep])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRIAL_HEADER)
            writer.writerows(zip(self.index.tolist(), self.a.tolist(), self.b.tolist(),
                                 self.x.tolist(), self.y.tolist()))

    @classmethod
    def from_csv(cls, path: str | Path) -> TrialLog:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            if tuple(next(reader, ())) != TRIAL_HEADER:
                raise ValidationError(f"trial log must start with header {','.join(TRIAL_HEADER)}")
            return cls.from_records(TrialRecord(*map(int, row)) for row in reader if row)


def sample_trials(joint: JointDist, n: int, seed: int, start: int = 0) -> TrialLog:
    """Draw trials ``start .. start + n - 1`` of the run keyed by ``seed``."""
    if n < 1:
        raise ValidationError(f"trial count must be positive, got {n}")
    cells = joint.cells()
    masses = [joint[c] for c in cells]
    # cumulative sums are exact; only the final thresholds become floats
    cdf, acc = [], Fraction(0)
    for p in masses:
        acc += p
        cdf.append(float(acc))
    positive = [i for i, p in enumerate(masses) if p > 0]
    u = CounterRNG(seed).uniforms(start, start + n)
    pick = np.searchsorted(np.asarray(cdf), u, side="right")
    pick = np.minimum(pick, positive[-1])
    table = np.asarray(cells, dtype=np.int8)[pick]
    return TrialLog(np.arange(start, start + n), table[:, 0], table[:, 1], table[:, 2], table[:, 3])


@dataclass(frozen=True)
class EstimateReport:
    counts: Mapping[tuple[int, int], int]
    sums: Mapping[tuple[int, int], int]
    correlations: Mapping[tuple[int, int], Fraction]
    std_errors: Mapping[tuple[int, int], float]
    chsh: ChshReport | None
    n_trials: int
    seed: int | None = None
    missing: tuple[tuple[int, int], ...] = field(default=())

    @property
    def partial(self) -> bool:
        return bool(self.missing)


def estimate(trials: Iterable[TrialRecord], seed: int | None = None) -> EstimateReport:
    """Empirical correlations per setting pair, exact, with float standard errors.

    Setting pairs never observed are listed in ``missing`` and the CHSH
    values are then omitted.
    """
    log = TrialLog.from_records(trials)
    if len(log) == 0:
        raise EmptyTrials("no trials to estimate from")
    xy = log.x.astype(np.int64) * log.y.astype(np.int64)
    counts, sums, corr, se = {}, {}, {}, {}
    for a, b in SETTING_PAIRS:
        mask = (log.a == a) & (log.b == b)
        n = int(mask.sum())
        counts[a, b] = n
        sums[a, b] = int(xy[mask].sum())
        if n:
            corr[a, b] = Fraction(sums[a, b], n)
            se[a, b] = math.sqrt(max(0.0, 1.0 - float(corr[a, b]) ** 2) / n)
    missing = tuple(pair for pair in SETTING_PAIRS if counts[pair] == 0)
    report = None if missing else chsh_from_correlations(corr)
    return EstimateReport(counts, sums, corr, se, report, len(log), seed, missing)


@dataclass(frozen=True)
class ZTable:
    z: Mapping[tuple[int, int], float]
    max_abs_z: float
    degenerate: tuple[tuple[int, int], ...]

    @property
    def infinite(self) -> bool:
        return math.isinf(self.max_abs_z)


def compare(report: EstimateReport, exact: CondFamily) -> ZTable:
    """z-scores of the empirical correlations against exact ones.

    Where the standard error is zero (every observed product equal), z is 0 if
    the exact value agrees and infinite otherwise; those pairs are listed in
    ``degenerate``.
    """
    exact_corr = exact.correlations()
    if set(report.correlations) != set(exact_corr):
        raise MismatchedPairs(f"estimate covers {sorted(report.correlations)}, exact covers {sorted(exact_corr)}")
    z, degenerate = {}, []
    for pair, e_hat in report.correlations.items():
        se = report.std_errors[pair]
        if se == 0:
            degenerate.append(pair)
            z[pair] = 0.0 if e_hat == exact_corr[pair] else math.inf
        else:
            z[pair] = float(e_hat - exact_corr[pair]) / se
    return ZTable(z, max(abs(v) for v in z.values()), tuple(degenerate))
