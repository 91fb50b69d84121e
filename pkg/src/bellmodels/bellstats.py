"""CHSH values, no-signalling deltas and counterfactual spreadsheets."""
from __future__ import annotations

import csv
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from .errors import AlphabetViolation, EmptySheet, ValidationError
from .probcore import SETTING_PAIRS, SETTINGS, Alphabet, CondFamily

if TYPE_CHECKING:
    from .lhv import Coupling

LOCAL_BOUND = 2
SHEET_HEADER = ("x1", "x2", "y1", "y2")


@dataclass(frozen=True)
class ChshReport:
    """Correlations and all four CHSH combinations.

    ``s_values[(a*, b*)]`` is the sum of the four correlations with the minus
    sign placed on the pair (a*, b*). ``certified`` is only set by
    :func:`bellmodels.lhv.verify_chsh_bound`, which also attaches the coupling
    it used as ``certificate``.
    """

    correlations: Mapping[tuple[int, int], Fraction]
    s_values: Mapping[tuple[int, int], Fraction]
    s_max: Fraction
    certified: bool = False
    certificate: object = field(default=None, compare=False)

    @property
    def violates_local_bound(self) -> bool:
        return self.s_max > LOCAL_BOUND


def chsh_from_correlations(correlations: Mapping[tuple[int, int], Fraction]) -> ChshReport:
    corr = {pair: Fraction(correlations[pair]) for pair in SETTING_PAIRS}
    total = sum(corr.values(), Fraction(0))
    s_values = {pair: total - 2 * corr[pair] for pair in SETTING_PAIRS}
    return ChshReport(corr, s_values, max(abs(s) for s in s_values.values()))


def _require_binary(cond: CondFamily) -> None:
    if cond.alphabet is not Alphabet.BINARY:
        raise AlphabetViolation("CHSH analysis needs a BINARY family; post-select ternary data first")


def chsh(cond: CondFamily) -> ChshReport:
    _require_binary(cond)
    return chsh_from_correlations(cond.correlations())


@dataclass(frozen=True)
class NoSignallingReport:
    delta_a: Mapping[tuple[int, int], Fraction]
    delta_b: Mapping[tuple[int, int], Fraction]
    max_delta: Fraction

    @property
    def signalling(self) -> bool:
        return self.max_delta > 0


def no_signalling(cond: CondFamily) -> NoSignallingReport:
    """Compare each party's outcome marginal across the other party's settings.

    ``delta_a[(a, x)] = |P(X=x | a, b=1) - P(X=x | a, b=2)|`` and symmetrically
    for ``delta_b[(b, y)]``.
    """
    _require_binary(cond)
    outcomes = cond.alphabet.outcomes

    def px(a, b, x):
        return sum(cond[a, b][x, y] for y in outcomes)

    def py(a, b, y):
        return sum(cond[a, b][x, y] for x in outcomes)

    delta_a = {(a, x): abs(px(a, 1, x) - px(a, 2, x)) for a in SETTINGS for x in outcomes}
    delta_b = {(b, y): abs(py(1, b, y) - py(2, b, y)) for b in SETTINGS for y in outcomes}
    return NoSignallingReport(delta_a, delta_b, max(*delta_a.values(), *delta_b.values()))


class Spreadsheet:
    """An N x 4 table of counterfactual outcomes, columns x1, x2, y1, y2."""

    def __init__(self, rows: Iterable[Iterable[int]] | np.ndarray):
        arr = np.asarray(rows if isinstance(rows, np.ndarray) else list(map(tuple, rows)), dtype=np.int64)
        if arr.size == 0:
            raise EmptySheet("spreadsheet needs at least one row")
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise ValidationError(f"spreadsheet rows must have 4 entries, got shape {arr.shape}")
        if not np.all(np.abs(arr) == 1):
            raise AlphabetViolation("spreadsheet entries must be +1 or -1")
        self.rows = arr
        self.rows.flags.writeable = False

    def __len__(self) -> int:
        return len(self.rows)

    @classmethod
    def from_csv(cls, path: str | Path) -> Spreadsheet:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(h.strip() for h in next(reader, ()))
            if header != SHEET_HEADER:
                raise ValidationError(f"expected header {','.join(SHEET_HEADER)}, got {','.join(header)}")
            return cls([[int(v) for v in row] for row in reader if row])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SHEET_HEADER)
            writer.writerows(self.rows.tolist())


def row_values(row) -> dict[tuple[int, int], int]:
    """Signed CHSH combination of one counterfactual quadruple, per sign pattern.

    Always +2 or -2: x1*(y1+y2) + x2*(y1-y2) has one bracket equal to 0 and the
    other equal to +-2 (up to where the minus sign sits).
    """
    x1, x2, y1, y2 = row
    xs, ys = {1: x1, 2: x2}, {1: y1, 2: y2}
    products = {(a, b): xs[a] * ys[b] for a, b in SETTING_PAIRS}
    total = sum(products.values())
    return {pair: total - 2 * products[pair] for pair in SETTING_PAIRS}


def spreadsheet_chsh(sheet: Spreadsheet) -> ChshReport:
    rows = sheet.rows
    n = len(rows)
    sums = {(a, b): int(np.dot(rows[:, a - 1], rows[:, 1 + b])) for a, b in SETTING_PAIRS}
    return chsh_from_correlations({pair: Fraction(s, n) for pair, s in sums.items()})


def chsh_of_coupling(coupling: Coupling) -> ChshReport:
    corr = {pair: Fraction(0) for pair in SETTING_PAIRS}
    for quad, p in coupling.pmf.items():
        if p:
            for a, b in SETTING_PAIRS:
                corr[a, b] += p * quad[a - 1] * quad[1 + b]
    return chsh_from_correlations(corr)
