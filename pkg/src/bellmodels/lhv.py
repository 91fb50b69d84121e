"""Local hidden-variable models and their counterfactual couplings.

A local model draws a hidden label independently of the settings; the label
fixes all four counterfactual responses (x1, x2, y1, y2). Pushing the label
law through the responses gives a single distribution over {-1,+1}^4 whose
(X_a, Y_b) margins reproduce the model's correlations. That coupling is what
forces |S| <= 2.
"""
from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .bellstats import LOCAL_BOUND, ChshReport, chsh_of_coupling
from .errors import AlphabetViolation, InternalBoundViolation, ValidationError
from .probcore import (
    SETTING_PAIRS,
    Alphabet,
    CondFamily,
    JointDist,
    SettingsDist,
    check_masses,
    to_prob,
)


class DeterministicStrategy(NamedTuple):
    x1: int
    x2: int
    y1: int
    y2: int

    def x(self, a: int) -> int:
        return self[a - 1]

    def y(self, b: int) -> int:
        return self[1 + b]


def enumerate_deterministic() -> list[DeterministicStrategy]:
    return [DeterministicStrategy(*q) for q in itertools.product((-1, 1), repeat=4)]


QUADRUPLES = tuple(enumerate_deterministic())


def _check_strategy(s) -> DeterministicStrategy:
    s = DeterministicStrategy(*s)
    if any(isinstance(v, bool) or v not in (-1, 1) for v in s):
        raise AlphabetViolation(f"strategy entries must be +-1, got {tuple(s)}")
    return s


@dataclass(frozen=True)
class LhvModel:
    rho: Mapping[str, Fraction]
    responses: Mapping[str, DeterministicStrategy]

    def __post_init__(self):
        rho = {str(k): to_prob(v) for k, v in self.rho.items()}
        responses = {str(k): _check_strategy(v) for k, v in self.responses.items()}
        missing = set(rho) - set(responses)
        if missing:
            raise ValidationError(f"hidden values without a response: {sorted(missing)}")
        extra = set(responses) - set(rho)
        if extra:
            raise ValidationError(f"responses for unknown hidden values: {sorted(extra)}")
        rho, _ = check_masses(rho, float_ingest=False)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "responses", responses)

    @classmethod
    def point(cls, strategy, label: str = "lambda") -> LhvModel:
        return cls({label: Fraction(1)}, {label: strategy})

    @classmethod
    def mixture(cls, weights: Mapping[DeterministicStrategy, Fraction]) -> LhvModel:
        """One hidden value per strategy, labelled by its signs."""
        rho, responses = {}, {}
        for s, w in weights.items():
            label = "".join("+" if v > 0 else "-" for v in s)
            rho[label] = w
            responses[label] = s
        return cls(rho, responses)


@dataclass(frozen=True)
class Coupling:
    pmf: Mapping[DeterministicStrategy, Fraction]

    def __post_init__(self):
        pmf = {q: Fraction(0) for q in QUADRUPLES}
        for k, v in self.pmf.items():
            pmf[_check_strategy(k)] += to_prob(v)
        pmf, _ = check_masses(pmf, float_ingest=False)
        object.__setattr__(self, "pmf", pmf)

    @classmethod
    def point(cls, quad) -> Coupling:
        return cls({quad: Fraction(1)})

    def family(self) -> CondFamily:
        """Law of (X_a, Y_b) under the coupling, for each setting pair."""
        q = {pair: {xy: Fraction(0) for xy in Alphabet.BINARY.pairs} for pair in SETTING_PAIRS}
        for quad, p in self.pmf.items():
            for a, b in SETTING_PAIRS:
                q[a, b][quad.x(a), quad.y(b)] += p
        return CondFamily(q, Alphabet.BINARY)


def coupling_of(model: LhvModel) -> Coupling:
    pmf: dict[DeterministicStrategy, Fraction] = {}
    for lam, p in model.rho.items():
        s = model.responses[lam]
        pmf[s] = pmf.get(s, Fraction(0)) + p
    return Coupling(pmf)


def predict(model: LhvModel, settings: SettingsDist) -> JointDist:
    pmf = {(a, b, x, y): Fraction(0) for a, b in SETTING_PAIRS for x, y in Alphabet.BINARY.pairs}
    for lam, p in model.rho.items():
        s = model.responses[lam]
        for a, b in SETTING_PAIRS:
            pmf[a, b, s.x(a), s.y(b)] += settings[a, b] * p
    return JointDist(pmf, Alphabet.BINARY)


def verify_chsh_bound(model: LhvModel) -> ChshReport:
    coupling = coupling_of(model)
    report = chsh_of_coupling(coupling)
    if report.s_max > LOCAL_BOUND:
        raise InternalBoundViolation(f"local model reached s_max={report.s_max}")
    return ChshReport(report.correlations, report.s_values, report.s_max,
                      certified=True, certificate=coupling)
