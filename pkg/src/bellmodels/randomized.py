"""Seeded random instances with exact rational masses, for sweeps and tests."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

from .bellstats import Spreadsheet
from .lhv import LhvModel, enumerate_deterministic
from .probcore import SETTING_PAIRS, Alphabet, CondFamily, SettingsDist


def random_pmf(rng: random.Random, n: int, max_weight: int = 50, allow_zero: bool = True) -> list[Fraction]:
    lo = 0 if allow_zero else 1
    weights = [rng.randint(lo, max_weight) for _ in range(n)]
    if sum(weights) == 0:
        weights[rng.randrange(n)] = 1
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def random_cond_family(rng: random.Random, max_weight: int = 50) -> CondFamily:
    pairs = Alphabet.BINARY.pairs
    return CondFamily(
        {pair: dict(zip(pairs, random_pmf(rng, len(pairs), max_weight))) for pair in SETTING_PAIRS},
        Alphabet.BINARY,
    )


def random_settings(rng: random.Random, full_support: bool = True) -> SettingsDist:
    return SettingsDist(dict(zip(SETTING_PAIRS, random_pmf(rng, 4, allow_zero=not full_support))))


def random_lhv_model(rng: random.Random, max_lambdas: int = 8) -> LhvModel:
    """Random labels (possibly sharing a strategy) with random rational weights."""
    strategies = enumerate_deterministic()
    k = rng.randint(1, max_lambdas)
    masses = random_pmf(rng, k)
    rho = {f"lam{i}": p for i, p in enumerate(masses)}
    responses = {f"lam{i}": rng.choice(strategies) for i in range(k)}
    return LhvModel(rho, responses)


def random_mixture(rng: random.Random) -> LhvModel:
    """Rational mixture over a random non-empty subset of the 16 strategies."""
    strategies = enumerate_deterministic()
    chosen = rng.sample(strategies, rng.randint(1, len(strategies)))
    return LhvModel.mixture(dict(zip(chosen, random_pmf(rng, len(chosen), allow_zero=False))))


def random_spreadsheet(rng: random.Random, max_rows: int = 10_000) -> Spreadsheet:
    """Rows drawn from a random subset of the 16 possible rows, so extreme sheets occur."""
    n = rng.randint(1, max_rows)
    rows = np.array(list(itertools.product((-1, 1), repeat=4)))
    kinds = rows[rng.sample(range(16), rng.randint(1, 16))]
    gen = np.random.default_rng(rng.getrandbits(64))
    return Spreadsheet(kinds[gen.integers(len(kinds), size=n)])
