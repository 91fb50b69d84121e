from fractions import Fraction

import pytest
from hypothesis import strategies as st

from bellmodels.lhv import LhvModel, enumerate_deterministic
from bellmodels.probcore import SETTING_PAIRS, Alphabet, CondFamily, SettingsDist

BINARY_PAIRS = Alphabet.BINARY.pairs


def family_from_correlations(corr):
    """q_ab(x, y) = (1 + x*y*E_ab) / 4: uniform marginals, prescribed correlation."""
    return CondFamily(
        {pair: {(x, y): (1 + x * y * Fraction(corr[pair])) / 4 for x, y in BINARY_PAIRS} for pair in SETTING_PAIRS}
    )


def point_law(x, y):
    return {xy: Fraction(int(xy == (x, y))) for xy in BINARY_PAIRS}


@pytest.fixture
def pr_box():
    half = Fraction(1, 2)
    same = {(1, 1): half, (-1, -1): half, (1, -1): Fraction(0), (-1, 1): Fraction(0)}
    diff = {(1, 1): Fraction(0), (-1, -1): Fraction(0), (1, -1): half, (-1, 1): half}
    return CondFamily({(1, 1): same, (1, 2): same, (2, 1): same, (2, 2): diff})


@pytest.fixture
def signalling_family():
    quarter = Fraction(1, 4)
    uniform = {xy: quarter for xy in BINARY_PAIRS}
    return CondFamily({(1, 1): point_law(1, 1), (1, 2): point_law(-1, 1), (2, 1): uniform, (2, 2): dict(uniform)})


@st.composite
def rational_pmfs(draw, n, allow_zero=True, max_weight=30):
    lo = 0 if allow_zero else 1
    weights = draw(st.lists(st.integers(lo, max_weight), min_size=n, max_size=n).filter(lambda w: sum(w) > 0))
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


@st.composite
def cond_families(draw):
    return CondFamily({pair: dict(zip(BINARY_PAIRS, draw(rational_pmfs(4)))) for pair in SETTING_PAIRS})


@st.composite
def settings_dists(draw, full_support=True):
    return SettingsDist(dict(zip(SETTING_PAIRS, draw(rational_pmfs(4, allow_zero=not full_support)))))


@st.composite
def lhv_models(draw, max_lambdas=6):
    strategies = enumerate_deterministic()
    k = draw(st.integers(1, max_lambdas))
    masses = draw(rational_pmfs(k))
    responses = draw(st.lists(st.sampled_from(strategies), min_size=k, max_size=k))
    return LhvModel({f"l{i}": p for i, p in enumerate(masses)}, {f"l{i}": s for i, s in enumerate(responses)})


@st.composite
def product_families(draw):
    """q_ab(x, y) = f_a(x) g_b(y)."""
    f = {a: dict(zip((-1, 1), draw(rational_pmfs(2)))) for a in (1, 2)}
    g = {b: dict(zip((-1, 1), draw(rational_pmfs(2)))) for b in (1, 2)}
    return CondFamily({(a, b): {(x, y): f[a][x] * g[b][y] for x, y in BINARY_PAIRS} for a, b in SETTING_PAIRS})


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
