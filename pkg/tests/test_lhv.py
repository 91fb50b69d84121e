import random
from fractions import Fraction

import pytest
from conftest import lhv_models, settings_dists
from hypothesis import given
from hypothesis import strategies as st

from bellmodels.bellstats import chsh, chsh_of_coupling, no_signalling
from bellmodels.errors import (
    AlphabetViolation,
    InternalBoundViolation,
    NotNormalized,
    ValidationError,
)
from bellmodels.lhv import (
    Coupling,
    DeterministicStrategy,
    LhvModel,
    coupling_of,
    enumerate_deterministic,
    predict,
    verify_chsh_bound,
)
from bellmodels.probcore import SETTING_PAIRS, SettingsDist, factor
from bellmodels.randomized import random_mixture

ALL_PLUS = DeterministicStrategy(1, 1, 1, 1)


def test_enumeration():
    strategies = enumerate_deterministic()
    assert len(strategies) == 16
    assert len(set(strategies)) == 16
    assert ALL_PLUS in strategies


def test_enumeration_max_is_two():
    assert max(chsh_of_coupling(Coupling.point(s)).s_max for s in enumerate_deterministic()) == 2


def test_every_deterministic_strategy_saturates_one_pattern():
    for s in enumerate_deterministic():
        values = chsh_of_coupling(Coupling.point(s)).s_values.values()
        assert set(values) <= {-2, 2}


def test_strategy_accessors():
    s = DeterministicStrategy(1, -1, -1, 1)
    assert (s.x(1), s.x(2), s.y(1), s.y(2)) == (1, -1, -1, 1)


def test_coupling_of_single_point():
    s = DeterministicStrategy(1, -1, 1, -1)
    assert coupling_of(LhvModel.point(s)) == Coupling.point(s)


def test_coupling_of_merges_identical_strategies():
    half = Fraction(1, 2)
    model = LhvModel({"u": half, "v": half}, {"u": ALL_PLUS, "v": ALL_PLUS})
    assert coupling_of(model) == Coupling.point(ALL_PLUS)


def test_coupling_of_four_lambdas():
    quads = [DeterministicStrategy(x1, x2, 1, 1) for x1 in (-1, 1) for x2 in (-1, 1)]
    model = LhvModel({f"l{i}": Fraction(1, 4) for i in range(4)}, {f"l{i}": q for i, q in enumerate(quads)})
    pmf = coupling_of(model).pmf
    assert {q: p for q, p in pmf.items() if p} == {q: Fraction(1, 4) for q in quads}


def test_predict_all_plus():
    joint = predict(LhvModel.point(ALL_PLUS), SettingsDist.uniform())
    for a, b in SETTING_PAIRS:
        assert joint[a, b, 1, 1] == Fraction(1, 4)


def test_predict_point_settings():
    rng = random.Random(11)
    model = random_mixture(rng)
    joint = predict(model, SettingsDist.point(1, 1))
    assert all(p == 0 for (a, b, _, _), p in joint.pmf.items() if (a, b) != (1, 1))
    law = {}
    for lam, p in model.rho.items():
        s = model.responses[lam]
        law[s.x1, s.y1] = law.get((s.x1, s.y1), 0) + p
    assert {(x, y): joint[1, 1, x, y] for x, y in law} == law


def test_predict_four_lambda_model_obeys_bound():
    quads = [DeterministicStrategy(x1, x2, 1, 1) for x1 in (-1, 1) for x2 in (-1, 1)]
    model = LhvModel({f"l{i}": Fraction(1, 4) for i in range(4)}, {f"l{i}": q for i, q in enumerate(quads)})
    _, cond = factor(predict(model, SettingsDist.uniform()))
    assert chsh(cond).s_max <= 2


def test_verify_point_models():
    for s in enumerate_deterministic():
        report = verify_chsh_bound(LhvModel.point(s))
        assert report.certified
        assert report.s_max <= 2
        assert report.certificate == Coupling.point(s)


def test_verify_uniform_mixture():
    model = LhvModel.mixture({s: Fraction(1, 16) for s in enumerate_deterministic()})
    report = verify_chsh_bound(model)
    assert report.certified
    assert all(e == 0 for e in report.correlations.values())


def test_verify_random_mixtures():
    rng = random.Random(2024)
    for _ in range(100):
        assert verify_chsh_bound(random_mixture(rng)).certified


def test_bound_violation_is_raised(monkeypatch, pr_box):
    from bellmodels import lhv

    monkeypatch.setattr(lhv, "chsh_of_coupling", lambda c: chsh(pr_box))
    with pytest.raises(InternalBoundViolation):
        lhv.verify_chsh_bound(LhvModel.point(ALL_PLUS))


def test_model_validation():
    with pytest.raises(ValidationError):
        LhvModel({"a": 1}, {})
    with pytest.raises(ValidationError):
        LhvModel({"a": 1}, {"a": ALL_PLUS, "b": ALL_PLUS})
    with pytest.raises(NotNormalized):
        LhvModel({"a": Fraction(1, 2)}, {"a": ALL_PLUS})
    with pytest.raises(AlphabetViolation):
        LhvModel({"a": 1}, {"a": (1, 0, 1, 1)})


@given(lhv_models(), settings_dists())
def test_coupling_identity(model, settings):
    _, cond = factor(predict(model, settings))
    assert cond == coupling_of(model).family()
    assert chsh(cond).correlations == chsh_of_coupling(coupling_of(model)).correlations


@given(lhv_models(), settings_dists(full_support=False))
def test_predictions_never_signal(model, settings):
    _, cond = factor(predict(model, settings), fallback_uniform=True)
    if settings.full_support:
        assert no_signalling(cond).max_delta == 0
    assert no_signalling(coupling_of(model).family()).max_delta == 0


@given(lhv_models(), lhv_models(), st.fractions(min_value=0, max_value=1))
def test_coupling_is_affine(m1, m2, alpha):
    rho = {f"a:{k}": alpha * p for k, p in m1.rho.items()}
    rho.update({f"b:{k}": (1 - alpha) * p for k, p in m2.rho.items()})
    responses = {f"a:{k}": s for k, s in m1.responses.items()}
    responses.update({f"b:{k}": s for k, s in m2.responses.items()})
    mixed = coupling_of(LhvModel(rho, responses))
    c1, c2 = coupling_of(m1), coupling_of(m2)
    assert mixed.pmf == {q: alpha * c1.pmf[q] + (1 - alpha) * c2.pmf[q] for q in c1.pmf}


@given(lhv_models())
def test_local_models_never_exceed_two(model):
    assert verify_chsh_bound(model).s_max <= 2
