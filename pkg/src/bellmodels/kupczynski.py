"""Contextual hidden-variable models with setting-dependent instrument variables.

Two model families live here:

``Model3Spec``
    Source variables (l1, l2) with an arbitrary joint law, plus instrument
    variables (la, lb) whose joint law ``p_ab`` may depend on the setting
    pair and need not factor. Outcomes are +-1.

``Model1Spec``
    Same source, but instrument variables are drawn independently per party
    (the joint law is ``p_a * p_b``) and outcomes may be 0 (no detection).
    Correlations are taken after post-selecting on XY != 0.

Every instrument hidden value is tagged with the party and setting it belongs
to, so the four instrument spaces are disjoint by construction.

:func:`universal_construct` builds a ``Model3Spec`` reproducing any target
family of four outcome laws, signalling or not.
"""
from __future__ import annotations

import itertools
from collections.abc import Hashable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import (
    AlphabetViolation,
    NotCertifiable,
    ResponseUndefined,
    ValidationError,
    ZeroDetection,
)
from .lhv import DeterministicStrategy, LhvModel
from .probcore import (
    SETTING_PAIRS,
    SETTINGS,
    Alphabet,
    CondFamily,
    JointDist,
    SettingsDist,
    check_masses,
    factor,
    to_prob,
    total_variation,
)

ALICE = "Alice"
BOB = "Bob"
PARTIES = (ALICE, BOB)
TRIVIAL_TOKEN = "*"
TRIVIAL_SOURCE = {(TRIVIAL_TOKEN, TRIVIAL_TOKEN): Fraction(1)}


class LabelledHiddenValue(NamedTuple):
    value: Hashable
    party: str
    setting: int


SPACE_KEYS = tuple(itertools.product(PARTIES, SETTINGS))


def _check_source(source: Mapping) -> dict:
    masses = {tuple(k): to_prob(v) for k, v in source.items()}
    if any(len(k) != 2 for k in masses):
        raise ValidationError("source points must be pairs (l1, l2)")
    masses, _ = check_masses(masses, float_ingest=False, where="source")
    return masses


def _check_space(key, values) -> tuple[LabelledHiddenValue, ...]:
    party, setting = key
    out = []
    for v in values:
        v = LabelledHiddenValue(*v)
        if (v.party, v.setting) != (party, setting):
            raise ValidationError(f"hidden value {v} filed under space {key}; tags must match")
        out.append(v)
    if len(set(out)) != len(out):
        raise ValidationError(f"duplicate hidden values in space {key}")
    if not out:
        raise ValidationError(f"instrument space {key} is empty")
    return tuple(out)


def _check_responses(table: Mapping, alphabet: Alphabet, party: str) -> dict:
    out = {}
    for (src, lam), r in table.items():
        lam = LabelledHiddenValue(*lam)
        if lam.party != party:
            raise ValidationError(f"{party} response keyed by {lam.party} hidden value {lam}")
        if isinstance(r, bool) or r not in alphabet.outcomes:
            raise AlphabetViolation(f"response {r!r} at {(src, lam)} outside {alphabet.outcomes}")
        out[src, lam] = int(r)
    return out


def _lookup(table: Mapping, key, what: str) -> int:
    try:
        return table[key]
    except KeyError:
        raise ResponseUndefined(f"{what} response undefined at {key!r}") from None


@dataclass(frozen=True)
class Model3Spec:
    """Setting-dependent instrument model with +-1 outcomes.

    ``p_ab[(a, b)]`` is stored densely over the full product of Alice's
    setting-a space and Bob's setting-b space. ``x_response`` maps
    ``(l1, la)`` to Alice's outcome and ``y_response`` maps ``(l2, lb)`` to
    Bob's.
    """

    source: Mapping[tuple, Fraction]
    instrument_spaces: Mapping[tuple[str, int], tuple[LabelledHiddenValue, ...]]
    p_ab: Mapping[tuple[int, int], Mapping[tuple[LabelledHiddenValue, LabelledHiddenValue], Fraction]]
    x_response: Mapping[tuple, int]
    y_response: Mapping[tuple, int]

    def __post_init__(self):
        source = _check_source(self.source)
        if set(self.instrument_spaces) != set(SPACE_KEYS):
            raise ValidationError(f"instrument spaces must be exactly {SPACE_KEYS}")
        spaces = {key: _check_space(key, self.instrument_spaces[key]) for key in SPACE_KEYS}
        if set(self.p_ab) != set(SETTING_PAIRS):
            raise ValidationError("p_ab must have one law per setting pair")
        p_ab = {}
        for a, b in SETTING_PAIRS:
            la_space, lb_space = spaces[ALICE, a], spaces[BOB, b]
            dense = {(la, lb): Fraction(0) for la in la_space for lb in lb_space}
            for (la, lb), v in self.p_ab[a, b].items():
                key = (LabelledHiddenValue(*la), LabelledHiddenValue(*lb))
                if key not in dense:
                    raise ValidationError(f"p_ab{(a, b)} puts mass outside Lambda_a x Lambda_b at {key}")
                dense[key] += to_prob(v)
            p_ab[a, b], _ = check_masses(dense, float_ingest=False, where=(a, b))
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "instrument_spaces", spaces)
        object.__setattr__(self, "p_ab", p_ab)
        object.__setattr__(self, "x_response", _check_responses(self.x_response, Alphabet.BINARY, ALICE))
        object.__setattr__(self, "y_response", _check_responses(self.y_response, Alphabet.BINARY, BOB))


def evaluate_model3(spec: Model3Spec) -> CondFamily:
    """Law of (X_ab, Y_ab) for each setting pair.

    Sums p(l1, l2) * p_ab(la, lb) over the full product of the source support
    and the instrument support; a missing response on a positive-mass point
    raises :class:`ResponseUndefined`.
    """
    q = {}
    for a, b in SETTING_PAIRS:
        law = {xy: Fraction(0) for xy in Alphabet.BINARY.pairs}
        for (l1, l2), ps in spec.source.items():
            if not ps:
                continue
            for (la, lb), pi in spec.p_ab[a, b].items():
                if not pi:
                    continue
                x = _lookup(spec.x_response, (l1, la), "X")
                y = _lookup(spec.y_response, (l2, lb), "Y")
                law[x, y] += ps * pi
        q[a, b] = law
    return CondFamily(q, Alphabet.BINARY)


def model3_correlation(spec: Model3Spec, a: int, b: int) -> Fraction:
    """The four-fold sum sum X_a(l1, la) Y_b(l2, lb) p(l1, l2) p_ab(la, lb), term by term."""
    total = Fraction(0)
    for ((l1, l2), ps), ((la, lb), pi) in itertools.product(spec.source.items(), spec.p_ab[a, b].items()):
        if ps and pi:
            total += spec.x_response[l1, la] * spec.y_response[l2, lb] * ps * pi
    return total


def universal_construct(target: CondFamily) -> Model3Spec:
    """Build a model reproducing ``target`` exactly.

    Alice's setting-a space is {-1, +1} tagged ("Alice", a), Bob's likewise.
    ``p_ab`` places q_ab(x, y) on the pair of hidden values carrying x and y,
    and each response simply reads back the value it is handed. The source is
    the one-point space.
    """
    if target.alphabet is not Alphabet.BINARY:
        raise AlphabetViolation("universal construction takes a BINARY target family")
    spaces = {(party, s): tuple(LabelledHiddenValue(v, party, s) for v in (-1, 1)) for party, s in SPACE_KEYS}
    p_ab = {
        (a, b): {
            (LabelledHiddenValue(x, ALICE, a), LabelledHiddenValue(y, BOB, b)): target[a, b][x, y]
            for x, y in Alphabet.BINARY.pairs
        }
        for a, b in SETTING_PAIRS
    }
    x_response = {(TRIVIAL_TOKEN, lam): lam.value for s in SETTINGS for lam in spaces[ALICE, s]}
    y_response = {(TRIVIAL_TOKEN, lam): lam.value for s in SETTINGS for lam in spaces[BOB, s]}
    return Model3Spec(dict(TRIVIAL_SOURCE), spaces, p_ab, x_response, y_response)


def spaces_disjoint(spaces: Mapping[tuple[str, int], tuple[LabelledHiddenValue, ...]]) -> bool:
    seen: set = set()
    for values in spaces.values():
        if seen & set(values):
            return False
        seen |= set(values)
    return True


def embedding_violations(spec: Model3Spec) -> list[tuple]:
    """Positive-mass points of p_ab whose tags disagree with (a, b)."""
    bad = []
    for (a, b), law in spec.p_ab.items():
        for (la, lb), p in law.items():
            if p and ((la.party, la.setting) != (ALICE, a) or (lb.party, lb.setting) != (BOB, b)):
                bad.append(((a, b), la, lb))
    return bad


@dataclass(frozen=True)
class Model1Spec:
    """Factored-instrument detection model with outcomes in {-1, 0, +1}.

    ``p_instrument[(party, s)]`` is the law of that party's instrument value
    under setting s; the joint instrument law for (a, b) is the product of
    Alice's setting-a law and Bob's setting-b law.
    """

    source: Mapping[tuple, Fraction]
    p_instrument: Mapping[tuple[str, int], Mapping[LabelledHiddenValue, Fraction]]
    x_response: Mapping[tuple, int]
    y_response: Mapping[tuple, int]
    settings: SettingsDist | None = field(default=None, compare=False)

    def __post_init__(self):
        if set(self.p_instrument) != set(SPACE_KEYS):
            raise ValidationError(f"instrument laws must be given for exactly {SPACE_KEYS}")
        p_inst = {}
        for key in SPACE_KEYS:
            space = _check_space(key, self.p_instrument[key])
            law = {LabelledHiddenValue(*k): to_prob(v) for k, v in self.p_instrument[key].items()}
            p_inst[key], _ = check_masses({lam: law[lam] for lam in space}, float_ingest=False, where=key)
        object.__setattr__(self, "source", _check_source(self.source))
        object.__setattr__(self, "p_instrument", p_inst)
        object.__setattr__(self, "x_response", _check_responses(self.x_response, Alphabet.TERNARY, ALICE))
        object.__setattr__(self, "y_response", _check_responses(self.y_response, Alphabet.TERNARY, BOB))

    @property
    def instrument_spaces(self) -> dict[tuple[str, int], tuple[LabelledHiddenValue, ...]]:
        return {key: tuple(law) for key, law in self.p_instrument.items()}


def _model1_terms(spec: Model1Spec, a: int, b: int):
    """Yield (source point, p_source * p_a * p_b, x, y) over positive-mass points."""
    for (l1, l2), ps in spec.source.items():
        if not ps:
            continue
        for la, pa in spec.p_instrument[ALICE, a].items():
            if not pa:
                continue
            x = _lookup(spec.x_response, (l1, la), "X")
            for lb, pb in spec.p_instrument[BOB, b].items():
                if not pb:
                    continue
                y = _lookup(spec.y_response, (l2, lb), "Y")
                yield (l1, l2), ps * pa * pb, x, y


def evaluate_model1(spec: Model1Spec, settings: SettingsDist) -> JointDist:
    pmf = {(a, b, x, y): Fraction(0) for a, b in SETTING_PAIRS for x, y in Alphabet.TERNARY.pairs}
    for a, b in SETTING_PAIRS:
        ps_ab = settings[a, b]
        if not ps_ab:
            continue
        for _, p, x, y in _model1_terms(spec, a, b):
            pmf[a, b, x, y] += ps_ab * p
    return JointDist(pmf, Alphabet.TERNARY)


@dataclass(frozen=True)
class PostSelectionReport:
    conditional_family: CondFamily
    postselected_settings: SettingsDist
    detection_rate: Fraction
    settings_dependence_delta: Fraction
    settings_outcome_dependence: Fraction
    postselected_joint: JointDist


def postselect(joint: JointDist, fallback_uniform: bool = False) -> PostSelectionReport:
    """Condition a joint law on both outcomes being non-zero.

    ``settings_dependence_delta`` is the total-variation distance between the
    post-selected settings law and the product of its marginals.
    ``settings_outcome_dependence`` is the same distance between the
    post-selected law of (A, B, X, Y) and (settings law) x (outcome law).
    """
    detected = {k: p for k, p in joint.pmf.items() if k[2] != 0 and k[3] != 0}
    rate = sum(detected.values(), Fraction(0))
    if rate == 0:
        raise ZeroDetection("no trial has both outcomes non-zero")
    post = JointDist({k: p / rate for k, p in detected.items()}, Alphabet.BINARY)
    settings, cond = factor(post, fallback_uniform=fallback_uniform)
    ma, mb = settings.marginal_a(), settings.marginal_b()
    product = {(a, b): ma[a] * mb[b] for a, b in SETTING_PAIRS}
    outcomes = post.outcome_marginal()
    independent = {(a, b, x, y): settings[a, b] * outcomes[x, y] for a, b, x, y in post.pmf}
    return PostSelectionReport(
        conditional_family=cond,
        postselected_settings=settings,
        detection_rate=rate,
        settings_dependence_delta=total_variation(settings.pmf, product),
        settings_outcome_dependence=total_variation(post.pmf, independent),
        postselected_joint=post,
    )


def loophole_demo() -> Model1Spec:
    """Synthetic detection-loophole model that reaches CHSH value 4 after post-selection.

    The source emits (a*, b*, s) uniformly over {1,2} x {1,2} x {-1,+1} to
    both wings. Alice outputs s when her setting equals a* and 0 otherwise;
    Bob outputs s * t(a*, b*) when his setting equals b* and 0 otherwise,
    with t = -1 on (2, 2) and +1 elsewhere. This is a made-up discrete
    instance of the mechanism, not any published model.
    """
    points = [(a, b, s) for a, b in SETTING_PAIRS for s in (-1, 1)]
    source = {(lam, lam): Fraction(1, len(points)) for lam in points}
    idle = {key: LabelledHiddenValue(0, *key) for key in SPACE_KEYS}
    p_inst = {key: {idle[key]: Fraction(1)} for key in SPACE_KEYS}
    x_response, y_response = {}, {}
    for lam in points:
        a_star, b_star, s = lam
        t = -1 if (a_star, b_star) == (2, 2) else 1
        for setting in SETTINGS:
            x_response[lam, idle[ALICE, setting]] = s if setting == a_star else 0
            y_response[lam, idle[BOB, setting]] = s * t if setting == b_star else 0
    return Model1Spec(source, p_inst, x_response, y_response)


@dataclass(frozen=True)
class DetectionPosterior:
    prior: Mapping[tuple, Fraction]
    posterior: Mapping[tuple, Fraction]
    detection_rate: Fraction

    @property
    def total_variation(self) -> Fraction:
        return total_variation(self.prior, self.posterior)


def posterior_given_detection(spec: Model1Spec, settings: SettingsDist) -> DetectionPosterior:
    """Law of the source point (l1, l2) before and after conditioning on XY != 0."""
    joint = {src: Fraction(0) for src in spec.source}
    for a, b in SETTING_PAIRS:
        ps_ab = settings[a, b]
        if not ps_ab:
            continue
        for src, p, x, y in _model1_terms(spec, a, b):
            if x != 0 and y != 0:
                joint[src] += ps_ab * p
    rate = sum(joint.values(), Fraction(0))
    if rate == 0:
        raise ZeroDetection("no trial has both outcomes non-zero")
    return DetectionPosterior(dict(spec.source), {src: p / rate for src, p in joint.items()}, rate)


def as_lhv_model(spec: Model1Spec, drop_zero: bool = False) -> LhvModel:
    """Rewrite a model (1) instance as a local model over binary outcomes.

    Each hidden label is a source point together with one instrument value per
    (party, setting), drawn independently. Labels under which any of the four
    responses is 0 cannot be expressed; with ``drop_zero`` they are removed and
    the rest renormalized, otherwise (or if nothing survives) this raises
    :class:`NotCertifiable`.
    """
    rho, responses = {}, {}
    spaces = [list(spec.p_instrument[key].items()) for key in SPACE_KEYS]
    for (l1, l2), ps in spec.source.items():
        for combo in itertools.product(*spaces):
            p = ps
            for _, pi in combo:
                p *= pi
            if not p:
                continue
            (la1, _), (la2, _), (lb1, _), (lb2, _) = combo
            strategy = (
                _lookup(spec.x_response, (l1, la1), "X"),
                _lookup(spec.x_response, (l1, la2), "X"),
                _lookup(spec.y_response, (l2, lb1), "Y"),
                _lookup(spec.y_response, (l2, lb2), "Y"),
            )
            if 0 in strategy:
                if drop_zero:
                    continue
                raise NotCertifiable(f"hidden point {(l1, l2)} yields non-detection in strategy {strategy}")
            label = repr(((l1, l2), la1.value, la2.value, lb1.value, lb2.value))
            rho[label] = rho.get(label, Fraction(0)) + p
            responses[label] = DeterministicStrategy(*strategy)
    total = sum(rho.values(), Fraction(0))
    if total == 0:
        raise NotCertifiable("every hidden point yields a non-detection for some setting")
    return LhvModel({k: v / total for k, v in rho.items()}, responses)
