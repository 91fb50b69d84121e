"""Exact finite distributions for Bell experiments.

All masses are :class:`fractions.Fraction`; nothing here ever touches a float
except :func:`to_prob` when float ingestion is explicitly requested.

Three validated containers cover the observable side of an experiment:

* :class:`JointDist` -- law of (A, B, X, Y)
* :class:`SettingsDist` -- law of (A, B)
* :class:`CondFamily` -- the four laws of (X, Y) given A=a, B=b
"""
from __future__ import annotations

import enum
import itertools
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    AlphabetViolation,
    InvalidSetting,
    NegativeMass,
    NotNormalized,
    ValidationError,
    ZeroSettingMass,
)

SETTINGS = (1, 2)
SETTING_PAIRS = tuple(itertools.product(SETTINGS, SETTINGS))
FLOAT_SLACK = Fraction(1, 10**9)
_RATIONAL = re.compile(r"(?P<num>-?\d+)(?:/(?P<den>\d+))?")


class Alphabet(enum.Enum):
    BINARY = (-1, 1)
    TERNARY = (-1, 0, 1)

    @property
    def outcomes(self) -> tuple[int, ...]:
        return self.value

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(itertools.product(self.value, self.value))

    @classmethod
    def parse(cls, name: str | Alphabet) -> Alphabet:
        if isinstance(name, Alphabet):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise AlphabetViolation(f"unknown alphabet {name!r}") from None


def to_prob(value, float_ingest: bool = False) -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Strings are read as ``"num/den"`` (or a bare integer). Floats are only
    accepted with ``float_ingest`` and are converted verbatim, i.e. to their
    exact binary value.
    """
    if isinstance(value, bool):
        raise ValidationError(f"boolean is not a probability: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not float_ingest:
            raise ValidationError(f"float {value!r} given without float ingestion")
        return Fraction(value)
    if isinstance(value, str):
        return parse_fraction(value)
    raise ValidationError(f"cannot interpret {value!r} as a probability")


def parse_fraction(text: str) -> Fraction:
    m = _RATIONAL.fullmatch(text.strip())
    if m is None:
        raise ValidationError(f"malformed rational {text!r}; expected 'num/den'")
    num, den = int(m["num"]), int(m["den"] or 1)
    if den == 0:
        raise ValidationError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_fraction(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def _check_setting(s) -> int:
    if isinstance(s, bool) or s not in SETTINGS:
        raise InvalidSetting(f"setting must be 1 or 2, got {s!r}")
    return int(s)


def _check_outcome(x, alphabet: Alphabet) -> int:
    if isinstance(x, bool) or x not in alphabet.outcomes:
        raise AlphabetViolation(f"outcome {x!r} not in {alphabet.name} alphabet {alphabet.outcomes}")
    return int(x)


def _infer_alphabet(outcomes: Iterable[int]) -> Alphabet:
    return Alphabet.TERNARY if any(o == 0 for o in outcomes) else Alphabet.BINARY


def check_masses(masses: dict, float_ingest: bool, where=None) -> tuple[dict, Fraction | None]:
    """Check non-negativity and unit total.

    Returns the (possibly renormalized) masses and the original total if a
    renormalization happened.
    """
    for k, v in masses.items():
        if v < 0:
            raise NegativeMass(k, v)
    total = sum(masses.values(), Fraction(0))
    if total == 1:
        return masses, None
    if float_ingest and abs(total - 1) <= FLOAT_SLACK and total > 0:
        return {k: v / total for k, v in masses.items()}, total
    raise NotNormalized(total, where)


@dataclass(frozen=True)
class SettingsDist:
    pmf: Mapping[tuple[int, int], Fraction]
    provenance: Mapping = field(default_factory=dict, compare=False)

    def __getitem__(self, pair) -> Fraction:
        return self.pmf[pair]

    def marginal_a(self) -> dict[int, Fraction]:
        return {a: sum(self.pmf[a, b] for b in SETTINGS) for a in SETTINGS}

    def marginal_b(self) -> dict[int, Fraction]:
        return {b: sum(self.pmf[a, b] for a in SETTINGS) for b in SETTINGS}

    @property
    def full_support(self) -> bool:
        return all(p > 0 for p in self.pmf.values())

    @classmethod
    def uniform(cls) -> SettingsDist:
        return cls({pair: Fraction(1, 4) for pair in SETTING_PAIRS})

    @classmethod
    def point(cls, a: int, b: int) -> SettingsDist:
        return cls({pair: Fraction(int(pair == (a, b))) for pair in SETTING_PAIRS})

    @classmethod
    def product(cls, pa: Mapping[int, Fraction], pb: Mapping[int, Fraction]) -> SettingsDist:
        return validate_settings({(a, b): to_prob(pa[a]) * to_prob(pb[b]) for a, b in SETTING_PAIRS})


@dataclass(frozen=True)
class CondFamily:
    q: Mapping[tuple[int, int], Mapping[tuple[int, int], Fraction]]
    alphabet: Alphabet = Alphabet.BINARY
    provenance: Mapping = field(default_factory=dict, compare=False)

    def __getitem__(self, pair) -> Mapping[tuple[int, int], Fraction]:
        return self.q[pair]

    def correlations(self) -> dict[tuple[int, int], Fraction]:
        return {pair: expectation_xy(self.q[pair]) for pair in SETTING_PAIRS}

    def relabel(self) -> CondFamily:
        """Flip the sign of every outcome on both sides."""
        return CondFamily(
            {pair: {(-x, -y): p for (x, y), p in inner.items()} for pair, inner in self.q.items()},
            self.alphabet,
        )

    @classmethod
    def uniform(cls, alphabet: Alphabet = Alphabet.BINARY) -> CondFamily:
        n = len(alphabet.pairs)
        return cls({pair: {xy: Fraction(1, n) for xy in alphabet.pairs} for pair in SETTING_PAIRS}, alphabet)


@dataclass(frozen=True)
class JointDist:
    pmf: Mapping[tuple[int, int, int, int], Fraction]
    alphabet: Alphabet = Alphabet.BINARY
    provenance: Mapping = field(default_factory=dict, compare=False)

    def __getitem__(self, key) -> Fraction:
        return self.pmf[key]

    def cells(self) -> list[tuple[int, int, int, int]]:
        """All cells in canonical order: lexicographic in (a, b, x, y), outcomes ascending."""
        return [(a, b, x, y) for a, b in SETTING_PAIRS for x, y in self.alphabet.pairs]

    def settings_marginal(self) -> SettingsDist:
        pmf = {pair: Fraction(0) for pair in SETTING_PAIRS}
        for (a, b, _, _), p in self.pmf.items():
            pmf[a, b] += p
        return SettingsDist(pmf)

    def outcome_marginal(self) -> dict[tuple[int, int], Fraction]:
        pmf = {xy: Fraction(0) for xy in self.alphabet.pairs}
        for (_, _, x, y), p in self.pmf.items():
            pmf[x, y] += p
        return pmf

    @classmethod
    def uniform(cls, alphabet: Alphabet = Alphabet.BINARY) -> JointDist:
        return compose(SettingsDist.uniform(), CondFamily.uniform(alphabet))


def validate_settings(raw: Mapping, float_ingest: bool = False) -> SettingsDist:
    masses = {pair: Fraction(0) for pair in SETTING_PAIRS}
    for key, v in raw.items():
        a, b = key
        masses[_check_setting(a), _check_setting(b)] += to_prob(v, float_ingest)
    masses, original = check_masses(masses, float_ingest)
    return SettingsDist(masses, _provenance(original))


def validate_cond(raw: Mapping, alphabet: Alphabet | str | None = None,
                  float_ingest: bool = False) -> CondFamily:
    if alphabet is None:
        alphabet = _infer_alphabet(o for inner in raw.values() for xy in inner for o in xy)
    alphabet = Alphabet.parse(alphabet)
    seen = set()
    q = {}
    renorm = {}
    for key, inner in raw.items():
        pair = (_check_setting(key[0]), _check_setting(key[1]))
        if pair in seen:
            raise ValidationError(f"duplicate setting pair {pair}")
        seen.add(pair)
        masses = {xy: Fraction(0) for xy in alphabet.pairs}
        for (x, y), v in inner.items():
            masses[_check_outcome(x, alphabet), _check_outcome(y, alphabet)] += to_prob(v, float_ingest)
        masses, original = check_masses(masses, float_ingest, where=pair)
        if original is not None:
            renorm[pair] = original
        q[pair] = masses
    missing = set(SETTING_PAIRS) - seen
    if missing:
        raise ValidationError(f"conditional family lacks setting pairs {sorted(missing)}")
    provenance = {"renormalized": True, "original_totals": renorm} if renorm else {}
    return CondFamily({pair: q[pair] for pair in SETTING_PAIRS}, alphabet, provenance)


def validate_joint(raw: Mapping, alphabet: Alphabet | str | None = None,
                   float_ingest: bool = False) -> JointDist:
    if alphabet is None:
        alphabet = _infer_alphabet(o for key in raw for o in key[2:])
    alphabet = Alphabet.parse(alphabet)
    masses = {(a, b, x, y): Fraction(0) for a, b in SETTING_PAIRS for x, y in alphabet.pairs}
    for key, v in raw.items():
        if len(key) != 4:
            raise ValidationError(f"joint key must be (a, b, x, y), got {key!r}")
        a, b, x, y = key
        cell = (_check_setting(a), _check_setting(b), _check_outcome(x, alphabet), _check_outcome(y, alphabet))
        masses[cell] += to_prob(v, float_ingest)
    masses, original = check_masses(masses, float_ingest)
    return JointDist(masses, alphabet, _provenance(original))


def validate(raw: Mapping, alphabet: Alphabet | str | None = None, float_ingest: bool = False):
    """Validate a raw table, dispatching on its key shape.

    4-tuple keys give a :class:`JointDist`; 2-tuple keys mapping to nested
    tables give a :class:`CondFamily`; 2-tuple keys mapping to scalars give a
    :class:`SettingsDist`.
    """
    if not raw:
        raise ValidationError("empty table")
    key, value = next(iter(raw.items()))
    if isinstance(key, tuple) and len(key) == 4:
        return validate_joint(raw, alphabet, float_ingest)
    if isinstance(key, tuple) and len(key) == 2:
        if isinstance(value, Mapping):
            return validate_cond(raw, alphabet, float_ingest)
        return validate_settings(raw, float_ingest)
    raise ValidationError(f"cannot infer distribution kind from key {key!r}")


def _provenance(original_total: Fraction | None) -> dict:
    if original_total is None:
        return {}
    return {"renormalized": True, "original_total": original_total}


def compose(settings: SettingsDist, cond: CondFamily) -> JointDist:
    pmf = {
        (a, b, x, y): settings[a, b] * cond[a, b][x, y]
        for a, b in SETTING_PAIRS
        for x, y in cond.alphabet.pairs
    }
    return JointDist(pmf, cond.alphabet)


def factor(joint: JointDist, fallback_uniform: bool = False) -> tuple[SettingsDist, CondFamily]:
    """Split a joint law into the settings law and the conditional outcome laws.

    A setting pair with zero mass raises :class:`ZeroSettingMass` unless
    ``fallback_uniform`` is set, in which case its conditional is uniform and
    the pair is listed under ``provenance["fallback_pairs"]``.
    """
    settings = joint.settings_marginal()
    q = {}
    fallback = []
    for pair in SETTING_PAIRS:
        mass = settings[pair]
        if mass == 0:
            if not fallback_uniform:
                raise ZeroSettingMass(pair)
            fallback.append(pair)
            n = len(joint.alphabet.pairs)
            q[pair] = {xy: Fraction(1, n) for xy in joint.alphabet.pairs}
            continue
        q[pair] = {(x, y): joint[(*pair, x, y)] / mass for x, y in joint.alphabet.pairs}
    provenance = {"fallback_pairs": fallback} if fallback else {}
    return settings, CondFamily(q, joint.alphabet, provenance)


def expectation_xy(pmf: Mapping[tuple[int, int], Fraction]) -> Fraction:
    return sum((x * y * p for (x, y), p in pmf.items()), Fraction(0))


def total_variation(p: Mapping, q: Mapping) -> Fraction:
    keys = set(p) | set(q)
    return sum((abs(p.get(k, 0) - q.get(k, 0)) for k in keys), Fraction(0)) / 2
