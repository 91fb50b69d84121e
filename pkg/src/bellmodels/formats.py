"""JSON encodings of distributions, models and reports.

Every document carries ``"schema_version": 1`` and a ``"kind"``. Exact
rationals are written as ``"num/den"`` strings. Hidden-value tokens are JSON
scalars or arrays; arrays are read back as tuples so they stay hashable.

Structural problems raise :class:`FormatError`; well-formed documents with
bad values raise the usual validation errors.
"""
from __future__ import annotations

import json
from collections.abc import Mapping
from fractions import Fraction
from pathlib import Path
from typing import Any

from .bellstats import ChshReport, NoSignallingReport
from .errors import BellModelError
from .kupczynski import (
    ALICE,
    BOB,
    LabelledHiddenValue,
    Model1Spec,
    Model3Spec,
    PostSelectionReport,
)
from .lhv import Coupling, DeterministicStrategy, LhvModel
from .mcsim import EstimateReport, ZTable
from .probcore import (
    SETTINGS,
    CondFamily,
    JointDist,
    SettingsDist,
    format_fraction,
    validate_cond,
    validate_joint,
    validate_settings,
)

SCHEMA_VERSION = 1
PARTY_KEYS = {ALICE: "alice", BOB: "bob"}


class FormatError(BellModelError):
    code = "PARSE"


def join_key(t) -> str:
    return ",".join(str(v) for v in t)


def _parse_key(text: str, n: int) -> tuple[int, ...]:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise FormatError(f"bad key {text!r}") from None
    if len(parts) != n:
        raise FormatError(f"key {text!r} must have {n} comma-separated integers")
    return parts


def _tok_in(v):
    if isinstance(v, list):
        return tuple(_tok_in(x) for x in v)
    if isinstance(v, dict):
        raise FormatError(f"hidden-value token must be a scalar or array, got {v!r}")
    return v


def _tok_out(v):
    if isinstance(v, tuple):
        return [_tok_out(x) for x in v]
    return v


def rational(p: Fraction) -> dict:
    return {"exact": format_fraction(p), "float": float(p)}


def _doc(kind: str, **body) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": kind, **body}


def _get(data: Mapping, key: str):
    try:
        return data[key]
    except (KeyError, TypeError):
        raise FormatError(f"missing field {key!r}") from None


# -- distributions ---------------------------------------------------------

def joint_to_json(joint: JointDist) -> dict:
    return _doc("joint", alphabet=joint.alphabet.name.lower(),
                pmf={join_key(c): format_fraction(joint[c]) for c in joint.cells()})


def cond_to_json(cond: CondFamily) -> dict:
    q = {join_key(pair): {join_key(xy): format_fraction(p) for xy, p in inner.items()} for pair, inner in cond.q.items()}
    return _doc("cond", alphabet=cond.alphabet.name.lower(), q=q)


def settings_to_json(settings: SettingsDist) -> dict:
    return _doc("settings", pmf={join_key(pair): format_fraction(p) for pair, p in settings.pmf.items()})


def _settings_from(data: Mapping, float_ingest: bool) -> SettingsDist:
    return validate_settings({_parse_key(k, 2): v for k, v in data.items()}, float_ingest)


# -- local models ----------------------------------------------------------

def lhv_to_json(model: LhvModel) -> dict:
    lambdas = [
        {"id": lam, "p": format_fraction(p), **model.responses[lam]._asdict()}
        for lam, p in model.rho.items()
    ]
    return _doc("lhv", lambdas=lambdas)


def _lhv_from(data: Mapping) -> LhvModel:
    rho, responses = {}, {}
    for entry in _get(data, "lambdas"):
        lam = str(_get(entry, "id"))
        if lam in rho:
            raise FormatError(f"duplicate hidden value id {lam!r}")
        rho[lam] = _get(entry, "p")
        responses[lam] = DeterministicStrategy(*(_get(entry, k) for k in DeterministicStrategy._fields))
    return LhvModel(rho, responses)


def coupling_to_json(coupling: Coupling) -> dict:
    return _doc("coupling", pmf={join_key(q): format_fraction(p) for q, p in coupling.pmf.items()})


# -- contextual models -----------------------------------------------------

def _source_out(source) -> dict:
    return {"points": [{"l1": _tok_out(l1), "l2": _tok_out(l2), "p": format_fraction(p)}
                       for (l1, l2), p in source.items()]}


def _source_in(data) -> dict:
    return {(_tok_in(_get(pt, "l1")), _tok_in(_get(pt, "l2"))): _get(pt, "p") for pt in _get(data, "points")}


def _responses_out(table: Mapping, src_key: str, lam_key: str) -> dict:
    out: dict[str, list] = {str(s): [] for s in SETTINGS}
    for (src, lam), r in table.items():
        out[str(lam.setting)].append({src_key: _tok_out(src), lam_key: _tok_out(lam.value), "out": r})
    return out


def _responses_in(data: Mapping, party: str, src_key: str, lam_key: str) -> dict:
    table = {}
    for s, entries in data.items():
        setting = _parse_key(s, 1)[0]
        for e in entries:
            lam = LabelledHiddenValue(_tok_in(_get(e, lam_key)), party, setting)
            table[_tok_in(_get(e, src_key)), lam] = _get(e, "out")
    return table


def model3_to_json(spec: Model3Spec) -> dict:
    spaces = {PARTY_KEYS[party]: {} for party in (ALICE, BOB)}
    for (party, s), values in spec.instrument_spaces.items():
        spaces[PARTY_KEYS[party]][str(s)] = [_tok_out(v.value) for v in values]
    p_ab = {
        join_key(pair): [{"la": _tok_out(la.value), "lb": _tok_out(lb.value), "p": format_fraction(p)}
                     for (la, lb), p in law.items()]
        for pair, law in spec.p_ab.items()
    }
    return _doc(
        "model3",
        source=_source_out(spec.source),
        instrument_spaces=spaces,
        p_ab=p_ab,
        responses={"x": _responses_out(spec.x_response, "l1", "la"),
                   "y": _responses_out(spec.y_response, "l2", "lb")},
    )


def _model3_from(data: Mapping) -> Model3Spec:
    raw_spaces = _get(data, "instrument_spaces")
    spaces = {}
    for party in (ALICE, BOB):
        for s, values in _get(raw_spaces, PARTY_KEYS[party]).items():
            setting = _parse_key(s, 1)[0]
            spaces[party, setting] = [LabelledHiddenValue(_tok_in(v), party, setting) for v in values]
    p_ab = {}
    for k, entries in _get(data, "p_ab").items():
        a, b = _parse_key(k, 2)
        p_ab[a, b] = {
            (LabelledHiddenValue(_tok_in(_get(e, "la")), ALICE, a),
             LabelledHiddenValue(_tok_in(_get(e, "lb")), BOB, b)): _get(e, "p")
            for e in entries
        }
    responses = _get(data, "responses")
    return Model3Spec(
        _source_in(_get(data, "source")),
        spaces,
        p_ab,
        _responses_in(_get(responses, "x"), ALICE, "l1", "la"),
        _responses_in(_get(responses, "y"), BOB, "l2", "lb"),
    )


def model1_to_json(spec: Model1Spec) -> dict:
    def laws(party, lam_key):
        return {str(s): [{lam_key: _tok_out(lam.value), "p": format_fraction(p)}
                         for lam, p in spec.p_instrument[party, s].items()] for s in SETTINGS}

    doc = _doc(
        "model1",
        source=_source_out(spec.source),
        p_a=laws(ALICE, "la"),
        p_b=laws(BOB, "lb"),
        responses={"x": _responses_out(spec.x_response, "l1", "la"),
                   "y": _responses_out(spec.y_response, "l2", "lb")},
    )
    if spec.settings is not None:
        doc["settings"] = settings_to_json(spec.settings)["pmf"]
    return doc


def _model1_from(data: Mapping, float_ingest: bool) -> Model1Spec:
    p_inst = {}
    for party, field_name, lam_key in ((ALICE, "p_a", "la"), (BOB, "p_b", "lb")):
        for s, entries in _get(data, field_name).items():
            setting = _parse_key(s, 1)[0]
            p_inst[party, setting] = {
                LabelledHiddenValue(_tok_in(_get(e, lam_key)), party, setting): _get(e, "p") for e in entries
            }
    responses = _get(data, "responses")
    settings = _settings_from(data["settings"], float_ingest) if "settings" in data else None
    return Model1Spec(
        _source_in(_get(data, "source")),
        p_inst,
        _responses_in(_get(responses, "x"), ALICE, "l1", "la"),
        _responses_in(_get(responses, "y"), BOB, "l2", "lb"),
        settings,
    )


# -- dispatch --------------------------------------------------------------

def _infer_kind(data: Mapping) -> str:
    for field_name, kind in (("lambdas", "lhv"), ("p_ab", "model3"), ("p_a", "model1"), ("q", "cond")):
        if field_name in data:
            return kind
    if data.get("pmf"):
        n = len(next(iter(data["pmf"])).split(","))
        return {4: "joint", 2: "settings"}.get(n, "unknown")
    return "unknown"


def from_json(data: Any, float_ingest: bool = False):
    """Decode any supported document into its domain object."""
    if not isinstance(data, dict):
        raise FormatError("top-level JSON value must be an object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise FormatError(f"unsupported schema_version {version!r}")
    kind = data.get("kind") or _infer_kind(data)
    try:
        if kind == "joint":
            raw = {_parse_key(k, 4): v for k, v in _get(data, "pmf").items()}
            return validate_joint(raw, data.get("alphabet"), float_ingest)
        if kind == "cond":
            raw = {_parse_key(k, 2): {_parse_key(xy, 2): v for xy, v in inner.items()}
                   for k, inner in _get(data, "q").items()}
            return validate_cond(raw, data.get("alphabet"), float_ingest)
        if kind == "settings":
            return _settings_from(_get(data, "pmf"), float_ingest)
        if kind == "lhv":
            return _lhv_from(data)
        if kind == "coupling":
            return Coupling({_parse_key(k, 4): v for k, v in _get(data, "pmf").items()})
        if kind == "model3":
            return _model3_from(data)
        if kind == "model1":
            return _model1_from(data, float_ingest)
    except (AttributeError, TypeError) as exc:
        raise FormatError(f"malformed {kind} document: {exc}") from exc
    raise FormatError(f"unknown document kind {kind!r}")


def to_json(obj) -> dict:
    encoders = {
        JointDist: joint_to_json,
        CondFamily: cond_to_json,
        SettingsDist: settings_to_json,
        LhvModel: lhv_to_json,
        Coupling: coupling_to_json,
        Model3Spec: model3_to_json,
        Model1Spec: model1_to_json,
        ChshReport: chsh_report_to_json,
        NoSignallingReport: no_signalling_to_json,
        PostSelectionReport: postselection_to_json,
        EstimateReport: estimate_to_json,
        ZTable: ztable_to_json,
    }
    return encoders[type(obj)](obj)


def load(path: str | Path, float_ingest: bool = False):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return from_json(data, float_ingest)


def dumps(obj) -> str:
    doc = obj if isinstance(obj, dict) else to_json(obj)
    return json.dumps(doc, indent=2) + "\n"


def dump(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj))


# -- reports ---------------------------------------------------------------

def chsh_report_to_json(report: ChshReport) -> dict:
    doc = _doc(
        "chsh_report",
        correlations={join_key(k): rational(v) for k, v in report.correlations.items()},
        s_values={join_key(k): rational(v) for k, v in report.s_values.items()},
        s_max=rational(report.s_max),
        violates_local_bound=report.violates_local_bound,
    )
    if report.certified:
        doc["certified"] = True
        doc["certificate"] = coupling_to_json(report.certificate)
    return doc


def no_signalling_to_json(report: NoSignallingReport) -> dict:
    return _doc(
        "no_signalling_report",
        delta_a={join_key(k): rational(v) for k, v in report.delta_a.items()},
        delta_b={join_key(k): rational(v) for k, v in report.delta_b.items()},
        max_delta=rational(report.max_delta),
    )


def postselection_to_json(report: PostSelectionReport) -> dict:
    return _doc(
        "postselection_report",
        detection_rate=rational(report.detection_rate),
        settings_dependence_delta=rational(report.settings_dependence_delta),
        settings_outcome_dependence=rational(report.settings_outcome_dependence),
        postselected_settings=settings_to_json(report.postselected_settings)["pmf"],
        conditional_family=cond_to_json(report.conditional_family)["q"],
    )


def estimate_to_json(report: EstimateReport) -> dict:
    pairs = {}
    for pair, n in report.counts.items():
        entry: dict[str, Any] = {"count": n}
        if n:
            entry["correlation"] = rational(report.correlations[pair])
            entry["std_error"] = report.std_errors[pair]
        pairs[join_key(pair)] = entry
    doc = _doc("estimate_report", seed=report.seed, n_trials=report.n_trials, pairs=pairs,
               partial=report.partial, missing=[join_key(p) for p in report.missing])
    if report.chsh is not None:
        doc["s_values"] = {join_key(k): rational(v) for k, v in report.chsh.s_values.items()}
        doc["s_max"] = rational(report.chsh.s_max)
    return doc


def ztable_to_json(table: ZTable) -> dict:
    def num(z):
        return "inf" if z == float("inf") else ("-inf" if z == float("-inf") else z)

    return _doc("z_table", z={join_key(k): num(v) for k, v in table.z.items()},
                max_abs_z=num(table.max_abs_z), degenerate=[join_key(p) for p in table.degenerate])


__all__ = [
    "FormatError",
    "dump",
    "dumps",
    "from_json",
    "join_key",
    "load",
    "rational",
    "to_json",
]
