import json
import random

import pytest
from conftest import cond_families, lhv_models
from hypothesis import given

from bellmodels import formats
from bellmodels.errors import NegativeMass, ValidationError
from bellmodels.formats import FormatError
from bellmodels.kupczynski import (
    evaluate_model1,
    evaluate_model3,
    loophole_demo,
    universal_construct,
)
from bellmodels.lhv import coupling_of
from bellmodels.probcore import CondFamily, JointDist, SettingsDist
from bellmodels.randomized import random_lhv_model


def round_trip(obj):
    return formats.from_json(json.loads(formats.dumps(obj)))


@given(cond_families())
def test_cond_round_trip(cond):
    assert round_trip(cond) == cond


def test_joint_and_settings_round_trip():
    joint = evaluate_model1(loophole_demo(), SettingsDist.uniform())
    assert round_trip(joint) == joint
    assert round_trip(JointDist.uniform()) == JointDist.uniform()
    assert round_trip(SettingsDist.uniform()) == SettingsDist.uniform()


@given(lhv_models())
def test_lhv_round_trip(model):
    assert round_trip(model) == model


def test_coupling_round_trip():
    c = coupling_of(random_lhv_model(random.Random(1)))
    assert round_trip(c) == c


@given(cond_families())
def test_model3_round_trip(cond):
    spec = universal_construct(cond)
    back = round_trip(spec)
    assert back == spec
    assert evaluate_model3(back) == cond


def test_model1_round_trip_with_tuple_tokens():
    spec = loophole_demo()
    back = round_trip(spec)
    assert back == spec
    assert next(iter(back.source))[0] == (1, 1, -1)


def test_documents_carry_schema_version():
    for obj in (JointDist.uniform(), CondFamily.uniform(), universal_construct(CondFamily.uniform()), loophole_demo()):
        doc = formats.to_json(obj)
        assert doc["schema_version"] == 1
        assert "kind" in doc


def test_lhv_schema_matches_documented_shape():
    doc = formats.to_json(random_lhv_model(random.Random(4)))
    entry = doc["lambdas"][0]
    assert set(entry) == {"id", "p", "x1", "x2", "y1", "y2"}
    assert "/" in entry["p"]


def test_kind_inferred_when_absent():
    doc = {"q": {f"{a},{b}": {f"{x},{y}": "1/4" for x in (-1, 1) for y in (-1, 1)} for a in (1, 2) for b in (1, 2)}}
    assert formats.from_json(doc) == CondFamily.uniform()
    doc = {"lambdas": [{"id": "l", "p": "1/1", "x1": 1, "x2": 1, "y1": 1, "y2": 1}]}
    assert formats.from_json(doc).rho == {"l": 1}


def test_bad_schema_version():
    with pytest.raises(FormatError):
        formats.from_json({"schema_version": 2, "kind": "cond", "q": {}})


def test_structural_errors_are_format_errors():
    with pytest.raises(FormatError):
        formats.from_json({"kind": "joint"})
    with pytest.raises(FormatError):
        formats.from_json({"kind": "joint", "pmf": {"1,1,1": "1/1"}})
    with pytest.raises(FormatError):
        formats.from_json([1, 2])
    with pytest.raises(FormatError):
        formats.from_json({"kind": "mystery"})


def test_value_errors_are_validation_errors():
    with pytest.raises(NegativeMass):
        formats.from_json({"kind": "settings", "pmf": {"1,1": "-1/1", "1,2": "2/1"}})
    with pytest.raises(ValidationError):
        formats.from_json({"kind": "settings", "pmf": {"1,1": 0.5, "2,2": 0.5}})


def test_float_ingest_through_json():
    doc = {"kind": "settings", "pmf": {"1,1": 0.1, "1,2": 0.2, "2,1": 0.3, "2,2": 0.4}}
    settings = formats.from_json(doc, float_ingest=True)
    assert sum(settings.pmf.values()) == 1
    assert settings.provenance.get("renormalized") is True


def test_load_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(FormatError):
        formats.load(path)


def test_report_encoders_emit_exact_and_float():
    from bellmodels.bellstats import chsh

    doc = formats.to_json(chsh(CondFamily.uniform()))
    assert doc["s_max"] == {"exact": "0/1", "float": 0.0}
