from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from align_lint import Model, from_interchange, load, to_interchange
from align_lint.interchange import check_interchange
from align_lint.model import ModelValidationError
from modelgen import doc_text, random_doc


def test_empty_model_document():
    doc = json.loads(to_interchange(Model()))
    for key in ("processes", "applications", "data_sources", "operating_systems", "technologies"):
        assert doc[key] == []
    assert doc["schema_version"] == 1


def test_output_is_sorted_and_newline_terminated(fixture_model):
    text = to_interchange(fixture_model)
    assert text.endswith("\n")
    doc = json.loads(text)
    assert list(doc) == sorted(doc)
    assert text == json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def test_fixture_round_trip(fixture_model):
    again = from_interchange(to_interchange(fixture_model))
    assert again == fixture_model
    assert again.fingerprint == fixture_model.fingerprint


def test_equal_models_byte_identical(fixture_src):
    assert to_interchange(load(fixture_src)) == to_interchange(load(fixture_src))


def test_fingerprint_tracks_content():
    a = load("os A")
    b = load("os B")
    assert a.fingerprint != b.fingerprint
    assert len(a.fingerprint) == 64


@pytest.mark.parametrize("text", [
    "", "{", '{"processes": [', "[]", '{"processes": {}}',
    '{"processes": [{"kind": "process", "id": "P", "children": [{"kind": "widget", "id": "x"}]}]}',
    '{"applications": [{"id": "A", "quality": {"speed": 0.5}}]}',
    '{"applications": [{"id": "A", "quality": {"integrity": "high"}}]}',
    '{"data_sources": [{"id": "D", "entities": [{"id": "E", "attributes": [{"id": "a", "qualifiers": ["shiny"]}]}]}]}',
    '{"schema_version": 2}',
])
def test_malformed_documents(text):
    model, issues = check_interchange(text)
    assert model is None
    assert [i.code for i in issues] == ["E000_MALFORMED_DOCUMENT"]


def test_truncated_document(fixture_model):
    text = to_interchange(fixture_model)
    with pytest.raises(ModelValidationError) as exc:
        from_interchange(text[: len(text) // 2])
    assert exc.value.issues[0].code == "E000_MALFORMED_DOCUMENT"


def test_quality_out_of_range():
    model, issues = check_interchange('{"applications": [{"id": "A", "quality": {"integrity": 1.5}}]}')
    assert model is None
    assert [i.code for i in issues] == ["E004_QUALITY_RANGE"]


def test_semantic_errors_pass_through():
    doc = {"processes": [{"kind": "process", "id": "P", "children": [
        {"kind": "activity", "id": "a", "supported_by": ["Ghost"], "uses": []},
    ]}]}
    _, issues = check_interchange(json.dumps(doc))
    assert [i.code for i in issues] == ["E001_DANGLING_REF"]


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_round_trip_property(seed):
    m = from_interchange(doc_text(random_doc(seed)))
    text = to_interchange(m)
    again = from_interchange(text)
    assert again == m and again.fingerprint == m.fingerprint
    assert to_interchange(again) == text
