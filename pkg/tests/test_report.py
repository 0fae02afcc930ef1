from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from align_lint import Model, build_report, evaluate_all, findings, load, render_dot, render_interchange, render_text
from align_lint.interchange import from_interchange
from align_lint.model import ElementRef, Kind, Severity
from align_lint.report import FingerprintMismatch, node_id, report_from_interchange
from dotcheck import parse_dot, red_nodes, red_nodes_scan
from modelgen import doc_text, random_doc

CLEAN = """
process P {
  activity a { supported_by A uses D.E }
  activity b { supported_by B uses D.E }
}
application A { runs_on L }
application B { runs_on L }
datasource D { entity E { attribute x secure confidential } }
os L
"""


def report_for(model, metrics=None):
    return build_report(model, evaluate_all(model), metrics)


def test_fixture_m1_m2_findings(fixture_model):
    found = findings(fixture_model, evaluate_all(fixture_model))
    first, second = found[0], found[1]
    assert first.metric == "M1" and first.severity is Severity.ERROR
    assert first.element.path == ("DataCapture", "ReceivingOfQuestionnaires")
    assert "ReceivingOfQuestionnaires" in first.message and "not automated" in first.message
    assert "application" in first.suggestion
    assert second.metric == "M2" and second.magnitude == 3
    assert second.element.path == ("DataCapture", "Scanning")
    for name in ("DigiScan", "DigiOcr", "DigiLad"):
        assert name in second.suggestion
    assert all(f.severity is Severity.WARNING for f in found[2:])


def test_clean_model_has_no_findings():
    m = load(CLEAN)
    assert findings(m, evaluate_all(m)) == []


def test_fingerprint_mismatch(fixture_model):
    other = load(CLEAN)
    with pytest.raises(FingerprintMismatch):
        findings(fixture_model, evaluate_all(other))
    with pytest.raises(FingerprintMismatch):
        render_dot(fixture_model, report_for(other))


def test_render_text_fixture(fixture_model):
    text = render_text(report_for(fixture_model))
    assert "M1 DataCapture.ReceivingOfQuestionnaires" in text
    assert "M2 DataCapture.Scanning" in text
    assert "ERROR M1 DataCapture.ReceivingOfQuestionnaires: " in text
    assert "0.905  very_good" in text
    assert text.endswith("\n")


def test_render_text_empty():
    text = render_text(report_for(Model()))
    maturity = text.split("maturity\n")[1].split("findings\n")[0].splitlines()
    assert len(maturity) == 4 and all(line.endswith("n/a  n/a") for line in maturity)
    assert "errors 0, warnings 0, total 0" in text
    assert "M1=0" in text and "M11=0" in text


def test_render_deterministic(fixture_model):
    assert render_text(report_for(fixture_model)) == render_text(report_for(fixture_model))
    assert render_interchange(report_for(fixture_model)) == render_interchange(report_for(fixture_model))


def test_interchange_report(fixture_model):
    report = report_for(fixture_model)
    doc = json.loads(render_interchange(report))
    assert doc["schema_version"] == 1
    paper = [f for f in doc["findings"] if f["origin"] == "paper"]
    assert len(paper) == 2
    assert doc["maturity"][0]["ratio"] == "19/21"
    assert report_from_interchange(render_interchange(report)) == report


def test_interchange_report_empty():
    report = report_for(Model())
    doc = json.loads(render_interchange(report))
    assert doc["findings"] == []
    assert report_from_interchange(render_interchange(report)) == report


def test_metric_filter(fixture_model):
    report = report_for(fixture_model, ["M1"])
    assert [f.metric for f in report.findings] == ["M1"]
    assert report.summary["by_metric"] == {"M1": 1}


def test_summary_counts(fixture_model):
    report = report_for(fixture_model)
    assert report.summary["by_severity"] == {"error": 2, "warning": 7}
    assert report.summary["total"] == 9


def test_dot_fixture(fixture_model):
    text = render_dot(fixture_model, report_for(fixture_model))
    parse_dot(text)
    red = red_nodes(text)
    assert "DataCapture__ReceivingOfQuestionnaires" in red
    assert "DataCapture__Scanning" in red
    for app in ("DigiScan", "DigiOcr", "DigiLad"):
        assert f'"DataCapture__Scanning" -> "{app}" [label="supported_by"];' in text
    assert '"DigiOcr" -> "OCR" [label="runs_on"];' in text
    assert text.endswith("\n")


def test_dot_m1_m2_only(fixture_model):
    text = render_dot(fixture_model, report_for(fixture_model, ["M1", "M2"]))
    assert red_nodes(text) == {"DataCapture__ReceivingOfQuestionnaires", "DataCapture__Scanning"}
    assert "DataCapture__CharacterRecognizing" not in red_nodes(text)


def test_dot_empty():
    text = render_dot(Model(), report_for(Model()))
    graph = parse_dot(text)
    assert graph.get_nodes() == [] or all(n.get_name() == "node" for n in graph.get_nodes())


def test_dot_every_element_is_a_node():
    m = load(CLEAN + "application F { functionality Search }\ntechnology T\n")
    text = render_dot(m, report_for(m))
    for ref in [
        ElementRef(Kind.PROCESS, ("P",)), ElementRef(Kind.ACTIVITY, ("P", "a")),
        ElementRef(Kind.FUNCTIONALITY, ("F", "Search")), ElementRef(Kind.DATA_SOURCE, ("D",)),
        ElementRef(Kind.INFORMATION_ENTITY, ("D", "E")), ElementRef(Kind.ATTRIBUTE, ("D", "E", "x")),
        ElementRef(Kind.OPERATING_SYSTEM, ("L",)), ElementRef(Kind.TECHNOLOGY, ("T",)),
    ]:
        assert f'"{node_id(ref)}" [' in text


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_report_properties(seed):
    m = from_interchange(doc_text(random_doc(seed)))
    a = evaluate_all(m)
    report = build_report(m, a)
    assert len(report.findings) == sum(r.value for r in a.results.values())
    assert list(report.findings) == sorted(report.findings, key=lambda f: f.sort_key())
    flagged = {node_id(f.element) for f in report.findings}
    dot = render_dot(m, report)
    assert red_nodes(dot) == flagged == red_nodes_scan(dot)
    assert report_from_interchange(render_interchange(report)) == report


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), order=st.permutations(range(11)))
def test_findings_independent_of_evaluation_order(seed, order):
    m = from_interchange(doc_text(random_doc(seed)))
    a = evaluate_all(m)
    ids = list(a.results)
    shuffled = type(a)(a.model_fingerprint, {ids[i]: a.results[ids[i]] for i in order})
    assert findings(m, shuffled) == findings(m, a)
