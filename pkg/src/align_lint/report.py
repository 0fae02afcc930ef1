"""Element-level findings and report rendering (text, interchange, DOT)."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .interchange import dumps
from .maturity import LinkMaturity, MaturityLevel, MaturityTable, maturity_table
from .metrics import (
    REGISTRY,
    Assessment,
    LayerLink,
    Offender,
    Origin,
    get_metric,
)
from .model import (
    Activity,
    ElementRef,
    Kind,
    Model,
    Process,
    Severity,
)

SCHEMA_VERSION = 1

_MESSAGES = {
    "M1": "activity {id} is not automated",
    "M2": "activity {id} is supported by {magnitude} applications",
    "M3": "application {id} supports {magnitude} top-level processes",
    "M4": "activity {id} uses no information entity",
    "M5": "information entity {id} is used by no activity",
    "M6": "information entity {id} is accessed by {magnitude} applications",
    "M7": "attribute {id} is redundant",
    "M8": "attribute {id} is confidential but not secure",
    "M9": "application {id} runs on {magnitude} platforms",
    "M10": "{kind} {id} hosts no application",
    "M11": "critical activity {id} relies on {magnitude} low-quality application(s)",
}

_LINK_ORDER = {link: i for i, link in enumerate(LayerLink)}
_METRIC_ORDER = {d.id: i for i, d in enumerate(REGISTRY)}


class FingerprintMismatch(ValueError):
    code = "FINGERPRINT_MISMATCH"


@dataclass(frozen=True)
class Finding:
    metric: str
    element: ElementRef
    severity: Severity
    message: str
    suggestion: str
    magnitude: int = 0
    context: tuple[ElementRef, ...] = ()

    def sort_key(self):
        return (
            _LINK_ORDER[get_metric(self.metric).link],
            _METRIC_ORDER[self.metric],
            self.element.path,
        )


@dataclass(frozen=True)
class Report:
    model_fingerprint: str
    maturity: MaturityTable
    findings: tuple[Finding, ...]
    summary: dict

    @property
    def has_findings(self) -> bool:
        return bool(self.findings)


def severity_for(metric_id: str) -> Severity:
    return Severity.ERROR if get_metric(metric_id).origin is Origin.PAPER else Severity.WARNING


def make_finding(metric_id: str, offender: Offender) -> Finding:
    desc = get_metric(metric_id)
    fields = {
        "id": offender.element.id,
        "kind": offender.element.kind.value.replace("_", " "),
        "element": offender.element.dotted,
        "magnitude": offender.magnitude,
        "context": ", ".join(ref.dotted for ref in offender.context),
    }
    return Finding(
        metric_id,
        offender.element,
        severity_for(metric_id),
        _MESSAGES[metric_id].format(**fields),
        desc.remediation_template.format(**fields),
        offender.magnitude,
        offender.context,
    )


def _check_fingerprint(model: Model, assessment: Assessment) -> None:
    if model.fingerprint != assessment.model_fingerprint:
        raise FingerprintMismatch("assessment was not computed from this model")


def findings(model: Model, assessment: Assessment, metrics: Iterable[str] | None = None) -> list[Finding]:
    """One finding per offender, ordered by (link, metric, element path)."""
    _check_fingerprint(model, assessment)
    wanted = set(metrics) if metrics is not None else None
    out = [
        make_finding(metric_id, offender)
        for metric_id, result in assessment.results.items()
        if wanted is None or metric_id in wanted
        for offender in result.offenders
    ]
    return sorted(out, key=Finding.sort_key)


def build_report(model: Model, assessment: Assessment, metrics: Iterable[str] | None = None) -> Report:
    selected = [d.id for d in REGISTRY if metrics is None or d.id in set(metrics)]
    found = findings(model, assessment, selected)
    by_metric = {m: 0 for m in selected}
    by_severity = {s.value: 0 for s in Severity}
    for f in found:
        by_metric[f.metric] += 1
        by_severity[f.severity.value] += 1
    summary = {"by_metric": by_metric, "by_severity": by_severity, "total": len(found)}
    return Report(model.fingerprint, maturity_table(assessment), tuple(found), summary)


# ---------------------------------------------------------------------------
# Text


def _ratio_text(ratio: Fraction | None) -> str:
    return "n/a" if ratio is None else f"{float(ratio):.3f}"


def render_text(report: Report) -> str:
    lines = [f"model {report.model_fingerprint[:16]}", "maturity"]
    for row in report.maturity:
        level = row.level.label if row.level is not None else "n/a"
        lines.append(f"  {row.link.value:<24} {_ratio_text(row.ratio):>5}  {level}")
    lines.append("findings")
    for f in report.findings:
        lines.append(f"{f.severity.value.upper()} {f.metric} {f.element.dotted}: {f.message} | {f.suggestion}")
    if not report.findings:
        lines.append("  none")
    sev = report.summary["by_severity"]
    lines.append("summary")
    lines.append(f"  errors {sev['error']}, warnings {sev['warning']}, total {report.summary['total']}")
    lines.append("  " + " ".join(f"{m}={n}" for m, n in report.summary["by_metric"].items()))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Interchange


def _frac(value: Fraction | None) -> str | None:
    return None if value is None else f"{value.numerator}/{value.denominator}"


def _ref_doc(ref: ElementRef) -> dict:
    return {"kind": ref.kind.value, "path": list(ref.path)}


def report_to_doc(report: Report) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "model_fingerprint": report.model_fingerprint,
        "maturity": [
            {
                "link": row.link.value,
                "ratio": _frac(row.ratio),
                "ratio_value": None if row.ratio is None else round(float(row.ratio), 6),
                "level": None if row.level is None else row.level.label,
                "contributing": [{"metric": m, "violation_ratio": _frac(r)} for m, r in row.contributing],
            }
            for row in report.maturity
        ],
        "findings": [
            {
                "metric": f.metric,
                "origin": get_metric(f.metric).origin.value,
                "element": _ref_doc(f.element),
                "severity": f.severity.value,
                "message": f.message,
                "suggestion": f.suggestion,
                "magnitude": f.magnitude,
                "context": [_ref_doc(r) for r in f.context],
            }
            for f in report.findings
        ],
        "summary": report.summary,
    }


def render_interchange(report: Report) -> str:
    return dumps(report_to_doc(report))


def _parse_frac(text: str | None) -> Fraction | None:
    return None if text is None else Fraction(text)


def _parse_ref(doc: dict) -> ElementRef:
    return ElementRef(Kind(doc["kind"]), tuple(doc["path"]))


def report_from_interchange(text: str) -> Report:
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema_version {doc.get('schema_version')!r}")
    maturity = tuple(
        LinkMaturity(
            LayerLink(row["link"]),
            _parse_frac(row["ratio"]),
            None if row["level"] is None else MaturityLevel[row["level"].upper()],
            tuple((c["metric"], _parse_frac(c["violation_ratio"])) for c in row["contributing"]),
        )
        for row in doc["maturity"]
    )
    found = tuple(
        Finding(
            f["metric"],
            _parse_ref(f["element"]),
            Severity(f["severity"]),
            f["message"],
            f["suggestion"],
            f["magnitude"],
            tuple(_parse_ref(r) for r in f["context"]),
        )
        for f in doc["findings"]
    )
    return Report(doc["model_fingerprint"], maturity, found, doc["summary"])


# ---------------------------------------------------------------------------
# DOT

SHAPES = {
    Kind.PROCESS: "folder",
    Kind.ACTIVITY: "box",
    Kind.APPLICATION: "component",
    Kind.FUNCTIONALITY: "hexagon",
    Kind.DATA_SOURCE: "cylinder",
    Kind.INFORMATION_ENTITY: "note",
    Kind.ATTRIBUTE: "ellipse",
    Kind.OPERATING_SYSTEM: "box3d",
    Kind.TECHNOLOGY: "octagon",
}


def node_id(ref: ElementRef) -> str:
    return "__".join(ref.path)


def render_dot(model: Model, report: Report) -> str:
    """DOT source with one node per element; finding elements are filled red."""
    if model.fingerprint != report.model_fingerprint:
        raise FingerprintMismatch("report was not computed from this model")
    flagged = {f.element for f in report.findings}
    lines = ["digraph alignment {", "  rankdir=LR;", '  node [fontname="Helvetica"];']
    edges: list[str] = []

    def node(ref: ElementRef, indent: str) -> None:
        attrs = [f'label="{ref.id}"', f"shape={SHAPES[ref.kind]}"]
        if ref in flagged:
            attrs += ['fillcolor="red"', 'style="filled"']
        lines.append(f'{indent}"{node_id(ref)}" [{", ".join(attrs)}];')

    def cluster(ref: ElementRef, indent: str, body) -> None:
        lines.append(f'{indent}subgraph "cluster_{node_id(ref)}" {{')
        lines.append(f'{indent}  label="{ref.kind.value.replace("_", " ")} {ref.id}";')
        node(ref, indent + "  ")
        body(indent + "  ")
        lines.append(f"{indent}}}")

    def edge(src: ElementRef, dst: ElementRef, label: str) -> None:
        edges.append(f'  "{node_id(src)}" -> "{node_id(dst)}" [label="{label}"];')

    def process(proc: Process, prefix: tuple[str, ...], indent: str) -> None:
        ref = ElementRef(Kind.PROCESS, prefix + (proc.id,))

        def body(inner: str) -> None:
            for child in proc.children:
                if isinstance(child, Process):
                    process(child, ref.path, inner)
                else:
                    activity(child, ref.path, inner)

        cluster(ref, indent, body)

    def activity(act: Activity, prefix: tuple[str, ...], indent: str) -> None:
        ref = ElementRef(Kind.ACTIVITY, prefix + (act.id,))
        node(ref, indent)
        for app in act.supported_by:
            edge(ref, app, "supported_by")
        for ent in act.uses:
            edge(ref, ent, "uses")

    for proc in model.processes:
        process(proc, (), "  ")
    for app in model.applications:
        ref = ElementRef(Kind.APPLICATION, (app.id,))

        def app_body(inner: str, app=app, ref=ref) -> None:
            for fn in app.functionalities:
                node(ElementRef(Kind.FUNCTIONALITY, (app.id, fn)), inner)

        cluster(ref, "  ", app_body)
        for target in app.runs_on:
            edge(ref, target, "runs_on")
        for ent in app.accesses:
            edge(ref, ent, "accesses")
    for ds in model.data_sources:
        ds_ref = ElementRef(Kind.DATA_SOURCE, (ds.id,))

        def ds_body(inner: str, ds=ds) -> None:
            for ent in ds.entities:
                ent_ref = ElementRef(Kind.INFORMATION_ENTITY, (ds.id, ent.id))

                def ent_body(inner2: str, ent=ent, ent_ref=ent_ref) -> None:
                    for attr in ent.attributes:
                        node(ElementRef(Kind.ATTRIBUTE, ent_ref.path + (attr.id,)), inner2)

                cluster(ent_ref, inner, ent_body)

        cluster(ds_ref, "  ", ds_body)
    for o in model.operating_systems:
        node(ElementRef(Kind.OPERATING_SYSTEM, (o.id,)), "  ")
    for t in model.technologies:
        node(ElementRef(Kind.TECHNOLOGY, (t.id,)), "  ")
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"
