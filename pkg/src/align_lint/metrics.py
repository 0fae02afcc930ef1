"""Alignment metric registry and evaluation.

M1 and M2 are the two published metrics; M3 to M11 are extensions built only
from concepts the metamodel defines (criticality, quality factors, attribute
qualifiers and the runs_on / accesses links).  Every descriptor carries its
origin so reports never blur the two.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Callable

from .model import (
    Activity,
    Criticality,
    ElementRef,
    Kind,
    Model,
    Qualifier,
    leaf_activities,
    walk,
)


class LayerLink(str, enum.Enum):
    BUSINESS_APPLICATION = "business_application"
    BUSINESS_INFORMATION = "business_information"
    APPLICATION_INFORMATION = "application_information"
    APPLICATION_TECHNOLOGY = "application_technology"


class Origin(str, enum.Enum):
    PAPER = "paper"
    EXTENSION = "extension"


class UnknownMetric(KeyError):
    code = "UNKNOWN_METRIC"


@dataclass(frozen=True)
class Thresholds:
    m9_runs_on: int = 3
    m11_quality: float = 0.5

    def __post_init__(self) -> None:
        if isinstance(self.m9_runs_on, bool) or not isinstance(self.m9_runs_on, int) or self.m9_runs_on < 2:
            raise ValueError(f"m9 threshold must be an integer >= 2, got {self.m9_runs_on!r}")
        if not 0.0 <= self.m11_quality <= 1.0:
            raise ValueError(f"m11 threshold must lie in [0, 1], got {self.m11_quality!r}")


@dataclass(frozen=True, order=True)
class Offender:
    element: ElementRef
    magnitude: int = 0
    context: tuple[ElementRef, ...] = ()


@dataclass(frozen=True)
class MetricResult:
    metric: str
    population_size: int
    offenders: tuple[Offender, ...]

    @property
    def value(self) -> int:
        return len(self.offenders)

    @property
    def violation_ratio(self) -> Fraction | None:
        """Offenders over population; ``None`` means not assessable."""
        if self.population_size == 0:
            return None
        return Fraction(self.value, self.population_size)


Evaluator = Callable[[Model, Thresholds], tuple[int, list[Offender]]]


@dataclass(frozen=True)
class MetricDescriptor:
    id: str
    name: str
    link: LayerLink
    origin: Origin
    description: str
    rationale: str
    remediation_template: str
    evaluate: Evaluator = field(repr=False, compare=False)

    @property
    def number(self) -> int:
        return int(self.id[1:])


# ---------------------------------------------------------------------------
# Evaluators.  Each returns (population size, offenders).


def _activity_ref(owner: ElementRef, act: Activity) -> ElementRef:
    return ElementRef(Kind.ACTIVITY, owner.path + (act.id,))


def _app_ref(app_id: str) -> ElementRef:
    return ElementRef(Kind.APPLICATION, (app_id,))


def _entities(model: Model):
    for ds in model.data_sources:
        for ent in ds.entities:
            yield ElementRef(Kind.INFORMATION_ENTITY, (ds.id, ent.id)), ent


def _attributes(model: Model):
    for ref, ent in _entities(model):
        for attr in ent.attributes:
            yield ElementRef(Kind.ATTRIBUTE, ref.path + (attr.id,)), attr


def _m1(model: Model, _: Thresholds):
    leaves = leaf_activities(model)
    return len(leaves), [Offender(_activity_ref(o, a)) for o, a in leaves if not a.supported_by]


def _m2(model: Model, _: Thresholds):
    leaves = leaf_activities(model)
    return len(leaves), [
        Offender(_activity_ref(o, a), len(a.supported_by), a.supported_by)
        for o, a in leaves
        if len(a.supported_by) >= 2
    ]


def _m3(model: Model, _: Thresholds):
    processes: dict[ElementRef, set[str]] = {}
    for owner, act in leaf_activities(model):
        for app in act.supported_by:
            processes.setdefault(app, set()).add(owner.path[0])
    offenders = []
    for app in model.applications:
        tops = processes.get(_app_ref(app.id), set())
        if len(tops) >= 2:
            context = tuple(ElementRef(Kind.PROCESS, (p,)) for p in sorted(tops))
            offenders.append(Offender(_app_ref(app.id), len(tops), context))
    return len(model.applications), offenders


def _m4(model: Model, _: Thresholds):
    leaves = leaf_activities(model)
    return len(leaves), [Offender(_activity_ref(o, a)) for o, a in leaves if not a.uses]


def _m5(model: Model, _: Thresholds):
    used = {ref for _, act in leaf_activities(model) for ref in act.uses}
    entities = list(_entities(model))
    return len(entities), [Offender(ref) for ref, _ in entities if ref not in used]


def _m6(model: Model, _: Thresholds):
    accessors: dict[ElementRef, list[ElementRef]] = {}
    for app in model.applications:
        for ref in app.accesses:
            accessors.setdefault(ref, []).append(_app_ref(app.id))
    entities = list(_entities(model))
    offenders = []
    for ref, _ in entities:
        apps = accessors.get(ref, [])
        if len(apps) >= 2:
            offenders.append(Offender(ref, len(apps), tuple(apps)))
    return len(entities), offenders


def _m7(model: Model, _: Thresholds):
    attrs = list(_attributes(model))
    return len(attrs), [Offender(ref) for ref, a in attrs if Qualifier.REDUNDANT in a.qualifiers]


def _m8(model: Model, _: Thresholds):
    attrs = list(_attributes(model))
    return len(attrs), [
        Offender(ref)
        for ref, a in attrs
        if Qualifier.CONFIDENTIAL in a.qualifiers and Qualifier.SECURE not in a.qualifiers
    ]


def _m9(model: Model, t: Thresholds):
    return len(model.applications), [
        Offender(_app_ref(app.id), len(app.runs_on), app.runs_on)
        for app in model.applications
        if len(app.runs_on) >= t.m9_runs_on
    ]


def _m10(model: Model, _: Thresholds):
    hosted = {ref for app in model.applications for ref in app.runs_on}
    platforms = [
        (ref, el) for ref, el in walk(model)
        if ref.kind in (Kind.OPERATING_SYSTEM, Kind.TECHNOLOGY)
    ]
    return len(platforms), [Offender(ref) for ref, _ in platforms if ref not in hosted]


def _m11(model: Model, t: Thresholds):
    apps = {_app_ref(app.id): app for app in model.applications}
    population = 0
    offenders = []
    for owner, act in leaf_activities(model):
        if _criticality(model, owner) is not Criticality.HIGH:
            continue
        scored = [(ref, apps[ref].mean_quality()) for ref in act.supported_by]
        scored = [(ref, q) for ref, q in scored if q is not None]
        if not scored:
            continue
        population += 1
        weak = tuple(ref for ref, q in scored if q < t.m11_quality)
        if weak:
            offenders.append(Offender(_activity_ref(owner, act), len(weak), weak))
    return population, offenders


def _criticality(model: Model, process_ref: ElementRef) -> Criticality:
    return model.index[process_ref.path][1].criticality


# ---------------------------------------------------------------------------
# Registry

_BA = LayerLink.BUSINESS_APPLICATION
_BI = LayerLink.BUSINESS_INFORMATION
_AI = LayerLink.APPLICATION_INFORMATION
_AT = LayerLink.APPLICATION_TECHNOLOGY

REGISTRY: tuple[MetricDescriptor, ...] = (
    MetricDescriptor(
        "M1", "Activities not automated", _BA, Origin.PAPER,
        "Counts leaf activities that no application supports.",
        "Every activity should be backed by an application; manual activities "
        "cost staff time and slow the process down.",
        "Introduce or assign an application that automates activity {element}.",
        _m1,
    ),
    MetricDescriptor(
        "M2", "Activities supported by several applications", _BA, Origin.PAPER,
        "Counts leaf activities supported by two or more applications; "
        "magnitude is the number of supporting applications.",
        "Several applications behind one activity mean duplicate data entry, "
        "one login per application, and units of work that span several "
        "systems. One application per activity keeps the activity cheap to change.",
        "Consolidate the {magnitude} applications supporting {element} "
        "({context}) into as few as possible, ideally one.",
        _m2,
    ),
    MetricDescriptor(
        "M3", "Applications shared across top-level processes", _BA, Origin.EXTENSION,
        "Counts applications that support activities of two or more distinct "
        "top-level processes; magnitude is the process count.",
        "An application serving unrelated processes couples their evolution.",
        "Review whether application {element} should be split along the "
        "processes it serves ({context}).",
        _m3,
    ),
    MetricDescriptor(
        "M4", "Activities using no information", _BI, Origin.EXTENSION,
        "Counts leaf activities that use no information entity.",
        "Activities with no modelled information needs leave the "
        "business-information link undocumented.",
        "Declare the information entities that activity {element} uses.",
        _m4,
    ),
    MetricDescriptor(
        "M5", "Orphan information entities", _BI, Origin.EXTENSION,
        "Counts information entities used by no activity.",
        "Data that no business activity uses is a maintenance cost with no "
        "business counterpart.",
        "Link information entity {element} to the activities that need it or retire it.",
        _m5,
    ),
    MetricDescriptor(
        "M6", "Entities accessed by several applications", _AI, Origin.EXTENSION,
        "Counts information entities accessed by two or more applications; "
        "magnitude is the accessor count.",
        "An entity written by several applications needs coordinated updates "
        "between those systems.",
        "Give information entity {element} a single owning application "
        "instead of {magnitude} accessors ({context}).",
        _m6,
    ),
    MetricDescriptor(
        "M7", "Redundant attributes", _AI, Origin.EXTENSION,
        "Counts attributes qualified as redundant.",
        "Redundant data must be kept consistent by hand or by synchronisation jobs.",
        "Remove the redundancy of attribute {element} or document its master copy.",
        _m7,
    ),
    MetricDescriptor(
        "M8", "Unsecured confidential attributes", _AI, Origin.EXTENSION,
        "Counts attributes qualified confidential but not secure.",
        "Confidential data without protection is an integrity and compliance risk.",
        "Secure confidential attribute {element}.",
        _m8,
    ),
    MetricDescriptor(
        "M9", "Applications on many platforms", _AT, Origin.EXTENSION,
        "Counts applications that run on at least the configured number of "
        "operating systems or technologies (default 3); magnitude is the platform count.",
        "Each additional platform an application depends on widens its "
        "operational footprint.",
        "Reduce the {magnitude} platforms application {element} runs on ({context}).",
        _m9,
    ),
    MetricDescriptor(
        "M10", "Unused platforms", _AT, Origin.EXTENSION,
        "Counts operating systems and technologies that no application runs on.",
        "Infrastructure with no hosted application is cost without business support.",
        "Host an application on {element} or decommission it.",
        _m10,
    ),
    MetricDescriptor(
        "M11", "Critical activities on low-quality applications", _BA, Origin.EXTENSION,
        "Among leaf activities of high-criticality processes with at least one "
        "supporting application that declares quality factors, counts those "
        "where some such application has a mean quality score below the "
        "configured threshold (default 0.5); magnitude is the number of weak applications.",
        "Critical business activities deserve applications of adequate quality.",
        "Improve the quality of {context} or move critical activity {element} "
        "to a better application.",
        _m11,
    ),
)

_BY_ID = {d.id: d for d in REGISTRY}


def list_metrics() -> list[MetricDescriptor]:
    return list(REGISTRY)


def get_metric(metric_id: str) -> MetricDescriptor:
    try:
        return _BY_ID[metric_id]
    except KeyError:
        raise UnknownMetric(metric_id) from None


def evaluate_metric(model: Model, metric_id: str, thresholds: Thresholds | None = None) -> MetricResult:
    desc = get_metric(metric_id)
    population, offenders = desc.evaluate(model, thresholds or Thresholds())
    ordered = sorted(offenders, key=lambda o: o.element.path)
    return MetricResult(metric_id, population, tuple(ordered))


@dataclass(frozen=True)
class Assessment:
    model_fingerprint: str
    results: dict[str, MetricResult]
    thresholds: Thresholds = Thresholds()
    evaluated_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc), compare=False,
    )


def evaluate_all(model: Model, thresholds: Thresholds | None = None) -> Assessment:
    thresholds = thresholds or Thresholds()
    results = {d.id: evaluate_metric(model, d.id, thresholds) for d in REGISTRY}
    return Assessment(model.fingerprint, results, thresholds)
