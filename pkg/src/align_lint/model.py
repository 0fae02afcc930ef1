"""Four-layer architecture model: domain types, reference resolution, validation.

A :class:`RawModel` produced by the DSL parser (or by the interchange reader)
carries textual references.  :func:`check` resolves those references against
a single global id namespace and reports every problem it finds in one pass;
:func:`resolve` is the raising variant used by library callers.
"""
from __future__ import annotations

import enum
import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Union

ID_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class Kind(str, enum.Enum):
    PROCESS = "process"
    ACTIVITY = "activity"
    APPLICATION = "application"
    FUNCTIONALITY = "functionality"
    DATA_SOURCE = "data_source"
    INFORMATION_ENTITY = "information_entity"
    ATTRIBUTE = "attribute"
    OPERATING_SYSTEM = "operating_system"
    TECHNOLOGY = "technology"


class Criticality(str, enum.Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def weight(self) -> Fraction:
        return _CRITICALITY_WEIGHTS[self]


_CRITICALITY_WEIGHTS = {
    Criticality.LOW: Fraction(1, 3),
    Criticality.MEDIUM: Fraction(2, 3),
    Criticality.HIGH: Fraction(1),
}


class QualityFactor(str, enum.Enum):
    """McCall product quality factors."""

    CORRECTNESS = "correctness"
    RELIABILITY = "reliability"
    EFFICIENCY = "efficiency"
    INTEGRITY = "integrity"
    USABILITY = "usability"
    MAINTAINABILITY = "maintainability"
    TESTABILITY = "testability"
    FLEXIBILITY = "flexibility"
    PORTABILITY = "portability"
    REUSABILITY = "reusability"
    INTEROPERABILITY = "interoperability"


class Qualifier(str, enum.Enum):
    SECURE = "secure"
    CONFIDENTIAL = "confidential"
    REDUNDANT = "redundant"


def _enum_rank(member: enum.Enum) -> int:
    return list(type(member)).index(member)


# ---------------------------------------------------------------------------
# Source positions and issues


@dataclass(frozen=True, order=True)
class SourcePos:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True, order=True)
class ElementRef:
    """Containment path to an element, outermost id first."""

    kind: Kind
    path: tuple[str, ...]

    @property
    def id(self) -> str:
        return self.path[-1]

    @property
    def dotted(self) -> str:
        return ".".join(self.path)

    def __str__(self) -> str:
        return f"{self.kind.value} {self.dotted}"


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ValidationIssue:
    severity: Severity
    code: str
    message: str
    pos: SourcePos | None = None
    ref: ElementRef | None = None

    def format(self, filename: str = "<input>") -> str:
        where = f"{filename}:{self.pos}" if self.pos else filename
        return f"{where}: {self.severity.value} {self.code}: {self.message}"


class ModelValidationError(Exception):
    """Raised by :func:`resolve` when the raw model has error-level issues."""

    def __init__(self, issues: list[ValidationIssue]):
        self.issues = issues
        errors = [i for i in issues if i.severity is Severity.ERROR]
        super().__init__(f"{len(errors)} validation error(s); first: {errors[0].message}")


class ElementNotFound(LookupError):
    code = "NOT_FOUND"


# ---------------------------------------------------------------------------
# Resolved model


@dataclass(frozen=True)
class Activity:
    id: str
    supported_by: tuple[ElementRef, ...] = ()
    uses: tuple[ElementRef, ...] = ()


@dataclass(frozen=True)
class Process:
    id: str
    criticality: Criticality = Criticality.MEDIUM
    children: tuple[Union["Process", Activity], ...] = ()


@dataclass(frozen=True)
class Application:
    id: str
    functionalities: tuple[str, ...] = ()
    # sorted by factor declaration order in QualityFactor
    quality: tuple[tuple[QualityFactor, float], ...] = ()
    runs_on: tuple[ElementRef, ...] = ()
    accesses: tuple[ElementRef, ...] = ()

    def mean_quality(self) -> float | None:
        if not self.quality:
            return None
        return sum(score for _, score in self.quality) / len(self.quality)


@dataclass(frozen=True)
class Attribute:
    id: str
    qualifiers: frozenset[Qualifier] = frozenset()


@dataclass(frozen=True)
class InformationEntity:
    id: str
    attributes: tuple[Attribute, ...] = ()


@dataclass(frozen=True)
class DataSource:
    id: str
    entities: tuple[InformationEntity, ...] = ()


@dataclass(frozen=True)
class OperatingSystem:
    id: str


@dataclass(frozen=True)
class Technology:
    id: str


@dataclass(frozen=True)
class Functionality:
    """Functionalities carry no structure beyond their id."""

    id: str


Element = Union[
    Process, Activity, Application, Functionality, DataSource,
    InformationEntity, Attribute, OperatingSystem, Technology,
]


@dataclass(frozen=True)
class Model:
    processes: tuple[Process, ...] = ()
    applications: tuple[Application, ...] = ()
    data_sources: tuple[DataSource, ...] = ()
    operating_systems: tuple[OperatingSystem, ...] = ()
    technologies: tuple[Technology, ...] = ()
    fingerprint: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.fingerprint:
            from .interchange import to_interchange

            digest = hashlib.sha256(to_interchange(self).encode("utf-8")).hexdigest()
            object.__setattr__(self, "fingerprint", digest)

    @cached_property
    def index(self) -> dict[tuple[str, ...], tuple[Kind, Element]]:
        return {ref.path: (ref.kind, el) for ref, el in walk(self)}


def walk(model: Model) -> Iterator[tuple[ElementRef, Element]]:
    """Yield every element with its reference, in declaration order."""

    def walk_process(proc: Process, prefix: tuple[str, ...]):
        path = prefix + (proc.id,)
        yield ElementRef(Kind.PROCESS, path), proc
        for child in proc.children:
            if isinstance(child, Process):
                yield from walk_process(child, path)
            else:
                yield ElementRef(Kind.ACTIVITY, path + (child.id,)), child

    for proc in model.processes:
        yield from walk_process(proc, ())
    for app in model.applications:
        yield ElementRef(Kind.APPLICATION, (app.id,)), app
        for fn in app.functionalities:
            yield ElementRef(Kind.FUNCTIONALITY, (app.id, fn)), Functionality(fn)
    for ds in model.data_sources:
        yield ElementRef(Kind.DATA_SOURCE, (ds.id,)), ds
        for ent in ds.entities:
            yield ElementRef(Kind.INFORMATION_ENTITY, (ds.id, ent.id)), ent
            for attr in ent.attributes:
                yield ElementRef(Kind.ATTRIBUTE, (ds.id, ent.id, attr.id)), attr
    for os_ in model.operating_systems:
        yield ElementRef(Kind.OPERATING_SYSTEM, (os_.id,)), os_
    for tech in model.technologies:
        yield ElementRef(Kind.TECHNOLOGY, (tech.id,)), tech


def leaf_activities(model: Model) -> list[tuple[ElementRef, Activity]]:
    """Every activity reachable through process nesting, depth-first.

    Each activity is paired with the ref of its innermost owning process.
    """
    out: list[tuple[ElementRef, Activity]] = []

    def visit(proc: Process, prefix: tuple[str, ...]) -> None:
        path = prefix + (proc.id,)
        for child in proc.children:
            if isinstance(child, Process):
                visit(child, path)
            else:
                out.append((ElementRef(Kind.PROCESS, path), child))

    for proc in model.processes:
        visit(proc, ())
    return out


def lookup(model: Model, ref: ElementRef) -> Element:
    found = model.index.get(tuple(ref.path))
    if not ref.path or found is None or found[0] is not ref.kind:
        raise ElementNotFound(f"no {ref.kind.value} at path {'.'.join(ref.path) or '<empty>'}")
    return found[1]


# ---------------------------------------------------------------------------
# Raw model (parser output; unresolved)


@dataclass
class RawRef:
    parts: tuple[str, ...]
    pos: SourcePos | None = None

    @property
    def text(self) -> str:
        return ".".join(self.parts)


@dataclass
class RawActivity:
    name: str
    pos: SourcePos | None = None
    supported_by: list[RawRef] = field(default_factory=list)
    uses: list[RawRef] = field(default_factory=list)


@dataclass
class RawProcess:
    name: str
    pos: SourcePos | None = None
    criticality: Criticality = Criticality.MEDIUM
    children: list["RawProcess | RawActivity"] = field(default_factory=list)


@dataclass
class RawQuality:
    factor: QualityFactor
    score: float
    pos: SourcePos | None = None


@dataclass
class RawName:
    name: str
    pos: SourcePos | None = None


@dataclass
class RawApplication:
    name: str
    pos: SourcePos | None = None
    functionalities: list[RawName] = field(default_factory=list)
    quality: list[RawQuality] = field(default_factory=list)
    runs_on: list[RawRef] = field(default_factory=list)
    accesses: list[RawRef] = field(default_factory=list)


@dataclass
class RawAttribute:
    name: str
    pos: SourcePos | None = None
    qualifiers: list[Qualifier] = field(default_factory=list)


@dataclass
class RawEntity:
    name: str
    pos: SourcePos | None = None
    attributes: list[RawAttribute] = field(default_factory=list)


@dataclass
class RawDataSource:
    name: str
    pos: SourcePos | None = None
    entities: list[RawEntity] = field(default_factory=list)


@dataclass
class RawModel:
    processes: list[RawProcess] = field(default_factory=list)
    applications: list[RawApplication] = field(default_factory=list)
    data_sources: list[RawDataSource] = field(default_factory=list)
    operating_systems: list[RawName] = field(default_factory=list)
    technologies: list[RawName] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Resolution


class _Resolver:
    def __init__(self, raw: RawModel):
        self.raw = raw
        self.issues: list[ValidationIssue] = []
        self.ids: dict[str, ElementRef] = {}

    def issue(self, code, message, pos=None, ref=None, severity=Severity.ERROR):
        self.issues.append(ValidationIssue(severity, code, message, pos, ref))

    def declare(self, kind: Kind, path: tuple[str, ...], pos: SourcePos | None) -> None:
        ref = ElementRef(kind, path)
        name = path[-1]
        if not ID_PATTERN.match(name):
            self.issue("E005_BAD_ID", f"invalid element id {name!r}", pos, ref)
        if name in self.ids:
            first = self.ids[name]
            self.issue(
                "E002_DUPLICATE_ID",
                f"id {name!r} already declared as {first}",
                pos, ref,
            )
            return
        self.ids[name] = ref

    # Pass 1: collect declarations
    def collect(self) -> None:
        def proc(p: RawProcess, prefix):
            path = prefix + (p.name,)
            self.declare(Kind.PROCESS, path, p.pos)
            for child in p.children:
                if isinstance(child, RawProcess):
                    proc(child, path)
                else:
                    self.declare(Kind.ACTIVITY, path + (child.name,), child.pos)

        for p in self.raw.processes:
            proc(p, ())
        for app in self.raw.applications:
            self.declare(Kind.APPLICATION, (app.name,), app.pos)
            for fn in app.functionalities:
                self.declare(Kind.FUNCTIONALITY, (app.name, fn.name), fn.pos)
        for ds in self.raw.data_sources:
            self.declare(Kind.DATA_SOURCE, (ds.name,), ds.pos)
            for ent in ds.entities:
                self.declare(Kind.INFORMATION_ENTITY, (ds.name, ent.name), ent.pos)
                for attr in ent.attributes:
                    self.declare(Kind.ATTRIBUTE, (ds.name, ent.name, attr.name), attr.pos)
        for os_ in self.raw.operating_systems:
            self.declare(Kind.OPERATING_SYSTEM, (os_.name,), os_.pos)
        for tech in self.raw.technologies:
            self.declare(Kind.TECHNOLOGY, (tech.name,), tech.pos)

    def ref(self, raw: RawRef, allowed: tuple[Kind, ...], owner: ElementRef, link: str):
        target = self.ids.get(raw.parts[-1])
        if target is None or (len(raw.parts) > 1 and target.path != raw.parts):
            self.issue(
                "E001_DANGLING_REF",
                f"{owner.dotted} {link} unknown element {raw.text!r}",
                raw.pos, owner,
            )
            return None
        if target.kind not in allowed:
            wanted = " or ".join(k.value for k in allowed)
            self.issue(
                "E003_KIND_MISMATCH",
                f"{owner.dotted} {link} {raw.text!r} is a {target.kind.value}, expected {wanted}",
                raw.pos, owner,
            )
            return None
        return target

    def refs(self, raws, allowed, owner, link) -> tuple[ElementRef, ...]:
        out: list[ElementRef] = []
        for raw in raws:
            target = self.ref(raw, allowed, owner, link)
            if target is None:
                continue
            if target in out:
                self.issue(
                    "W002_DUPLICATE_REF",
                    f"{owner.dotted} {link} lists {raw.text!r} more than once",
                    raw.pos, owner, Severity.WARNING,
                )
                continue
            out.append(target)
        return tuple(out)

    # Pass 2: build
    def build(self) -> Model:
        def proc(p: RawProcess, prefix) -> Process:
            path = prefix + (p.name,)
            if not p.children:
                self.issue(
                    "W001_EMPTY_PROCESS",
                    f"process {'.'.join(path)} has no activities",
                    p.pos, ElementRef(Kind.PROCESS, path), Severity.WARNING,
                )
            children: list[Process | Activity] = []
            for child in p.children:
                if isinstance(child, RawProcess):
                    children.append(proc(child, path))
                    continue
                owner = ElementRef(Kind.ACTIVITY, path + (child.name,))
                children.append(Activity(
                    child.name,
                    self.refs(child.supported_by, (Kind.APPLICATION,), owner, "supported_by"),
                    self.refs(child.uses, (Kind.INFORMATION_ENTITY,), owner, "uses"),
                ))
            return Process(p.name, p.criticality, tuple(children))

        processes = tuple(proc(p, ()) for p in self.raw.processes)

        applications = []
        for app in self.raw.applications:
            owner = ElementRef(Kind.APPLICATION, (app.name,))
            quality: dict[QualityFactor, float] = {}
            for q in app.quality:
                if not 0.0 <= q.score <= 1.0:
                    self.issue(
                        "E004_QUALITY_RANGE",
                        f"{app.name} quality {q.factor.value} = {q.score} outside [0, 1]",
                        q.pos, owner,
                    )
                if q.factor in quality:
                    self.issue(
                        "W003_DUPLICATE_FACTOR",
                        f"{app.name} declares quality {q.factor.value} more than once; last wins",
                        q.pos, owner, Severity.WARNING,
                    )
                quality[q.factor] = q.score
            applications.append(Application(
                app.name,
                tuple(fn.name for fn in app.functionalities),
                tuple(sorted(quality.items(), key=lambda kv: _enum_rank(kv[0]))),
                self.refs(app.runs_on, (Kind.OPERATING_SYSTEM, Kind.TECHNOLOGY), owner, "runs_on"),
                self.refs(app.accesses, (Kind.INFORMATION_ENTITY,), owner, "accesses"),
            ))

        data_sources = tuple(
            DataSource(ds.name, tuple(
                InformationEntity(ent.name, tuple(
                    Attribute(attr.name, frozenset(attr.qualifiers))
                    for attr in ent.attributes
                ))
                for ent in ds.entities
            ))
            for ds in self.raw.data_sources
        )
        return Model(
            processes,
            tuple(applications),
            data_sources,
            tuple(OperatingSystem(o.name) for o in self.raw.operating_systems),
            tuple(Technology(t.name) for t in self.raw.technologies),
        )


def check(raw: RawModel) -> tuple[Model | None, list[ValidationIssue]]:
    """Resolve ``raw`` and collect every issue.

    The model is ``None`` when any error-severity issue was found; warnings
    never block construction.
    """
    resolver = _Resolver(raw)
    resolver.collect()
    model = resolver.build()
    issues = resolver.issues
    if any(i.severity is Severity.ERROR for i in issues):
        return None, issues
    return model, issues


def resolve(raw: RawModel) -> Model:
    model, issues = check(raw)
    if model is None:
        raise ModelValidationError(issues)
    return model


def ordered_qualifiers(qualifiers) -> list[Qualifier]:
    return sorted(qualifiers, key=_enum_rank)
