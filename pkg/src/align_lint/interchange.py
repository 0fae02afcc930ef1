"""JSON interchange for models.

The document is a sorted-key JSON object holding the five top-level
collections plus ``schema_version``.  References are written as dotted
paths (``DataSource.Entity``) so the reader can feed them back through the
same resolver the DSL uses.
"""
from __future__ import annotations

import json
from typing import TYPE_CHECKING, Any

from .model import (
    Criticality,
    Process,
    QualityFactor,
    Qualifier,
    RawActivity,
    RawApplication,
    RawAttribute,
    RawDataSource,
    RawEntity,
    RawModel,
    RawName,
    RawProcess,
    RawQuality,
    RawRef,
    Severity,
    ValidationIssue,
    check,
    ordered_qualifiers,
)

if TYPE_CHECKING:
    from .model import Model

SCHEMA_VERSION = 1


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _refs(refs) -> list[str]:
    return [ref.dotted for ref in refs]


def _process_doc(proc: Process) -> dict:
    children = []
    for child in proc.children:
        if isinstance(child, Process):
            children.append(_process_doc(child))
        else:
            children.append({
                "kind": "activity",
                "id": child.id,
                "supported_by": _refs(child.supported_by),
                "uses": _refs(child.uses),
            })
    return {
        "kind": "process",
        "id": proc.id,
        "criticality": proc.criticality.value,
        "children": children,
    }


def model_to_doc(model: Model) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "processes": [_process_doc(p) for p in model.processes],
        "applications": [
            {
                "id": app.id,
                "functionalities": list(app.functionalities),
                "quality": {f.value: s for f, s in app.quality},
                "runs_on": _refs(app.runs_on),
                "accesses": _refs(app.accesses),
            }
            for app in model.applications
        ],
        "data_sources": [
            {
                "id": ds.id,
                "entities": [
                    {
                        "id": ent.id,
                        "attributes": [
                            {
                                "id": attr.id,
                                "qualifiers": [q.value for q in ordered_qualifiers(attr.qualifiers)],
                            }
                            for attr in ent.attributes
                        ],
                    }
                    for ent in ds.entities
                ],
            }
            for ds in model.data_sources
        ],
        "operating_systems": [{"id": o.id} for o in model.operating_systems],
        "technologies": [{"id": t.id} for t in model.technologies],
    }


def to_interchange(model: Model) -> str:
    return dumps(model_to_doc(model))


class MalformedDocument(ValueError):
    pass


def _expect(cond: bool, what: str) -> None:
    if not cond:
        raise MalformedDocument(what)


def _str(obj: dict, key: str, where: str) -> str:
    value = obj.get(key)
    _expect(isinstance(value, str), f"{where}: {key!r} must be a string")
    return value


def _list(obj: dict, key: str, where: str) -> list:
    value = obj.get(key, [])
    _expect(isinstance(value, list), f"{where}: {key!r} must be an array")
    return value


def _obj(value: Any, where: str) -> dict:
    _expect(isinstance(value, dict), f"{where} must be an object")
    return value


def _raw_refs(obj: dict, key: str, where: str) -> list[RawRef]:
    out = []
    for text in _list(obj, key, where):
        _expect(isinstance(text, str) and text != "", f"{where}: {key!r} entries must be non-empty strings")
        out.append(RawRef(tuple(text.split("."))))
    return out


def _enum(cls, value: Any, where: str):
    try:
        return cls(value)
    except ValueError:
        raise MalformedDocument(f"{where}: unknown {cls.__name__} {value!r}") from None


def _raw_process(obj: Any, where: str) -> RawProcess:
    obj = _obj(obj, where)
    name = _str(obj, "id", where)
    proc = RawProcess(name, criticality=_enum(Criticality, obj.get("criticality", "medium"), where))
    for i, child in enumerate(_list(obj, "children", where)):
        cwhere = f"{where}.children[{i}]"
        child = _obj(child, cwhere)
        kind = child.get("kind")
        if kind == "process":
            proc.children.append(_raw_process(child, cwhere))
        elif kind == "activity":
            proc.children.append(RawActivity(
                _str(child, "id", cwhere),
                supported_by=_raw_refs(child, "supported_by", cwhere),
                uses=_raw_refs(child, "uses", cwhere),
            ))
        else:
            raise MalformedDocument(f"{cwhere}: kind must be 'process' or 'activity'")
    return proc


def doc_to_raw(doc: Any) -> RawModel:
    doc = _obj(doc, "document")
    version = doc.get("schema_version", SCHEMA_VERSION)
    _expect(version == SCHEMA_VERSION, f"unsupported schema_version {version!r}")
    raw = RawModel()
    for i, p in enumerate(_list(doc, "processes", "document")):
        raw.processes.append(_raw_process(p, f"processes[{i}]"))
    for i, a in enumerate(_list(doc, "applications", "document")):
        where = f"applications[{i}]"
        a = _obj(a, where)
        app = RawApplication(_str(a, "id", where))
        for fn in _list(a, "functionalities", where):
            _expect(isinstance(fn, str), f"{where}: functionalities must be strings")
            app.functionalities.append(RawName(fn))
        quality = _obj(a.get("quality", {}), f"{where}.quality")
        for factor, score in quality.items():
            _expect(
                isinstance(score, (int, float)) and not isinstance(score, bool),
                f"{where}: quality {factor!r} must be a number",
            )
            app.quality.append(RawQuality(_enum(QualityFactor, factor, where), float(score)))
        app.runs_on = _raw_refs(a, "runs_on", where)
        app.accesses = _raw_refs(a, "accesses", where)
        raw.applications.append(app)
    for i, d in enumerate(_list(doc, "data_sources", "document")):
        where = f"data_sources[{i}]"
        d = _obj(d, where)
        ds = RawDataSource(_str(d, "id", where))
        for j, e in enumerate(_list(d, "entities", where)):
            ewhere = f"{where}.entities[{j}]"
            e = _obj(e, ewhere)
            ent = RawEntity(_str(e, "id", ewhere))
            for k, at in enumerate(_list(e, "attributes", ewhere)):
                awhere = f"{ewhere}.attributes[{k}]"
                at = _obj(at, awhere)
                ent.attributes.append(RawAttribute(
                    _str(at, "id", awhere),
                    qualifiers=[_enum(Qualifier, q, awhere) for q in _list(at, "qualifiers", awhere)],
                ))
            ds.entities.append(ent)
        raw.data_sources.append(ds)
    for key, target in (("operating_systems", raw.operating_systems), ("technologies", raw.technologies)):
        for i, o in enumerate(_list(doc, key, "document")):
            target.append(RawName(_str(_obj(o, f"{key}[{i}]"), "id", f"{key}[{i}]")))
    return raw


def check_interchange(text: str) -> tuple[Model | None, list[ValidationIssue]]:
    """Read an interchange document, returning the model (or None) and all issues."""
    try:
        raw = doc_to_raw(json.loads(text))
    except json.JSONDecodeError as exc:
        return None, [ValidationIssue(
            Severity.ERROR, "E000_MALFORMED_DOCUMENT", f"not a JSON document: {exc.msg}",
        )]
    except MalformedDocument as exc:
        return None, [ValidationIssue(Severity.ERROR, "E000_MALFORMED_DOCUMENT", str(exc))]
    return check(raw)


def from_interchange(text: str) -> Model:
    from .model import ModelValidationError

    model, issues = check_interchange(text)
    if model is None:
        raise ModelValidationError(issues)
    return model
