"""Textual architecture-description language.

Grammar summary (keywords are contextual; any word is accepted where an
identifier is expected)::

    model       = { statement } ;
    statement   = process | application | datasource | "os" IDENT | "technology" IDENT ;
    process     = "process" IDENT [ "criticality" ("low"|"medium"|"high") ] "{" { process | activity } "}" ;
    activity    = "activity" IDENT "{" { "supported_by" idlist | "uses" reflist } "}" ;
    application = "application" IDENT "{" { "functionality" IDENT
                    | "quality" "{" { FACTOR ":" NUMBER } "}"
                    | "runs_on" idlist | "accesses" reflist } "}" ;
    datasource  = "datasource" IDENT "{" { entity } "}" ;
    entity      = "entity" IDENT "{" { "attribute" IDENT { qualifier } } "}" ;

``#`` starts a comment that runs to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal

from .model import (
    Criticality,
    Model,
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
    SourcePos,
    ordered_qualifiers,
    resolve,
)

TOP_LEVEL = frozenset({"process", "application", "datasource", "os", "technology"})
_QUALIFIERS = {q.value: q for q in Qualifier}
_FACTORS = {f.value: f for f in QualityFactor}
_CRITICALITIES = {c.value: c for c in Criticality}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n\f\v]+)
  | (?P<comment>\#[^\n]*)
  | (?P<word>[A-Za-z][A-Za-z0-9_]*)
  | (?P<number>[0-9][A-Za-z0-9_.]*)
  | (?P<punct>[{},:.])
    """,
    re.VERBOSE,
)
_NUMBER_RE = re.compile(r"[0-9]+(\.[0-9]+)?\Z")


@dataclass(frozen=True)
class Token:
    kind: str  # word, number, punct, error, eof
    text: str
    pos: SourcePos
    line_start: bool = False


@dataclass(frozen=True)
class ParseError:
    pos: SourcePos
    expected: str
    found: str

    @property
    def message(self) -> str:
        return f"expected {self.expected}, found {self.found}"

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.pos}: error E100_SYNTAX: {self.message}"


class DslSyntaxError(ValueError):
    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__(f"{len(errors)} syntax error(s); first at {errors[0].pos}: {errors[0].message}")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_offset = 1, 0
    i, n = 0, len(text)
    last_line = 0
    while i < n:
        m = _TOKEN_RE.match(text, i)
        if m is None:
            # run of characters that cannot start any token
            j = i + 1
            while j < n and _TOKEN_RE.match(text, j) is None:
                j += 1
            kind, value, end = "error", text[i:j], j
        else:
            kind, value, end = m.lastgroup, m.group(), m.end()
        if kind not in ("ws", "comment"):
            pos = SourcePos(line, i - line_offset + 1)
            tokens.append(Token(kind, value, pos, line != last_line))
            last_line = line
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_offset = i + value.rindex("\n") + 1
        i = end
    tokens.append(Token("eof", "", SourcePos(line, n - line_offset + 1), line != last_line))
    return tokens


class _Bail(Exception):
    pass


def _describe(tok: Token) -> str:
    if tok.kind == "eof":
        return "end of input"
    return repr(tok.text)


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.depth = 0
        self.errors: list[ParseError] = []

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, expected: str):
        self.errors.append(ParseError(self.tok.pos, expected, _describe(self.tok)))
        raise _Bail

    def at(self, text: str) -> bool:
        return self.tok.kind in ("word", "punct") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, text: str, expected: str | None = None) -> Token:
        if not self.at(text):
            self.fail(expected or repr(text))
        if text == "{":
            self.depth += 1
        elif text == "}":
            self.depth -= 1
        return self.advance()

    def ident(self, what: str = "identifier") -> RawName:
        if self.tok.kind != "word":
            self.fail(what)
        tok = self.advance()
        return RawName(tok.text, tok.pos)

    def ref(self) -> RawRef:
        first = self.ident("reference")
        parts = [first.name]
        if self.at("."):
            self.advance()
            parts.append(self.ident("identifier after '.'").name)
        return RawRef(tuple(parts), first.pos)

    def idlist(self) -> list[RawRef]:
        out = [RawRef((n.name,), n.pos) for n in [self.ident()]]
        while self.at(","):
            self.advance()
            n = self.ident()
            out.append(RawRef((n.name,), n.pos))
        return out

    def reflist(self) -> list[RawRef]:
        out = [self.ref()]
        while self.at(","):
            self.advance()
            out.append(self.ref())
        return out

    # -- statements --------------------------------------------------------

    def model(self) -> RawModel:
        raw = RawModel()
        while self.tok.kind != "eof":
            start = self.i
            self.depth = 0
            try:
                self.statement(raw)
            except _Bail:
                self.synchronize(start)
        return raw

    def synchronize(self, start: int) -> None:
        if self.i == start:
            self.advance()
        while self.tok.kind != "eof":
            tok = self.tok
            if tok.kind == "word" and tok.text in TOP_LEVEL and (self.depth <= 0 or tok.line_start):
                return
            if tok.kind == "punct" and tok.text == "{":
                self.depth += 1
            elif tok.kind == "punct" and tok.text == "}":
                self.depth -= 1
            self.advance()

    def statement(self, raw: RawModel) -> None:
        tok = self.tok
        word = tok.text if tok.kind == "word" else None
        if word == "process":
            raw.processes.append(self.process())
        elif word == "application":
            raw.applications.append(self.application())
        elif word == "datasource":
            raw.data_sources.append(self.datasource())
        elif word == "os":
            self.advance()
            raw.operating_systems.append(self.ident("operating system name"))
        elif word == "technology":
            self.advance()
            raw.technologies.append(self.ident("technology name"))
        else:
            self.fail("top-level statement (process, application, datasource, os, technology)")

    def process(self) -> RawProcess:
        self.advance()
        name = self.ident("process name")
        proc = RawProcess(name.name, name.pos)
        if self.at("criticality"):
            self.advance()
            if self.tok.kind != "word" or self.tok.text not in _CRITICALITIES:
                self.fail("criticality level (low, medium, high)")
            proc.criticality = _CRITICALITIES[self.advance().text]
        self.expect("{")
        while not self.at("}"):
            if self.at("process"):
                proc.children.append(self.process())
            elif self.at("activity"):
                proc.children.append(self.activity())
            else:
                self.fail("'process', 'activity' or '}'")
        self.expect("}")
        return proc

    def activity(self) -> RawActivity:
        self.advance()
        name = self.ident("activity name")
        act = RawActivity(name.name, name.pos)
        self.expect("{")
        while not self.at("}"):
            if self.at("supported_by"):
                self.advance()
                act.supported_by.extend(self.idlist())
            elif self.at("uses"):
                self.advance()
                act.uses.extend(self.reflist())
            else:
                self.fail("'supported_by', 'uses' or '}'")
        self.expect("}")
        return act

    def application(self) -> RawApplication:
        self.advance()
        name = self.ident("application name")
        app = RawApplication(name.name, name.pos)
        self.expect("{")
        while not self.at("}"):
            if self.at("functionality"):
                self.advance()
                app.functionalities.append(self.ident("functionality name"))
            elif self.at("quality"):
                self.advance()
                self.quality(app)
            elif self.at("runs_on"):
                self.advance()
                app.runs_on.extend(self.idlist())
            elif self.at("accesses"):
                self.advance()
                app.accesses.extend(self.reflist())
            else:
                self.fail("'functionality', 'quality', 'runs_on', 'accesses' or '}'")
        self.expect("}")
        return app

    def quality(self, app: RawApplication) -> None:
        self.expect("{")
        while not self.at("}"):
            tok = self.tok
            if tok.kind != "word" or tok.text not in _FACTORS:
                self.fail("quality factor name or '}'")
            self.advance()
            self.expect(":")
            num = self.tok
            if num.kind != "number" or not _NUMBER_RE.match(num.text):
                self.fail("quality score (decimal number)")
            self.advance()
            app.quality.append(RawQuality(_FACTORS[tok.text], float(num.text), tok.pos))
        self.expect("}")

    def datasource(self) -> RawDataSource:
        self.advance()
        name = self.ident("data source name")
        ds = RawDataSource(name.name, name.pos)
        self.expect("{")
        while not self.at("}"):
            if not self.at("entity"):
                self.fail("'entity' or '}'")
            ds.entities.append(self.entity())
        self.expect("}")
        return ds

    def entity(self) -> RawEntity:
        self.advance()
        name = self.ident("entity name")
        ent = RawEntity(name.name, name.pos)
        self.expect("{")
        while not self.at("}"):
            if not self.at("attribute"):
                self.fail("'attribute' or '}'")
            self.advance()
            attr_name = self.ident("attribute name")
            attr = RawAttribute(attr_name.name, attr_name.pos)
            while self.tok.kind == "word" and self.tok.text in _QUALIFIERS:
                q = _QUALIFIERS[self.advance().text]
                if q not in attr.qualifiers:
                    attr.qualifiers.append(q)
            ent.attributes.append(attr)
        self.expect("}")
        return ent


def parse_with_errors(text: str) -> tuple[RawModel | None, list[ParseError]]:
    """Parse ``text``; recovers at statement boundaries to report every error."""
    parser = _Parser(text)
    raw = parser.model()
    if parser.errors:
        return None, parser.errors
    return raw, []


def parse(text: str) -> RawModel:
    raw, errors = parse_with_errors(text)
    if raw is None:
        raise DslSyntaxError(errors)
    return raw


def load(text: str) -> Model:
    """Parse and resolve in one step; raises on syntax or validation errors."""
    return resolve(parse(text))


# ---------------------------------------------------------------------------
# Canonical formatting


def format_score(score: float) -> str:
    text = format(Decimal(repr(float(score))), "f")
    return text if "." in text else text + ".0"


def _refs(refs) -> str:
    return ", ".join(ref.dotted for ref in refs)


def _format_process(proc: Process, indent: str, out: list[str]) -> None:
    header = f"{indent}process {proc.id}"
    if proc.criticality is not Criticality.MEDIUM:
        header += f" criticality {proc.criticality.value}"
    out.append(header + " {")
    inner = indent + "  "
    for child in proc.children:
        if isinstance(child, Process):
            _format_process(child, inner, out)
            continue
        body = []
        if child.supported_by:
            body.append(f"supported_by {_refs(child.supported_by)}")
        if child.uses:
            body.append(f"uses {_refs(child.uses)}")
        _block(out, inner, f"activity {child.id}", body)
    out.append(indent + "}")


def _block(out: list[str], indent: str, header: str, body: list[str]) -> None:
    if not body:
        out.append(f"{indent}{header} {{ }}")
        return
    out.append(f"{indent}{header} {{")
    out.extend(f"{indent}  {line}" for line in body)
    out.append(f"{indent}}}")


def format_model(model: Model) -> str:
    """Canonical DSL rendering: two-space indent, one declaration per line."""
    out: list[str] = []
    for proc in model.processes:
        _format_process(proc, "", out)
    for app in model.applications:
        body = [f"functionality {fn}" for fn in app.functionalities]
        if app.quality:
            body.append("quality {")
            body.extend(f"  {f.value}: {format_score(s)}" for f, s in app.quality)
            body.append("}")
        if app.runs_on:
            body.append(f"runs_on {_refs(app.runs_on)}")
        if app.accesses:
            body.append(f"accesses {_refs(app.accesses)}")
        _block(out, "", f"application {app.id}", body)
    for ds in model.data_sources:
        body = []
        for ent in ds.entities:
            attrs = []
            for attr in ent.attributes:
                quals = "".join(" " + q.value for q in ordered_qualifiers(attr.qualifiers))
                attrs.append(f"attribute {attr.id}{quals}")
            _block(body, "", f"entity {ent.id}", attrs)
        _block(out, "", f"datasource {ds.id}", body)
    out.extend(f"os {o.id}" for o in model.operating_systems)
    out.extend(f"technology {t.id}" for t in model.technologies)
    return "".join(line + "\n" for line in out)
