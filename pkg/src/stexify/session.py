"""Disambiguation sessions.

A session pins one document: every math span is parsed up front, candidate
readings are deduplicated by AST (the human chooses between meanings, not
derivations), and selections accumulate until export writes the rewritten
copy.  State autosaves to a JSON file after every mutation so a killed
process resumes exactly where it stopped.
"""

from __future__ import annotations

import enum
import json
import os
import time
import uuid
from dataclasses import dataclass, field, replace

from .astbuild import ActionTable, Ast, ast_from_json, ast_to_json, build_ast
from .emitter import DEFAULT_CONFIG, DobracketsStyle, EmitterConfig, emit
from .errors import (
    BadIndexError,
    DocumentChangedError,
    InvalidStatusError,
    PendingAmbiguitiesError,
    TooManyParsesError,
    UnknownFormulaError,
)
from .glr import DEFAULT_ENUM_CAP, enumerate_trees, parse
from .grammar import Grammar
from .lexing import DEFAULT_REGISTRY, RecognizerRegistry
from .tables import CompiledGrammar, compile_grammar
from .texdoc import (
    DEFAULT_MATH_ENVIRONMENTS,
    FormulaSpan,
    MathKind,
    RewritePlan,
    default_output_path,
    extract_formulas,
    module_comment_block,
    rewrite,
)

SCHEMA_VERSION = 1


class Status(str, enum.Enum):
    UNPARSED = "unparsed"
    UNAMBIGUOUS = "unambiguous"
    AMBIGUOUS = "ambiguous"
    RESOLVED = "resolved"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class Candidate:
    ast: Ast
    preview: str


@dataclass
class FormulaEntry:
    formula: FormulaSpan
    status: Status
    candidates: list[Candidate] = field(default_factory=list)
    choice: int | None = None
    reason: str | None = None

    def chosen(self) -> Candidate | None:
        if self.status is Status.UNAMBIGUOUS:
            return self.candidates[0]
        if self.status is Status.RESOLVED:
            return self.candidates[self.choice]
        return None


@dataclass(frozen=True)
class SessionConfig:
    enum_cap: int = DEFAULT_ENUM_CAP
    emitter: EmitterConfig = DEFAULT_CONFIG
    math_environments: tuple[str, ...] = DEFAULT_MATH_ENVIRONMENTS
    session_path: str | None = None  # default <document>.stexify-session.json
    autosave: bool = True


def analyze_formula(
    text: str,
    compiled: CompiledGrammar,
    actions: ActionTable,
    registry: RecognizerRegistry = DEFAULT_REGISTRY,
    cap: int = DEFAULT_ENUM_CAP,
    emitter: EmitterConfig = DEFAULT_CONFIG,
) -> tuple[Status, list[Candidate], str | None]:
    """Parse one formula and distill its candidate readings (deduplicated by
    AST).  Returns (status, candidates, failure reason)."""
    forest = parse(compiled, text, registry)
    if forest.root is None:
        return Status.UNPARSED, [], str(forest.failure)
    try:
        trees = enumerate_trees(forest, cap)
    except TooManyParsesError as exc:
        bound = "" if exc.exact else "at least "
        return Status.UNPARSED, [], (
            f"{bound}{exc.count} candidate parses exceed the session cap ({cap})"
        )
    seen: dict[Ast, None] = {}
    for tree in trees:
        seen.setdefault(build_ast(tree, actions))
    candidates = [Candidate(ast, emit(ast, emitter)) for ast in seen]
    status = Status.UNAMBIGUOUS if len(candidates) == 1 else Status.AMBIGUOUS
    return status, candidates, None


class Session:
    def __init__(
        self,
        session_id: str,
        document_path: str,
        document_mtime_ns: int,
        grammar_name: str,
        modules: tuple[str, ...],
        entries: list[FormulaEntry],
        config: SessionConfig,
        created: float | None = None,
    ):
        self.id = session_id
        self.document_path = document_path
        self.document_mtime_ns = document_mtime_ns
        self.grammar_name = grammar_name
        self.modules = modules
        self.entries = entries
        self.config = config
        self.created = created if created is not None else time.time()
        self.modified = self.created

    # -- construction --

    @classmethod
    def create(
        cls,
        document_path: str,
        grammar: Grammar,
        actions: ActionTable,
        registry: RecognizerRegistry = DEFAULT_REGISTRY,
        config: SessionConfig = SessionConfig(),
    ) -> "Session":
        with open(document_path, "r", encoding="utf-8") as fh:
            document = fh.read()
        compiled = compile_grammar(grammar)
        entries = []
        for span in extract_formulas(document, config.math_environments):
            status, candidates, reason = analyze_formula(
                span.raw, compiled, actions, registry,
                cap=config.enum_cap, emitter=config.emitter,
            )
            entries.append(FormulaEntry(span, status, candidates, None, reason))
        session = cls(
            session_id=uuid.uuid4().hex[:12],
            document_path=os.path.abspath(document_path),
            document_mtime_ns=os.stat(document_path).st_mtime_ns,
            grammar_name=grammar.name,
            modules=grammar.modules,
            entries=entries,
            config=config,
        )
        session.save()
        return session

    # -- queries --

    def entry(self, formula_id: int) -> FormulaEntry:
        for e in self.entries:
            if e.formula.id == formula_id:
                return e
        raise UnknownFormulaError(f"no formula with id {formula_id}")

    def pending(self) -> list[int]:
        return [e.formula.id for e in self.entries if e.status is Status.AMBIGUOUS]

    def counts(self) -> dict[str, int]:
        out = {status.value: 0 for status in Status}
        for e in self.entries:
            out[e.status.value] += 1
        return out

    # -- mutations --

    def select(self, formula_id: int, index: int) -> FormulaEntry:
        entry = self.entry(formula_id)
        if entry.status not in (Status.AMBIGUOUS, Status.RESOLVED):
            raise InvalidStatusError(
                f"formula {formula_id} is {entry.status.value}; nothing to select"
            )
        if not 0 <= index < len(entry.candidates):
            raise BadIndexError(
                f"candidate index {index} out of range "
                f"(formula {formula_id} has {len(entry.candidates)})"
            )
        entry.status = Status.RESOLVED
        entry.choice = index
        self.touch()
        return entry

    def skip(self, formula_id: int) -> FormulaEntry:
        entry = self.entry(formula_id)
        if entry.status is Status.UNPARSED:
            raise InvalidStatusError(
                f"formula {formula_id} never parsed; it stays untouched anyway"
            )
        entry.status = Status.SKIPPED
        entry.choice = None
        self.touch()
        return entry

    def export(
        self,
        dobrackets_style: DobracketsStyle | None = None,
        output_path: str | None = None,
    ) -> str:
        pending = self.pending()
        if pending:
            raise PendingAmbiguitiesError(pending)
        if os.stat(self.document_path).st_mtime_ns != self.document_mtime_ns:
            raise DocumentChangedError(
                f"{self.document_path} changed since the session was created"
            )
        emitter = self.config.emitter
        if dobrackets_style is not None:
            emitter = replace(emitter, dobrackets_style=dobrackets_style)
        plan = RewritePlan(source_path=self.document_path)
        for e in self.entries:
            candidate = e.chosen()
            if candidate is not None:
                plan.replacements[e.formula.id] = emit(candidate.ast, emitter)
        with open(self.document_path, "r", encoding="utf-8") as fh:
            document = fh.read()
        output = rewrite(document, [e.formula for e in self.entries], plan)
        if self.modules and plan.replacements:
            output = module_comment_block(self.modules) + output
        path = output_path or default_output_path(self.document_path)
        _atomic_write(path, output)
        self.touch()
        return path

    # -- persistence --

    @property
    def session_path(self) -> str | None:
        if not self.config.autosave:
            return None
        return self.config.session_path or self.document_path + ".stexify-session.json"

    def touch(self) -> None:
        self.modified = time.time()
        self.save()

    def save(self) -> None:
        path = self.session_path
        if path is None:
            return
        _atomic_write(path, json.dumps(self.to_json(), indent=1, sort_keys=True))

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "id": self.id,
            "document_path": self.document_path,
            "document_mtime_ns": self.document_mtime_ns,
            "grammar_name": self.grammar_name,
            "modules": list(self.modules),
            "created": self.created,
            "modified": self.modified,
            "emitter": {
                "flexary_separator": self.config.emitter.flexary_separator,
                "dobrackets_style": self.config.emitter.dobrackets_style.value,
                "macro_prefix": self.config.emitter.macro_prefix,
            },
            "entries": [
                {
                    "formula": {
                        "id": e.formula.id,
                        "kind": e.formula.kind.value,
                        "outer": list(e.formula.outer),
                        "inner": list(e.formula.inner),
                        "raw": e.formula.raw,
                        "environment": e.formula.environment,
                    },
                    "status": e.status.value,
                    "choice": e.choice,
                    "reason": e.reason,
                    "candidates": [
                        {"ast": ast_to_json(c.ast), "preview": c.preview}
                        for c in e.candidates
                    ],
                }
                for e in self.entries
            ],
        }

    @classmethod
    def from_json(cls, data: dict, config: SessionConfig | None = None) -> "Session":
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported session schema {data.get('schema')!r}")
        emitter = EmitterConfig(
            flexary_separator=data["emitter"]["flexary_separator"],
            dobrackets_style=DobracketsStyle(data["emitter"]["dobrackets_style"]),
            macro_prefix=data["emitter"]["macro_prefix"],
        )
        config = replace(config or SessionConfig(), emitter=emitter)
        entries = []
        for raw in data["entries"]:
            f = raw["formula"]
            span = FormulaSpan(
                id=f["id"],
                kind=MathKind(f["kind"]),
                outer=tuple(f["outer"]),
                inner=tuple(f["inner"]),
                raw=f["raw"],
                environment=f.get("environment"),
            )
            entries.append(FormulaEntry(
                formula=span,
                status=Status(raw["status"]),
                candidates=[
                    Candidate(ast_from_json(c["ast"]), c["preview"])
                    for c in raw["candidates"]
                ],
                choice=raw.get("choice"),
                reason=raw.get("reason"),
            ))
        session = cls(
            session_id=data["id"],
            document_path=data["document_path"],
            document_mtime_ns=data["document_mtime_ns"],
            grammar_name=data["grammar_name"],
            modules=tuple(data.get("modules", ())),
            entries=entries,
            config=config,
            created=data["created"],
        )
        session.modified = data["modified"]
        return session

    @classmethod
    def load(cls, path: str, config: SessionConfig | None = None) -> "Session":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        session = cls.from_json(data, config)
        if session.session_path is None or os.path.abspath(
            session.session_path
        ) != os.path.abspath(path):
            session.config = replace(session.config, session_path=path)
        return session


def _atomic_write(path: str, content: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(content)
    os.replace(tmp, path)
