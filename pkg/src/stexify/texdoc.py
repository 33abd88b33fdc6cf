"""Math-mode extraction from LaTeX sources and span-precise rewriting.

The scanner walks the document once, honouring ``\\%``/``\\$`` escapes,
line comments, and verbatim-like environments; it is deliberately not a
full TeX front end.  Rewriting replaces only the *inner* spans of selected
formulas, so delimiters and every byte outside them survive unchanged.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .errors import UnterminatedMathError

DEFAULT_MATH_ENVIRONMENTS = ("equation", "equation*", "align", "align*")
VERBATIM_ENVIRONMENTS = ("verbatim", "verbatim*", "minted", "lstlisting")

_BEGIN_RE = re.compile(r"\\begin\{([A-Za-z*]+)\}")


class MathKind(enum.Enum):
    INLINE = "inline"
    DISPLAY = "display"
    ENVIRONMENT = "environment"


@dataclass(frozen=True)
class FormulaSpan:
    id: int
    kind: MathKind
    outer: tuple[int, int]  # includes delimiters
    inner: tuple[int, int]  # math content only
    raw: str
    environment: str | None = None


@dataclass
class RewritePlan:
    source_path: str | None = None
    replacements: dict[int, str] = field(default_factory=dict)


def extract_formulas(
    document: str,
    math_environments: tuple[str, ...] = DEFAULT_MATH_ENVIRONMENTS,
) -> list[FormulaSpan]:
    """All math-mode spans in document order: ``$...$``, ``$$...$$``,
    ``\\[...\\]`` and the configured environments.  Comments and
    verbatim-like environments are skipped."""
    spans: list[FormulaSpan] = []
    i = 0
    n = len(document)

    def add(kind, outer, inner, env=None):
        spans.append(FormulaSpan(
            id=len(spans), kind=kind, outer=outer, inner=inner,
            raw=document[inner[0]:inner[1]], environment=env,
        ))

    while i < n:
        c = document[i]
        if c == "\\":
            m = _BEGIN_RE.match(document, i)
            if m:
                env = m.group(1)
                closer = f"\\end{{{env}}}"
                if env in VERBATIM_ENVIRONMENTS:
                    # verbatim swallows everything up to its literal closer
                    end = document.find(closer, m.end())
                    i = n if end < 0 else end + len(closer)
                    continue
                if env in math_environments:
                    end = _scan_env_close(document, m.end(), env)
                    add(MathKind.ENVIRONMENT, (i, end + len(closer)),
                        (m.end(), end), env)
                    i = end + len(closer)
                    continue
                i = m.end()
                continue
            if document.startswith("\\[", i):
                end = _scan_math(document, i + 2, "\\]", i)
                add(MathKind.DISPLAY, (i, end + 2), (i + 2, end))
                i = end + 2
                continue
            i += 2  # escaped character or control symbol, incl. \$ \% \\
            continue
        if c == "%":
            while i < n and document[i] != "\n":
                i += 1
            continue
        if c == "$":
            if document.startswith("$$", i):
                end = _scan_math(document, i + 2, "$$", i)
                add(MathKind.DISPLAY, (i, end + 2), (i + 2, end))
                i = end + 2
            else:
                end = _scan_math(document, i + 1, "$", i)
                add(MathKind.INLINE, (i, end + 1), (i + 1, end))
                i = end + 1
            continue
        i += 1
    return spans


def _scan_math(document: str, start: int, closer: str, opened_at: int) -> int:
    i = start
    n = len(document)
    while i < n:
        if document[i] == "\\" and i + 1 < n:
            if closer == "\\]" and document[i + 1] == "]":
                return i
            i += 2
            continue
        if document.startswith(closer, i):
            return i
        i += 1
    raise UnterminatedMathError(opened_at)


def _scan_env_close(document: str, start: int, env: str) -> int:
    closer = f"\\end{{{env}}}"
    i = start
    n = len(document)
    while i < n:
        if document[i] == "\\":
            if document.startswith(closer, i):
                return i
            i += 2
            continue
        i += 1
    raise UnterminatedMathError(start, what=f"environment '{env}'")


def rewrite(document: str, spans: list[FormulaSpan], plan: RewritePlan) -> str:
    """Replace the inner spans named by the plan; every byte outside the
    replaced inner spans is preserved exactly."""
    by_id = {s.id: s for s in spans}
    unknown = set(plan.replacements) - set(by_id)
    if unknown:
        raise ValueError(f"plan references unknown formula ids: {sorted(unknown)}")
    pieces = []
    cursor = 0
    for fid in sorted(plan.replacements, key=lambda f: by_id[f].inner[0]):
        start, end = by_id[fid].inner
        pieces.append(document[cursor:start])
        pieces.append(plan.replacements[fid])
        cursor = end
    pieces.append(document[cursor:])
    return "".join(pieces)


def default_output_path(input_path: str) -> str:
    if input_path.endswith(".tex"):
        return input_path[:-4] + ".stexified.tex"
    return input_path + ".stexified.tex"


def module_comment_block(modules: tuple[str, ...]) -> str:
    """TODO header reminding the author which modules the new macros need;
    inserted only when the grammar names any."""
    lines = ["% TODO: add the semantic-macro module imports this file now needs:"]
    for name in modules:
        lines.append(f"%   \\usemodule{{{name}}}")
    return "\n".join(lines) + "\n"
