"""Serialize ASTs into semantic-macro source text.

``app(var x, var y)`` becomes ``\\app{\\var{x}}{\\var{y}}``; a flexary list
child collapses into a single brace group with its members joined by the
configured separator.  Leaves named ``raw`` pass through verbatim so opaque
content (meta-variables, unparsed fragments) survives unwrapped.  No
whitespace is inserted, keeping output byte-stable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .astbuild import Ast, AstLeaf, AstNode
from .errors import EmptyFlexaryError

RAW_LEAF = "raw"
DOBRACKETS = "dobrackets"


class DobracketsStyle(enum.Enum):
    MACRO = "macro"
    PLAIN_PARENS = "parens"


@dataclass(frozen=True)
class EmitterConfig:
    flexary_separator: str = ","
    dobrackets_style: DobracketsStyle = DobracketsStyle.MACRO
    macro_prefix: str = "\\"

    def __post_init__(self):
        if not self.flexary_separator:
            raise ValueError("flexary separator must be nonempty")


DEFAULT_CONFIG = EmitterConfig()


def emit(ast: Ast, config: EmitterConfig = DEFAULT_CONFIG) -> str:
    if isinstance(ast, AstLeaf):
        if ast.name == RAW_LEAF:
            return ast.lexeme
        return f"{config.macro_prefix}{ast.name}{{{ast.lexeme}}}"

    if ast.name == DOBRACKETS and config.dobrackets_style is DobracketsStyle.PLAIN_PARENS:
        inner = "".join(_emit_group_body(ast, i, config) for i in range(len(ast.children)))
        return f"({inner})"

    parts = [config.macro_prefix, ast.name]
    for i in range(len(ast.children)):
        parts.append("{" + _emit_group_body(ast, i, config) + "}")
    return "".join(parts)


def _emit_group_body(ast: AstNode, index: int, config: EmitterConfig) -> str:
    child = ast.children[index]
    if index in ast.flexary_slots:
        if not isinstance(child, AstNode) or not child.children:
            raise EmptyFlexaryError(
                f"flexary slot {index} of '{ast.name}' has no members"
            )
        return config.flexary_separator.join(
            emit(member, config) for member in child.children
        )
    return emit(child, config)
