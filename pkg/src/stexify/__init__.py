"""stexify: semi-automatic semantic markup of LaTeX formulas.

Pipeline: generate or load a grammar, parse every formula of a document with
an exhaustive generalized LR parser, let a human pick the intended reading of
each ambiguous formula (terminal prompts, or the bundled web UI), and write
a copy of the document with formulas replaced by semantic macro calls.
"""

from .astbuild import (
    ActionSpec,
    ActionTable,
    AstLeaf,
    AstNode,
    Kind,
    actions_from_json,
    actions_to_json,
    ast_from_json,
    ast_to_json,
    build_ast,
    default_actions,
    load_actions_file,
)
from .emitter import DobracketsStyle, EmitterConfig, emit
from .gen import (
    ArgShape,
    ArgRef,
    GenConfig,
    GenResult,
    LiteralText,
    MacroSpec,
    generate_grammar,
    scan_stex_source,
)
from .glr import (
    Leaf,
    Node,
    NoParse,
    ParseForest,
    count_trees,
    enumerate_trees,
    parse,
    tree_frontier,
    tree_leaves,
)
from .grammar import (
    Grammar,
    Literal,
    NonTerminal,
    Production,
    Recognizer,
    Regex,
    Symbol,
    Terminal,
    TerminalKind,
    ValidationReport,
    parse_grammar_text,
    serialize_grammar,
    validate,
)
from .lexing import (
    DEFAULT_REGISTRY,
    RecognizerRegistry,
    Token,
    nat_recognizer,
    next_tokens,
    variable_recognizer,
)
from .session import Candidate, FormulaEntry, Session, SessionConfig, Status
from .tables import CompiledGrammar, compile_grammar
from .texdoc import (
    FormulaSpan,
    MathKind,
    RewritePlan,
    extract_formulas,
    rewrite,
)

__all__ = [name for name in dir() if not name.startswith("_")]
