"""Semi-automatic grammar generation from semantic-macro declarations.

``\\symdef{name}[opts]{body}`` and ``\\notation{name}[opts]{body}``
declarations are scanned into macro specs (name, arity, per-argument shape,
notation template), then turned into a grammar around a single universal
expression nonterminal: one rule per macro whose anchors are the template's
literal fragments, flexary arguments become list rules, and an optional
parenthesis rule maps to ``dobrackets``.

No precedence is guessed: ambiguity is embraced and left to the human
reviewing the parses.  Specs whose template has no literal anchor and at
least two arguments still generate their (wildly ambiguous) rule but are
flagged for manual review.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .astbuild import ActionSpec, ActionTable, Kind, actions_to_json, default_actions
from .errors import MalformedDeclarationError, NameCollisionError
from .grammar import (
    Grammar,
    Literal,
    Recognizer,
    Regex,
    TerminalKind,
    parse_grammar_text,
)

_SPACING_MACROS = {";", ",", ":", "!", " ", "quad", "qquad"}
_WRAPPER_MACROS = {"mathbin", "mathrel", "mathop", "text", "mathrm"}


# --- macro specs ---------------------------------------------------------------

@dataclass(frozen=True)
class LiteralText:
    text: str


@dataclass(frozen=True)
class ArgRef:
    index: int


@dataclass(frozen=True)
class Sep:
    """Separator position inside a flexary template (informational)."""


TemplateToken = LiteralText | ArgRef | Sep


@dataclass(frozen=True)
class ArgShape:
    flexary: bool = False
    separator: str = ","
    bound: bool = False  # bound arguments range over atoms, not expressions


@dataclass(frozen=True)
class MacroSpec:
    name: str
    arity: int
    args: tuple[ArgShape, ...]
    template: tuple[TemplateToken, ...]

    @property
    def is_atom(self) -> bool:
        """A bare single-argument identity template marks the atom class."""
        return (
            self.arity == 1
            and self.template == (ArgRef(1),)
            and not self.args[0].flexary
        )

    @property
    def has_anchor(self) -> bool:
        return any(isinstance(t, LiteralText) for t in self.template)


# --- scanning -------------------------------------------------------------------

_DECL_RE = re.compile(r"\\(symdef|notation)\{")


def scan_stex_source(source: str) -> list[MacroSpec]:
    """Extract macro specs from source text; a re-declaration of the same
    name overrides the earlier template (last wins)."""
    source = _strip_comments(source)
    specs: dict[str, MacroSpec] = {}
    for m in _DECL_RE.finditer(source):
        name, end = _read_group(source, m.end() - 1)
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name.strip()):
            raise MalformedDeclarationError(
                f"macro name {name!r} is not an identifier", m.start()
            )
        name = name.strip()
        opts = {}
        bare_opts: list[str] = []
        i = _skip_ws(source, end)
        if i < len(source) and source[i] == "[":
            opt_text, i = _read_group(source, i, "[", "]")
            opts, bare_opts = _parse_opts(opt_text)
        i = _skip_ws(source, i)
        if i >= len(source) or source[i] != "{":
            raise MalformedDeclarationError(
                f"declaration of '{name}' has no body", m.start()
            )
        body, i = _read_group(source, i)
        specs[name] = _build_spec(name, opts, body, m.start())
    return list(specs.values())


def _strip_comments(source: str) -> str:
    out = []
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\\" and i + 1 < n:
            out.append(source[i:i + 2])
            i += 2
            continue
        if c == "%":
            while i < n and source[i] != "\n":
                i += 1
            continue
        out.append(c)
        i += 1
    return "".join(out)


def _skip_ws(source: str, i: int) -> int:
    while i < len(source) and source[i] in " \t\n\r":
        i += 1
    return i


def _read_group(source: str, start: int, opener: str = "{", closer: str = "}"):
    """Balanced-group content starting at ``start`` (which holds the opener);
    returns (content, index past the closer)."""
    if start >= len(source) or source[start] != opener:
        raise MalformedDeclarationError(f"expected '{opener}'", start)
    depth = 0
    i = start
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\\" and i + 1 < n:
            i += 2
            continue
        if c == opener:
            depth += 1
        elif c == closer:
            depth -= 1
            if depth == 0:
                return source[start + 1:i], i + 1
        i += 1
    raise MalformedDeclarationError(f"unbalanced '{opener}'", start)


def _parse_opts(text: str) -> tuple[dict, list[str]]:
    opts: dict[str, str] = {}
    bare: list[str] = []
    depth = 0
    item = []
    items = []
    for c in text:
        if c in "{[":
            depth += 1
        elif c in "}]":
            depth -= 1
        if c == "," and depth == 0:
            items.append("".join(item))
            item = []
        else:
            item.append(c)
    items.append("".join(item))
    for raw in items:
        raw = raw.strip()
        if not raw:
            continue
        if "=" in raw:
            key, value = raw.split("=", 1)
            opts[key.strip()] = value.strip()
        else:
            bare.append(raw)
    return opts, bare


def _build_spec(name: str, opts: dict, body: str, where: int) -> MacroSpec:
    tokens, separators = _template_tokens(body, where)
    refs = [t.index for t in tokens if isinstance(t, ArgRef)]
    if len(refs) != len(set(refs)):
        raise MalformedDeclarationError(
            f"template of '{name}' references an argument twice", where
        )

    args_opt = opts.get("args")
    if args_opt is None:
        arity = max(refs, default=0)
        shapes = [ArgShape() for _ in range(arity)]
    elif args_opt.isdigit():
        arity = int(args_opt)
        shapes = [ArgShape() for _ in range(arity)]
    else:
        arity = len(args_opt)
        shapes = []
        for letter in args_opt:
            shapes.append(ArgShape(
                flexary=letter in ("a", "B"),
                bound=letter in ("b", "B"),
            ))
    for idx in refs:
        if not 1 <= idx <= arity:
            raise MalformedDeclarationError(
                f"template of '{name}' references #{idx} but arity is {arity}",
                where,
            )
    for idx, sep in separators.items():
        shapes[idx - 1] = replace(shapes[idx - 1], flexary=True, separator=sep)
    return MacroSpec(name, arity, tuple(shapes), tuple(tokens))


def _template_tokens(body: str, where: int):
    tokens: list[TemplateToken] = []
    separators: dict[int, str] = {}
    i = 0
    n = len(body)
    plain: list[str] = []

    def flush():
        text = "".join(plain).strip()
        plain.clear()
        if text:
            tokens.append(LiteralText(text))

    while i < n:
        c = body[i]
        if c == "\\" and i + 1 < n:
            nxt = body[i + 1]
            if not nxt.isalpha():
                if nxt in _SPACING_MACROS:
                    i += 2
                    continue
                flush()
                tokens.append(LiteralText(body[i:i + 2]))
                i += 2
                continue
            m = re.match(r"\\([A-Za-z]+)", body[i:])
            word = m.group(1)
            i += m.end()
            if word in _SPACING_MACROS:
                continue
            if word == "comp":
                flush()
                arg, i = _macro_arg(body, i, where)
                tokens.append(LiteralText(arg))
                continue
            if word == "argsep":
                flush()
                inner, i = _macro_arg(body, i, where)
                sep_raw, i = _macro_arg(body, i, where)
                ref = re.fullmatch(r"\s*#(\d+)\s*", inner)
                if not ref:
                    raise MalformedDeclarationError(
                        "argsep expects an argument reference", where
                    )
                idx = int(ref.group(1))
                tokens.append(ArgRef(idx))
                separators[idx] = _clean_separator(sep_raw, where)
                continue
            flush()
            tokens.append(LiteralText("\\" + word))
            continue
        if c == "#":
            m = re.match(r"#(\d+)", body[i:])
            if m:
                flush()
                tokens.append(ArgRef(int(m.group(1))))
                i += m.end()
                continue
        if c in "{}":
            flush()  # groups are transparent
            i += 1
            continue
        if c in " \t\n\r":
            flush()
            i += 1
            continue
        plain.append(c)
        i += 1
    flush()
    return tokens, separators


def _macro_arg(body: str, i: int, where: int) -> tuple[str, int]:
    i = _skip_ws(body, i)
    if i < len(body) and body[i] == "{":
        return _read_group(body, i)
    if i < len(body):
        # single-token argument, e.g. \comp-
        if body[i] == "\\" and i + 1 < len(body):
            return body[i:i + 2], i + 2
        return body[i], i + 1
    raise MalformedDeclarationError("macro argument missing", where)


def _clean_separator(raw: str, where: int) -> str:
    out = []
    for token in _template_tokens(raw, where)[0]:
        if isinstance(token, LiteralText):
            text = token.text
            for wrapper in _WRAPPER_MACROS:
                if text == "\\" + wrapper:
                    text = ""
                    break
            out.append(text)
        else:
            raise MalformedDeclarationError(
                "separators may not reference arguments", where
            )
    return "".join(out).strip()


# --- generation -----------------------------------------------------------------------

@dataclass(frozen=True)
class GenConfig:
    expression_symbol: str = "EXPR"
    include_parentheses_rule: bool = True
    atom_terminal: TerminalKind = Recognizer("lc_variable")
    atom_id: str = "var"
    grammar_name: str = "generated"


@dataclass
class GenResult:
    grammar: Grammar
    grammar_text: str
    actions: ActionTable
    warnings: list[str] = field(default_factory=list)

    def actions_json(self) -> dict:
        return actions_to_json(self.actions)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def scan_module_names(source: str) -> list[str]:
    """Module names declared by ``\\begin{smodule}{...}`` blocks, used for
    the export-time import reminder."""
    return re.findall(r"\\begin\{smodule\}\{([A-Za-z_][A-Za-z0-9_]*)\}", source)


def generate_grammar(
    specs: list[MacroSpec],
    config: GenConfig = GenConfig(),
    modules: tuple[str, ...] = (),
) -> GenResult:
    """Build a grammar (and action table) for parsing plain notation of the
    given macros; the produced grammar always passes validation."""
    warnings: list[str] = []
    expr = config.expression_symbol
    paren = "PAREN"

    atom_id = config.atom_id
    rule_specs: list[MacroSpec] = []
    atom_seen = False
    for spec in specs:
        if spec.is_atom:
            if atom_seen:
                warnings.append(
                    f"'{spec.name}': a second atom-style macro; "
                    f"the atom class keeps the name '{atom_id}'"
                )
            else:
                atom_id = spec.name
                atom_seen = True
        else:
            rule_specs.append(spec)

    names = {expr, paren, atom_id}
    overrides: dict[str, ActionSpec] = {expr: ActionSpec(Kind.PASS_THROUGH)}
    lines = [f"start: {expr};"]
    if modules:
        lines.append(f"modules: {', '.join(modules)};")
    alts = [f"sym_{s.name}" for s in rule_specs] + [atom_id]
    if config.include_parentheses_rule:
        alts.append(paren)
    lines.append(f"{expr}: {' | '.join(alts)};")

    body_lines: list[str] = []
    for spec in rule_specs:
        sym = f"sym_{spec.name}"
        if sym in names:
            raise NameCollisionError(f"generated name '{sym}' already in use")
        names.add(sym)
        if not spec.has_anchor and spec.arity >= 2:
            warnings.append(
                f"'{spec.name}': template has no literal anchor; the generated "
                "rule is highly ambiguous and should be reviewed"
            )
        rhs: list[str] = []
        list_rules: list[str] = []
        for token in spec.template:
            if isinstance(token, LiteralText):
                rhs.append(_quote(token.text))
            elif isinstance(token, ArgRef):
                shape = spec.args[token.index - 1]
                if shape.flexary:
                    list_name = f"list_{spec.name}_{token.index}"
                    if list_name in names:
                        raise NameCollisionError(
                            f"generated name '{list_name}' already in use"
                        )
                    names.add(list_name)
                    rhs.append(list_name)
                    elem = atom_id if shape.bound else expr
                    sep = f" {_quote(shape.separator)} " if shape.separator else " "
                    solo_list = len(spec.template) == 1
                    if solo_list and not shape.bound:
                        # a bare one-element list would be a unit cycle
                        list_rules.append(
                            f"{list_name}: {elem}{sep}{list_name} | {elem}{sep}{elem};"
                        )
                    else:
                        list_rules.append(
                            f"{list_name}: {elem}{sep}{list_name} | {elem};"
                        )
                    overrides[list_name] = ActionSpec(Kind.FLATTEN_LIST)
                else:
                    rhs.append(atom_id if shape.bound else expr)
        if not rhs:
            raise NameCollisionError(f"'{spec.name}' produced an empty rule")
        body_lines.append(f"{sym}: {' '.join(rhs)};")
        body_lines.extend(list_rules)
        overrides[sym] = ActionSpec(Kind.NODE, rename=spec.name)

    lines.extend(body_lines)
    if config.include_parentheses_rule:
        lines.append(f'{paren}: "(" {expr} ")";')
        overrides[paren] = ActionSpec(Kind.NODE, rename="dobrackets")
    lines.append("terminals")
    kind = config.atom_terminal
    if isinstance(kind, Literal):
        decl = " | ".join(_quote(t) for t in kind.texts)
    elif isinstance(kind, Regex):
        decl = "/" + kind.pattern.replace("/", "\\/") + "/"
    else:
        decl = f"@recognizer({kind.hook_name})"
    lines.append(f"{atom_id}: {decl};")

    text = "\n".join(lines) + "\n"
    grammar = parse_grammar_text(text, name=config.grammar_name)
    actions = default_actions(grammar).override(overrides)
    return GenResult(grammar, text, actions, warnings)
