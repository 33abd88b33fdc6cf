"""Context-free grammar model, the textual grammar file format, and validation.

A grammar is a list of productions over two disjoint namespaces: nonterminals
(rule left-hand sides) and terminals (literals, regexes, or named recognizer
hooks).  Grammars are immutable once constructed and safe to share.

File format::

    // comment
    start: lexp;            // optional headers before the first rule
    lexp: app | var | abs | parexp;
    parexp: "(" lexp ")";
    terminals
    lam: "\\lambda" | "λ";
    var: /[a-z]/;
    dot: ".";

Rules before the bare ``terminals`` keyword define nonterminals; after it,
terminals.  A terminal may list several literal alternatives (one terminal
matching any of them).  ``@recognizer(name)`` binds a named recognizer hook,
``EMPTY`` denotes an epsilon right-hand side.  Additional headers:
``skip_whitespace: true|false;`` and ``modules: a, b;``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    DuplicateTerminalError,
    EmptyGrammarError,
    GrammarSyntaxError,
    UndefinedNonterminalError,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

_HEADER_NAMES = ("start", "skip_whitespace", "modules")


# --- terminal kinds ---------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    """Fixed text; several alternatives collapse into one terminal."""

    texts: tuple[str, ...]

    def __post_init__(self):
        if not self.texts or any(not t for t in self.texts):
            raise ValueError("literal terminal needs nonempty text")


@dataclass(frozen=True)
class Regex:
    pattern: str

    def __post_init__(self):
        re.compile(self.pattern)


@dataclass(frozen=True)
class Recognizer:
    hook_name: str


TerminalKind = Literal | Regex | Recognizer


# --- symbols and productions -------------------------------------------------

@dataclass(frozen=True)
class NonTerminal:
    name: str


@dataclass(frozen=True)
class Terminal:
    id: str
    kind: Literal | Regex | Recognizer


Symbol = NonTerminal | Terminal


@dataclass(frozen=True)
class Production:
    index: int
    lhs: str
    rhs: tuple[Symbol, ...]

    def __str__(self):
        parts = " ".join(
            s.name if isinstance(s, NonTerminal) else s.id for s in self.rhs
        )
        return f"{self.lhs}: {parts or 'EMPTY'}"


@dataclass(frozen=True)
class Grammar:
    name: str
    start: str
    productions: tuple[Production, ...]
    terminals: dict[str, TerminalKind]
    skip_whitespace: bool = True
    modules: tuple[str, ...] = ()
    # ids synthesized for literals/regexes written inline in rules; the
    # serializer keeps those inline instead of promoting them to declarations
    inline_terminals: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.productions:
            raise EmptyGrammarError("grammar has no productions")
        lhs_names = {p.lhs for p in self.productions}
        for name in list(lhs_names) + list(self.terminals):
            if not IDENT_RE.fullmatch(name):
                raise ValueError(f"invalid identifier {name!r}")
        clash = lhs_names & set(self.terminals)
        if clash:
            raise DuplicateTerminalError(
                f"names used both as rule and terminal: {sorted(clash)}"
            )
        if self.start not in lhs_names:
            raise UndefinedNonterminalError(self.start)
        for prod in self.productions:
            for sym in prod.rhs:
                if isinstance(sym, NonTerminal) and sym.name not in lhs_names:
                    raise UndefinedNonterminalError(sym.name, f"rule '{prod.lhs}'")

    @property
    def nonterminals(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for p in self.productions:
            seen.setdefault(p.lhs)
        return tuple(seen)

    def productions_of(self, name: str) -> tuple[Production, ...]:
        return tuple(p for p in self.productions if p.lhs == name)


@dataclass(frozen=True)
class ValidationReport:
    cyclic: tuple[str, ...]
    unreachable: tuple[str, ...]
    unproductive: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.cyclic and not self.unproductive

    def __str__(self):
        if self.ok and not self.unreachable:
            return "grammar ok"
        bits = []
        if self.cyclic:
            bits.append(f"cyclic nonterminals: {', '.join(self.cyclic)}")
        if self.unproductive:
            bits.append(f"unproductive nonterminals: {', '.join(self.unproductive)}")
        if self.unreachable:
            bits.append(f"unreachable nonterminals: {', '.join(self.unreachable)}")
        return "; ".join(bits)


# --- validation ----------------------------------------------------------------

def nullable_nonterminals(grammar: Grammar) -> frozenset[str]:
    """Nonterminals that derive the empty string (terminals never do)."""
    nullable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for p in grammar.productions:
            if p.lhs in nullable:
                continue
            if all(isinstance(s, NonTerminal) and s.name in nullable for s in p.rhs):
                nullable.add(p.lhs)
                changed = True
    return frozenset(nullable)


def validate(grammar: Grammar) -> ValidationReport:
    """Diagnose cycles (hard error), unproductive symbols (hard error) and
    unreachable symbols (warning).

    A cycle here means A derives A again through a chain of productions whose
    other symbols are all nullable; such grammars would make the parse forest
    infinite, so table compilation refuses them.
    """
    nullable = nullable_nonterminals(grammar)
    nts = set(grammar.nonterminals)

    # unit-derivation graph through nullable contexts
    edges: dict[str, set[str]] = {nt: set() for nt in nts}
    for p in grammar.productions:
        for i, sym in enumerate(p.rhs):
            if not isinstance(sym, NonTerminal):
                continue
            others = p.rhs[:i] + p.rhs[i + 1:]
            if all(isinstance(o, NonTerminal) and o.name in nullable for o in others):
                edges[p.lhs].add(sym.name)

    cyclic = _cyclic_nodes(edges)

    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for p in grammar.productions:
            if p.lhs in productive:
                continue
            if all(
                not isinstance(s, NonTerminal) or s.name in productive
                for s in p.rhs
            ):
                productive.add(p.lhs)
                changed = True
    unproductive = nts - productive

    reachable = {grammar.start}
    stack = [grammar.start]
    while stack:
        for p in grammar.productions_of(stack.pop()):
            for s in p.rhs:
                if isinstance(s, NonTerminal) and s.name not in reachable:
                    reachable.add(s.name)
                    stack.append(s.name)
    unreachable = nts - reachable

    order = {nt: i for i, nt in enumerate(grammar.nonterminals)}
    key = order.__getitem__
    return ValidationReport(
        cyclic=tuple(sorted(cyclic, key=key)),
        unreachable=tuple(sorted(unreachable, key=key)),
        unproductive=tuple(sorted(unproductive, key=key)),
    )


def _cyclic_nodes(edges: dict[str, set[str]]) -> set[str]:
    # Tarjan SCC; a node is cyclic if its component has size > 1 or it loops
    # onto itself directly.
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = [0]
    cyclic: set[str] = set()

    def strongconnect(v: str):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        for w in edges[v]:
            if w not in index:
                strongconnect(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            if len(comp) > 1 or v in edges[v]:
                cyclic.update(comp)

    for v in edges:
        if v not in index:
            strongconnect(v)
    return cyclic


# --- text format: reader ---------------------------------------------------------

@dataclass(frozen=True)
class _Tok:
    kind: str  # ident, colon, pipe, semi, comma, literal, regex, recognizer
    value: str
    line: int
    col: int


def _lex_file(source: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def err(msg):
        raise GrammarSyntaxError(msg, line, col)

    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c.isalpha() or c == "_":
            m = IDENT_RE.match(source, i)
            toks.append(_Tok("ident", m.group(0), start_line, start_col))
            col += m.end() - i
            i = m.end()
            continue
        if c == ":":
            toks.append(_Tok("colon", c, line, col))
        elif c == "|":
            toks.append(_Tok("pipe", c, line, col))
        elif c == ";":
            toks.append(_Tok("semi", c, line, col))
        elif c == ",":
            toks.append(_Tok("comma", c, line, col))
        elif c == '"':
            j = i + 1
            out = []
            while j < n and source[j] != '"':
                if source[j] == "\\" and j + 1 < n:
                    nxt = source[j + 1]
                    if nxt == '"':
                        out.append('"')
                        j += 2
                        continue
                    if nxt == "\\":
                        out.append("\\")
                        j += 2
                        continue
                    # anything else keeps the backslash: "\lambda" stays \lambda
                out.append(source[j])
                j += 1
            if j >= n:
                err("unterminated string literal")
            text = "".join(out)
            if not text:
                err("empty string literal")
            toks.append(_Tok("literal", text, start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        elif c == "/":
            j = i + 1
            out = []
            while j < n and source[j] != "/":
                if source[j] == "\\" and j + 1 < n and source[j + 1] == "/":
                    out.append("/")
                    j += 2
                    continue
                out.append(source[j])
                j += 1
            if j >= n:
                err("unterminated regex")
            pattern = "".join(out)
            try:
                re.compile(pattern)
            except re.error as exc:
                err(f"bad regex /{pattern}/: {exc}")
            toks.append(_Tok("regex", pattern, start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        elif c == "@":
            m = re.match(r"@recognizer\(\s*([A-Za-z_][A-Za-z0-9_]*)\s*\)", source[i:])
            if not m:
                err("expected @recognizer(name)")
            toks.append(_Tok("recognizer", m.group(1), start_line, start_col))
            col += m.end()
            i += m.end()
            continue
        else:
            err(f"unexpected character {c!r}")
        i += 1
        col += 1
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Tok | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else _Tok("", "", 1, 1)
            raise GrammarSyntaxError("unexpected end of file", last.line, last.col)
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Tok:
        tok = self.next()
        if tok.kind != kind:
            raise GrammarSyntaxError(
                f"expected {kind}, found {tok.value!r}", tok.line, tok.col
            )
        return tok


def parse_grammar_text(source: str, name: str = "grammar") -> Grammar:
    """Parse the textual grammar format into a :class:`Grammar`.

    Declaration order is preserved; the start symbol is the first rule's
    left-hand side unless a ``start:`` header overrides it.
    """
    p = _Parser(_lex_file(source))

    headers: dict[str, object] = {}
    rules: list[tuple[_Tok, list[list[_Tok]]]] = []
    terminal_decls: list[tuple[_Tok, list[_Tok]]] = []
    in_terminals = False

    while p.peek() is not None:
        tok = p.peek()
        if tok.kind == "ident" and tok.value == "terminals":
            nxt = p.toks[p.pos + 1] if p.pos + 1 < len(p.toks) else None
            if nxt is None or nxt.kind != "colon":
                p.next()
                if in_terminals:
                    raise GrammarSyntaxError(
                        "duplicate 'terminals' section", tok.line, tok.col
                    )
                in_terminals = True
                continue
        lhs = p.expect("ident")
        p.expect("colon")
        if not rules and not in_terminals and lhs.value in _HEADER_NAMES:
            _read_header(p, lhs, headers)
            continue
        alts = _read_alternatives(p)
        if in_terminals:
            for alt in alts:
                terminal_decls.append((lhs, alt))
        else:
            rules.append((lhs, alts))

    if not rules:
        raise EmptyGrammarError("grammar file defines no rules")

    lhs_names = {tok.value for tok, _ in rules}

    terminals: dict[str, TerminalKind] = {}
    for lhs, alts_for_id in _group_terminal_decls(terminal_decls):
        tid = lhs.value
        if tid in terminals:
            raise DuplicateTerminalError(f"terminal '{tid}' declared twice")
        if tid in lhs_names:
            raise DuplicateTerminalError(
                f"'{tid}' declared both as rule and terminal"
            )
        terminals[tid] = _terminal_kind(lhs, alts_for_id)

    inline: dict[tuple, str] = {}
    productions: list[Production] = []

    def inline_id(kind: TerminalKind) -> str:
        key = (type(kind).__name__, kind.texts if isinstance(kind, Literal) else
               (kind.pattern if isinstance(kind, Regex) else kind.hook_name))
        if key in inline:
            return inline[key]
        base = f"lit_{len(inline)}"
        tid = base
        bump = 0
        while tid in terminals or tid in lhs_names:
            bump += 1
            tid = f"{base}_{bump}"
        inline[key] = tid
        terminals[tid] = kind
        return tid

    for lhs, alts in rules:
        for alt in alts:
            rhs: list[Symbol] = []
            if len(alt) == 1 and alt[0].kind == "ident" and alt[0].value == "EMPTY":
                alt = []
            for tok in alt:
                if tok.kind == "ident":
                    if tok.value == "EMPTY":
                        raise GrammarSyntaxError(
                            "EMPTY must stand alone in an alternative",
                            tok.line, tok.col,
                        )
                    if tok.value in lhs_names:
                        rhs.append(NonTerminal(tok.value))
                    elif tok.value in terminals:
                        rhs.append(Terminal(tok.value, terminals[tok.value]))
                    else:
                        raise UndefinedNonterminalError(
                            tok.value, f"line {tok.line}"
                        )
                elif tok.kind == "literal":
                    tid = inline_id(Literal((tok.value,)))
                    rhs.append(Terminal(tid, terminals[tid]))
                elif tok.kind == "regex":
                    tid = inline_id(Regex(tok.value))
                    rhs.append(Terminal(tid, terminals[tid]))
                else:  # recognizer
                    tid = inline_id(Recognizer(tok.value))
                    rhs.append(Terminal(tid, terminals[tid]))
            productions.append(Production(len(productions), lhs.value, tuple(rhs)))

    start = headers.get("start", rules[0][0].value)
    if start not in lhs_names:
        raise UndefinedNonterminalError(str(start), "start header")
    return Grammar(
        name=name,
        start=str(start),
        productions=tuple(productions),
        terminals=terminals,
        skip_whitespace=bool(headers.get("skip_whitespace", True)),
        modules=tuple(headers.get("modules", ())),
        inline_terminals=frozenset(inline.values()),
    )


def _read_header(p: _Parser, lhs: _Tok, headers: dict) -> None:
    if lhs.value in headers:
        raise GrammarSyntaxError(f"duplicate header '{lhs.value}'", lhs.line, lhs.col)
    if lhs.value == "start":
        headers["start"] = p.expect("ident").value
    elif lhs.value == "skip_whitespace":
        tok = p.expect("ident")
        if tok.value not in ("true", "false"):
            raise GrammarSyntaxError(
                "skip_whitespace expects true or false", tok.line, tok.col
            )
        headers["skip_whitespace"] = tok.value == "true"
    else:  # modules
        names = [p.expect("ident").value]
        while p.peek() is not None and p.peek().kind == "comma":
            p.next()
            names.append(p.expect("ident").value)
        headers["modules"] = names
    p.expect("semi")


def _read_alternatives(p: _Parser) -> list[list[_Tok]]:
    alts: list[list[_Tok]] = [[]]
    while True:
        tok = p.next()
        if tok.kind == "semi":
            break
        if tok.kind == "pipe":
            alts.append([])
            continue
        if tok.kind in ("ident", "literal", "regex", "recognizer"):
            alts[-1].append(tok)
            continue
        raise GrammarSyntaxError(
            f"unexpected {tok.value!r} in rule body", tok.line, tok.col
        )
    for alt in alts:
        if not alt:
            raise GrammarSyntaxError(
                "empty alternative (use EMPTY for epsilon)", tok.line, tok.col
            )
    return alts


def _group_terminal_decls(decls):
    grouped: dict[str, tuple] = {}
    order = []
    for lhs, alt in decls:
        if lhs.value not in grouped:
            grouped[lhs.value] = (lhs, [])
            order.append(lhs.value)
        elif grouped[lhs.value][0] is not lhs:
            # same id declared in two separate statements
            raise DuplicateTerminalError(f"terminal '{lhs.value}' declared twice")
        grouped[lhs.value][1].append(alt)
    return [grouped[tid] for tid in order]


def _terminal_kind(lhs: _Tok, alts: list[list[_Tok]]) -> TerminalKind:
    flat = []
    for alt in alts:
        if len(alt) != 1:
            raise GrammarSyntaxError(
                "terminal alternatives must be single items", lhs.line, lhs.col
            )
        flat.append(alt[0])
    if all(t.kind == "literal" for t in flat):
        return Literal(tuple(t.value for t in flat))
    if len(flat) != 1:
        raise GrammarSyntaxError(
            "only literal terminals may list alternatives", lhs.line, lhs.col
        )
    tok = flat[0]
    if tok.kind == "regex":
        return Regex(tok.value)
    if tok.kind == "recognizer":
        return Recognizer(tok.value)
    raise GrammarSyntaxError(
        f"expected literal, regex or recognizer, found {tok.value!r}",
        tok.line, tok.col,
    )


# --- text format: writer -----------------------------------------------------------

def _quote_literal(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _quote_regex(pattern: str) -> str:
    return "/" + pattern.replace("/", "\\/") + "/"


def serialize_grammar(grammar: Grammar) -> str:
    """Render a grammar back to the file format; reparsing yields an equal
    Grammar (same productions, indices, terminals and headers)."""
    lines = [f"start: {grammar.start};"]
    if not grammar.skip_whitespace:
        lines.append("skip_whitespace: false;")
    if grammar.modules:
        lines.append(f"modules: {', '.join(grammar.modules)};")

    def atom(sym: Symbol) -> str:
        if isinstance(sym, NonTerminal):
            return sym.name
        if sym.id in grammar.inline_terminals:
            kind = sym.kind
            if isinstance(kind, Literal):
                return _quote_literal(kind.texts[0])
            if isinstance(kind, Regex):
                return _quote_regex(kind.pattern)
            return f"@recognizer({kind.hook_name})"
        return sym.id

    # merge adjacent productions of the same lhs into one alternative list so
    # indices survive the round trip
    i = 0
    prods = grammar.productions
    while i < len(prods):
        lhs = prods[i].lhs
        alts = []
        while i < len(prods) and prods[i].lhs == lhs:
            rhs = prods[i].rhs
            alts.append(" ".join(atom(s) for s in rhs) if rhs else "EMPTY")
            i += 1
        lines.append(f"{lhs}: {' | '.join(alts)};")

    declared = [tid for tid in grammar.terminals if tid not in grammar.inline_terminals]
    if declared:
        lines.append("terminals")
        for tid in declared:
            kind = grammar.terminals[tid]
            if isinstance(kind, Literal):
                body = " | ".join(_quote_literal(t) for t in kind.texts)
            elif isinstance(kind, Regex):
                body = _quote_regex(kind.pattern)
            else:
                body = f"@recognizer({kind.hook_name})"
            lines.append(f"{tid}: {body};")
    return "\n".join(lines) + "\n"
