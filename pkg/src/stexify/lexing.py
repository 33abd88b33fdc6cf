"""Context-aware tokenization of formula text against a grammar's terminals.

The scanner is driven by the parser: at each input position only the
terminals the current parser states expect are tried, and *all* maximal
matches are returned (longest match per terminal, no cross-terminal
priority) so the parser can fork on lexical ambiguity.

Recognizers are plain functions ``(text, pos) -> length | None`` for token
classes that are awkward as regexes; two are built in, ``lc_variable`` and
``natural_number``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Optional

from .errors import UnknownRecognizerError
from .grammar import Grammar, Literal, Regex, TerminalKind

RecognizerFn = Callable[[str, int], Optional[int]]

_WHITESPACE = " \t\n\r"

_CONTROL_WORD_RE = re.compile(r"\\[A-Za-z]+\Z")


@dataclass(frozen=True)
class Token:
    terminal_id: str
    lexeme: str
    start: int
    end: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def variable_recognizer(text: str, pos: int) -> int | None:
    """Length of a lambda-calculus variable at ``pos``.

    Accepts a lowercase letter with optional apostrophes before and/or after
    a single optional braced subscript: ``x``, ``x'``, ``y_{1}``, ``z_{2}''``.
    An unclosed subscript falls back to the longest valid prefix.
    """
    n = len(text)
    if pos >= n or not ("a" <= text[pos] <= "z"):
        return None
    i = pos + 1
    while i < n and text[i] == "'":
        i += 1
    if text.startswith("_{", i):
        j = i + 2
        k = j
        while k < n and text[k].isdigit():
            k += 1
        if k > j and k < n and text[k] == "}":
            i = k + 1
            while i < n and text[i] == "'":
                i += 1
    return i - pos


def nat_recognizer(text: str, pos: int) -> int | None:
    """Length of a natural number without leading zeros (``0`` itself is fine)."""
    n = len(text)
    if pos >= n or not text[pos].isdigit():
        return None
    if text[pos] == "0":
        return 1
    i = pos + 1
    while i < n and text[i].isdigit():
        i += 1
    return i - pos


BUILTIN_RECOGNIZERS: dict[str, RecognizerFn] = {
    "lc_variable": variable_recognizer,
    "natural_number": nat_recognizer,
}


class RecognizerRegistry:
    """Maps hook names to recognizer functions; built-ins are preloaded."""

    def __init__(self, extra: dict[str, RecognizerFn] | None = None):
        self._hooks = dict(BUILTIN_RECOGNIZERS)
        if extra:
            self._hooks.update(extra)

    def register(self, name: str, fn: RecognizerFn) -> None:
        self._hooks[name] = fn

    def get(self, name: str) -> RecognizerFn:
        try:
            return self._hooks[name]
        except KeyError:
            raise UnknownRecognizerError(
                f"no recognizer registered under '{name}'"
            ) from None


DEFAULT_REGISTRY = RecognizerRegistry()


@lru_cache(maxsize=None)
def _compiled(pattern: str) -> re.Pattern:
    return re.compile(pattern)


def skip_whitespace(text: str, pos: int) -> int:
    while pos < len(text) and text[pos] in _WHITESPACE:
        pos += 1
    return pos


def match_terminal(
    text: str, pos: int, kind: TerminalKind, registry: RecognizerRegistry
) -> int | None:
    """Longest match length of one terminal at ``pos`` (no whitespace skip)."""
    if isinstance(kind, Literal):
        best = None
        for candidate in kind.texts:
            if not text.startswith(candidate, pos):
                continue
            if _CONTROL_WORD_RE.fullmatch(candidate):
                # TeX control words must not be followed by another letter
                nxt = pos + len(candidate)
                if nxt < len(text) and text[nxt].isalpha():
                    continue
            if best is None or len(candidate) > best:
                best = len(candidate)
        return best
    if isinstance(kind, Regex):
        m = _compiled(kind.pattern).match(text, pos)
        if m and m.end() > pos:
            return m.end() - pos
        return None
    length = registry.get(kind.hook_name)(text, pos)
    if length is not None and length < 1:
        raise ValueError(
            f"recognizer '{kind.hook_name}' matched length {length}; "
            "recognizers must consume at least one character"
        )
    return length


def next_tokens(
    text: str,
    pos: int,
    expected: Iterable[str],
    grammar: Grammar,
    registry: RecognizerRegistry = DEFAULT_REGISTRY,
) -> list[Token]:
    """All maximal matches at ``pos``, one token per matching terminal.

    Whitespace is skipped first when the grammar says so.  The result is
    sorted by terminal id so scans are deterministic.
    """
    p = skip_whitespace(text, pos) if grammar.skip_whitespace else pos
    out = []
    for tid in sorted(set(expected)):
        kind = grammar.terminals[tid]
        length = match_terminal(text, p, kind, registry)
        if length:
            out.append(Token(tid, text[p:p + length], p, p + length))
    return out
