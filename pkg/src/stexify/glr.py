"""Generalized LR parsing: graph-structured stack + shared packed forest.

The driver runs the LALR tables nondeterministically.  Stack tops live in a
graph-structured stack (GSS) whose nodes are unified per (state, input
position) and whose edges carry shared-packed-parse-forest (SPPF) nodes, so
exponentially many derivations cost polynomial work.  Because the scanner is
context-aware and tokens have varying lengths, frontiers are indexed by input
position rather than token ordinal and processed in increasing order.

Reductions are enqueued per first-popped-edge; a new edge re-triggers the
reductions that could pop through it.  Rules whose tail is nullable reduce
early ("right-nulled"), completing the tail from statically built epsilon
derivations; together with unifying empty-span symbol nodes per position this
keeps parses of epsilon-bearing grammars complete without path re-scanning.

The forest supports exact derivation counting (cheap, works far beyond the
enumeration cap) and deterministic tree enumeration.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import TooManyParsesError
from .grammar import Grammar, Production
from .lexing import (
    DEFAULT_REGISTRY,
    RecognizerRegistry,
    Token,
    match_terminal,
    skip_whitespace,
)
from .tables import EOF, Accept, CompiledGrammar, Reduce, Shift

SATURATION = 2**64 - 1
DEFAULT_ENUM_CAP = 256


# --- forest ------------------------------------------------------------------

class TokenNode:
    """SPPF leaf for one scanned token."""

    __slots__ = ("token",)

    def __init__(self, token: Token):
        self.token = token

    @property
    def start(self) -> int:
        return self.token.start

    @property
    def end(self) -> int:
        return self.token.end

    def __repr__(self):
        return f"TokenNode({self.token.terminal_id}, {self.token.lexeme!r})"


class SymbolNode:
    """SPPF node for a nonterminal over a span; packed alternatives are
    (production index, child nodes) and children align 1:1 with the rhs."""

    __slots__ = ("symbol", "start", "end", "alts", "_alt_keys")

    def __init__(self, symbol: str, start: int, end: int):
        self.symbol = symbol
        self.start = start
        self.end = end
        self.alts: list[tuple[int, tuple]] = []
        self._alt_keys: set = set()

    def add_alt(self, production: int, children: tuple) -> None:
        key = (production, tuple(id(c) for c in children))
        if key not in self._alt_keys:
            self._alt_keys.add(key)
            self.alts.append((production, children))

    def __repr__(self):
        return f"SymbolNode({self.symbol}, {self.start}..{self.end}, {len(self.alts)} alts)"


SppfNode = TokenNode | SymbolNode


@dataclass(frozen=True)
class NoParse:
    """Diagnostic for a failed parse: where it stalled and what was legal."""

    position: int
    expected: tuple[str, ...]
    at_end: bool

    def __str__(self):
        names = ", ".join(self.expected) if self.expected else "nothing"
        if self.at_end:
            return f"unexpected end of input at position {self.position}; expected {names}"
        return f"no expected token matches at position {self.position}; expected {names}"


class ParseForest:
    def __init__(self, grammar: Grammar, root: Optional[SymbolNode],
                 failure: Optional[NoParse]):
        self.grammar = grammar
        self.root = root
        self.failure = failure
        self._exact_count: Optional[int] = None

    @property
    def ambiguity(self) -> int:
        return count_trees(self)

    def exact_count(self) -> int:
        if self._exact_count is None:
            self._exact_count = _count_root(self.root)
        return self._exact_count


# --- concrete trees -------------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    token: Token


@dataclass(frozen=True)
class Node:
    production: Production
    children: tuple

    @property
    def symbol(self) -> str:
        return self.production.lhs


ParseTree = Leaf | Node


def tree_leaves(tree: ParseTree) -> Iterator[Token]:
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Leaf):
            yield t.token
        else:
            stack.extend(reversed(t.children))


def tree_frontier(tree: ParseTree) -> str:
    return "".join(tok.lexeme for tok in tree_leaves(tree))


# --- the parser --------------------------------------------------------------------

class _GssNode:
    __slots__ = ("state", "pos", "edges", "_edge_keys", "reductions", "initialized")

    def __init__(self, state: int, pos: int):
        self.state = state
        self.pos = pos
        self.edges: list[tuple["_GssNode", SppfNode]] = []
        self._edge_keys: set = set()
        self.reductions: tuple[Reduce, ...] = ()
        self.initialized = False

    def add_edge(self, target: "_GssNode", label: SppfNode) -> bool:
        key = (id(target), id(label))
        if key in self._edge_keys:
            return False
        self._edge_keys.add(key)
        self.edges.append((target, label))
        return True


class _Run:
    def __init__(self, compiled: CompiledGrammar, text: str,
                 registry: RecognizerRegistry):
        self.compiled = compiled
        self.grammar = compiled.grammar
        self.text = text
        self.registry = registry
        self.nodes: dict[tuple, SymbolNode] = {}
        self.leaves: dict[tuple, TokenNode] = {}
        self.frontiers: dict[int, dict[int, _GssNode]] = {}
        self.match_cache: dict[tuple, Optional[Token]] = {}
        self.accepted: list[int] = []
        self.reduce_queue: list = []
        self.shift_queue: list = []
        self.current = 0

    # -- scanning helpers --

    def match(self, pos: int, terminal: str) -> Optional[Token]:
        key = (pos, terminal)
        if key not in self.match_cache:
            p = pos
            if self.grammar.skip_whitespace:
                p = skip_whitespace(self.text, pos)
            length = match_terminal(
                self.text, p, self.grammar.terminals[terminal], self.registry
            )
            self.match_cache[key] = (
                Token(terminal, self.text[p:p + length], p, p + length)
                if length else None
            )
        return self.match_cache[key]

    def at_end(self, pos: int) -> bool:
        if self.grammar.skip_whitespace:
            pos = skip_whitespace(self.text, pos)
        return pos >= len(self.text)

    # -- forest helpers --

    def leaf(self, token: Token) -> TokenNode:
        key = (token.terminal_id, token.start, token.end)
        if key not in self.leaves:
            self.leaves[key] = TokenNode(token)
        return self.leaves[key]

    def symbol_node(self, symbol: str, start: int, end: int) -> SymbolNode:
        key = (symbol, start, end)
        node = self.nodes.get(key)
        if node is None:
            node = SymbolNode(symbol, start, end)
            self.nodes[key] = node
            if start == end:
                # empty span: preload every epsilon derivation so reductions
                # arriving by any route merge into the same alternatives
                for prod in self.compiled.nullable_productions(symbol):
                    children = tuple(
                        self.symbol_node(s.name, start, start) for s in prod.rhs
                    )
                    node.add_alt(prod.index, children)
        return node

    # -- GSS helpers --

    def gss_node(self, state: int, pos: int) -> tuple[_GssNode, bool]:
        frontier = self.frontiers.setdefault(pos, {})
        node = frontier.get(state)
        if node is None:
            node = _GssNode(state, pos)
            frontier[state] = node
            return node, True
        return node, False

    def init_node(self, v: _GssNode) -> None:
        """Evaluate a frontier node's actions under the tokens visible at its
        position; fills the reduce/shift queues."""
        assert not v.initialized
        v.initialized = True
        eps_reds: dict = {}
        reds: dict = {}
        for terminal, actions in self.compiled.actions[v.state].items():
            if terminal == EOF:
                if not self.at_end(v.pos):
                    continue
                token = None
            else:
                token = self.match(v.pos, terminal)
                if token is None:
                    continue
            for action in actions:
                if isinstance(action, Shift):
                    self.shift_queue.append((v, token, action.state))
                elif isinstance(action, Reduce):
                    bucket = eps_reds if action.length == 0 else reds
                    bucket.setdefault((action.production, action.length), action)
                elif isinstance(action, Accept):
                    if v.pos not in self.accepted:
                        self.accepted.append(v.pos)
        v.reductions = tuple(reds.values())
        for red in eps_reds.values():
            self.reduce_queue.append((v, red, None))
        for target, label in v.edges:
            for red in v.reductions:
                self.reduce_queue.append((target, red, label))

    def link(self, w: _GssNode, target: _GssNode, label: SppfNode) -> None:
        """Add a GSS edge during reduction; new edges re-trigger the
        reductions that can pop through them."""
        if w.add_edge(target, label) and w.initialized:
            for red in w.reductions:
                self.reduce_queue.append((target, red, label))

    # -- main loop --

    def run(self) -> ParseForest:
        self.gss_node(0, 0)
        heap = [0]
        queued = {0}
        processed = set()
        while heap:
            pos = heapq.heappop(heap)
            if pos in processed:
                continue
            processed.add(pos)
            self.current = pos
            self.reduce_queue = []
            self.shift_queue = []
            for v in list(self.frontiers.get(pos, {}).values()):
                self.init_node(v)
            while self.reduce_queue:
                self.reducer(*self.reduce_queue.pop())
            for v, token, state in self.shift_queue:
                w, _ = self.gss_node(state, token.end)
                w.add_edge(v, self.leaf(token))
                if token.end not in queued:
                    queued.add(token.end)
                    heapq.heappush(heap, token.end)

        root = None
        if self.accepted:
            end = max(self.accepted)
            root = self.symbol_node(self.grammar.start, 0, end)
        failure = None
        if root is None or not root.alts:
            failure = self.diagnose()
            root = None
        return ParseForest(self.grammar, root, failure)

    def reducer(self, u: _GssNode, red: Reduce, first_label) -> None:
        production = self.grammar.productions[red.production]
        lhs = production.lhs
        pos = self.current
        eps_tail = tuple(self.symbol_node(s, pos, pos) for s in red.eps_suffix)
        if red.length == 0:
            label = self.symbol_node(lhs, pos, pos)
            state = self.compiled.gotos[u.state][lhs]
            w, created = self.gss_node(state, pos)
            if created:
                self.init_node(w)
            self.link(w, u, label)
            return
        for endpoint, prefix in self.paths(u, red.length - 1):
            children = tuple(reversed(prefix)) + (first_label,) + eps_tail
            node = self.symbol_node(lhs, endpoint.pos, pos)
            node.add_alt(red.production, children)
            state = self.compiled.gotos[endpoint.state][lhs]
            w, created = self.gss_node(state, pos)
            if created:
                self.init_node(w)
            self.link(w, endpoint, node)

    def paths(self, u: _GssNode, steps: int) -> list[tuple[_GssNode, list]]:
        if steps == 0:
            return [(u, [])]
        out = []
        stack = [(u, steps, [])]
        while stack:
            node, remaining, labels = stack.pop()
            if remaining == 0:
                out.append((node, labels))
                continue
            for target, label in node.edges:
                stack.append((target, remaining - 1, labels + [label]))
        return out

    def diagnose(self) -> NoParse:
        furthest = max(self.frontiers)
        expected: set[str] = set()
        for v in self.frontiers[furthest].values():
            expected.update(self.compiled.scan_terminals[v.state])
        pos = furthest
        if self.grammar.skip_whitespace:
            pos = skip_whitespace(self.text, pos)
        return NoParse(pos, tuple(sorted(expected)), self.at_end(furthest))


def parse(
    compiled: CompiledGrammar,
    text: str,
    registry: RecognizerRegistry = DEFAULT_REGISTRY,
) -> ParseForest:
    """Parse ``text`` from the grammar's start symbol, consuming all input.

    Returns a forest whose root is ``None`` (with a diagnostic in
    ``forest.failure``) when there is no derivation.
    """
    return _Run(compiled, text, registry).run()


# --- counting and enumeration ----------------------------------------------------

def _count_root(root: Optional[SymbolNode]) -> int:
    if root is None:
        return 0
    memo: dict[int, int] = {}
    stack: list = [root]
    while stack:
        node = stack.pop()
        if id(node) in memo:
            continue
        if isinstance(node, TokenNode):
            memo[id(node)] = 1
            continue
        pending = [c for _, kids in node.alts for c in kids if id(c) not in memo]
        if pending:
            stack.append(node)
            stack.extend(pending)
            continue
        total = 0
        for _, kids in node.alts:
            ways = 1
            for c in kids:
                ways *= memo[id(c)]
            total += ways
        memo[id(node)] = total
    return memo[id(root)]


def count_trees(forest: ParseForest) -> int:
    """Exact number of derivations, saturating at 2**64 - 1."""
    return min(forest.exact_count(), SATURATION)


def enumerate_trees(forest: ParseForest, cap: int = DEFAULT_ENUM_CAP) -> list[ParseTree]:
    """All derivation trees in a deterministic order (trees compare by the
    production indices along a preorder walk, leftmost difference first).

    Raises :class:`TooManyParsesError` when the forest holds more than
    ``cap`` trees; the error carries the exact count while it is at most
    ten times the cap, otherwise that bound as a floor.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    if forest.root is None:
        return []
    total = forest.exact_count()
    if total > cap:
        if total <= 10 * cap:
            raise TooManyParsesError(min(total, SATURATION), exact=True)
        raise TooManyParsesError(min(10 * cap, SATURATION), exact=False)

    productions = forest.grammar.productions
    memo: dict[int, tuple] = {}
    stack: list = [forest.root]
    while stack:
        node = stack.pop()
        if id(node) in memo:
            continue
        if isinstance(node, TokenNode):
            memo[id(node)] = (Leaf(node.token),)
            continue
        pending = [c for _, kids in node.alts for c in kids if id(c) not in memo]
        if pending:
            stack.append(node)
            stack.extend(pending)
            continue
        built = []
        for prod_index, kids in node.alts:
            combos: list[tuple] = [()]
            for child in kids:
                combos = [
                    prefix + (t,) for prefix in combos for t in memo[id(child)]
                ]
            built.extend(Node(productions[prod_index], combo) for combo in combos)
        memo[id(node)] = tuple(built)

    return sorted(memo[id(forest.root)], key=_tree_sort_key)


def _tree_sort_key(tree: ParseTree) -> tuple:
    sig = []
    stack = [tree]
    while stack:
        t = stack.pop()
        if isinstance(t, Leaf):
            sig.append((0, t.token.terminal_id, t.token.lexeme))
        else:
            sig.append((1, t.production.index))
            stack.extend(reversed(t.children))
    return tuple(sig)
