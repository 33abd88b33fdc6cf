"""LALR(1) table construction that keeps conflicts as data.

The generalized parser forks on conflicts, so action cells hold *sets* of
actions instead of being resolved.  Reduce actions are also emitted for
"right-nulled" items (dot followed by a nullable tail); the runtime finishes
such rules with statically built epsilon derivations, which is what makes
generalized parsing of grammars with epsilon rules terminate correctly.

Construction is the standard one: LR(0) item sets, then LALR(1) lookaheads
by spontaneous generation and propagation over kernel items.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass

from .errors import InvalidGrammarError
from .grammar import (
    Grammar,
    NonTerminal,
    Production,
    ValidationReport,
    nullable_nonterminals,
    validate,
)

EOF = "$"
_SENTINEL = object()  # stand-in lookahead used during propagation discovery


@dataclass(frozen=True)
class Shift:
    state: int


@dataclass(frozen=True)
class Reduce:
    production: int
    length: int  # symbols actually popped (dot position)
    eps_suffix: tuple[str, ...]  # nullable tail completed with epsilon trees


@dataclass(frozen=True)
class Accept:
    pass


Action = Shift | Reduce | Accept


@dataclass(frozen=True)
class Conflict:
    state: int
    terminal: str
    actions: tuple[Action, ...]

    @property
    def kind(self) -> str:
        shifts = sum(isinstance(a, Shift) for a in self.actions)
        reduces = sum(isinstance(a, Reduce) for a in self.actions)
        if shifts and reduces:
            return "shift/reduce"
        if reduces > 1:
            return "reduce/reduce"
        return "other"


class CompiledGrammar:
    """Immutable parse tables for one grammar; shareable across threads."""

    def __init__(
        self,
        grammar: Grammar,
        actions: list[dict[str, tuple[Action, ...]]],
        gotos: list[dict[str, int]],
        nullable: frozenset[str],
    ):
        self.grammar = grammar
        self.actions = tuple(actions)
        self.gotos = tuple(gotos)
        self.nullable = nullable
        self.state_count = len(actions)
        # terminals a state can act on, used by the scanner and diagnostics
        self.scan_terminals = tuple(
            tuple(t for t in sorted(acts) if t != EOF) for acts in self.actions
        )
        self._nullable_prods: dict[str, tuple[Production, ...]] = {}
        for p in grammar.productions:
            if all(isinstance(s, NonTerminal) and s.name in nullable for s in p.rhs):
                self._nullable_prods.setdefault(p.lhs, ())
                self._nullable_prods[p.lhs] += (p,)

    def nullable_productions(self, name: str) -> tuple[Production, ...]:
        return self._nullable_prods.get(name, ())

    def conflicts(self) -> list[Conflict]:
        out = []
        for state, acts in enumerate(self.actions):
            for terminal, entries in sorted(acts.items()):
                if len(entries) > 1:
                    out.append(Conflict(state, terminal, entries))
        return out


def compile_grammar(grammar: Grammar) -> CompiledGrammar:
    """Build LALR(1) tables; refuses grammars whose validation reports
    cycles or unproductive nonterminals."""
    report: ValidationReport = validate(grammar)
    if not report.ok:
        raise InvalidGrammarError(report)

    prods: list[tuple[str, tuple[str, ...]]] = []
    for p in grammar.productions:
        prods.append((p.lhs, tuple(
            s.name if isinstance(s, NonTerminal) else s.id for s in p.rhs
        )))
    aug = len(prods)
    prods.append(("$accept", (grammar.start,)))

    nonterminals = set(grammar.nonterminals) | {"$accept"}
    prods_of: dict[str, list[int]] = defaultdict(list)
    for i, (lhs, _) in enumerate(prods):
        prods_of[lhs].append(i)

    nullable = nullable_nonterminals(grammar)

    first: dict[str, set[str]] = {}
    for _, rhs in prods:
        for s in rhs:
            if s not in nonterminals:
                first[s] = {s}
    for nt in nonterminals:
        first.setdefault(nt, set())
    changed = True
    while changed:
        changed = False
        for lhs, rhs in prods:
            acc = first[lhs]
            before = len(acc)
            for s in rhs:
                acc |= first[s]
                if s not in nullable:
                    break
            if len(acc) != before:
                changed = True

    def first_seq(seq: tuple[str, ...]) -> tuple[set[str], bool]:
        out: set[str] = set()
        for s in seq:
            out |= first[s]
            if s not in nullable:
                return out, False
        return out, True

    def closure(kernel: frozenset) -> frozenset:
        items = set(kernel)
        stack = list(kernel)
        while stack:
            p, d = stack.pop()
            rhs = prods[p][1]
            if d < len(rhs) and rhs[d] in nonterminals:
                for q in prods_of[rhs[d]]:
                    if (q, 0) not in items:
                        items.add((q, 0))
                        stack.append((q, 0))
        return frozenset(items)

    # --- LR(0) automaton ---
    start_kernel = frozenset({(aug, 0)})
    kernels = [start_kernel]
    index = {start_kernel: 0}
    trans: list[dict[str, int]] = []
    work = deque([0])
    while work:
        i = work.popleft()
        items = closure(kernels[i])
        moves: dict[str, list] = defaultdict(list)
        for (p, d) in items:
            rhs = prods[p][1]
            if d < len(rhs):
                moves[rhs[d]].append((p, d + 1))
        row: dict[str, int] = {}
        for sym in sorted(moves):
            kernel = frozenset(moves[sym])
            if kernel not in index:
                index[kernel] = len(kernels)
                kernels.append(kernel)
                work.append(index[kernel])
            row[sym] = index[kernel]
        trans.append(row)

    # --- LALR(1) lookaheads for kernel items ---
    def lr1_closure(seed: dict) -> dict:
        items = {item: set(las) for item, las in seed.items()}
        queue = deque(items)
        while queue:
            p, d = queue.popleft()
            rhs = prods[p][1]
            if d >= len(rhs) or rhs[d] not in nonterminals:
                continue
            tail_first, tail_nullable = first_seq(rhs[d + 1:])
            new = set(tail_first)
            if tail_nullable:
                new |= items[(p, d)]
            for q in prods_of[rhs[d]]:
                cur = items.setdefault((q, 0), set())
                if not new <= cur:
                    cur |= new
                    queue.append((q, 0))
        return items

    la: dict[tuple[int, tuple], set] = {
        (i, k): set() for i, kern in enumerate(kernels) for k in kern
    }
    la[(0, (aug, 0))].add(EOF)
    propagate: dict[tuple, set] = defaultdict(set)
    for i, kern in enumerate(kernels):
        for k in kern:
            probe = lr1_closure({k: {_SENTINEL}})
            for (p, d), las in probe.items():
                rhs = prods[p][1]
                if d >= len(rhs):
                    continue
                target = (trans[i][rhs[d]], (p, d + 1))
                for a in las:
                    if a is _SENTINEL:
                        propagate[(i, k)].add(target)
                    else:
                        la[target].add(a)
    changed = True
    while changed:
        changed = False
        for src, targets in propagate.items():
            for dst in targets:
                if not la[src] <= la[dst]:
                    la[dst] |= la[src]
                    changed = True

    # --- actions over fully closed item sets ---
    actions: list[dict[str, tuple[Action, ...]]] = []
    gotos: list[dict[str, int]] = []
    for i, kern in enumerate(kernels):
        item_las = lr1_closure({k: la[(i, k)] for k in kern})
        cell: dict[str, list[Action]] = defaultdict(list)
        for (p, d) in sorted(item_las):
            las = item_las[(p, d)]
            lhs, rhs = prods[p]
            if d < len(rhs) and rhs[d] not in nonterminals:
                action = Shift(trans[i][rhs[d]])
                if action not in cell[rhs[d]]:
                    cell[rhs[d]].append(action)
            suffix = rhs[d:]
            if all(s in nullable for s in suffix):
                if p == aug:
                    if Accept() not in cell[EOF]:
                        cell[EOF].append(Accept())
                else:
                    action = Reduce(p, d, suffix)
                    for a in sorted(las):
                        if action not in cell[a]:
                            cell[a].append(action)
        actions.append({t: tuple(entries) for t, entries in cell.items()})
        gotos.append({s: j for s, j in trans[i].items() if s in nonterminals})

    return CompiledGrammar(grammar, actions, gotos, nullable)
