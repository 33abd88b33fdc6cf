"""Parse trees to ASTs via per-nonterminal actions.

The AST mirrors semantic macro calls: node names are macro names, literal
punctuation disappears, right-recursive list rules flatten into one list
node, and a parent remembers which of its children are flexary lists.

Default actions are derived from the grammar shape; an action table loaded
from a JSON sidecar can override individual nonterminals (for example
renaming a parenthesis rule to ``dobrackets``).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from .errors import ActionMismatchError
from .glr import Leaf, ParseTree
from .grammar import Grammar, Literal, NonTerminal


# --- AST nodes -----------------------------------------------------------------

@dataclass(frozen=True)
class AstLeaf:
    name: str
    lexeme: str


@dataclass(frozen=True)
class AstNode:
    name: str
    children: tuple
    flexary_slots: frozenset[int] = frozenset()


Ast = AstLeaf | AstNode


def ast_to_json(ast: Ast) -> dict:
    if isinstance(ast, AstLeaf):
        return {"name": ast.name, "lexeme": ast.lexeme}
    out: dict = {"name": ast.name, "children": [ast_to_json(c) for c in ast.children]}
    if ast.flexary_slots:
        out["flexary"] = sorted(ast.flexary_slots)
    return out


def ast_from_json(data: dict) -> Ast:
    if "lexeme" in data:
        return AstLeaf(data["name"], data["lexeme"])
    return AstNode(
        data["name"],
        tuple(ast_from_json(c) for c in data.get("children", ())),
        frozenset(data.get("flexary", ())),
    )


# --- actions ----------------------------------------------------------------------

class Kind(enum.Enum):
    PASS_THROUGH = "pass"
    NODE = "node"
    FLATTEN_LIST = "flatten"
    LEAF_FROM_TOKEN = "leaf"
    DROP = "drop"


@dataclass(frozen=True)
class ActionSpec:
    kind: Kind
    rename: str | None = None
    keep: tuple[int, ...] | None = None  # rhs positions; None keeps non-literals


@dataclass(frozen=True)
class ActionTable:
    entries: dict[str, ActionSpec]
    literal_terminals: frozenset[str]

    def get(self, nonterminal: str) -> ActionSpec:
        try:
            return self.entries[nonterminal]
        except KeyError:
            raise ActionMismatchError(
                f"no action for nonterminal '{nonterminal}'"
            ) from None

    def override(self, overrides: dict[str, ActionSpec]) -> "ActionTable":
        merged = dict(self.entries)
        merged.update(overrides)
        return ActionTable(merged, self.literal_terminals)


def default_actions(grammar: Grammar) -> ActionTable:
    """Derive actions from grammar shape: literal tokens drop, regex and
    recognizer tokens become leaves, `L -> x L | x` list rules flatten,
    all-unit rules pass through, everything else builds a named node."""
    literal_terminals = frozenset(
        tid for tid, kind in grammar.terminals.items() if isinstance(kind, Literal)
    )
    entries: dict[str, ActionSpec] = {}
    for nt in grammar.nonterminals:
        prods = grammar.productions_of(nt)
        if _is_list_rule(nt, prods):
            entries[nt] = ActionSpec(Kind.FLATTEN_LIST)
            continue
        kept_counts = []
        for p in prods:
            kept = [
                s for s in p.rhs
                if isinstance(s, NonTerminal) or s.id not in literal_terminals
            ]
            kept_counts.append(len(kept))
        if kept_counts and all(c == 1 for c in kept_counts):
            entries[nt] = ActionSpec(Kind.PASS_THROUGH)
        else:
            entries[nt] = ActionSpec(Kind.NODE)
    return ActionTable(entries, literal_terminals)


def _is_list_rule(nt: str, prods) -> bool:
    if len(prods) != 2:
        return False
    a, b = prods
    shorter, longer = (a, b) if len(a.rhs) < len(b.rhs) else (b, a)
    if not shorter.rhs:
        return False
    if any(isinstance(s, NonTerminal) and s.name == nt for s in shorter.rhs):
        return False
    return longer.rhs == shorter.rhs + (NonTerminal(nt),)


# --- building -------------------------------------------------------------------------

_DROPPED = object()
_LIST = "list"
_VALUE = "value"


def build_ast(tree: ParseTree, actions: ActionTable) -> Ast:
    """Apply actions bottom-up; the result carries no literal-token leaves
    and list rules are fully flattened."""
    result, kind = _build(tree, actions)
    if result is _DROPPED:
        raise ActionMismatchError("the whole tree was dropped by its actions")
    return result


def _build(tree: ParseTree, actions: ActionTable):
    if isinstance(tree, Leaf):
        if tree.token.terminal_id in actions.literal_terminals:
            return _DROPPED, _VALUE
        return AstLeaf(tree.token.terminal_id, tree.token.lexeme), _VALUE

    spec = actions.get(tree.production.lhs)
    built = [_build(c, actions) for c in tree.children]

    if spec.kind is Kind.DROP:
        return _DROPPED, _VALUE

    if spec.kind is Kind.LEAF_FROM_TOKEN:
        toks = [t for t in tree.children if isinstance(t, Leaf)]
        if len(toks) != len(tree.children):
            raise ActionMismatchError(
                f"leaf action on '{tree.production.lhs}' needs token children only"
            )
        lexeme = "".join(t.token.lexeme for t in toks)
        return AstLeaf(spec.rename or tree.production.lhs, lexeme), _VALUE

    if spec.kind is Kind.FLATTEN_LIST:
        members = []
        for (child, child_kind) in built:
            if child is _DROPPED:
                continue
            if child_kind == _LIST and isinstance(child, AstNode) \
                    and child.name == tree.production.lhs:
                members.extend(child.children)
            else:
                members.append(child)
        return AstNode(tree.production.lhs, tuple(members)), _LIST

    if spec.keep is not None:
        kept = []
        for idx in spec.keep:
            if idx >= len(built):
                raise ActionMismatchError(
                    f"keep position {idx} out of range for {tree.production}"
                )
            child, child_kind = built[idx]
            if child is _DROPPED:
                if not isinstance(tree.children[idx], Leaf):
                    raise ActionMismatchError(
                        f"keep position {idx} selects a dropped subtree"
                    )
                # explicitly kept literals come back as leaves
                tok = tree.children[idx].token
                child, child_kind = AstLeaf(tok.terminal_id, tok.lexeme), _VALUE
            kept.append((child, child_kind))
    else:
        kept = [(c, k) for c, k in built if c is not _DROPPED]

    if spec.kind is Kind.PASS_THROUGH:
        if len(kept) != 1:
            raise ActionMismatchError(
                f"pass-through on '{tree.production.lhs}' kept {len(kept)} children"
            )
        return kept[0]

    # Kind.NODE
    name = spec.rename or tree.production.lhs
    flexary = frozenset(i for i, (_, k) in enumerate(kept) if k == _LIST)
    return AstNode(name, tuple(c for c, _ in kept), flexary), _VALUE


# --- sidecar persistence -----------------------------------------------------------------

def actions_to_json(table: ActionTable) -> dict:
    out = {}
    for nt, spec in table.entries.items():
        entry: dict = {"kind": spec.kind.value}
        if spec.rename:
            entry["rename"] = spec.rename
        if spec.keep is not None:
            entry["keep"] = list(spec.keep)
        out[nt] = entry
    return {"version": 1, "actions": out}


def actions_from_json(grammar: Grammar, data: dict) -> ActionTable:
    """Overlay sidecar entries onto the grammar's default actions."""
    overrides = {}
    for nt, entry in data.get("actions", {}).items():
        try:
            kind = Kind(entry["kind"])
        except ValueError:
            raise ActionMismatchError(
                f"unknown action kind {entry['kind']!r} for '{nt}'"
            ) from None
        overrides[nt] = ActionSpec(
            kind=kind,
            rename=entry.get("rename"),
            keep=tuple(entry["keep"]) if "keep" in entry else None,
        )
    return default_actions(grammar).override(overrides)


def load_actions_file(grammar: Grammar, path) -> ActionTable:
    with open(path, "r", encoding="utf-8") as fh:
        return actions_from_json(grammar, json.load(fh))
