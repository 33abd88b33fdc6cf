import pytest

from stexify.astbuild import (
    ActionSpec,
    AstLeaf,
    AstNode,
    Kind,
    actions_from_json,
    actions_to_json,
    ast_from_json,
    ast_to_json,
    build_ast,
    default_actions,
)
from stexify.errors import ActionMismatchError
from stexify.glr import enumerate_trees, parse
from stexify.grammar import parse_grammar_text
from stexify.tables import compile_grammar

from conftest import DEMO_FORMULAS


def ast_of(compiled, actions, text, which=0):
    trees = enumerate_trees(parse(compiled, text))
    return build_ast(trees[which], actions)


# --- defaults ---------------------------------------------------------------------

def test_default_action_kinds(lam_grammar):
    table = default_actions(lam_grammar)
    assert table.entries["lexp"].kind is Kind.PASS_THROUGH
    assert table.entries["varlist"].kind is Kind.FLATTEN_LIST
    assert table.entries["app"].kind is Kind.NODE
    assert table.entries["abs"].kind is Kind.NODE
    # the overlay later renames parexp; on its own it is a unit rule
    assert table.entries["parexp"].kind is Kind.PASS_THROUGH
    assert table.literal_terminals == {"lam", "dot", "lit_0", "lit_1"}


def test_fixture_overlay_renames_parexp(lam_grammar, lam_actions):
    spec = lam_actions.entries["parexp"]
    assert spec.kind is Kind.NODE
    assert spec.rename == "dobrackets"


def test_all_literal_children_make_bare_node():
    g = parse_grammar_text('s: "a";')
    table = default_actions(g)
    assert table.entries["s"].kind is Kind.NODE
    compiled = compile_grammar(g)
    assert ast_of(compiled, table, "a") == AstNode("s", ())


def test_pair_rule_keeps_both():
    g = parse_grammar_text("pair: item item;\nterminals\nitem: /[a-z]/;")
    table = default_actions(g)
    assert table.entries["pair"].kind is Kind.NODE
    compiled = compile_grammar(g)
    assert ast_of(compiled, table, "ab") == AstNode(
        "pair", (AstLeaf("item", "a"), AstLeaf("item", "b"))
    )


# --- fixture goldens ----------------------------------------------------------------

def test_identity_chain(lam_compiled, lam_actions):
    assert ast_of(lam_compiled, lam_actions, "x") == AstLeaf("var", "x")


def test_application(lam_compiled, lam_actions):
    assert ast_of(lam_compiled, lam_actions, "xy") == AstNode(
        "app", (AstLeaf("var", "x"), AstLeaf("var", "y"))
    )


def test_parenthesised_identity_matches_figure(lam_compiled, lam_actions):
    ast = ast_of(lam_compiled, lam_actions, r"(\lambda x.x)")
    assert ast == AstNode("dobrackets", (
        AstNode("abs", (
            AstNode("varlist", (AstLeaf("var", "x"),)),
            AstLeaf("var", "x"),
        ), flexary_slots=frozenset({0})),
    ))


def test_varlist_flattens_in_order(lam_compiled, lam_actions):
    ast = ast_of(lam_compiled, lam_actions, r"\lambda xyz.x")
    (varlist, _body) = ast.children
    assert varlist.name == "varlist"
    assert [leaf.lexeme for leaf in varlist.children] == ["x", "y", "z"]
    # no nested varlist survives flattening
    assert all(isinstance(m, AstLeaf) for m in varlist.children)


def test_arity_stability_over_demo_corpus(lam_compiled, lam_actions):
    def walk(node):
        if isinstance(node, AstLeaf):
            return
        if node.name in ("abs", "app"):
            assert len(node.children) == 2
        for child in node.children:
            walk(child)

    for formula in DEMO_FORMULAS:
        for tree in enumerate_trees(parse(lam_compiled, formula)):
            walk(build_ast(tree, lam_actions))


def test_distinct_trees_make_distinct_asts(lam_compiled, lam_actions):
    for formula in DEMO_FORMULAS:
        trees = enumerate_trees(parse(lam_compiled, formula))
        asts = [build_ast(t, lam_actions) for t in trees]
        assert len(set(asts)) == len(trees), formula


def test_no_literal_leaves_survive(lam_compiled, lam_actions):
    def leaves(node):
        if isinstance(node, AstLeaf):
            yield node
        else:
            for child in node.children:
                yield from leaves(child)

    for formula in DEMO_FORMULAS:
        for tree in enumerate_trees(parse(lam_compiled, formula)):
            for leaf in leaves(build_ast(tree, lam_actions)):
                assert leaf.name == "var"


# --- explicit action kinds -------------------------------------------------------------

def test_leaf_from_token_action():
    g = parse_grammar_text('s: d;\nd: "." ".";')
    table = default_actions(g).override({"d": ActionSpec(Kind.LEAF_FROM_TOKEN)})
    compiled = compile_grammar(g)
    assert ast_of(compiled, table, "..") == AstLeaf("d", "..")


def test_drop_action_erases_subtree():
    g = parse_grammar_text("s: noise w;\nnoise: /[!?]/;\nterminals\nw: /[a-z]+/;")
    table = default_actions(g).override({"noise": ActionSpec(Kind.DROP)})
    compiled = compile_grammar(g)
    assert ast_of(compiled, table, "!abc") == AstNode("s", (AstLeaf("w", "abc"),))


def test_keep_mask_out_of_range():
    g = parse_grammar_text("s: w;\nterminals\nw: /[a-z]+/;")
    table = default_actions(g).override(
        {"s": ActionSpec(Kind.NODE, keep=(5,))}
    )
    compiled = compile_grammar(g)
    (tree,) = enumerate_trees(parse(compiled, "abc"))
    with pytest.raises(ActionMismatchError):
        build_ast(tree, table)


def test_keep_mask_can_retain_literals():
    g = parse_grammar_text('s: "(" w ")";\nterminals\nw: /[a-z]+/;')
    table = default_actions(g).override(
        {"s": ActionSpec(Kind.NODE, keep=(0, 1))}
    )
    compiled = compile_grammar(g)
    (tree,) = enumerate_trees(parse(compiled, "(ab)"))
    ast = build_ast(tree, table)
    assert ast.children[0].lexeme == "("
    assert ast.children[1].lexeme == "ab"


# --- JSON round trips --------------------------------------------------------------------

def test_ast_json_round_trip(lam_compiled, lam_actions):
    for formula in DEMO_FORMULAS:
        for tree in enumerate_trees(parse(lam_compiled, formula)):
            ast = build_ast(tree, lam_actions)
            assert ast_from_json(ast_to_json(ast)) == ast


def test_actions_json_round_trip(lam_grammar, lam_actions):
    data = actions_to_json(lam_actions)
    again = actions_from_json(lam_grammar, data)
    assert again.entries == lam_actions.entries
