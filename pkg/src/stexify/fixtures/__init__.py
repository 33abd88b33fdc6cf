"""Bundled fixtures: the lambda-calculus grammar and its action overlay,
the demo document, and macro modules exercising grammar generation."""

from importlib.resources import files

from ..astbuild import ActionTable, actions_from_json
from ..grammar import Grammar, parse_grammar_text

import json


def fixture_path(name: str):
    return files("stexify.fixtures").joinpath(name)


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


def lambda_grammar() -> Grammar:
    return parse_grammar_text(fixture_text("lambda.gram"), name="lambda")


def lambda_actions(grammar: Grammar | None = None) -> ActionTable:
    grammar = grammar or lambda_grammar()
    return actions_from_json(grammar, json.loads(fixture_text("lambda.actions.json")))
