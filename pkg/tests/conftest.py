import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stexify.fixtures import fixture_path, lambda_actions, lambda_grammar
from stexify.tables import compile_grammar

GOLDEN_DIR = Path(__file__).parent / "golden"

DEMO_FORMULAS = [
    r"\lambda xyz.xy",
    r"\lambda xy.x",
    "y",
    "xyzw",
    r"(\lambda xy.xy)",
    r"\lambda xy.x",
    "y",
    "xy",
]

DEMO_AMBIGUOUS = {0: 2, 3: 5, 4: 2}  # formula id -> candidate count


@pytest.fixture(scope="session")
def lam_grammar():
    return lambda_grammar()


@pytest.fixture(scope="session")
def lam_compiled(lam_grammar):
    return compile_grammar(lam_grammar)


@pytest.fixture(scope="session")
def lam_actions(lam_grammar):
    return lambda_actions(lam_grammar)


@pytest.fixture()
def demo_doc(tmp_path):
    dest = tmp_path / "demo-file.tex"
    shutil.copyfile(str(fixture_path("demo-file.tex")), dest)
    return dest
