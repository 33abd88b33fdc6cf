import random

import pytest

from stexify.errors import UnterminatedMathError
from stexify.fixtures import fixture_text
from stexify.texdoc import (
    MathKind,
    RewritePlan,
    default_output_path,
    extract_formulas,
    rewrite,
)

from conftest import DEMO_FORMULAS


# --- extraction ------------------------------------------------------------------

def test_demo_file_extraction():
    spans = extract_formulas(fixture_text("demo-file.tex"))
    assert [s.raw for s in spans] == DEMO_FORMULAS
    assert [s.id for s in spans] == list(range(8))
    assert all(s.kind is MathKind.INLINE for s in spans)


def test_no_math():
    assert extract_formulas("no math here") == []


def test_escaped_dollar():
    spans = extract_formulas("cost: \\$5 and $x$")
    assert [s.raw for s in spans] == ["x"]


def test_display_dollars_and_brackets():
    spans = extract_formulas("a $$x y$$ b \\[z\\] c")
    assert [(s.raw, s.kind) for s in spans] == [
        ("x y", MathKind.DISPLAY), ("z", MathKind.DISPLAY),
    ]


def test_environments():
    doc = "\\begin{equation}\n a+b \n\\end{equation} and \\begin{align*}x\\end{align*}"
    spans = extract_formulas(doc)
    assert [(s.environment, s.raw.strip()) for s in spans] == [
        ("equation", "a+b"), ("align*", "x"),
    ]
    assert doc[spans[0].outer[0]:spans[0].outer[1]].startswith("\\begin{equation}")


def test_comments_skipped():
    spans = extract_formulas("text % $hidden$\n$shown$ % more $no$\n")
    assert [s.raw for s in spans] == ["shown"]


def test_escaped_percent_is_not_comment():
    spans = extract_formulas("100\\% of $x$")
    assert [s.raw for s in spans] == ["x"]


def test_verbatim_skipped():
    doc = "\\begin{verbatim}$ not math $\\end{verbatim} $yes$"
    assert [s.raw for s in extract_formulas(doc)] == ["yes"]


def test_lstlisting_and_minted_skipped():
    doc = ("\\begin{lstlisting}\n$a$\n\\end{lstlisting}"
           "\\begin{minted}{python}\n$b$\n\\end{minted} $c$")
    assert [s.raw for s in extract_formulas(doc)] == ["c"]


def test_unterminated_math():
    with pytest.raises(UnterminatedMathError) as exc:
        extract_formulas("before $x")
    assert exc.value.position == 7


def test_unterminated_display():
    with pytest.raises(UnterminatedMathError):
        extract_formulas("\\[ x")


def test_escaped_dollar_inside_math():
    spans = extract_formulas("$a\\$b$")
    assert [s.raw for s in spans] == ["a\\$b"]


def test_spans_are_disjoint_and_ordered():
    spans = extract_formulas(fixture_text("demo-file.tex"))
    last_end = -1
    for s in spans:
        assert s.outer[0] > last_end
        assert s.outer[0] < s.inner[0] <= s.inner[1] < s.outer[1]
        last_end = s.outer[1]


# --- rewriting ---------------------------------------------------------------------

def test_rewrite_single_replacement():
    doc = fixture_text("demo-file.tex")
    spans = extract_formulas(doc)
    target = next(s for s in spans if s.raw == r"(\lambda xy.xy)")
    replacement = r"\dobrackets{\abs{\var{x},\var{y}}{\app{\var{x}}{\var{y}}}}"
    out = rewrite(doc, spans, RewritePlan(replacements={target.id: replacement}))
    assert out[:target.inner[0]] == doc[:target.inner[0]]
    assert out[target.inner[0]:target.inner[0] + len(replacement)] == replacement
    assert out[target.inner[0] + len(replacement):] == doc[target.inner[1]:]


def test_rewrite_empty_plan_is_identity():
    doc = fixture_text("demo-file.tex")
    assert rewrite(doc, extract_formulas(doc), RewritePlan()) == doc


def test_rewrite_unknown_id():
    doc = "$x$"
    with pytest.raises(ValueError):
        rewrite(doc, extract_formulas(doc), RewritePlan(replacements={9: "y"}))


def test_extraction_stable_under_noop_rewrite():
    doc = fixture_text("demo-file.tex")
    spans = extract_formulas(doc)
    assert extract_formulas(rewrite(doc, spans, RewritePlan())) == spans


def test_extraction_idempotent_after_macro_replacements():
    # replacements carry no $, so re-extraction sees the same formula skeleton
    doc = fixture_text("demo-file.tex")
    spans = extract_formulas(doc)
    plan = RewritePlan(replacements={s.id: f"\\var{{v{s.id}}}" for s in spans})
    rewritten = rewrite(doc, spans, plan)
    again = extract_formulas(rewritten)
    assert [s.id for s in again] == [s.id for s in spans]
    assert [s.kind for s in again] == [s.kind for s in spans]
    assert [s.raw for s in again] == [f"\\var{{v{s.id}}}" for s in spans]
    # a second no-op pass changes nothing
    assert rewrite(rewritten, again, RewritePlan()) == rewritten


def test_default_output_path():
    assert default_output_path("demo.tex") == "demo.stexified.tex"
    assert default_output_path("notes") == "notes.stexified.tex"


# --- randomized byte fidelity ----------------------------------------------------------

WORDS = ["alpha", "beta", "x+y", "sin", "42", "f(x)", "a_b"]
CHUNKS = [
    "plain text ", "more words\n", "\\$5 ", "100\\% ", "% comment $zap$\n",
    "\\textbf{bold} ", "\n\n",
]


def random_document(rng):
    parts = []
    for _ in range(rng.randint(1, 14)):
        roll = rng.random()
        if roll < 0.45:
            parts.append(rng.choice(CHUNKS))
        elif roll < 0.7:
            parts.append(f"${rng.choice(WORDS)}$")
        elif roll < 0.8:
            parts.append(f"$${rng.choice(WORDS)}$$")
        elif roll < 0.9:
            parts.append(f"\\[{rng.choice(WORDS)}\\]")
        else:
            env = rng.choice(["equation", "align*"])
            parts.append(f"\\begin{{{env}}}{rng.choice(WORDS)}\\end{{{env}}}")
    return "".join(parts)


def test_random_documents_noop_identity():
    rng = random.Random(1234)
    for _ in range(500):
        doc = random_document(rng)
        spans = extract_formulas(doc)
        assert rewrite(doc, spans, RewritePlan()) == doc


def test_random_single_replacement_confined_to_inner_span():
    rng = random.Random(4321)
    done = 0
    while done < 200:
        doc = random_document(rng)
        spans = extract_formulas(doc)
        if not spans:
            continue
        target = rng.choice(spans)
        out = rewrite(doc, spans,
                      RewritePlan(replacements={target.id: "REPLACED"}))
        i, j = target.inner
        assert out[:i] == doc[:i]
        assert out[i:i + 8] == "REPLACED"
        assert out[i + 8:] == doc[j:]
        done += 1
