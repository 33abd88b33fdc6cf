"""Command-line driver: ``stexify {gen-grammar, parse, run, serve}``.

Exit codes: 0 success, 1 user error (bad input, no parse, unresolved
ambiguities), 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys
import traceback

from .astbuild import ast_to_json, default_actions, load_actions_file
from .emitter import DobracketsStyle, EmitterConfig
from .errors import StexifyError
from .gen import GenConfig, generate_grammar, scan_module_names, scan_stex_source
from .glr import DEFAULT_ENUM_CAP, count_trees, parse as glr_parse
from .grammar import parse_grammar_text
from .lexing import DEFAULT_REGISTRY
from .session import Session, SessionConfig, Status, analyze_formula
from .tables import compile_grammar

try:
    from importlib.metadata import version as _pkg_version
    __version__ = _pkg_version("stexify")
except Exception:  # pragma: no cover - not installed
    __version__ = "0.1.0"


def _load_grammar(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_grammar_text(fh.read(), name=os.path.basename(path))


def _load_actions(grammar, grammar_path: str, actions_path: str | None):
    if actions_path:
        return load_actions_file(grammar, actions_path)
    stem, _ = os.path.splitext(grammar_path)
    sidecar = stem + ".actions.json"
    if os.path.exists(sidecar):
        return load_actions_file(grammar, sidecar)
    return default_actions(grammar)


def _atomic_write(path: str, content: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(content)
    os.replace(tmp, path)


# --- gen-grammar -------------------------------------------------------------

def cmd_gen_grammar(args) -> int:
    specs_by_name: dict[str, object] = {}
    modules: list[str] = []
    for path in args.inputs:
        with open(path, "r", encoding="utf-8") as fh:
            source = fh.read()
        for spec in scan_stex_source(source):
            specs_by_name[spec.name] = spec
        for name in scan_module_names(source):
            if name not in modules:
                modules.append(name)
    config = GenConfig()
    result = generate_grammar(
        list(specs_by_name.values()), config, modules=tuple(modules)
    )
    actions_path = args.actions or os.path.splitext(args.output)[0] + ".actions.json"
    _atomic_write(args.output, result.grammar_text)
    _atomic_write(actions_path, json.dumps(result.actions_json(), indent=1, sort_keys=True))
    if args.json:
        print(json.dumps({
            "grammar": args.output,
            "actions": actions_path,
            "macros": sorted(specs_by_name),
            "warnings": result.warnings,
        }, indent=1))
    else:
        print(f"wrote {args.output} and {actions_path} "
              f"({len(specs_by_name)} macros)")
        if result.warnings:
            print(f"{len(result.warnings)} warning(s) need manual review:")
            for w in result.warnings:
                print(f"  - {w}")
    return 0


# --- parse ----------------------------------------------------------------------

def cmd_parse(args) -> int:
    grammar = _load_grammar(args.grammar)
    actions = _load_actions(grammar, args.grammar, args.actions)
    compiled = compile_grammar(grammar)

    if args.count_only:
        forest = glr_parse(compiled, args.formula, DEFAULT_REGISTRY)
        count = count_trees(forest)
        print(json.dumps({"count": count}) if args.json else count)
        return 0 if count else 1

    status, candidates, reason = analyze_formula(
        args.formula, compiled, actions, DEFAULT_REGISTRY, cap=args.cap
    )
    if args.json:
        print(json.dumps({
            "formula": args.formula,
            "status": status.value,
            "reason": reason,
            "candidates": [
                {"index": i, "ast": ast_to_json(c.ast), "preview": c.preview}
                for i, c in enumerate(candidates)
            ],
        }, indent=1))
    else:
        if status is Status.UNPARSED:
            print(f"no parse: {reason}", file=sys.stderr)
        else:
            plural = "" if len(candidates) == 1 else "s"
            print(f"{len(candidates)} candidate{plural}:")
            for i, c in enumerate(candidates):
                print(f"  {i + 1}. {c.preview}")
    return 0 if candidates else 1


# --- run ------------------------------------------------------------------------------

def cmd_run(args) -> int:
    grammar = _load_grammar(args.grammar)
    actions = _load_actions(grammar, args.grammar, args.actions)
    emitter = EmitterConfig(dobrackets_style=DobracketsStyle(args.dobrackets))
    config = SessionConfig(emitter=emitter, autosave=False)
    session = Session.create(args.input, grammar, actions, DEFAULT_REGISTRY, config)

    ambiguous = [e for e in session.entries if e.status is Status.AMBIGUOUS]
    if args.non_interactive:
        if ambiguous and not args.skip_ambiguous:
            print("ambiguous formulas need selections (or --skip-ambiguous):",
                  file=sys.stderr)
            for e in ambiguous:
                print(f"  [{e.formula.id}] {e.formula.raw} "
                      f"({len(e.candidates)} candidates)", file=sys.stderr)
            return 1
        for e in ambiguous:
            session.skip(e.formula.id)
    else:
        for e in ambiguous:
            print(f"[{e.formula.id}] {e.formula.raw} — "
                  f"{len(e.candidates)} candidates:")
            for i, c in enumerate(e.candidates):
                print(f"  {i + 1}. {c.preview}")
            while True:
                prompt = f"select 1-{len(e.candidates)} (s = skip): "
                print(prompt, end="", flush=True)
                line = sys.stdin.readline()
                if not line:
                    print("\nno selection; aborting", file=sys.stderr)
                    return 1
                choice = line.strip().lower()
                if choice == "s":
                    session.skip(e.formula.id)
                    break
                if choice.isdigit() and 1 <= int(choice) <= len(e.candidates):
                    session.select(e.formula.id, int(choice) - 1)
                    break
                print("try again", file=sys.stderr)

    output = session.export(output_path=args.output)
    replaced = sum(1 for e in session.entries if e.chosen() is not None)
    if args.json:
        print(json.dumps({
            "output_path": output,
            "replaced": replaced,
            "counts": session.counts(),
        }, indent=1))
    else:
        print(f"wrote {output} ({replaced} of {len(session.entries)} "
              f"formulas replaced)")
    return 0


# --- serve -----------------------------------------------------------------------------

def cmd_serve(args) -> int:
    import uvicorn

    from .server import SessionStore, create_app

    grammar = _load_grammar(args.grammar)
    actions = _load_actions(grammar, args.grammar, args.actions)
    store = SessionStore()
    session = Session.create(args.input, grammar, actions, DEFAULT_REGISTRY)
    store.add(session)

    ui_dir = args.ui_dir
    if ui_dir is None and os.path.isdir(os.path.join("frontend", "dist")):
        ui_dir = os.path.join("frontend", "dist")
    app = create_app(store, ui_dir=ui_dir)

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((args.host, args.port))
    except OSError as exc:
        print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        sock.close()
        return 1
    sock.listen(128)
    host, port = sock.getsockname()[:2]
    print(f"session {session.id} for {args.input}")
    print(f"serving on http://{host}:{port}/ (Ctrl-C to stop)", flush=True)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
    return 0


# --- wiring ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stexify",
        description="Rewrite plain LaTeX formulas as semantic macro calls, "
                    "with human disambiguation of ambiguous parses.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-grammar",
                       help="generate a grammar from semantic macro definitions")
    g.add_argument("inputs", nargs="+", metavar="FILE")
    g.add_argument("-o", "--output", required=True, help="grammar file to write")
    g.add_argument("--actions", help="action sidecar path "
                                     "(default: <output>.actions.json)")
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_gen_grammar)

    p = sub.add_parser("parse", help="parse one formula and show candidates")
    p.add_argument("formula")
    p.add_argument("-g", "--grammar", required=True)
    p.add_argument("--actions")
    p.add_argument("--cap", type=int, default=DEFAULT_ENUM_CAP)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_parse)

    r = sub.add_parser("run", help="rewrite a document end to end")
    r.add_argument("-g", "--grammar", required=True)
    r.add_argument("-i", "--input", required=True)
    r.add_argument("-o", "--output", help="default: <input>.stexified.tex")
    r.add_argument("--actions")
    r.add_argument("--non-interactive", action="store_true")
    r.add_argument("--skip-ambiguous", action="store_true")
    r.add_argument("--dobrackets", choices=["macro", "parens"], default="macro")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("serve", help="serve the disambiguation UI and API")
    s.add_argument("-g", "--grammar", required=True)
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--actions")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=7770)
    s.add_argument("--ui-dir", help="static UI bundle to serve at /")
    s.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StexifyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
