"""Command-line front end.

    dlgram parse -g grammar.dlg -s "john laughed" [--trace] [--json] ...
    dlgram check -g grammar.dlg

Exit status: 0 when every sentence parsed, 1 when any failed (or the
layer cap was hit), 2 for grammar or usage problems.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .api import parse
from .engine import (Coordinated, Derived, InputWord, LayerCapError, Lexical,
                     Predicted, tokenize)
from .grammar import GrammarError, load_grammar, validate
from .reshape import reshape
from .terms import canonical_text, canonical_texts


@dataclass
class RunConfig:
    grammar_path: str
    sentence: str = ""
    sentence_file: str = ""
    trace: bool = False
    reshape: bool = False
    reshape_too: bool = False
    all_coord: bool = False
    no_meta_coord: bool = False
    json: bool = False
    layer_cap: int = 64
    gap_budget: int = 1

    def __post_init__(self):
        if self.layer_cap < 1:
            raise ValueError("layer cap must be at least 1")
        if self.gap_budget < 0:
            raise ValueError("gap budget must be nonnegative")


def _provenance_json(p) -> dict:
    if isinstance(p, InputWord):
        return {"kind": "input"}
    if isinstance(p, Lexical):
        return {"kind": "lexical", "rule": p.rule_id}
    if isinstance(p, Derived):
        return {"kind": "derived", "rule": p.rule_id, "children": list(p.children)}
    if isinstance(p, Predicted):
        if p.gap:
            return {"kind": "gap", "source": p.source}
        return {"kind": "predicted", "rule": p.rule_id, "children": list(p.children)}
    if isinstance(p, Coordinated):
        return {"kind": "coordinated", "constraint": p.constraint_id,
                "source": p.source, "target": p.target}
    return {"kind": "unknown"}


def emit_json(results, chart, constraints=()) -> dict:
    """Machine-readable chart dump.  Key order is part of the format."""
    doc = {
        "tokens": list(chart.tokens),
        "edges": [
            {
                "id": e.id,
                "cat": e.category,
                "args": canonical_texts(e.args),
                "start": e.start,
                "end": e.end,
                "layer": e.layer,
                "provenance": _provenance_json(e.provenance),
            }
            for e in chart.edges
        ],
        "parses": [
            {
                "root_edge_id": r.root.id,
                "logical_form": canonical_text(r.logical_form),
            }
            for r in results
        ],
        "constraints": [
            {
                "N": c.n,
                "M": c.m,
                "connective": c.connective,
                "status": c.status,
                "resolutions": [
                    {"source": s, "target": t, "combined": comb}
                    for (s, t, comb) in c.resolutions
                ],
            }
            for c in constraints
        ],
    }
    return doc


def run(config: RunConfig) -> int:
    """Parse every configured sentence and print results."""
    try:
        grammar = load_grammar(config.grammar_path)
    except FileNotFoundError:
        print(f"error: cannot read {config.grammar_path}", file=sys.stderr)
        return 2
    except GrammarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if config.sentence:
        sentences = [config.sentence]
    else:
        try:
            with open(config.sentence_file, encoding="utf-8") as f:
                sentences = [ln.strip() for ln in f if ln.strip()]
        except FileNotFoundError:
            print(f"error: cannot read {config.sentence_file}", file=sys.stderr)
            return 2

    status = 0
    for sentence in sentences:
        tokens = tokenize(sentence)
        if not tokens:
            print(f"no tokens: {sentence}", file=sys.stderr)
            status = 1
            continue
        trace_sink = (lambda line: print(line)) if config.trace else None
        try:
            outcome = parse(
                grammar, tokens,
                meta_coordination=not config.no_meta_coord,
                all_solutions=config.all_coord,
                gap_budget=config.gap_budget,
                layer_cap=config.layer_cap,
                trace=trace_sink,
            )
        except LayerCapError as exc:
            print(f"error: {exc}", file=sys.stderr)
            status = 1
            continue

        forms = [r.logical_form for r in outcome.results]
        if config.reshape or config.reshape_too:
            enabled = []
            if config.reshape:
                enabled.append("distrib")
            if config.reshape_too:
                enabled.append("too")
            forms = [reshape(f, grammar, enabled) for f in forms]

        if config.json:
            doc = emit_json(outcome.results, outcome.chart, outcome.constraints)
            if config.reshape or config.reshape_too:
                for entry, f in zip(doc["parses"], forms):
                    entry["logical_form"] = canonical_text(f)
            print(json.dumps(doc))
        else:
            if forms:
                for f in forms:
                    print(canonical_text(f))
            else:
                print(f"no parse: {' '.join(tokens)}")
        if not forms:
            status = 1
    return status


def _check(grammar_path: str) -> int:
    try:
        grammar = load_grammar(grammar_path, strict=False)
    except FileNotFoundError:
        print(f"error: cannot read {grammar_path}", file=sys.stderr)
        return 2
    except GrammarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    diagnostics = validate(grammar)
    for d in diagnostics:
        print(d)
    if any(d.severity == "error" for d in diagnostics):
        return 2
    print("ok")
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dlgram")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse sentences with a grammar")
    p.add_argument("-g", "--grammar", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("-s", "--sentence", default="")
    group.add_argument("-f", "--file", default="", dest="sentence_file")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--reshape", action="store_true")
    p.add_argument("--reshape-too", action="store_true")
    p.add_argument("--all-coord", action="store_true")
    p.add_argument("--no-meta-coord", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--layer-cap", type=int, default=64, metavar="N")
    p.add_argument("--gap-budget", type=int, default=1, metavar="N")

    c = sub.add_parser("check", help="validate a grammar file")
    c.add_argument("-g", "--grammar", required=True)
    return ap


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    if args.command == "check":
        return _check(args.grammar)
    try:
        config = RunConfig(
            grammar_path=args.grammar,
            sentence=args.sentence,
            sentence_file=args.sentence_file,
            trace=args.trace,
            reshape=args.reshape,
            reshape_too=args.reshape_too,
            all_coord=args.all_coord,
            no_meta_coord=args.no_meta_coord,
            json=args.json,
            layer_cap=args.layer_cap,
            gap_budget=args.gap_budget,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
