"""One-call parsing: input assertion, closure with the coordination hook,
the no-parse revival round, and extraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .coordination import CoordinationState
from .engine import Chart, assert_input, close, extract, tokenize
from .grammar import Grammar


@dataclass
class ParseRun:
    tokens: list
    chart: Chart
    results: list
    constraints: list = field(default_factory=list)
    log: list = field(default_factory=list)


def _has_full_parse(chart: Chart, grammar: Grammar) -> bool:
    return any(e.category == grammar.start and e.start == 0
               and e.end == chart.n and not e.is_zero_width
               for e in chart.edges)


def parse(grammar: Grammar, sentence: Union[str, Sequence[str]], *,
          meta_coordination: bool = True, all_solutions: bool = False,
          gap_budget: int = 1, layer_cap: int = 64,
          trace: Optional[Callable[[str], None]] = None) -> ParseRun:
    """Parse one sentence (a string to tokenize, or a token list).

    Coordination runs as a closure hook unless meta_coordination is off.
    If closure finishes without a start-category parse, constraints get
    one revival round before being marked exhausted.
    """
    tokens = tokenize(sentence) if isinstance(sentence, str) else list(sentence)
    chart = assert_input(tokens, trace=trace)
    coord = None
    hook = None
    if meta_coordination:
        coord = CoordinationState(
            grammar, first_solution=not all_solutions,
            gap_budget=gap_budget, trace=trace)
        hook = coord.after_layer
    close(chart, grammar, hook, layer_cap)
    if coord is not None and coord.constraints and not _has_full_parse(chart, grammar):
        coord.revive()
        close(chart, grammar, hook, layer_cap)
    if coord is not None:
        coord.finalize()
    log = coord.log if coord is not None else []
    results = extract(chart, grammar, constraint_log=log)
    return ParseRun(
        tokens=tokens,
        chart=chart,
        results=results,
        constraints=coord.constraints if coord is not None else [],
        log=log,
    )
