"""Chart, semi-naive closure, top-down prediction, and parse extraction.

Input words become positional facts of the reserved category 'D'; every
other edge is a derived theorem cat(args, start, end).  Layers are
computed bottom-up: each new layer's derivations must use at least one
edge from the previous layer, and closure stops when a layer comes out
empty.  A per-layer hook lets the coordination machinery inject edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .grammar import Grammar, NonTerminal, Rule, Terminal
from .terms import (EMPTY_SUBST, Compound, Const, Term, abstract_over, apply,
                    canonical_text, fresh_var, rename_fresh_all, unify_all)

D_CATEGORY = "'D'"

LEFTWARD = "leftward"
RIGHTWARD = "rightward"


class LayerCapError(RuntimeError):
    """Raised when closure exceeds the configured layer limit."""


@dataclass(frozen=True)
class InputWord:
    pass


@dataclass(frozen=True)
class Lexical:
    rule_id: int


@dataclass(frozen=True)
class Derived:
    rule_id: int
    children: tuple


@dataclass(frozen=True)
class Predicted:
    gap: bool
    rule_id: Optional[int] = None
    children: tuple = ()
    source: Optional[int] = None  # edge abstracted from, for gaps


@dataclass(frozen=True)
class Coordinated:
    constraint_id: int
    source: int
    target: int


@dataclass(frozen=True)
class Edge:
    id: int
    category: str
    args: tuple
    start: int
    end: int
    layer: int
    provenance: object

    @property
    def is_zero_width(self) -> bool:
        return self.start == self.end

    @property
    def is_gap(self) -> bool:
        return isinstance(self.provenance, Predicted) and self.provenance.gap

    def __repr__(self):
        inner = canonical_text(self.args)
        inner = inner + "," if inner else ""
        return f"{self.category}({inner}{self.start},{self.end})"


def edge_text(e: Edge) -> str:
    return repr(e)


def _provenance_text(p) -> str:
    if isinstance(p, InputWord):
        return "input"
    if isinstance(p, Lexical):
        return f"lexical r{p.rule_id}"
    if isinstance(p, Derived):
        return f"derived r{p.rule_id}"
    if isinstance(p, Predicted):
        return f"gap from e{p.source}" if p.gap else f"predicted r{p.rule_id}"
    if isinstance(p, Coordinated):
        return f"coordinated c{p.constraint_id}"
    return "?"


class Chart:
    """Append-only, variant-deduplicated edge store with positional
    indexes and per-layer deltas.  Confined to a single parse."""

    def __init__(self, tokens: Sequence[str]):
        self.tokens = list(tokens)
        self.n = len(self.tokens)
        self.edges: list = []
        self.layers: list = []
        self.trace: Optional[Callable[[str], None]] = None
        self._dedup: dict = {}
        self._by_start: dict = {}
        self._by_end: dict = {}

    @property
    def current_layer(self) -> int:
        return len(self.layers)

    def begin_layer(self):
        self.layers.append([])

    def drop_layer_if_empty(self) -> bool:
        if self.layers and not self.layers[-1]:
            self.layers.pop()
            return True
        return False

    def add(self, category: str, args: Sequence[Term], start: int, end: int,
            provenance) -> tuple:
        """Insert an edge unless a variant already exists.
        Returns (edge, added)."""
        if not (0 <= start <= end <= self.n):
            raise ValueError(f"edge span {start}..{end} outside input 0..{self.n}")
        args = tuple(args)
        key = (category, start, end, canonical_text(args))
        existing = self._dedup.get(key)
        if existing is not None:
            return self.edges[existing], False
        e = Edge(len(self.edges), category, args, start, end,
                 self.current_layer, provenance)
        self.edges.append(e)
        self._dedup[key] = e.id
        self._by_start.setdefault((category, start), []).append(e.id)
        self._by_end.setdefault((category, end), []).append(e.id)
        self.layers[-1].append(e.id)
        if self.trace:
            self.trace(f"T{e.layer}: {edge_text(e)}  [{_provenance_text(provenance)}]")
        return e, True

    def at_start(self, category: str, start: int) -> list:
        return [self.edges[i] for i in self._by_start.get((category, start), ())]

    def at_end(self, category: str, end: int) -> list:
        return [self.edges[i] for i in self._by_end.get((category, end), ())]

    def ending_at(self, end: int) -> list:
        return [e for e in self.edges if e.end == end]

    def starting_at(self, start: int) -> list:
        return [e for e in self.edges if e.start == start]

    def layer_edges(self, k: int) -> list:
        return [self.edges[i] for i in self.layers[k - 1]]


def tokenize(text: str) -> list:
    """Lowercase, split on whitespace, strip terminal punctuation."""
    out = []
    for raw in text.split():
        w = raw.lower().rstrip(".,;:!?")
        if w:
            out.append(w)
    return out


def assert_input(tokens: Sequence[str],
                 trace: Optional[Callable[[str], None]] = None) -> Chart:
    """Encode the input as 'D'(word, i, i+1) facts in layer T1."""
    tokens = list(tokens)
    if not tokens:
        raise ValueError("empty input")
    chart = Chart(tokens)
    chart.trace = trace
    chart.begin_layer()
    for i, w in enumerate(tokens):
        chart.add(D_CATEGORY, (Const(w),), i, i + 1, InputWord())
    return chart


@dataclass(frozen=True)
class Derivation:
    """A rule instantiation match_rule found: the edge it would create."""
    rule_id: int
    category: str
    args: tuple
    start: int
    end: int
    children: tuple


def _item_candidates(item, chart: Chart, pos: int, id_limit: int) -> list:
    """Chart edges that can seat `item` starting at pos.  Zero-width gap
    edges never participate in ordinary rule matching."""
    if isinstance(item, Terminal):
        return [e for e in chart.at_start(D_CATEGORY, pos)
                if e.id < id_limit and e.args[0] == Const(item.token)]
    return [e for e in chart.at_start(item.category, pos)
            if e.id < id_limit and not e.is_zero_width]


def match_rule(rule: Rule, delta: Optional[set], chart: Chart,
               id_limit: Optional[int] = None) -> list:
    """All contiguous seatings of the rule body on chart edges that use
    at least one delta edge (delta=None lifts the restriction), with the
    rule's argument unifications threaded through."""
    if id_limit is None:
        id_limit = len(chart.edges)
    out = []

    def extend(idx: int, pos: int, chosen: list):
        if idx == len(rule.body):
            if delta is not None and not any(e.id in delta for e in chosen):
                return
            inst = _instantiate(rule, chosen)
            if inst is not None:
                out.append(inst)
            return
        for e in _item_candidates(rule.body[idx], chart, pos, id_limit):
            chosen.append(e)
            extend(idx + 1, e.end, chosen)
            chosen.pop()

    first = rule.body[0]
    for start in range(chart.n + 1):
        for e in _item_candidates(first, chart, start, id_limit):
            extend(1, e.end, [e])

    return out


def _instantiate(rule: Rule, chosen: Sequence[Edge]) -> Optional[Derivation]:
    """Rename the rule apart and unify body items with the chosen edges."""
    nt_vectors = [rule.head.args] + [
        it.args for it in rule.body if isinstance(it, NonTerminal)]
    flat = [t for vec in nt_vectors for t in vec]
    renamed = rename_fresh_all(flat)
    vectors = []
    i = 0
    for vec in nt_vectors:
        vectors.append(renamed[i:i + len(vec)])
        i += len(vec)
    head_args = vectors[0]
    s = EMPTY_SUBST
    vi = 1
    for item, edge in zip(rule.body, chosen):
        if isinstance(item, Terminal):
            continue
        s = unify_all(vectors[vi], edge.args, s)
        vi += 1
        if s is None:
            return None
    return Derivation(
        rule_id=rule.id,
        category=rule.head.category,
        args=tuple(apply(s, t) for t in head_args),
        start=chosen[0].start if chosen else 0,
        end=chosen[-1].end if chosen else 0,
        children=tuple(e.id for e in chosen),
    )


def close(chart: Chart, grammar: Grammar,
          hook: Optional[Callable[[Chart], None]] = None,
          layer_cap: int = 64) -> Chart:
    """Run layered closure to fixpoint.

    The first round joins over everything already in the chart (so
    closing an already-closed chart is sound and adds nothing); later
    rounds are restricted to the previous layer's delta.  After each
    layer the hook may inject further edges into that layer.
    """
    delta = {e.id for e in chart.edges}
    while True:
        if chart.current_layer >= layer_cap:
            raise LayerCapError(
                f"closure exceeded the layer cap ({layer_cap}); "
                f"the grammar is probably growing without bound")
        id_limit = len(chart.edges)
        chart.begin_layer()
        for rule in grammar.rules:
            for d in match_rule(rule, delta, chart, id_limit):
                prov = (Lexical(rule.id) if rule.is_lexical
                        else Derived(d.rule_id, d.children))
                chart.add(d.category, d.args, d.start, d.end, prov)
        if hook is not None:
            hook(chart)
        new = chart.layers[-1]
        if not new:
            chart.drop_layer_if_empty()
            return chart
        delta = set(new)


# ---------------------------------------------------------------------------
# Top-down prediction

@dataclass
class _TrialEdge:
    ref: int  # index into the trial list
    category: str
    args: tuple
    start: int
    end: int
    gap: bool = False
    rule_id: Optional[int] = None
    children: tuple = ()  # ints are chart ids, ("t", ref) are trial refs
    source: Optional[int] = None


def derivation_edges(chart: Chart, root: Edge) -> list:
    """(edge, depth) pairs for the whole derivation under root,
    root included at depth 0.  'D' leaves are skipped."""
    out = []
    stack = [(root, 0)]
    while stack:
        e, depth = stack.pop()
        if e.category == D_CATEGORY:
            continue
        out.append((e, depth))
        p = e.provenance
        kids = ()
        if isinstance(p, (Derived, Predicted)):
            kids = p.children
        elif isinstance(p, Coordinated):
            kids = tuple(sorted((p.source, p.target),
                                key=lambda i: chart.edges[i].start))
        for k in kids:
            stack.append((chart.edges[k], depth + 1))
    return out


def _find_correspondent(chart: Chart, source: Edge, category: str) -> Optional[Edge]:
    """Deepest, rightmost constituent of the given category inside the
    source derivation (gap edges excluded).  Ties broken by content so
    the choice does not depend on edge ids."""
    best = None
    best_key = None
    for e, depth in derivation_edges(chart, source):
        if e.category != category or e.is_zero_width:
            continue
        key = (depth, e.start, canonical_text(e.args))
        if best_key is None or key > best_key:
            best = e
            best_key = key
    return best


def predict(grammar: Grammar, chart: Chart, category: str, anchor: int,
            direction: str, source: Edge, gap_budget: int = 1,
            depth_cap: int = 16) -> Optional[Edge]:
    """Find or reconstruct a constituent of `category` touching `anchor`
    (starting there when rightward, ending there when leftward).

    Recursive descent over the grammar rules: each body nonterminal is
    satisfied by an existing chart edge, else by recursive prediction,
    else, while the gap budget lasts, by a zero-width gap whose
    arguments are abstracted from the structurally corresponding
    constituent inside the source derivation.  Terminals only ever match
    real input.  The first full seating wins; its edges (gaps included)
    are committed to the chart.  Predicted roots must cover at least one
    token.
    """
    if direction not in (LEFTWARD, RIGHTWARD):
        raise ValueError(f"unknown direction {direction!r}")
    trial: list = []

    def gap_edge(cat: str, pos: int, budget: int):
        if budget <= 0:
            return None
        corr = _find_correspondent(chart, source, cat)
        if corr is None:
            return None
        scope_pos = grammar.scope_args.get(cat)
        if scope_pos is not None and corr.args:
            gap_args, _ = abstract_over(corr.args, scope_pos)
        else:
            gap_args = tuple(fresh_var("_") for _ in range(grammar.arity(cat)))
        te = _TrialEdge(len(trial), cat, gap_args, pos, pos,
                        gap=True, source=corr.id)
        trial.append(te)
        return te

    def real_options(cat: str, pos: int) -> list:
        """Existing edges usable for a body item, shortest span first;
        ties broken by content, never by edge id."""
        if direction == RIGHTWARD:
            opts = [e for e in chart.at_start(cat, pos) if not e.is_zero_width]
            opts.sort(key=lambda e: (e.end, canonical_text(e.args)))
        else:
            opts = [e for e in chart.at_end(cat, pos) if not e.is_zero_width]
            opts.sort(key=lambda e: (-e.start, canonical_text(e.args)))
        return opts

    def seat_item(item, pos: int, s, budget: int, depth: int):
        """Yield (child, next_pos, subst, budget).  child is an Edge or a
        _TrialEdge; next_pos advances along the build direction."""
        if isinstance(item, Terminal):
            words = (chart.at_start(D_CATEGORY, pos) if direction == RIGHTWARD
                     else chart.at_end(D_CATEGORY, pos))
            for e in words:
                if e.args[0] == Const(item.token):
                    yield e, (e.end if direction == RIGHTWARD else e.start), s, budget
            return
        for e in real_options(item.category, pos):
            s2 = unify_all(item.args, e.args, s)
            if s2 is not None:
                yield e, (e.end if direction == RIGHTWARD else e.start), s2, budget
        if depth < depth_cap:
            for te, budget2 in build(item.category, pos, budget, depth + 1):
                s2 = unify_all(item.args, te.args, s)
                if s2 is not None:
                    yield te, (te.end if direction == RIGHTWARD else te.start), s2, budget2
        te = gap_edge(item.category, pos, budget)
        if te is not None:
            s2 = unify_all(item.args, te.args, s)
            if s2 is not None:
                yield te, pos, s2, budget - 1

    def build(cat: str, pos: int, budget: int, depth: int):
        """Yield (_TrialEdge, budget) for constituents of cat built from
        the rules, touching pos on the anchored side, width >= 1."""
        for rule in grammar.rules_for(cat):
            nt_vectors = [rule.head.args] + [
                it.args for it in rule.body if isinstance(it, NonTerminal)]
            flat = [t for vec in nt_vectors for t in vec]
            renamed = rename_fresh_all(flat)
            vectors = []
            i = 0
            for vec in nt_vectors:
                vectors.append(renamed[i:i + len(vec)])
                i += len(vec)
            head_args = vectors[0]
            items = list(rule.body)
            nt_index = []
            vi = 1
            for it in items:
                if isinstance(it, NonTerminal):
                    nt_index.append(vi)
                    vi += 1
                else:
                    nt_index.append(None)
            order = range(len(items)) if direction == RIGHTWARD \
                else range(len(items) - 1, -1, -1)
            order = list(order)

            def seat_all(k: int, pos_k: int, s, budget_k: int, chosen: dict):
                if k == len(order):
                    yield s, budget_k, dict(chosen)
                    return
                idx = order[k]
                item = items[idx]
                if nt_index[idx] is not None:
                    item = NonTerminal(item.category, vectors[nt_index[idx]])
                for child, nxt, s2, b2 in seat_item(item, pos_k, s, budget_k, depth):
                    chosen[idx] = child
                    yield from seat_all(k + 1, nxt, s2, b2, chosen)
                    del chosen[idx]

            for s, budget_left, chosen in seat_all(0, pos, EMPTY_SUBST, budget, {}):
                kids = [chosen[i] for i in range(len(items))]
                span_start = min(c.start for c in kids)
                span_end = max(c.end for c in kids)
                if span_start == span_end:
                    continue  # an all-gap constituent reconstructs nothing
                te = _TrialEdge(
                    len(trial), cat,
                    tuple(apply(s, t) for t in head_args),
                    span_start, span_end,
                    rule_id=rule.id,
                    children=tuple(c.id if isinstance(c, Edge) else ("t", c.ref)
                                   for c in kids))
                trial.append(te)
                yield te, budget_left

    for root, _budget in build(category, anchor, gap_budget, 0):
        return _commit(chart, trial, root)
    return None


def _commit(chart: Chart, trial: list, root: _TrialEdge) -> Edge:
    """Add the root's derivation to the chart, remapping trial refs to
    real (deduplicated) edge ids.  Unreachable trial edges from failed
    branches are dropped."""
    reachable = set()

    def mark(te: _TrialEdge):
        if te.ref in reachable:
            return
        reachable.add(te.ref)
        for c in te.children:
            if isinstance(c, tuple):
                mark(trial[c[1]])

    mark(root)
    real: dict = {}
    root_edge = None
    for te in trial:
        if te.ref not in reachable:
            continue
        children = tuple(real[c[1]] if isinstance(c, tuple) else c
                         for c in te.children)
        prov = Predicted(gap=te.gap, rule_id=te.rule_id,
                         children=children, source=te.source)
        e, _added = chart.add(te.category, te.args, te.start, te.end, prov)
        real[te.ref] = e.id
        if te.ref == root.ref:
            root_edge = e
    return root_edge


def format_derivation(chart: Chart, root: Edge) -> str:
    """Indented rendering of a derivation tree, one edge per line."""
    lines: list = []

    def walk(e: Edge, indent: int):
        lines.append("  " * indent
                     + f"{edge_text(e)}  [{_provenance_text(e.provenance)}]")
        p = e.provenance
        if isinstance(p, (Derived, Predicted)):
            kids = p.children
        elif isinstance(p, Coordinated):
            kids = tuple(sorted((p.source, p.target),
                                key=lambda i: chart.edges[i].start))
        else:
            kids = ()
        for k in kids:
            walk(chart.edges[k], indent + 1)

    walk(root, 0)
    return "\n".join(lines)


@dataclass
class ParseResult:
    root: Edge
    logical_form: Term
    layer_count: int
    constraint_log: tuple = ()


def logical_form_of(edge: Edge) -> Term:
    if not edge.args:
        return Const(edge.category)
    if len(edge.args) == 1:
        return edge.args[0]
    return Compound(edge.category, edge.args)


def extract(chart: Chart, grammar: Grammar, constraint_log=()) -> list:
    """One ParseResult per start-category edge spanning the whole input."""
    results = []
    for e in chart.edges:
        if (e.category == grammar.start and e.start == 0 and e.end == chart.n
                and not e.is_zero_width):
            results.append(ParseResult(
                root=e,
                logical_form=logical_form_of(e),
                layer_count=len(chart.layers),
                constraint_log=tuple(constraint_log)))
    return results
