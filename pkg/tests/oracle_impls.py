"""Independent oracle implementations the tests check the engine against.

naive_parse re-derives everything from the whole chart every round (no
delta restriction) with brute-force seating enumeration; it shares only
the term primitives and the coordination hook with the engine, not the
semi-naive join it is checking.

ground-instance helpers decide unifiability of jointly-generated term
pairs by enumerating all instantiations over a two-constant universe.
"""

import itertools
import random
from pathlib import Path

from dlgram.coordination import CoordinationState
from dlgram.engine import D_CATEGORY, Derived, Lexical, assert_input
from dlgram.grammar import NonTerminal, Terminal
from dlgram.terms import (EMPTY_SUBST, Compound, Const, Var, apply,
                          canonical_text, fresh_var, rename_fresh_all,
                          unify_all)

ORACLE_DIR = Path(__file__).parent / "oracles"


def read_expected(name: str) -> dict:
    """EXPECTED_* key/value lines from a registered derivation transcript."""
    out = {}
    for line in (ORACLE_DIR / name).read_text().splitlines():
        if line.startswith("EXPECTED_"):
            key, _, value = line.partition(":")
            out[key.strip()] = value.strip()
    return out


def edge_key_set(chart):
    """Canonical content of a chart, independent of edge ids and layers."""
    return {(e.category, e.start, e.end, canonical_text(e.args))
            for e in chart.edges}


def _brute_seatings(rule, chart, id_limit):
    """Every contiguous seating of the rule body, found by scanning the
    raw edge list (no positional indexes)."""
    usable = [e for e in chart.edges[:id_limit] if e.start < e.end
              or e.category == D_CATEGORY]

    def fits(item, e, pos):
        if e.start != pos:
            return False
        if isinstance(item, Terminal):
            return e.category == D_CATEGORY and e.args[0] == Const(item.token)
        return e.category == item.category and e.category != D_CATEGORY

    seatings = []

    def extend(idx, pos, chosen):
        if idx == len(rule.body):
            seatings.append(list(chosen))
            return
        for e in usable:
            if fits(rule.body[idx], e, pos):
                chosen.append(e)
                extend(idx + 1, e.end, chosen)
                chosen.pop()

    for start in range(chart.n + 1):
        extend(0, start, [])
    return seatings


def _instantiate(rule, chosen):
    nt_vectors = [rule.head.args] + [
        it.args for it in rule.body if isinstance(it, NonTerminal)]
    flat = [t for vec in nt_vectors for t in vec]
    renamed = rename_fresh_all(flat)
    vectors = []
    i = 0
    for vec in nt_vectors:
        vectors.append(renamed[i:i + len(vec)])
        i += len(vec)
    s = EMPTY_SUBST
    vi = 1
    for item, edge in zip(rule.body, chosen):
        if isinstance(item, Terminal):
            continue
        s = unify_all(vectors[vi], edge.args, s)
        vi += 1
        if s is None:
            return None
    return tuple(apply(s, t) for t in vectors[0])


def _naive_rounds(chart, grammar, coord, round_cap=64):
    rounds = 0
    while True:
        rounds += 1
        assert rounds <= round_cap, "naive evaluation did not converge"
        id_limit = len(chart.edges)
        chart.begin_layer()
        for rule in grammar.rules:
            for chosen in _brute_seatings(rule, chart, id_limit):
                args = _instantiate(rule, chosen)
                if args is None:
                    continue
                prov = (Lexical(rule.id) if rule.is_lexical
                        else Derived(rule.id, tuple(e.id for e in chosen)))
                chart.add(rule.head.category, args,
                          chosen[0].start, chosen[-1].end, prov)
        if coord is not None:
            coord.after_layer(chart)
        if not chart.layers[-1]:
            chart.drop_layer_if_empty()
            return


def naive_parse(grammar, tokens, meta_coordination=True):
    """Naive fixpoint with the same per-round hook protocol the real
    driver uses (including the single revival round)."""
    chart = assert_input(tokens)
    coord = CoordinationState(grammar) if meta_coordination else None
    _naive_rounds(chart, grammar, coord)

    def full_parse():
        return any(e.category == grammar.start and e.start == 0
                   and e.end == chart.n and e.start < e.end
                   for e in chart.edges)

    if coord is not None and coord.constraints and not full_parse():
        coord.revive()
        _naive_rounds(chart, grammar, coord)
    if coord is not None:
        coord.finalize()
    return chart


# ---------------------------------------------------------------------------
# Ground-enumeration unification oracle.
#
# Pairs are generated over one shared tree skeleton, so a variable in one
# term always faces a leaf in the other; unifiable pairs then always have
# a common instance over the two-constant universe, which makes the
# enumeration decision procedure exact.  Occurs-check pairs (a variable
# against a term properly containing it) are thrown in as well: both
# sides agree those fail.

_BINARY = ("f", "h")
_UNARY = ("g",)
_CONSTS = (Const("a"), Const("b"))


def _shape(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.35:
        return "leaf"
    if rng.random() < 0.5:
        return ("f", _shape(rng, depth - 1), _shape(rng, depth - 1))
    return ("g", _shape(rng, depth - 1))


def _fill(shape, rng: random.Random, leaves, swap_prob: float):
    if shape == "leaf":
        return rng.choice(leaves)
    if shape[0] == "f":
        functor = "f" if rng.random() >= swap_prob else rng.choice(_BINARY)
        return Compound(functor, (_fill(shape[1], rng, leaves, swap_prob),
                                  _fill(shape[2], rng, leaves, swap_prob)))
    return Compound("g", (_fill(shape[1], rng, leaves, swap_prob),))


def gen_pair(rng: random.Random):
    if rng.random() < 0.1:
        v = fresh_var("O")
        inner = v
        for _ in range(rng.randint(1, 2)):
            if rng.random() < 0.5:
                inner = Compound("g", (inner,))
            else:
                other = rng.choice(_CONSTS)
                inner = Compound("f", (inner, other) if rng.random() < 0.5
                                 else (other, inner))
        return v, inner
    shape = _shape(rng, rng.randint(1, 3))
    vs = (fresh_var("X"), fresh_var("Y"))
    leaves = list(_CONSTS) + list(vs)
    t1 = _fill(shape, rng, leaves, swap_prob=0.0)
    t2 = _fill(shape, rng, leaves, swap_prob=0.15)
    return t1, t2


def _vars_of(t, acc):
    if isinstance(t, Var):
        acc[t.id] = t
    elif isinstance(t, Compound):
        for a in t.args:
            _vars_of(a, acc)
    return acc


def _ground(t, assignment):
    if isinstance(t, Var):
        return assignment[t.id]
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(_ground(a, assignment) for a in t.args))
    return t


def has_common_ground_instance(t1, t2) -> bool:
    """True iff some assignment of the pair's variables to the constants
    a/b makes the two terms identical."""
    var_ids = sorted(_vars_of(t2, _vars_of(t1, {})).keys())
    for values in itertools.product(_CONSTS, repeat=len(var_ids)):
        assignment = dict(zip(var_ids, values))
        if _ground(t1, assignment) == _ground(t2, assignment):
            return True
    return False
