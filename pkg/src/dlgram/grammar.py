"""Grammar files: parsing, validation, and the Grammar container.

File format (one statement per line group, terminated by "."):

    % comment until end of line
    @start sent.            @conj conj.
    @scope np 2.            @quant exists.        @connective and.
    sent(Sem) --> np(X,Scope,Sem), vp(X,Scope).
    noun(X,window(X)) --> [window].

Heads and body nonterminals carry first-order term arguments sharing one
variable namespace per rule; terminals are bracketed lowercase words.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Union

from .terms import Compound, Const, Term, fresh_var, to_text

DEFAULT_CONNECTIVES = ("and", "or", "but")


@dataclass(frozen=True)
class Terminal:
    token: str


@dataclass(frozen=True)
class NonTerminal:
    category: str
    args: tuple = ()


RuleItem = Union[Terminal, NonTerminal]


@dataclass(frozen=True)
class Rule:
    id: int
    head: NonTerminal
    body: tuple
    line: int = 0

    @property
    def is_lexical(self) -> bool:
        return all(isinstance(it, Terminal) for it in self.body)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: Optional[int] = None

    def __str__(self):
        where = f" (line {self.line})" if self.line else ""
        return f"{self.severity}: {self.message}{where}"


class GrammarError(Exception):
    def __init__(self, message, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class GrammarSyntaxError(GrammarError):
    def __init__(self, message, line, col):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


@dataclass
class Grammar:
    """Validated rule set plus the declarations coordination needs.

    Immutable by convention after parse_grammar; freely shareable.
    """

    rules: tuple = ()
    start: str = ""
    conj_category: str = "conj"
    scope_args: dict = field(default_factory=dict)
    quantifiers: tuple = ()
    connectives: tuple = DEFAULT_CONNECTIVES
    category_arities: dict = field(default_factory=dict)

    def rules_for(self, category: str) -> list:
        return [r for r in self.rules if r.head.category == category]

    def arity(self, category: str) -> int:
        return self.category_arities.get(category, 0)


# ---------------------------------------------------------------------------
# Tokenizer

_PUNCT = {
    "(": "LPAREN", ")": "RPAREN", "[": "LBRACK", "]": "RBRACK",
    ",": "COMMA", ".": "DOT", "@": "AT",
}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(source: str):
    toks = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if source.startswith("-->", i):
            toks.append(_Tok("ARROW", "-->", line, col))
            i += 3
            col += 3
            continue
        if c in _PUNCT:
            toks.append(_Tok(_PUNCT[c], c, line, col))
            i += 1
            col += 1
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            kind = "VAR" if (text[0].isupper() or text[0] == "_") else "IDENT"
            toks.append(_Tok(kind, text, line, col))
            col += i - start
            continue
        if c.isdigit():
            start = i
            while i < n and source[i].isdigit():
                i += 1
            toks.append(_Tok("NUMBER", source[start:i], line, col))
            col += i - start
            continue
        raise GrammarSyntaxError(f"unexpected character {c!r}", line, col)
    toks.append(_Tok("EOF", "", line, col))
    return toks


class _Parser:
    def __init__(self, source: str):
        self.toks = _tokenize(source)
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.peek()
        if t.kind != kind:
            raise GrammarSyntaxError(
                f"expected {kind}, found {t.text!r}", t.line, t.col)
        return self.next()

    def parse_term(self, varmap: dict) -> Term:
        t = self.next()
        if t.kind == "VAR":
            if t.text == "_":
                return fresh_var("_")
            if t.text not in varmap:
                varmap[t.text] = fresh_var(t.text)
            return varmap[t.text]
        if t.kind != "IDENT":
            raise GrammarSyntaxError(f"expected a term, found {t.text!r}", t.line, t.col)
        if self.peek().kind == "LPAREN":
            self.next()
            args = [self.parse_term(varmap)]
            while self.peek().kind == "COMMA":
                self.next()
                args.append(self.parse_term(varmap))
            self.expect("RPAREN")
            return Compound(t.text, tuple(args))
        return Const(t.text)

    def parse_nonterminal(self, varmap: dict) -> NonTerminal:
        t = self.expect("IDENT")
        args = ()
        if self.peek().kind == "LPAREN":
            self.next()
            lst = [self.parse_term(varmap)]
            while self.peek().kind == "COMMA":
                self.next()
                lst.append(self.parse_term(varmap))
            self.expect("RPAREN")
            args = tuple(lst)
        return NonTerminal(t.text, args)


def parse_grammar(source: str, strict: bool = True) -> Grammar:
    """Parse grammar source into a Grammar.

    Directives are folded into the fields, with defaults for the ones
    omitted.  With strict=True (the default), error-severity diagnostics
    from validation raise GrammarError.
    """
    p = _Parser(source)
    rules = []
    directives: dict = {}
    scope_args: dict = {}
    quantifiers: list = []
    connectives: list = []
    directive_lines: dict = {}

    while p.peek().kind != "EOF":
        t = p.peek()
        if t.kind == "AT":
            p.next()
            name_tok = p.expect("IDENT")
            name = name_tok.text
            if name in ("start", "conj"):
                val = p.expect("IDENT").text
                if name in directives:
                    raise GrammarSyntaxError(
                        f"duplicate @{name} directive", name_tok.line, name_tok.col)
                directives[name] = val
                directive_lines[name] = name_tok.line
            elif name == "scope":
                cat = p.expect("IDENT").text
                pos_tok = p.expect("NUMBER")
                if cat in scope_args:
                    raise GrammarSyntaxError(
                        f"duplicate @scope directive for {cat}", name_tok.line, name_tok.col)
                scope_args[cat] = int(pos_tok.text)
                directive_lines[f"scope {cat}"] = name_tok.line
            elif name == "quant":
                functor = p.expect("IDENT").text
                if functor in quantifiers:
                    raise GrammarSyntaxError(
                        f"duplicate @quant directive for {functor}", name_tok.line, name_tok.col)
                quantifiers.append(functor)
            elif name == "connective":
                atom = p.expect("IDENT").text
                if atom in connectives:
                    raise GrammarSyntaxError(
                        f"duplicate @connective directive for {atom}", name_tok.line, name_tok.col)
                connectives.append(atom)
            else:
                raise GrammarSyntaxError(
                    f"unknown directive @{name}", name_tok.line, name_tok.col)
            p.expect("DOT")
            continue

        varmap: dict = {}
        head = p.parse_nonterminal(varmap)
        p.expect("ARROW")
        body = []
        while True:
            it = p.peek()
            if it.kind == "LBRACK":
                p.next()
                word = p.expect("IDENT")
                p.expect("RBRACK")
                body.append(Terminal(word.text))
            else:
                body.append(p.parse_nonterminal(varmap))
            if p.peek().kind == "COMMA":
                p.next()
                continue
            break
        p.expect("DOT")
        if not body:
            raise GrammarSyntaxError("empty rule body", t.line, t.col)
        rules.append(Rule(len(rules), head, tuple(body), line=t.line))

    if not rules:
        raise GrammarError("a grammar needs at least one rule")

    arities: dict = {}
    for r in rules:
        arities.setdefault(r.head.category, len(r.head.args))
        for it in r.body:
            if isinstance(it, NonTerminal):
                arities.setdefault(it.category, len(it.args))

    g = Grammar(
        rules=tuple(rules),
        start=directives.get("start", rules[0].head.category),
        conj_category=directives.get("conj", "conj"),
        scope_args=scope_args,
        quantifiers=tuple(quantifiers),
        connectives=tuple(connectives) if connectives else DEFAULT_CONNECTIVES,
        category_arities=arities,
    )

    if strict:
        errors = [d for d in validate(g) if d.severity == "error"]
        if "conj" in directives and not g.rules_for(g.conj_category):
            errors.append(Diagnostic(
                "error",
                f"conjunction directive names unknown category {g.conj_category}",
                directive_lines.get("conj")))
        if errors:
            raise GrammarError(
                "; ".join(str(d) for d in errors), diagnostics=errors)
    return g


def validate(g: Grammar) -> list:
    """Diagnostics for every Grammar invariant violation.  Pure."""
    diags = []
    heads = {r.head.category for r in g.rules}

    arity_seen: dict = {}
    for r in g.rules:
        uses = [(r.head.category, len(r.head.args), r.line)]
        uses += [(it.category, len(it.args), r.line)
                 for it in r.body if isinstance(it, NonTerminal)]
        for cat, ar, line in uses:
            if cat in arity_seen and arity_seen[cat][0] != ar:
                diags.append(Diagnostic(
                    "error", f"arity conflict {cat}: used at {arity_seen[cat][0]} and {ar}",
                    line))
            else:
                arity_seen.setdefault(cat, (ar, line))

    for r in g.rules:
        for it in r.body:
            if isinstance(it, NonTerminal):
                if it.category not in heads and it.category != g.conj_category:
                    diags.append(Diagnostic(
                        "error", f"undefined category {it.category}", r.line))

    if g.start and g.start not in heads:
        diags.append(Diagnostic("error", f"start category {g.start} has no rules"))

    for cat, pos in g.scope_args.items():
        if cat not in arity_seen:
            diags.append(Diagnostic("error", f"scope directive for unknown category {cat}"))
        elif not 1 <= pos <= arity_seen[cat][0]:
            diags.append(Diagnostic(
                "error",
                f"scope position {pos} out of range for {cat}/{arity_seen[cat][0]}"))

    if g.conj_category in arity_seen and arity_seen[g.conj_category][0] != 1:
        diags.append(Diagnostic(
            "error",
            f"conjunction category {g.conj_category} must carry exactly one "
            f"argument, the connective constant"))

    for r in g.rules:
        if (len(r.body) == 1 and isinstance(r.body[0], NonTerminal)
                and r.body[0].category == r.head.category):
            diags.append(Diagnostic(
                "warning", f"unit cycle on {r.head.category}", r.line))

    # dedupe identical diagnostics from repeated uses
    seen = set()
    out = []
    for d in diags:
        key = (d.severity, d.message)
        if key not in seen:
            seen.add(key)
            out.append(d)
    return out


def _item_text(it: RuleItem) -> str:
    if isinstance(it, Terminal):
        return f"[{it.token}]"
    if it.args:
        return f"{it.category}({','.join(to_text(a) for a in it.args)})"
    return it.category


def grammar_text(g: Grammar) -> str:
    """Render a Grammar back to file syntax (round-trips through
    parse_grammar up to rule ids and variable renaming)."""
    lines = [f"@start {g.start}.", f"@conj {g.conj_category}."]
    for cat, pos in g.scope_args.items():
        lines.append(f"@scope {cat} {pos}.")
    for q in g.quantifiers:
        lines.append(f"@quant {q}.")
    if g.connectives != DEFAULT_CONNECTIVES:
        for c in g.connectives:
            lines.append(f"@connective {c}.")
    lines.append("")
    for r in g.rules:
        body = ", ".join(_item_text(it) for it in r.body)
        lines.append(f"{_item_text(r.head)} --> {body}.")
    return "\n".join(lines) + "\n"


def load_grammar(path, strict: bool = True) -> Grammar:
    with open(path, encoding="utf-8") as f:
        return parse_grammar(f.read(), strict=strict)


def builtin_grammar(name: str) -> Grammar:
    """Load one of the grammars shipped with the package
    ("english_sem" or "french_syn")."""
    text = (resources.files("dlgram") / "grammars" / f"{name}.dlg").read_text("utf-8")
    return parse_grammar(text)
