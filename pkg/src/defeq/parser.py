"""Concrete syntax for formulas and theory files.

Grammar (lowest to highest precedence)::

    formula := imp ('<->' imp)*
    imp     := or ('->' imp)?
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '~' unary | ('E' | 'A' | 'E!') VAR '.' formula | atom
    atom    := '(' formula ')' | IDENT '(' VAR, ... ')' | VAR '=' VAR | IDENT

Quantifier bodies extend as far right as possible.  Variables named
``x<N>`` denote index N; any other variable name gets the smallest index
not used explicitly in the same input, in order of first occurrence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from defeq.syntax import (
    And, Eq, Exists, ExistsUnique, Forall, Formula, Iff, Implies, Not, Or, Pred,
    Signature, Theory, Var, WellFormednessError, RelationSymbol,
    match_exists_unique, match_forall, match_iff, match_implies, match_or,
)


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at column {position + 1}"
        super().__init__(message)


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<eu>E!)
  | (?P<ident>[a-zA-Z][a-zA-Z0-9_]*)
  | (?P<punct>[~&|().,=])
""", re.VERBOSE)

_CANON_VAR = re.compile(r"x(0|[1-9][0-9]*)\Z")


@dataclass
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", i, text)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            toks.append(_Tok(val if kind == "punct" else kind, val, i))
        i = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.sig = sig
        self.toks = _tokenize(text)
        self.i = 0
        reserved = {int(t.value[1:]) for t in self.toks
                    if t.kind == "ident" and _CANON_VAR.match(t.value)}
        self.reserved = reserved
        self.names: dict[str, Var] = {}

    # token helpers
    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> _Tok:
        t = self.peek()
        if t.kind != kind:
            want = "end of input" if kind == "eof" else repr(kind)
            got = "end of input" if t.kind == "eof" else repr(t.value)
            raise ParseError(f"expected {want}, found {got}", t.pos, self.text)
        return self.next()

    def var(self, tok: _Tok) -> Var:
        name = tok.value
        if _CANON_VAR.match(name):
            return Var(int(name[1:]))
        v = self.names.get(name)
        if v is None:
            used = self.reserved | {w.index for w in self.names.values()}
            i = 0
            while i in used:
                i += 1
            v = self.names[name] = Var(i)
        return v

    # grammar
    def formula(self) -> Formula:
        left = self.imp()
        while self.peek().kind == "iff":
            self.next()
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek().kind == "imp":
            self.next()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek().kind == "|":
            self.next()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek().kind == "&":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        t = self.peek()
        if t.kind == "~":
            self.next()
            return Not(self.unary())
        if t.kind == "eu" or (t.kind == "ident" and t.value in ("E", "A")
                              and self.peek(1).kind == "ident" and self.peek(2).kind == "."):
            self.next()
            v = self.var(self.expect("ident"))
            self.expect(".")
            body = self.formula()
            if t.kind == "eu":
                return ExistsUnique(v, body)
            return Exists(v, body) if t.value == "E" else Forall(v, body)
        return self.atom()

    def atom(self) -> Formula:
        t = self.peek()
        if t.kind == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind != "ident":
            got = "end of input" if t.kind == "eof" else repr(t.value)
            raise ParseError(f"expected a formula, found {got}", t.pos, self.text)
        self.next()
        nxt = self.peek()
        if nxt.kind == "=":
            self.next()
            return Eq(self.var(t), self.var(self.expect("ident")))
        sym = self.sig.get(t.value)
        if nxt.kind == "(":
            if sym is None:
                raise ParseError(f"unknown relation symbol {t.value!r}", t.pos, self.text)
            self.next()
            args: list[Var] = []
            if self.peek().kind != ")":
                args.append(self.var(self.expect("ident")))
                while self.peek().kind == ",":
                    self.next()
                    args.append(self.var(self.expect("ident")))
            self.expect(")")
            if len(args) != sym.arity:
                raise ParseError(
                    f"arity mismatch: {sym.name} has arity {sym.arity}, given {len(args)} arguments",
                    t.pos, self.text)
            return Pred(sym, tuple(args))
        if sym is not None and sym.arity == 0:
            return Pred(sym, ())
        if sym is not None:
            raise ParseError(
                f"arity mismatch: {sym.name} has arity {sym.arity}, used without arguments",
                t.pos, self.text)
        raise ParseError(f"unknown relation symbol {t.value!r}", t.pos, self.text)


def parse_formula(text: str, sig: Signature = Signature()) -> Formula:
    """Parse ``text`` over ``sig`` into a core formula."""
    p = _Parser(text, sig)
    f = p.formula()
    p.expect("eof")
    return f


# Printing

_BINARY = {"and", "or", "imp", "iff"}


def _view(f: Formula):
    """Classify ``f`` by the sugar it prints as, with its components."""
    if isinstance(f, Pred):
        return "pred", ()
    if isinstance(f, Eq):
        return "eq", ()
    if isinstance(f, Exists):
        m = match_exists_unique(f)
        if m is not None:
            return "quant", ("E!",) + m
        return "quant", ("E", f.var, f.body)
    if isinstance(f, Not):
        m = match_forall(f)
        if m is not None:
            return "quant", ("A",) + m
        m = match_implies(f)
        if m is not None:
            return "imp", m
        m = match_or(f)
        if m is not None:
            return "or", m
        return "not", (f.sub,)
    if isinstance(f, And):
        m = match_iff(f)
        if m is not None:
            return "iff", m
        return "and", (f.left, f.right)
    raise TypeError(f"not a formula: {f!r}")


_OPS = {"and": " & ", "or": " | ", "imp": " -> ", "iff": " <-> "}


def _print(f: Formula) -> str:
    kind, parts = _view(f)
    if kind == "pred":
        return f"{f.symbol.name}({','.join(str(a) for a in f.args)})"
    if kind == "eq":
        return f"{f.left} = {f.right}"
    if kind == "quant":
        q, v, body = parts
        return f"{q} {v} . {_print(body)}"
    if kind == "not":
        sub = parts[0]
        inner = _print(sub)
        if _view(sub)[0] in ("pred", "not"):
            return "~" + inner
        return f"~({inner})"
    a, b = parts
    return _wrap(a) + _OPS[kind] + _wrap(b)


def _wrap(f: Formula) -> str:
    s = _print(f)
    if _view(f)[0] in _BINARY or _view(f)[0] == "quant":
        return f"({s})"
    return s


def print_formula(f: Formula) -> str:
    """Deterministic text for ``f`` with derived connectives re-sugared."""
    return _print(f)


# Theory files

def _strip_comment(line: str) -> str:
    i = line.find("#")
    return (line if i < 0 else line[:i]).strip()


def parse_theory(text: str, name: str | None = None) -> Theory:
    """Parse the ``theory`` / ``rel`` / ``axiom`` line format."""
    th_name = name
    symbols: list[RelationSymbol] = []
    axiom_lines: list[tuple[int, str]] = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "theory":
            if seen_header:
                raise ParseError(f"line {lineno}: duplicate theory header")
            seen_header = True
            if not rest or " " in rest:
                raise ParseError(f"line {lineno}: expected 'theory NAME'")
            th_name = th_name or rest
        elif head == "rel":
            parts = rest.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError(f"line {lineno}: expected 'rel NAME ARITY'")
            try:
                symbols.append(RelationSymbol(parts[0], int(parts[1])))
            except WellFormednessError as e:
                raise ParseError(f"line {lineno}: {e}") from None
        elif head == "axiom":
            axiom_lines.append((lineno, rest))
        else:
            raise ParseError(f"line {lineno}: unknown directive {head!r}")
    if not seen_header:
        raise ParseError("missing 'theory NAME' header")
    try:
        sig = Signature(symbols)
    except WellFormednessError as e:
        raise ParseError(str(e)) from None
    axioms = []
    for lineno, src in axiom_lines:
        try:
            axioms.append(parse_formula(src, sig))
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e}") from None
    try:
        return Theory(sig, axioms, th_name or "T")
    except WellFormednessError as e:
        raise ParseError(str(e)) from None


def print_theory(t: Theory) -> str:
    lines = [f"theory {t.name}"]
    lines += [f"rel {s.name} {s.arity}" for s in t.signature]
    lines += [f"axiom {print_formula(a)}" for a in t.axioms]
    return "\n".join(lines) + "\n"


def load_theory(path) -> Theory:
    with open(path, encoding="utf-8") as fh:
        return parse_theory(fh.read())
