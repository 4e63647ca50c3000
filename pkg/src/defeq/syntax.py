"""Relational first-order syntax: symbols, signatures, formulas and theories.

Only five node types exist (predicate application, equality, negation,
conjunction, existential quantification).  Disjunction, implication,
biconditional, universal and unique-existential quantification are
constructed by the helper functions below and reduce to those five.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

IDENT_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


class WellFormednessError(ValueError):
    """Raised for ill-formed symbols, signatures, formulas or theories."""


@dataclass(frozen=True, order=True)
class RelationSymbol:
    name: str
    arity: int

    def __post_init__(self):
        if not isinstance(self.name, str) or not IDENT_RE.match(self.name):
            raise WellFormednessError(f"invalid relation name {self.name!r}")
        if not isinstance(self.arity, int) or self.arity < 0:
            raise WellFormednessError(f"invalid arity {self.arity!r} for {self.name}")

    def __str__(self):
        return f"{self.name}/{self.arity}"

    def __call__(self, *args: "Var") -> "Pred":
        return Pred(self, tuple(args))


class Signature:
    """A finite set of relation symbols with pairwise distinct names.

    Iteration order is by name, which fixes the slot order used for model
    encodings everywhere in the package.
    """

    __slots__ = ("_by_name", "_hash")

    def __init__(self, symbols: Iterable[RelationSymbol] = ()):
        by_name: dict[str, RelationSymbol] = {}
        for s in symbols:
            old = by_name.get(s.name)
            if old is not None and old != s:
                raise WellFormednessError(
                    f"symbol {s.name} declared with arities {old.arity} and {s.arity}")
            by_name[s.name] = s
        self._by_name = dict(sorted(by_name.items()))
        self._hash = hash(frozenset(self._by_name.values()))

    @classmethod
    def of(cls, **arities: int) -> "Signature":
        return cls(RelationSymbol(n, a) for n, a in arities.items())

    def __iter__(self) -> Iterator[RelationSymbol]:
        return iter(self._by_name.values())

    def __len__(self):
        return len(self._by_name)

    def __contains__(self, item):
        if isinstance(item, str):
            return item in self._by_name
        return self._by_name.get(getattr(item, "name", None)) == item

    def __getitem__(self, name: str) -> RelationSymbol:
        return self._by_name[name]

    def get(self, name: str):
        return self._by_name.get(name)

    def names(self) -> list[str]:
        return list(self._by_name)

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        return self._by_name == other._by_name

    def __hash__(self):
        return self._hash

    def __or__(self, other: "Signature") -> "Signature":
        return Signature([*self, *other])

    def __and__(self, other: "Signature") -> "Signature":
        return Signature(s for s in self if s in other)

    def __sub__(self, other: "Signature") -> "Signature":
        return Signature(s for s in self if s not in other)

    def __le__(self, other: "Signature") -> bool:
        return all(s in other for s in self)

    def isdisjoint(self, other: "Signature") -> bool:
        return not any(s.name in other for s in self)

    def __repr__(self):
        return "Signature({" + ", ".join(str(s) for s in self) + "})"


@dataclass(frozen=True, order=True)
class Var:
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise WellFormednessError("variable index must be non-negative")

    def __str__(self):
        return f"x{self.index}"

    def __repr__(self):
        return f"x{self.index}"


def variables(*indices: int) -> tuple[Var, ...]:
    return tuple(Var(i) for i in indices)


class Formula:
    """Base class of the five core formula nodes."""

    __slots__ = ()

    def __invert__(self):
        return Not(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __str__(self):
        from defeq.parser import print_formula
        return print_formula(self)


@dataclass(frozen=True)
class Pred(Formula):
    symbol: RelationSymbol
    args: tuple[Var, ...]

    def __post_init__(self):
        if not isinstance(self.symbol, RelationSymbol):
            raise TypeError(f"not a relation symbol: {self.symbol!r}")
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.symbol.arity:
            raise WellFormednessError(
                f"{self.symbol.name} expects {self.symbol.arity} arguments, got {len(self.args)}")


@dataclass(frozen=True)
class Eq(Formula):
    left: Var
    right: Var


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: Var
    body: Formula


# Derived connectives.  Each returns a core formula.

def Or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def Implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def Forall(v: Var, body: Formula) -> Formula:
    return Not(Exists(v, Not(body)))


def forall_all(vs: Iterable[Var], body: Formula) -> Formula:
    for v in reversed(tuple(vs)):
        body = Forall(v, body)
    return body


def unique_witness_var(v: Var, body: Formula) -> Var:
    """The variable used for the uniqueness clause of ``E! v . body``."""
    used = {w.index for w in all_variables(body)} | {v.index}
    i = 0
    while i in used:
        i += 1
    return Var(i)


def ExistsUnique(v: Var, body: Formula) -> Formula:
    """E!v.phi  :=  Ev(phi(v) & ~Ey(phi(y) & ~v=y))."""
    y = unique_witness_var(v, body)
    other = substitute(body, {v: y})
    return Exists(v, And(body, Not(Exists(y, And(other, Not(Eq(v, y)))))))


# Pattern matchers for the derived connectives (inverse of the above).

def match_or(f: Formula):
    if isinstance(f, Not) and isinstance(f.sub, And):
        a, b = f.sub.left, f.sub.right
        if isinstance(a, Not) and isinstance(b, Not):
            return a.sub, b.sub
    return None


def match_implies(f: Formula):
    m = match_or(f)
    if m is not None and isinstance(m[0], Not):
        return m[0].sub, m[1]
    return None


def match_iff(f: Formula):
    if isinstance(f, And):
        l, r = match_implies(f.left), match_implies(f.right)
        if l is not None and r is not None and l[0] == r[1] and l[1] == r[0]:
            return l
    return None


def match_forall(f: Formula):
    if isinstance(f, Not) and isinstance(f.sub, Exists) and isinstance(f.sub.body, Not):
        return f.sub.var, f.sub.body.sub
    return None


def match_exists_unique(f: Formula):
    if not (isinstance(f, Exists) and isinstance(f.body, And)):
        return None
    v, body, rest = f.var, f.body.left, f.body.right
    if not (isinstance(rest, Not) and isinstance(rest.sub, Exists)):
        return None
    y = rest.sub.var
    if y != unique_witness_var(v, body):
        return None
    inner = rest.sub.body
    if not (isinstance(inner, And) and inner.right == Not(Eq(v, y))):
        return None
    if inner.left != substitute(body, {v: y}):
        return None
    return v, body


# Structural queries.

def free_variables(f: Formula) -> frozenset[Var]:
    if isinstance(f, Pred):
        return frozenset(f.args)
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, Not):
        return free_variables(f.sub)
    if isinstance(f, And):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, Exists):
        return free_variables(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def is_sentence(f: Formula) -> bool:
    return not free_variables(f)


def all_variables(f: Formula) -> set[Var]:
    """Free and bound variables occurring anywhere in ``f``."""
    out: set[Var] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Pred):
            out.update(g.args)
        elif isinstance(g, Eq):
            out.add(g.left)
            out.add(g.right)
        elif isinstance(g, Not):
            stack.append(g.sub)
        elif isinstance(g, And):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, Exists):
            out.add(g.var)
            stack.append(g.body)
    return out


def symbols_of(f: Formula) -> set[RelationSymbol]:
    out: set[RelationSymbol] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Pred):
            out.add(g.symbol)
        elif isinstance(g, Not):
            stack.append(g.sub)
        elif isinstance(g, And):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, Exists):
            stack.append(g.body)
    return out


def formula_size(f: Formula) -> int:
    if isinstance(f, (Pred, Eq)):
        return 1
    if isinstance(f, Not):
        return 1 + formula_size(f.sub)
    if isinstance(f, And):
        return 1 + formula_size(f.left) + formula_size(f.right)
    return 1 + formula_size(f.body)


def formula_depth(f: Formula) -> int:
    if isinstance(f, (Pred, Eq)):
        return 0
    if isinstance(f, Not):
        return 1 + formula_depth(f.sub)
    if isinstance(f, And):
        return 1 + max(formula_depth(f.left), formula_depth(f.right))
    return 1 + formula_depth(f.body)


def check_well_formed(f: Formula, sig: Signature) -> None:
    bad = [s for s in symbols_of(f) if s not in sig]
    if bad:
        names = ", ".join(sorted(str(s) for s in bad))
        raise WellFormednessError(f"symbols not in signature: {names}")


# Substitution and symbol maps.

def substitute(f: Formula, assignment: Mapping[Var, Var]) -> Formula:
    """Capture-avoiding simultaneous substitution of variables.

    Variables missing from ``assignment`` are left alone.  A binder whose
    variable would capture an incoming variable is renamed to the smallest
    index not free in the body, not the binder itself and not an image.
    """
    if isinstance(f, Pred):
        return Pred(f.symbol, tuple(assignment.get(a, a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(assignment.get(f.left, f.left), assignment.get(f.right, f.right))
    if isinstance(f, Not):
        return Not(substitute(f.sub, assignment))
    if isinstance(f, And):
        return And(substitute(f.left, assignment), substitute(f.right, assignment))
    if isinstance(f, Exists):
        v = f.var
        fv = free_variables(f.body) - {v}
        inner = {w: assignment[w] for w in fv if w in assignment}
        images = {inner.get(w, w) for w in fv}
        if v in images:
            taken = {w.index for w in fv} | {w.index for w in images} | {v.index}
            i = 0
            while i in taken:
                i += 1
            new = Var(i)
            inner[v] = new
            return Exists(new, substitute(f.body, inner))
        return Exists(v, substitute(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def apply_symbol_map(f: Formula, m: Mapping[RelationSymbol, RelationSymbol]) -> Formula:
    """Replace every predicate symbol according to ``m`` (identity elsewhere)."""
    for src, dst in m.items():
        if src.arity != dst.arity:
            raise WellFormednessError(f"symbol map changes arity: {src} -> {dst}")
    return _map_symbols(f, m)


def _map_symbols(f, m):
    if isinstance(f, Pred):
        return Pred(m.get(f.symbol, f.symbol), f.args)
    if isinstance(f, Eq):
        return f
    if isinstance(f, Not):
        return Not(_map_symbols(f.sub, m))
    if isinstance(f, And):
        return And(_map_symbols(f.left, m), _map_symbols(f.right, m))
    return Exists(f.var, _map_symbols(f.body, m))


PredicateImage = tuple[tuple[Var, ...], Formula]


def replace_predicates(f: Formula, images: Mapping[RelationSymbol, PredicateImage]) -> Formula:
    """Replace each predicate ``p(y1..yn)`` whose symbol has an image
    ``(params, body)`` by ``body[params := ys]``; other nodes map to themselves.

    This is both unfolding of explicit definitions and application of a
    translation.  Bodies may only mention their own parameters free, which
    is what keeps the replacement free of capture.
    """
    for sym, (params, body) in images.items():
        extra = free_variables(body) - set(params)
        if extra:
            raise WellFormednessError(
                f"image of {sym} has free variables outside its parameters: "
                + ", ".join(str(v) for v in sorted(extra)))
    return _replace(f, images)


def _replace(f: Formula, images: Mapping[RelationSymbol, PredicateImage]) -> Formula:
    if isinstance(f, Pred):
        img = images.get(f.symbol)
        if img is None:
            return f
        params, body = img
        return substitute(body, dict(zip(params, f.args)))
    if isinstance(f, Eq):
        return f
    if isinstance(f, Not):
        return Not(_replace(f.sub, images))
    if isinstance(f, And):
        return And(_replace(f.left, images), _replace(f.right, images))
    return Exists(f.var, _replace(f.body, images))


def alpha_normalize(f: Formula) -> Formula:
    """Renumber bound variables canonically (preorder, starting above the
    largest free index), so alpha-equivalent formulas become equal."""
    fv = free_variables(f)
    start = max((v.index for v in fv), default=-1) + 1
    counter = [start]

    def go(g, env):
        if isinstance(g, Pred):
            return Pred(g.symbol, tuple(env.get(a, a) for a in g.args))
        if isinstance(g, Eq):
            return Eq(env.get(g.left, g.left), env.get(g.right, g.right))
        if isinstance(g, Not):
            return Not(go(g.sub, env))
        if isinstance(g, And):
            return And(go(g.left, env), go(g.right, env))
        new = Var(counter[0])
        counter[0] += 1
        return Exists(new, go(g.body, {**env, g.var: new}))

    return go(f, {})


def alpha_equivalent(f: Formula, g: Formula) -> bool:
    return free_variables(f) == free_variables(g) and alpha_normalize(f) == alpha_normalize(g)


class Theory:
    """A signature plus a finite set of sentences over it.

    Axiom order is kept for printing; equality ignores order, duplicates
    and the display name.
    """

    __slots__ = ("signature", "axioms", "name", "_key")

    def __init__(self, signature: Signature, axioms: Iterable[Formula] = (), name: str = "T"):
        seen: dict[Formula, None] = {}
        for ax in axioms:
            if not isinstance(ax, Formula):
                raise TypeError(f"axiom is not a formula: {ax!r}")
            if free_variables(ax):
                raise WellFormednessError(
                    f"axiom of {name} has free variables {sorted(free_variables(ax))}")
            check_well_formed(ax, signature)
            seen.setdefault(ax, None)
        self.signature = signature
        self.axioms: tuple[Formula, ...] = tuple(seen)
        self.name = name
        self._key = (signature, frozenset(self.axioms))

    def __eq__(self, other):
        if not isinstance(other, Theory):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Theory({self.name}, {self.signature!r}, {len(self.axioms)} axioms)"

    def renamed(self, name: str) -> "Theory":
        return Theory(self.signature, self.axioms, name)

    def union(self, other: "Theory", name: str | None = None) -> "Theory":
        """Axioms of both theories over the union signature."""
        return Theory(self.signature | other.signature, self.axioms + other.axioms,
                      name or f"{self.name}+{other.name}")

