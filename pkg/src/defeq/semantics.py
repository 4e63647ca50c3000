"""Finite models, satisfaction, defined relations and the bounded oracle.

Every model has universe ``{0, ..., size-1}``; no isomorphism quotienting
is done, so model classes are compared literally.  All semantic answers
about theories are relative to a bound ``k`` on the universe size.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from defeq import kernel
from defeq.syntax import (
    And, Eq, Exists, Formula, Not, Pred, RelationSymbol, Signature, Theory, Var,
    free_variables, is_sentence, match_forall, match_iff, symbols_of,
)

DEFAULT_BOUND = 3
MAX_FREE_BITS = 26


def default_bound() -> int:
    """Bound from ``DEFEQ_BOUND`` if set, otherwise 3."""
    raw = os.environ.get("DEFEQ_BOUND")
    if raw:
        k = int(raw)
        if k < 1:
            raise ValueError("DEFEQ_BOUND must be at least 1")
        return k
    return DEFAULT_BOUND


class SemanticsError(ValueError):
    pass


class SignatureMismatch(SemanticsError):
    pass


class EvaluationError(SemanticsError):
    """A free variable of the formula has no value in the evaluation."""


class SearchSpaceTooLarge(SemanticsError):
    pass


class FiniteModel:
    """A structure with universe ``range(size)`` and one tuple set per symbol."""

    __slots__ = ("size", "interp", "signature", "_key")

    def __init__(self, size: int, interp: Mapping[RelationSymbol, Iterable[Sequence[int]]] = (),
                 signature: Signature | None = None):
        if size < 1:
            raise SemanticsError("a model needs a non-empty universe")
        interp = dict(interp)
        if signature is None:
            signature = Signature(interp)
        rels = {}
        for s in signature:
            tuples = frozenset(tuple(t) for t in interp.pop(s, ()))
            for t in tuples:
                if len(t) != s.arity or not all(isinstance(x, int) and 0 <= x < size for x in t):
                    raise SemanticsError(f"bad tuple {t} for {s} in a model of size {size}")
            rels[s] = tuples
        if interp:
            extra = ", ".join(str(s) for s in interp)
            raise SemanticsError(f"interpretation given for symbols outside the signature: {extra}")
        self.size = size
        self.interp = rels
        self.signature = signature
        self._key = (size, frozenset(rels.items()))

    def __getitem__(self, sym) -> frozenset:
        if isinstance(sym, str):
            sym = self.signature[sym]
        return self.interp[sym]

    def __eq__(self, other):
        if not isinstance(other, FiniteModel):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def bits(self) -> bytes:
        """Concatenated relation bit-vectors in signature order."""
        return bytes(kernel.Layout(self.signature, self.size).encode(self.interp)[:-1])

    def sort_key(self):
        return (self.size, self.bits())

    def __repr__(self):
        rels = "; ".join(f"{s.name}={sorted(self.interp[s])}" for s in self.signature)
        return f"FiniteModel(size={self.size}, {rels})"

    def __str__(self):
        return print_model(self)


def _encode(m: FiniteModel, layout: kernel.Layout) -> bytearray:
    return layout.encode(m.interp)


# Satisfaction, clause by clause.

def satisfies(m: FiniteModel, f: Formula, e: Mapping[Var, int] | None = None) -> bool:
    """Tarskian satisfaction of ``f`` in ``m`` under evaluation ``e``."""
    e = dict(e or {})
    missing = free_variables(f) - e.keys()
    if missing:
        names = ", ".join(str(v) for v in sorted(missing))
        raise EvaluationError(f"evaluation does not cover free variables {names}")
    bad = [s for s in symbols_of(f) if s not in m.signature]
    if bad:
        raise SignatureMismatch(f"symbols outside the model's signature: {', '.join(map(str, bad))}")
    return _sat(m, f, e)


def _sat(m: FiniteModel, f: Formula, e: dict) -> bool:
    if isinstance(f, Pred):
        return tuple(e[a] for a in f.args) in m.interp[f.symbol]
    if isinstance(f, Eq):
        return e[f.left] == e[f.right]
    if isinstance(f, Not):
        return not _sat(m, f.sub, e)
    if isinstance(f, And):
        return _sat(m, f.left, e) and _sat(m, f.right, e)
    if isinstance(f, Exists):
        for b in range(m.size):
            if _sat(m, f.body, {**e, f.var: b}):
                return True
        return False
    raise TypeError(f"not a formula: {f!r}")


def models_theory(m: FiniteModel, t: Theory) -> bool:
    if m.signature != t.signature:
        raise SignatureMismatch(f"model signature {m.signature!r} differs from {t.name}'s")
    return all(satisfies(m, ax) for ax in t.axioms)


def defined_relation(m: FiniteModel, f: Formula, xs: Sequence[Var]) -> frozenset:
    """The relation ``f`` defines in ``m`` with argument places ``xs``."""
    xs = tuple(xs)
    if len(set(xs)) != len(xs):
        raise SemanticsError("parameter variables must be distinct")
    outside = free_variables(f) - set(xs)
    if outside:
        raise EvaluationError(f"free variables outside the parameter list: {sorted(outside)}")
    bad = [s for s in symbols_of(f) if s not in m.signature]
    if bad:
        raise SignatureMismatch(f"symbols outside the model's signature: {', '.join(map(str, bad))}")
    layout = kernel.Layout(m.signature, m.size)
    tab = kernel.table(layout, _encode(m, layout), f, xs)
    tuples = kernel._tuples(m.size, len(xs))
    return frozenset(t for i, t in enumerate(tuples) if tab[i])


def reduct(m: FiniteModel, sig: Signature) -> FiniteModel:
    if not sig <= m.signature:
        raise SignatureMismatch(f"{sig!r} is not a subset of the model's signature")
    return FiniteModel(m.size, {s: m.interp[s] for s in sig}, sig)


def expand_by_definitions(m: FiniteModel, delta) -> FiniteModel:
    """Add each defined symbol, interpreted by the relation its body defines.

    ``delta`` is a DefinitionSet or any iterable of explicit definitions
    (objects with ``defined``, ``params`` and ``body``).
    """
    defs = list(getattr(delta, "definitions", delta))
    interp = dict(m.interp)
    for d in defs:
        if d.defined in m.signature:
            raise SemanticsError(f"{d.defined} is already interpreted in the model")
        missing = [s for s in symbols_of(d.body) if s not in m.signature]
        if missing:
            raise SignatureMismatch(
                f"definition of {d.defined.name} uses symbols absent from the model: "
                + ", ".join(map(str, missing)))
        interp[d.defined] = defined_relation(m, d.body, d.params)
    return FiniteModel(m.size, interp, m.signature | Signature(d.defined for d in defs))


# Enumeration.

@dataclass(frozen=True)
class BoundedModelClass:
    theory: Theory
    bound: int
    models: tuple[FiniteModel, ...]

    def __len__(self):
        return len(self.models)

    def __iter__(self):
        return iter(self.models)

    def __contains__(self, m):
        return m in set(self.models)

    def of_size(self, n: int) -> list[FiniteModel]:
        return [m for m in self.models if m.size == n]

    def to_json(self) -> dict:
        from defeq.parser import print_theory
        return {"theory": print_theory(self.theory), "bound": self.bound,
                "models": [print_model(m) for m in self.models]}


def match_definition(ax: Formula):
    """Recognize ``A x1..A xn . p(x1..xn) <-> body`` (either side order).

    Returns ``(symbol, params, body)`` when the bound variables are exactly
    the distinct arguments of ``p``, ``p`` does not occur in ``body`` and the
    body's free variables are among the parameters; otherwise None.
    """
    bound = []
    core = ax
    while True:
        m = match_forall(core)
        if m is None:
            break
        bound.append(m[0])
        core = m[1]
    m = match_iff(core)
    if m is None:
        return None
    for atom, body in (m, m[::-1]):
        if not isinstance(atom, Pred):
            continue
        args = atom.args
        if len(set(args)) != len(args) or set(args) != set(bound) or len(bound) != len(args):
            continue
        if atom.symbol in symbols_of(body) or not free_variables(body) <= set(args):
            continue
        return atom.symbol, args, body
    return None


def _derived_plan(t: Theory):
    """Pick definitional axioms whose symbols can be computed, not searched.

    Returns (ordered derived specs, remaining axioms).  The chosen
    definitions form an acyclic dependency graph; a symbol defined by an
    axiom of the theory is determined by the other symbols in every model,
    so computing it loses no models.
    """
    chosen: dict[RelationSymbol, tuple] = {}
    used_axioms = set()

    def depends(sym, target, seen=None):
        seen = seen or set()
        if sym == target:
            return True
        if sym in seen or sym not in chosen:
            return False
        seen.add(sym)
        return any(depends(s, target, seen) for s in symbols_of(chosen[sym][2]))

    for i, ax in enumerate(t.axioms):
        m = match_definition(ax)
        if m is None:
            continue
        sym, params, body = m
        if sym in chosen:
            continue
        if any(depends(s, sym) for s in symbols_of(body)):
            continue
        chosen[sym] = m
        used_axioms.add(i)
    order: list[tuple] = []
    done: set = set()

    def visit(sym):
        if sym in done:
            return
        done.add(sym)
        for s in sorted(symbols_of(chosen[sym][2])):
            if s in chosen:
                visit(s)
        order.append(chosen[sym])

    for sym in sorted(chosen):
        visit(sym)
    rest = [ax for i, ax in enumerate(t.axioms) if i not in used_axioms]
    return order, rest


@lru_cache(maxsize=64)
def _raw_models(t: Theory, n: int, brute: bool) -> tuple[bytes, ...]:
    """Sorted kernel encodings of the models of ``t`` of size ``n``."""
    layout = kernel.Layout(t.signature, n)
    if brute:
        derived, axioms = [], list(t.axioms)
    else:
        derived, axioms = _derived_plan(t)
    fixed = {d[0] for d in derived}
    free_bits = sum(n ** s.arity for s in t.signature if s not in fixed)
    if free_bits > MAX_FREE_BITS:
        raise SearchSpaceTooLarge(
            f"{t.name}: {free_bits} free bits at size {n} exceeds the limit of {MAX_FREE_BITS}")
    found = kernel.search(layout, axioms, derived)
    found.sort()
    return tuple(found)


@lru_cache(maxsize=16)
def _models_of_size(t: Theory, n: int, brute: bool) -> tuple[FiniteModel, ...]:
    layout = kernel.Layout(t.signature, n)
    return tuple(FiniteModel(n, layout.decode(d), t.signature) for d in _raw_models(t, n, brute))


def enumerate_models(sig: Signature, t: Theory, k: int | None = None,
                     brute_force: bool = False) -> BoundedModelClass:
    """All models of ``t`` with at most ``k`` elements, in canonical order.

    Canonical order is ascending size, then lexicographic order of the
    concatenated relation bit-vectors.  ``brute_force`` disables the
    shortcut that computes explicitly defined symbols instead of
    enumerating them.
    """
    k = default_bound() if k is None else k
    if k < 1:
        raise SemanticsError("bound must be at least 1")
    if sig != t.signature:
        raise SignatureMismatch(f"{t.name} is over {t.signature!r}, not {sig!r}")
    models: list[FiniteModel] = []
    for n in range(1, k + 1):
        models.extend(_models_of_size(t, n, brute_force))
    return BoundedModelClass(t, k, tuple(models))


def models_of(t: Theory, k: int | None = None) -> BoundedModelClass:
    return enumerate_models(t.signature, t, k)


def clear_cache() -> None:
    _raw_models.cache_clear()
    _models_of_size.cache_clear()


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    bound: int
    witness: FiniteModel | None = None
    # which theory the witness is a model of: "left" or "right"
    witness_side: str | None = None

    def __bool__(self):
        return self.equivalent


def bounded_equivalent(t1: Theory, t2: Theory, k: int | None = None) -> EquivalenceResult:
    """Compare the model classes of two theories up to size ``k``."""
    k = default_bound() if k is None else k
    if t1.signature != t2.signature:
        raise SignatureMismatch(
            f"{t1.name} and {t2.name} have different signatures: {t1.signature!r} vs {t2.signature!r}")
    diffs = []
    for n in range(1, k + 1):
        ra, rb = _raw_models(t1, n, False), _raw_models(t2, n, False)
        if ra != rb:
            diffs.append((n, ra, rb))
    if not diffs:
        return EquivalenceResult(True, k)
    # the first left-only model in canonical order, else the first right-only one
    for side in ("left", "right"):
        for n, ra, rb in diffs:
            mine, other = (ra, set(rb)) if side == "left" else (rb, set(ra))
            extra = next((d for d in mine if d not in other), None)
            if extra is not None:
                layout = kernel.Layout(t1.signature, n)
                return EquivalenceResult(False, k, FiniteModel(n, layout.decode(extra), t1.signature), side)
    raise AssertionError("unequal model lists without a difference")


class _Checker:
    """Evaluates one sentence over many models, compiling once per size."""

    def __init__(self, f: Formula, sig: Signature):
        self.f = f
        self.sig = sig
        self._compiled = {}

    def __call__(self, m: FiniteModel) -> bool:
        c = self._compiled.get(m.size)
        if c is None:
            layout = kernel.Layout(self.sig, m.size)
            c = self._compiled[m.size] = (layout, kernel.compile_formula(layout, self.f))
        layout, check = c
        return check(layout.encode(m.interp))


def countermodel(t: Theory, f: Formula, k: int | None = None) -> FiniteModel | None:
    """First model of ``t`` (size <= k, canonical order) falsifying ``f``."""
    if not is_sentence(f):
        raise EvaluationError("entailment is only defined for sentences")
    bad = [s for s in symbols_of(f) if s not in t.signature]
    if bad:
        raise SignatureMismatch(f"symbols outside {t.name}'s signature: {', '.join(map(str, bad))}")
    check = _Checker(f, t.signature)
    for m in models_of(t, k):
        if not check(m):
            return m
    return None


def bounded_entails(t: Theory, f: Formula, k: int | None = None) -> bool:
    return countermodel(t, f, k) is None


def holds_in(m: FiniteModel, f: Formula) -> bool:
    """Kernel-evaluated truth of a sentence (same answer as ``satisfies``)."""
    layout = kernel.Layout(m.signature, m.size)
    return kernel.evaluate(layout, layout.encode(m.interp), f)


# Text format: "model SIZE" then "REL: (t1,...,tn); (...)" lines.

def print_model(m: FiniteModel) -> str:
    lines = [f"model {m.size}"]
    for s in m.signature:
        tuples = sorted(m.interp[s])
        body = "; ".join("(" + ",".join(map(str, t)) + ")" for t in tuples)
        lines.append(f"{s.name}: {body}".rstrip())
    return "\n".join(lines)


_TUPLE_RE = re.compile(r"\(\s*([0-9,\s]*)\)")


def parse_model(text: str, sig: Signature | None = None) -> FiniteModel:
    """Parse the model text format.

    With ``sig`` given, missing relations are empty and arities are
    checked; without it, arities are read off the tuples (an empty relation
    then needs a signature).
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("model "):
        raise SemanticsError("model text must start with 'model SIZE'")
    try:
        size = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise SemanticsError(f"bad model header {lines[0]!r}") from None
    interp: dict[RelationSymbol, list] = {}
    for ln in lines[1:]:
        name, sep, rest = ln.partition(":")
        if not sep:
            raise SemanticsError(f"bad relation line {ln!r}")
        name = name.strip()
        tuples = []
        for part in filter(None, (p.strip() for p in rest.split(";"))):
            tm = _TUPLE_RE.fullmatch(part)
            if tm is None:
                raise SemanticsError(f"bad tuple {part!r}")
            inner = tm.group(1).strip()
            tuples.append(tuple(int(x) for x in inner.split(",")) if inner else ())
        if sig is not None:
            sym = sig.get(name)
            if sym is None:
                raise SemanticsError(f"unknown relation {name!r}")
        else:
            arities = {len(t) for t in tuples}
            if len(arities) != 1:
                raise SemanticsError(f"cannot infer the arity of {name!r}; pass a signature")
            sym = RelationSymbol(name, arities.pop())
        interp[sym] = tuples
    return FiniteModel(size, interp, sig if sig is not None else Signature(interp))


def model_class_json(cls: BoundedModelClass) -> str:
    return json.dumps(cls.to_json(), indent=2)
