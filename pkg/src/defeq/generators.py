"""Seeded random instances: formulas, theories, translations, mergers and
definitional-equivalence chains.

Everything takes an explicit ``random.Random`` so runs are reproducible.
Mergers are produced from invertible rewritings, so they are genuine (not
just bounded) mergers; chains are built from extension, restriction and
rewriting steps whose correctness holds by construction.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from defeq.definability import (
    ChainStep, DefEqCertificate, DefinitionSet, ExplicitDefinition, MergeCertificate,
    apply_extension, unfold, verify_merge,
)
from defeq.syntax import (
    And, Eq, Exists, Forall, Formula, Iff, Implies, Not, Or, Pred, RelationSymbol, Signature,
    Theory, Var, forall_all, free_variables, substitute,
)
from defeq.semantics import FiniteModel, models_of
from defeq.translation import Translation, parameters

NAMES = ("p", "q", "r", "s", "t", "u", "v", "w")


def signature_bits(sig: Signature, size: int) -> int:
    """Number of relation bits a structure of ``size`` elements has."""
    return sum(size ** s.arity for s in sig)


def random_signature(rng: random.Random, max_symbols: int = 3, max_arity: int = 2,
                     names=NAMES, min_symbols: int = 1, max_bits: int | None = 12,
                     size: int = 3) -> Signature:
    """Random signature; with ``max_bits`` set, structures of ``size``
    elements have at most that many relation bits (keeps enumeration cheap)."""
    while True:
        n = rng.randint(min_symbols, max_symbols)
        chosen = rng.sample(list(names), n)
        sig = Signature(RelationSymbol(nm, rng.randint(0, max_arity)) for nm in chosen)
        if max_bits is None or signature_bits(sig, size) <= max_bits:
            return sig


def random_atom(rng: random.Random, sig: Signature, scope: list[Var]) -> Formula:
    syms = list(sig)
    if scope and (not syms or rng.random() < 0.2):
        return Eq(rng.choice(scope), rng.choice(scope))
    usable = [s for s in syms if s.arity == 0 or scope]
    if not usable:
        # nothing applies without variables; fall back to a closed atom
        v = Var(0)
        if syms:
            s = rng.choice(syms)
            return Exists(v, Pred(s, (v,) * s.arity))
        return Exists(v, Eq(v, v))
    s = rng.choice(usable)
    return Pred(s, tuple(rng.choice(scope) for _ in range(s.arity)))


def random_formula(rng: random.Random, sig: Signature, depth: int, scope: list[Var],
                   max_var: int = 3, sugar: bool = True) -> Formula:
    """Random formula of depth at most ``depth`` (counted on the input
    connectives), free variables drawn from ``scope``."""
    if depth <= 0 or rng.random() < 0.25:
        return random_atom(rng, sig, scope)
    kinds = ["not", "and", "exists"] + (["or", "implies", "iff", "forall"] if sugar else [])
    k = rng.choice(kinds)
    if k in ("exists", "forall"):
        v = Var(rng.randint(0, max_var))
        body = random_formula(rng, sig, depth - 1, sorted(set(scope) | {v}), max_var, sugar)
        return Exists(v, body) if k == "exists" else Forall(v, body)
    if k == "not":
        return Not(random_formula(rng, sig, depth - 1, scope, max_var, sugar))
    a = random_formula(rng, sig, depth - 1, scope, max_var, sugar)
    b = random_formula(rng, sig, depth - 1, scope, max_var, sugar)
    return {"and": And, "or": Or, "implies": Implies, "iff": Iff}[k](a, b)


def random_sentence(rng: random.Random, sig: Signature, depth: int) -> Formula:
    f = random_formula(rng, sig, depth, [], sugar=True)
    fv = sorted(free_variables(f))
    return forall_all(fv, f) if fv else f


def random_theory(rng: random.Random, sig: Signature, max_axioms: int = 2, depth: int = 2,
                  name: str = "T") -> Theory:
    axioms = [random_sentence(rng, sig, depth) for _ in range(rng.randint(0, max_axioms))]
    return Theory(sig, axioms, name)


def random_body(rng: random.Random, sig: Signature, arity: int, depth: int) -> Formula:
    """Formula with free variables among x0..x(arity-1)."""
    scope = [Var(i) for i in range(arity)]
    return random_formula(rng, sig, depth, scope, max_var=arity + 1)


def random_translation(rng: random.Random, source: Theory, target: Theory, depth: int = 2) -> Translation:
    images = {}
    for s in source.signature:
        scope = list(parameters(s.arity))
        images[s] = (tuple(scope), random_formula(rng, target.signature, depth, scope,
                                                  max_var=s.arity + 1))
    return Translation(source, target, images)


def _xor(a: Formula, b: Formula) -> Formula:
    return Not(Iff(a, b))


@dataclass
class Rewriting:
    """An invertible symbol-by-symbol rewriting of ``source`` symbols into
    ``target`` symbols: ``new(x) <-> sign(old(x o perm) xor mask(x))`` with
    the mask over earlier source symbols."""

    forward: DefinitionSet
    backward: DefinitionSet


def random_rewriting(rng: random.Random, source: Signature, target_names: list[str],
                     depth: int = 1, keep: Signature = Signature()) -> Rewriting:
    """Rewrite the symbols of ``source`` outside ``keep`` into symbols named
    ``target_names``; symbols in ``keep`` stay and may occur in masks."""
    olds = [s for s in source if s not in keep]
    rng.shuffle(olds)
    news = [RelationSymbol(nm, s.arity) for nm, s in zip(target_names, olds)]
    target = keep | Signature(news)
    fwd: list[ExplicitDefinition] = []
    back: dict[RelationSymbol, tuple[tuple[Var, ...], Formula]] = {}
    for i, (old, new) in enumerate(zip(olds, news)):
        n = old.arity
        xs = tuple(Var(j) for j in range(n))
        perm = list(range(n))
        rng.shuffle(perm)
        negate = rng.random() < 0.5
        earlier = keep | Signature(olds[:i])
        mask = random_body(rng, earlier, n, depth) if rng.random() < 0.6 else None
        core = Pred(old, tuple(xs[perm[j]] for j in range(n)))
        if mask is not None:
            core = _xor(core, mask)
        fwd.append(ExplicitDefinition(new, xs, Not(core) if negate else core))
        # old(x o perm) <-> sign(new(x)) xor mask(x)
        inv = Pred(new, xs)
        if negate:
            inv = Not(inv)
        if mask is not None:
            inv = _xor(inv, unfold(mask, DefinitionSet(target, [ExplicitDefinition(s, *back[s])
                                                                 for s in back])))
        # x_perm[j] plays the role of old's j-th argument
        inv = substitute(inv, {xs[perm[j]]: xs[j] for j in range(n)})
        back[old] = (xs, inv)
    return Rewriting(DefinitionSet(source, fwd),
                     DefinitionSet(target, [ExplicitDefinition(s, *back[s]) for s in back]))


def rewrite_theory(t: Theory, rw: Rewriting, name: str) -> Theory:
    return Theory(rw.backward.base, [unfold(ax, rw.backward) for ax in t.axioms], name)


def random_merger(rng: random.Random, t: Theory, target_names: list[str], k: int,
                  depth: int = 1, name: str = "T'", keep: Signature = Signature()) -> MergeCertificate:
    """``t`` together with a rewritten copy (symbols in ``keep`` shared, the
    rest renamed to ``target_names``), and the verified merger between them."""
    rw = random_rewriting(rng, t.signature, target_names, depth, keep)
    t2 = rewrite_theory(t, rw, name)
    return verify_merge(t, t2, rw.forward, rw.backward, k)


def random_consistent_theory(rng: random.Random, sig: Signature, k: int, max_axioms: int = 2,
                             depth: int = 2, name: str = "T", tries: int = 50) -> Theory:
    """A random theory with at least one model of size at most ``k`` (falls
    back to no axioms)."""
    for _ in range(tries):
        t = random_theory(rng, sig, max_axioms, depth, name)
        if len(models_of(t, k)):
            return t
    return Theory(sig, (), name)


def perturb(rng: random.Random, delta: DefinitionSet, depth: int = 2) -> DefinitionSet:
    """Replace one definition body by a random one."""
    if not len(delta):
        return delta
    defs = list(delta)
    i = rng.randrange(len(defs))
    d = defs[i]
    defs[i] = ExplicitDefinition(d.defined, d.params, random_body(rng, delta.base, d.defined.arity, depth))
    return DefinitionSet(delta.base, defs)


def disjoint_names(rng: random.Random, count: int, avoid: set[str], pool=NAMES) -> list[str]:
    free = [n for n in pool if n not in avoid]
    extra = 1
    while len(free) < count:
        free += [f"{n}{extra}" for n in pool if f"{n}{extra}" not in avoid]
        extra += 1
    return rng.sample(free, count)


@dataclass
class _ChainState:
    core: Theory
    defs: dict = field(default_factory=dict)  # symbol -> ExplicitDefinition over core

    def theory(self, name: str) -> Theory:
        ds = DefinitionSet(self.core.signature, self.defs.values())
        return apply_extension(self.core, ds, name)

    @property
    def signature(self) -> Signature:
        return self.core.signature | Signature(self.defs)


def random_chain(rng: random.Random, start: Theory, steps: int, k: int,
                 names=NAMES[:5], depth: int = 1) -> DefEqCertificate:
    """A definitional-equivalence chain with ``steps`` steps from ``start``.

    Steps extend by a definition over the current core, drop a defined
    symbol, or (when nothing is defined) rewrite the core into other
    symbols through a common extension.  New symbol names come from a small
    pool, so theories along the chain reuse each other's names.
    """
    state = _ChainState(start)
    theories = [start]
    chain_steps: list[ChainStep] = []
    counter = 0
    while len(chain_steps) < steps:
        counter += 1
        left = steps - len(chain_steps)
        options = ["extend"]
        if state.defs:
            options.append("restrict")
        elif left >= 2:
            options += ["rewrite", "rewrite"]
        act = rng.choice(options)
        sig = state.signature
        if act == "extend":
            avail = [n for n in names if n not in sig]
            if not avail:
                continue
            sym = RelationSymbol(rng.choice(avail), rng.randint(0, 2 if len(sig) < 3 else 1))
            d = ExplicitDefinition(sym, tuple(Var(i) for i in range(sym.arity)),
                                   random_body(rng, state.core.signature, sym.arity, depth))
            before = sig
            state.defs[sym] = d
            t = state.theory(f"C{len(theories)}")
            chain_steps.append(ChainStep("=>", DefinitionSet(before, [d])))
            theories.append(t)
        elif act == "restrict":
            sym = rng.choice(sorted(state.defs))
            d = state.defs.pop(sym)
            t = state.theory(f"C{len(theories)}")
            chain_steps.append(ChainStep("<=", DefinitionSet(t.signature, [d])))
            theories.append(t)
        else:
            core = state.core
            new_names = disjoint_names(rng, len(core.signature), set(core.signature.names()),
                                       pool=names)
            rw = random_rewriting(rng, core.signature, new_names, depth)
            ext = apply_extension(core, rw.forward, f"C{len(theories)}")
            other = rewrite_theory(core, rw, f"C{len(theories) + 1}")
            chain_steps.append(ChainStep("=>", rw.forward))
            chain_steps.append(ChainStep("<=", rw.backward))
            theories += [ext, other]
            state = _ChainState(other)
    return DefEqCertificate(tuple(theories), tuple(chain_steps), k)


def random_model_bits(rng: random.Random, sig: Signature, size: int):
    interp = {}
    for s in sig:
        interp[s] = [t for t in itertools.product(range(size), repeat=s.arity) if rng.random() < 0.5]
    return FiniteModel(size, interp, sig)
