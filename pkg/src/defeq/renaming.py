"""Disjoint renamings and what they do to mergers.

A renaming is an arity-preserving bijection between two disjoint
signatures.  Mergers can be carried along renamings of either side, which is
what turns an arbitrary definitional-equivalence chain into one merger plus
one renaming.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from defeq.definability import (
    DefEqCertificate, DefinitionSet, ExplicitDefinition, MergeCertificate,
    compose_disjoint_mergers, verify_defeq_chain, verify_merge,
)
from defeq.syntax import Pred, RelationSymbol, Signature, Theory, Var, apply_symbol_map


class RenamingError(ValueError):
    pass


@dataclass(frozen=True)
class Renaming:
    source: Signature
    target: Signature
    mapping: Mapping[RelationSymbol, RelationSymbol]

    def __post_init__(self):
        m = dict(sorted(self.mapping.items()))
        object.__setattr__(self, "mapping", m)
        if set(m) != set(self.source):
            raise RenamingError("renaming must be defined on exactly the source signature")
        if set(m.values()) != set(self.target) or len(set(m.values())) != len(m):
            raise RenamingError("renaming must be a bijection onto the target signature")
        for a, b in m.items():
            if a.arity != b.arity:
                raise RenamingError(f"{a} and {b} differ in arity")
        clash = set(self.source.names()) & set(self.target.names())
        if clash:
            raise RenamingError(f"source and target share symbols {sorted(clash)}")

    def __hash__(self):
        return hash((self.source, self.target, tuple(self.mapping.items())))

    def __call__(self, x):
        """Rename a symbol, a formula or a theory."""
        if isinstance(x, RelationSymbol):
            return self.mapping[x]
        if isinstance(x, Theory):
            return apply_renaming(x, self)
        return apply_symbol_map(x, self.mapping)

    def inverse(self) -> "Renaming":
        return Renaming(self.target, self.source, {b: a for a, b in self.mapping.items()})

    def lines(self) -> list[str]:
        return [f"rename {a.name} -> {b.name}" for a, b in self.mapping.items()]

    @classmethod
    def from_lines(cls, lines, source: Signature) -> "Renaming":
        m = {}
        for raw in lines:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4 or parts[0] != "rename" or parts[2] != "->":
                raise RenamingError(f"bad renaming line {raw!r}")
            a = source.get(parts[1])
            if a is None:
                raise RenamingError(f"{parts[1]} is not in the source signature")
            m[a] = RelationSymbol(parts[3], a.arity)
        return cls(source, Signature(m.values()), m)


def fresh_renaming(sig: Signature, avoid: Signature | Iterable[str] = ()) -> Renaming:
    """Rename each symbol ``p`` to ``p_rN`` with the least ``N >= 1`` not
    already taken by ``sig``, ``avoid`` (a signature or a set of names) or
    an earlier choice."""
    avoid_names = avoid.names() if isinstance(avoid, Signature) else avoid
    taken = set(sig.names()) | set(avoid_names)
    m = {}
    for s in sig:
        n = 1
        while f"{s.name}_r{n}" in taken:
            n += 1
        new = RelationSymbol(f"{s.name}_r{n}", s.arity)
        taken.add(new.name)
        m[s] = new
    return Renaming(sig, Signature(m.values()), m)


def apply_renaming(t: Theory, r: Renaming, name: str | None = None) -> Theory:
    if t.signature != r.source:
        raise RenamingError(f"renaming source {r.source!r} is not {t.name}'s signature")
    return Theory(r.target, [apply_symbol_map(a, r.mapping) for a in t.axioms], name or f"{t.name}'")


def _copy(sym: RelationSymbol, to: RelationSymbol) -> ExplicitDefinition:
    params = tuple(Var(i) for i in range(sym.arity))
    return ExplicitDefinition(to, params, Pred(sym, params))


def renaming_to_merger(t: Theory, r: Renaming, k: int | None = None) -> MergeCertificate:
    """``t`` merges with its renaming via ``p'(x) <-> p(x)`` both ways."""
    t2 = apply_renaming(t, r)
    d12 = DefinitionSet(t.signature, [_copy(p, r(p)) for p in t.signature])
    d21 = DefinitionSet(t2.signature, [_copy(r(p), p) for p in t.signature])
    return verify_merge(t, t2, d12, d21, k)


def _identity(sig: Signature) -> dict:
    return {s: s for s in sig}


def transport_merger(c: MergeCertificate, rb: Renaming, ra: Renaming | None = None,
                     k: int | None = None) -> MergeCertificate:
    """Carry a verified merger of ``(Ta, Tb)`` to ``(Ta, rb(Tb))``, or to
    ``(ra(Ta), rb(Tb))`` when ``ra`` is given.

    Symbols of ``Tb`` missing from ``Ta`` keep their defining formulas
    (renamed along ``ra``); symbols the two sides shared become copies of
    each other.  The result is re-verified.
    """
    k = c.bound if k is None else k
    if not c.verified:
        raise RenamingError("only verified mergers can be transported")
    sa, sb = c.left.signature, c.right.signature
    if rb.source != sb:
        raise RenamingError("rb must rename the right-hand signature")
    if ra is not None and ra.source != sa:
        raise RenamingError("ra must rename the left-hand signature")
    new_left = sa if ra is None else ra.target
    if not rb.target.isdisjoint(new_left):
        raise RenamingError("renamed right-hand signature must be disjoint from the left-hand one")
    amap = _identity(sa) if ra is None else ra.mapping
    bmap = rb.mapping
    left = c.left if ra is None else apply_renaming(c.left, ra)
    right = apply_renaming(c.right, rb)

    d_lr = []
    for p in sb:
        if p in sa:
            d_lr.append(_copy(amap[p], bmap[p]))
        else:
            d = c.delta_lr[p]
            d_lr.append(ExplicitDefinition(bmap[p], d.params, apply_symbol_map(d.body, amap)))
    d_rl = []
    for q in sa:
        if q in sb:
            d_rl.append(_copy(bmap[q], amap[q]))
        else:
            d = c.delta_rl[q]
            d_rl.append(ExplicitDefinition(amap[q], d.params, apply_symbol_map(d.body, bmap)))
    return verify_merge(left, right, DefinitionSet(left.signature, d_lr),
                        DefinitionSet(right.signature, d_rl), k)


@dataclass(frozen=True)
class TwoStep:
    """``first`` merges T1 with ``renaming(T2)``; ``second`` merges that
    renamed copy with T2."""

    first: MergeCertificate
    renaming: Renaming
    second: MergeCertificate

    @property
    def mergers(self) -> tuple[MergeCertificate, MergeCertificate]:
        return (self.first, self.second)

    def as_chain(self) -> DefEqCertificate:
        return self.first.as_chain().concat(self.second.as_chain())


def defeq_two_step(t1: Theory, t2: Theory, chain: DefEqCertificate,
                   k: int | None = None) -> TwoStep:
    """Normal form of a definitional-equivalence chain from ``t1`` to ``t2``.

    Every step of the chain is read as a merger (one side's definitions
    empty).  All theories after the first get pairwise disjoint fresh
    names; the mergers are carried along these renamings and composed left
    to right into one merger of ``t1`` with the renamed ``t2``.
    """
    k = chain.bound if k is None else k
    if chain.start != t1 or chain.end != t2:
        raise RenamingError("chain endpoints do not match the given theories")
    verdict = verify_defeq_chain(chain, k)
    if not verdict.ok:
        raise RenamingError(f"chain not verified: step {verdict.failing_index}: {verdict.reason}")
    theories = chain.theories
    taken = {n for t in theories for n in t.signature.names()}
    last = fresh_renaming(t2.signature, taken)
    taken |= set(last.target.names())
    if len(theories) == 1:
        first = renaming_to_merger(t1, last, k)
    else:
        renamings = []
        for t in theories[1:-1]:
            r = fresh_renaming(t.signature, taken)
            taken |= set(r.target.names())
            renamings.append(r)
        renamings.append(last)
        steps = chain.mergers()
        first = transport_merger(steps[0], renamings[0], None, k)
        for i in range(1, len(steps)):
            moved = transport_merger(steps[i], renamings[i], renamings[i - 1], k)
            first = compose_disjoint_mergers(first, moved, k)
    second = renaming_to_merger(t2, last, k).swapped()
    return TwoStep(first, last, second)
