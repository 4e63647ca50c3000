"""Explicit definitions, definitional extensions, mergers and chains.

A merger of ``T1`` and ``T2`` is witnessed by two definition sets: ``d12``
defines the symbols of ``T2`` missing from ``T1`` in ``T1``'s language and
``d21`` the other way round.  The pair is a merger exactly when
``T1 + d12`` and ``T2 + d21`` have the same models; here that is checked up
to a universe-size bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from defeq import semantics
from defeq.parser import print_formula
from defeq.semantics import FiniteModel, bounded_equivalent, default_bound, models_of
from defeq.syntax import (
    And, Eq, Exists, Formula, Iff, Not, Pred, RelationSymbol, Signature, Theory, Var,
    WellFormednessError, check_well_formed, forall_all, formula_size, free_variables,
    replace_predicates, symbols_of,
)


class DefinitionError(ValueError):
    """Ill-typed definitions or definition sets."""


@dataclass(frozen=True)
class ExplicitDefinition:
    defined: RelationSymbol
    params: tuple[Var, ...]
    body: Formula

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if len(self.params) != self.defined.arity:
            raise DefinitionError(
                f"{self.defined.name} has arity {self.defined.arity} but {len(self.params)} parameters")
        if len(set(self.params)) != len(self.params):
            raise DefinitionError(f"parameters of {self.defined.name} are not distinct")
        if not free_variables(self.body) <= set(self.params):
            extra = sorted(free_variables(self.body) - set(self.params))
            raise DefinitionError(f"body of {self.defined.name} has free variables {extra}")
        if self.defined in symbols_of(self.body):
            raise DefinitionError(f"{self.defined.name} occurs in its own definition")

    @classmethod
    def from_sentence(cls, f: Formula) -> "ExplicitDefinition":
        m = semantics.match_definition(f)
        if m is None:
            raise DefinitionError(f"not an explicit definition: {print_formula(f)}")
        return cls(*m)

    def sentence(self) -> Formula:
        return sentence_of(self)

    def __str__(self):
        return print_formula(self.sentence())


def define(symbol: RelationSymbol, body: Formula, params: Sequence[Var] | None = None) -> ExplicitDefinition:
    """Definition of ``symbol`` by ``body``; parameters default to x0..x(n-1)."""
    if params is None:
        params = tuple(Var(i) for i in range(symbol.arity))
    return ExplicitDefinition(symbol, tuple(params), body)


def sentence_of(d: ExplicitDefinition) -> Formula:
    """The universally closed biconditional ``A x1..A xn . p(x1..xn) <-> body``."""
    return forall_all(d.params, Iff(Pred(d.defined, d.params), d.body))


class DefinitionSet:
    """At most one explicit definition per new symbol, all over ``base``."""

    __slots__ = ("base", "definitions", "_by_symbol")

    def __init__(self, base: Signature, definitions: Iterable[ExplicitDefinition] = ()):
        by_symbol: dict[RelationSymbol, ExplicitDefinition] = {}
        for d in definitions:
            if d.defined.name in base:
                raise DefinitionError(f"{d.defined.name} is already in the base signature")
            if d.defined in by_symbol:
                raise DefinitionError(f"{d.defined.name} is defined twice")
            try:
                check_well_formed(d.body, base)
            except WellFormednessError as e:
                raise DefinitionError(f"definition of {d.defined.name}: {e}") from None
            by_symbol[d.defined] = d
        Signature(by_symbol)  # rejects two new symbols sharing a name
        self.base = base
        self._by_symbol = dict(sorted(by_symbol.items()))
        self.definitions: tuple[ExplicitDefinition, ...] = tuple(self._by_symbol.values())

    @classmethod
    def empty(cls, base: Signature) -> "DefinitionSet":
        return cls(base, ())

    @property
    def defined_signature(self) -> Signature:
        return Signature(self._by_symbol)

    @property
    def extended_signature(self) -> Signature:
        return self.base | self.defined_signature

    def __getitem__(self, sym) -> ExplicitDefinition:
        if isinstance(sym, str):
            sym = self.defined_signature[sym]
        return self._by_symbol[sym]

    def __iter__(self):
        return iter(self.definitions)

    def __len__(self):
        return len(self.definitions)

    def __eq__(self, other):
        if not isinstance(other, DefinitionSet):
            return NotImplemented
        return self.base == other.base and self._by_symbol == other._by_symbol

    def __hash__(self):
        return hash((self.base, frozenset(self._by_symbol.items())))

    def __repr__(self):
        defs = "; ".join(str(d) for d in self.definitions)
        return f"DefinitionSet(base={self.base!r}, [{defs}])"

    def sentences(self) -> list[Formula]:
        return [sentence_of(d) for d in self.definitions]

    def images(self) -> dict:
        """Symbol -> (params, body), the form ``replace_predicates`` takes."""
        return {d.defined: (d.params, d.body) for d in self.definitions}


def apply_extension(t: Theory, delta: DefinitionSet, name: str | None = None) -> Theory:
    """``t`` plus the definition sentences of ``delta``."""
    if delta.base != t.signature:
        raise DefinitionError(
            f"definitions are over {delta.base!r}, but {t.name} is over {t.signature!r}")
    collide = [s for s in delta.defined_signature if s.name in t.signature]
    if collide:
        raise DefinitionError(f"defined symbols collide with {t.name}: {collide}")
    return Theory(t.signature | delta.defined_signature, t.axioms + tuple(delta.sentences()),
                  name or f"{t.name}+")


@dataclass(frozen=True)
class MergeCertificate:
    left: Theory
    right: Theory
    delta_lr: DefinitionSet
    delta_rl: DefinitionSet
    bound: int
    verified: bool
    witness: FiniteModel | None = field(default=None, compare=False)
    witness_side: str | None = field(default=None, compare=False)

    def __bool__(self):
        return self.verified

    def swapped(self) -> "MergeCertificate":
        side = {"left": "right", "right": "left"}.get(self.witness_side)
        return MergeCertificate(self.right, self.left, self.delta_rl, self.delta_lr,
                                self.bound, self.verified, self.witness, side)

    @property
    def common_extension(self) -> Theory:
        return apply_extension(self.left, self.delta_lr, f"{self.left.name}+")

    def as_chain(self) -> "DefEqCertificate":
        """``left => left+delta_lr <= right``."""
        mid = self.common_extension
        return DefEqCertificate((self.left, mid, self.right),
                                (ChainStep("=>", self.delta_lr), ChainStep("<=", self.delta_rl)),
                                self.bound)


def check_merge_typing(t1: Theory, t2: Theory, d12: DefinitionSet, d21: DefinitionSet) -> None:
    s1, s2 = t1.signature, t2.signature
    if d12.base != s1:
        raise DefinitionError(f"first definition set must be over {t1.name}'s signature {s1!r}")
    if d21.base != s2:
        raise DefinitionError(f"second definition set must be over {t2.name}'s signature {s2!r}")
    if d12.defined_signature != s2 - s1:
        raise DefinitionError(
            f"first definition set must define exactly {s2 - s1!r}, defines {d12.defined_signature!r}")
    if d21.defined_signature != s1 - s2:
        raise DefinitionError(
            f"second definition set must define exactly {s1 - s2!r}, defines {d21.defined_signature!r}")


def verify_merge(t1: Theory, t2: Theory, d12: DefinitionSet, d21: DefinitionSet,
                 k: int | None = None) -> MergeCertificate:
    """Check ``t1 + d12`` and ``t2 + d21`` have the same models up to size ``k``."""
    k = default_bound() if k is None else k
    check_merge_typing(t1, t2, d12, d21)
    e1 = apply_extension(t1, d12)
    e2 = apply_extension(t2, d21)
    res = bounded_equivalent(e1, e2, k)
    return MergeCertificate(t1, t2, d12, d21, k, res.equivalent, res.witness, res.witness_side)


def reverify(c: MergeCertificate, k: int | None = None) -> MergeCertificate:
    return verify_merge(c.left, c.right, c.delta_lr, c.delta_rl, c.bound if k is None else k)


NOT_MERGEABLE = "NOT-MERGEABLE-AT-{k}"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class IncompatibilityReport:
    verdict: str
    bound: int
    left_model: FiniteModel | None = None
    right_model: FiniteModel | None = None
    union_models: int = 0

    @property
    def not_mergeable(self) -> bool:
        return self.verdict != INCONCLUSIVE


def incompatibility_witness(t1: Theory, t2: Theory, k: int | None = None) -> IncompatibilityReport:
    """Sufficient test for non-mergeability.

    If both theories have a model of size at most ``k`` while the union of
    their axioms has none, no definitions can reconcile them: a common
    extension would restrict to a model of the union.
    """
    k = default_bound() if k is None else k
    m1 = models_of(t1, k).models
    m2 = models_of(t2, k).models
    union = models_of(t1.union(t2), k).models
    if m1 and m2 and not union:
        return IncompatibilityReport(NOT_MERGEABLE.format(k=k), k, m1[0], m2[0], 0)
    return IncompatibilityReport(INCONCLUSIVE, k, m1[0] if m1 else None,
                                 m2[0] if m2 else None, len(union))


def verify_extension_step(lower: Theory, upper: Theory, delta: DefinitionSet, k: int) -> str | None:
    """None if ``upper`` is a definitional extension of ``lower`` via ``delta``
    (at bound ``k``), otherwise the reason it is not."""
    if delta.base != lower.signature:
        return f"definitions are not over {lower.name}'s signature"
    if upper.signature != lower.signature | delta.defined_signature:
        return f"{upper.name}'s signature is not {lower.name}'s plus the defined symbols"
    try:
        ext = apply_extension(lower, delta)
    except DefinitionError as e:
        return str(e)
    res = bounded_equivalent(upper, ext, k)
    if not res:
        return f"not equivalent at bound {k}; witness {res.witness!r} ({res.witness_side})"
    return None


# Formula candidates for search.

class CandidateSpace:
    """Formulas over a signature, deduplicated by their meaning in a fixed
    list of models.

    A formula in context ``m`` has free variables among x0..x(m-1); its
    meaning is, per model, a bitmask over all assignments of those
    variables (x0 most significant in the index).  Quantifiers in context
    ``m`` bind ``x_m``.  ``layer(m, d)`` holds one representative per
    meaning reachable with depth at most ``d``; this loses no meaning.
    """

    def __init__(self, sig: Signature, models: Sequence[FiniteModel], max_meanings: int = 20000):
        self.sig = sig
        self.models = list(models)
        self.max_meanings = max_meanings
        self.truncated = False
        self._layers: dict[tuple[int, int], dict] = {}

    def _full(self, m: int) -> tuple[int, ...]:
        return tuple((1 << (M.size ** m)) - 1 for M in self.models)

    def _atom_meaning(self, f: Formula, m: int) -> tuple[int, ...]:
        out = []
        for M in self.models:
            mask = 0
            for idx, vals in enumerate(itertools.product(range(M.size), repeat=m)):
                e = {Var(i): vals[i] for i in range(m)}
                if semantics._sat(M, f, e):
                    mask |= 1 << idx
            out.append(mask)
        return tuple(out)

    def atoms(self, m: int) -> list[Formula]:
        vs = [Var(i) for i in range(m)]
        out: list[Formula] = []
        for s in self.sig:
            for args in itertools.product(vs, repeat=s.arity):
                out.append(Pred(s, args))
        for i in range(m):
            for j in range(i, m):
                out.append(Eq(vs[i], vs[j]))
        return sorted(out, key=_canon_key)

    def _exists(self, meaning: tuple[int, ...], m: int) -> tuple[int, ...]:
        out = []
        for M, mask in zip(self.models, meaning):
            s = M.size
            block = (1 << s) - 1
            new = 0
            for idx in range(s ** m):
                if (mask >> (idx * s)) & block:
                    new |= 1 << idx
            out.append(new)
        return tuple(out)

    def layer(self, m: int, d: int) -> dict:
        """meaning -> representative formula, for context ``m`` and depth ``d``."""
        key = (m, d)
        if key in self._layers:
            return self._layers[key]
        if d == 0:
            reps: dict = {}
            for a in self.atoms(m):
                reps.setdefault(self._atom_meaning(a, m), a)
            self._layers[key] = reps
            return reps
        prev = self.layer(m, d - 1)
        reps = dict(prev)
        full = self._full(m)
        items = sorted(prev.items(), key=lambda kv: _canon_key(kv[1]))

        def add(meaning, f):
            if meaning not in reps:
                if len(reps) >= self.max_meanings:
                    self.truncated = True
                    return False
                reps[meaning] = f
            return True

        for mean, f in items:
            if not add(tuple(x ^ y for x, y in zip(mean, full)), Not(f)):
                break
        inner = self.layer(m + 1, d - 1)
        for mean, f in sorted(inner.items(), key=lambda kv: _canon_key(kv[1])):
            if not add(self._exists(mean, m), Exists(Var(m), f)):
                break
        for (ma, fa), (mb, fb) in itertools.product(items, repeat=2):
            if not add(tuple(x & y for x, y in zip(ma, mb)), And(fa, fb)):
                break
        self._layers[key] = reps
        return reps

    def candidates(self, arity: int, depth: int) -> list[tuple[Formula, tuple[int, ...]]]:
        """Representatives for a defining body with parameters x0..x(arity-1),
        in canonical order (formula size, then printed text)."""
        reps = self.layer(arity, depth)
        return sorted(((f, mean) for mean, f in reps.items()), key=lambda x: _canon_key(x[0]))


def _canon_key(f: Formula):
    return (formula_size(f), print_formula(f))


def _mask(rel: frozenset, size: int) -> int:
    from defeq.kernel import tuple_index
    out = 0
    for t in rel:
        out |= 1 << tuple_index(t, size)
    return out


def _rel_from_mask(mask: int, size: int, arity: int) -> frozenset:
    from defeq.kernel import _tuples
    return frozenset(t for i, t in enumerate(_tuples(size, arity)) if mask >> i & 1)


@dataclass
class SearchOutcome:
    certificate: MergeCertificate | None
    exhausted: bool
    combinations: int = 0
    reason: str = ""
    incompatibility: IncompatibilityReport | None = None


def search_merge_report(t1: Theory, t2: Theory, depth: int, k: int | None = None,
                        max_meanings: int = 20000, max_combinations: int = 200000) -> SearchOutcome:
    """Look for definition sets with bodies of depth at most ``depth`` that
    merge ``t1`` and ``t2`` at bound ``k``.

    Candidate bodies are enumerated bottom-up, one representative per
    meaning on the bounded model class of the base theory.  Definition sets
    for ``t2``'s missing symbols are tried in lexicographic order of
    candidate index; for each, the bijection it induces between the model
    classes fixes the relations the reverse definitions must produce, and
    those are looked up directly.
    """
    k = default_bound() if k is None else k
    s1, s2 = t1.signature, t2.signature
    inc = incompatibility_witness(t1, t2, k)
    if inc.not_mergeable:
        return SearchOutcome(None, True, 0, "theories are incompatible", inc)
    M1 = models_of(t1, k).models
    M2 = models_of(t2, k).models
    sizes1 = sorted(m.size for m in M1)
    if sizes1 != sorted(m.size for m in M2):
        return SearchOutcome(None, True, 0, "model counts per size differ", inc)
    miss12 = list(s2 - s1)
    miss21 = list(s1 - s2)
    shared = s1 & s2
    sig2 = list(s2)
    space1 = CandidateSpace(s1, M1, max_meanings)
    space2 = CandidateSpace(s2, M2, max_meanings)
    cands12 = [space1.candidates(q.arity, depth) for q in miss12]
    key2 = {(n.size, tuple(_mask(n.interp[s], n.size) for s in sig2)): j for j, n in enumerate(M2)}
    shared_masks = [{s: _mask(m.interp[s], m.size) for s in shared} for m in M1]
    lookups = []
    for p in miss21:
        table: dict = {}
        for f, mean in space2.candidates(p.arity, depth):
            table.setdefault(mean, f)
        lookups.append(table)
    tried = 0
    for combo in itertools.product(*cands12):
        tried += 1
        if tried > max_combinations:
            return SearchOutcome(None, False, tried - 1, "combination budget exhausted", inc)
        qmask = {q: {i: mean[i] for i in range(len(M1))} for q, (_, mean) in zip(miss12, combo)}
        image = []
        ok = True
        for i, m in enumerate(M1):
            key = (m.size, tuple(shared_masks[i][s] if s in shared else qmask[s][i] for s in sig2))
            j = key2.get(key)
            if j is None:
                ok = False
                break
            image.append(j)
        if not ok or len(set(image)) != len(image):
            continue
        inverse = {j: i for i, j in enumerate(image)}
        defs21 = []
        for p, table in zip(miss21, lookups):
            target = tuple(_mask(M1[inverse[j]].interp[p], M2[j].size) for j in range(len(M2)))
            body = table.get(target)
            if body is None:
                ok = False
                break
            defs21.append(define(p, body))
        if not ok:
            continue
        d12 = DefinitionSet(s1, [define(q, f) for q, (f, _) in zip(miss12, combo)])
        d21 = DefinitionSet(s2, defs21)
        cert = verify_merge(t1, t2, d12, d21, k)
        if cert.verified:
            return SearchOutcome(cert, True, tried, "found", inc)
    truncated = space1.truncated or space2.truncated
    return SearchOutcome(None, not truncated, tried,
                         "candidate space truncated" if truncated else "no merger within depth", inc)


def search_merge(t1: Theory, t2: Theory, depth: int, k: int | None = None, **budget) -> MergeCertificate | None:
    """First verified merger found by ``search_merge_report``, or None."""
    return search_merge_report(t1, t2, depth, k, **budget).certificate


# Composition of mergers with pairwise disjoint signatures.

def unfold(f: Formula, delta: DefinitionSet) -> Formula:
    """Replace every symbol defined in ``delta`` by its definition."""
    return replace_predicates(f, delta.images())


def compose_disjoint_mergers(c12: MergeCertificate, c23: MergeCertificate,
                             k: int | None = None) -> MergeCertificate:
    """From mergers T1~T2 and T2~T3 over pairwise disjoint signatures, build
    and re-verify a merger T1~T3.

    The definitions of T3's symbols over T2 are re-based onto T1 by
    unfolding T2's symbols through T1's definitions of them; symmetrically
    for T1's symbols over T3.
    """
    k = c12.bound if k is None else k
    t1, t2, t3 = c12.left, c12.right, c23.right
    if c23.left != t2:
        raise DefinitionError("the mergers do not share their middle theory")
    s1, s2, s3 = t1.signature, t2.signature, t3.signature
    if not (s1.isdisjoint(s2) and s2.isdisjoint(s3) and s1.isdisjoint(s3)):
        raise DefinitionError("composition needs pairwise disjoint signatures")
    if not (c12.verified and c23.verified):
        raise DefinitionError("both mergers must be verified")
    d13 = DefinitionSet(s1, [ExplicitDefinition(d.defined, d.params, unfold(d.body, c12.delta_lr))
                             for d in c23.delta_lr])
    d31 = DefinitionSet(s3, [ExplicitDefinition(d.defined, d.params, unfold(d.body, c23.delta_rl))
                             for d in c12.delta_rl])
    return verify_merge(t1, t3, d13, d31, k)


# Definitional-equivalence chains.

@dataclass(frozen=True)
class ChainStep:
    """``=>``: the next theory extends the previous one by ``delta``;
    ``<=``: the previous theory extends the next one by ``delta``."""

    direction: str
    delta: DefinitionSet

    def __post_init__(self):
        if self.direction not in ("=>", "<="):
            raise DefinitionError(f"bad step direction {self.direction!r}")

    def flipped(self) -> "ChainStep":
        return ChainStep("<=" if self.direction == "=>" else "=>", self.delta)


@dataclass(frozen=True)
class DefEqCertificate:
    theories: tuple[Theory, ...]
    steps: tuple[ChainStep, ...]
    bound: int

    def __post_init__(self):
        object.__setattr__(self, "theories", tuple(self.theories))
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def start(self) -> Theory:
        return self.theories[0]

    @property
    def end(self) -> Theory:
        return self.theories[-1]

    def reversed(self) -> "DefEqCertificate":
        return DefEqCertificate(self.theories[::-1], tuple(s.flipped() for s in reversed(self.steps)),
                                self.bound)

    def concat(self, other: "DefEqCertificate") -> "DefEqCertificate":
        if self.end != other.start:
            raise DefinitionError("chains do not share an endpoint")
        return DefEqCertificate(self.theories + other.theories[1:], self.steps + other.steps,
                                min(self.bound, other.bound))

    def mergers(self, verified: bool = True) -> list[MergeCertificate]:
        """Each step read as a merger of adjacent theories (one side's
        definitions empty).  Steps are assumed checked."""
        out = []
        for a, b, st in zip(self.theories, self.theories[1:], self.steps):
            if st.direction == "=>":
                out.append(MergeCertificate(a, b, st.delta, DefinitionSet.empty(b.signature),
                                            self.bound, verified))
            else:
                out.append(MergeCertificate(a, b, DefinitionSet.empty(a.signature), st.delta,
                                            self.bound, verified))
        return out


def single_theory_chain(t: Theory, k: int | None = None) -> DefEqCertificate:
    return DefEqCertificate((t,), (), default_bound() if k is None else k)


def chain_from_mergers(mergers: Sequence[MergeCertificate]) -> DefEqCertificate:
    if not mergers:
        raise DefinitionError("need at least one merger")
    chain = mergers[0].as_chain()
    for c in mergers[1:]:
        chain = chain.concat(c.as_chain())
    return chain


@dataclass(frozen=True)
class ChainVerdict:
    ok: bool
    start: Theory
    end: Theory
    bound: int
    failing_index: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def verify_defeq_chain(c: DefEqCertificate, k: int | None = None) -> ChainVerdict:
    """Check every step of ``c`` as a definitional extension at the bound."""
    k = c.bound if k is None else k
    if not c.theories:
        raise DefinitionError("empty chain")
    if len(c.steps) != len(c.theories) - 1:
        raise DefinitionError(
            f"malformed chain: {len(c.theories)} theories but {len(c.steps)} steps")
    for i, (a, b, st) in enumerate(zip(c.theories, c.theories[1:], c.steps)):
        lower, upper = (a, b) if st.direction == "=>" else (b, a)
        problem = verify_extension_step(lower, upper, st.delta, k)
        if problem is not None:
            return ChainVerdict(False, c.start, c.end, k, i, problem)
    return ChainVerdict(True, c.start, c.end, k)
