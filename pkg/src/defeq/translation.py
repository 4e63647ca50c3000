"""Translations between theories and the model maps they induce.

A translation sends each n-ary symbol of the source language to a formula
of the target language in the parameters x1..xn, and commutes with
equality, the connectives and the quantifier.  It acts on models in the
opposite direction: a target-language model is turned into a source-language
model by reading each source symbol off its image formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from defeq.definability import DefinitionSet, ExplicitDefinition, MergeCertificate, verify_merge
from defeq.parser import print_formula
from defeq.semantics import FiniteModel, countermodel, default_bound, defined_relation
from defeq.syntax import (
    Formula, Iff, Pred, RelationSymbol, Theory, Var, WellFormednessError, check_well_formed,
    forall_all, free_variables, replace_predicates, substitute, symbols_of,
)


class TranslationError(ValueError):
    pass


def parameters(arity: int) -> tuple[Var, ...]:
    """Designated image parameters x1..xn."""
    return tuple(Var(i) for i in range(1, arity + 1))


class Translation:
    """Symbol-wise map from ``source``'s language into ``target``'s."""

    __slots__ = ("source", "target", "images")

    def __init__(self, source: Theory, target: Theory,
                 images: Mapping[RelationSymbol, Formula | tuple[Sequence[Var], Formula]]):
        norm: dict[RelationSymbol, tuple[tuple[Var, ...], Formula]] = {}
        for sym, img in images.items():
            if isinstance(img, Formula):
                params, body = parameters(sym.arity), img
            else:
                params, body = tuple(img[0]), img[1]
            if sym not in source.signature:
                raise TranslationError(f"{sym} is not in {source.name}'s signature")
            if len(params) != sym.arity or len(set(params)) != len(params):
                raise TranslationError(f"image of {sym} needs {sym.arity} distinct parameters")
            if not free_variables(body) <= set(params):
                raise TranslationError(f"image of {sym} has free variables outside its parameters")
            try:
                check_well_formed(body, target.signature)
            except WellFormednessError as e:
                raise TranslationError(f"image of {sym}: {e}") from None
            std = parameters(sym.arity)
            if params != std:
                body = substitute(body, dict(zip(params, std)))
            norm[sym] = (std, body)
        missing = [s for s in source.signature if s not in norm]
        if missing:
            raise TranslationError(f"no image for {', '.join(map(str, missing))}")
        self.source = source
        self.target = target
        self.images = dict(sorted(norm.items()))

    def __eq__(self, other):
        if not isinstance(other, Translation):
            return NotImplemented
        return (self.source, self.target, self.images) == (other.source, other.target, other.images)

    def __hash__(self):
        return hash((self.source, self.target, tuple(self.images.items())))

    def __repr__(self):
        body = ", ".join(f"{s.name} => {print_formula(b)}" for s, (_, b) in self.images.items())
        return f"Translation({self.source.name} -> {self.target.name}: {body})"

    def image(self, sym: RelationSymbol | str) -> Formula:
        if isinstance(sym, str):
            sym = self.source.signature[sym]
        return self.images[sym][1]

    def __call__(self, f: Formula) -> Formula:
        return apply_translation(self, f)

    def lines(self) -> list[str]:
        return [f"translate {s.name}/{s.arity} => {print_formula(b)}"
                for s, (_, b) in self.images.items()]


def apply_translation(tr: Translation, f: Formula) -> Formula:
    """Replace predicates by their instantiated images; everything else is
    kept as is (bound variables renamed only to avoid capture)."""
    unknown = [s for s in symbols_of(f) if s not in tr.images]
    if unknown:
        raise TranslationError(f"no image for {', '.join(sorted(map(str, unknown)))}")
    return replace_predicates(f, tr.images)


@dataclass(frozen=True)
class TranslationCheck:
    ok: bool
    bound: int
    axiom: Formula | None = None
    model: FiniteModel | None = field(default=None, compare=False)
    reason: str = ""

    def __bool__(self):
        return self.ok


def check_translation(tr: Translation, k: int | None = None) -> TranslationCheck:
    """Every source axiom's image holds in every bounded target model."""
    k = default_bound() if k is None else k
    for ax in tr.source.axioms:
        m = countermodel(tr.target, apply_translation(tr, ax), k)
        if m is not None:
            return TranslationCheck(False, k, ax, m,
                                    f"{tr.target.name} does not entail the image of {print_formula(ax)}")
    return TranslationCheck(True, k)


def model_map(tr: Translation, m: FiniteModel) -> FiniteModel:
    """The source-language model read off a target-language model."""
    interp = {s: defined_relation(m, body, params) for s, (params, body) in tr.images.items()}
    return FiniteModel(m.size, interp, tr.source.signature)


def compose_translations(first: Translation, second: Translation) -> Translation:
    """``first`` then ``second``: source of ``first`` into target of ``second``."""
    if first.target != second.source:
        raise TranslationError("translations do not compose: middle theories differ")
    return Translation(first.source, second.target,
                       {s: (params, apply_translation(second, body))
                        for s, (params, body) in first.images.items()})


def round_trip_sentence(sym: RelationSymbol, there: Translation, back: Translation) -> Formula:
    """``A x1..A xn . p(x1..xn) <-> back(there(p(x1..xn)))``."""
    xs = parameters(sym.arity)
    atom = Pred(sym, xs)
    return forall_all(xs, Iff(atom, apply_translation(back, apply_translation(there, atom))))


def check_intertranslatable(tr12: Translation, tr21: Translation, k: int | None = None) -> TranslationCheck:
    """Both translations check, and the atomic round trips are entailed on
    each side.  Translations commute with every connective, so the atomic
    case carries over to all formulas."""
    k = default_bound() if k is None else k
    if tr12.source != tr21.target or tr12.target != tr21.source:
        raise TranslationError("translations do not connect the same pair of theories")
    for tr in (tr12, tr21):
        res = check_translation(tr, k)
        if not res:
            return res
    for theory, there, back in ((tr12.source, tr12, tr21), (tr21.source, tr21, tr12)):
        for sym in theory.signature:
            f = round_trip_sentence(sym, there, back)
            m = countermodel(theory, f, k)
            if m is not None:
                return TranslationCheck(False, k, f, m,
                                        f"round trip of {sym.name} fails in {theory.name}")
    return TranslationCheck(True, k)


def merger_to_translations(c: MergeCertificate) -> tuple[Translation, Translation]:
    """Each symbol goes to its definition from the opposite side's
    definition set; shared symbols go to themselves."""
    if not c.verified:
        raise TranslationError("merger is not verified")

    def one(src: Theory, dst: Theory, delta: DefinitionSet) -> Translation:
        images = {}
        for s in src.signature:
            if s in dst.signature:
                images[s] = Pred(s, parameters(s.arity))
            else:
                d = delta[s]
                images[s] = (d.params, d.body)
        return Translation(src, dst, images)

    return one(c.left, c.right, c.delta_rl), one(c.right, c.left, c.delta_lr)


def translations_to_merger(tr12: Translation, tr21: Translation, k: int | None = None) -> MergeCertificate:
    """Definitions read off the translations, for disjoint signatures only."""
    t1, t2 = tr12.source, tr12.target
    if tr21.source != t2 or tr21.target != t1:
        raise TranslationError("translations do not connect the same pair of theories")
    if not t1.signature.isdisjoint(t2.signature):
        raise TranslationError("translations give a merger only for disjoint signatures")
    d12 = DefinitionSet(t1.signature, [ExplicitDefinition(q, *tr21.images[q]) for q in t2.signature])
    d21 = DefinitionSet(t2.signature, [ExplicitDefinition(p, *tr12.images[p]) for p in t1.signature])
    return verify_merge(t1, t2, d12, d21, k)


def defeq_to_intertranslation(two_step, k: int | None = None) -> tuple[Translation, Translation]:
    """Translations for the end theories of a two-merger normal form.

    Both mergers have disjoint signatures, so each becomes a translation
    pair; composing through the renamed middle theory gives the pair for the
    original theories.  Raises ``TranslationError`` if the composite fails
    the bounded check.
    """
    first, second = two_step.first, two_step.second
    k = first.bound if k is None else k
    a12, a21 = merger_to_translations(first)
    b12, b21 = merger_to_translations(second)
    tr12 = compose_translations(a12, b12)
    tr21 = compose_translations(b21, a21)
    res = check_intertranslatable(tr12, tr21, k)
    if not res:
        raise TranslationError(f"composite translations fail at bound {k}: {res.reason}; "
                               f"model {res.model!r}")
    return tr12, tr21


def parse_translation(text: str, source: Theory, target: Theory) -> Translation:
    """Lines ``translate p/1 => FORMULA``; parameters are x1..xn."""
    from defeq.parser import ParseError, parse_formula
    images = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition("=>")
        parts = head.split()
        if not sep or len(parts) != 2 or parts[0] != "translate" or "/" not in parts[1]:
            raise TranslationError(f"line {lineno}: expected 'translate NAME/ARITY => FORMULA'")
        name, _, ar = parts[1].partition("/")
        sym = source.signature.get(name)
        if sym is None or str(sym.arity) != ar:
            raise TranslationError(f"line {lineno}: {parts[1]} is not in {source.name}'s signature")
        try:
            body = parse_formula(rest.strip(), target.signature)
        except ParseError as e:
            raise TranslationError(f"line {lineno}: {e}") from None
        images[sym] = (parameters(sym.arity), body)
    return Translation(source, target, images)
