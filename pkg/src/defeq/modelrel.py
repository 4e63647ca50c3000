"""Model-level counterparts of mergers and intertranslations.

Both checks work on bounded model classes and return explicit association
lists, so a witness can be re-checked without enumerating anything.
"""

from __future__ import annotations

from dataclasses import dataclass

from defeq.definability import DefinitionSet, check_merge_typing
from defeq.semantics import (
    FiniteModel, default_bound, expand_by_definitions, models_of, print_model, reduct,
)
from defeq.syntax import Theory
from defeq.translation import Translation, TranslationError, model_map


@dataclass(frozen=True)
class Failure:
    """Why a bounded model-level check failed, with the model it failed on."""

    reason: str
    model: FiniteModel | None
    bound: int

    def __bool__(self):
        return False

    def to_json(self) -> dict:
        return {"ok": False, "bound": self.bound, "reason": self.reason,
                "model": print_model(self.model) if self.model is not None else None}


def _pairs_json(pairs):
    return [[print_model(a), print_model(b)] for a, b in pairs]


@dataclass(frozen=True)
class ModelMergeWitness:
    """beta and its inverse on the bounded classes, built from the definition
    sets by expanding and then forgetting the other side's symbols."""

    delta_12: DefinitionSet
    delta_21: DefinitionSet
    bound: int
    forward: tuple[tuple[FiniteModel, FiniteModel], ...]
    backward: tuple[tuple[FiniteModel, FiniteModel], ...]

    def __bool__(self):
        return True

    def to_json(self) -> dict:
        return {"ok": True, "bound": self.bound,
                "delta_12": [str(d) for d in self.delta_12],
                "delta_21": [str(d) for d in self.delta_21],
                "forward": _pairs_json(self.forward), "backward": _pairs_json(self.backward)}


@dataclass(frozen=True)
class ModelIntertransWitness:
    """The two model maps restricted to the bounded classes.  ``maps_12``
    lists ``(model of T2, its image in T1)``, ``maps_21`` the reverse."""

    tr12: Translation
    tr21: Translation
    bound: int
    maps_12: tuple[tuple[FiniteModel, FiniteModel], ...]
    maps_21: tuple[tuple[FiniteModel, FiniteModel], ...]

    def __bool__(self):
        return True

    def to_json(self) -> dict:
        return {"ok": True, "bound": self.bound, "translation_12": self.tr12.lines(),
                "translation_21": self.tr21.lines(),
                "maps_12": _pairs_json(self.maps_12), "maps_21": _pairs_json(self.maps_21)}


def _mutually_inverse(cls1, cls2, f, g, k, name_f, name_g):
    """Shared core: ``f`` maps cls1 into cls2, ``g`` back, round trips are
    identities.  Returns the two association lists or a Failure."""
    members1, members2 = set(cls1), set(cls2)
    fwd, bwd = [], []
    for m in cls1:
        n = f(m)
        if n not in members2:
            return Failure(f"{name_f} sends a model outside the other class", m, k)
        fwd.append((m, n))
    for n in cls2:
        m = g(n)
        if m not in members1:
            return Failure(f"{name_g} sends a model outside the other class", n, k)
        bwd.append((n, m))
    back = dict(bwd)
    for m, n in fwd:
        if back[n] != m:
            return Failure(f"{name_g} does not undo {name_f}", m, k)
    there = dict(fwd)
    for n, m in bwd:
        if there[m] != n:
            return Failure(f"{name_f} does not undo {name_g}", n, k)
    return tuple(fwd), tuple(bwd)


def check_model_merge(t1: Theory, t2: Theory, d12: DefinitionSet, d21: DefinitionSet,
                      k: int | None = None) -> ModelMergeWitness | Failure:
    """Check that beta (expand by ``d12``, forget to ``t2``'s signature) is a
    bijection of the bounded classes whose inverse is the same construction
    with ``d21``."""
    k = default_bound() if k is None else k
    check_merge_typing(t1, t2, d12, d21)
    s1, s2 = t1.signature, t2.signature

    def beta(m):
        return reduct(expand_by_definitions(m, d12), s2)

    def beta_inv(n):
        return reduct(expand_by_definitions(n, d21), s1)

    res = _mutually_inverse(models_of(t1, k).models, models_of(t2, k).models,
                            beta, beta_inv, k, "beta", "beta inverse")
    if isinstance(res, Failure):
        return res
    return ModelMergeWitness(d12, d21, k, *res)


def check_model_intertrans(tr12: Translation, tr21: Translation,
                           k: int | None = None) -> ModelIntertransWitness | Failure:
    """Check that the induced model maps are mutually inverse bijections of
    the bounded classes.  ``tr12`` acts from T2's models to T1's."""
    k = default_bound() if k is None else k
    if tr12.source != tr21.target or tr12.target != tr21.source:
        raise TranslationError("translations do not connect the same pair of theories")
    t1, t2 = tr12.source, tr12.target
    res = _mutually_inverse(models_of(t2, k).models, models_of(t1, k).models,
                            lambda n: model_map(tr12, n), lambda m: model_map(tr21, m), k,
                            "the model map of the first translation",
                            "the model map of the second translation")
    if isinstance(res, Failure):
        return res
    return ModelIntertransWitness(tr12, tr21, k, *res)


def recheck_model_merge(w: ModelMergeWitness, t1: Theory, t2: Theory) -> bool:
    """Re-verify a witness from its association lists alone: every pair is
    related by the definitions and the two lists are inverse to each other."""
    s1, s2 = t1.signature, t2.signature
    for m, n in w.forward:
        if reduct(expand_by_definitions(m, w.delta_12), s2) != n:
            return False
    for n, m in w.backward:
        if reduct(expand_by_definitions(n, w.delta_21), s1) != m:
            return False
    fwd, bwd = dict(w.forward), dict(w.backward)
    return len(fwd) == len(bwd) and all(bwd.get(n) == m for m, n in fwd.items())
