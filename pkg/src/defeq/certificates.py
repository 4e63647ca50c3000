"""Text and JSON forms of definition sets and certificates.

Certificates are plain JSON objects ``{kind, theories, deltas, bound,
verified, witness?}``.  Theories are embedded in the theory file format,
definitions as their defining sentences, models in the model text format.
``verify_certificate`` rebuilds the objects and checks the claim again from
scratch.
"""

from __future__ import annotations

import json
from typing import Any

from defeq.definability import (
    ChainStep, DefEqCertificate, DefinitionError, DefinitionSet, ExplicitDefinition,
    MergeCertificate, verify_defeq_chain, verify_merge,
)
from defeq.modelrel import check_model_intertrans, check_model_merge
from defeq.parser import ParseError, parse_formula, parse_theory, print_theory
from defeq.renaming import Renaming, RenamingError, apply_renaming, renaming_to_merger
from defeq.semantics import parse_model, print_model
from defeq.syntax import RelationSymbol, Signature, Theory, WellFormednessError
from defeq.translation import (
    Translation, TranslationError, check_intertranslatable, parse_translation,
)


class CertificateError(ValueError):
    pass


# Definition files:
#   deltas NAME
#   rel q 1
#   def A x0 . q(x0) <-> p(x0)

def parse_deltas(text: str, base: Signature) -> DefinitionSet:
    new: list[RelationSymbol] = []
    sentences: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "deltas":
            continue
        if head == "rel":
            parts = rest.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError(f"line {lineno}: expected 'rel NAME ARITY'")
            new.append(RelationSymbol(parts[0], int(parts[1])))
        elif head == "def":
            sentences.append((lineno, rest))
        else:
            raise ParseError(f"line {lineno}: unknown directive {head!r}")
    try:
        sig = base | Signature(new)
    except WellFormednessError as e:
        raise ParseError(str(e)) from None
    defs = []
    for lineno, src in sentences:
        try:
            defs.append(ExplicitDefinition.from_sentence(parse_formula(src, sig)))
        except (ParseError, DefinitionError) as e:
            raise ParseError(f"line {lineno}: {e}") from None
    return DefinitionSet(base, defs)


def print_deltas(delta: DefinitionSet, name: str = "D") -> str:
    lines = [f"deltas {name}"]
    lines += [f"rel {s.name} {s.arity}" for s in delta.defined_signature]
    lines += [f"def {d}" for d in delta]
    return "\n".join(lines) + "\n"


def _deltas_json(delta: DefinitionSet) -> list[str]:
    return [str(d) for d in delta]


def _deltas_from(sentences: list[str], base: Signature, full: Signature) -> DefinitionSet:
    return DefinitionSet(base, [ExplicitDefinition.from_sentence(parse_formula(s, full))
                                for s in sentences])


def _theory(text: str) -> Theory:
    return parse_theory(text)


def merger_json(c: MergeCertificate) -> dict[str, Any]:
    out: dict[str, Any] = {
        "kind": "merger",
        "theories": [print_theory(c.left), print_theory(c.right)],
        "deltas": [_deltas_json(c.delta_lr), _deltas_json(c.delta_rl)],
        "bound": c.bound,
        "verified": c.verified,
    }
    if c.witness is not None:
        out["witness"] = {"side": c.witness_side, "model": print_model(c.witness)}
    return out


def merger_from_json(obj: dict) -> MergeCertificate:
    left, right = map(_theory, obj["theories"])
    full = left.signature | right.signature
    d_lr = _deltas_from(obj["deltas"][0], left.signature, full)
    d_rl = _deltas_from(obj["deltas"][1], right.signature, full)
    return MergeCertificate(left, right, d_lr, d_rl, obj["bound"], bool(obj["verified"]))


def chain_json(c: DefEqCertificate, verified: bool, failing_index: int | None = None) -> dict[str, Any]:
    out: dict[str, Any] = {
        "kind": "defeq-chain",
        "theories": [print_theory(t) for t in c.theories],
        "steps": [s.direction for s in c.steps],
        "deltas": [_deltas_json(s.delta) for s in c.steps],
        "bound": c.bound,
        "verified": verified,
    }
    if failing_index is not None:
        out["failing_index"] = failing_index
    return out


def chain_from_json(obj: dict) -> DefEqCertificate:
    theories = [_theory(t) for t in obj["theories"]]
    steps = []
    for i, (direction, sentences) in enumerate(zip(obj["steps"], obj["deltas"])):
        a, b = theories[i], theories[i + 1]
        lower = a if direction == "=>" else b
        steps.append(ChainStep(direction, _deltas_from(sentences, lower.signature,
                                                       a.signature | b.signature)))
    return DefEqCertificate(tuple(theories), tuple(steps), obj["bound"])


def normal_form_json(two_step) -> dict[str, Any]:
    first, second = two_step.first, two_step.second
    return {
        "kind": "defeq-normal-form",
        "theories": [print_theory(first.left), print_theory(first.right), print_theory(second.right)],
        "mergers": [merger_json(first), merger_json(second)],
        "renaming": two_step.renaming.lines(),
        "bound": first.bound,
        "verified": first.verified and second.verified,
    }


def intertranslation_json(tr12: Translation, tr21: Translation, check) -> dict[str, Any]:
    out: dict[str, Any] = {
        "kind": "intertranslation",
        "theories": [print_theory(tr12.source), print_theory(tr12.target)],
        "translations": [tr12.lines(), tr21.lines()],
        "bound": check.bound,
        "verified": check.ok,
    }
    if not check.ok:
        out["witness"] = {"reason": check.reason,
                          "model": print_model(check.model) if check.model is not None else None}
    return out


def _translations_from(obj: dict) -> tuple[Translation, Translation]:
    t1, t2 = map(_theory, obj["theories"])
    return (parse_translation("\n".join(obj["translations"][0]), t1, t2),
            parse_translation("\n".join(obj["translations"][1]), t2, t1))


def model_merge_json(t1: Theory, t2: Theory, d12: DefinitionSet, d21: DefinitionSet, result) -> dict:
    return {
        "kind": "model-merge",
        "theories": [print_theory(t1), print_theory(t2)],
        "deltas": [_deltas_json(d12), _deltas_json(d21)],
        "bound": result.bound,
        "verified": bool(result),
        "witness": result.to_json(),
    }


def model_intertrans_json(tr12: Translation, tr21: Translation, result) -> dict:
    return {
        "kind": "model-intertranslation",
        "theories": [print_theory(tr12.source), print_theory(tr12.target)],
        "translations": [tr12.lines(), tr21.lines()],
        "bound": result.bound,
        "verified": bool(result),
        "witness": result.to_json(),
    }


def renaming_json(t: Theory, r: Renaming, c: MergeCertificate) -> dict:
    out = merger_json(c)
    out["kind"] = "renaming"
    out["renaming"] = r.lines()
    return out


def verify_certificate(obj: dict, k: int | None = None) -> tuple[bool, str]:
    """Re-check a certificate from scratch; returns (verdict, message).

    The bound recorded in the certificate is used unless ``k`` is given.
    """
    try:
        kind = obj["kind"]
        bound = obj["bound"] if k is None else k
        if kind == "merger":
            c = merger_from_json(obj)
            res = verify_merge(c.left, c.right, c.delta_lr, c.delta_rl, bound)
            return res.verified, _merge_message(res)
        if kind == "renaming":
            c = merger_from_json(obj)
            r = Renaming.from_lines(obj["renaming"], c.left.signature)
            if apply_renaming(c.left, r) != c.right:
                return False, "right-hand theory is not the renaming of the left-hand one"
            res = renaming_to_merger(c.left, r, bound)
            return res.verified, _merge_message(res)
        if kind == "defeq-chain":
            chain = chain_from_json(obj)
            v = verify_defeq_chain(chain, bound)
            if v.ok:
                return True, f"chain of {len(chain.theories)} theories verified at bound {bound}"
            return False, f"step {v.failing_index} fails: {v.reason}"
        if kind == "defeq-normal-form":
            first = merger_from_json(obj["mergers"][0])
            second = merger_from_json(obj["mergers"][1])
            theories = [_theory(t) for t in obj["theories"]]
            if [first.left, first.right, second.right] != theories or second.left != first.right:
                return False, "mergers do not connect the listed theories"
            r = Renaming.from_lines(obj["renaming"], theories[2].signature)
            if apply_renaming(theories[2], r) != theories[1]:
                return False, "middle theory is not the renaming of the last one"
            ok = True
            msgs = []
            for c in (first, second):
                res = verify_merge(c.left, c.right, c.delta_lr, c.delta_rl, bound)
                ok = ok and res.verified
                msgs.append(_merge_message(res))
            return ok, "; ".join(msgs)
        if kind == "intertranslation":
            tr12, tr21 = _translations_from(obj)
            res = check_intertranslatable(tr12, tr21, bound)
            return res.ok, res.reason or f"intertranslation verified at bound {bound}"
        if kind == "model-merge":
            c = merger_from_json({**obj, "verified": False})
            res = check_model_merge(c.left, c.right, c.delta_lr, c.delta_rl, bound)
            return bool(res), getattr(res, "reason", f"model merger verified at bound {bound}")
        if kind == "model-intertranslation":
            tr12, tr21 = _translations_from(obj)
            res = check_model_intertrans(tr12, tr21, bound)
            return bool(res), getattr(res, "reason", f"model intertranslation verified at bound {bound}")
    except (KeyError, IndexError, TypeError) as e:
        raise CertificateError(f"malformed certificate: {e}") from None
    except (ParseError, DefinitionError, RenamingError, TranslationError, WellFormednessError) as e:
        raise CertificateError(f"invalid certificate content: {e}") from None
    raise CertificateError(f"unknown certificate kind {kind!r}")


def _merge_message(c: MergeCertificate) -> str:
    if c.verified:
        return f"merger of {c.left.name} and {c.right.name} verified at bound {c.bound}"
    return (f"merger of {c.left.name} and {c.right.name} refuted at bound {c.bound}; "
            f"witness ({c.witness_side}):\n{print_model(c.witness)}")


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


def witness_model(obj: dict, sig: Signature):
    w = obj.get("witness")
    if not w or not w.get("model"):
        return None
    return parse_model(w["model"], sig)
