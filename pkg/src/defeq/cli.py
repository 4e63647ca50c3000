"""Command-line front end.

Exit codes: 0 verified, 1 refuted at the bound, 2 inconclusive, 3 input
error.  ``--json`` switches reports to JSON; ``-o FILE`` also writes the
certificate to a file, which ``defeq verify FILE`` re-checks.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from defeq import certificates as certs
from defeq.certificates import CertificateError, parse_deltas
from defeq.definability import (
    DefinitionError, chain_from_mergers, compose_disjoint_mergers, search_merge_report,
    single_theory_chain, verify_merge,
)
from defeq.demo import run_demo
from defeq.modelrel import check_model_merge
from defeq.parser import ParseError, load_theory, print_formula, print_theory
from defeq.renaming import (
    RenamingError, apply_renaming, defeq_two_step, fresh_renaming, renaming_to_merger,
)
from defeq.semantics import (
    DEFAULT_BOUND, SemanticsError, default_bound, models_of, print_model,
)
from defeq.syntax import Signature, WellFormednessError
from defeq.translation import (
    TranslationError, check_intertranslatable, parse_translation,
)

VERIFIED, REFUTED, INCONCLUSIVE, INPUT_ERROR = 0, 1, 2, 3

_INPUT_ERRORS = (OSError, ParseError, DefinitionError, RenamingError, TranslationError,
                 WellFormednessError, SemanticsError, CertificateError, json.JSONDecodeError)


@dataclass
class RunConfig:
    bound: int
    seed: int
    json: bool
    output: str | None

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("the bound must be at least 1")


class _Out:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg

    def report(self, text: str, obj: dict | None = None) -> None:
        if self.cfg.json and obj is not None:
            print(certs.dumps(obj))
        else:
            print(text)
        if self.cfg.output and obj is not None:
            with open(self.cfg.output, "w", encoding="utf-8") as fh:
                fh.write(certs.dumps(obj) + "\n")


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _merge_text(c) -> str:
    head = "VERIFIED" if c.verified else f"REFUTED-AT-{c.bound}"
    lines = [f"{head}: merger of {c.left.name} and {c.right.name} at bound {c.bound}"]
    for d in c.delta_lr:
        lines.append(f"  {c.left.name} side: {d}")
    for d in c.delta_rl:
        lines.append(f"  {c.right.name} side: {d}")
    if c.witness is not None:
        owner = c.left.name if c.witness_side == "left" else c.right.name
        lines.append(f"witness, a model of the extension of {owner} only:")
        lines.append(print_model(c.witness))
    return "\n".join(lines)


def cmd_parse(args, cfg: RunConfig, out: _Out) -> int:
    theories = [load_theory(p) for p in args.files]
    text = "\n".join(print_theory(t) for t in theories)
    out.report(text.rstrip(), {"kind": "theories", "theories": [print_theory(t) for t in theories]})
    return VERIFIED


def cmd_models(args, cfg: RunConfig, out: _Out) -> int:
    t = load_theory(args.file)
    cls = models_of(t, cfg.bound)
    text = "\n\n".join(print_model(m) for m in cls.models)
    summary = f"# {len(cls)} model(s) of {t.name} with at most {cfg.bound} element(s)"
    out.report(f"{summary}\n{text}".rstrip(), cls.to_json())
    return VERIFIED


def _search(t1, t2, depth, cfg, out) -> int:
    res = search_merge_report(t1, t2, depth, cfg.bound)
    if res.certificate is not None:
        out.report(_merge_text(res.certificate), certs.merger_json(res.certificate))
        return VERIFIED
    inc = res.incompatibility
    obj = {"kind": "merge-search", "theories": [print_theory(t1), print_theory(t2)],
           "bound": cfg.bound, "depth": depth, "verified": False, "found": False,
           "exhausted": res.exhausted, "reason": res.reason,
           "incompatibility": inc.verdict if inc else None}
    if inc is not None and inc.not_mergeable:
        text = [f"{inc.verdict}: {t1.name} and {t2.name} each have a model with at most "
                f"{cfg.bound} elements, their union has none"]
        for m in (inc.left_model, inc.right_model):
            text.append(print_model(m))
        out.report("\n".join(text), obj)
        return REFUTED
    out.report(f"INCONCLUSIVE: no merger with definitions of depth <= {depth} at bound "
               f"{cfg.bound} ({res.reason})", obj)
    return INCONCLUSIVE


def cmd_check_merge(args, cfg: RunConfig, out: _Out) -> int:
    t1, t2 = load_theory(args.left), load_theory(args.right)
    if args.deltas:
        d12 = parse_deltas(_read(args.deltas[0]), t1.signature)
        d21 = parse_deltas(_read(args.deltas[1]), t2.signature)
        c = verify_merge(t1, t2, d12, d21, cfg.bound)
        out.report(_merge_text(c), certs.merger_json(c))
        return VERIFIED if c.verified else REFUTED
    return _search(t1, t2, args.depth, cfg, out)


def cmd_search_merge(args, cfg: RunConfig, out: _Out) -> int:
    t1, t2 = load_theory(args.left), load_theory(args.right)
    return _search(t1, t2, args.depth, cfg, out)


def cmd_check_defeq(args, cfg: RunConfig, out: _Out) -> int:
    t1, t2 = load_theory(args.left), load_theory(args.right)
    if t1 == t2:
        chain = single_theory_chain(t1, cfg.bound)
    elif args.via:
        path = [t1] + [load_theory(p) for p in args.via] + [t2]
        mergers = []
        for a, b in zip(path, path[1:]):
            res = search_merge_report(a, b, args.depth if args.depth is not None else 2, cfg.bound)
            if res.certificate is None:
                out.report(f"INCONCLUSIVE: no merger found between {a.name} and {b.name}",
                           {"kind": "defeq-search", "verified": False, "failed_pair": [a.name, b.name],
                            "bound": cfg.bound})
                return INCONCLUSIVE
            mergers.append(res.certificate)
        chain = chain_from_mergers(mergers)
    elif args.depth is not None:
        r = fresh_renaming(t2.signature, t1.signature)
        t2r = apply_renaming(t2, r)
        res = search_merge_report(t1, t2r, args.depth, cfg.bound)
        if res.certificate is None:
            out.report(f"INCONCLUSIVE: no merger of {t1.name} with a renamed {t2.name} "
                       f"to depth {args.depth}", {"kind": "defeq-search", "verified": False,
                                                 "bound": cfg.bound})
            return INCONCLUSIVE
        chain = chain_from_mergers([res.certificate, renaming_to_merger(t2, r, cfg.bound).swapped()])
    else:
        out.report("INCONCLUSIVE: give intermediate theories with --via or a search depth with --depth",
                   {"kind": "defeq-search", "verified": False, "bound": cfg.bound})
        return INCONCLUSIVE
    nf = defeq_two_step(t1, t2, chain, cfg.bound)
    ok = nf.first.verified and nf.second.verified
    lines = [f"{'VERIFIED' if ok else 'REFUTED-AT-' + str(cfg.bound)}: {t1.name} and {t2.name} "
             f"are definitionally equivalent at bound {cfg.bound}",
             "renaming: " + ", ".join(nf.renaming.lines()),
             _merge_text(nf.first), _merge_text(nf.second)]
    out.report("\n".join(lines), certs.normal_form_json(nf))
    return VERIFIED if ok else REFUTED


def cmd_check_intertrans(args, cfg: RunConfig, out: _Out) -> int:
    t1, t2 = load_theory(args.left), load_theory(args.right)
    tr12 = parse_translation(_read(args.tr12), t1, t2)
    tr21 = parse_translation(_read(args.tr21), t2, t1)
    res = check_intertranslatable(tr12, tr21, cfg.bound)
    if res.ok:
        text = f"VERIFIED: {t1.name} and {t2.name} are intertranslatable at bound {cfg.bound}"
    else:
        text = f"REFUTED-AT-{cfg.bound}: {res.reason}"
        if res.axiom is not None:
            text += f"\nfailing sentence: {print_formula(res.axiom)}"
        if res.model is not None:
            text += "\n" + print_model(res.model)
    out.report(text, certs.intertranslation_json(tr12, tr21, res))
    return VERIFIED if res.ok else REFUTED


def cmd_check_model_merge(args, cfg: RunConfig, out: _Out) -> int:
    t1, t2 = load_theory(args.left), load_theory(args.right)
    d12 = parse_deltas(_read(args.deltas[0]), t1.signature)
    d21 = parse_deltas(_read(args.deltas[1]), t2.signature)
    res = check_model_merge(t1, t2, d12, d21, cfg.bound)
    if res:
        lines = [f"VERIFIED: beta is a bijection of the bounded model classes (bound {cfg.bound})"]
        for m, n in res.forward:
            lines.append(print_model(m) + "\n  |->\n" + print_model(n))
        text = "\n".join(lines)
    else:
        text = f"REFUTED-AT-{cfg.bound}: {res.reason}"
        if res.model is not None:
            text += "\n" + print_model(res.model)
    out.report(text, certs.model_merge_json(t1, t2, d12, d21, res))
    return VERIFIED if res else REFUTED


def cmd_rename(args, cfg: RunConfig, out: _Out) -> int:
    t = load_theory(args.file)
    avoid = Signature()
    for p in args.avoid or ():
        avoid = avoid | load_theory(p).signature
    r = fresh_renaming(t.signature, avoid)
    t2 = apply_renaming(t, r)
    c = renaming_to_merger(t, r, cfg.bound)
    text = "\n".join(r.lines()) + "\n\n" + print_theory(t2).rstrip()
    out.report(text, certs.renaming_json(t, r, c))
    return VERIFIED if c.verified else REFUTED


def cmd_compose(args, cfg: RunConfig, out: _Out) -> int:
    c12 = certs.merger_from_json(json.loads(_read(args.first)))
    c23 = certs.merger_from_json(json.loads(_read(args.second)))
    c = compose_disjoint_mergers(c12, c23, cfg.bound)
    out.report(_merge_text(c), certs.merger_json(c))
    return VERIFIED if c.verified else REFUTED


def cmd_demo(args, cfg: RunConfig, out: _Out) -> int:
    report = run_demo(cfg.bound, args.depth)
    out.report(report.text(), report.bundle())
    return VERIFIED if report.ok else REFUTED


def cmd_verify(args, cfg: RunConfig, out: _Out) -> int:
    obj = json.loads(_read(args.file))
    objs = obj["certificates"] if "certificates" in obj else [obj]
    k = cfg.bound if args.bound_override else None
    results = []
    for o in objs:
        ok, msg = certs.verify_certificate(o, k)
        claimed = bool(o.get("verified"))
        results.append((o.get("kind"), ok, claimed, msg))
    lines = [f"{'VERIFIED' if ok else 'REFUTED'} {kind}: {msg}"
             + ("" if ok == claimed else " (differs from the recorded verdict)")
             for kind, ok, claimed, msg in results]
    agree = all(ok == claimed for _, ok, claimed, _ in results)
    out.report("\n".join(lines), {"kind": "verification", "agree": agree,
                                  "results": [{"kind": kd, "verified": ok, "recorded": cl, "message": m}
                                              for kd, ok, cl, m in results]})
    if not agree:
        return REFUTED
    return VERIFIED if all(ok for _, ok, _, _ in results) else REFUTED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-k", "--bound", type=int, default=None,
                        help=f"largest universe size checked (default: $DEFEQ_BOUND or {DEFAULT_BOUND})")
    common.add_argument("--seed", type=int, default=0, help="seed recorded with the run")
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    common.add_argument("-o", "--output", help="also write the certificate to this file")

    ap = argparse.ArgumentParser(prog="defeq", parents=[common],
                                 description="Definitional extensions, mergers and translations "
                                             "checked on all finite models up to a bound.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    p = add("parse", cmd_parse, "parse theory files and print them normalized")
    p.add_argument("files", nargs="+")
    p = add("models", cmd_models, "list the models of a theory up to the bound")
    p.add_argument("file")
    p = add("check-merge", cmd_check_merge, "check a merger given by two definition files, "
                                            "or search for one")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--deltas", nargs=2, metavar=("D12", "D21"))
    p.add_argument("--depth", type=int, default=2)
    p = add("search-merge", cmd_search_merge, "search for a merger up to a formula depth")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--depth", type=int, default=2)
    p = add("check-defeq", cmd_check_defeq, "certify definitional equivalence in two-merger form")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--via", nargs="+", metavar="THEORY", help="intermediate theories of a chain")
    p.add_argument("--depth", type=int, default=None, help="search depth for mergers")
    p = add("check-intertrans", cmd_check_intertrans, "check a pair of translations")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--tr12", required=True)
    p.add_argument("--tr21", required=True)
    p = add("check-model-merge", cmd_check_model_merge, "check the model-level bijection of a merger")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--deltas", nargs=2, metavar=("D12", "D21"), required=True)
    p = add("rename", cmd_rename, "rename a theory to fresh symbols")
    p.add_argument("file")
    p.add_argument("--avoid", nargs="+", metavar="THEORY")
    p = add("compose", cmd_compose, "compose two merger certificates over disjoint signatures")
    p.add_argument("first")
    p.add_argument("second")
    p = add("demo-counterexample", cmd_demo, "run the bundled three-theory example")
    p.add_argument("--depth", type=int, default=3)
    p = add("verify", cmd_verify, "re-check a certificate file")
    p.add_argument("file")
    p.add_argument("--bound-override", action="store_true",
                   help="check at --bound instead of the recorded bound")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        bound = args.bound
        if bound is None:
            # the bundled example is fully decided at 2; elsewhere the usual default applies
            demo = args.command == "demo-counterexample" and "DEFEQ_BOUND" not in os.environ
            bound = 2 if demo else default_bound()
        cfg = RunConfig(bound, args.seed, args.json, args.output)
    except ValueError as e:
        print(f"defeq: {e}", file=sys.stderr)
        return INPUT_ERROR
    try:
        return args.fn(args, cfg, _Out(cfg))
    except _INPUT_ERRORS as e:
        print(f"defeq: {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
