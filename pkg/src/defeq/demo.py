"""The bundled three-theory example.

T1 says there is exactly one element and p holds of it, T2 that there is
exactly one element and p fails of it, T3 is T1 with p renamed to q.  T1 and
T3 merge (q copies p), T2 and T3 merge (q is the complement of p), but T1
and T2 cannot merge because together they are inconsistent.  Still T1 and
T2 are definitionally equivalent (through T3) and intertranslatable (p goes
to its complement).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from defeq.certificates import (
    chain_json, intertranslation_json, merger_json, normal_form_json, parse_deltas,
)
from defeq.definability import (
    IncompatibilityReport, MergeCertificate, SearchOutcome, chain_from_mergers,
    incompatibility_witness, search_merge_report, verify_defeq_chain, verify_merge,
)
from defeq.parser import parse_theory
from defeq.renaming import defeq_two_step
from defeq.semantics import print_model
from defeq.syntax import Theory
from defeq.translation import Translation, check_intertranslatable, parse_translation


def corpus_text(name: str) -> str:
    return resources.files("defeq").joinpath("corpus", name).read_text(encoding="utf-8")


@dataclass(frozen=True)
class Corpus:
    t1: Theory
    t2: Theory
    t3: Theory

    @property
    def d13(self):
        return parse_deltas(corpus_text("d13.defs"), self.t1.signature)

    @property
    def d31(self):
        return parse_deltas(corpus_text("d31.defs"), self.t3.signature)

    @property
    def d23(self):
        return parse_deltas(corpus_text("d23.defs"), self.t2.signature)

    @property
    def d32(self):
        return parse_deltas(corpus_text("d32.defs"), self.t3.signature)

    def negation(self, source: Theory, target: Theory) -> Translation:
        return parse_translation(corpus_text("negate.tr"), source, target)


def load_corpus() -> Corpus:
    return Corpus(*(parse_theory(corpus_text(f"t{i}.theory")) for i in (1, 2, 3)))


@dataclass
class DemoReport:
    bound: int
    merge_13: MergeCertificate
    merge_32: MergeCertificate
    incompatibility: IncompatibilityReport
    search_12: SearchOutcome
    chain_ok: bool
    normal_form: object
    chain: object
    tr12: Translation
    tr21: Translation
    intertranslation: object
    claims: list[tuple[str, bool]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.claims)

    def text(self) -> str:
        lines = [f"bound k = {self.bound}"]
        for claim, ok in self.claims:
            lines.append(f"[{'ok' if ok else 'FAILED'}] {claim}")
        lines.append("")
        lines.append("T1/T2 union has no model up to the bound; their own first models:")
        for m in (self.incompatibility.left_model, self.incompatibility.right_model):
            if m is not None:
                lines.append(print_model(m))
        lines.append("")
        lines.append("normal form: " + ", ".join(self.normal_form.renaming.lines()))
        for d in self.normal_form.first.delta_lr:
            lines.append(f"  {d}")
        for d in self.normal_form.first.delta_rl:
            lines.append(f"  {d}")
        lines.append("translations: " + "; ".join(self.tr12.lines()))
        return "\n".join(lines)

    def bundle(self) -> dict:
        return {
            "bound": self.bound,
            "claims": [{"claim": c, "ok": ok} for c, ok in self.claims],
            "certificates": [
                merger_json(self.merge_13),
                merger_json(self.merge_32),
                chain_json(self.chain, self.chain_ok),
                normal_form_json(self.normal_form),
                intertranslation_json(self.tr12, self.tr21, self.intertranslation),
            ],
            "incompatibility": {
                "verdict": self.incompatibility.verdict,
                "union_models": self.incompatibility.union_models,
            },
        }


def run_demo(k: int = 2, depth: int = 3) -> DemoReport:
    c = load_corpus()
    m13 = verify_merge(c.t1, c.t3, c.d13, c.d31, k)
    m32 = verify_merge(c.t3, c.t2, c.d32, c.d23, k)
    inc = incompatibility_witness(c.t1, c.t2, k)
    search = search_merge_report(c.t1, c.t2, depth, k)
    chain = chain_from_mergers([m13, m32])
    verdict = verify_defeq_chain(chain, k)
    nf = defeq_two_step(c.t1, c.t2, chain, k)
    tr12, tr21 = c.negation(c.t1, c.t2), c.negation(c.t2, c.t1)
    it = check_intertranslatable(tr12, tr21, k)
    report = DemoReport(k, m13, m32, inc, search, verdict.ok, nf, chain, tr12, tr21, it)
    report.claims = [
        ("T1 and T3 merge (q := p, p := q)", m13.verified),
        ("T3 and T2 merge (p := ~q, q := ~p)", m32.verified),
        (f"T1 and T2 do not merge: {inc.verdict}, search to depth {depth} finds nothing",
         inc.not_mergeable and search.certificate is None),
        ("T1 and T2 are definitionally equivalent: chain through T3 and two-merger normal form",
         verdict.ok and nf.first.verified and nf.second.verified),
        ("T1 and T2 are intertranslatable with p => ~p both ways", it.ok),
    ]
    return report
