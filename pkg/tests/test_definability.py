import random

import pytest
from hypothesis import given, settings, strategies as st

from defeq.definability import (
    ChainStep, DefEqCertificate, DefinitionError, DefinitionSet, ExplicitDefinition,
    INCONCLUSIVE, apply_extension, chain_from_mergers, check_merge_typing,
    compose_disjoint_mergers, define, incompatibility_witness, reverify, search_merge,
    search_merge_report, single_theory_chain, unfold, verify_defeq_chain, verify_merge,
)
from defeq.generators import disjoint_names, perturb, random_chain, random_consistent_theory, random_merger, random_signature
from defeq.parser import parse_formula, parse_theory, print_formula
from defeq.syntax import Not, Pred, RelationSymbol, Signature, Var, formula_size, free_variables

from oracles import all_formulas, brute_equivalent

x0 = Var(0)


def test_definition_validation():
    p = RelationSymbol("p", 1)
    q = RelationSymbol("q", 1)
    with pytest.raises(DefinitionError):
        ExplicitDefinition(p, (x0, Var(1)), q(x0))
    with pytest.raises(DefinitionError):
        ExplicitDefinition(p, (x0,), q(Var(1)))
    with pytest.raises(DefinitionError):
        ExplicitDefinition(p, (x0,), Not(p(x0)))
    with pytest.raises(DefinitionError):
        ExplicitDefinition(RelationSymbol("r", 2), (x0, x0), q(x0))


def test_definition_sentence_round_trip():
    sig = Signature.of(p=1, q=1)
    f = parse_formula("A x0 . q(x0) <-> ~p(x0)", sig)
    d = ExplicitDefinition.from_sentence(f)
    assert d.sentence() == f
    with pytest.raises(DefinitionError):
        ExplicitDefinition.from_sentence(parse_formula("A x0 . q(x0) -> p(x0)", sig))


def test_definition_set_checks():
    base = Signature.of(p=1)
    q = RelationSymbol("q", 1)
    with pytest.raises(DefinitionError):
        DefinitionSet(base, [define(q, Pred(q, (x0,)))])
    with pytest.raises(DefinitionError):
        DefinitionSet(base, [define(q, Pred(base["p"], (x0,))), define(q, Pred(base["p"], (x0,)))])
    with pytest.raises(DefinitionError):
        DefinitionSet(base, [define(RelationSymbol("p", 1), Pred(base["p"], (x0,)))])
    ds = DefinitionSet(base, [define(q, Pred(base["p"], (x0,)))])
    assert ds["q"].defined == q
    assert ds.extended_signature.names() == ["p", "q"]


def test_paper_mergers(corpus):
    c = corpus
    assert verify_merge(c.t1, c.t3, c.d13, c.d31, 3).verified
    assert verify_merge(c.t2, c.t3, c.d23, c.d32, 3).verified
    # the 1-3 definitions do not work between 2 and 3
    bad = verify_merge(c.t2, c.t3, DefinitionSet(c.t2.signature, c.d13), c.d31, 3)
    assert not bad.verified and bad.witness is not None


def test_typing_errors(corpus):
    c = corpus
    with pytest.raises(DefinitionError):
        check_merge_typing(c.t1, c.t3, c.d31, c.d13)
    with pytest.raises(DefinitionError):
        check_merge_typing(c.t1, c.t3, DefinitionSet.empty(c.t1.signature), c.d31)


def test_incompatibility(corpus):
    rep = incompatibility_witness(corpus.t1, corpus.t2, 2)
    assert rep.verdict == "NOT-MERGEABLE-AT-2" and rep.not_mergeable
    assert rep.union_models == 0
    assert incompatibility_witness(corpus.t1, corpus.t3, 2).verdict == INCONCLUSIVE


def test_search_finds_canonical_bodies(corpus):
    c = corpus
    cert = search_merge(c.t1, c.t3, 2, 2)
    assert cert is not None and cert.verified
    assert [print_formula(d.body) for d in cert.delta_lr] == ["p(x0)"]
    assert [print_formula(d.body) for d in cert.delta_rl] == ["q(x0)"]


@pytest.mark.parametrize("depth,candidates,working", [(1, 16, 14), (2, 350, 268)])
def test_search_agrees_with_exhaustive_bodies(corpus, depth, candidates, working):
    # frozen counts from the exhaustive oracle: bodies over p with free
    # variable x0 and variables x0, x1 that merge T1 with T3 given p := q
    c = corpus
    p, q = c.t1.signature["p"], c.t3.signature["q"]
    fs = [f for f in all_formulas(c.t1.signature, depth, 2) if free_variables(f) <= {x0}]
    d31 = DefinitionSet(c.t3.signature, [define(p, q(x0))])
    ok = [f for f in fs
          if verify_merge(c.t1, c.t3, DefinitionSet(c.t1.signature, [define(q, f)]), d31, 2).verified]
    assert (len(fs), len(ok)) == (candidates, working)
    best = min(ok, key=lambda f: (formula_size(f), print_formula(f)))
    found = search_merge(c.t1, c.t3, depth, 2)
    assert found.delta_lr[q].body == best


def test_search_on_incompatible_pair(corpus):
    out = search_merge_report(corpus.t1, corpus.t2, 3, 2)
    assert out.certificate is None and out.exhausted
    assert out.incompatibility.not_mergeable


def test_search_identity(t1):
    cert = search_merge(t1, t1, 0, 3)
    assert cert.verified and len(cert.delta_lr) == 0 and len(cert.delta_rl) == 0


def test_search_merges_proposition_with_constant_predicate():
    # q is constant, so q(x0) := p and p := E x . q(x) should work
    a = parse_theory("theory A\nrel p 0\n")
    b = parse_theory("theory B\nrel q 1\naxiom A x . A y . q(x) <-> q(y)\n")
    out = search_merge_report(a, b, 2, 2)
    assert out.certificate is not None
    assert out.certificate.verified


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_search_results_are_verified(seed):
    rng = random.Random(seed)
    sig1 = random_signature(rng, max_symbols=1, max_arity=1, names=("p", "q"))
    sig2 = random_signature(rng, max_symbols=1, max_arity=1, names=("r", "s"))
    a = random_consistent_theory(rng, sig1, 2, name="A")
    b = random_consistent_theory(rng, sig2, 2, name="B")
    cert = search_merge(a, b, 1, 2)
    if cert is not None:
        assert reverify(cert).verified
        assert brute_equivalent(apply_extension(a, cert.delta_lr), apply_extension(b, cert.delta_rl), 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_mergers_match_oracle(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, max_symbols=2, names=("p", "q"), max_bits=8)
    t = random_consistent_theory(rng, sig, 2)
    c = random_merger(rng, t, disjoint_names(rng, len(sig), set(sig.names()), ("r", "s", "u")), 2)
    assert c.verified
    assert brute_equivalent(apply_extension(c.left, c.delta_lr), apply_extension(c.right, c.delta_rl), 2)
    bad = perturb(rng, c.delta_lr)
    res = verify_merge(c.left, c.right, bad, c.delta_rl, 2)
    assert res.verified == brute_equivalent(apply_extension(c.left, bad),
                                            apply_extension(c.right, c.delta_rl), 2)


def test_unfold():
    sig = Signature.of(p=1)
    q = RelationSymbol("q", 1)
    ds = DefinitionSet(sig, [define(q, Not(sig["p"](x0)))])
    f = parse_formula("A x1 . q(x1)", sig | Signature([q]))
    assert unfold(f, ds) == parse_formula("A x1 . ~p(x1)", sig)


def test_compose_requires_disjointness(corpus):
    c = corpus
    m13 = verify_merge(c.t1, c.t3, c.d13, c.d31, 2)
    with pytest.raises(DefinitionError):
        compose_disjoint_mergers(m13, m13.swapped())


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_composition_of_random_mergers(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, max_symbols=2, names=("a", "b"), max_bits=8)
    t = random_consistent_theory(rng, sig, 2)
    c12 = random_merger(rng, t, disjoint_names(rng, len(sig), set(), ("c", "d")), 2, name="U")
    c23 = random_merger(rng, c12.right, disjoint_names(rng, len(sig), set(), ("e", "f")), 2, name="V")
    c13 = compose_disjoint_mergers(c12, c23)
    assert c13.verified


def test_paper_chain(corpus):
    c = corpus
    m13 = verify_merge(c.t1, c.t3, c.d13, c.d31, 2)
    m32 = verify_merge(c.t3, c.t2, c.d32, c.d23, 2)
    chain = chain_from_mergers([m13, m32])
    assert len(chain.theories) == 5
    assert verify_defeq_chain(chain).ok
    assert verify_defeq_chain(chain.reversed()).ok


def test_chain_failure_index(corpus):
    c = corpus
    m13 = verify_merge(c.t1, c.t3, c.d13, c.d31, 2)
    bad = verify_merge(c.t3, c.t2, c.d31, DefinitionSet(c.t2.signature, c.d13), 2)
    chain = chain_from_mergers([m13, bad])
    v = verify_defeq_chain(chain)
    assert not v.ok and v.failing_index in (2, 3)


def test_malformed_chain(t1):
    with pytest.raises(DefinitionError):
        verify_defeq_chain(DefEqCertificate((t1, t1), (), 2))
    with pytest.raises(DefinitionError):
        ChainStep("<>", DefinitionSet.empty(t1.signature))
    assert verify_defeq_chain(single_theory_chain(t1, 2)).ok


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_chains_verify(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, max_symbols=2, names=("p", "q"), max_bits=6)
    t = random_consistent_theory(rng, sig, 2)
    chain = random_chain(rng, t, rng.randint(1, 6), 2)
    assert verify_defeq_chain(chain).ok
    assert verify_defeq_chain(chain.reversed()).ok
