import random

import pytest
from hypothesis import given, settings, strategies as st

from defeq.definability import (
    chain_from_mergers, incompatibility_witness, search_merge, verify_defeq_chain, verify_merge,
)
from defeq.generators import random_chain, random_consistent_theory, random_signature
from defeq.parser import parse_formula, parse_theory
from defeq.semantics import defined_relation, models_of
from defeq.renaming import (
    Renaming, RenamingError, apply_renaming, defeq_two_step, fresh_renaming, renaming_to_merger,
    transport_merger,
)
from defeq.syntax import RelationSymbol, Signature, Theory, Var, free_variables

from oracles import all_formulas


def test_fresh_renaming_names():
    sig = Signature.of(p=1, q=2)
    r = fresh_renaming(sig, {"p_r1"})
    assert [s.name for s in r.target] == ["p_r2", "q_r1"]
    assert r.target["q_r1"].arity == 2
    assert r.inverse().inverse() == r


def test_renaming_validation():
    sig = Signature.of(p=1)
    with pytest.raises(RenamingError):
        Renaming(sig, Signature.of(q=2), {sig["p"]: RelationSymbol("q", 2)})
    with pytest.raises(RenamingError):
        Renaming(sig, sig, {sig["p"]: sig["p"]})
    with pytest.raises(RenamingError):
        Renaming(Signature.of(p=1, q=1), Signature.of(r=1),
                 {RelationSymbol("p", 1): RelationSymbol("r", 1), RelationSymbol("q", 1): RelationSymbol("r", 1)})


def test_renaming_text_round_trip():
    sig = Signature.of(p=1, q=0)
    r = fresh_renaming(sig)
    assert Renaming.from_lines(r.lines(), sig) == r
    with pytest.raises(RenamingError):
        Renaming.from_lines(["rename z -> y"], sig)


def test_apply_renaming(t1):
    r = fresh_renaming(t1.signature)
    t = apply_renaming(t1, r)
    assert t.signature.names() == ["p_r1"]
    assert t.name == "T1'"
    assert apply_renaming(t, r.inverse()) == t1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_renaming_merger_verifies(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, max_bits=9)
    t = random_consistent_theory(rng, sig, 2)
    assert renaming_to_merger(t, fresh_renaming(sig), 2).verified


def test_transport_along_renaming(corpus):
    c = corpus
    m13 = verify_merge(c.t1, c.t3, c.d13, c.d31, 2)
    rb = fresh_renaming(c.t3.signature, c.t1.signature)
    moved = transport_merger(m13, rb)
    assert moved.verified and moved.right.signature.names() == ["q_r1"]
    ra = fresh_renaming(c.t1.signature, {"q_r1"})
    both = transport_merger(m13, rb, ra)
    assert both.verified and both.left.signature.names() == ["p_r1"]


def test_transport_rejects_unverified(corpus):
    c = corpus
    bad = verify_merge(c.t3, c.t2, c.d31, c.d32.__class__(c.t2.signature, c.d13), 2)
    with pytest.raises(RenamingError):
        transport_merger(bad, fresh_renaming(c.t2.signature, c.t3.signature))


def test_paper_normal_form(corpus):
    c = corpus
    chain = chain_from_mergers([verify_merge(c.t1, c.t3, c.d13, c.d31, 2),
                                verify_merge(c.t3, c.t2, c.d32, c.d23, 2)])
    nf = defeq_two_step(c.t1, c.t2, chain, 2)
    assert nf.first.verified and nf.second.verified
    assert nf.renaming.lines() == ["rename p -> p_r1"]
    assert [str(d) for d in nf.first.delta_lr] == ["A x0 . p_r1(x0) <-> ~p(x0)"]
    assert verify_defeq_chain(nf.as_chain()).ok


def test_two_step_endpoint_mismatch(corpus):
    c = corpus
    chain = verify_merge(c.t1, c.t3, c.d13, c.d31, 2).as_chain()
    with pytest.raises(RenamingError):
        defeq_two_step(c.t1, c.t2, chain, 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_two_step_of_random_chains(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, max_symbols=2, names=("p", "q"), max_bits=6)
    t = random_consistent_theory(rng, sig, 2)
    chain = random_chain(rng, t, rng.randint(1, 6), 2)
    nf = defeq_two_step(chain.start, chain.end, chain, 2)
    assert nf.first.verified and nf.second.verified
    assert nf.first.left == chain.start and nf.second.right == chain.end
    assert nf.first.right == apply_renaming(chain.end, nf.renaming)


THREE = "E x . E y . E z . ~x = y & ~y = z & ~x = z & A w . (w = x | w = y | w = z)"


def test_incompatible_equivalent_pair_needs_both_mergers():
    # exactly one p versus exactly two p on three elements: equivalent
    # (p goes to its complement) but their union has no model, and no
    # formula without p picks out a proper nonempty subset, so no chain
    # through a signature below {p} exists either
    a = parse_theory(f"theory One\nrel p 1\naxiom {THREE}\naxiom E! x . p(x)\n")
    b = parse_theory(f"theory Two\nrel p 1\naxiom {THREE}\n"
                     "axiom E x . E y . ~x = y & p(x) & p(y) & A z . (p(z) -> z = x | z = y)\n")
    assert incompatibility_witness(a, b, 3).not_mergeable
    r = fresh_renaming(b.signature)
    first = search_merge(a, apply_renaming(b, r), 1, 3)
    assert first is not None and first.verified
    nf = defeq_two_step(a, b, chain_from_mergers([first, renaming_to_merger(b, r, 3).swapped()]), 3)
    assert len(nf.as_chain().theories) == 5 and verify_defeq_chain(nf.as_chain()).ok
    m = models_of(Theory(Signature(), [parse_formula(THREE)], "E"), 3).models[0]
    for f in all_formulas(Signature(), 2, 2):
        if free_variables(f) <= {Var(0)}:
            assert len(defined_relation(m, f, (Var(0),))) in (0, 3)
