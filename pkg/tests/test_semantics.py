import random

import pytest
from hypothesis import given, settings, strategies as st

from defeq.generators import random_model_bits, random_sentence, random_signature, random_theory
from defeq.parser import parse_formula, parse_theory
from defeq.semantics import (
    EvaluationError, FiniteModel, SearchSpaceTooLarge, SemanticsError, SignatureMismatch,
    bounded_entails, bounded_equivalent, countermodel, defined_relation, enumerate_models,
    expand_by_definitions, holds_in, models_of, parse_model, print_model, reduct, satisfies,
)
from defeq.definability import define
from defeq.syntax import RelationSymbol, Signature, Theory, Var

from oracles import brute_models

SIG = Signature.of(p=1, r=2)
P, R = SIG["p"], SIG["r"]


def test_satisfies_clauses():
    m = FiniteModel(2, {P: [(0,)], R: [(0, 1)]}, SIG)
    f = parse_formula("E x . p(x) & E y . r(x, y) & ~x = y", SIG)
    assert satisfies(m, f)
    assert not satisfies(m, parse_formula("A x . p(x)", SIG))
    assert satisfies(m, parse_formula("p(x0)", SIG), {Var(0): 0})
    assert not satisfies(m, parse_formula("p(x0)", SIG), {Var(0): 1})


def test_satisfies_needs_full_evaluation():
    m = FiniteModel(1, {}, SIG)
    with pytest.raises(EvaluationError):
        satisfies(m, parse_formula("p(x0)", SIG))


def test_signature_mismatch():
    m = FiniteModel(1, {}, Signature.of(p=1))
    with pytest.raises(SignatureMismatch):
        satisfies(m, parse_formula("E x . r(x, x)", SIG))


def test_model_validation():
    with pytest.raises(SemanticsError):
        FiniteModel(0, {}, SIG)
    with pytest.raises(SemanticsError):
        FiniteModel(2, {P: [(2,)]}, SIG)
    with pytest.raises(SemanticsError):
        FiniteModel(2, {RelationSymbol("z", 0): [()]}, SIG)


def test_example_theories_have_one_model_each(t1, t2, t3):
    for t in (t1, t2, t3):
        cls = models_of(t, 3)
        assert len(cls) == 1 and cls.models[0].size == 1
    union = t1.union(t2)
    assert len(models_of(union, 3)) == 0


def test_canonical_order_matches_oracle():
    t = parse_theory("theory T\nrel p 1\nrel r 2\naxiom A x . E y . r(x, y)\n")
    assert list(models_of(t, 2)) == brute_models(t, 2)


def test_definitional_shortcut_agrees_with_brute_force():
    t = parse_theory("theory T\nrel p 1\nrel r 2\naxiom A x . p(x) <-> E y . r(x, y)\n"
                     "axiom E x . ~p(x)\n")
    assert enumerate_models(t.signature, t, 3).models == \
        enumerate_models(t.signature, t, 3, brute_force=True).models


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_enumeration_matches_oracle(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, max_symbols=2, max_arity=2, max_bits=9)
    t = random_theory(rng, sig, max_axioms=2, depth=3)
    assert list(models_of(t, 2)) == brute_models(t, 2)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kernel_evaluation_agrees_with_direct(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, max_arity=3, max_bits=None)
    m = random_model_bits(rng, sig, rng.randint(1, 3))
    f = random_sentence(rng, sig, rng.randint(0, 4))
    assert holds_in(m, f) == satisfies(m, f)


def test_reduct_and_expansion():
    m = FiniteModel(2, {P: [(1,)], R: [(0, 1), (1, 1)]}, SIG)
    assert reduct(m, Signature.of(p=1)) == FiniteModel(2, {P: [(1,)]}, Signature.of(p=1))
    d = define(RelationSymbol("q", 1), parse_formula("E y . r(x0, y)", SIG))
    e = expand_by_definitions(m, [d])
    assert e[RelationSymbol("q", 1)] == {(0,), (1,)}
    assert reduct(e, SIG) == m
    with pytest.raises(SignatureMismatch):
        reduct(m, Signature.of(z=1))


def test_defined_relation():
    m = FiniteModel(3, {R: [(0, 1), (1, 2)]}, SIG)
    f = parse_formula("E x2 . r(x0, x2) & r(x2, x1)", SIG)
    assert defined_relation(m, f, (Var(0), Var(1))) == {(0, 2)}


def test_bounded_equivalence_witness(t1, t2):
    a = Theory(Signature.of(p=1), t1.axioms, "A")
    b = Theory(Signature.of(p=1), t2.axioms, "B")
    res = bounded_equivalent(a, b, 2)
    assert not res and res.witness_side == "left"
    assert satisfies(res.witness, parse_formula("A x . p(x)", a.signature))
    assert bounded_equivalent(a, a, 3)


def test_entailment(t1):
    sig = t1.signature
    assert bounded_entails(t1, parse_formula("E x . p(x)", sig), 3)
    assert countermodel(t1, parse_formula("E x . ~p(x)", sig), 3).size == 1
    with pytest.raises(EvaluationError):
        countermodel(t1, parse_formula("p(x0)", sig), 3)


def test_search_space_guard():
    t = Theory(Signature.of(r=3), (), "Big")
    with pytest.raises(SearchSpaceTooLarge):
        models_of(t, 3)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_model_text_round_trip(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, max_bits=None)
    m = random_model_bits(rng, sig, rng.randint(1, 3))
    assert parse_model(print_model(m), sig) == m


def test_bound_from_environment(monkeypatch, t1):
    monkeypatch.setenv("DEFEQ_BOUND", "2")
    assert models_of(t1).bound == 2
    monkeypatch.setenv("DEFEQ_BOUND", "0")
    with pytest.raises(ValueError):
        models_of(t1)
