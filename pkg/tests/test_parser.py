from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st
import random

from defeq.generators import random_formula, random_signature
from defeq.parser import ParseError, parse_formula, parse_theory, print_formula, print_theory
from defeq.syntax import (
    And, Eq, Exists, ExistsUnique, Forall, Iff, Implies, Not, Or, RelationSymbol, Signature,
    Var, WellFormednessError,
)

CORPUS_SIG = Signature.of(p=1, q=1, r=2, s=0, u=3)
CORPUS = Path(__file__).parent / "data" / "formulas.txt"


def corpus_lines():
    return [ln for ln in CORPUS.read_text().splitlines() if ln.strip() and not ln.startswith("#")]


P = RelationSymbol("p", 1)
Q = RelationSymbol("q", 1)
x0, x1 = Var(0), Var(1)


@pytest.mark.parametrize("text", corpus_lines())
def test_corpus_round_trip(text):
    f = parse_formula(text, CORPUS_SIG)
    assert parse_formula(print_formula(f), CORPUS_SIG) == f
    # printing is a fixed point after one round
    assert print_formula(parse_formula(print_formula(f), CORPUS_SIG)) == print_formula(f)


def test_precedence():
    sig = Signature.of(p=1, q=1)
    assert parse_formula("p(x0) & q(x0) | p(x0)", sig) == Or(And(P(x0), Q(x0)), P(x0))
    assert parse_formula("p(x0) -> q(x0) -> p(x0)", sig) == Implies(P(x0), Implies(Q(x0), P(x0)))
    assert parse_formula("~p(x0) & q(x0)", sig) == And(Not(P(x0)), Q(x0))


def test_quantifier_body_extends_right():
    sig = Signature.of(p=1, q=1)
    assert parse_formula("E x0 . p(x0) & q(x0)", sig) == Exists(x0, And(P(x0), Q(x0)))
    assert parse_formula("A x0 . p(x0)", sig) == Forall(x0, P(x0))
    assert parse_formula("E! x0 . p(x0)", sig) == ExistsUnique(x0, P(x0))


def test_named_variables_get_fresh_indices():
    sig = Signature.of(r=2)
    f = parse_formula("A y . E x0 . r(x0, y)", sig)
    g = parse_formula("A x1 . E x0 . r(x0, x1)", sig)
    assert f == g


def test_printer_resugars():
    assert print_formula(Forall(x0, Iff(P(x0), Not(Q(x0))))) == "A x0 . p(x0) <-> ~q(x0)"
    assert print_formula(Eq(x0, x1)) == "x0 = x1"


@pytest.mark.parametrize("bad", ["p(x0", "p(x0, x1)", "E . p(x0)", "p(x0) &", "zz(x0)", "x0", "A x0 p(x0)"])
def test_parse_errors(bad):
    with pytest.raises((ParseError, WellFormednessError)):
        parse_formula(bad, Signature.of(p=1))


def test_theory_round_trip(t1):
    assert parse_theory(print_theory(t1)) == t1
    assert t1.name == "T1"


def test_theory_errors():
    with pytest.raises(ParseError):
        parse_theory("rel p 1\n")
    with pytest.raises(ParseError):
        parse_theory("theory T\nrel p x\n")
    with pytest.raises(ParseError):
        parse_theory("theory T\nrel p 1\nrel p 2\n")
    with pytest.raises(ParseError):
        parse_theory("theory T\nrel p 1\naxiom q(x)\n")
    with pytest.raises(ParseError):
        parse_theory("theory T\nfoo\n")


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_round_trip(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, max_symbols=3, max_arity=3, max_bits=None)
    f = random_formula(rng, sig, rng.randint(0, 4), [Var(i) for i in range(rng.randint(0, 3))])
    assert parse_formula(print_formula(f), sig) == f
