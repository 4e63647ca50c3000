import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from defeq import kernel
from defeq.generators import random_formula, random_model_bits, random_sentence, random_signature
from defeq.syntax import Var

BACKENDS = sorted(kernel.BACKENDS)


def test_python_backend_always_present():
    assert "python" in kernel.BACKENDS


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernel.set_backend("fortran")


def test_environment_forces_pure_python():
    env = dict(os.environ, DEFEQ_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from defeq import kernel; print(kernel.backend_name())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_backends_agree_on_evaluation_and_tables(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, max_arity=3, max_bits=None)
    size = rng.randint(1, 3)
    m = random_model_bits(rng, sig, size)
    layout = kernel.Layout(sig, size)
    data = layout.encode(m.interp)
    f = random_sentence(rng, sig, 4)
    g = random_formula(rng, sig, 3, [Var(0), Var(1)])
    evals = {b: kernel.evaluate(layout, data, f, backend=b) for b in BACKENDS}
    tables = {b: bytes(kernel.table(layout, data, g, (Var(0), Var(1)), backend=b)) for b in BACKENDS}
    assert len(set(evals.values())) == 1
    assert len(set(tables.values())) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_backends_agree_on_search(seed):
    rng = random.Random(seed)
    sig = random_signature(rng, max_arity=2, max_bits=9)
    layout = kernel.Layout(sig, 2)
    axioms = [random_sentence(rng, sig, 3) for _ in range(2)]
    results = {b: sorted(kernel.search(layout, axioms, backend=b)) for b in BACKENDS}
    assert len({tuple(r) for r in results.values()}) == 1


def test_layout_round_trip():
    from defeq.syntax import Signature
    sig = Signature.of(p=1, r=2, s=0)
    layout = kernel.Layout(sig, 2)
    interp = {sig["p"]: frozenset({(1,)}), sig["r"]: frozenset({(0, 1)}), sig["s"]: frozenset({()})}
    assert layout.decode(layout.encode(interp)) == interp
    assert layout.total == 2 + 4 + 1
