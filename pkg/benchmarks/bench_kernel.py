"""Time the compiled and pure-Python kernel backends on the same workloads.

    python3 benchmarks/bench_kernel.py --repeat 3
"""

import argparse
import random
import statistics
import time

from defeq import kernel
from defeq.generators import random_model_bits, random_sentence
from defeq.parser import parse_theory
from defeq.syntax import Signature

SEARCH_THEORIES = {
    "linear order, 4 elements": (4, """theory Order
rel r 2
axiom A x . ~r(x, x)
axiom A x . A y . A z . r(x, y) & r(y, z) -> r(x, z)
axiom A x . A y . x = y | r(x, y) | r(y, x)
"""),
    "graph with a unary predicate, 3 elements": (3, """theory Graph
rel e 2
rel p 1
axiom A x . A y . e(x, y) -> e(y, x)
axiom A x . p(x) -> E y . e(x, y) & ~p(y)
"""),
}


def _time(fn, repeat):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def bench_search(backend, repeat):
    out = {}
    for label, (size, text) in SEARCH_THEORIES.items():
        t = parse_theory(text)
        layout = kernel.Layout(t.signature, size)
        out[label] = _time(lambda: kernel.search(layout, t.axioms, backend=backend), repeat)
    return out


def bench_eval(backend, repeat, count=2000, seed=0):
    rng = random.Random(seed)
    sig = Signature.of(p=1, r=2, s=2)
    cases = []
    for _ in range(count):
        m = random_model_bits(rng, sig, 3)
        layout = kernel.Layout(sig, 3)
        cases.append((layout, layout.encode(m.interp), random_sentence(rng, sig, 4)))

    def run():
        for layout, data, f in cases:
            kernel.evaluate(layout, data, f, backend=backend)

    return {f"evaluate {count} random sentences": _time(run, repeat)}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = sorted(kernel.BACKENDS)
    if "cython" not in backends:
        print("compiled backend not built; timing the pure-Python backend only")
    rows = {}
    for b in backends:
        for label, secs in {**bench_search(b, args.repeat), **bench_eval(b, args.repeat)}.items():
            rows.setdefault(label, {})[b] = secs
    width = max(map(len, rows))
    print(f"{'workload':<{width}}  " + "  ".join(f"{b:>10}" for b in backends)
          + ("     speedup" if len(backends) == 2 else ""))
    for label, by in rows.items():
        line = f"{label:<{width}}  " + "  ".join(f"{by[b]:>9.3f}s" for b in backends)
        if len(backends) == 2:
            line += f"  {by['python'] / by['cython']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
