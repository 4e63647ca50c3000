"""Flat formula programs and the evaluation backend.

The inner loops of the package (checking sentences on a structure, filling
the truth table of a defining formula, exhaustive structure search) run on
a flat integer encoding of formulas.  Two interchangeable backends execute
it: the compiled ``defeq._speedups`` extension and the pure-Python
``defeq._purekernel``.  The compiled one is used when it imports, unless the
environment variable ``DEFEQ_PURE_PYTHON`` is set to a non-empty value.
"""

from __future__ import annotations

import array
import itertools
import os
from functools import lru_cache
from types import ModuleType
from typing import Iterable, Sequence

from defeq import _purekernel
from defeq.syntax import And, Eq, Exists, Formula, Not, Pred, RelationSymbol, Signature, Var

PRED, EQ, NOT, AND, EXISTS = range(5)

try:
    from defeq import _speedups
except ImportError:  # extension not built
    _speedups = None

BACKENDS: dict[str, ModuleType] = {"python": _purekernel}
if _speedups is not None:
    BACKENDS["cython"] = _speedups

if os.environ.get("DEFEQ_PURE_PYTHON") or _speedups is None:
    _backend_name = "python"
else:
    _backend_name = "cython"


def backend_name() -> str:
    return _backend_name


def set_backend(name: str) -> str:
    """Select the evaluation backend; returns the previous name."""
    global _backend_name
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable (have {sorted(BACKENDS)})")
    old, _backend_name = _backend_name, name
    return old


def _impl(backend: str | None) -> ModuleType:
    return BACKENDS[backend or _backend_name]


class Program:
    """Formulas as parallel node arrays (op, a, b, c) plus an argument pool.

    PRED: a = relation slot, b = start in args, c = arity.
    EQ: a, b = variable slots.  NOT: a = child.  AND: a, b = children.
    EXISTS: a = variable slot, b = body.
    """

    __slots__ = ("op", "a", "b", "c", "args", "nvars")

    def __init__(self, op, a, b, c, args, nvars):
        self.op, self.a, self.b, self.c, self.args, self.nvars = op, a, b, c, args, nvars


class ProgramBuilder:
    def __init__(self, slots: dict[RelationSymbol, int]):
        self.slots = slots
        self.var_slots: dict[Var, int] = {}
        self.op: list[int] = []
        self.a: list[int] = []
        self.b: list[int] = []
        self.c: list[int] = []
        self.args: list[int] = []

    def var(self, v: Var) -> int:
        s = self.var_slots.get(v)
        if s is None:
            s = self.var_slots[v] = len(self.var_slots)
        return s

    def _node(self, o, a=0, b=0, c=0) -> int:
        self.op.append(o)
        self.a.append(a)
        self.b.append(b)
        self.c.append(c)
        return len(self.op) - 1

    def add(self, f: Formula) -> int:
        if isinstance(f, Pred):
            start = len(self.args)
            self.args.extend(self.var(v) for v in f.args)
            try:
                slot = self.slots[f.symbol]
            except KeyError:
                raise KeyError(f"symbol {f.symbol} has no slot in this layout") from None
            return self._node(PRED, slot, start, f.symbol.arity)
        if isinstance(f, Eq):
            return self._node(EQ, self.var(f.left), self.var(f.right))
        if isinstance(f, Not):
            return self._node(NOT, self.add(f.sub))
        if isinstance(f, And):
            left = self.add(f.left)
            return self._node(AND, left, self.add(f.right))
        if isinstance(f, Exists):
            v = self.var(f.var)
            return self._node(EXISTS, v, self.add(f.body))
        raise TypeError(f"not a formula: {f!r}")

    def build(self) -> Program:
        # one padding entry keeps every buffer non-empty for the C side
        def arr(xs):
            return array.array("i", list(xs) + [0])
        return Program(arr(self.op), arr(self.a), arr(self.b), arr(self.c), arr(self.args),
                       max(len(self.var_slots), 1))


@lru_cache(maxsize=None)
def _tuples(size: int, arity: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.product(range(size), repeat=arity))


def tuple_index(t: Sequence[int], size: int) -> int:
    idx = 0
    for x in t:
        idx = idx * size + x
    return idx


class Layout:
    """Byte layout of all relations of a signature over a universe of ``size``.

    Relations occupy consecutive blocks in signature (name) order; inside a
    block, tuples are in lexicographic order.  This concatenation is the
    bit-vector whose lexicographic order defines the canonical model order.
    """

    def __init__(self, sig: Signature, size: int):
        self.sig = sig
        self.size = size
        self.symbols = list(sig)
        self.slots = {s: i for i, s in enumerate(self.symbols)}
        offs, pos = [], 0
        for s in self.symbols:
            offs.append(pos)
            pos += size ** s.arity
        self.total = pos
        self.offset_list = offs
        self.offsets = array.array("i", offs + [0])

    def block(self, sym: RelationSymbol) -> range:
        off = self.offset_list[self.slots[sym]]
        return range(off, off + self.size ** sym.arity)

    def encode(self, interp: dict) -> bytearray:
        data = bytearray(self.total + 1)
        for s in self.symbols:
            off = self.offset_list[self.slots[s]]
            for t in interp.get(s, ()):
                data[off + tuple_index(t, self.size)] = 1
        return data

    def decode(self, data) -> dict[RelationSymbol, frozenset]:
        out = {}
        for s in self.symbols:
            off = self.offset_list[self.slots[s]]
            tuples = _tuples(self.size, s.arity)
            out[s] = frozenset(t for i, t in enumerate(tuples) if data[off + i])
        return out

    def builder(self) -> ProgramBuilder:
        return ProgramBuilder(self.slots)


def evaluate(layout: Layout, data, f: Formula, env: dict[Var, int] | None = None,
             backend: str | None = None) -> bool:
    b = layout.builder()
    for v in (env or {}):
        b.var(v)
    root = b.add(f)
    prog = b.build()
    envarr = array.array("i", [0] * prog.nvars)
    for v, val in (env or {}).items():
        envarr[b.var_slots[v]] = val
    return _impl(backend).eval_formula(prog, root, layout.size, data, layout.offsets, envarr)


def table(layout: Layout, data, f: Formula, params: Sequence[Var],
          backend: str | None = None) -> bytearray:
    """Truth table of ``f`` over all assignments to ``params`` (first most
    significant)."""
    b = layout.builder()
    pslots = array.array("i", [b.var(v) for v in params] + [0])
    root = b.add(f)
    prog = b.build()
    out = bytearray(layout.size ** len(params) + 1)
    _impl(backend).fill_table(prog, root, pslots[:len(params)] if params else pslots[:0],
                              layout.size, data, layout.offsets, out)
    return out


def search(layout: Layout, axioms: Iterable[Formula],
           derived: Sequence[tuple[RelationSymbol, Sequence[Var], Formula]] = (),
           backend: str | None = None) -> list[bytes]:
    """All structures over ``layout`` satisfying ``axioms``.

    Symbols listed in ``derived`` are not enumerated: each is computed from
    its formula (over the listed parameters) after the free symbols are set,
    in list order.  Results come back in enumeration order of the free bits.
    """
    b = layout.builder()
    dspecs = []
    for sym, params, body in derived:
        pslots = [b.var(v) for v in params]
        dspecs.append((sym, pslots, body))
    droots = []
    for sym, pslots, body in dspecs:
        droots.append((layout.offset_list[layout.slots[sym]], b.add(body),
                       array.array("i", pslots)))
    roots = [b.add(ax) for ax in axioms]
    prog = b.build()
    fixed = {sym for sym, _, _ in derived}
    free = [i for s in layout.symbols if s not in fixed for i in layout.block(s)]
    data = bytearray(layout.total + 1)
    return _impl(backend).search(prog, roots, layout.size, layout.offsets, data,
                                 array.array("i", free), droots)


def compile_formula(layout: Layout, f: Formula, env_vars: Sequence[Var] = (),
                    backend: str | None = None):
    """Compile ``f`` once for ``layout``; returns ``check(data, values=()) -> bool``
    where ``values`` are assigned to ``env_vars`` in order."""
    b = layout.builder()
    slots = [b.var(v) for v in env_vars]
    root = b.add(f)
    prog = b.build()
    impl = _impl(backend)
    envarr = array.array("i", [0] * prog.nvars)

    def check(data, values: Sequence[int] = ()) -> bool:
        for s, val in zip(slots, values):
            envarr[s] = val
        return impl.eval_formula(prog, root, layout.size, data, layout.offsets, envarr)

    return check
