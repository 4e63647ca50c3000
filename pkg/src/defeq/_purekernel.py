"""Pure-Python evaluation kernel.

Same entry points as the compiled ``_speedups`` module.  Formulas arrive as
a flat node program (see ``defeq.kernel.Program``) and are turned into
nested closures once per call, which is considerably faster than walking
the node arrays directly.
"""

PRED, EQ, NOT, AND, EXISTS = range(5)


def _build(prog, root, size, data, offsets):
    op, a, b, c, args = prog.op, prog.a, prog.b, prog.c, prog.args

    def build(n):
        o = op[n]
        if o == PRED:
            off = offsets[a[n]]
            k = c[n]
            sl = tuple(args[b[n]:b[n] + k])
            if k == 0:
                return lambda env: data[off] == 1
            if k == 1:
                s0 = sl[0]
                return lambda env: data[off + env[s0]] == 1
            if k == 2:
                s0, s1 = sl
                return lambda env: data[off + env[s0] * size + env[s1]] == 1

            def pred(env):
                idx = 0
                for s in sl:
                    idx = idx * size + env[s]
                return data[off + idx] == 1
            return pred
        if o == EQ:
            x, y = a[n], b[n]
            return lambda env: env[x] == env[y]
        if o == NOT:
            f = build(a[n])
            return lambda env: not f(env)
        if o == AND:
            f, g = build(a[n]), build(b[n])
            return lambda env: f(env) and g(env)
        v = a[n]
        f = build(b[n])
        rng = range(size)

        def ex(env):
            old = env[v]
            for val in rng:
                env[v] = val
                if f(env):
                    env[v] = old
                    return True
            env[v] = old
            return False
        return ex

    return build(root)


def eval_formula(prog, root, size, data, offsets, env):
    return bool(_build(prog, root, size, data, offsets)(env))


def fill_table(prog, root, params, size, data, offsets, out):
    f = _build(prog, root, size, data, offsets)
    env = [0] * max(prog.nvars, 1)
    n = len(params)
    total = size ** n
    for idx in range(total):
        rem = idx
        for j in range(n - 1, -1, -1):
            env[params[j]] = rem % size
            rem //= size
        out[idx] = 1 if f(env) else 0


def search(prog, axiom_roots, size, offsets, data, free_positions, derived):
    """Enumerate every assignment of the free bit positions of ``data``.

    ``derived`` lists ``(offset, root, params)`` triples; each is filled
    from its defining formula before the axioms are checked.  Returns the
    accepted ``data`` snapshots in enumeration order.
    """
    axioms = [_build(prog, r, size, data, offsets) for r in axiom_roots]
    defs = []
    for off, root, params in derived:
        n = len(params)
        defs.append((off, _build(prog, root, size, data, offsets), tuple(params), size ** n))
    env = [0] * max(prog.nvars, 1)
    for p in free_positions:
        data[p] = 0
    nfree = len(free_positions)
    out = []
    while True:
        for off, f, params, total in defs:
            n = len(params)
            for idx in range(total):
                rem = idx
                for j in range(n - 1, -1, -1):
                    env[params[j]] = rem % size
                    rem //= size
                data[off + idx] = 1 if f(env) else 0
        ok = True
        for f in axioms:
            if not f(env):
                ok = False
                break
        if ok:
            out.append(bytes(data))
        j = nfree - 1
        while j >= 0 and data[free_positions[j]] == 1:
            data[free_positions[j]] = 0
            j -= 1
        if j < 0:
            return out
        data[free_positions[j]] = 1
