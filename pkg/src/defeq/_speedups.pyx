# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernel; mirrors ``defeq._purekernel`` exactly."""

from cpython.bytes cimport PyBytes_FromStringAndSize

cdef enum:
    PRED = 0
    EQ = 1
    NOT = 2
    AND = 3
    EXISTS = 4


cdef struct Prog:
    const int* op
    const int* a
    const int* b
    const int* c
    const int* args


cdef bint _eval(Prog* p, int n, int size, unsigned char* data,
                const int* offsets, int* env) noexcept nogil:
    cdef int o, k, i, idx, v, old, val
    while True:
        o = p.op[n]
        if o == PRED:
            k = p.c[n]
            idx = 0
            for i in range(k):
                idx = idx * size + env[p.args[p.b[n] + i]]
            return data[offsets[p.a[n]] + idx] == 1
        elif o == EQ:
            return env[p.a[n]] == env[p.b[n]]
        elif o == NOT:
            return not _eval(p, p.a[n], size, data, offsets, env)
        elif o == AND:
            if not _eval(p, p.a[n], size, data, offsets, env):
                return False
            n = p.b[n]
        else:
            v = p.a[n]
            old = env[v]
            for val in range(size):
                env[v] = val
                if _eval(p, p.b[n], size, data, offsets, env):
                    env[v] = old
                    return True
            env[v] = old
            return False


cdef void _table(Prog* p, int root, const int* params, int nparams, int size,
                 unsigned char* data, const int* offsets, int* env,
                 unsigned char* out) noexcept nogil:
    cdef long total = 1
    cdef long idx, rem
    cdef int j
    for j in range(nparams):
        total *= size
    for idx in range(total):
        rem = idx
        for j in range(nparams - 1, -1, -1):
            env[params[j]] = rem % size
            rem //= size
        out[idx] = 1 if _eval(p, root, size, data, offsets, env) else 0


cdef Prog _prog(const int[::1] op, const int[::1] a, const int[::1] b,
                const int[::1] c, const int[::1] args):
    cdef Prog p
    p.op = &op[0]
    p.a = &a[0]
    p.b = &b[0]
    p.c = &c[0]
    p.args = &args[0]
    return p


def eval_formula(prog, int root, int size, const unsigned char[::1] data,
                 const int[::1] offsets, int[::1] env):
    cdef const int[::1] op = prog.op, a = prog.a, b = prog.b, c = prog.c, args = prog.args
    cdef Prog p = _prog(op, a, b, c, args)
    return bool(_eval(&p, root, size, <unsigned char*> &data[0], &offsets[0], &env[0]))


def fill_table(prog, int root, const int[::1] params, int size,
               const unsigned char[::1] data, const int[::1] offsets, unsigned char[::1] out):
    cdef const int[::1] op = prog.op, a = prog.a, b = prog.b, c = prog.c, args = prog.args
    cdef Prog p = _prog(op, a, b, c, args)
    cdef int nvars = max(prog.nvars, 1)
    cdef int[::1] env = _zeros(nvars)
    cdef const int* pp = &params[0] if params.shape[0] > 0 else NULL
    _table(&p, root, pp, params.shape[0], size, <unsigned char*> &data[0], &offsets[0], &env[0], &out[0])


cdef int[::1] _zeros(int n):
    import array
    return array.array("i", [0] * n)


def search(prog, axiom_roots, int size, const int[::1] offsets, unsigned char[::1] data,
           const int[::1] free_positions, derived):
    cdef const int[::1] op = prog.op, a = prog.a, b = prog.b, c = prog.c, args = prog.args
    cdef Prog p = _prog(op, a, b, c, args)
    cdef int nvars = max(prog.nvars, 1)
    cdef int[::1] env = _zeros(nvars)
    cdef int nax = len(axiom_roots)
    cdef int[::1] roots = _zeros(max(nax, 1))
    cdef int i, j, nfree = free_positions.shape[0], ndef = len(derived)
    cdef int total_params = 0
    for i in range(nax):
        roots[i] = axiom_roots[i]
    for off, root, params in derived:
        total_params += len(params)
    cdef int[::1] d_off = _zeros(max(ndef, 1))
    cdef int[::1] d_root = _zeros(max(ndef, 1))
    cdef int[::1] d_start = _zeros(max(ndef, 1))
    cdef int[::1] d_len = _zeros(max(ndef, 1))
    cdef int[::1] d_params = _zeros(max(total_params, 1))
    cdef int pos = 0
    i = 0
    for off, root, params in derived:
        d_off[i] = off
        d_root[i] = root
        d_start[i] = pos
        d_len[i] = len(params)
        for j in range(len(params)):
            d_params[pos] = params[j]
            pos += 1
        i += 1
    cdef unsigned char* dp = &data[0]
    cdef const int* offp = &offsets[0]
    cdef Py_ssize_t nbytes = data.shape[0]
    cdef bint ok
    out = []
    for j in range(nfree):
        dp[free_positions[j]] = 0
    while True:
        for i in range(ndef):
            _table(&p, d_root[i], &d_params[d_start[i]], d_len[i], size, dp, offp,
                   &env[0], dp + d_off[i])
        ok = True
        for i in range(nax):
            if not _eval(&p, roots[i], size, dp, offp, &env[0]):
                ok = False
                break
        if ok:
            out.append(PyBytes_FromStringAndSize(<char*> dp, nbytes))
        j = nfree - 1
        while j >= 0 and dp[free_positions[j]] == 1:
            dp[free_positions[j]] = 0
            j -= 1
        if j < 0:
            return out
        dp[free_positions[j]] = 1
