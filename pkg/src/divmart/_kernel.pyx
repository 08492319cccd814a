# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled antichain kernel; API-identical to _kernel_py.

Cylinder values are arbitrary-precision ints (depths in the hundreds are
normal), so values stay PyObjects; the win over the pure kernel comes from
typed lengths, tighter loops, and avoiding per-call Python frame setup in
the recursion.
"""

FULL = ((0, 0),)
EMPTY = ()

KERNEL_NAME = "cython"

# Shifts must run under Python big-int semantics: with C-typed shift counts,
# a literal 1 would shift as a C integer and wrap at 64 bits.
cdef object ONE = 1


cdef inline tuple _pair_split(tuple a):
    cdef list a0 = []
    cdef list a1 = []
    cdef Py_ssize_t n, m
    cdef object v, tail_v
    for n, v in a:
        m = n - 1
        tail_v = v & ((ONE << m) - 1)
        if (v >> m) & 1:
            a1.append((m, tail_v))
        else:
            a0.append((m, tail_v))
    return tuple(a0), tuple(a1)


cdef tuple _join(tuple r0, tuple r1):
    if r0 == FULL and r1 == FULL:
        return FULL
    cdef list out = []
    cdef Py_ssize_t n
    cdef object v
    for n, v in r0:
        out.append((n + 1, v))
    for n, v in r1:
        out.append((n + 1, (ONE << n) | v))
    out.sort()
    return tuple(out)


cdef tuple _norm_rec(list items):
    if not items:
        return EMPTY
    cdef list i0 = []
    cdef list i1 = []
    cdef Py_ssize_t n, m
    cdef object v
    for n, v in items:
        if n == 0:
            return FULL
        m = n - 1
        if (v >> m) & 1:
            i1.append((m, v & ((ONE << m) - 1)))
        else:
            i0.append((m, v & ((ONE << m) - 1)))
    return _join(_norm_rec(i0), _norm_rec(i1))


def normalize(cyls):
    cdef list work = list(cyls)
    if not work:
        return EMPTY
    return _norm_rec(work)


cdef tuple _union(tuple a, tuple b):
    if a == FULL or b == FULL:
        return FULL
    if not a:
        return b
    if not b:
        return a
    cdef tuple a0, a1, b0, b1
    a0, a1 = _pair_split(a)
    b0, b1 = _pair_split(b)
    return _join(_union(a0, b0), _union(a1, b1))


def union(a, b):
    return _union(a, b)


cdef tuple _intersect(tuple a, tuple b):
    if not a or not b:
        return EMPTY
    if a == FULL:
        return b
    if b == FULL:
        return a
    cdef tuple a0, a1, b0, b1
    a0, a1 = _pair_split(a)
    b0, b1 = _pair_split(b)
    return _join(_intersect(a0, b0), _intersect(a1, b1))


def intersect(a, b):
    return _intersect(a, b)


cdef tuple _complement(tuple a):
    if not a:
        return FULL
    if a == FULL:
        return EMPTY
    cdef tuple a0, a1
    a0, a1 = _pair_split(a)
    return _join(_complement(a0), _complement(a1))


def complement(a):
    return _complement(a)


def measure(a):
    if not a:
        return (0, 0)
    cdef Py_ssize_t e = a[len(a) - 1][0]
    cdef object num = 0
    cdef Py_ssize_t n
    cdef object v
    for n, v in a:
        num += ONE << (e - n)
    return (num, e)


def covers(a, n, v):
    cdef tuple cur = a
    cdef Py_ssize_t depth = n
    cdef object val = v
    cdef Py_ssize_t m
    cdef tuple c0, c1
    while True:
        if cur == FULL:
            return True
        if not cur or depth == 0:
            return False
        m = depth - 1
        c0, c1 = _pair_split(cur)
        cur = c1 if (val >> m) & 1 else c0
        val = val & ((ONE << m) - 1)
        depth = m


def meets(a, n, v):
    cdef tuple cur = a
    cdef Py_ssize_t depth = n
    cdef object val = v
    cdef Py_ssize_t m
    cdef tuple c0, c1
    while True:
        if not cur:
            return False
        if cur == FULL or depth == 0:
            return True
        m = depth - 1
        c0, c1 = _pair_split(cur)
        cur = c1 if (val >> m) & 1 else c0
        val = val & ((ONE << m) - 1)
        depth = m


def max_len(a):
    if not a:
        return 0
    return a[len(a) - 1][0]
