"""Pure-Python antichain kernel.

A clopen subset of Cantor space is a finite union of cylinders; the kernel
works on its *canonical antichain*: a tuple of (length, value) pairs, sorted
breadth-first, prefix-free, and with every sibling pair merged into the
parent.  Values are big-endian ints (bit 0 of the string is the most
significant bit), and may be arbitrarily large — cylinder depths in the
hundreds occur routinely, so values never fit machine words.

``FULL`` is the single empty-string cylinder; the empty tuple is the empty
set.  All ops take and return canonical tuples.

The compiled twin ``_kernel.pyx`` implements the identical API; parity is
enforced by tests.
"""

from __future__ import annotations

from typing import Iterable, Tuple

Cyl = Tuple[int, int]
Antichain = Tuple[Cyl, ...]

FULL: Antichain = ((0, 0),)
EMPTY: Antichain = ()

KERNEL_NAME = "python"


def _split(a: Antichain) -> tuple[Antichain, Antichain]:
    """Split a canonical, non-full, non-empty antichain by first bit."""
    a0 = []
    a1 = []
    for n, v in a:
        m = n - 1
        tail = (m, v & ((1 << m) - 1))
        if (v >> m) & 1:
            a1.append(tail)
        else:
            a0.append(tail)
    return tuple(a0), tuple(a1)


def _join(r0: Antichain, r1: Antichain) -> Antichain:
    """Inverse of _split; merges to FULL when both halves are full."""
    if r0 == FULL and r1 == FULL:
        return FULL
    out = [(n + 1, v) for n, v in r0]
    out += [(n + 1, (1 << n) | v) for n, v in r1]
    out.sort()
    return tuple(out)


def normalize(cyls: Iterable[Cyl]) -> Antichain:
    """Canonicalize an arbitrary iterable of cylinders (drop covered ones,
    merge sibling pairs, sort breadth-first)."""
    work = list(cyls)
    if not work:
        return EMPTY

    def rec(items: list[Cyl]) -> Antichain:
        if not items:
            return EMPTY
        i0 = []
        i1 = []
        for n, v in items:
            if n == 0:
                return FULL
            m = n - 1
            tail = (m, v & ((1 << m) - 1))
            if (v >> m) & 1:
                i1.append(tail)
            else:
                i0.append(tail)
        return _join(rec(i0), rec(i1))

    return rec(work)


def union(a: Antichain, b: Antichain) -> Antichain:
    if a == FULL or b == FULL:
        return FULL
    if not a:
        return b
    if not b:
        return a
    a0, a1 = _split(a)
    b0, b1 = _split(b)
    return _join(union(a0, b0), union(a1, b1))


def intersect(a: Antichain, b: Antichain) -> Antichain:
    if not a or not b:
        return EMPTY
    if a == FULL:
        return b
    if b == FULL:
        return a
    a0, a1 = _split(a)
    b0, b1 = _split(b)
    return _join(intersect(a0, b0), intersect(a1, b1))


def complement(a: Antichain) -> Antichain:
    if not a:
        return FULL
    if a == FULL:
        return EMPTY
    a0, a1 = _split(a)
    return _join(complement(a0), complement(a1))


def measure(a: Antichain) -> Cyl:
    """Total measure as an unreduced pair (numerator, exponent):
    sum of 2**-n over cylinders equals num / 2**exp."""
    if not a:
        return (0, 0)
    e = a[-1][0]  # sorted breadth-first, so the last length is maximal
    num = 0
    for n, _ in a:
        num += 1 << (e - n)
    return (num, e)


def covers(a: Antichain, n: int, v: int) -> bool:
    """Is the cylinder (n, v) entirely inside the set?"""
    if a == FULL:
        return True
    if not a or n == 0:
        return False
    m = n - 1
    a0, a1 = _split(a)
    sub = a1 if (v >> m) & 1 else a0
    return covers(sub, m, v & ((1 << m) - 1))


def meets(a: Antichain, n: int, v: int) -> bool:
    """Does the cylinder (n, v) intersect the set?"""
    if not a:
        return False
    if a == FULL or n == 0:
        return True
    m = n - 1
    a0, a1 = _split(a)
    sub = a1 if (v >> m) & 1 else a0
    return meets(sub, m, v & ((1 << m) - 1))


def max_len(a: Antichain) -> int:
    return a[-1][0] if a else 0
