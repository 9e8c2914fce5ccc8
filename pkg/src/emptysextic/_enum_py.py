"""Pure-Python reference kernel for definite quadratic-form enumeration.

Complete Fincke-Pohst style recursion over an exact rational Cholesky
(LDL) decomposition: all arithmetic is Fraction-based, so pruning bounds
are exact and the enumeration is provably complete.

A compiled twin (emptysextic._enum_fast) implements the same interface;
emptysextic.enumkernel picks whichever is available at import time.
"""

from __future__ import annotations

import math
from fractions import Fraction

BACKEND = "python"


def _ldl(gram):
    """Exact LDL data: Q(x) = sum_i d[i] * (x_i + sum_{j>i} mu[i][j] x_j)^2."""
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    d = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            mu[i][j] = a[i][j] / d[i]
        for k in range(i + 1, n):
            for l in range(i + 1, n):
                a[k][l] -= a[k][i] * a[i][l] / d[i]
    return d, mu


def enumerate_bounded(gram, bound, center=None):
    """All integer x with Q(x - center) <= bound for positive definite Q.

    Returns a sorted list of (coords tuple, value) with value = Q(x - center)
    exact (an int when it is integral). center may be a tuple of rationals;
    the zero vector is included when it lies within the bound.
    """
    n = len(gram)
    if bound < 0:
        return []
    if n == 0:
        return [((), 0)]
    cen = [Fraction(c) for c in center] if center is not None else [Fraction(0)] * n
    d, mu = _ldl(gram)
    bound = Fraction(bound)
    out = []
    xs = [0] * n

    def rec(i, rem, shifts):
        # rem = bound - sum_{k>i} d_k z_k^2 ; choose x_i with d_i z_i^2 <= rem
        s = cen[i] - shifts[i]
        base = math.floor(s)
        for start, step in ((base, -1), (base + 1, 1)):
            x = start
            while True:
                t = x - s
                val = d[i] * t * t
                if val > rem:
                    break
                xs[i] = x
                if i == 0:
                    out.append((tuple(xs), bound - rem + val))
                else:
                    new_shifts = shifts.copy()
                    dx = x - cen[i]
                    for k in range(i):
                        if mu[k][i]:
                            new_shifts[k] = shifts[k] + mu[k][i] * dx
                    rec(i - 1, rem - val, new_shifts)
                x += step

    rec(n - 1, bound, [Fraction(0)] * n)
    vals = []
    for coords, q in out:
        vals.append((coords, int(q) if q.denominator == 1 else q))
    vals.sort(key=lambda t: (Fraction(t[1]), t[0]))
    return vals
