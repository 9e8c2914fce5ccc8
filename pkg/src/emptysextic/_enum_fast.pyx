# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure-Python enumeration kernel.

Same recursion as emptysextic._enum_py but with C doubles for the pruning
bounds (padded conservatively) and an exact integer re-check on every
candidate, so the output is identical to the exact reference kernel: the
padding only ever admits extra candidates, which the final exact test
discards, and it is far wider than the worst float error for the small
integer Gram matrices used here.
"""

from fractions import Fraction

import numpy as np

cimport numpy as cnp
from libc.math cimport floor

BACKEND = "cython"

DEF PAD = 1e-9


cdef struct Frame:
    double s
    double rem


def enumerate_bounded(gram, bound, center=None):
    n = len(gram)
    if bound < 0:
        return []
    if n == 0:
        return [((), 0)]
    if center is None:
        center = [0] * n
    cen_fr = [Fraction(c) for c in center]
    # exact LDL in rationals, then converted to doubles for pruning
    a = [[Fraction(x) for x in row] for row in gram]
    dvals = [None] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        dvals[i] = a[i][i]
        if dvals[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            mu[i][j] = a[i][j] / dvals[i]
        for k in range(i + 1, n):
            for l in range(i + 1, n):
                a[k][l] -= a[k][i] * a[i][l] / dvals[i]

    cdef cnp.ndarray[cnp.float64_t, ndim=1] d = np.array(
        [float(x) for x in dvals], dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] muf = np.array(
        [[float(x) for x in row] for row in mu], dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cenf = np.array(
        [float(c) for c in cen_fr], dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] g = np.array(
        [[int(x) for x in row] for row in gram], dtype=np.int64)

    cdef double boundf = float(bound)
    cdef int nn = n
    cdef cnp.ndarray[cnp.float64_t, ndim=2] shifts = np.zeros(
        (n + 1, n), dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] xs = np.zeros(n, dtype=np.int64)

    out = []
    center_is_zero = all(c == 0 for c in cen_fr)

    # iterative DFS over levels n-1 .. 0
    _rec(nn - 1, boundf + PAD, shifts, xs, d, muf, cenf, g, out,
         gram, cen_fr, bound, center_is_zero)
    out.sort(key=lambda t: (Fraction(t[1]), t[0]))
    return out


cdef _rec(int i, double rem,
          cnp.ndarray[cnp.float64_t, ndim=2] shifts,
          cnp.ndarray[cnp.int64_t, ndim=1] xs,
          cnp.ndarray[cnp.float64_t, ndim=1] d,
          cnp.ndarray[cnp.float64_t, ndim=2] muf,
          cnp.ndarray[cnp.float64_t, ndim=1] cenf,
          cnp.ndarray[cnp.int64_t, ndim=2] g,
          list out, object gram, list cen_fr, object bound,
          bint center_is_zero):
    cdef double s = cenf[i] - shifts[i, i]
    cdef long base = <long>floor(s)
    cdef long x
    cdef double t, val
    cdef int k, n = xs.shape[0]
    cdef int step_dir
    for step_dir in range(2):
        x = base if step_dir == 0 else base + 1
        while True:
            t = x - s
            val = d[i] * t * t
            if val > rem + PAD:
                break
            xs[i] = x
            if i == 0:
                _accept(xs, g, out, gram, cen_fr, bound, center_is_zero)
            else:
                for k in range(i):
                    shifts[i - 1, k] = shifts[i, k] + muf[k, i] * (x - cenf[i])
                _rec(i - 1, rem - val + PAD, shifts, xs, d, muf, cenf, g,
                     out, gram, cen_fr, bound, center_is_zero)
                # restore shift row for siblings (recomputed each loop)
            x += -1 if step_dir == 0 else 1


cdef _accept(cnp.ndarray[cnp.int64_t, ndim=1] xs,
             cnp.ndarray[cnp.int64_t, ndim=2] g,
             list out, object gram, list cen_fr, object bound,
             bint center_is_zero):
    cdef int n = xs.shape[0]
    cdef int i, j
    cdef long q = 0
    coords = []
    for i in range(n):
        coords.append(int(xs[i]))
    if center_is_zero:
        for i in range(n):
            if xs[i]:
                for j in range(n):
                    if xs[j]:
                        q += xs[i] * g[i, j] * xs[j]
        if q <= bound:
            out.append((tuple(coords), int(q)))
        return
    # exact rational value for shifted centers
    diff = [Fraction(c) - cf for c, cf in zip(coords, cen_fr)]
    val = 0
    for i in range(n):
        if diff[i]:
            for j in range(n):
                if diff[j]:
                    val += diff[i] * gram[i][j] * diff[j]
    val = Fraction(val)
    if val <= bound:
        out.append((tuple(coords),
                    int(val) if val.denominator == 1 else val))
