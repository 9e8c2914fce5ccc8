"""Exact integer/rational matrix routines used by the lattice layer.

Everything here works on tuples of tuples (immutable matrices) over Python
ints or fractions.Fraction; no floating point is ever involved.
"""

from __future__ import annotations

from fractions import Fraction


def mat_tuple(rows):
    return tuple(tuple(r) for r in rows)


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a, b):
    if not a or not b:
        return ()
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def mat_vec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vec_mat(v, a):
    if not a:
        return ()
    return tuple(sum(v[i] * a[i][j] for i in range(len(v))) for j in range(len(a[0])))


def transpose(a):
    return tuple(zip(*a)) if a else ()


def mat_scale(a, k):
    return tuple(tuple(k * x for x in row) for row in a)


def det_bareiss(m):
    """Exact determinant via fraction-free Bareiss elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def smith_normal_form(m):
    """Smith normal form with transforms.

    Returns (d, u, v) with u*m*v = diag(d), u and v unimodular, and the
    diagonal d = (d1, d2, ...) satisfying d1 | d2 | ... (entries >= 0).
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(r) for r in m]
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]

    t = 0
    while t < min(rows, cols):
        piv = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = a[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    best = abs(x)
                    piv = (i, j)
        if piv is None:
            break
        pi, pj = piv
        if pi != t:
            _swap_rows(a, pi, t)
            _swap_rows(u, pi, t)
        if pj != t:
            _swap_cols(a, pj, t)
            _swap_cols(v, pj, t)
        dirty = False
        for i in range(t + 1, rows):
            if a[i][t] != 0:
                q = a[i][t] // a[t][t]
                a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                if a[i][t] != 0:
                    dirty = True
        for j in range(t + 1, cols):
            if a[t][j] != 0:
                q = a[t][j] // a[t][t]
                for r in a:
                    r[j] -= q * r[t]
                for r in v:
                    r[j] -= q * r[t]
                if a[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        bad = None
        for i in range(t + 1, rows):
            if any(a[i][j] % a[t][t] != 0 for j in range(t + 1, cols)):
                bad = i
                break
        if bad is not None:
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
            u[t] = [x + y for x, y in zip(u[t], u[bad])]
            continue
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    d = tuple(a[i][i] for i in range(min(rows, cols)))
    return d, mat_tuple(u), mat_tuple(v)


def hnf_rows(m):
    """Row-style Hermite normal form.

    Returns (h, u) with u unimodular and u*m = h; h is in row echelon form
    with positive pivots, entries above each pivot reduced, zero rows last.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(r) for r in m]
    u = [list(r) for r in identity(rows)]
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        _swap_rows(a, r, piv)
        _swap_rows(u, r, piv)
        while True:
            done = True
            for i in range(r + 1, rows):
                if a[i][c] != 0:
                    done = False
                    if abs(a[i][c]) < abs(a[r][c]):
                        _swap_rows(a, r, i)
                        _swap_rows(u, r, i)
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
            if done:
                break
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q != 0:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
        if r == rows:
            break
    return mat_tuple(a), mat_tuple(u)


def kernel_basis(m):
    """Basis of the integer kernel {x : x*m = 0} (x a row vector).

    The kernel of an integer matrix is automatically saturated in Z^rows.
    """
    rows = len(m)
    if rows == 0:
        return ()
    d, u, _v = smith_normal_form(m)
    rank = sum(1 for x in d if x != 0)
    return tuple(u[i] for i in range(rank, rows))


def saturation_basis(m):
    """Basis of the saturation of the row span of m inside Z^cols."""
    rows = len(m)
    if rows == 0:
        return ()
    d, _u, v = smith_normal_form(m)
    rank = sum(1 for x in d if x != 0)
    if rank == 0:
        return ()
    vinv = invert_unimodular(v)
    return tuple(vinv[i] for i in range(rank))


def invert_unimodular(v):
    """Inverse of a unimodular integer matrix (exact, integral)."""
    d, u, w = smith_normal_form(v)
    if any(x != 1 for x in d):
        raise ValueError("matrix is not unimodular")
    # u*v*w = I  =>  v^{-1} = w*u
    return mat_mul(w, u)


def invert_rational(m):
    """Exact inverse of a nonsingular matrix over the rationals."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    inv = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = None
        for i in range(c, n):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            raise ValueError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        inv[c], inv[piv] = inv[piv], inv[c]
        pv = a[c][c]
        a[c] = [x / pv for x in a[c]]
        inv[c] = [x / pv for x in inv[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
                inv[i] = [x - f * y for x, y in zip(inv[i], inv[c])]
    return mat_tuple(inv)


def rational_diagonal_signature(gram):
    """Exact signature (pos, neg, zero) of a symmetric rational matrix.

    Symmetric congruence elimination; when every remaining diagonal entry
    vanishes, a nonzero off-diagonal pair is split off as one positive plus
    one negative square (hyperbolic-pair extraction).
    """
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    pos = neg = zero = 0
    live = list(range(n))
    while live:
        piv = None
        for i in live:
            if a[i][i] != 0:
                piv = i
                break
        if piv is not None:
            d = a[piv][piv]
            if d > 0:
                pos += 1
            else:
                neg += 1
            live.remove(piv)
            coeff = {k: a[k][piv] / d for k in live}
            for k in live:
                for l in live:
                    a[k][l] -= coeff[k] * a[piv][l]
            # re-symmetrize (row ops above altered symmetry wrt pivot column)
            for k in live:
                a[k][piv] = a[piv][k] = 0
            for k in live:
                for l in live:
                    if l < k:
                        a[k][l] = a[l][k]
            continue
        off = None
        for ii, i in enumerate(live):
            for j in live[ii + 1:]:
                if a[i][j] != 0:
                    off = (i, j)
                    break
            if off is not None:
                break
        if off is None:
            zero += len(live)
            break
        i, j = off
        b = a[i][j]
        rest = [k for k in live if k not in (i, j)]
        old = {(k, l): a[k][l] for k in rest for l in rest}
        ci = {k: a[k][i] for k in rest}
        cj = {k: a[k][j] for k in rest}
        for k in rest:
            for l in rest:
                a[k][l] = old[(k, l)] - (ci[k] * cj[l] + cj[k] * ci[l]) / b
        pos += 1
        neg += 1
        live.remove(i)
        live.remove(j)
    return pos, neg, zero
