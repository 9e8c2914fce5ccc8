"""Even integer lattices with exact arithmetic.

Lattices are immutable values: a symmetric integer Gram matrix on the
standard basis. Vectors are integer coordinate tuples, dual vectors are
Fraction tuples. All derived data (determinant, signature, discriminant
group, short vectors) is computed exactly; nothing here uses floats.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .enumkernel import enumerate_bounded


class DegenerateLatticeError(ValueError):
    """Raised when an operation requires a nondegenerate Gram form."""


class IndefiniteError(ValueError):
    """Raised when definite enumeration is asked of an indefinite lattice."""


@dataclass(frozen=True)
class IntegerLattice:
    gram: tuple

    def __post_init__(self):
        g = linalg.mat_tuple(self.gram)
        object.__setattr__(self, "gram", g)
        for i, row in enumerate(g):
            if len(row) != len(g):
                raise ValueError("gram matrix must be square")
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram matrix must be symmetric")

    @property
    def rank(self):
        return len(self.gram)

    @property
    def is_even(self):
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def dot(self, x, y):
        return sum(x[i] * sum(self.gram[i][j] * y[j] for j in range(self.rank))
                   for i in range(self.rank))

    def square(self, x):
        return self.dot(x, x)

    def to_json(self):
        return {"rank": self.rank, "gram": [list(r) for r in self.gram]}

    @staticmethod
    def from_json(obj):
        return IntegerLattice(linalg.mat_tuple(obj["gram"]))


@dataclass(frozen=True)
class SignaturePair:
    positive: int
    negative: int

    @property
    def rank(self):
        return self.positive + self.negative

    def __iter__(self):
        return iter((self.positive, self.negative))


@dataclass(frozen=True)
class SublatticeEmbedding:
    ambient: IntegerLattice
    basis: tuple  # rows = generators in ambient coordinates

    def __post_init__(self):
        object.__setattr__(self, "basis", linalg.mat_tuple(self.basis))

    @property
    def rank(self):
        return len(self.basis)

    def induced_gram(self):
        b = self.basis
        g = self.ambient.gram
        bg = linalg.mat_mul(b, g)
        return linalg.mat_mul(bg, linalg.transpose(b))

    def lattice(self):
        return IntegerLattice(self.induced_gram())


# ---------------------------------------------------------------------------
# constructors for the named lattices

def from_adjacency(n, edges):
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = -2
    for i, j in edges:
        g[i][j] = g[j][i] = 1
    return IntegerLattice(linalg.mat_tuple(g))


def ade_edges(letter, n):
    """Dynkin tree edges for A_n / D_n / E_n on vertices 0..n-1.

    D_n: two fork vertices 0,1 joined to 2, then a chain 2-3-...-(n-1).
    E_n (n = 6,7,8): chain 0-1-...-(n-2) with vertex n-1 joined to vertex 2.
    """
    if letter == "A":
        return [(i, i + 1) for i in range(n - 1)]
    if letter == "D":
        if n < 4:
            raise ValueError("D_n needs n >= 4")
        return [(0, 2), (1, 2)] + [(i, i + 1) for i in range(2, n - 1)]
    if letter == "E":
        if n not in (6, 7, 8):
            raise ValueError("E_n needs n in {6,7,8}")
        return [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)]
    raise ValueError(f"unknown family {letter!r}")


def root_lattice(letter, n):
    return from_adjacency(n, ade_edges(letter, n))


def hyperbolic_plane():
    return IntegerLattice(((0, 1), (1, 0)))


def line(square):
    return IntegerLattice(((square,),))


def direct_sum(*lats):
    n = sum(l.rank for l in lats)
    g = [[0] * n for _ in range(n)]
    off = 0
    for l in lats:
        for i in range(l.rank):
            for j in range(l.rank):
                g[off + i][off + j] = l.gram[i][j]
        off += l.rank
    return IntegerLattice(linalg.mat_tuple(g))


def rescale(m, k):
    if k <= 0:
        raise ValueError("rescale factor must be positive")
    return IntegerLattice(linalg.mat_scale(m.gram, k))


# ---------------------------------------------------------------------------
# exact invariants

@functools.lru_cache(maxsize=None)
def det(m):
    return linalg.det_bareiss(m.gram)


@functools.lru_cache(maxsize=None)
def signature(m):
    pos, neg, zero = linalg.rational_diagonal_signature(m.gram)
    if zero:
        raise DegenerateLatticeError("lattice is degenerate")
    return SignaturePair(pos, neg)


def is_definite(m):
    if m.rank == 0:
        return True
    s = signature(m)
    return s.positive == 0 or s.negative == 0


@functools.lru_cache(maxsize=None)
def discriminant_group(m):
    """Invariant factors and dual-coset generators of discr(m).

    Returns (factors, gens): factors = (d_1, ..., d_k) with d_1 | d_2 | ...,
    all > 1, and gens[i] a Fraction row vector in lattice coordinates whose
    class generates the corresponding cyclic factor of M^vee / M.
    """
    if det(m) == 0:
        raise DegenerateLatticeError("lattice is degenerate")
    d, u, _v = linalg.smith_normal_form(m.gram)
    factors = []
    gens = []
    for i, di in enumerate(d):
        if di > 1:
            factors.append(di)
            gens.append(tuple(Fraction(x, di) for x in u[i]))
    order = [f for f in factors]
    # ascending divisibility is guaranteed by SNF; keep that order
    return tuple(order), tuple(gens)


def dual_basis(m):
    """Rows generate M^vee in lattice coordinates (= G^{-1})."""
    return linalg.invert_rational(m.gram)


# ---------------------------------------------------------------------------
# sublattices

def sublattice(amb, rows):
    return SublatticeEmbedding(amb, linalg.mat_tuple(rows))


def full_sublattice(amb):
    return SublatticeEmbedding(amb, linalg.identity(amb.rank))


def orthogonal_complement(amb, sub):
    """Saturated integer kernel of the pairing against sub (primitive)."""
    if sub.rank == 0:
        return full_sublattice(amb)
    pair = linalg.mat_mul(amb.gram, linalg.transpose(sub.basis))
    ker = linalg.kernel_basis(pair)
    return SublatticeEmbedding(amb, ker)


def saturate(amb, sub):
    if sub.rank == 0:
        return sub
    return SublatticeEmbedding(amb, linalg.saturation_basis(sub.basis))


def saturation_index(amb, sub):
    d, _u, _v = linalg.smith_normal_form(sub.basis)
    idx = 1
    for x in d:
        if x != 0:
            idx *= x
    return idx


def is_primitive(amb, sub):
    return saturation_index(amb, sub) == 1


def in_span(sub, vec):
    """Integer coordinates of vec in the Z-span of sub.basis, or None."""
    h, u = linalg.hnf_rows(sub.basis)
    res = list(vec)
    coeffs = [0] * len(sub.basis)
    for r, row in enumerate(h):
        piv = next((c for c, x in enumerate(row) if x != 0), None)
        if piv is None:
            break
        if res[piv] % row[piv] != 0:
            return None
        q = res[piv] // row[piv]
        coeffs[r] = q
        res = [x - q * y for x, y in zip(res, row)]
    if any(res):
        return None
    return tuple(linalg.vec_mat(coeffs, u))


# ---------------------------------------------------------------------------
# definite enumeration

def _definite_sign(m):
    if m.rank == 0:
        return 1
    s = signature(m)
    if s.positive and s.negative:
        raise IndefiniteError("enumeration requires a definite lattice")
    return 1 if s.negative == 0 else -1


def short_vectors(m, bound):
    """All nonzero v with |v^2| <= bound in a definite lattice.

    Returns a sorted list of (coords, square) with square carrying the sign
    of the lattice; both v and -v are listed.
    """
    sign = _definite_sign(m)
    g = m.gram if sign > 0 else linalg.mat_scale(m.gram, -1)
    hits = enumerate_bounded(g, bound)
    return [(c, sign * q) for c, q in hits if any(c)]


def roots(m):
    """Vectors of square -2 (negative definite m)."""
    return [c for c, q in short_vectors(m, 2) if q == -2]


def coset_min_square(m, center, start_bound=None):
    """Minimal |square| over the coset center + Z^n of a definite lattice.

    center is a rational vector in lattice coordinates. Returns
    (min_abs_square, attaining vectors as integer coordinate offsets v,
    meaning the lattice element center + v). For the zero coset the zero
    vector itself (square 0) is the minimum.
    """
    sign = _definite_sign(m)
    g = m.gram if sign > 0 else linalg.mat_scale(m.gram, -1)
    cen = tuple(Fraction(c) for c in center)
    # value at the rounded center gives a valid search bound
    anchor = [Fraction(-round(c)) + c for c in cen]
    b0 = sum(anchor[i] * g[i][j] * anchor[j]
             for i in range(m.rank) for j in range(m.rank))
    if start_bound is not None and Fraction(start_bound) > b0:
        b0 = Fraction(start_bound)
    hits = enumerate_bounded(g, b0, center=tuple(-c for c in cen))
    if not hits:
        raise AssertionError("coset enumeration missed its own anchor")
    best = min(Fraction(q) for _c, q in hits)
    attain = [c for c, q in hits if Fraction(q) == best]
    if sign < 0:
        best = -best
    best = int(best) if Fraction(best).denominator == 1 else best
    return best, attain


# ---------------------------------------------------------------------------
# root systems

ADE_ROOT_COUNTS = {"A": lambda n: n * (n + 1), "D": lambda n: 2 * n * (n - 1),
                   "E": lambda n: {6: 72, 7: 126, 8: 240}[n]}


def _component_label(verts, adj):
    n = len(verts)
    degs = sorted(sum(1 for w in verts if w in adj[v]) for v in verts)
    if not degs or degs[-1] <= 2:
        return ("A", n)
    deg3 = [v for v in verts if sum(1 for w in verts if w in adj[v]) == 3]
    if len(deg3) != 1:
        raise ValueError("not a simply laced Dynkin tree")
    b = deg3[0]
    arms = []
    for start in [w for w in verts if w in adj[b]]:
        ln = 1
        prev, cur = b, start
        while True:
            nxt = [w for w in verts if w in adj[cur] and w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            ln += 1
        arms.append(ln)
    arms.sort()
    if arms == [1, 1, n - 3]:
        return ("D", n)
    if arms == [1, 2, n - 4] and n in (6, 7, 8):
        return ("E", n)
    raise ValueError(f"unrecognized tree with arms {arms}")


def maximal_root_sublattice(m):
    """ADE decomposition of the (-2)-root system of a negative definite m.

    Returns a list of (label, simple_roots) sorted canonically by
    (letter A<D<E, index, simple-root coordinates); label = ("A", 3) etc.
    """
    if m.rank == 0:
        return []
    rts = roots(m)
    if not rts:
        return []
    # deterministic generic functional: weights (1, B, B^2, ...) exceed the
    # coordinate range so no root evaluates to zero
    bnd = 2 * max(abs(x) for v in rts for x in v) + 1
    weights = [bnd ** i for i in range(m.rank)]

    def f(v):
        return sum(w * x for w, x in zip(weights, v))

    pos = [v for v in rts if f(v) > 0]
    posset = set(pos)
    simple = []
    for v in pos:
        if not any(tuple(a - b for a, b in zip(v, u)) in posset for u in pos if u != v):
            simple.append(v)
    adj = {v: set() for v in simple}
    for i, v in enumerate(simple):
        for u in simple[i + 1:]:
            if m.dot(v, u) != 0:
                adj[v].add(u)
                adj[u].add(v)
    seen = set()
    comps = []
    for v in simple:
        if v in seen:
            continue
        stack = [v]
        comp = []
        while stack:
            w = stack.pop()
            if w in seen:
                continue
            seen.add(w)
            comp.append(w)
            stack.extend(adj[w] - seen)
        comps.append(comp)
    out = []
    for comp in comps:
        label = _component_label(comp, adj)
        out.append((label, tuple(sorted(comp))))
    out.sort(key=lambda t: (t[0][0], t[0][1], t[1]))
    return out


def root_multiset(m):
    return sorted(lbl for lbl, _ in maximal_root_sublattice(m))


# ---------------------------------------------------------------------------
# overlattices

def overlattice(m, glue_vectors):
    """Finite-index overlattice of m generated by rational glue vectors.

    glue_vectors are Fraction rows in m's coordinates. Returns
    (new_lattice, basis) where basis rows express the new basis in old
    (rational) coordinates; raises if the result is not integral/even.
    """
    import math

    n = m.rank
    denom = 1
    for v in glue_vectors:
        for x in v:
            denom = math.lcm(denom, Fraction(x).denominator)
    rows = []
    for i in range(n):
        rows.append([denom if j == i else 0 for j in range(n)])
    for v in glue_vectors:
        rows.append([int(Fraction(x) * denom) for x in v])
    h, _u = linalg.hnf_rows(linalg.mat_tuple(rows))
    basis = [r for r in h if any(r)][:n]
    if len(basis) != n:
        raise ValueError("glue vectors do not preserve rank")
    b = tuple(tuple(Fraction(x, denom) for x in row) for row in basis)
    gram = []
    for i in range(n):
        grow = []
        for j in range(n):
            val = sum(b[i][k] * m.gram[k][l] * b[j][l] for k in range(n) for l in range(n))
            if val.denominator != 1:
                raise ValueError("glue vectors are not integral for the form")
            grow.append(int(val))
        gram.append(grow)
    lat = IntegerLattice(linalg.mat_tuple(gram))
    return lat, b


def coset_min_square_capped(m, center, cap):
    """Minimal |square| over center + Z^n if it is <= cap, else None.

    Only enumerates up to the cap, so testing whether a class carries a
    root (-2) or a conic class (-4) stays cheap on large-rank lattices.
    """
    sign = _definite_sign(m)
    g = m.gram if sign > 0 else linalg.mat_scale(m.gram, -1)
    cen = tuple(Fraction(c) for c in center)
    hits = enumerate_bounded(g, cap, center=tuple(-c for c in cen))
    vals = [Fraction(q) for _c, q in hits]
    if not any(cen):
        vals = [v for v in vals if v != 0]
    if not vals:
        return None
    best = min(vals)
    if sign < 0:
        best = -best
    return int(best) if Fraction(best).denominator == 1 else best
