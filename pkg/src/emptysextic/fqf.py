"""Finite quadratic forms (discriminant forms) and Nikulin gluing.

A form lives on a finite abelian group presented by generator orders
(d_1, ..., d_k); q takes values in Q/2Z, the polar pairing b in Q/Z.
Elements are digit tuples mod the orders. For group-theoretic work the
module also exposes integer-scaled numpy tables over all elements.

Conventions: q values are normalized to [0, 2), b values to [0, 1).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import lattice as lat
from . import linalg


def _norm2(x):
    f = Fraction(x) % 2
    return f


def _norm1(x):
    return Fraction(x) % 1


@dataclass(frozen=True)
class FiniteQuadraticForm:
    orders: tuple        # generator orders, each > 1
    qvals: tuple         # q(g_i) in Q/2Z
    bmat: tuple          # b(g_i, g_j) in Q/Z, full symmetric matrix

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(d) for d in self.orders))
        object.__setattr__(self, "qvals", tuple(_norm2(x) for x in self.qvals))
        object.__setattr__(self, "bmat",
                           tuple(tuple(_norm1(x) for x in row) for row in self.bmat))
        k = len(self.orders)
        if len(self.qvals) != k or len(self.bmat) != k:
            raise ValueError("inconsistent generator data")
        for i in range(k):
            if self.bmat[i][i] != _norm1(self.qvals[i]):
                raise ValueError("b(g,g) must equal q(g) mod 1")
            for j in range(k):
                if self.bmat[i][j] != self.bmat[j][i]:
                    raise ValueError("b must be symmetric")

    # -- basic structure ---------------------------------------------------

    @property
    def ngens(self):
        return len(self.orders)

    @property
    def size(self):
        return math.prod(self.orders)

    def normalize(self, el):
        return tuple(a % d for a, d in zip(el, self.orders))

    def zero(self):
        return (0,) * self.ngens

    def add(self, x, y):
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def neg(self, x):
        return tuple((-a) % d for a, d in zip(x, self.orders))

    def smul(self, n, x):
        return tuple((n * a) % d for a, d in zip(x, self.orders))

    def gen(self, i):
        return tuple(1 if j == i else 0 for j in range(self.ngens))

    def element_order(self, x):
        o = 1
        for a, d in zip(x, self.orders):
            if a:
                o = math.lcm(o, d // math.gcd(a, d))
        return o

    def q(self, x):
        x = self.normalize(x)
        total = Fraction(0)
        for i, a in enumerate(x):
            if a:
                total += a * a * self.qvals[i]
        for i in range(self.ngens):
            if not x[i]:
                continue
            for j in range(i + 1, self.ngens):
                if x[j]:
                    total += 2 * x[i] * x[j] * self.bmat[i][j]
        return _norm2(total)

    def b(self, x, y):
        x = self.normalize(x)
        y = self.normalize(y)
        total = Fraction(0)
        for i, a in enumerate(x):
            if not a:
                continue
            for j, c in enumerate(y):
                if c:
                    total += a * c * self.bmat[i][j]
        return _norm1(total)

    # -- elements, indexed -------------------------------------------------

    def all_elements(self):
        els = [()]
        for d in self.orders:
            els = [e + (a,) for e in els for a in range(d)]
        return els

    def exponent(self):
        return math.lcm(*self.orders) if self.orders else 1

    # -- integer-scaled tables for fast group work -------------------------

    @property
    def scale(self):
        return int(math.lcm(*(d * d for d in self.orders))) if self.orders else 1

    def tables(self):
        return _tables(self)

    def is_nondegenerate(self):
        """b induces an isomorphism onto the character group."""
        if not self.orders:
            return True
        t = self.tables()
        # x is in the radical iff b(x, g_j) = 0 for all j
        rad = np.all(t.bgen == 0, axis=1)
        return int(rad.sum()) == 1

    def gauss_sum(self, mult=1):
        """Sum over the group of exp(pi*i*mult*q(x)), exactly bucketed by angle."""
        t = self.tables()
        s = self.scale
        vals = (mult * t.qint) % (2 * s)
        buckets = np.bincount(vals, minlength=2 * s)
        re = 0.0
        im = 0.0
        for a, cnt in enumerate(buckets):
            if cnt:
                re += cnt * math.cos(math.pi * a / s)
                im += cnt * math.sin(math.pi * a / s)
        return complex(re, im)

    def signature_mod8(self):
        """Exponent sigma with Gauss sum = sqrt(|A|) * exp(2*pi*i*sigma/8)."""
        g = self.gauss_sum()
        mag = math.sqrt(self.size)
        best = None
        for sig in range(8):
            target = complex(mag * math.cos(math.pi * sig / 4),
                             mag * math.sin(math.pi * sig / 4))
            err = abs(g - target)
            if best is None or err < best[1]:
                best = (sig, err)
        if best[1] > 1e-6 * max(1.0, mag):
            raise ArithmeticError("degenerate form has no Milgram signature")
        return best[0]

    def to_json(self):
        return {
            "orders": list(self.orders),
            "q": [f"{v.numerator}/{v.denominator} mod 2" for v in self.qvals],
            "b": [[f"{v.numerator}/{v.denominator}" for v in row] for row in self.bmat],
        }


class _Tables:
    """Vectorized element tables: digits, q, pairings (integer scaled)."""

    def __init__(self, form):
        self.form = form
        k = form.ngens
        s = form.scale
        orders = np.array(form.orders, dtype=np.int64)
        n = form.size
        digits = np.zeros((n, k), dtype=np.int64)
        if k:
            reps = 1
            for i in range(k - 1, -1, -1):
                d = form.orders[i]
                digits[:, i] = (np.arange(n) // reps) % d
                reps *= d
        self.digits = digits
        self.orders = orders
        self.radix = np.ones(k, dtype=np.int64)
        for i in range(k - 2, -1, -1):
            self.radix[i] = self.radix[i + 1] * form.orders[i + 1]
        if k:
            qint = np.array([int(v * s) for v in form.qvals], dtype=np.int64)
            bint = np.array([[int(v * s) for v in row] for row in form.bmat],
                            dtype=np.int64)
            wq = bint.copy()
            np.fill_diagonal(wq, qint)
            # q over all elements: diag uses q, off-diag uses b
            tmp = digits @ wq
            self.qint = np.einsum("ij,ij->i", tmp, digits) % (2 * s)
            self.bgen = (digits @ bint) % s     # b(x, g_j) * scale
        else:
            self.qint = np.zeros(1, dtype=np.int64)
            self.bgen = np.zeros((1, 0), dtype=np.int64)
        ordmat = np.zeros((n,), dtype=np.int64)
        if k:
            o = np.ones(n, dtype=np.int64)
            for i in range(k):
                d = form.orders[i]
                a = digits[:, i]
                g = np.gcd(a, d)
                oi = np.where(a > 0, d // np.maximum(g, 1), 1)
                o = np.lcm(o, oi)
            ordmat = o
        else:
            ordmat = np.ones(1, dtype=np.int64)
        self.element_order = ordmat

    def index_of(self, el):
        return int(np.dot(np.array(el, dtype=np.int64), self.radix))

    def index_rows(self, rows):
        return rows @ self.radix


@functools.lru_cache(maxsize=None)
def _tables(form):
    return _Tables(form)


TRIVIAL_FORM = FiniteQuadraticForm((), (), ())


# ---------------------------------------------------------------------------
# constructors

def discriminant_form(m):
    """Discriminant form of an even nondegenerate lattice."""
    if not m.is_even:
        raise ValueError("discriminant form needs an even lattice")
    factors, gens = lat.discriminant_group(m)
    g = m.gram
    n = m.rank

    def pair(x, y):
        return sum(Fraction(x[i]) * g[i][j] * Fraction(y[j])
                   for i in range(n) for j in range(n))

    qv = [_norm2(pair(v, v)) for v in gens]
    bm = [[_norm1(pair(v, w)) for w in gens] for v in gens]
    form = FiniteQuadraticForm(tuple(factors), tuple(qv), linalg.mat_tuple(bm))
    return form, gens


def orthogonal_sum(q1, q2):
    orders = q1.orders + q2.orders
    qv = q1.qvals + q2.qvals
    k1, k2 = q1.ngens, q2.ngens
    bm = [[Fraction(0)] * (k1 + k2) for _ in range(k1 + k2)]
    for i in range(k1):
        for j in range(k1):
            bm[i][j] = q1.bmat[i][j]
    for i in range(k2):
        for j in range(k2):
            bm[k1 + i][k1 + j] = q2.bmat[i][j]
    return FiniteQuadraticForm(orders, qv, linalg.mat_tuple(bm))


def p_part(form, p):
    """The p-primary part, with its embedding into form.

    Returns (p_form, lift) where lift maps p_form generators to elements
    of form.
    """
    gens = []
    orders = []
    for i, d in enumerate(form.orders):
        a = 1
        while d % p == 0:
            a *= p
            d //= p
        if a > 1:
            m = form.orders[i] // a    # odd cofactor; m * g_i has order a = p^v
            gens.append(form.smul(m, form.gen(i)))
            orders.append(a)
    qv = [form.q(x) for x in gens]
    bm = [[form.b(x, y) for y in gens] for x in gens]
    return FiniteQuadraticForm(tuple(orders), tuple(qv), linalg.mat_tuple(bm)), tuple(gens)


def primes_of(form):
    ps = set()
    for d in form.orders:
        dd = d
        for p in range(2, dd + 1):
            while dd % p == 0:
                ps.add(p)
                dd //= p
            if p * p > dd and dd > 1:
                ps.add(dd)
                break
    return tuple(sorted(ps))


def negate(form):
    return FiniteQuadraticForm(form.orders,
                               tuple(-v for v in form.qvals),
                               tuple(tuple(-x for x in row) for row in form.bmat))


# ---------------------------------------------------------------------------
# subgroups

@dataclass(frozen=True)
class FqfSubgroup:
    form: FiniteQuadraticForm
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators",
                           tuple(self.form.normalize(g) for g in self.generators))

    @functools.cached_property
    def elements(self):
        seen = {self.form.zero()}
        frontier = [self.form.zero()]
        while frontier:
            x = frontier.pop()
            for g in self.generators:
                y = self.form.add(x, g)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return frozenset(seen)

    @property
    def order(self):
        return len(self.elements)

    def exponent(self):
        e = 1
        for x in self.elements:
            e = math.lcm(e, self.form.element_order(x))
        return e

    def is_isotropic(self):
        return all(self.form.q(x) == 0 for x in self.elements)

    def contains(self, x):
        return self.form.normalize(x) in self.elements


def orthogonal_subgroup(form, sub):
    """Elements pairing to 0 (mod 1) with every element of sub."""
    t = form.tables()
    s = form.scale
    gens = list(sub.generators)
    if not gens:
        mask = np.ones(form.size, dtype=bool)
    else:
        rows = np.array(gens, dtype=np.int64)
        bint = np.array([[int(v * s) for v in row] for row in form.bmat], dtype=np.int64)
        pair = (t.digits @ bint @ rows.T) % s
        mask = np.all(pair == 0, axis=1)
    els = [tuple(int(a) for a in t.digits[i]) for i in np.nonzero(mask)[0]]
    return els


def quotient_form(form, sub):
    """The induced form on sub^perp / sub (sub isotropic).

    Returns (qform, proj, lift): proj maps an element of sub^perp (tuple in
    form) to its class (tuple in qform); lift does the opposite.
    """
    from itertools import product as _prod

    if not sub.is_isotropic():
        raise ValueError("quotient form needs an isotropic subgroup")
    perp = orthogonal_subgroup(form, sub)
    perpset = set(perp)
    for x in sub.elements:
        if x not in perpset:
            raise ValueError("isotropic subgroup must pair trivially with itself")
    # canonical coset representative for each element of perp
    coset_of = {}
    subels = sorted(sub.elements)
    n_cosets = 0
    for x in sorted(perp):
        if x in coset_of:
            continue
        n_cosets += 1
        for s0 in subels:
            coset_of[form.add(x, s0)] = x

    # greedy generating set for perp/sub
    gens = []
    span = {form.zero()}
    for x in sorted(perp, key=lambda e: (-form.element_order(e), e)):
        if x in span:
            continue
        gens.append(x)
        frontier = list(span)
        while frontier:
            y = frontier.pop()
            z = form.add(y, x)
            if z not in span:
                span.add(z)
                frontier.append(z)
        if len({coset_of[e] for e in span}) == n_cosets:
            break
    r = len(gens)
    if r == 0 or n_cosets == 1:
        return TRIVIAL_FORM, (lambda x: ()), (lambda c: form.zero())

    # relation lattice {(a_i) : sum a_i gens_i in sub} inside Z^r
    bound = [form.element_order(g) for g in gens]
    rel = []
    for tupla in _prod(*[range(b) for b in bound]):
        acc = form.zero()
        for a, g in zip(tupla, gens):
            if a:
                acc = form.add(acc, form.smul(a, g))
        if acc in sub.elements:
            rel.append(list(tupla))
    relrows = rel + [[bound[i] if j == i else 0 for j in range(r)] for i in range(r)]
    d, _u, v = linalg.smith_normal_form(linalg.mat_tuple(relrows))
    vinv = linalg.invert_unimodular(v)
    # in coordinates y = x*v the relation lattice becomes diag(d); the class
    # generating the j-th cyclic factor is row j of v^{-1} applied to gens
    new_orders = []
    new_gens = []
    for j, dj in enumerate(d):
        if dj > 1:
            g = form.zero()
            for i in range(r):
                if vinv[j][i] % bound[i]:
                    g = form.add(g, form.smul(vinv[j][i], gens[i]))
            new_gens.append(g)
            new_orders.append(dj)
    qv = [form.q(g) for g in new_gens]
    bm = [[form.b(x, y) for y in new_gens] for x in new_gens]
    qform = FiniteQuadraticForm(tuple(new_orders), tuple(qv), linalg.mat_tuple(bm))

    def lift(c):
        g = form.zero()
        for a, gg in zip(c, new_gens):
            if a:
                g = form.add(g, form.smul(a, gg))
        return g

    idx = {}
    for tupla in _prod(*[range(o) for o in new_orders]):
        key = coset_of[lift(tupla)]
        if key in idx:
            raise AssertionError("quotient presentation is not faithful")
        idx[key] = tupla

    def proj(x):
        x = form.normalize(x)
        if x not in coset_of:
            raise ValueError("element is not orthogonal to the kernel")
        return idx[coset_of[x]]

    if len(idx) != n_cosets:
        raise AssertionError("quotient presentation failed to cover all cosets")
    return qform, proj, lift


# ---------------------------------------------------------------------------
# gluing (finite index extensions via isotropic subgroups)

def _lift_class(gens, el):
    """Rational ambient vector representing a discriminant class."""
    n = len(gens[0]) if gens else 0
    out = [Fraction(0)] * n
    for a, g in zip(el, gens):
        if a:
            for i in range(n):
                out[i] += a * g[i]
    return tuple(out)


def glue_extension(m, sub):
    """Even overlattice of m determined by an isotropic subgroup of discr m.

    Returns (overlattice, basis) with basis rows rational in m-coordinates.
    """
    if not sub.is_isotropic():
        raise ValueError("gluing requires an isotropic subgroup")
    form, gens = discriminant_form(m)
    if form.orders != sub.form.orders or form.qvals != sub.form.qvals:
        raise ValueError("subgroup does not live in discr(m)")
    glue = [_lift_class(gens, g) for g in sub.generators]
    out, basis = lat.overlattice(m, glue)
    if not out.is_even:
        raise AssertionError("isotropic gluing must stay even")
    return out, basis


def graph_subgroup(form1, form2, k_sub, psi):
    """The graph of psi: K -> form2 inside form1 (+) form2."""
    total = orthogonal_sum(form1, form2)
    gens = []
    for g in k_sub.generators:
        gens.append(tuple(g) + tuple(psi(g)))
    return FqfSubgroup(total, tuple(gens))


def glue_pair(m1, m2, k_sub, psi):
    """Extension of m1 (+) m2 by the graph of an anti-isometry psi on K.

    psi is a callable mapping elements of discr(m1) lying in k_sub to
    elements of discr(m2). Checks the anti-isometry condition on K.
    Returns (lattice, basis).
    """
    f1, _g1 = discriminant_form(m1)
    f2, _g2 = discriminant_form(m2)
    for x in k_sub.elements:
        y = psi(x)
        if _norm2(f1.q(x) + f2.q(y)) != 0:
            raise ValueError("psi is not an anti-isometry on K")
    for a in k_sub.generators:
        for b in k_sub.generators:
            if _norm1(f1.b(a, b) + f2.b(psi(a), psi(b))) != 0:
                raise ValueError("psi does not negate the pairing on K")
        # additivity check on generators
    big = lat.direct_sum(m1, m2)
    form_big, gens_big = discriminant_form(big)
    graph = graph_subgroup(f1, f2, k_sub, psi)
    # express graph generators in discr(big) digits: discr(big) generators
    # need not be the concatenation of the two factors, so relift by value.
    glue = []
    for g in k_sub.generators:
        v1 = _lift_class(_g1, g)
        v2 = _lift_class(_g2, psi(g))
        glue.append(tuple(v1) + tuple(v2))
    out, basis = lat.overlattice(big, glue)
    if not out.is_even:
        raise AssertionError("gluing by an anti-isometry graph must stay even")
    return out, basis


def extend_involution(m1, m2, k_sub, psi):
    """Matrix of (id on m1) + (-id on m2) on the glued lattice.

    Requires K of exponent at most 2; returns (glued, basis, theta) where
    theta is an integer matrix in the glued basis.
    """
    if k_sub.exponent() > 2:
        raise ValueError("involution extension needs an exponent-2 kernel")
    glued, basis = glue_pair(m1, m2, k_sub, psi)
    n1 = m1.rank
    n = glued.rank
    diag = [[(1 if i == j else 0) if j < n1 else (-1 if i == j else 0)
             for j in range(n)] for i in range(n)]
    binv = linalg.invert_rational(basis)
    theta_rat = linalg.mat_mul(linalg.mat_mul(basis, diag), binv)
    theta = []
    for row in theta_rat:
        new = []
        for x in row:
            fx = Fraction(x)
            if fx.denominator != 1:
                raise AssertionError("involution failed to extend integrally")
            new.append(int(fx))
        theta.append(new)
    return glued, basis, linalg.mat_tuple(theta)


def subgroup_form(form, gens):
    """Present the subgroup generated by gens as a form of its own.

    Returns (subform, lifts): lifts[i] is the element of form realizing the
    i-th generator of subform. Degenerate restrictions are allowed.
    """
    from itertools import product as _prod

    els = FqfSubgroup(form, tuple(gens)).elements
    size = len(els)
    if size == 1:
        return TRIVIAL_FORM, ()
    picked = []
    span = {form.zero()}
    for x in sorted(els, key=lambda e: (-form.element_order(e), e)):
        if x in span:
            continue
        picked.append(x)
        frontier = list(span)
        while frontier:
            y = frontier.pop()
            z = form.add(y, x)
            if z not in span:
                span.add(z)
                frontier.append(z)
        if len(span) == size:
            break
    r = len(picked)
    bound = [form.element_order(g) for g in picked]
    rel = []
    for tupla in _prod(*[range(b) for b in bound]):
        acc = form.zero()
        for a, g in zip(tupla, picked):
            if a:
                acc = form.add(acc, form.smul(a, g))
        if acc == form.zero():
            rel.append(list(tupla))
    relrows = rel + [[bound[i] if j == i else 0 for j in range(r)] for i in range(r)]
    d, _u, v = linalg.smith_normal_form(linalg.mat_tuple(relrows))
    vinv = linalg.invert_unimodular(v)
    new_orders = []
    lifts = []
    for j, dj in enumerate(d):
        if dj > 1:
            g = form.zero()
            for i in range(r):
                if vinv[j][i] % bound[i]:
                    g = form.add(g, form.smul(vinv[j][i], picked[i]))
            lifts.append(g)
            new_orders.append(dj)
    qv = [form.q(g) for g in lifts]
    bm = [[form.b(x, y) for y in lifts] for x in lifts]
    sub = FiniteQuadraticForm(tuple(new_orders), tuple(qv), linalg.mat_tuple(bm))
    if sub.size != size:
        raise AssertionError("subgroup presentation size mismatch")
    return sub, tuple(lifts)
