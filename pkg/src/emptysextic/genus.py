"""Genus symbols, existence/uniqueness in a genus, and images of isometry
groups in discriminant-form automorphisms.

The local theory happens over Z_(p) with exact rational arithmetic: Jordan
decompositions, spinor norms of local orthogonal groups (computed from
first principles via reflective-vector profiles), and the strong
approximation bookkeeping that turns these into the exact image of
O(M) -> Aut(discr M) for indefinite rank >= 3. Every computed image is
cross-certified against explicitly harvested lattice isometries; the two
must agree or the computation aborts.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import fqf, groups, linalg
from . import lattice as lat


class UnknownVerdict(RuntimeError):
    """A computation could not certify its answer; callers must not guess."""


# ---------------------------------------------------------------------------
# elementary number theory

def valuation(x, p):
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    x = abs(x)
    num, den = (x.numerator, x.denominator) if isinstance(x, Fraction) else (x, 1)
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(x, p):
    """x / p^v(x) as a Fraction."""
    return Fraction(x) / Fraction(p) ** valuation(x, p)


def legendre(a, p):
    a = a % p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def hilbert_symbol(a, b, p):
    """Hilbert symbol (a,b)_p for rationals a,b; p a prime or 0 for R."""
    a = Fraction(a)
    b = Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol needs nonzero entries")
    if p == 0:
        return -1 if a < 0 and b < 0 else 1
    alpha = valuation(a, p)
    beta = valuation(b, p)
    u = unit_part(a, p)
    v = unit_part(b, p)
    if p != 2:
        un = (u.numerator * pow(u.denominator, p - 2, p)) % p
        vn = (v.numerator * pow(v.denominator, p - 2, p)) % p
        res = 1
        if beta % 2:
            res *= legendre(un, p)
        if alpha % 2:
            res *= legendre(vn, p)
        if (alpha % 2) and (beta % 2) and legendre(-1 % p, p) == -1:
            res *= -1
        return res
    # p = 2: units mod 8 decide
    un = (u.numerator * pow(u.denominator, 2, 8)) % 8
    vn = (v.numerator * pow(v.denominator, 2, 8)) % 8
    eps_u = ((un - 1) // 2) % 2
    eps_v = ((vn - 1) // 2) % 2
    om_u = ((un * un - 1) // 8) % 2
    om_v = ((vn * vn - 1) // 8) % 2
    e = eps_u * eps_v + alpha * om_v + beta * om_u
    return -1 if e % 2 else 1


def _diagonalize_rational(gram):
    """Rational congruence diagonalization; returns the diagonal entries."""
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    diag = []
    live = list(range(n))
    while live:
        piv = next((i for i in live if a[i][i] != 0), None)
        if piv is None:
            i = live[0]
            j = next(jj for jj in live[1:] if a[i][jj] != 0)
            for l in live:
                a[i][l] += a[j][l]
            for l in live:
                a[l][i] += a[l][j]
            continue
        d = a[piv][piv]
        diag.append(d)
        live.remove(piv)
        coeff = {k: a[k][piv] / d for k in live}
        for k in live:
            for l in live:
                a[k][l] -= coeff[k] * a[piv][l]
        for k in live:
            a[k][piv] = a[piv][k] = Fraction(0)
    return diag


def hasse_invariant(gram, p):
    """Hasse invariant as product of Hilbert symbols over a diagonalization."""
    diag = _diagonalize_rational(gram)
    res = 1
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            res *= hilbert_symbol(diag[i], diag[j], p)
    return res


def represents_rational(gram, r):
    """Does the quadratic space over Q represent the nonzero rational r?

    Decided by Hasse-Minkowski through local checks; small ranks handled
    via isotropy of the augmented form.
    """
    r = Fraction(r)
    if r == 0:
        raise ValueError("use isotropy tests for zero")
    diag = _diagonalize_rational(gram)
    n = len(diag)
    if n == 0:
        return False
    pos = sum(1 for d in diag if d > 0)
    neg = n - pos
    # real place
    if r > 0 and pos == 0:
        return False
    if r < 0 and neg == 0:
        return False
    # augmented form <diag, -r> must be isotropic at every finite place
    aug = diag + [-r]
    primes = set()
    for x in aug:
        primes.add(2)
        for q in _prime_factors(abs(x.numerator) * x.denominator):
            primes.add(q)
    return all(_isotropic_local(aug, p) for p in primes)


def _prime_factors(n):
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def _isotropic_local(diag, p):
    """Is the diagonal rational form isotropic over Q_p (p prime)?"""
    n = len(diag)
    if any(d == 0 for d in diag):
        return True
    if n <= 1:
        return False
    if n == 2:
        # a x^2 + b y^2 isotropic iff -b/a is a square
        return _is_local_square(-diag[1] / diag[0], p)
    if n == 3:
        a, b, c = diag
        return hilbert_symbol(-b / a, -c / a, p) == 1
    if n == 4:
        # isotropic iff some class is represented by both binary halves
        classes = _square_classes(p)
        for r in classes:
            if _binary_represents(diag[0], diag[1], r, p) and \
               _binary_represents(-diag[2], -diag[3], r, p):
                return True
        return False
    return True  # rank >= 5 over Q_p is always isotropic


def _is_local_square(x, p):
    x = Fraction(x)
    if x == 0:
        return True
    v = valuation(x, p)
    if v % 2:
        return False
    u = unit_part(x, p)
    if p != 2:
        un = (u.numerator * pow(u.denominator, p - 2, p)) % p
        return legendre(un, p) == 1
    un = (u.numerator * pow(u.denominator, 2, 8)) % 8
    return un == 1


def _square_classes(p):
    if p == 2:
        return [Fraction(x) for x in (1, 3, 5, 7, 2, 6, 10, 14)]
    ns = next(x for x in range(2, p) if legendre(x, p) == -1)
    return [Fraction(1), Fraction(ns), Fraction(p), Fraction(p * ns)]


def _binary_represents(a, b, r, p):
    """Does a x^2 + b y^2 represent r over Q_p?"""
    return _isotropic_local([Fraction(a), Fraction(b), -Fraction(r)], p)


# ---------------------------------------------------------------------------
# p-adic Jordan decomposition (exact, over Z_(p))

@dataclass(frozen=True)
class JordanBlock:
    scale: int            # the power v: block is p^v * (unimodular)
    gram: tuple           # the unimodular part, rational entries in Z_(p)

    @property
    def rank(self):
        return len(self.gram)


def jordan_decomposition(m, p):
    """Jordan blocks of m over Z_(p), sorted by scale.

    Returns a list of JordanBlock; the orthogonal sum of p^scale * gram
    is Z_(p)-congruent to m.gram.
    """
    n = m.rank
    a = [[Fraction(x) for x in row] for row in m.gram]
    live = list(range(n))
    pieces = []   # (scale, [[...]]) with 1x1 or 2x2 unimodular-over-Z_(p) gram

    def minval():
        best = None
        where = None
        for ii, i in enumerate(live):
            for j in live[ii:]:
                x = a[i][j]
                if x != 0:
                    v = valuation(x, p)
                    if best is None or v < best:
                        best = v
                        where = (i, j)
        return best, where

    while live:
        v, (i, j) = minval()
        diag_ok = None
        for d in live:
            if a[d][d] != 0 and valuation(a[d][d], p) == v:
                diag_ok = d
                break
        if diag_ok is None and p != 2:
            # make a diagonal entry of valuation v: e_i += e_j (or -=)
            for sign in (1, -1):
                cand = a[i][i] + a[j][j] + 2 * sign * a[i][j]
                if cand != 0 and valuation(cand, p) == v:
                    for l in range(n):
                        a[i][l] += sign * a[j][l]
                    for l in range(n):
                        a[l][i] += sign * a[l][j]
                    diag_ok = i
                    break
            assert diag_ok is not None, "odd-p pivot must exist"
        if diag_ok is not None:
            piv = diag_ok
            d = a[piv][piv]
            live.remove(piv)
            coeff = {k: a[k][piv] / d for k in live}
            for k in live:
                for l in live:
                    a[k][l] -= coeff[k] * a[piv][l]
            for k in live:
                a[k][piv] = a[piv][k] = Fraction(0)
            pieces.append((v, [[d / Fraction(p) ** v]]))
            continue
        # p = 2 with strictly smaller off-diagonal valuation: 2x2 block
        bgram = [[a[i][i], a[i][j]], [a[i][j], a[j][j]]]
        live.remove(i)
        live.remove(j)
        det = bgram[0][0] * bgram[1][1] - bgram[0][1] * bgram[0][1]
        inv = [[bgram[1][1] / det, -bgram[0][1] / det],
               [-bgram[0][1] / det, bgram[0][0] / det]]
        for k in live:
            # subtract projection onto span(e_i, e_j)
            ci = a[k][i]
            cj = a[k][j]
            al = ci * inv[0][0] + cj * inv[1][0]
            be = ci * inv[0][1] + cj * inv[1][1]
            for l in live:
                a[k][l] -= al * a[i][l] + be * a[j][l]
        # fix symmetry for the removed pair and the self terms
        for k in live:
            a[k][i] = a[i][k] = a[k][j] = a[j][k] = Fraction(0)
        # recompute the symmetric part among live (projection is symmetric,
        # but the loop above altered rows only)
        for k in live:
            for l in live:
                if l < k:
                    a[k][l] = a[l][k]
        pv = Fraction(p) ** v
        pieces.append((v, [[x / pv for x in row] for row in bgram]))

    by_scale = {}
    for v, g in pieces:
        by_scale.setdefault(v, []).append(g)
    out = []
    for v in sorted(by_scale):
        gs = by_scale[v]
        size = sum(len(g) for g in gs)
        gram = [[Fraction(0)] * size for _ in range(size)]
        off = 0
        for g in gs:
            for ii in range(len(g)):
                for jj in range(len(g)):
                    gram[off + ii][off + jj] = g[ii][jj]
            off += len(g)
        out.append(JordanBlock(v, linalg.mat_tuple(gram)))
    return out

# ---------------------------------------------------------------------------
# genus symbols and genus equality

def _block_type2(block):
    """'I' (odd) or 'II' (even) for a 2-adic unimodular block."""
    for i in range(block.rank):
        if valuation(block.gram[i][i], 2) == 0:
            return "I"
    return "II"


def _det_class(x, p):
    """Unit class of the nonzero rational x at p: Legendre sign for odd p,
    the unit mod 8 for p = 2."""
    u = unit_part(x, p)
    if p != 2:
        un = (u.numerator * pow(u.denominator, p - 2, p)) % p
        return legendre(un, p)
    return (u.numerator * pow(u.denominator, 2, 8)) % 8


def _oddity(block):
    """Trace mod 8 of an odd 2-adic unimodular block (diagonalized part)."""
    diag = _diagonalize_rational(block.gram)
    total = 0
    for d in diag:
        if valuation(d, 2) == 0:
            u = unit_part(d, 2)
            total += (u.numerator * pow(u.denominator, 2, 8)) % 8
    return total % 8


def genus_symbol(m):
    """Conway-Sloane style local symbols, as structured data.

    Returns {"signature": (pos, neg), "local": {p: [(scale, rank, det_class,
    type, oddity), ...]}} where det_class is +-1 for odd p and the det unit
    mod 8 for p = 2; type and oddity are None for odd p.
    """
    sig = lat.signature(m)
    d = lat.det(m)
    out = {}
    for p in sorted(_prime_factors(2 * abs(d))):
        blocks = jordan_decomposition(m, p)
        loc = []
        for b in blocks:
            bd = linalg.det_bareiss([[Fraction(x) for x in row] for row in b.gram])
            if p == 2:
                typ = _block_type2(b)
                loc.append((b.scale, b.rank, _det_class(bd, 2), typ,
                            _oddity(b) if typ == "I" else None))
            else:
                loc.append((b.scale, b.rank, _det_class(bd, p), None, None))
        out[p] = loc
    return {"signature": (sig.positive, sig.negative), "local": out}


def format_genus_symbol(sym):
    """Human-readable text like '2: 1^+8 2^-1 ; 5: ...'."""
    parts = []
    for p, loc in sorted(sym["local"].items()):
        txt = []
        for scale, rank, detc, typ, odd in loc:
            if p == 2:
                base = f"{p ** scale}^{'+' if detc in (1, 7) else ''}{rank}"
                if typ == "I":
                    base += f"_{odd}"
                base += f"[{detc}]"
            else:
                base = f"{p ** scale}^{'+' if detc == 1 else '-'}{rank}"
            txt.append(base)
        parts.append(f"{p}: " + " ".join(txt))
    pos, neg = sym["signature"]
    return f"sig({pos},{neg}) " + " ; ".join(parts)


@functools.lru_cache(maxsize=None)
def _discr_form_cached(m):
    form, gens = fqf.discriminant_form(m)
    return form, tuple(gens)


@functools.lru_cache(maxsize=None)
def form_fingerprint(form):
    """Invariant pack used as an isomorphism prefilter.

    Orders multiset plus Gauss sums of every odd multiple of q restricted
    to each canonical subgroup m*A (the Kawauchi-Kojima flavored family);
    these see the scale layers at every prime.
    """
    import numpy as np

    key = [tuple(sorted(form.orders))]
    expo = form.exponent()
    t = form.tables()
    divisors = sorted({d for d in range(1, expo + 1) if expo % d == 0})
    s = form.scale
    # joint (element order, q value) census of the whole group
    census = {}
    for o, q in zip(t.element_order.tolist(), t.qint.tolist()):
        census[(o, q)] = census.get((o, q), 0) + 1
    key.append(tuple(sorted(census.items())))
    for d in divisors[1:]:
        # q-value census of the canonical subgroup d*A
        sub = (t.digits * d) % t.orders
        idx = np.unique(t.index_rows(sub))
        qv = t.qint[idx]
        buckets = {}
        for q in qv.tolist():
            buckets[q] = buckets.get(q, 0) + 1
        key.append((d, tuple(sorted(buckets.items()))))
    return tuple(key)


def is_isomorphic_forms(f1, f2, need_witness=False, node_cap=5_000_000):
    """Isomorphism verdict for finite quadratic forms.

    Negative verdicts come from genuine invariants (group structure, Gauss
    phase family); positive verdicts always carry an explicit witness found
    by backtracking. If invariants match but no witness is found within the
    budget, raises UnknownVerdict (never guesses).
    """
    if sorted(f1.orders) != sorted(f2.orders):
        return (False, None) if need_witness else False
    if form_fingerprint(f1) != form_fingerprint(f2):
        return (False, None) if need_witness else False
    w = groups.find_isometry(f1, f2, sign=1, node_cap=node_cap)
    if w is None:
        raise UnknownVerdict(
            "forms share all implemented invariants but no isometry was found; "
            "refusing to guess")
    return (True, w) if need_witness else True


def same_genus(m1, m2):
    """Even lattices lie in one genus iff signatures match and discriminant
    forms are isomorphic."""
    if m1.rank != m2.rank:
        return False
    if lat.signature(m1) != lat.signature(m2):
        return False
    f1, _ = _discr_form_cached(m1)
    f2, _ = _discr_form_cached(m2)
    return is_isomorphic_forms(f1, f2)


# ---------------------------------------------------------------------------
# existence of an even lattice with given signature and discriminant form

def _padding_classes_2(n0):
    """Det unit classes mod 8 achievable by an even unimodular 2-adic lattice
    of rank n0 (sums of U and V blocks)."""
    if n0 == 0:
        return {1}
    m = n0 // 2
    return {7, 3} if m % 2 else {1, 5}


def _cyclic_piece_form(p, k, eps):
    """The discriminant form of the p-adic lattice p^k<u> (p odd) whose det
    unit class is eps: a cyclic form of order p^k with even numerator of
    Legendre class eps."""
    s = p ** k
    for a in range(2, 2 * s, 2):
        if a % p and legendre(a, p) == eps:
            return fqf.FiniteQuadraticForm((s,), (Fraction(a, s),),
                                           ((Fraction(a, s) % 1,),))
    raise AssertionError("no cyclic piece value found")


def _piece_form_2(kind, scale, u=None):
    """Discriminant form of a standard 2-adic piece.

    kind "odd": <2^scale * u> (u odd, may be negative): cyclic of order
    2^scale with q = 1/(2^scale*u). kind "U"/"V": the even rank-2 blocks
    scaled by 2^scale. Returns (form, det_unit_class_mod_8).
    """
    s = 2 ** scale
    if kind == "odd":
        # q(dual gen) = 1/(2^k u) in Q_2/2Z; its 2-power-denominator
        # representative is (u^{-1} mod 2^{k+1}) / 2^k
        a = pow(u % (4 * s), -1, 2 * s)
        q = Fraction(a, s) % 2
        return (fqf.FiniteQuadraticForm((s,), (q,), ((q % 1,),)), u % 8)
    if kind == "U":
        b = Fraction(1, s)
        f = fqf.FiniteQuadraticForm((s, s), (Fraction(0), Fraction(0)),
                                    ((Fraction(0), b), (b, Fraction(0))))
        return (f, 7)
    if kind == "V":
        b = Fraction(1, s)
        qv = Fraction(2, s) % 2
        f = fqf.FiniteQuadraticForm((s, s), (qv, qv),
                                    ((qv % 1, b), (b, qv % 1)))
        return (f, 3)
    raise ValueError(kind)


def _scaled_piece_forms_2(scale, rank):
    """All multisets of standard 2-adic pieces at one scale: list of
    (form, det_unit_class) for total rank given."""
    units = [1, 3, 5, 7]
    out = []
    for npairs in range(rank // 2 + 1):
        odd_rank = rank - 2 * npairs
        for pair_kinds in itertools.combinations_with_replacement("UV", npairs):
            for uvec in itertools.combinations_with_replacement(units, odd_rank):
                frm = fqf.TRIVIAL_FORM
                cls = 1
                for kind in pair_kinds:
                    f, c = _piece_form_2(kind, scale)
                    frm = fqf.orthogonal_sum(frm, f)
                    cls = (cls * c) % 8
                for u in uvec:
                    f, c = _piece_form_2("odd", scale, u)
                    frm = fqf.orthogonal_sum(frm, f)
                    cls = (cls * c) % 8
                out.append((frm, cls))
    return out


@functools.lru_cache(maxsize=None)
def _realization_det_classes(qp_key, p):
    """Achievable det unit classes at p of p-adic lattices realizing the
    given p-primary discriminant form (rank = number of generators)."""
    orders, qvals, bflat = qp_key
    qp = fqf.FiniteQuadraticForm(
        orders, tuple(Fraction(a, b) for a, b in qvals),
        tuple(tuple(Fraction(a, b) for a, b in row) for row in bflat))
    by_scale = {}
    for d in orders:
        v = valuation(d, p)
        by_scale[v] = by_scale.get(v, 0) + 1
    classes = set()
    fp_target = form_fingerprint(qp)
    if p != 2:
        # per scale only the det class matters: two form candidates per scale
        scale_opts = []
        for v in sorted(by_scale):
            nk = by_scale[v]
            opts = []
            for eps in (1, -1):
                pieces = [_cyclic_piece_form(p, v, 1)] * (nk - 1) + \
                         [_cyclic_piece_form(p, v, eps)]
                frm = pieces[0]
                for extra in pieces[1:]:
                    frm = fqf.orthogonal_sum(frm, extra)
                opts.append((eps, frm))
            scale_opts.append(opts)
        for combo in itertools.product(*scale_opts):
            frm = fqf.TRIVIAL_FORM
            cls = 1
            for eps, piece in combo:
                cls *= eps
                frm = fqf.orthogonal_sum(frm, piece)
            if form_fingerprint(frm) != fp_target:
                continue
            if groups.find_isometry(frm, qp, sign=1) is None:
                continue
            classes.add(cls)
        return frozenset(classes)
    scale_opts = [_scaled_piece_forms_2(v, by_scale[v]) for v in sorted(by_scale)]
    # group candidates by det class; one witness search per class suffices
    pending = {}
    for combo in itertools.product(*scale_opts):
        frm = fqf.TRIVIAL_FORM
        cls = 1
        for piece, c in combo:
            frm = fqf.orthogonal_sum(frm, piece)
            cls = (cls * c) % 8
        if cls in classes or sorted(frm.orders) != sorted(qp.orders):
            continue
        if form_fingerprint(frm) != fp_target:
            continue
        pending.setdefault(cls, []).append(frm)
    for cls, cands in pending.items():
        for frm in cands:
            if groups.find_isometry(frm, qp, sign=1) is not None:
                classes.add(cls)
                break
    return frozenset(classes)


def _qp_key(qp):
    return (qp.orders,
            tuple((v.numerator, v.denominator) for v in qp.qvals),
            tuple(tuple((x.numerator, x.denominator) for x in row) for row in qp.bmat))


@functools.lru_cache(maxsize=None)
def exists_even_lattice(sig, form):
    """Is there an even lattice with this signature and discriminant form?

    Implements the standard arithmetic criteria: signature bounds, Milgram
    signature mod 8, per-prime generator bounds, and determinant matching
    against explicit local realizations of the p-primary parts.
    """
    tpos, tneg = sig.positive, sig.negative
    n = tpos + tneg
    if tpos < 0 or tneg < 0:
        return False
    if n == 0:
        return form.size == 1
    if form.signature_mod8() != (tpos - tneg) % 8:
        return False
    target_det = (-1) ** tneg * form.size
    for p in fqf.primes_of(form) + ((2,) if 2 not in fqf.primes_of(form) else ()):
        qp, _lift = fqf.p_part(form, p)
        lp = qp.ngens
        if n < lp:
            return False
        tau = _det_class(Fraction(target_det), p)
        if p == 2:
            n0 = n - lp
            if n0 % 2:
                return False
            pads = _padding_classes_2(n0)
            reals = _realization_det_classes(_qp_key(qp), 2)
            if not any((s * c) % 8 == tau for s in reals for c in pads):
                return False
        else:
            reals = _realization_det_classes(_qp_key(qp), p)
            if n > lp:
                if not reals:
                    return False
            else:
                if tau not in reals:
                    return False
    return True

# ---------------------------------------------------------------------------
# local spinor data: (det, spinor norm) images of local orthogonal groups
#
# Gamma_p := {+-1} x Q_p^x/(Q_p^x)^2 is encoded as an F2 vector space:
#   p odd: coordinates (det_sign, valuation mod 2, legendre_sign)   -> F2^3
#   p = 2: coordinates (det_sign, valuation mod 2, unit bit eps, unit bit om)
#          with eps = (u-1)/2, om = (u^2-1)/8 mod 2                 -> F2^4
# Sigma_p(L)  = image of O(L x Z_p) under (det, spin);
# Sigma_p#(L) = image of the subgroup acting trivially on discr(L)_p.
# Both are generated by reflective vectors, enumerated exactly through
# valuation profiles over the Jordan decomposition.

def _gamma_dim(p):
    return 4 if p == 2 else 3


def _gamma_coords(p, det_sign, spin):
    """F2 coordinates of (det_sign, spin) in Gamma_p."""
    spin = Fraction(spin)
    v = valuation(spin, p) % 2
    u = unit_part(spin, p)
    out = [0 if det_sign == 1 else 1, v]
    if p == 2:
        un = (u.numerator * pow(u.denominator, 2, 8)) % 8
        out.append(((un - 1) // 2) % 2)
        out.append(((un * un - 1) // 8) % 2)
    else:
        un = (u.numerator * pow(u.denominator, p - 2, p)) % p
        out.append(0 if legendre(un, p) == 1 else 1)
    return tuple(out)


def _f2_span(vectors, dim):
    """Row-reduced basis of the F2 span."""
    basis = []
    for v in vectors:
        v = list(v)
        for b in basis:
            piv = next(i for i, x in enumerate(b) if x)
            if v[piv]:
                v = [(x + y) % 2 for x, y in zip(v, b)]
        if any(v):
            basis.append(tuple(v))
    # normalize: sort by pivot
    basis.sort(key=lambda b: next(i for i, x in enumerate(b) if x))
    return tuple(basis)


def _f2_in_span(vec, basis):
    v = list(vec)
    for b in basis:
        piv = next(i for i, x in enumerate(b) if x)
        if v[piv]:
            v = [(x + y) % 2 for x, y in zip(v, b)]
    return not any(v)


def _block_value_sets(block, p, K):
    """Residues mod p^K represented by the scaled-away unimodular block.

    Returns (prim, full): boolean numpy arrays of length p^K, prim for
    values on primitive vectors, full for all vectors (including 0).
    """
    mod = p ** K
    prim = np.zeros(mod, dtype=bool)
    full = np.zeros(mod, dtype=bool)
    full[0] = True
    # decompose the unimodular block into 1x1 (and, for p=2, 2x2) pieces
    pieces = []
    has_u = False
    has_v = False
    g = [[Fraction(x) for x in row] for row in block.gram]
    n = len(g)
    live = list(range(n))
    while live:
        piv = None
        for i in live:
            if g[i][i] != 0 and valuation(g[i][i], p) == 0:
                piv = i
                break
        if piv is None and p != 2:
            # unimodular over Z_(p), p odd: create a unit diagonal entry
            found = False
            for ii, i in enumerate(live):
                for j in live[ii + 1:]:
                    if g[i][j] != 0 and valuation(g[i][j], p) == 0:
                        for l in range(n):
                            g[i][l] += g[j][l]
                        for l in range(n):
                            g[l][i] += g[l][j]
                        found = True
                        break
                if found:
                    break
            if not found:
                raise AssertionError("block is not unimodular at p")
            continue
        if piv is not None:
            d = g[piv][piv]
            live.remove(piv)
            coeff = {k: g[k][piv] / d for k in live}
            for k in live:
                for l in live:
                    g[k][l] -= coeff[k] * g[piv][l]
            for k in live:
                g[k][piv] = g[piv][k] = Fraction(0)
            pieces.append(("d", d))
            continue
        # p = 2 even-type: take a 2x2 block with unit off-diagonal
        i = live[0]
        j = next(jj for jj in live[1:] if g[i][jj] != 0 and valuation(g[i][jj], 2) == 0)
        bg = [[g[i][i], g[i][j]], [g[i][j], g[j][j]]]
        det = bg[0][0] * bg[1][1] - bg[0][1] ** 2
        inv = [[bg[1][1] / det, -bg[0][1] / det], [-bg[0][1] / det, bg[0][0] / det]]
        live.remove(i)
        live.remove(j)
        for k in live:
            ci, cj = g[k][i], g[k][j]
            al = ci * inv[0][0] + cj * inv[1][0]
            be = ci * inv[0][1] + cj * inv[1][1]
            for l in live:
                g[k][l] -= al * g[i][l] + be * g[j][l]
        for k in live:
            g[k][i] = g[i][k] = g[k][j] = g[j][k] = Fraction(0)
        bdet = bg[0][0] * bg[1][1] - bg[0][1] ** 2
        if _det_class(bdet, 2) == 7:
            has_u = True
        else:
            has_v = True
        pieces.append(("b", tuple(tuple(x for x in row) for row in bg)))

    def frac_mod(x):
        return (x.numerator * pow(x.denominator, -1, mod)) % mod

    for kind, data in pieces:
        pp = np.zeros(mod, dtype=bool)
        ff = np.zeros(mod, dtype=bool)
        ff[0] = True
        if kind == "d":
            d = frac_mod(data)
            xs = np.arange(mod, dtype=np.int64)
            vals = (d * xs * xs) % mod
            if p == 2:
                prim_mask = (xs % 2) == 1
            else:
                prim_mask = (xs % p) != 0
            pp[np.unique(vals[prim_mask])] = True
            ff[np.unique(vals)] = True
        else:
            a = frac_mod(data[0][0])
            b = frac_mod(data[0][1])
            c = frac_mod(data[1][1])
            xs = np.arange(mod, dtype=np.int64)
            X, Y = np.meshgrid(xs, xs, indexing="ij")
            vals = (a * X * X + 2 * b * X * Y + c * Y * Y) % mod
            pmask = ((X % 2) == 1) | ((Y % 2) == 1)
            pp[np.unique(vals[pmask])] = True
            ff[np.unique(vals)] = True
        # combine: new_prim = prim*ff_full + full*pp etc.
        new_full = np.zeros(mod, dtype=bool)
        new_prim = np.zeros(mod, dtype=bool)
        fi = np.nonzero(full)[0]
        pi = np.nonzero(prim)[0]
        for r in np.nonzero(ff)[0]:
            new_full[(fi + r) % mod] = True
        for r in np.nonzero(pp)[0]:
            new_prim[(fi + r) % mod] = True
        for r in np.nonzero(ff)[0]:
            new_prim[(pi + r) % mod] = True
        full = new_full
        prim = new_prim
    return prim, full, has_u, has_v


@functools.lru_cache(maxsize=None)
def local_spinor_images(m, p):
    """(Sigma_p, Sigma_p_sharp) as F2 row bases in Gamma_p coordinates.

    Generated by symmetries r_x of L x Z_p; the set of valid (det, spin)
    values is enumerated exactly over valuation profiles x = sum_w p^{a_w} y_w
    with y_w primitive in the scale-w Jordan block. Eichler transformations
    contribute (1, 1) and are omitted. For p = 2 the generation of O(L_2) by
    symmetries and Eichler transformations is O'Meara-Pollak.
    """
    blocks = jordan_decomposition(m, p)
    scales = [b.scale for b in blocks]
    maxs = max(scales)
    K = maxs + (5 if p == 2 else 3)
    mod = p ** K
    vsets = {}
    block_flags = {}
    for b in blocks:
        prim, full, has_u, has_v = _block_value_sets(b, p, K)
        vsets[b.scale] = (prim, full)
        block_flags[b.scale] = (has_u, has_v)

    sigma = []
    sharp = []
    if p == 2:
        # hyperbolic/anisotropic torus rotations inside even 2x2 pieces:
        # proper isometries with arbitrary unit spinor norm. A torus on a
        # U-piece of scale w is trivial on the discriminant iff its unit is
        # 1 mod 2^w, contributing sharp classes for small scales.
        for w, (has_u, has_v) in block_flags.items():
            if has_u or has_v:
                for u in (3, 5, 7):
                    sigma.append(_gamma_coords(2, 1, Fraction(u)))
            if has_u:
                if w <= 1:
                    for u in (3, 5, 7):
                        sharp.append(_gamma_coords(2, 1, Fraction(u)))
                elif w == 2:
                    sharp.append(_gamma_coords(2, 1, Fraction(5)))
    # profiles: subset of scales with shift a_w <= (K - w) // 2, min a = 0
    shift_ranges = []
    for w in scales:
        shift_ranges.append(list(range(0, (K - w) // 2 + 1)) + [None])
    for assign in itertools.product(*shift_ranges):
        support = [(w, a) for w, a in zip(scales, assign) if a is not None]
        if not support:
            continue
        if min(a for _w, a in support) != 0:
            continue
        mbar = min(w + a for w, a in support)
        vals = np.zeros(mod, dtype=bool)
        vals[0] = True
        for w, a in support:
            shift = (p ** (w + 2 * a)) % mod
            pset = vsets[w][0]
            idx = np.nonzero(pset)[0]
            shifted = np.zeros(mod, dtype=bool)
            shifted[(idx * shift) % mod] = True
            base = np.nonzero(vals)[0]
            new = np.zeros(mod, dtype=bool)
            for r in np.nonzero(shifted)[0]:
                new[(base + r) % mod] = True
            vals = new
        for q in np.nonzero(vals)[0]:
            if q == 0:
                continue
            v = 0
            qq = int(q)
            while qq % p == 0:
                qq //= p
                v += 1
            if v > K - 3:
                continue   # valuation not resolved at this precision
            # integrality of the reflection r_x
            slack = 1 if p == 2 else 0
            if any(slack + mbar + a < v for _w, a in support):
                continue
            coords = _gamma_coords(p, -1, Fraction(int(q)))
            sigma.append(coords)
            # sharpness: scale >= 1 support blocks constrain dual shifts
            is_sharp = True
            for w, a in support:
                if w >= 1 and any(slack + a + a2 < v for _w2, a2 in support):
                    is_sharp = False
                    break
            if is_sharp:
                sharp.append(coords)
    dim = _gamma_dim(p)
    return _f2_span(sigma, dim), _f2_span(sharp, dim)

# ---------------------------------------------------------------------------
# rational (det, spin) data and the global image computation

def _local_represented_classes(gram, p):
    """Square classes of Q_p represented by the rational quadratic space."""
    diag = _diagonalize_rational(gram)
    out = []
    for r in _square_classes(p):
        if _isotropic_local([Fraction(d) for d in diag] + [-r], p):
            out.append(r)
    return out


def _signed_class_key(r, p):
    """F2 coordinates of the class of r in Q_p^x/(Q_p^x)^2 (no det bit)."""
    return _gamma_coords(p, 1, r)[1:]


@functools.lru_cache(maxsize=None)
def _rational_image_data(m):
    """The subgroup Gamma_P(V) of (det, spin) pairs of rational isometries
    whose spin class is supported on P = primes(2 det), together with P.

    Returned as (P, frozenset of (det_sign, r) with r a signed squarefree
    integer supported on P).
    """
    d = lat.det(m)
    ps = tuple(sorted(_prime_factors(2 * abs(d))))
    sig = lat.signature(m)
    indefinite = sig.positive > 0 and sig.negative > 0
    # candidates: signed squarefree integers supported on P
    cands = []
    for bits in itertools.product((0, 1), repeat=len(ps)):
        val = 1
        for p, b in zip(ps, bits):
            if b:
                val *= p
        cands.extend([val, -val])

    # local represented classes at each p in P, and at infinity
    rep_p = {p: set(map(lambda r: _signed_class_key(r, p),
                        _local_represented_classes(m.gram, p))) for p in ps}
    def rep_sign(r):
        if indefinite:
            return True
        if sig.positive == 0:
            return r < 0
        return r > 0

    def globally_represented(r):
        return rep_sign(r) and all(
            _signed_class_key(Fraction(r), p) in rep_p[p] for p in ps)

    gens = set()
    for r in cands:
        if globally_represented(r):
            gens.add((-1, r))
    # pairs r = f*a, r' = f*b with a common off-P part f: (1, a*b) is
    # realizable iff some local class vector psi has psi and s*psi both
    # represented everywhere (weak approximation provides the global f)
    for s in cands:
        if s == 1:
            gens.add((1, 1))
            continue
        found = False
        for sign_psi in (1, -1):
            if found:
                break
            # psi's local classes can be chosen freely; require a consistent
            # choice with psi and s*psi represented at each place
            per_p_ok = True
            for p in ps:
                ok_here = False
                for c in _square_classes(p):
                    k1 = _signed_class_key(c, p)
                    k2 = _signed_class_key(Fraction(s) * c, p)
                    if k1 in rep_p[p] and k2 in rep_p[p]:
                        ok_here = True
                        break
                if not ok_here:
                    per_p_ok = False
                    break
            if per_p_ok and (indefinite or (rep_sign(sign_psi) and rep_sign(s * sign_psi))):
                found = True
        if found:
            gens.add((1, s))

    # subgroup closure (multiplication of signed squarefree classes)
    def mulcls(x, y):
        e = x[0] * y[0]
        r = x[1] * y[1]
        # reduce to squarefree
        out = 1 if r > 0 else -1
        rr = abs(r)
        for p in ps:
            while rr % (p * p) == 0:
                rr //= p * p
        out *= rr
        return (e, out)

    group = {(1, 1)}
    frontier = list(gens)
    while frontier:
        x = frontier.pop()
        if x in group:
            continue
        group.add(x)
        for y in list(group):
            z = mulcls(x, y)
            if z not in group:
                frontier.append(z)
    return ps, frozenset(group)


def _f2_quotient_class(vec, basis):
    """Reduce vec modulo the F2 span; canonical residue."""
    v = list(vec)
    for b in basis:
        piv = next(i for i, x in enumerate(b) if x)
        if v[piv]:
            v = [(x + y) % 2 for x, y in zip(v, b)]
    return tuple(v)


@functools.lru_cache(maxsize=None)
def image_order_indefinite(m):
    """Exact order of the image of O(m) -> Aut(discr m) for an even
    indefinite lattice of rank >= 3 (strong approximation bookkeeping)."""
    sig = lat.signature(m)
    if m.rank < 3 or not (sig.positive and sig.negative):
        raise ValueError("image_order_indefinite needs indefinite rank >= 3")
    form, _ = _discr_form_cached(m)
    aut_order = groups.aut_chain(form).order()
    ps, gamma = _rational_image_data(m)
    sigmas = {p: local_spinor_images(m, p) for p in ps}
    # |Xi| = prod |Sigma_p / Sigma_p#|
    xi_bits = 0
    for p in ps:
        sg, sh = sigmas[p]
        xi_bits += len(sg) - len(sh)
    # D-bar: classes of allowed rational pairs modulo the sharp groups
    dbar = set()
    for (eps, r) in gamma:
        ok = True
        coords = {}
        for p in ps:
            c = _gamma_coords(p, eps, Fraction(r))
            sg, sh = sigmas[p]
            if not _f2_in_span(c, sg):
                ok = False
                break
            coords[p] = _f2_quotient_class(c, sh)
        if ok:
            dbar.add(tuple(coords[p] for p in ps))
    if not dbar:
        raise AssertionError("identity must always be allowed")
    order = aut_order * len(dbar)
    denom = 1 << xi_bits
    if order % denom:
        raise AssertionError("image order formula produced a non-integer")
    return order // denom


@functools.lru_cache(maxsize=None)
def spinor_genus_count(m):
    """Number of proper spinor genera in the genus of m (rank >= 3)."""
    ps, gamma = _rational_image_data(m)
    sigmas = {p: local_spinor_images(m, p) for p in ps}
    # space C = prod_p classes(Q_p)/Theta_p with Theta_p = spin part of Sigma_p
    dims = []
    theta_bases = []
    for p in ps:
        dim = _gamma_dim(p) - 1
        sg, _sh = sigmas[p]
        # spin parts of det=+1 elements of the Sigma span
        span_elems = set()
        span_elems.add(tuple([0] * _gamma_dim(p)))
        basis = list(sg)
        for bits in itertools.product((0, 1), repeat=len(basis)):
            v = [0] * _gamma_dim(p)
            for b, use in zip(basis, bits):
                if use:
                    v = [(x + y) % 2 for x, y in zip(v, b)]
            span_elems.add(tuple(v))
        theta = [v[1:] for v in span_elems if v[0] == 0]
        theta_bases.append(_f2_span(theta, dim))
        dims.append(dim)
    total_dim = sum(dims)
    # subgroup generated by per-p Theta blocks and the diagonal rational spins
    vecs = []
    off = 0
    for dimp, tb in zip(dims, theta_bases):
        for b in tb:
            vecs.append(tuple([0] * off) + tuple(b) +
                        tuple([0] * (total_dim - off - dimp)))
        off += dimp
    for (eps, r) in gamma:
        if eps != 1:
            continue
        v = []
        for p in ps:
            v.extend(_signed_class_key(Fraction(r), p))
        vecs.append(tuple(v))
    span = _f2_span(vecs, total_dim)
    return 1 << (total_dim - len(span))

# ---------------------------------------------------------------------------
# rank-2 indefinite lattices: explicit orthogonal groups, Pell equations

def pell_fundamental(d):
    """Smallest (x, y), x,y > 0, with x^2 - d y^2 = 1 (d > 0 not a square).

    Continued-fraction expansion of sqrt(d) with exact integers.
    """
    a0 = math.isqrt(d)
    if a0 * a0 == d:
        raise ValueError("d must not be a square")
    # convergents of sqrt(d)
    m, den, a = 0, 1, a0
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    while True:
        if h * h - d * k * k == 1:
            return h, k
        m = den * a - m
        den = (d - m * m) // den
        a = (a0 + m) // den
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev


def pell_solutions_below(d, bound):
    """Brute-force cross-check: all (x, y), 0 < x <= bound, x^2 - d y^2 = 1."""
    out = []
    y = 1
    while True:
        x2 = 1 + d * y * y
        x = math.isqrt(x2)
        if x > bound:
            break
        if x * x == x2:
            out.append((x, y))
        y += 1
    return out


def _is_reduced_indefinite(form, disc):
    a, b, _c = form
    if b <= 0 or b * b >= disc:
        return False
    if (2 * abs(a) + b) ** 2 <= disc:
        return False
    if 2 * abs(a) > b and (2 * abs(a) - b) ** 2 >= disc:
        return False
    return True


def _binary_reduced_forms(disc):
    """All Gauss-reduced indefinite binary forms (a, b, c), b^2 - 4ac = disc
    (disc > 0 and not a square): |sqrt(disc) - 2|a|| < b < sqrt(disc)."""
    out = []
    r = math.isqrt(disc)
    for b in range(1, r + 1):
        if (disc - b * b) % 4:
            continue
        ac = (b * b - disc) // 4     # negative
        for a in range(1, r + b + 1):
            if ac % a:
                continue
            for sa in (a, -a):
                c = ac // sa
                if _is_reduced_indefinite((sa, b, c), disc):
                    out.append((sa, b, c))
    return sorted(set(out))


def _rho_step(form, disc):
    """Gauss reduction neighbor of an indefinite form (a, b, c)."""
    _a, b, c = form
    r = math.isqrt(disc)
    s = 1 if c > 0 else -1
    delta = s * ((b + r) // (2 * abs(c)))
    b2 = -b + 2 * delta * c
    a2 = c
    c2 = (b2 * b2 - disc) // (4 * a2)
    return (a2, b2, c2)


def _reduce_indefinite(form, disc):
    cur = form
    for _ in range(10000):
        if _is_reduced_indefinite(cur, disc):
            return cur
        cur = _rho_step(cur, disc)
    raise AssertionError("indefinite reduction failed to terminate")


def _binary_proper_classes(disc):
    """Proper equivalence classes of primitive-or-not forms of discriminant
    disc (> 0, nonsquare), each as a frozenset cycle of reduced forms."""
    reduced = _binary_reduced_forms(disc)
    remaining = set(reduced)
    classes = []
    while remaining:
        start = sorted(remaining)[0]
        cyc = [start]
        cur = start
        while True:
            cur = _rho_step(cur, disc)
            if cur == start:
                break
            cyc.append(cur)
            if len(cyc) > 10000:
                raise AssertionError("reduction cycle failed to close")
        cset = frozenset(cyc) & set(reduced)
        classes.append(frozenset(cyc))
        remaining -= set(cyc)
    return classes


def rank2_isometry_classes_in_genus(m):
    """All isometry classes of even rank-2 lattices in the genus of m,
    counted via reduction theory of binary quadratic forms."""
    g = m.gram
    sig = lat.signature(m)
    if m.rank != 2:
        raise ValueError("rank-2 only")
    a, b, c = g[0][0] // 2, g[0][1], g[1][1] // 2
    disc = b * b - 4 * a * c
    if sig.positive and sig.negative:
        if math.isqrt(disc) ** 2 == disc:
            # isotropic: normal forms [[0, k], [k, 2m]], 0 <= m < k
            k = math.isqrt(disc)
            # det(G) = -k^2; enumerate candidates and dedupe by isometry
            cands = []
            if k % 2 == 0:
                pass
            for mm in range(0, k):
                cand = lat.IntegerLattice(((0, k), (k, 2 * mm)))
                cands.append(cand)
            kept = []
            for candlat in cands:
                if not same_genus(candlat, m):
                    continue
                if not any(_rank2_isometric(candlat, other) for other in kept):
                    kept.append(candlat)
            return kept
        classes = _binary_proper_classes(disc)
        # merge cycles under improper equivalence: flipping (a,b,c) to
        # (a,-b,c) maps a proper class to its GL-partner
        merged = []
        seen = set()
        for cyc in classes:
            if cyc in seen:
                continue
            seen.add(cyc)
            a0, b0, c0 = sorted(cyc)[0]
            partner_form = _reduce_indefinite((a0, -b0, c0), disc)
            partner = next(other for other in classes if partner_form in other)
            seen.add(partner)
            merged.append(cyc)
        out = []
        for cyc in merged:
            aa, bb, cc = sorted(cyc)[0]
            candlat = lat.IntegerLattice(((2 * aa, bb), (bb, 2 * cc)))
            if same_genus(candlat, m):
                out.append(candlat)
        return out
    # definite rank 2: complete reduced-form enumeration (Lagrange-Gauss),
    # b >= 0 so each GL-class appears once
    neg = sig.positive == 0
    aa, bb, cc = (a, b, c) if not neg else (-a, -b, -c)
    disc = bb * bb - 4 * aa * cc   # negative
    out = []
    bound = math.isqrt(abs(disc) // 3) + 1
    for b2 in range(0, bound + 1):
        for a2 in range(max(1, b2), bound + 2):
            if (b2 * b2 - disc) % (4 * a2):
                continue
            c2 = (b2 * b2 - disc) // (4 * a2)
            if not (b2 <= a2 <= c2):
                continue
            cand = ((2 * a2, b2), (b2, 2 * c2))
            if neg:
                cand = tuple(tuple(-x for x in row) for row in cand)
            candlat = lat.IntegerLattice(cand)
            if same_genus(candlat, m):
                out.append(candlat)
    return out


def _rank2_isometric(m1, m2):
    """Explicit isometry search for rank-2 lattices (bounded coefficients)."""
    if m1.gram == m2.gram:
        return True
    # solve T^t G1 T = G2 over small integer matrices
    bnd = 12
    g1 = m1.gram
    for t00 in range(-bnd, bnd + 1):
        for t10 in range(-bnd, bnd + 1):
            q = g1[0][0] * t00 * t00 + 2 * g1[0][1] * t00 * t10 + g1[1][1] * t10 * t10
            if q != m2.gram[0][0]:
                continue
            for t01 in range(-bnd, bnd + 1):
                for t11 in range(-bnd, bnd + 1):
                    if t00 * t11 - t01 * t10 not in (1, -1):
                        continue
                    v01 = (g1[0][0] * t00 * t01 + g1[0][1] * (t00 * t11 + t01 * t10)
                           + g1[1][1] * t10 * t11)
                    v11 = (g1[0][0] * t01 * t01 + 2 * g1[0][1] * t01 * t11
                           + g1[1][1] * t11 * t11)
                    if v01 == m2.gram[0][1] and v11 == m2.gram[1][1]:
                        return True
    return False

# ---------------------------------------------------------------------------
# explicit orthogonal groups in rank <= 2 and reflection harvesting

def reflection_matrix(m, v):
    """Matrix (row convention: x -> x R) of the reflection in v; raises if
    the reflection is not integral on m."""
    q = m.square(v)
    if q == 0:
        raise ValueError("cannot reflect in an isotropic vector")
    gv = linalg.mat_vec(m.gram, v)
    n = m.rank
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            x = Fraction(2 * gv[i] * v[j], q)
            val = (1 if i == j else 0) - x
            row.append(val)
        rows.append(row)
    out = []
    for row in rows:
        new = []
        for x in row:
            if Fraction(x).denominator != 1:
                raise ValueError("reflection is not integral on the lattice")
            new.append(int(x))
        out.append(new)
    return linalg.mat_tuple(out)


def is_isometry_matrix(m, r):
    return linalg.mat_mul(linalg.mat_mul(r, m.gram), linalg.transpose(r)) == m.gram


def _solve_t2_du2_eq_4(d):
    """Fundamental (t, u), u > 0 minimal, with t^2 - d u^2 = 4."""
    x, y = pell_fundamental(d)
    u = 1
    while u <= 2 * y:
        t2 = 4 + d * u * u
        t = math.isqrt(t2)
        if t * t == t2:
            return t, u
        u += 1
    return 2 * x, 2 * y


def _binary_form_data(m):
    g = m.gram
    return g[0][0] // 2, g[0][1], g[1][1] // 2


def _primitive_isotropic_directions(m):
    """The two primitive isotropic vectors (up to sign) of an isotropic
    rank-2 lattice."""
    a, b, c = _binary_form_data(m)
    disc = b * b - 4 * a * c
    r = math.isqrt(disc)
    assert r * r == disc
    dirs = []
    # a x^2 + b x y + c y^2 = 0: solve for the two rational slopes
    if a == 0:
        dirs.append((1, 0))
        # other: a'=..: b x + c y = 0 along y direction
        gcd = math.gcd(b, c)
        dirs.append((-c // gcd, b // gcd) if (b or c) else (0, 1))
    else:
        for sgn in (1, -1):
            num = -b + sgn * r
            den = 2 * a
            gg = math.gcd(abs(num), abs(den))
            dirs.append((num // gg, den // gg))
    out = []
    for d0 in dirs:
        if d0 not in out and tuple(-x for x in d0) not in out:
            out.append(d0)
    assert len(out) == 2, "isotropic rank-2 lattice must have two directions"
    return out


def binary_orthogonal_generators(m):
    """Generators of O(m) for a rank-2 nondegenerate even lattice.

    Indefinite anisotropic: -1, the Gauss fundamental automorph, and an
    improper element constructed by reduction-cycle transport when the form
    is GL-equivalent to its flip. Isotropic: signed permutations of the two
    isotropic directions. Definite: complete transporter search.
    """
    a, b, c = _binary_form_data(m)
    disc = b * b - 4 * a * c
    sig = lat.signature(m)
    gens = [tuple((-1 if i == j else 0) for j in range(2)) for i in range(2)]
    gens = [linalg.mat_tuple([[-1, 0], [0, -1]])]
    if sig.positive and sig.negative:
        if math.isqrt(disc) ** 2 == disc:
            e1, e2 = _primitive_isotropic_directions(m)
            base = linalg.mat_tuple([list(e1), list(e2)])
            det_base = base[0][0] * base[1][1] - base[0][1] * base[1][0]
            for t in itertools.product([1, -1], repeat=2):
                for swap in (False, True):
                    rows = [tuple(t[0] * x for x in (e2 if swap else e1)),
                            tuple(t[1] * x for x in (e1 if swap else e2))]
                    # solve R with (e1, e2) R = rows: R = base^{-1} rows
                    binv = [[Fraction(base[1][1], det_base), Fraction(-base[0][1], det_base)],
                            [Fraction(-base[1][0], det_base), Fraction(base[0][0], det_base)]]
                    rr = linalg.mat_mul(binv, linalg.mat_tuple(rows))
                    if all(Fraction(x).denominator == 1 for row in rr for x in row):
                        cand = linalg.mat_tuple([[int(x) for x in row] for row in rr])
                        if is_isometry_matrix(m, cand) and \
                                abs(cand[0][0] * cand[1][1] - cand[0][1] * cand[1][0]) == 1:
                            gens.append(cand)
            return gens
        # anisotropic over Q but indefinite: Gauss automorph
        t, u = _solve_t2_du2_eq_4(disc)
        auto = ((Fraction(t - b * u, 2), Fraction(-c * u)),
                (Fraction(a * u), Fraction(t + b * u, 2)))
        mat = linalg.mat_tuple([[int(x) for x in row] for row in auto])
        # row convention: check and transpose if needed
        cand = linalg.transpose(mat)
        if is_isometry_matrix(m, cand):
            gens.append(cand)
        elif is_isometry_matrix(m, mat):
            gens.append(mat)
        else:
            raise AssertionError("Gauss automorph failed the isometry check")
        imp = _binary_improper_element(m)
        if imp is not None:
            gens.append(imp)
        return gens
    # definite: transporter search via short vectors
    target0 = m.gram[0][0]
    target1 = m.gram[1][1]
    bnd = max(abs(target0), abs(target1))
    vecs = lat.short_vectors(m, bnd)
    out = list(gens)
    for v0, q0 in vecs:
        if q0 != target0:
            continue
        for v1, q1 in vecs:
            if q1 != target1 or m.dot(v0, v1) != m.gram[0][1]:
                continue
            r = linalg.mat_tuple([v0, v1])
            d = r[0][0] * r[1][1] - r[0][1] * r[1][0]
            if abs(d) == 1 and is_isometry_matrix(m, r):
                out.append(r)
    return out


def _binary_improper_element(m):
    """An improper isometry of an even indefinite anisotropic rank-2 lattice,
    or None when the half-form is not GL-equivalent to its flip."""
    a, b, c = _binary_form_data(m)
    disc = b * b - 4 * a * c

    def reduce_with_transform(form):
        cur = form
        t = linalg.mat_tuple([[1, 0], [0, 1]])
        for _ in range(10000):
            if _is_reduced_indefinite(cur, disc):
                return cur, t
            aa, bb, cc = cur
            r = math.isqrt(disc)
            s = 1 if cc > 0 else -1
            delta = s * ((bb + r) // (2 * abs(cc)))
            step = linalg.mat_tuple([[0, -1], [1, delta]])
            t = linalg.mat_mul(t, step)
            cur = _rho_step(cur, disc)
        raise AssertionError("reduction failed")

    f = (a, b, c)
    red_f, t_f = reduce_with_transform(f)
    red_g, t_g = reduce_with_transform((a, -b, c))
    # walk red_g's cycle until it hits red_f
    cur, t_walk = red_g, linalg.mat_tuple([[1, 0], [0, 1]])
    for _ in range(10000):
        if cur == red_f:
            break
        aa, bb, cc = cur
        r = math.isqrt(disc)
        s = 1 if cc > 0 else -1
        delta = s * ((bb + r) // (2 * abs(cc)))
        step = linalg.mat_tuple([[0, -1], [1, delta]])
        t_walk = linalg.mat_mul(t_walk, step)
        cur = _rho_step(cur, disc)
    else:
        return None
    if cur != red_f:
        return None
    # f o (J t_g t_walk t_f^{-1}) = f with J = diag(1,-1)
    j = linalg.mat_tuple([[1, 0], [0, -1]])
    comp = linalg.mat_mul(linalg.mat_mul(j, t_g), t_walk)
    tf_inv = linalg.invert_unimodular(t_f)
    comp = linalg.mat_mul(comp, tf_inv)
    # column-convention transform; convert to row convention
    cand = linalg.transpose(comp)
    for candidate in (cand, comp):
        if is_isometry_matrix(m, candidate):
            d = candidate[0][0] * candidate[1][1] - candidate[0][1] * candidate[1][0]
            if d == -1:
                return candidate
    raise AssertionError("improper transport failed the isometry check")

# ---------------------------------------------------------------------------
# the image of O(M) in Aut(discr M), certified

@dataclass
class DiscrImage:
    """Image of O(M) -> Aut(discr M) with witnesses.

    chain: groups.MatrixChain over the discriminant form; witnesses maps
    each generator digit-matrix to a lattice isometry matrix (row
    convention) inducing it. exact is always True for emitted values.
    """
    lattice: object
    form: object
    chain: object
    witnesses: dict

    @property
    def order(self):
        return self.chain.order()

    def generators(self):
        """Digit matrices that generate the image, each with a witness."""
        return list(self.witnesses.keys())


def discr_action_matrix(m, r, form=None, gens=None):
    """Digit matrix of the discriminant action of a lattice isometry r."""
    if form is None or gens is None:
        form, gens = _discr_form_cached(m)
    d, u, v = linalg.smith_normal_form(m.gram)
    rows = []
    for g in gens:
        img = linalg.vec_mat(g, r)     # rational row vector
        rows.append(_dual_class_digits(m, img, form))
    return tuple(rows)


@functools.lru_cache(maxsize=None)
def _snf_data(m):
    d, u, v = linalg.smith_normal_form(m.gram)
    return d, u, v


def _dual_class_digits(m, x, form):
    """Digits of the class of a dual (rational) row vector x in discr m."""
    d, u, v = _snf_data(m)
    y = linalg.vec_mat(x, m.gram)          # integral row (x in the dual)
    y = [int(t) if Fraction(t).denominator == 1 else None for t in y]
    if any(t is None for t in y):
        raise ValueError("vector is not in the dual lattice")
    w = linalg.vec_mat(y, v)
    digits = []
    for i, di in enumerate(d):
        if di > 1:
            digits.append(int(w[i]) % di)
    return tuple(digits)


def _harvest_reflective_vectors(m, box, skip_trivial=True):
    """Primitive vectors with integral reflections, |coords| <= box.

    Vectorized: the integrality of r_v is equivalent to
    Q(v) | 2 gcd_i((Gv)_i) for primitive v. Reflections with |Q| = 2 act
    trivially on the discriminant and are skipped by default.
    """
    n = m.rank
    side = 2 * box + 1
    total = side ** n
    gram = np.array(m.gram, dtype=np.int64)
    out = []
    chunk = 200_000
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        coords = np.empty((len(idx), n), dtype=np.int64)
        rem = idx
        for i in range(n - 1, -1, -1):
            coords[:, i] = rem % side - box
            rem = rem // side
        nz = np.any(coords != 0, axis=1)
        coords = coords[nz]
        if not len(coords):
            continue
        # canonical sign: first nonzero coordinate positive
        firstnz = np.argmax(coords != 0, axis=1)
        signs = coords[np.arange(len(coords)), firstnz]
        coords = coords[signs > 0]
        if not len(coords):
            continue
        g = np.gcd.reduce(np.abs(coords), axis=1)
        coords = coords[g == 1]
        if not len(coords):
            continue
        gv = coords @ gram
        q = np.einsum("ij,ij->i", coords, gv)
        keep = q != 0
        if skip_trivial:
            keep &= np.abs(q) != 2
        coords = coords[keep]
        gv = gv[keep]
        q = q[keep]
        if not len(coords):
            continue
        ggv = np.gcd.reduce(np.abs(gv), axis=1)
        ok = (2 * ggv) % np.abs(q) == 0
        sel = coords[ok]
        qs = q[ok]
        for row, qq in sorted(zip(sel.tolist(), qs.tolist()),
                              key=lambda t: abs(t[1])):
            out.append(tuple(row))
    return out


def _gram_blocks(m):
    """Connected components of the Gram graph: list of index tuples."""
    n = m.rank
    seen = set()
    comps = []
    for i in range(n):
        if i in seen:
            continue
        stack = [i]
        comp = []
        while stack:
            k = stack.pop()
            if k in seen:
                continue
            seen.add(k)
            comp.append(k)
            for j in range(n):
                if j != k and m.gram[k][j] != 0:
                    stack.append(j)
        comps.append(tuple(sorted(comp)))
    return comps


def _block_swap_isometries(m):
    """Swaps of identical orthogonal Gram blocks."""
    comps = _gram_blocks(m)
    out = []
    n = m.rank
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            a, b = comps[i], comps[j]
            if len(a) != len(b):
                continue
            ga = tuple(tuple(m.gram[x][y] for y in a) for x in a)
            gb = tuple(tuple(m.gram[x][y] for y in b) for x in b)
            if ga != gb:
                continue
            r = [[1 if x == y else 0 for y in range(n)] for x in range(n)]
            for x in a + b:
                r[x][x] = 0
            for x, y in zip(a, b):
                r[x][y] = 1
                r[y][x] = 1
            out.append(linalg.mat_tuple(r))
    return out


def _block_sign_isometries(m):
    """-1 on a single Gram block, +1 elsewhere."""
    out = []
    n = m.rank
    for comp in _gram_blocks(m):
        r = [[1 if x == y else 0 for y in range(n)] for x in range(n)]
        for x in comp:
            r[x][x] = -1
        out.append(linalg.mat_tuple(r))
    return out


def _block_internal_isometries(m):
    """Exact orthogonal generators of rank-2 Gram blocks, extended by the
    identity (covers isotropic-direction swaps and Pell automorphs that no
    bounded reflection sweep would find)."""
    out = []
    n = m.rank
    for comp in _gram_blocks(m):
        if len(comp) != 2:
            continue
        sub = lat.IntegerLattice(tuple(tuple(m.gram[x][y] for y in comp)
                                       for x in comp))
        if lat.det(sub) == 0:
            continue
        for g in binary_orthogonal_generators(sub):
            r = [[1 if x == y else 0 for y in range(n)] for x in range(n)]
            for a in range(2):
                for b in range(2):
                    r[comp[a]][comp[b]] = g[a][b]
            out.append(linalg.mat_tuple(r))
    return out


def _default_box(rank):
    if rank <= 3:
        return 7
    if rank <= 4:
        return 5
    if rank <= 6:
        return 4
    return 3


@functools.lru_cache(maxsize=None)
def discr_image(m, max_box=None):
    """The image of O(m) in Aut(discr m), exact, with witnesses.

    rank 1: generated by -1. rank 2: from the explicit orthogonal group.
    indefinite rank >= 3: generator harvest (reflections, block moves)
    checked against the strong-approximation order; the two must agree or
    the computation aborts. definite rank >= 2 beyond the small-search
    budget raises UnknownVerdict.
    """
    form, gens = _discr_form_cached(m)
    sig = lat.signature(m) if m.rank else lat.SignaturePair(0, 0)
    chain = groups.MatrixChain(form)
    witnesses = {}

    def add(r):
        dm = discr_action_matrix(m, r, form, gens)
        if chain.add_generator(dm):
            witnesses[dm] = r
        return dm

    n = m.rank
    minus = linalg.mat_tuple([[-1 if i == j else 0 for j in range(n)] for i in range(n)])
    if n == 0:
        return DiscrImage(m, form, chain, witnesses)
    add(minus)
    if n == 1:
        return DiscrImage(m, form, chain, witnesses)
    if n == 2:
        for r in binary_orthogonal_generators(m):
            add(r)
        return DiscrImage(m, form, chain, witnesses)
    if not (sig.positive and sig.negative):
        # definite: complete transporter search, small budgets only
        if n > 4 or abs(lat.det(m)) > 10_000:
            raise UnknownVerdict("definite image computation beyond budget")
        for r in _definite_isometries(m):
            add(r)
        return DiscrImage(m, form, chain, witnesses)
    target = image_order_indefinite(m)
    for r in _block_sign_isometries(m) + _block_swap_isometries(m) \
            + _block_internal_isometries(m):
        add(r)
    if max_box is None:
        max_box = _default_box(m.rank)
    box = 1
    while chain.order() != target and box <= max_box:
        for v in _harvest_reflective_vectors(m, box):
            try:
                r = reflection_matrix(m, v)
            except ValueError:
                continue
            add(r)
            if chain.order() == target:
                break
        box += 1
    if chain.order() > target:
        raise AssertionError(
            "harvested isometries exceed the computed image order: "
            f"{chain.order()} > {target}")
    if chain.order() != target:
        raise UnknownVerdict(
            f"image generators not found within box {max_box}: "
            f"have {chain.order()}, want {target}")
    return DiscrImage(m, form, chain, witnesses)


def _definite_isometries(m):
    """All isometries of a small definite lattice via transporter DFS."""
    n = m.rank
    norms = [m.gram[i][i] for i in range(n)]
    cand = {}
    allv = lat.short_vectors(m, max(abs(x) for x in norms))
    for i in range(n):
        cand[i] = [v for v, q in allv if q == norms[i]]
    out = []
    rows = [None] * n

    def rec(i):
        if i == n:
            r = linalg.mat_tuple(rows)
            d = linalg.det_bareiss(r)
            if abs(d) == 1 and is_isometry_matrix(m, r):
                out.append(r)
            return
        for v in cand[i]:
            ok = True
            for j in range(i):
                if m.dot(rows[j], v) != m.gram[j][i]:
                    ok = False
                    break
            if ok:
                rows[i] = v
                rec(i + 1)
        rows[i] = None

    rec(0)
    return out


def unique_in_genus(m):
    """Is m the only isometry class in its genus? May raise UnknownVerdict."""
    if m.rank <= 1:
        return True
    sig = lat.signature(m)
    if m.rank == 2:
        classes = rank2_isometry_classes_in_genus(m)
        if not classes:
            raise AssertionError("a lattice must lie in its own genus")
        return len(classes) == 1
    if sig.positive and sig.negative:
        if spinor_genus_count(m) == 1:
            return True
        raise UnknownVerdict(
            "several proper spinor genera; uniqueness undecided here")
    raise UnknownVerdict("definite uniqueness beyond the supported budget")

def rational_spinor_det(gram, g):
    """(det, spinor norm class) of an isometry g over Q, via an exact
    Cartan-Dieudonne factorization into reflections."""
    n = len(gram)
    gq = [[Fraction(x) for x in row] for row in gram]

    def qform(v):
        return sum(v[i] * gq[i][j] * v[j] for i in range(n) for j in range(n))

    def bform(v, w):
        return sum(v[i] * gq[i][j] * w[j] for i in range(n) for j in range(n))

    cur = [[Fraction(x) for x in row] for row in g]
    spin = Fraction(1)
    count = 0
    for _round in range(2 * n + 4):
        # find x with x != cur(x); reflect in v = x - cur(x) if anisotropic
        if all(cur[i][j] == (1 if i == j else 0) for i in range(n)
               for j in range(n)):
            det = (-1) ** count
            return det, spin
        moved = None
        for i in range(n):
            row = cur[i]
            diff = [row[j] - (1 if i == j else 0) for j in range(n)]
            if any(diff):
                v = diff
                if qform(v) != 0:
                    moved = v
                    break
                moved = moved or ("iso", i)
        if moved is None or isinstance(moved, tuple):
            # isotropic difference: reflect in x + cur(x)-style fallback:
            # use v = x with Q(x) != 0 and x not fixed, then v = x - g(x)
            done = False
            for i in range(n):
                e = [Fraction(1 if j == i else 0) for j in range(n)]
                gx = [cur[i][j] for j in range(n)]
                diff = [gx[j] - e[j] for j in range(n)]
                if not any(diff):
                    continue
                if qform(e) != 0:
                    # reflect in e composed trick: r_e moves g towards fixing
                    v = e
                    qv = qform(v)
                    for r in range(n):
                        coeff = 2 * bform(cur[r], v) / qv
                        for j in range(n):
                            cur[r][j] -= coeff * v[j]
                    spin *= qv
                    count += 1
                    done = True
                    break
            if not done:
                raise AssertionError("factorization stalled")
            continue
        v = moved
        qv = qform(v)
        for r in range(n):
            coeff = 2 * bform(cur[r], v) / qv
            for j in range(n):
                cur[r][j] -= coeff * v[j]
        spin *= qv
        count += 1
    raise AssertionError("reflection factorization did not terminate")
