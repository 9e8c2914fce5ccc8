"""ADE root system catalog, the rank-10 hyperbolic root basis, induced
subgraph embeddings, and the explicit reference model of the empty
involution.

The ambient even unimodular hyperbolic lattice of signature (1, 9) is
realized once and for all on the simple-root basis of its reflection
group's fundamental polyhedron: a chain of nine vertices with one extra
vertex attached to the third. All embeddings are expressed in this basis,
where induced-subgraph spans are automatically primitive.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

from . import fqf, genus, linalg
from . import lattice as lat

# vertices 0..8 form the chain; vertex 9 hangs off vertex 2
E10_EDGES = tuple([(i, i + 1) for i in range(8)] + [(2, 9)])
E10_ADJ = {i: frozenset(j for a, b in E10_EDGES for j in (a, b)
                        if (i in (a, b)) and j != i) for i in range(10)}


@functools.lru_cache(maxsize=None)
def e10_lattice():
    m = lat.from_adjacency(10, list(E10_EDGES))
    assert linalg.det_bareiss(m.gram) == -1
    s = lat.signature(m)
    assert (s.positive, s.negative) == (1, 9)
    return m


@dataclass(frozen=True)
class RootSystem:
    """Multiset of ADE labels, canonically ordered."""
    parts: tuple     # tuple of (letter, index), sorted (A<D<E, index)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(sorted(self.parts)))
        for letter, n in self.parts:
            if letter not in "ADE":
                raise ValueError(f"bad family {letter}")
            if letter == "D" and n < 4 or letter == "E" and n not in (6, 7, 8) \
                    or n < 1:
                raise ValueError(f"bad component {letter}{n}")

    @property
    def rank(self):
        return sum(n for _l, n in self.parts)

    @property
    def ncomponents(self):
        return len(self.parts)

    def multiplicities(self):
        out = {}
        for p in self.parts:
            out[p] = out.get(p, 0) + 1
        return out

    def label(self):
        """Table-style label: components sorted E > D > A, index descending,
        with multiplicities, e.g. '2A5+2A3+2A1'; '0' for the empty system."""
        if not self.parts:
            return "0"
        mult = self.multiplicities()
        order = sorted(mult, key=lambda p: ("ADE".index(p[0]), p[1]), reverse=True)
        return "+".join(f"{mult[p]}{p[0]}{p[1]}" if mult[p] > 1 else f"{p[0]}{p[1]}"
                        for p in order)

    def lattice(self):
        if not self.parts:
            return lat.IntegerLattice(())
        return lat.direct_sum(*[lat.root_lattice(l, n) for l, n in self.parts])

    def doubled(self):
        return RootSystem(self.parts + self.parts)

    def halved(self):
        mult = self.multiplicities()
        if any(v % 2 for v in mult.values()):
            raise ValueError("not an evenly doubled root system")
        parts = []
        for p, v in mult.items():
            parts.extend([p] * (v // 2))
        return RootSystem(tuple(parts))

    def is_even_multiset(self):
        return all(v % 2 == 0 for v in self.multiplicities().values())


_LABEL_RE = re.compile(r"(\d*)([ADE])(\d+)$")


def parse_label(text):
    parts = []
    if text.strip() in ("", "0", "empty"):
        return RootSystem(())
    for chunk in text.replace(" ", "").split("+"):
        m = _LABEL_RE.match(chunk)
        if not m:
            raise ValueError(f"bad root system label {chunk!r}")
        mult = int(m.group(1)) if m.group(1) else 1
        parts.extend([(m.group(2), int(m.group(3)))] * mult)
    return RootSystem(tuple(parts))


def from_component_labels(labels):
    return RootSystem(tuple(labels))


@functools.lru_cache(maxsize=None)
def all_root_systems(max_rank):
    """All ADE root systems of total rank <= max_rank (including empty)."""
    comps = [("A", n) for n in range(1, max_rank + 1)]
    comps += [("D", n) for n in range(4, max_rank + 1)]
    comps += [("E", n) for n in (6, 7, 8) if n <= max_rank]
    out = []

    def rec(idx, remaining, acc):
        out.append(RootSystem(tuple(acc)))
        for i in range(idx, len(comps)):
            l, n = comps[i]
            if n <= remaining:
                rec(i, remaining - n, acc + [(l, n)])

    rec(0, max_rank, [])
    uniq = {}
    for r in out:
        uniq[r.parts] = r
    return sorted(uniq.values(), key=lambda r: (r.rank, r.parts))


def enumerate_even_root_systems(max_rank):
    """All root systems with every multiplicity even, 0 < rank <= max_rank."""
    half = all_root_systems(max_rank // 2)
    out = [r.doubled() for r in half if r.rank > 0]
    return sorted(out, key=lambda r: (r.rank, r.parts))


# ---------------------------------------------------------------------------
# induced subgraph embeddings

def _subset_components(subset):
    adj = {v: E10_ADJ[v] & subset for v in subset}
    seen = set()
    comps = []
    for v in sorted(subset):
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
        comps.append(tuple(sorted(comp)))
    return comps


def _component_type(comp):
    sub = set(comp)
    degs = {v: len(E10_ADJ[v] & sub) for v in comp}
    n = len(comp)
    mx = max(degs.values()) if comp else 0
    if mx <= 2:
        return ("A", n)
    branch = [v for v, d in degs.items() if d == 3]
    if len(branch) != 1 or mx > 3:
        return None
    b = branch[0]
    arms = []
    for s in E10_ADJ[b] & sub:
        ln = 1
        prev, cur = b, s
        while True:
            nxt = [w for w in (E10_ADJ[cur] & sub) if w != prev]
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
    return None


@functools.lru_cache(maxsize=None)
def induced_subgraph_embeddings(rs):
    """All vertex subsets of the rank-10 graph inducing exactly Dynkin(rs).

    The graph has no nontrivial automorphisms, so subsets are the
    embeddings. Each subset is automatically a primitive sublattice (it is
    spanned by basis vectors).
    """
    target = tuple(sorted(rs.parts))
    if rs.rank > 10:
        return ()
    hits = []
    for bits in itertools.combinations(range(10), rs.rank):
        subset = frozenset(bits)
        comps = _subset_components(subset)
        types = []
        ok = True
        for c in comps:
            t = _component_type(c)
            if t is None:
                ok = False
                break
            types.append(t)
        if ok and tuple(sorted(types)) == target:
            hits.append(tuple(sorted(subset)))
    return tuple(hits)


def embedding_sublattice(vertices):
    amb = e10_lattice()
    rows = [tuple(1 if j == v else 0 for j in range(10)) for v in vertices]
    return lat.SublatticeEmbedding(amb, linalg.mat_tuple(rows))


def primitive_embedding_exists(m, target_sig, target_form=fqf.TRIVIAL_FORM):
    """Nikulin criterion: m embeds primitively into an even lattice, unique
    in its genus, with the given signature and (default unimodular trivial)
    discriminant form -- decided through the complementary genus."""
    if target_form.size != 1:
        raise NotImplementedError("only unimodular targets are needed here")
    s = lat.signature(m) if m.rank else lat.SignaturePair(0, 0)
    cs = lat.SignaturePair(target_sig.positive - s.positive,
                           target_sig.negative - s.negative)
    if cs.positive < 0 or cs.negative < 0:
        return False
    f, _ = fqf.discriminant_form(m)
    return genus.exists_even_lattice(cs, fqf.negate(f))


def subgraph_embeddable(rs):
    return bool(induced_subgraph_embeddings(rs)) if rs.rank else True


def nikulin_embeddable(rs):
    if rs.rank == 0:
        return True
    return primitive_embedding_exists(rs.lattice(), lat.SignaturePair(1, 9))


# ---------------------------------------------------------------------------
# the reference model of the empty involution

@dataclass(frozen=True)
class ReferenceModel:
    ambient: object        # even unimodular (3,19) lattice
    basis: tuple           # glued basis in (L+ (+) L-) rational coordinates
    theta: tuple           # involution matrix (row convention)
    h: tuple               # polarization coordinates in ambient basis
    plus_roots: tuple      # e^+_i coordinates (ambient basis)
    minus_roots: tuple     # e^-_i coordinates


def _express(basis, v):
    """Coordinates of rational row v in the glued basis."""
    binv = linalg.invert_rational(basis)
    out = linalg.vec_mat([Fraction(x) for x in v], binv)
    res = []
    for x in out:
        fx = Fraction(x)
        if fx.denominator != 1:
            raise ValueError("vector is not in the glued lattice")
        res.append(int(fx))
    return tuple(res)


@functools.lru_cache(maxsize=None)
def build_reference_model(subset):
    """The explicit empty-involution model for a set of graph vertices.

    L+ = (rank-10 root basis)(2) with basis e'_i; L- = same (2) plus a
    hyperbolic plane, basis e''_i, u1, u2; glued along the diagonal
    (Z/2)^10 by e_i^+- = (e'_i +- e''_i)/2. Returns a ReferenceModel with
    the polarization h = u1 + u2 and the doubled root vectors over the
    chosen subset.
    """
    g10 = e10_lattice()
    lplus = lat.rescale(g10, 2)
    lminus = lat.direct_sum(lat.rescale(g10, 2), lat.hyperbolic_plane())
    fplus, _ = fqf.discriminant_form(lplus)
    fminus, _ = fqf.discriminant_form(lminus)
    # discriminant generators are e'_i/2 equivalents; identify digits by
    # matching dual classes of e_i/2 directly
    kgens = []
    psi_pairs = []
    for i in range(10):
        vplus = tuple(Fraction(1, 2) if j == i else Fraction(0) for j in range(10))
        vminus = tuple(Fraction(1, 2) if j == i else Fraction(0) for j in range(12))
        dplus = genus._dual_class_digits(lplus, vplus, fplus)
        dminus = genus._dual_class_digits(lminus, vminus, fminus)
        kgens.append(dplus)
        psi_pairs.append((dplus, dminus))
    ksub = fqf.FqfSubgroup(fplus, tuple(kgens))
    lookup = {}
    for x in ksub.elements:
        acc = fminus.zero()
        # decompose x over the kgens (they are F2-independent coordinates)
        for (dp, dm), bit in zip(psi_pairs, _f2_coords(x, kgens, fplus)):
            if bit:
                acc = fminus.add(acc, dm)
        lookup[x] = acc
    glued, basis, theta = fqf.extend_involution(lplus, lminus, ksub,
                                                lambda x: lookup[x])
    assert glued.is_even
    assert abs(linalg.det_bareiss(glued.gram)) == 1
    s = lat.signature(glued)
    assert (s.positive, s.negative) == (3, 19)
    h = _express(basis, [0] * 20 + [1, 1])
    plus = []
    minus = []
    for i in subset:
        ep = [Fraction(0)] * 22
        em = [Fraction(0)] * 22
        ep[i] = Fraction(1, 2)
        ep[10 + i] = Fraction(1, 2)
        em[i] = Fraction(1, 2)
        em[10 + i] = Fraction(-1, 2)
        plus.append(_express(basis, ep))
        minus.append(_express(basis, em))
    theta = linalg.mat_tuple(theta)
    # theta must negate h and swap the doubled roots
    hv = tuple(h)
    assert linalg.vec_mat(hv, theta) == tuple(-x for x in hv)
    return ReferenceModel(glued, basis, theta, hv, tuple(plus), tuple(minus))


def _f2_coords(x, gens, form):
    """Coordinates of x over independent exponent-2 generators (F2 solve)."""
    rows = [list(g) + [0] * len(gens) for g in gens]
    for i in range(len(gens)):
        rows[i][len(x) + i] = 1      # augment with identity to track combos
    target = [a % 2 for a in x]
    # forward eliminate
    pivots = []
    r = 0
    for c in range(len(x)):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % 2), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] % 2:
                rows[i] = [(u + v) % 2 for u, v in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
    sol = [0] * len(gens)
    t = list(target)
    for r, c in pivots:
        if t[c]:
            t = [(u + v) % 2 for u, v in zip(t, rows[r][:len(x)])]
            for j in range(len(gens)):
                sol[j] = (sol[j] + rows[r][len(x) + j]) % 2
    if any(t):
        raise ValueError("element not in the span of the generators")
    return sol
