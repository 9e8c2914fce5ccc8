"""Automorphism groups of finite quadratic forms, as matrix groups.

A map of a form with generator orders (d_1..d_k) is stored as a k x k
integer matrix M, row i = digit image of the i-th generator; it acts on
row digit vectors by x -> x*M (column j reduced mod d_j). Composition is
left to right: mul(m1, m2) applies m1 first, then m2.

Groups are handled through stabilizer chains with base point sequence
g_1, g_2, ... (the form generators): the level-l transversal records, for
each point in the orbit of g_l under the level-l group, one group element
moving g_l there while fixing g_1..g_{l-1}. This supports membership
tests, exact orders, coset enumeration, and certified automorphism-group
construction by orbit backtracking.
"""

from __future__ import annotations

import numpy as np


class SearchBudgetExceeded(RuntimeError):
    """Raised when a combinatorial search exceeds its loud-abort guard."""


# ---------------------------------------------------------------------------
# map arithmetic

def identity_matrix(k):
    return tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))


def reduce_matrix(form, m):
    return tuple(tuple(x % d for x, d in zip(row, form.orders)) for row in m)


def mul(form, m1, m2):
    """Apply m1 then m2."""
    k = form.ngens
    out = []
    for i in range(k):
        row = [0] * k
        m1i = m1[i]
        for l in range(k):
            a = m1i[l]
            if a:
                r2 = m2[l]
                for j in range(k):
                    row[j] += a * r2[j]
        out.append(tuple(x % d for x, d in zip(row, form.orders)))
    return tuple(out)


def apply_map(form, x, m):
    k = form.ngens
    row = [0] * k
    for i in range(k):
        a = x[i]
        if a:
            mi = m[i]
            for j in range(k):
                row[j] += a * mi[j]
    return tuple(v % d for v, d in zip(row, form.orders))


def to_perm(form, m):
    """Permutation of element indices induced by the map (numpy array)."""
    t = form.tables()
    img = (t.digits @ np.array(m, dtype=np.int64)) % t.orders
    return t.index_rows(img)


def is_bijective(form, m):
    if form.ngens == 0:
        return True
    return len(np.unique(to_perm(form, m))) == form.size


def inverse(form, m):
    """Inverse map; requires bijectivity."""
    k = form.ngens
    if k == 0:
        return ()
    t = form.tables()
    perm = to_perm(form, m)
    inv = np.empty(form.size, dtype=np.int64)
    inv[perm] = np.arange(form.size)
    rows = []
    for i in range(k):
        gi = t.index_of(form.gen(i))
        rows.append(tuple(int(a) for a in t.digits[inv[gi]]))
    return tuple(rows)


def is_automorphism(form, m):
    """Well defined, q-preserving, bijective."""
    k = form.ngens
    for i in range(k):
        img = tuple(m[i][j] % form.orders[j] for j in range(k))
        o = form.element_order(img)
        if form.orders[i] % o != 0:
            return False
        if form.q(img) != form.qvals[i]:
            return False
        for j in range(i + 1, k):
            if form.b(m[i], m[j]) != form.bmat[i][j]:
                return False
    return is_bijective(form, m)


# ---------------------------------------------------------------------------
# stabilizer chains

class MatrixChain:
    """Incremental Schreier-Sims for subgroups of Aut(form).

    Base = the form generators (in the supplied order). Levels hold orbit
    transversals {point_tuple: matrix}. Deterministic and exact.
    """

    def __init__(self, form, base=None, max_schreier=2_000_000):
        self.form = form
        self.k = form.ngens
        self.base = [tuple(b) for b in (base if base is not None
                                        else (form.gen(i) for i in range(self.k)))]
        self.levels = [{b: identity_matrix(self.k)} for b in self.base]
        self.gens = [[] for _ in self.base]
        self._inv_cache = {}
        self.max_schreier = max_schreier

    def _inv(self, m):
        got = self._inv_cache.get(m)
        if got is None:
            got = inverse(self.form, m)
            self._inv_cache[m] = got
        return got

    def order(self):
        n = 1
        for lvl in self.levels:
            n *= len(lvl)
        return n

    def sift(self, m):
        """Reduce m through the chain; returns (residue, level_reached)."""
        cur = m
        ident = identity_matrix(self.k)
        for l, b in enumerate(self.base):
            img = apply_map(self.form, b, cur)
            trans = self.levels[l].get(img)
            if trans is None:
                return cur, l
            if trans != ident:
                cur = mul(self.form, cur, self._inv(trans))
        return cur, len(self.base)

    def contains(self, m):
        res, lvl = self.sift(reduce_matrix(self.form, m))
        return lvl == len(self.base) and res == identity_matrix(self.k)

    def _gens_for(self, lvl):
        """Generators of the level-lvl group (placed at level >= lvl)."""
        out = []
        for l in range(lvl, len(self.gens)):
            out.extend(self.gens[l])
        return out

    def add_generator(self, m):
        """Add a group element; returns True if the group grew."""
        m = reduce_matrix(self.form, m)
        queue = [m]
        grew = False
        budget = self.max_schreier
        ident = identity_matrix(self.k)
        while queue:
            g = queue.pop()
            res, lvl = self.sift(g)
            if lvl == len(self.base) and res == ident:
                continue
            grew = True
            self.gens[lvl].append(res)
            # the new element joins the level-j group for every j <= lvl,
            # so all those orbits must be re-closed
            for j in range(lvl + 1):
                for s in self._extend_orbit(j, res):
                    budget -= 1
                    if budget < 0:
                        raise SearchBudgetExceeded("schreier generator budget exhausted")
                    queue.append(s)
        return grew

    def _extend_orbit(self, lvl, new_gen=None):
        """Re-close the orbit at level lvl; return fresh Schreier generators.

        When new_gen is given, existing points are swept with it alone and
        only newly reached points are closed under the full generator set.
        """
        form = self.form
        orbit = self.levels[lvl]
        gens = self._gens_for(lvl)
        schreier = []
        seen = set()
        ident = identity_matrix(self.k)

        def sweep(pt, t_pt, gen_list):
            for g in gen_list:
                img = apply_map(form, pt, g)
                t_img = orbit.get(img)
                if t_img is None:
                    orbit[img] = mul(form, t_pt, g)
                    frontier.append(img)
                else:
                    s = mul(form, mul(form, t_pt, g), self._inv(t_img))
                    if s != ident and s not in seen:
                        seen.add(s)
                        schreier.append(s)

        frontier = []
        if new_gen is not None:
            for pt in list(orbit.keys()):
                sweep(pt, orbit[pt], [new_gen])
        else:
            frontier = list(orbit.keys())
        while frontier:
            pt = frontier.pop()
            sweep(pt, orbit[pt], gens)
        return schreier

    def generators(self):
        out = []
        for lg in self.gens:
            out.extend(lg)
        return out

    def all_elements(self):
        """Every element (use only for small groups)."""
        els = [identity_matrix(self.k)]
        for lvl in reversed(self.levels):
            els = [mul(self.form, h, t) for h in els for t in lvl.values()]
        return els


def chain_from_generators(form, gens, base=None, max_schreier=2_000_000):
    ch = MatrixChain(form, base=base, max_schreier=max_schreier)
    for g in gens:
        ch.add_generator(g)
    return ch


# ---------------------------------------------------------------------------
# constraint backtracking: isometries, embeddings

_BINT_CACHE = {}


def _bint_matrix(form):
    got = _BINT_CACHE.get(form)
    if got is None:
        s = form.scale
        got = np.array([[int(v * s) for v in row] for row in form.bmat], dtype=np.int64)
        _BINT_CACHE[form] = got
    return got


def pairing_vector(form, el_idx):
    """b(x, e)*scale mod scale for all elements x, given e's index."""
    t = form.tables()
    e = t.digits[el_idx]
    return (t.digits @ (_bint_matrix(form) @ e)) % form.scale


def find_isometry(src_form, dst_form, sign=1, node_cap=5_000_000, constraint=None):
    """One bijective map src -> dst with q(img) = sign*q, or None."""
    sols = _map_search(src_form, dst_form, sign, want_all=False,
                       bijective=True, node_cap=node_cap, constraint=constraint)
    return sols[0] if sols else None


def all_embeddings(src_form, dst_form, sign=1, node_cap=20_000_000,
                   constraint=None, first_only=False):
    """Injective maps src -> dst with q(img) = sign*q, as matrices."""
    return _map_search(src_form, dst_form, sign, want_all=not first_only,
                       bijective=False, injective=True, node_cap=node_cap,
                       constraint=constraint)


def _map_search(src_form, dst_form, sign, want_all, bijective, injective=False,
                node_cap=5_000_000, constraint=None):
    k = src_form.ngens
    if k == 0:
        if bijective and dst_form.size != 1:
            return []
        return [()]
    if bijective and (src_form.size != dst_form.size
                      or sorted(src_form.orders) != sorted(dst_form.orders)):
        return []
    dst_t = dst_form.tables()
    s_dst = dst_form.scale

    def q_target(i):
        iv = (sign * src_form.qvals[i]) * s_dst
        return int(iv) % (2 * s_dst) if iv.denominator == 1 else None

    def b_target(i, j):
        iv = (sign * src_form.bmat[i][j]) * s_dst
        return int(iv) % s_dst if iv.denominator == 1 else None

    order = sorted(range(k), key=lambda i: (-src_form.orders[i], i))
    pos_of = [0] * k
    for p, i in enumerate(order):
        pos_of[i] = p
    masks0 = []
    for i in order:
        qt = q_target(i)
        if qt is None:
            return []
        masks0.append((dst_t.element_order == src_form.orders[i]) & (dst_t.qint == qt))
    btab = [[b_target(i, j) for j in range(k)] for i in range(k)]
    if any(btab[i][j] is None for i in range(k) for j in range(k)):
        return []

    sols = []
    images = [0] * k
    nodes = [0]

    def rec(pos, masks):
        if nodes[0] > node_cap:
            raise SearchBudgetExceeded("map search exceeded its node cap")
        if pos == k:
            mat = tuple(tuple(int(x) for x in dst_t.digits[images[pos_of[i]]])
                        for i in range(k))
            if (injective or bijective) and not _image_size_ok(src_form, dst_form, mat):
                return False
            if constraint is not None and not constraint(mat):
                return False
            sols.append(mat)
            return not want_all
        i = order[pos]
        for c in np.nonzero(masks[pos])[0]:
            nodes[0] += 1
            images[pos] = int(c)
            vec = pairing_vector(dst_form, int(c))
            new_masks = list(masks)
            ok = True
            for later in range(pos + 1, k):
                j = order[later]
                new_masks[later] = masks[later] & (vec == btab[i][j])
                if not new_masks[later].any():
                    ok = False
                    break
            if ok and rec(pos + 1, new_masks):
                return True
        return False

    try:
        rec(0, masks0)
    except SearchBudgetExceeded:
        if not sols:
            raise
    return sols


def _image_size_ok(src_form, dst_form, mat):
    """|subgroup generated by image rows| == |src| (injectivity test)."""
    seen = {dst_form.zero()}
    frontier = [dst_form.zero()]
    rows = [dst_form.normalize(r) for r in mat]
    while frontier:
        x = frontier.pop()
        for r in rows:
            y = dst_form.add(x, r)
            if y not in seen:
                if len(seen) >= src_form.size:
                    return False
                seen.add(y)
                frontier.append(y)
    return len(seen) == src_form.size


# ---------------------------------------------------------------------------
# certified automorphism groups

def _commute_equations(form, comm):
    """Deferred equations phi(theta(g_i)) = theta(phi(g_i)), indexed by the
    largest generator index they mention; usable once images 0..trigger are
    placed (images are always placed in natural index order here)."""
    k = form.ngens
    eqs_at = [[] for _ in range(k)]
    for th in comm:
        for i in range(k):
            support = {i}
            for j in range(k):
                if th[i][j] % form.orders[j]:
                    support.add(j)
            eqs_at[max(support)].append((i, th))
    return eqs_at


def _check_eqs(form, eqs, imgs):
    for i, th in eqs:
        lhs = [0] * form.ngens
        for j, coeff in enumerate(th[i]):
            if coeff:
                img = imgs[j]
                for l in range(form.ngens):
                    lhs[l] += coeff * img[l]
        lhs = tuple(x % d for x, d in zip(lhs, form.orders))
        if lhs != apply_map(form, imgs[i], th):
            return False
    return True


def aut_chain(form, commuting_with=None, node_cap=5_000_000):
    """Stabilizer chain of Aut(form), or of a centralizer inside it.

    Certified by exhaustive orbit backtracking: at every level each
    candidate image of the base point either lies in the orbit of an
    already-found element or is excluded by an exhausted extension search,
    so the resulting order is exact.

    commuting_with: optional list of automorphism matrices; the result is
    then the joint centralizer of those maps in Aut(form).
    """
    k = form.ngens
    chain = MatrixChain(form)
    if k == 0:
        return chain
    t = form.tables()
    comm = [reduce_matrix(form, c) for c in (commuting_with or [])]
    eqs_at = _commute_equations(form, comm)

    base_masks = []
    for i in range(k):
        qi = int(form.qvals[i] * form.scale) % (2 * form.scale)
        base_masks.append((t.element_order == form.orders[i]) & (t.qint == qi))

    for lvl in range(k):
        mask = base_masks[lvl].copy()
        for j in range(lvl):
            vec = pairing_vector(form, t.index_of(form.gen(j)))
            need = int(form.bmat[lvl][j] * form.scale) % form.scale
            mask &= (vec == need)
        for c in np.nonzero(mask)[0]:
            pt = tuple(int(x) for x in t.digits[c])
            if pt in chain.levels[lvl]:
                continue
            found = _extend_to_aut(form, lvl, pt, base_masks, eqs_at, node_cap)
            if found is not None:
                chain.add_generator(found)
    return chain


def _extend_to_aut(form, lvl, target, base_masks, eqs_at, node_cap):
    """Automorphism fixing g_0..g_{lvl-1}, sending g_lvl to target, or None."""
    k = form.ngens
    t = form.tables()
    s = form.scale
    images = [form.gen(j) for j in range(lvl)] + [target]
    for j in range(lvl + 1):
        if not _check_eqs(form, eqs_at[j], images):
            return None
    masks = []
    for j in range(lvl + 1, k):
        mask = base_masks[j].copy()
        for i, img in enumerate(images):
            vec = pairing_vector(form, t.index_of(img))
            need = int(form.bmat[j][i] * s) % s
            mask &= (vec == need)
        masks.append(mask)
    nodes = [0]

    def rec(pos, cur_masks, imgs):
        j = lvl + 1 + pos
        if j == k:
            mat = tuple(imgs)
            if not is_bijective(form, mat):
                return None
            return mat
        for c in np.nonzero(cur_masks[pos])[0]:
            nodes[0] += 1
            if nodes[0] > node_cap:
                raise SearchBudgetExceeded("automorphism extension search overflow")
            cand = tuple(int(x) for x in t.digits[c])
            if not _check_eqs(form, eqs_at[j], imgs + [cand]):
                continue
            vec = pairing_vector(form, int(c))
            nm = list(cur_masks)
            ok = True
            for later in range(pos + 1, len(cur_masks)):
                jj = lvl + 1 + later
                need = int(form.bmat[jj][j] * s) % s
                nm[later] = cur_masks[later] & (vec == need)
                if not nm[later].any():
                    ok = False
                    break
            if not ok:
                continue
            got = rec(pos + 1, nm, imgs + [cand])
            if got is not None:
                return got
        return None

    return rec(0, masks, images)


# ---------------------------------------------------------------------------
# generic orbit machinery over arbitrary hashable states

def orbit_stabilizer(start, gens, act, compose, invert, identity, cap=2_000_000):
    """Orbit of start under the group generated by gens, with Schreier
    stabilizer generators.

    act(state, g) -> state; compose(g1, g2) applies g1 then g2; invert(g).
    Returns (orbit dict state->transversal, stabilizer generator list).
    """
    orbit = {start: identity}
    frontier = [start]
    stab = []
    seen = set()
    budget = cap
    while frontier:
        s = frontier.pop()
        t_s = orbit[s]
        for g in gens:
            budget -= 1
            if budget < 0:
                raise SearchBudgetExceeded("orbit budget exhausted")
            s2 = act(s, g)
            t2 = orbit.get(s2)
            if t2 is None:
                orbit[s2] = compose(t_s, g)
                frontier.append(s2)
            else:
                w = compose(compose(t_s, g), invert(t2))
                if w not in seen:
                    seen.add(w)
                    if w != identity:
                        stab.append(w)
    return orbit, stab


def map_inverse(src_form, dst_form, mat):
    """Inverse of a bijective map src->dst given by generator-image rows."""
    t_src = src_form.tables()
    t_dst = dst_form.tables()
    img = (t_src.digits @ np.array(mat, dtype=np.int64)) % t_dst.orders
    idx = t_dst.index_rows(img)
    inv = np.empty(dst_form.size, dtype=np.int64)
    inv[idx] = np.arange(src_form.size)
    rows = []
    for i in range(dst_form.ngens):
        gi = t_dst.index_of(dst_form.gen(i))
        rows.append(tuple(int(a) for a in t_src.digits[inv[gi]]))
    return tuple(rows)


def compose_maps(mid_form, dst_form, m1, m2):
    """Apply m1 (into mid_form) then m2 (mid_form -> dst_form)."""
    k = len(m1)
    out = []
    for i in range(k):
        row = [0] * dst_form.ngens
        for l, a in enumerate(m1[i]):
            if a:
                for j in range(dst_form.ngens):
                    row[j] += a * m2[l][j]
        out.append(tuple(x % d for x, d in zip(row, dst_form.orders)))
    return tuple(out)


def reduce_generators(form, gens_with_aux, max_schreier=2_000_000):
    """Keep only generators that grow the group, preserving auxiliary data.

    gens_with_aux: list of (matrix, aux); returns the sublist whose matrices
    strictly grow an incremental chain (same generated group, fewer gens).
    """
    ch = MatrixChain(form, max_schreier=max_schreier)
    kept = []
    for g, aux in gens_with_aux:
        if ch.add_generator(g):
            kept.append((g, aux))
    return kept, ch


class EmbeddingClassifier:
    """Orbits of anti/isometric embeddings of a small source form into a
    target form under a right action group, with canonical transports.

    The orbit tree fixes the image of one source generator per level up to
    the current stabilizer, so its leaves classify embeddings exactly:
    embeddings are right-equivalent iff they canonicalize to the same leaf.
    Stabilizers are certified through the orbit-stabilizer identity, so
    every level's generator set is complete.
    """

    def __init__(self, src_form, dst_form, right_gens, sign=-1):
        self.src = src_form
        self.dst = dst_form
        self.sign = sign
        self.k = src_form.ngens
        self.order = sorted(range(self.k),
                            key=lambda i: (-src_form.orders[i], i))
        self.t = dst_form.tables()
        self.leaves = []
        self.tree = {}
        self._ident = identity_matrix(dst_form.ngens)
        kept, ch = reduce_generators(dst_form, right_gens)
        self.group_order = ch.order()
        self._build((), kept, ch.order(), [None] * self.k)

    def _level_mask(self, pos, images):
        i = self.order[pos]
        s_dst = self.dst.scale
        qt = int((self.sign * self.src.qvals[i]) * s_dst) % (2 * s_dst)
        mask = (self.t.element_order == self.src.orders[i]) & (self.t.qint == qt)
        for prev in range(pos):
            j = self.order[prev]
            c = images[j]
            need = int((self.sign * self.src.bmat[i][j]) * s_dst) % s_dst
            mask = mask & (pairing_vector(self.dst, c) == need)
        placed = [tuple(int(x) for x in self.t.digits[images[self.order[p]]])
                  for p in range(pos)]
        span = {self.dst.zero()}
        frontier = [self.dst.zero()]
        while frontier:
            x = frontier.pop()
            for el in placed:
                y = self.dst.add(x, el)
                if y not in span:
                    span.add(y)
                    frontier.append(y)
        for el in span:
            mask[self.t.index_of(el)] = False
        return mask

    def _build(self, path, gens, group_order, images):
        pos = len(path)
        if pos == self.k:
            leaf_idx = len(self.leaves)
            self.leaves.append(tuple(
                tuple(int(x) for x in self.t.digits[images[i]])
                for i in range(self.k)))
            self.tree[path] = ("leaf", leaf_idx, gens)
            return
        mask = self._level_mask(pos, images)
        cand = [int(c) for c in np.nonzero(mask)[0]]
        if not cand:
            self.tree[path] = ("dead", None, None)
            return
        perms = [to_perm(self.dst, g) for g, _w in gens]
        orbit_of = {}
        transversal = {}
        reps = []
        for c in cand:
            if c in orbit_of:
                continue
            rep = c
            reps.append(rep)
            orbit_of[c] = rep
            transversal[c] = (self._ident, None)
            frontier = [c]
            while frontier:
                x = frontier.pop()
                tx = transversal[x]
                for (g, w), p in zip(gens, perms):
                    y = int(p[x])
                    if y in orbit_of:
                        continue
                    orbit_of[y] = rep
                    transversal[y] = (mul(self.dst, tx[0], g),
                                      self._compose_wit(tx[1], w))
                    frontier.append(y)
        self.tree[path] = ("node", (orbit_of, transversal, reps), None)
        for rep in reps:
            orbit_size = sum(1 for v in orbit_of.values() if v == rep)
            stab, stab_order = self._stabilizer(rep, gens, perms,
                                                group_order, orbit_size)
            img2 = list(images)
            img2[self.order[pos]] = rep
            self._build(path + (rep,), stab, stab_order, img2)

    @staticmethod
    def _compose_wit(w1, w2):
        from . import linalg
        if w1 is None:
            return w2
        if w2 is None:
            return w1
        return linalg.mat_mul(w1, w2)

    @staticmethod
    def _invert_wit(w):
        from . import linalg
        return None if w is None else linalg.invert_unimodular(w)

    def _stabilizer(self, point, gens, perms, group_order, orbit_size_hint):
        transversal = {point: (self._ident, None)}
        frontier = [point]
        edges = []
        while frontier:
            x = frontier.pop()
            tx = transversal[x]
            for (g, w), p in zip(gens, perms):
                y = int(p[x])
                ty = transversal.get(y)
                if ty is None:
                    transversal[y] = (mul(self.dst, tx[0], g),
                                      self._compose_wit(tx[1], w))
                    frontier.append(y)
                else:
                    edges.append((x, (g, w), y))
        target, rem = divmod(group_order, len(transversal))
        if rem:
            raise SearchBudgetExceeded("orbit size does not divide group order")
        ch = MatrixChain(self.dst)
        kept = []
        for x, (g, w), y in edges:
            if ch.order() == target:
                break
            tx = transversal[x]
            ty = transversal[y]
            m = mul(self.dst, mul(self.dst, tx[0], g),
                    inverse(self.dst, ty[0]))
            if ch.add_generator(m):
                wit = self._compose_wit(self._compose_wit(tx[1], w),
                                        self._invert_wit(ty[1]))
                kept.append((m, wit))
        if ch.order() != target:
            raise SearchBudgetExceeded(
                f"stabilizer incomplete: {ch.order()} != {target}")
        return kept, target

    def canonicalize(self, psi_rows):
        """(leaf index, right transporter r, witness): psi * r = leaf."""
        images = [self.t.index_of(tuple(psi_rows[i])) for i in range(self.k)]
        rmat = self._ident
        rwit = None
        path = ()
        for pos in range(self.k):
            kind, payload, _x = self.tree[path]
            if kind != "node":
                raise SearchBudgetExceeded("canonicalization fell off the tree")
            orbit_of, transversal, _reps = payload
            cur = images[self.order[pos]]
            if cur not in orbit_of:
                raise SearchBudgetExceeded("embedding outside the orbit tree")
            tmat, twit = transversal[cur]
            if tmat != self._ident:
                tinv = inverse(self.dst, tmat)
                perm = to_perm(self.dst, tinv)
                images = [int(perm[x]) for x in images]
                rmat = mul(self.dst, rmat, tinv)
                rwit = self._compose_wit(rwit, self._invert_wit(twit))
            path = path + (images[self.order[pos]],)
        kind, leaf_idx, _g = self.tree[path]
        if kind != "leaf":
            raise SearchBudgetExceeded("canonicalization reached a dead node")
        return leaf_idx, rmat, rwit

    def leaf_stabilizer(self, leaf_idx):
        """Right-group stabilizer generators (with witnesses) of the leaf."""
        for path, (kind, payload, gens) in self.tree.items():
            if kind == "leaf" and payload == leaf_idx:
                return gens
        raise KeyError(leaf_idx)

    def leaf_path_rows(self, leaf_idx):
        return self.leaves[leaf_idx]


# ---------------------------------------------------------------------------
# tiny Schreier-Sims for vertex permutations (small degree)

class PermBSGS:
    """Deterministic BSGS for permutation tuples of small degree."""

    def __init__(self, degree, gens=()):
        self.n = degree
        self.base = []
        self.transversals = []   # list of {point: perm}
        self.strong = [[]]
        for g in gens:
            self.add(tuple(g))

    @staticmethod
    def _mul(p, q):
        return tuple(q[p[i]] for i in range(len(p)))

    @staticmethod
    def _inv(p):
        out = [0] * len(p)
        for i, v in enumerate(p):
            out[v] = i
        return tuple(out)

    def _sift(self, g):
        for lvl, b in enumerate(self.base):
            img = g[b]
            t = self.transversals[lvl].get(img)
            if t is None:
                return g, lvl
            g = self._mul(g, self._inv(t))
        return g, len(self.base)

    def add(self, g):
        g = tuple(g)
        ident = tuple(range(self.n))
        queue = [g]
        grew = False
        while queue:
            h = queue.pop()
            res, lvl = self._sift(h)
            if res == ident:
                continue
            grew = True
            if lvl == len(self.base):
                b = next(i for i in range(self.n) if res[i] != i)
                self.base.append(b)
                self.transversals.append({b: ident})
                self.strong.append([])
            self.strong[lvl].append(res)
            for j in range(lvl + 1):
                queue.extend(self._close(j))
        return grew

    def _gens_for(self, lvl):
        out = []
        for l in range(lvl, len(self.strong) - 1):
            out.extend(self.strong[l])
        return out

    def _close(self, lvl):
        orbit = self.transversals[lvl]
        gens = self._gens_for(lvl)
        frontier = list(orbit.keys())
        ident = tuple(range(self.n))
        schreier = []
        seen = set()
        while frontier:
            pt = frontier.pop()
            tp = orbit[pt]
            for g in gens:
                img = g[pt]
                t2 = orbit.get(img)
                if t2 is None:
                    orbit[img] = self._mul(tp, g)
                    frontier.append(img)
                else:
                    w = self._mul(self._mul(tp, g), self._inv(t2))
                    if w != ident and w not in seen:
                        seen.add(w)
                        schreier.append(w)
        return schreier

    def order(self):
        from math import prod
        return prod(len(t) for t in self.transversals) if self.base else 1

    def generators(self):
        out = []
        for lvl in self.strong:
            out.extend(lvl)
        # dedupe preserving order
        seen = set()
        res = []
        for g in out:
            if g not in seen:
                seen.add(g)
                res.append(g)
        return res

    def elements(self, cap=200_000):
        els = [tuple(range(self.n))]
        for trans in reversed(self.transversals):
            els = [self._mul(h, t) for h in els for t in trans.values()]
            if len(els) > cap:
                raise SearchBudgetExceeded("permutation group too large to list")
        return els
