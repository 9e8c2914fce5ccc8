import itertools
import random

from emptysextic import fqf, groups
from emptysextic import lattice as lat


def brute_aut_count(form):
    k = form.ngens
    if k == 0:
        return 1
    rows_choices = [list(itertools.product(*[range(d) for d in form.orders]))
                    for _ in range(k)]
    cnt = 0
    for rows in itertools.product(*rows_choices):
        if groups.is_automorphism(form, rows):
            cnt += 1
    return cnt


def test_aut_chain_matches_brute_force_small():
    cases = [
        lat.root_lattice("A", 1),
        lat.root_lattice("A", 2),
        lat.root_lattice("A", 3),
        lat.rescale(lat.hyperbolic_plane(), 2),
        lat.root_lattice("D", 4),
        lat.direct_sum(lat.root_lattice("A", 1), lat.root_lattice("A", 2)),
        lat.direct_sum(lat.root_lattice("A", 1), lat.root_lattice("A", 1)),
        lat.direct_sum(lat.root_lattice("D", 4), lat.root_lattice("A", 1)),
        lat.root_lattice("A", 7),
        lat.direct_sum(lat.root_lattice("A", 3), lat.root_lattice("A", 3)),
    ]
    for m in cases:
        f, _ = fqf.discriminant_form(m)
        if f.size > 64:
            continue
        assert groups.aut_chain(f).order() == brute_aut_count(f)


def test_chain_membership_and_order():
    f, _ = fqf.discriminant_form(
        lat.direct_sum(lat.root_lattice("A", 9), lat.line(2)))
    ch = groups.aut_chain(f)
    for g in [groups.identity_matrix(f.ngens)] + ch.generators()[:5]:
        assert ch.contains(g)
    # -1 is always an automorphism
    minus = tuple(tuple((-1 if i == j else 0) % d for j, d in enumerate(f.orders))
                  for i in range(f.ngens))
    assert ch.contains(groups.reduce_matrix(f, minus))


def test_centralizer_chain():
    a1 = lat.root_lattice("A", 1)
    m = lat.direct_sum(a1, a1)
    f, _ = fqf.discriminant_form(m)
    swap = ((0, 1), (1, 0))
    cent = groups.aut_chain(f, commuting_with=[swap])
    full = groups.aut_chain(f)
    assert cent.order() <= full.order()
    for g in cent.generators():
        assert groups.mul(f, g, swap) == groups.mul(f, swap, g)


def test_find_isometry_and_negation():
    a2 = lat.root_lattice("A", 2)
    f, _ = fqf.discriminant_form(a2)
    assert groups.find_isometry(f, f, sign=1) is not None
    neg = fqf.negate(f)
    w = groups.find_isometry(f, neg, sign=-1)
    assert w is not None


def test_embedding_classifier_counts():
    # embeddings of the A1 form into discr(A1 + A1): two leaves collapse
    a1 = lat.root_lattice("A", 1)
    f1, _ = fqf.discriminant_form(a1)
    f2, _ = fqf.discriminant_form(lat.direct_sum(a1, a1))
    ident = groups.identity_matrix(f2.ngens)
    swap = ((0, 1), (1, 0))
    cls = groups.EmbeddingClassifier(f1, f2, [(swap, None)], sign=1)
    # two embeddings, one orbit under the swap
    assert len(cls.leaves) == 1
    cls2 = groups.EmbeddingClassifier(f1, f2, [], sign=1)
    assert len(cls2.leaves) == 2


def test_orbit_stabilizer_identity():
    rng = random.Random(1)
    f, _ = fqf.discriminant_form(lat.root_lattice("A", 3))
    ch = groups.aut_chain(f)
    gens = [(g, None) for g in ch.generators()]

    def act(x, gw):
        return groups.apply_map(f, x, gw[0])

    def compose(a, b):
        return (groups.mul(f, a[0], b[0]), None)

    def invert(a):
        return (groups.inverse(f, a[0]), None)

    ident = (groups.identity_matrix(f.ngens), None)
    start = f.gen(0)
    orbit, stab = groups.orbit_stabilizer(start, gens, act, compose,
                                          invert, ident)
    stab_chain = groups.chain_from_generators(f, [s[0] for s in stab])
    assert len(orbit) * stab_chain.order() == ch.order()
