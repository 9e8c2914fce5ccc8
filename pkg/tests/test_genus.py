import random
from fractions import Fraction

import pytest

from emptysextic import fqf, genus, groups
from emptysextic import lattice as lat


def test_hilbert_product_formula():
    rng = random.Random(17)
    for _ in range(100):
        a = rng.choice([-1, 1]) * rng.randint(1, 60)
        b = rng.choice([-1, 1]) * rng.randint(1, 60)
        places = {0, 2} | genus._prime_factors(abs(a)) | genus._prime_factors(abs(b))
        prod = 1
        for p in places:
            prod *= genus.hilbert_symbol(a, b, p)
        assert prod == 1


def test_rational_representation():
    g2 = ((1, 0), (0, 1))
    assert genus.represents_rational(g2, 2)
    assert not genus.represents_rational(g2, 3)
    assert not genus.represents_rational(g2, -1)
    g3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert genus.represents_rational(g3, 3)
    assert not genus.represents_rational(g3, 7)
    assert not genus.represents_rational(g3, 15)


def test_jordan_decomposition_shapes():
    a9 = lat.root_lattice("A", 9)
    blocks = genus.jordan_decomposition(a9, 2)
    assert [(b.scale, b.rank) for b in blocks] == [(0, 8), (1, 1)]
    blocks = genus.jordan_decomposition(lat.root_lattice("A", 7), 2)
    assert [(b.scale, b.rank) for b in blocks] == [(0, 6), (3, 1)]
    blocks = genus.jordan_decomposition(lat.rescale(lat.root_lattice("E", 8), 2), 2)
    assert [(b.scale, b.rank) for b in blocks] == [(1, 8)]


def test_same_genus_basics():
    u = lat.hyperbolic_plane()
    assert genus.same_genus(u, u)
    assert not genus.same_genus(lat.root_lattice("A", 1), lat.line(2))
    # the empty-structure fixed lattice in its reference model genus
    e82u2 = lat.direct_sum(lat.rescale(lat.root_lattice("E", 8), 2),
                           lat.rescale(lat.hyperbolic_plane(), 2))
    assert genus.same_genus(e82u2, e82u2)


def test_exists_even_lattice_fixtures():
    SP = lat.SignaturePair
    a9 = lat.root_lattice("A", 9)
    s = lat.direct_sum(a9, a9, lat.line(2))
    f, _ = fqf.discriminant_form(s)
    assert genus.exists_even_lattice(SP(2, 1), fqf.negate(f))
    assert not genus.exists_even_lattice(SP(0, 0), f)
    triv = fqf.TRIVIAL_FORM
    assert genus.exists_even_lattice(SP(3, 19), triv)
    assert not genus.exists_even_lattice(SP(1, 2), triv)
    fa1, _ = fqf.discriminant_form(lat.root_lattice("A", 1))
    assert not genus.exists_even_lattice(SP(1, 1), fa1)
    assert genus.exists_even_lattice(SP(0, 1), fa1)
    assert not genus.exists_even_lattice(SP(1, 0), fa1)


def test_exists_even_lattice_self_realization():
    rng = random.Random(2)
    pool = [lat.root_lattice("A", k) for k in (1, 2, 3, 5, 8)]
    pool += [lat.root_lattice("D", 4), lat.root_lattice("D", 6),
             lat.root_lattice("E", 7), lat.hyperbolic_plane()]
    for _ in range(12):
        parts = [pool[rng.randrange(len(pool))] for _ in range(rng.randint(1, 3))]
        m = lat.direct_sum(*parts)
        f, _ = fqf.discriminant_form(m)
        assert genus.exists_even_lattice(lat.signature(m), f)


def test_unique_in_genus():
    assert genus.unique_in_genus(lat.line(-2))
    assert genus.unique_in_genus(lat.hyperbolic_plane())
    L = lat.direct_sum(*([lat.root_lattice("E", 8)] * 2
                         + [lat.hyperbolic_plane()] * 3))
    assert genus.unique_in_genus(L)
    e82u2 = lat.direct_sum(lat.rescale(lat.root_lattice("E", 8), 2),
                           lat.rescale(lat.hyperbolic_plane(), 2))
    assert genus.unique_in_genus(e82u2)


def test_pell():
    assert genus.pell_fundamental(2) == (3, 2)
    assert genus.pell_fundamental(3) == (2, 1)
    for d in (2, 3, 5, 7, 10, 13, 19, 21):
        f = genus.pell_fundamental(d)
        brute = genus.pell_solutions_below(d, 10 ** 6)
        assert brute[0] == f


def test_rank2_image_pell_case():
    # diag(1, -2) rescaled as an even lattice diag(2, -4)
    m = lat.IntegerLattice(((2, 0), (0, -4)))
    di = genus.discr_image(m)
    aut = groups.aut_chain(di.form).order()
    assert di.order == aut == 2
    for dm, r in di.witnesses.items():
        assert genus.is_isometry_matrix(m, r)
        assert genus.discr_action_matrix(m, r) == dm


def test_image_2a9_index_two():
    t = lat.direct_sum(lat.line(-2), lat.line(10), lat.line(10))
    f, _ = fqf.discriminant_form(t)
    aut = groups.aut_chain(f).order()
    image = genus.image_order_indefinite(t)
    assert aut // image == 2
    di = genus.discr_image(t)
    assert di.order == image
    # every generator lifts: the stored witness reproduces it
    for dm, r in di.witnesses.items():
        assert genus.is_isometry_matrix(t, r)
        assert genus.discr_action_matrix(t, r) == dm


def test_image_full_for_unimodular_padding():
    m = lat.direct_sum(lat.hyperbolic_plane(), lat.root_lattice("A", 2))
    assert genus.image_order_indefinite(m) == 2
    m2 = lat.direct_sum(lat.hyperbolic_plane(), lat.root_lattice("E", 8))
    assert genus.image_order_indefinite(m2) == 1


def test_spinor_genus_counts():
    t = lat.direct_sum(lat.line(-2), lat.line(10), lat.line(10))
    assert genus.spinor_genus_count(t) == 1
    e82u2 = lat.direct_sum(lat.rescale(lat.root_lattice("E", 8), 2),
                           lat.rescale(lat.hyperbolic_plane(), 2))
    assert genus.spinor_genus_count(e82u2) == 1


def test_reflection_matrix():
    a1 = lat.root_lattice("A", 1)
    r = genus.reflection_matrix(a1, (1,))
    assert r == ((-1,),)
    u = lat.hyperbolic_plane()
    r = genus.reflection_matrix(u, (1, -1))
    # swaps the two isotropic generators
    assert tuple(sorted(r)) == ((0, 1), (1, 0))
    with pytest.raises(ValueError):
        genus.reflection_matrix(u, (1, 0))   # isotropic vector


def test_rational_spinor_det_on_reflections():
    m = lat.direct_sum(lat.root_lattice("A", 2), lat.line(4))
    for v in [(1, 0, 0), (0, 1, 0), (1, 1, 0)]:
        r = genus.reflection_matrix(m, v)
        d, s = genus.rational_spinor_det(m.gram, r)
        assert d == -1
        assert genus._det_class(Fraction(s) / m.square(v), 2) in (1,)


def test_genus_symbol_text():
    sym = genus.genus_symbol(lat.root_lattice("A", 9))
    txt = genus.format_genus_symbol(sym)
    assert "sig(0,9)" in txt and "5" in txt
