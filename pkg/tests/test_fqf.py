import random
from fractions import Fraction

import pytest

from emptysextic import fqf, groups
from emptysextic import lattice as lat


def test_discriminant_form_a1():
    f, _ = fqf.discriminant_form(lat.root_lattice("A", 1))
    assert f.orders == (2,)
    assert f.qvals[0] % 2 == Fraction(3, 2)   # -1/2 mod 2


def test_discriminant_form_u2():
    f, _ = fqf.discriminant_form(lat.rescale(lat.hyperbolic_plane(), 2))
    assert f.orders == (2, 2)
    assert f.q(f.gen(0)) == 0 and f.q(f.gen(1)) == 0
    assert f.q((1, 1)) == 1


def test_unimodular_trivial_form():
    L = lat.direct_sum(*([lat.root_lattice("E", 8)] * 2
                         + [lat.hyperbolic_plane()] * 3))
    f, _ = fqf.discriminant_form(L)
    assert f.size == 1


def test_p_part_split():
    f, _ = fqf.discriminant_form(lat.root_lattice("A", 9))
    p2, _ = fqf.p_part(f, 2)
    p5, _ = fqf.p_part(f, 5)
    assert p2.orders == (2,) and p5.orders == (5,)
    assert fqf.p_part(fqf.TRIVIAL_FORM, 3)[0].size == 1


def test_orthogonal_sum_vs_direct_sum():
    a2 = lat.root_lattice("A", 2)
    f1, _ = fqf.discriminant_form(a2)
    combo = fqf.orthogonal_sum(f1, f1)
    f2, _ = fqf.discriminant_form(lat.direct_sum(a2, a2))
    from emptysextic import genus
    assert genus.is_isomorphic_forms(combo, f2)


def test_isotropic_subgroup_examples():
    a1 = lat.root_lattice("A", 1)
    f2, _ = fqf.discriminant_form(lat.direct_sum(a1, a1))
    iso = [el for el in f2.all_elements() if any(el) and f2.q(el) == 0]
    assert iso == []
    f4, _ = fqf.discriminant_form(lat.direct_sum(a1, a1, a1, a1))
    iso = [el for el in f4.all_elements() if any(el) and f4.q(el) == 0]
    assert iso == [(1, 1, 1, 1)]
    assert fqf.FqfSubgroup(f4, ((1, 1, 1, 1),)).is_isotropic()


def test_milgram_signature():
    rng = random.Random(4)
    pool = [lat.root_lattice("A", k) for k in (1, 2, 3, 5, 7)]
    pool += [lat.root_lattice("D", 4), lat.root_lattice("E", 6),
             lat.rescale(lat.hyperbolic_plane(), 2)]
    for _ in range(15):
        parts = [pool[rng.randrange(len(pool))] for _ in range(rng.randint(1, 3))]
        m = lat.direct_sum(*parts)
        f, _ = fqf.discriminant_form(m)
        s = lat.signature(m)
        assert f.signature_mod8() == (s.positive - s.negative) % 8


def test_quotient_form_matches_glued_discriminant():
    a1 = lat.root_lattice("A", 1)
    m = lat.direct_sum(a1, a1, a1, a1)
    form, _ = fqf.discriminant_form(m)
    sub = fqf.FqfSubgroup(form, ((1, 1, 1, 1),))
    qf, _proj, _lift = fqf.quotient_form(form, sub)
    glued, _ = fqf.glue_extension(m, sub)
    f2, _ = fqf.discriminant_form(glued)
    from emptysextic import genus
    assert genus.is_isomorphic_forms(qf, f2)


def test_glue_pair_and_involution():
    # the worked gluing: 2A9 + <2> against its transcendental partner
    a9 = lat.root_lattice("A", 9)
    s_h = lat.direct_sum(a9, a9, lat.line(2))
    t = lat.direct_sum(lat.line(-2), lat.line(10), lat.line(10))
    from emptysextic import genus, groups
    fs, _ = fqf.discriminant_form(s_h)
    ft, _ = fqf.discriminant_form(t)
    psi = groups.find_isometry(fs, ft, sign=-1)
    assert psi is not None
    full = fqf.FqfSubgroup(fs, tuple(fs.gen(i) for i in range(fs.ngens)))

    def psi_map(x):
        return tuple(
            sum(x[i] * psi[i][j] for i in range(fs.ngens)) % ft.orders[j]
            for j in range(ft.ngens))

    glued, _basis = fqf.glue_pair(s_h, t, full, psi_map)
    assert abs(lat.det(glued)) == 1
    assert glued.is_even
    assert tuple(lat.signature(glued)) == (3, 19)


def test_extend_involution_requires_exponent_two():
    a3 = lat.root_lattice("A", 3)
    f, _ = fqf.discriminant_form(a3)
    other = lat.root_lattice("A", 3)
    sub = fqf.FqfSubgroup(f, (f.gen(0),))   # order 4
    with pytest.raises(ValueError):
        fqf.extend_involution(a3, other, sub, lambda x: x)


def test_subgroup_form_presentation():
    m = lat.direct_sum(lat.root_lattice("A", 9), lat.line(2))
    f, _ = fqf.discriminant_form(m)
    sub, lifts = fqf.subgroup_form(f, [f.smul(2, f.gen(1))])
    assert sub.orders == (5,)
    assert f.q(lifts[0]) == sub.qvals[0]
