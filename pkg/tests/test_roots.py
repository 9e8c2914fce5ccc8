import pytest

from emptysextic import fqf, genus, roots
from emptysextic import lattice as lat


def test_labels_roundtrip():
    for text in ["2A5+4A2", "6A3", "2E8+2A1", "12A1", "2D6+2A3", "A9"]:
        rs = roots.parse_label(text)
        assert rs.label() == text
        assert roots.parse_label(rs.label()).parts == rs.parts
    assert roots.RootSystem(()).label() == "0"


def test_even_catalog():
    systems = roots.enumerate_even_root_systems(4)
    assert [r.label() for r in systems] == ["2A1", "4A1", "2A2"]
    all18 = roots.enumerate_even_root_systems(18)
    assert any(r.label() == "2A9" for r in all18)
    for r in all18:
        assert r.is_even_multiset()


def test_e10_model():
    m = roots.e10_lattice()
    assert tuple(lat.signature(m)) == (1, 9)
    assert abs(lat.det(m)) == 1


def test_subgraph_embeddings():
    assert roots.induced_subgraph_embeddings(roots.parse_label("A9"))
    assert roots.induced_subgraph_embeddings(roots.parse_label("D4"))
    assert not roots.induced_subgraph_embeddings(roots.parse_label("6A1"))
    assert not roots.induced_subgraph_embeddings(roots.parse_label("10A1"))
    # every embedding of a basis subset is primitive; complements match dets
    emb = roots.induced_subgraph_embeddings(roots.parse_label("A2"))[0]
    sub = roots.embedding_sublattice(emb)
    assert lat.is_primitive(roots.e10_lattice(), sub)
    comp = lat.orthogonal_complement(roots.e10_lattice(), sub)
    assert abs(lat.det(comp.lattice())) % 3 == 0


def test_oracle_equivalence_rank_le_9():
    """Induced-subgraph embeddability == the arithmetic embedding criterion."""
    mismatches = []
    for r in roots.all_root_systems(9):
        if r.rank == 0:
            continue
        a = roots.subgraph_embeddable(r)
        b = roots.nikulin_embeddable(r)
        if a != b:
            mismatches.append((r.label(), a, b))
    assert mismatches == []


def test_reference_model_a1():
    model = roots.build_reference_model((0,))
    L = model.ambient
    assert tuple(lat.signature(L)) == (3, 19)
    assert L.is_even
    assert L.square(model.h) == 2
    th = model.theta
    from emptysextic import linalg
    assert linalg.mat_mul(th, th) == linalg.identity(22)
    assert linalg.vec_mat(model.h, th) == tuple(-x for x in model.h)
    for v in model.plus_roots + model.minus_roots:
        assert L.square(v) == -2
    # fixed lattice lies in the genus of the doubled hyperbolic model
    delta = linalg.mat_tuple(
        [[th[i][j] - (1 if i == j else 0) for j in range(22)] for i in range(22)])
    ker = lat.SublatticeEmbedding(L, linalg.kernel_basis(delta)).lattice()
    target = lat.direct_sum(lat.rescale(lat.root_lattice("E", 8), 2),
                            lat.rescale(lat.hyperbolic_plane(), 2))
    assert genus.same_genus(ker, target)
