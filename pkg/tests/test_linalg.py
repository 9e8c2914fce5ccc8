import random

from emptysextic import linalg


def random_matrix(rng, rows, cols, lo=-6, hi=6):
    return tuple(tuple(rng.randint(lo, hi) for _ in range(cols))
                 for _ in range(rows))


def test_smith_normal_form_properties():
    rng = random.Random(11)
    for _ in range(60):
        rows = rng.randint(1, 5)
        cols = rng.randint(1, 5)
        m = random_matrix(rng, rows, cols)
        d, u, v = linalg.smith_normal_form(m)
        prod = linalg.mat_mul(linalg.mat_mul(u, m), v)
        for i in range(rows):
            for j in range(cols):
                expect = d[i] if i == j and i < len(d) else 0
                assert prod[i][j] == expect
        for i in range(len(d) - 1):
            if d[i + 1]:
                assert d[i + 1] % max(d[i], 1) == 0 or d[i] == 0
        assert abs(linalg.det_bareiss(u)) == 1
        assert abs(linalg.det_bareiss(v)) == 1


def test_hnf_rows_reconstructs():
    rng = random.Random(5)
    for _ in range(40):
        rows = rng.randint(1, 5)
        cols = rng.randint(1, 5)
        m = random_matrix(rng, rows, cols)
        h, u = linalg.hnf_rows(m)
        assert linalg.mat_mul(u, m) == h
        assert abs(linalg.det_bareiss(u)) == 1


def test_kernel_and_saturation():
    m = ((2, 4), (1, 2), (3, 6))
    ker = linalg.kernel_basis(m)
    for row in ker:
        assert linalg.vec_mat(row, m) == (0, 0)
    sat = linalg.saturation_basis(((2, 0), (0, 3)))
    # saturation of a full-rank sublattice of Z^2 is Z^2 itself
    assert abs(linalg.det_bareiss(sat)) == 1


def test_det_bareiss_against_diagonal_expansion():
    rng = random.Random(3)
    for _ in range(40):
        n = rng.randint(1, 5)
        m = random_matrix(rng, n, n)
        d, u, v = linalg.smith_normal_form(m)
        prod = 1
        for x in d:
            prod *= x
        assert abs(linalg.det_bareiss(m)) == abs(prod)


def test_signature_hyperbolic_pair():
    pos, neg, zero = linalg.rational_diagonal_signature(((0, 1), (1, 0)))
    assert (pos, neg, zero) == (1, 1, 0)
    pos, neg, zero = linalg.rational_diagonal_signature(((0, 0), (0, 0)))
    assert zero == 2
