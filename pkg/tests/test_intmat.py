import random

from k3fm import intmat


def random_matrix(rng, n, bound=9):
    return tuple(
        tuple(rng.randint(-bound, bound) for _ in range(n)) for _ in range(n)
    )


def test_det_small():
    assert intmat.det(((2,),)) == 2
    assert intmat.det(((0, 1), (1, 0))) == -1
    assert intmat.det(((2, 1), (1, -2))) == -5
    assert intmat.det(((1, 2), (2, 4))) == 0


def test_det_matches_cofactor_expansion():
    rng = random.Random(7)

    def cofactor_det(m):
        n = len(m)
        if n == 1:
            return m[0][0]
        total = 0
        for j in range(n):
            minor = tuple(row[:j] + row[j + 1 :] for row in m[1:])
            total += (-1) ** j * m[0][j] * cofactor_det(minor)
        return total

    for _ in range(30):
        n = rng.randint(1, 5)
        m = random_matrix(rng, n, 6)
        assert intmat.det(m) == cofactor_det(m)


def test_inverse_roundtrip():
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(1, 5)
        m = random_matrix(rng, n)
        if intmat.det(m) == 0:
            continue
        inv = intmat.inverse(m)
        assert intmat.matmul(m, inv) == intmat.identity(n)


def test_smith_normal_form_properties():
    rng = random.Random(13)
    for _ in range(60):
        n = rng.randint(1, 5)
        m = random_matrix(rng, n)
        u, d, v = intmat.smith_normal_form(m)
        assert intmat.matmul(u, intmat.matmul(m, v)) == d
        assert abs(intmat.det(u)) == 1
        assert abs(intmat.det(v)) == 1
        diag = [d[i][i] for i in range(n)]
        for i in range(n):
            for j in range(n):
                if i != j:
                    assert d[i][j] == 0
        for a, b in zip(diag, diag[1:]):
            assert a >= 0 and b >= 0
            if a == 0:
                assert b == 0
            else:
                assert b % a == 0


def test_smith_examples():
    _, d, _ = intmat.smith_normal_form(((2,),))
    assert d == ((2,),)
    _, d, _ = intmat.smith_normal_form(((0, 1), (1, 0)))
    assert d == ((1, 0), (0, 1))
    _, d, _ = intmat.smith_normal_form(((2, 1), (1, -2)))
    assert d == ((1, 0), (0, 5))


def test_hermite_row_basis_canonical():
    h = intmat.hermite_row_basis(((2, 0), (0, 2), (1, 1)))
    assert h == ((1, 1), (0, 2))
    # generated lattice is basis-independent
    assert intmat.hermite_row_basis(h) == h


def test_row_kernel_basis():
    m = ((1, 2), (2, 4), (0, 0))
    ker = intmat.row_kernel_basis(m)
    assert len(ker) == 2
    for row in ker:
        assert intmat.mat_vec(intmat.transpose(m), row) == (0, 0)


def test_unimodular_inverse_integrality():
    m = ((1, 2), (0, 1))
    assert intmat.unimodular_inverse(m) == ((1, -2), (0, 1))
