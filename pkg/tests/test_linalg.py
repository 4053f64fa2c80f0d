import random

from fractions import Fraction

import pytest

from frobhh import linalg
from frobhh._ffelim import PyEchelon, new_echelon
from frobhh.errors import NotASubspace
from frobhh.field import make_field, prime_field, rationals, extension_field
from frobhh.linalg import (Matrix, MatrixBuilder, Subspace, char_poly,
                           eigenspaces, full_space, image, kernel,
                           quotient_basis, rank, solve)

F5 = make_field(prime_field(5))
F7 = make_field(prime_field(7))
F4 = make_field(extension_field(2, [1, 1, 1]))
Q = make_field(rationals())


def random_matrix(fld, rng, nr, nc, density=0.3):
    b = MatrixBuilder(fld, nr, nc)
    els = list(fld.elements()) if fld.size is not None else \
        [Fraction(k) for k in range(-4, 5)]
    for r in range(nr):
        for c in range(nc):
            if rng.random() < density:
                b.add(r, c, rng.choice(els))
    return b.build()


def dense_rank(fld, M):
    red, pivots = linalg.rref(fld, M.to_dense()) if M.nrows else ([], [])
    return len(pivots)


def test_kernel_of_zero_matrix():
    M = Matrix.zero(F5, 3, 3)
    assert kernel(M).dim == 3
    assert kernel(M) == full_space(F5, 3)


def test_image_of_identity():
    M = Matrix.identity(F5, 4)
    assert image(M).dim == 4


def test_rank_nullity_randomized():
    rng = random.Random(11)
    for fld in (F5, F7, F4, Q):
        for _ in range(25):
            nr, nc = rng.randint(1, 12), rng.randint(1, 12)
            M = random_matrix(fld, rng, nr, nc)
            r = rank(M)
            ker = kernel(M)
            assert r + ker.dim == nc
            assert r == dense_rank(fld, M)
            for v in ker.basis:
                assert not M.matvec(linalg.vec_from_dense(fld, v))


def test_sparse_dense_agree_200():
    rng = random.Random(5)
    M = random_matrix(F7, rng, 200, 180, density=0.02)
    assert rank(M) == dense_rank(F7, M)


def test_solve_identity_and_inconsistent():
    M = Matrix.identity(F5, 4)
    b = [F5.from_int(x) for x in (1, 2, 3, 4)]
    assert solve(M, b) == b
    Z = Matrix.zero(F5, 3, 3)
    assert solve(Z, [F5.one, F5.zero, F5.zero]) is None


def test_solve_constructed_consistent():
    rng = random.Random(2)
    for fld in (F5, Q):
        for _ in range(10):
            M = random_matrix(fld, rng, 8, 6)
            x0 = [fld.from_int(rng.randint(-3, 3)) for _ in range(6)]
            b = linalg.vec_to_dense(fld, M.matvec(linalg.vec_from_dense(fld, x0)), 8)
            x = solve(M, b)
            assert x is not None
            got = linalg.vec_to_dense(fld, M.matvec(linalg.vec_from_dense(fld, x)), 8)
            assert got == b


def test_quotient_simple():
    V = full_space(F5, 2)
    W = Subspace(F5, 2, [[F5.one, F5.zero]])
    reps, project = quotient_basis(V, W)
    assert len(reps) == 1
    assert project([F5.zero, F5.one]) == [F5.one]
    assert project([F5.one, F5.zero]) == [F5.zero]


def test_quotient_zero():
    V = Subspace(F5, 3, [[F5.one, F5.zero, F5.zero]])
    reps, project = quotient_basis(V, V)
    assert reps == []


def test_quotient_requires_containment():
    V = Subspace(F5, 2, [[F5.one, F5.zero]])
    W = Subspace(F5, 2, [[F5.zero, F5.one]])
    with pytest.raises(NotASubspace):
        quotient_basis(V, W)


def test_quotient_projection_consistency():
    rng = random.Random(9)
    for _ in range(10):
        M = random_matrix(F7, rng, 9, 9)
        V = image(M)
        wrows = V.basis[: V.dim // 2]
        W = Subspace(F7, 9, wrows)
        reps, project = quotient_basis(V, W)
        assert len(reps) + W.dim == V.dim
        # projection kills W and is the identity pattern on representatives
        for w in W.basis:
            assert all(F7.is_zero(c) for c in project(w))
        for i, r in enumerate(reps):
            coords = project(r)
            assert coords[i] == F7.one
            assert all(F7.is_zero(c) for j, c in enumerate(coords) if j != i)
        # project is linear: v - sum coords_i rep_i must lie in W
        for _ in range(5):
            coeffs = [F7.from_int(rng.randrange(7)) for _ in range(V.dim)]
            v = [F7.zero] * 9
            for c, row in zip(coeffs, V.basis):
                for k in range(9):
                    v[k] = F7.add(v[k], F7.mul(c, row[k]))
            coords = project(v)
            for c, rep in zip(coords, reps):
                for k in range(9):
                    v[k] = F7.sub(v[k], F7.mul(c, rep[k]))
            assert W.contains(v)


def test_char_poly_identity():
    M = Matrix.identity(F5, 3)
    # (x-1)^3 = x^3 - 3x^2 + 3x - 1 = x^3 + 2x^2 + 3x + 4 over F_5
    assert char_poly(M) == [4, 3, 2, 1]
    spaces, diag = eigenspaces(M)
    assert diag and len(spaces) == 1
    lam, sp = spaces[0]
    assert lam == F5.one and sp.dim == 3


def test_char_poly_vs_permutation():
    # 4-cycle permutation matrix: char poly x^4 - 1
    b = MatrixBuilder(Q, 4, 4)
    for i in range(4):
        b.add((i + 1) % 4, i, Q.one)
    M = b.build()
    assert char_poly(M) == [Fraction(-1), Fraction(0), Fraction(0), Fraction(0), Fraction(1)]
    spaces, diag = eigenspaces(M)
    assert not diag  # only 2 of 4 eigenvalues rational
    assert sorted(lam for lam, _ in spaces) == [Fraction(-1), Fraction(1)]


def test_echelon_membership_and_kernel_vectors():
    rng = random.Random(21)
    for force_py in (False, True):
        M = random_matrix(F7, rng, 30, 40, density=0.15)
        ech = new_echelon(F7, 40, force_python=force_py)
        for row in M.rows_as_dicts():
            ech.add_row_dict(row)
        assert ech.rank == rank(M)
        piv = set(int(c) for c in ech.pivot_cols())
        for c in range(40):
            if c not in piv:
                v = ech.kernel_vector(c)
                assert not M.matvec(v), "kernel vector must be annihilated"
        # membership: rows of M are in the rowspace
        for row in M.rows_as_dicts():
            assert ech.contains(row)


def test_echelon_backends_agree():
    rng = random.Random(4)
    for _ in range(10):
        M = random_matrix(F4, rng, 25, 25, density=0.2)
        e1 = new_echelon(F4, 25)
        e2 = PyEchelon(F4, 25)
        for row in M.rows_as_dicts():
            e1.add_row_dict(dict(row))
            e2.add_row_dict(dict(row))
        assert e1.rank == e2.rank
        probe = random_matrix(F4, rng, 5, 25, density=0.3)
        for row in probe.rows_as_dicts():
            assert (not e1.reduce_dict(dict(row))) == (not e2.reduce_dict(dict(row)))


def test_compose_and_is_zero():
    rng = random.Random(14)
    A = random_matrix(F5, rng, 6, 7)
    B = random_matrix(F5, rng, 7, 5)
    C = A.compose(B)
    Ad, Bd = A.to_dense(), B.to_dense()
    expect = [[F5.sum(F5.mul(Ad[i][k], Bd[k][j]) for k in range(7))
               for j in range(5)] for i in range(6)]
    assert C.to_dense() == expect
    assert linalg.compose_is_zero(A, Matrix.zero(F5, 7, 3))
