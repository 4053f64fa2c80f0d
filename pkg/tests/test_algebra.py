import pytest
from fractions import Fraction

from frobhh import linalg
from frobhh.algebra import (FiniteDimAlgebra, algebra_from_structure_constants,
                            build_algebra, casimir_element, nakayama_algebra,
                            norm_map, regular_bimodule, socle_trace_form,
                            twisted_bimodule, _check_automorphism)
from frobhh.errors import (DegenerateForm, InvalidPresentation, NonAssociative,
                           NotAutomorphism)
from frobhh.field import make_field, prime_field, rationals
from frobhh.linalg import Matrix

F5 = make_field(prime_field(5))
F7 = make_field(prime_field(7))
F2 = make_field(prime_field(2))
Q = make_field(rationals())


def idx(A, label):
    return A.labels.index(label)


def test_nakayama_s2n2_basis_and_products():
    A = nakayama_algebra(F5, 2, 2)
    assert A.dim == 4
    assert A.labels == ["e1", "e2", "a1", "a2"]
    a1, a2 = A.basis_vector(2), A.basis_vector(3)
    assert A.multiply(a1, a2) == [F5.zero] * 4          # radical square zero
    e1 = A.basis_vector(0)
    assert A.multiply(e1, a1) == a1
    assert A.multiply(a1, e1) == [F5.zero] * 4


def test_nakayama_s3n3_basis():
    A = nakayama_algebra(F7, 3, 3)
    assert A.dim == 9
    assert A.labels == ["e1", "e2", "e3", "a1", "a2", "a3",
                        "a1a2", "a2a3", "a3a1"]
    prod = A.multiply(A.basis_vector(idx(A, "a1")), A.basis_vector(idx(A, "a2")))
    assert prod == A.basis_vector(idx(A, "a1a2"))


def test_trivial_field_algebra():
    A = algebra_from_structure_constants(Q, ["1"], [[[Fraction(1)]]], [Fraction(1)])
    assert A.dim == 1
    F = socle_trace_form_from_gram(A, [[Fraction(1)]])
    eye = Matrix.identity(Q, 1)
    assert F.nu.to_dense() == eye.to_dense()


def socle_trace_form_from_gram(A, gram):
    from frobhh.algebra import FrobeniusStructure

    return FrobeniusStructure(A, gram)


def test_invalid_presentation():
    with pytest.raises(InvalidPresentation):
        nakayama_algebra(F5, 0, 2)
    with pytest.raises(InvalidPresentation):
        nakayama_algebra(F5, 2, 1)


def test_nonassociative_rejected():
    table = [[[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]],
             [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]]
    # x*x = y with y*y = y, y*x = x... deliberately broken unit
    with pytest.raises(NonAssociative):
        algebra_from_structure_constants(Q, ["u", "x"], table, [Fraction(1), Fraction(0)])


def test_socle_trace_form_s2n2_dual_basis():
    A = nakayama_algebra(F5, 2, 2)
    F = socle_trace_form(A)
    # dual basis of (e1, e2, a1, a2) is (a2, a1, e1, e2)
    expect = [idx(A, "a2"), idx(A, "a1"), idx(A, "e1"), idx(A, "e2")]
    for i, j in enumerate(expect):
        v = [F5.zero] * 4
        v[j] = F5.one
        assert F.dual_v[i] == v
    # <v_i, u_j> = delta
    for i in range(4):
        for j in range(4):
            val = F.form(F.dual_v[i], F.dual_u[j])
            assert val == (F5.one if i == j else F5.zero)


def test_nakayama_automorphism_s2n2_permutes():
    A = nakayama_algebra(F5, 2, 2)
    F = socle_trace_form(A)
    perm = {0: 1, 1: 0, 2: 3, 3: 2}     # e1<->e2, a1<->a2
    for j, i in perm.items():
        assert F.nu.matvec({j: F5.one}) == {i: F5.one}
        assert F.nu_inv.matvec({j: F5.one}) == {i: F5.one}


def test_form_associative_and_nakayama_identity():
    for A in (nakayama_algebra(F5, 2, 2), nakayama_algebra(F7, 3, 2),
              nakayama_algebra(F7, 3, 3)):
        F = socle_trace_form(A)
        f = A.field
        d = A.dim
        for i in range(d):
            bi = A.basis_vector(i)
            for j in range(d):
                bj = A.basis_vector(j)
                nu_bi = linalg.vec_to_dense(f, F.nu.matvec({i: f.one}), d)
                assert F.form(bi, bj) == F.form(bj, nu_bi)
                for k in range(d):
                    bk = A.basis_vector(k)
                    assert F.form(A.multiply(bi, bj), bk) == \
                        F.form(bi, A.multiply(bj, bk))


def test_degenerate_form_rejected():
    A = nakayama_algebra(F5, 2, 2)
    with pytest.raises(DegenerateForm):
        socle_trace_form(A, socle_indices=[0, 1])  # idempotents are not a socle


def test_eigen_s2n2_rational():
    A = nakayama_algebra(Q, 2, 2)
    F = socle_trace_form(A)
    E = F.eigen()
    assert E.diagonalizable
    assert E.eigenvalues == [Fraction(1), Fraction(-1)]
    one_space = E.spaces[0]
    assert one_space.dim == 2
    # A_1 = span{1, a1 + a2}
    assert one_space.contains([Fraction(1), Fraction(1), Fraction(0), Fraction(0)])
    assert one_space.contains([Fraction(0), Fraction(0), Fraction(1), Fraction(1)])
    minus = E.spaces[1]
    assert minus.dim == 2
    assert minus.contains([Fraction(1), Fraction(-1), Fraction(0), Fraction(0)])
    assert minus.contains([Fraction(0), Fraction(0), Fraction(1), Fraction(-1)])
    # unit-first eigenbasis and conjugation to the diagonal
    assert E.basis[0] == A.unit
    f = Q
    for vec, lam in zip(E.basis, E.lam_of_vec):
        got = linalg.vec_to_dense(f, F.nu.matvec(linalg.vec_from_dense(f, vec)), 4)
        assert got == [f.mul(lam, x) for x in vec]


def test_eigen_s3n2_f7_three_spaces():
    A = nakayama_algebra(F7, 3, 2)
    F = socle_trace_form(A)
    E = F.eigen()
    assert E.diagonalizable
    assert E.eigenvalues == [1, 2, 4]        # 2, 4 are the roots of x^2+x+1
    assert [sp.dim for sp in E.spaces] == [2, 2, 2]


def test_eigen_s2n2_f2_not_diagonalizable():
    A = nakayama_algebra(F2, 2, 2)
    F = socle_trace_form(A)
    E = F.eigen()
    assert not E.diagonalizable
    assert E.eigenvalues == [1]
    assert E.spaces[0].dim == 2


def test_eigen_dual_pairing():
    A = nakayama_algebra(F7, 3, 2)
    F = socle_trace_form(A)
    E = F.eigen()
    f = F7
    d = A.dim
    for i in range(d):
        for j in range(d):
            val = F.form(E.dual[i], E.basis[j])
            assert val == (f.one if i == j else f.zero)
    # v_j^{lam} lies in the lam^{-1} eigenspace
    for i, lam in enumerate(E.lam_of_vec):
        lam_inv = f.inv(lam)
        sp = E.spaces[E.eigenvalues.index(lam_inv)]
        assert sp.contains(E.dual[i])


def test_center_s2n2_is_unit_line():
    # brute-force commutant: z e_1 = e_1 z forces the arrow parts to vanish,
    # then z a_1 = a_1 z forces equal idempotent coefficients
    A = nakayama_algebra(F5, 2, 2)
    Z = A.center()
    assert Z.dim == 1
    assert Z.contains(A.unit)


def test_commutator_space_s2n2():
    A = nakayama_algebra(F5, 2, 2)
    C = A.commutator_space()
    assert C.dim == 2  # span{a1, a2}
    assert C.contains(A.basis_vector(2)) and C.contains(A.basis_vector(3))


def test_twisted_bimodule_actions():
    A = nakayama_algebra(F5, 2, 2)
    F = socle_trace_form(A)
    M = twisted_bimodule(A, F.nu_inv)
    f = F5
    # right action of e1 on e1 is e1 * nu_inv(e1) = e1 e2 = 0
    e1 = A.basis_vector(0)
    assert M.apply_right(e1, e1) == [f.zero] * 4
    # identity twist gives the regular bimodule
    M0 = twisted_bimodule(A, Matrix.identity(f, 4))
    for i in range(4):
        for j in range(4):
            b = A.basis_vector(j)
            assert M0.apply_left(A.basis_vector(i), b) == \
                A.multiply(A.basis_vector(i), b)


def test_twisted_actions_commute_s3n3():
    A = nakayama_algebra(F7, 3, 3)
    F = socle_trace_form(A)
    M = twisted_bimodule(A, F.nu)
    M._check()   # exhaustive over all 81 basis pairs


def test_not_automorphism_rejected():
    A = nakayama_algebra(F5, 2, 2)
    bad = Matrix.zero(F5, 4, 4)
    with pytest.raises(NotAutomorphism):
        _check_automorphism(A, bad)
    # invertible but not multiplicative: swap e1 and a1
    b = linalg.MatrixBuilder(F5, 4, 4)
    for src, dst in ((0, 2), (2, 0), (1, 1), (3, 3)):
        b.add(dst, src, F5.one)
    with pytest.raises(NotAutomorphism):
        _check_automorphism(A, b.build())


def test_norm_map_zero_on_s2n2():
    # the complete-complex middle map evaluates u_i m v_i with plain products
    A = nakayama_algebra(F5, 2, 2)
    F = socle_trace_form(A)
    mu = norm_map(F, regular_bimodule(A))
    assert mu.is_zero()


def test_norm_map_identity_on_base_field():
    A = algebra_from_structure_constants(Q, ["1"], [[[Fraction(1)]]], [Fraction(1)])
    F = socle_trace_form_from_gram(A, [[Fraction(1)]])
    mu = norm_map(F, regular_bimodule(A))
    assert mu.to_dense() == Matrix.identity(Q, 1).to_dense()


def test_norm_map_dual_base_independent():
    A = nakayama_algebra(F7, 3, 2)
    F = socle_trace_form(A)
    M = regular_bimodule(A)
    mu_std = norm_map(F, M)
    E = F.eigen()
    # recompute with the eigen-dual pair
    from frobhh.algebra import FrobeniusStructure

    class Alt:
        algebra = A
        dual_u = E.basis
        dual_v = E.dual
    mu_eig = norm_map(Alt, M)
    assert mu_std.add(mu_eig.scale(F7.neg(F7.one))).is_zero()


def test_casimir_identities():
    for A in (nakayama_algebra(F5, 2, 2), nakayama_algebra(F7, 3, 2)):
        f = A.field
        F = socle_trace_form(A)
        d = A.dim
        cas = casimir_element(F)
        E = F.eigen()
        assert cas == casimir_element(F, E.basis, E.dual)
        # sum u_i (x) v_i = sum v_i (x) nu_inv(u_i) = sum nu(v_i) (x) u_i
        nuinv_u = [linalg.vec_to_dense(f, F.nu_inv.matvec({i: f.one}), d)
                   for i in range(d)]
        nu_v = [linalg.vec_to_dense(
            f, F.nu.matvec(linalg.vec_from_dense(f, F.dual_v[i])), d)
            for i in range(d)]
        assert cas == casimir_element(F, F.dual_v, nuinv_u)
        assert cas == casimir_element(F, nu_v, F.dual_u)
        # sum a u_i b (x) v_i = sum u_i (x) nu_inv(b) v_i a for basis a, b
        for ai in range(d):
            av = A.basis_vector(ai)
            for bi in range(d):
                bv = A.basis_vector(bi)
                lhs = casimir_element(
                    F, [A.multiply(A.multiply(av, F.dual_u[i]), bv) for i in range(d)],
                    F.dual_v)
                nb = linalg.vec_to_dense(f, F.nu_inv.matvec({bi: f.one}), d)
                rhs = casimir_element(
                    F, F.dual_u,
                    [A.multiply(A.multiply(nb, F.dual_v[i]), av) for i in range(d)])
                assert lhs == rhs


def test_dual_basis_expansion():
    A = nakayama_algebra(F7, 3, 3)
    F = socle_trace_form(A)
    f = F7
    d = A.dim
    for x in range(d):
        xv = A.basis_vector(x)
        acc = [f.zero] * d
        for i in range(d):
            c = F.form(xv, F.dual_u[i])
            for k in range(d):
                acc[k] = f.add(acc[k], f.mul(c, F.dual_v[i][k]))
        assert acc == xv


def test_nu_is_algebra_automorphism():
    A = nakayama_algebra(F7, 3, 3)
    F = socle_trace_form(A)
    _check_automorphism(A, F.nu)   # raises on failure


def test_build_algebra_json():
    A = build_algebra({"type": "nakayama", "vertices": 2, "radical_power": 2}, F5)
    assert A.dim == 4
    with pytest.raises(InvalidPresentation):
        build_algebra({"type": "nope"}, F5)
