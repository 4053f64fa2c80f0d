import random

import pytest
from fractions import Fraction

from frobhh.errors import DivisionByZero, FieldMismatch, InvalidField
from frobhh.field import (FieldSpec, FieldScalar, all_roots, extension_field,
                          make_field, poly_mul, poly_trim, prime_field,
                          rationals, scalar)


F5 = make_field(prime_field(5))
F7 = make_field(prime_field(7))
F4 = make_field(extension_field(2, [1, 1, 1]))
Q = make_field(rationals())


def test_inverse_mod_5():
    assert F5.inv(2) == 3  # 2*3 = 6 = 1 mod 5


def test_rational_addition_exact():
    assert Q.add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)


def test_f4_omega_squared():
    w = F4.generator()
    assert F4.mul(w, w) == F4.add(w, F4.one)  # x^2 = x + 1 mod x^2+x+1


def test_scalar_wrapper_ops():
    a = scalar(F5, 2)
    b = scalar(F5, 4)
    assert (a + b).value == 1
    assert (a * b).value == 3
    assert (a / b).value == F5.mul(2, F5.inv(4))
    assert (-a).value == 3
    assert a.inv().value == 3
    with pytest.raises(DivisionByZero):
        scalar(F5, 0).inv()
    with pytest.raises(FieldMismatch):
        a + scalar(F7, 1)


def test_scalar_canonical_equality():
    assert scalar(Q, Fraction(2, 4)) == scalar(Q, Fraction(1, 2))
    assert FieldScalar(F5, 7 % 5) == FieldScalar(F5, 2)


def test_field_axioms_randomized():
    rng = random.Random(7)
    for fld in (F5, F7, F4, Q):
        els = (list(fld.elements()) if fld.size is not None
               else [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(12)])
        for _ in range(200):
            a, b, c = (rng.choice(els) for _ in range(3))
            assert fld.add(a, b) == fld.add(b, a)
            assert fld.mul(a, b) == fld.mul(b, a)
            assert fld.mul(fld.add(a, b), c) == fld.add(fld.mul(a, c), fld.mul(b, c))
            assert fld.mul(a, fld.mul(b, c)) == fld.mul(fld.mul(a, b), c)
            if not fld.is_zero(a):
                assert fld.mul(a, fld.inv(a)) == fld.one
                assert fld.inv(fld.inv(a)) == a


def test_extension_requires_irreducible():
    with pytest.raises(InvalidField):
        extension_field(2, [0, 0, 1])  # x^2 reducible
    with pytest.raises(InvalidField):
        extension_field(2, [1, 0, 1])  # x^2+1 = (x+1)^2 over F_2
    with pytest.raises(InvalidField):
        extension_field(3, [1, 1, 1, 1, 1, 1])  # degree 5 unsupported
    with pytest.raises(InvalidField):
        prime_field(6)


def test_irreducibility_degree4():
    # x^4 + x + 1 is irreducible over F_2; x^4 + x^2 + 1 = (x^2+x+1)^2 is not
    extension_field(2, [1, 1, 0, 0, 1])
    with pytest.raises(InvalidField):
        extension_field(2, [1, 0, 1, 0, 1])


def test_all_roots_rational():
    # x^2 - 1
    roots = all_roots(Q, [Fraction(-1), Fraction(0), Fraction(1)])
    assert sorted(roots) == [(Fraction(-1), 1), (Fraction(1), 1)]
    # x^2 + x + 1: no rational roots
    assert all_roots(Q, [Fraction(1), Fraction(1), Fraction(1)]) == []
    # (2x - 1)(x + 3)^2, root multiplicities
    poly = poly_mul(Q, [Fraction(-1), Fraction(2)],
                    poly_mul(Q, [Fraction(3), Fraction(1)], [Fraction(3), Fraction(1)]))
    roots = dict(all_roots(Q, poly))
    assert roots == {Fraction(1, 2): 1, Fraction(-3): 2}


def test_all_roots_finite():
    # x^2 + x + 1 over F_7 -> {2, 4}
    roots = dict(all_roots(F7, [1, 1, 1]))
    assert roots == {2: 1, 4: 1}
    # over F_5: irreducible
    assert all_roots(F5, [1, 1, 1]) == []


def test_all_roots_reexpansion():
    rng = random.Random(3)
    for fld in (F5, F7):
        for _ in range(20):
            roots = [rng.randrange(fld.size) for _ in range(3)]
            poly = [fld.one]
            for r in roots:
                poly = poly_mul(fld, poly, [fld.neg(r), fld.one])
            found = all_roots(fld, poly)
            assert sum(m for _, m in found) == 3
            rebuilt = [fld.one]
            for r, m in found:
                for _ in range(m):
                    rebuilt = poly_mul(fld, rebuilt, [fld.neg(r), fld.one])
            assert poly_trim(fld, rebuilt) == poly_trim(fld, poly)


def test_spec_roundtrip():
    for spec in (rationals(), prime_field(5), extension_field(2, [1, 1, 1])):
        assert FieldSpec.from_json(spec.to_json()) == spec
    assert rationals().characteristic() == 0
    assert prime_field(7).characteristic() == 7


def test_codes_roundtrip():
    for fld in (F5, F4):
        for c in range(fld.size):
            assert fld.code(fld.decode(c)) == c
