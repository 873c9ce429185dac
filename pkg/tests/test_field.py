import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cobase.field import (
    DegreeTooLarge,
    DivisionByZero,
    FieldSpec,
    NonPrime,
    SpecMismatch,
    field_make,
    field_of_order,
    frobenius_orbit,
    is_irreducible_exhaustive,
    is_irreducible_rabin,
    monic_polys,
    primitive_element,
    root_of_unity,
    subfield_sizes,
)

SMALL = [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2), (2, 4), (3, 3), (5, 2), (3, 4)]


def test_prime_field_modulus():
    assert field_make(7).modulus == (0, 1)


def test_gf9_modulus_is_x2_plus_1():
    assert field_make(3, 2).modulus == (1, 0, 1)


def test_gf16_modulus_is_lex_smallest_irreducible():
    F = field_make(2, 4)
    quartics = [m for m in monic_polys(4, 2) if is_irreducible_exhaustive(m, 2)]
    assert list(F.modulus) == min(quartics)


def test_rejects_bad_input():
    with pytest.raises(NonPrime):
        field_make(6)
    with pytest.raises(DegreeTooLarge):
        field_make(2, 30)


@pytest.mark.parametrize("p,f", [(2, 1), (2, 2), (2, 3), (3, 2), (2, 5), (3, 3), (5, 2), (7, 2)])
def test_irreducibility_tests_agree(p, f):
    for m in monic_polys(f, p):
        assert is_irreducible_exhaustive(m, p) == is_irreducible_rabin(m, p)


def test_gf7_examples(gf7):
    assert gf7(3).inverse() == gf7(5)
    assert gf7(3) ** 8 == gf7(2)
    assert primitive_element(gf7) == gf7(3)


def test_gf9_x_squared(gf9):
    x = gf9([0, 1])
    assert x * x == gf9(2)


def test_gf2_primitive():
    F = field_make(2)
    assert primitive_element(F) == F(1)


@pytest.mark.parametrize("p,f", SMALL)
def test_primitive_element_order(p, f):
    F = field_make(p, f)
    a = primitive_element(F)
    assert a.order() == p**f - 1
    # first in lex order among generators
    for e in F.elements():
        if e.is_zero():
            continue
        if e == a:
            break
        assert e.order() < p**f - 1


@pytest.mark.parametrize("p,f", [s for s in SMALL if s[0] ** s[1] <= 81])
def test_field_axioms_exhaustive(p, f):
    F = field_make(p, f)
    els = list(F.elements())
    one, zero = F.one, F.zero
    for a in els:
        assert a + zero == a and a * one == a
        assert a + (-a) == zero
        if not a.is_zero():
            assert a * a.inverse() == one
    for a, b in itertools.product(els, repeat=2):
        assert a + b == b + a and a * b == b * a
    if len(els) <= 27:
        for a, b, c in itertools.product(els, repeat=3):
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("p,f", [(3, 4), (2, 4), (5, 2)])
def test_vectorised_ops_match_scalar(p, f):
    F = field_make(p, f)
    codes = np.arange(F.q)
    A, B = np.meshgrid(codes, codes)
    prod = F.mul(A, B)
    summ = F.add(A, B)
    for a in range(F.q):
        for b in range(F.q):
            assert prod[b, a] == (F.element(a) * F.element(b)).code
            assert summ[b, a] == (F.element(a) + F.element(b)).code


@st.composite
def triples(draw):
    p, f = draw(st.sampled_from([(2, 7), (3, 5), (5, 3), (7, 2), (11, 2), (13, 1), (101, 1)]))
    F = field_make(p, f)
    el = st.integers(0, F.q - 1).map(F.element)
    return F, draw(el), draw(el), draw(el)


@settings(max_examples=400, deadline=None)
@given(triples())
def test_field_axioms_random(t):
    F, a, b, c = t
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if not a.is_zero():
        assert a * a.inverse() == F.one
        assert (b / a) * a == b


def test_division_by_zero(gf7):
    with pytest.raises(DivisionByZero):
        gf7(0).inverse()


def test_spec_mismatch(gf7, gf5):
    with pytest.raises(SpecMismatch):
        gf7(1) + gf5(1)


@pytest.mark.parametrize("p,f", [(3, 2), (2, 4), (2, 3), (3, 3)])
def test_frobenius_is_automorphism(p, f):
    F = field_make(p, f)
    els = list(F.elements())
    for a, b in itertools.product(els, repeat=2):
        assert frobenius_orbit(a * b, 1) == frobenius_orbit(a, 1) * frobenius_orbit(b, 1)
        assert frobenius_orbit(a + b, 1) == frobenius_orbit(a, 1) + frobenius_orbit(b, 1)


def test_frobenius_examples(gf9):
    e = gf9([1, 1])
    assert e * e != e
    assert frobenius_orbit(e, 1) == e**3
    assert frobenius_orbit(gf9(2), 1) == gf9(2)
    F16 = field_make(2, 4)
    assert sum(1 for e in F16.elements() if frobenius_orbit(e, 2) == e) == 4


@pytest.mark.parametrize("p,f", [(2, 6), (3, 4), (2, 4), (5, 2)])
def test_fixed_points_of_frobenius_power(p, f):
    from math import gcd

    F = field_make(p, f)
    for d in range(f):
        fixed = sum(1 for e in F.elements() if frobenius_orbit(e, d) == e)
        assert fixed == p ** gcd(d, f) if d else fixed == p**f


@pytest.mark.parametrize("p,f", [(p, f) for p in (2, 3, 5, 7) for f in range(1, 7)])
def test_subfield_counting_inequality(p, f):
    assert sum(p**d for d in range(1, f) if f % d == 0) < p**f
    assert p**f in subfield_sizes(p, f)


def test_spec_text_roundtrip(gf9):
    assert str(gf9) == "p=3,f=2,mod=1,0,1"
    assert FieldSpec.parse(str(gf9)) == gf9


def test_field_of_order():
    assert field_of_order(9) == field_make(3, 2)
    assert field_of_order(7) == field_make(7)
    with pytest.raises(ValueError):
        field_of_order(12)


def test_root_of_unity(gf7):
    z = root_of_unity(gf7, 3)
    assert z == gf7(2) and z**3 == gf7.one
