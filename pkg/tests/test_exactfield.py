from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transurf import polynomials as P
from transurf.exactfield import (QQ, ConjugatePairing, FieldElement, FieldMismatch, NumberField, WedgeQQ,
                                 common_field, conjugate, define_field, factor_monic_int_poly, is_irreducible,
                                 minimal_polynomial, rational_relations, wedge)
from transurf.family import p_n

from conftest import PROPERTY_CASES

SQRT2 = define_field([-2, 0, 1], (1, 2))
# the cubic field of X_3, a root in (20, 21)
CUBIC = define_field(p_n(3), (20, 21))

rationals = st.builds(Fraction, st.integers(-60, 60), st.integers(1, 12))


def elements(K: NumberField):
    return st.lists(rationals, min_size=K.degree, max_size=K.degree).map(K)


# ---------------------------------------------------------------------------
# fields


def test_sqrt2_sign_and_float():
    r = SQRT2.gen
    assert r * r == SQRT2(2)
    assert abs(float(r) - 2 ** 0.5) < 1e-12
    assert (r - Fraction(141421, 100000)).sign() == 1
    assert (r - Fraction(141422, 100000)).sign() == -1


def test_define_field_picks_the_factor_holding_the_root():
    K = define_field(p_n(1), (6, 7))
    assert K.degree == 2
    assert K.min_poly == (4, -7, 1)
    L = define_field(p_n(1), (Fraction(9, 10), Fraction(11, 10)))
    assert L.degree == 1
    assert L.gen == QQ(1)


def test_field_rejects_bad_data():
    with pytest.raises(ValueError):
        NumberField([-2, 0, 1], (2, 3))
    with pytest.raises(ValueError):
        NumberField([-1, 0, 1], (0, 2))
    with pytest.raises(ValueError):
        NumberField([1, 0, 0, 0, 0, 1], (-2, 0))
    with pytest.raises(ValueError):
        NumberField([-2, 0, 1], (-2, 2))


def test_field_json_round_trip():
    a = CUBIC([Fraction(1, 3), -2, Fraction(5, 7)])
    obj = a.to_json()
    assert FieldElement.from_json(obj) == a
    assert NumberField.from_json(CUBIC.to_json()) == CUBIC


def test_mixing_fields_raises():
    with pytest.raises(FieldMismatch):
        SQRT2.gen + CUBIC.gen
    assert common_field(QQ(1), SQRT2.gen) == SQRT2


def test_degree_one_lifts_everywhere():
    assert SQRT2.lift(QQ(Fraction(3, 4))) == SQRT2(Fraction(3, 4))
    assert (QQ(2) * SQRT2.gen).field == SQRT2


def test_inverse_and_division():
    a = CUBIC([1, 2, 3])
    assert a * a.inverse() == CUBIC.one
    assert (a / a) == CUBIC.one
    with pytest.raises(ZeroDivisionError):
        CUBIC.zero.inverse()


def test_is_rational_and_minimal_polynomial():
    r = SQRT2.gen
    assert (r * r + 1).is_rational() == 3
    assert r.is_rational() is None
    assert minimal_polynomial(r) == [Fraction(-2), Fraction(0), Fraction(1)]
    assert len(minimal_polynomial(CUBIC.gen + 1)) == 4


def test_embeddings_and_conjugates():
    es = SQRT2.embeddings()
    assert len(es) == 2 and SQRT2.is_totally_real()
    images = sorted(float(conjugate(SQRT2.gen, e)) for e in es)
    assert images == pytest.approx([-2 ** 0.5, 2 ** 0.5])
    assert len(CUBIC.embeddings()) == 3


def test_conjugate_pairing_zero_and_nonzero():
    K = SQRT2
    r = K.gen
    e_other = [e for e in K.embeddings() if K.conjugate_field(e) != K][0]
    # sum a * sigma(b) with sigma(r) = -r
    assert ConjugatePairing(K, e_other, [(r, r), (K(2), K.one)]).is_zero()
    assert not ConjugatePairing(K, e_other, [(r, r)]).is_zero()


def test_rational_relations():
    r = SQRT2.gen
    rels = rational_relations([r, r * 2, SQRT2.one])
    assert len(rels) == 1
    assert rels[0][0] == -2 * rels[0][1] and rels[0][2] == 0


def test_factorization():
    assert factor_monic_int_poly(p_n(1)) == [[-1, 1], [4, -7, 1]]
    assert factor_monic_int_poly(p_n(2)) == [[-2, 1], [8, -12, 1]]
    assert factor_monic_int_poly([4, 0, -5, 0, 1]) == [[-2, 1], [-1, 1], [1, 1], [2, 1]]
    assert factor_monic_int_poly([1, 0, 1, 0, 1]) == [[1, -1, 1], [1, 1, 1]]
    assert is_irreducible(p_n(3))
    assert not is_irreducible(p_n(2))


def test_polynomial_helpers():
    assert P.count_roots(p_n(3), 0, 100) == 3
    assert len(P.isolate_real_roots([-2, 0, 1])) == 2
    assert P.to_string([4, -7, 1]) == "X^2 - 7*X + 4"


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=PROPERTY_CASES)
@given(elements(CUBIC), elements(CUBIC), elements(CUBIC))
def test_field_axioms_cubic(a, b, c):
    K = CUBIC
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + K.zero == a and a * K.one == a
    assert a + (-a) == K.zero
    if not a.is_zero():
        assert a * a.inverse() == K.one
        assert (b / a) * a == b


@settings(max_examples=PROPERTY_CASES)
@given(elements(SQRT2), elements(SQRT2))
def test_order_is_compatible_with_floats(a, b):
    d = float(a) - float(b)
    if abs(d) > 1e-9:
        assert (a - b).sign() == (1 if d > 0 else -1)
    assert (a < b) == ((b - a).sign() > 0)
    assert (a - b).sign() == -(b - a).sign()


@settings(max_examples=PROPERTY_CASES)
@given(elements(CUBIC), elements(CUBIC), elements(CUBIC), rationals)
def test_wedge_antisymmetric_and_bilinear(a, b, c, q):
    assert wedge(a, b) == -wedge(b, a)
    assert wedge(a, a).is_zero()
    assert wedge(a + c, b) == wedge(a, b) + wedge(c, b)
    assert wedge(a, b + c) == wedge(a, b) + wedge(a, c)
    assert wedge(a * q, b) == wedge(a, b).scale(q)


def test_wedge_basics():
    w = WedgeQQ.from_vectors([1, 0], [0, 1])
    assert w[(0, 1)] == 1 and w[(1, 0)] == -1
    assert wedge(QQ(3), QQ(5)).is_zero()
    assert wedge(SQRT2.one, SQRT2.gen) == w
