from __future__ import annotations

import json

import pytest

from transurf.exactfield import FieldElement
from transurf.family import FamilyError, family_data, matrix_a, p_n, xn_thurston_data
from transurf.flatsurf import stratum, validate
from transurf.thurston import (ThurstonData, ThurstonError, build_thurston, build_thurston_detailed, charpoly,
                               circumference_ratios, eigen_residual, is_irreducible_matrix, matmul2, matrix_trace,
                               multitwists, perron_data, perron_frobenius)


def torus_data() -> ThurstonData:
    return ThurstonData(["h"], ["v"], [[0, 1], [1, 0]], [1, 1], {"h": ["x"], "v": ["x"]})


def test_charpoly_of_the_family_matrix():
    for n in range(1, 9):
        assert charpoly(matrix_a(n)) == p_n(n)


def test_perron_frobenius_matches_closed_form():
    for n in (1, 3, 5):
        fd = family_data(n)
        lam, v = perron_frobenius(matrix_a(n))
        K = lam.field
        assert lam == K(list(fd.alpha.c))
        scale = v[2]
        assert [x / scale for x in v] == [K(list(x.c)) for x in fd.V]


def test_irreducibility():
    assert is_irreducible_matrix([[0, 1], [1, 0]])
    assert not is_irreducible_matrix([[1, 0], [0, 1]])
    assert is_irreducible_matrix(matrix_a(2))


def test_torus_from_one_intersection():
    d = torus_data()
    p = perron_data(d)
    s = build_thurston(d, p)
    assert validate(s).valid and stratum(s).genus == 1
    mt = multitwists(d, p)
    assert matrix_trace(matmul2(mt.horizontal, mt.vertical)) == mt.trace
    assert mt.trace.is_rational() == 3


def test_bad_data_is_rejected():
    with pytest.raises(ThurstonError):
        ThurstonData(["h"], ["v"], [[0, 1], [2, 0]], [1, 1]).check()
    with pytest.raises(ThurstonError):
        ThurstonData(["h"], ["v"], [[0, 1], [1, 0]], [0, 1]).check()


def test_xn_data_is_bipartite_and_exact():
    for n in (1, 2, 4):
        d = xn_thurston_data(n)
        d.check()
        assert d.is_bipartite()
        p = perron_data(d)
        assert p.squared
        assert all(r.is_zero() for r in eigen_residual(d, p))
        assert all(h.sign() > 0 for h in p.heights)
        built = build_thurston_detailed(d, p)
        assert validate(built.surface).valid
        assert stratum(built.surface).orders == (2, 2)


def test_thurston_json_round_trip():
    d = xn_thurston_data(3)
    again = ThurstonData.from_json(json.loads(json.dumps(d.to_json())))
    assert again.to_json() == d.to_json()


def test_circumference_ratios_of_xn():
    fd = family_data(3)
    d = xn_thurston_data(3)
    p = perron_data(d)
    rh, rv = circumference_ratios(d, p)
    a = p.field(list(fd.alpha.c))
    assert all(r == a for r in rh)
    half = p.field(1) / 2
    assert sorted(rv) == [half, half, p.field(1), p.field(1)]
    mt = multitwists(d, p)
    assert mt.horizontal[0][1] == a
    assert mt.vertical[1][0] == p.field(1)
    assert mt.trace == a + 2
    assert mt.trace_degree == 3


def test_family_rejects_n_zero():
    with pytest.raises(FamilyError):
        family_data(0)
    with pytest.raises(FamilyError):
        xn_thurston_data(0)


def test_perron_data_json():
    obj = perron_data(torus_data()).to_json()
    assert FieldElement.from_json(obj["eigenvalue"]).is_rational() == 1
