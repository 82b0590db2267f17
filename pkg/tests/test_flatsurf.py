from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from transurf.exactfield import QQ, define_field
from transurf.family import Origami, configuration_examples, example_surface, l_origami, origami_surface
from transurf.flatsurf import (Location, TranslationSurface, Vec, apply_linear, convex_model,
                               find_involution, is_translation_isomorphic, make_surface, stratum, trace,
                               translate_polygons, triangulate, validate)

from conftest import PROPERTY_CASES, golden_field, xn


def square(x0=0, y0=0):
    return [(x0, y0), (x0 + 1, y0), (x0 + 1, y0 + 1), (x0, y0 + 1)]


def unit_torus() -> TranslationSurface:
    return make_surface([square()], [((0, 0), (0, 2)), ((0, 1), (0, 3))])


def octagon() -> TranslationSurface:
    K = define_field([-2, 0, 1], (1, 2))
    r = K.gen / 2
    pts = [(0, 0), (1, 0), (1 + r, r), (1 + r, 1 + r), (1, 1 + 2 * r), (0, 1 + 2 * r), (-r, 1 + r), (-r, r)]
    return make_surface([pts], [((0, i), (0, i + 4)) for i in range(4)], K)


permutations = st.integers(1, 7).flatmap(
    lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n))))


# ---------------------------------------------------------------------------
# validation


def test_unit_torus():
    s = unit_torus()
    rep = validate(s)
    assert rep.valid and rep.genus == 1
    assert stratum(s).orders == ()
    assert s.area() == QQ(1)


def test_regular_octagon_is_genus_two():
    s = octagon()
    assert validate(s).valid
    st_ = stratum(s)
    assert st_.orders == (2,) and st_.genus == 2


def test_validate_reports_problems():
    cw = make_surface([list(reversed(square()))], [((0, 0), (0, 2)), ((0, 1), (0, 3))])
    assert any("counterclockwise" in e for e in validate(cw).errors)
    bad = make_surface([square()], [((0, 0), (0, 1)), ((0, 2), (0, 3))])
    assert any("non-parallel" in e for e in validate(bad).errors)
    short = make_surface([square(), [(0, 0), (2, 0), (2, 1), (0, 1)]], [((0, 0), (1, 2)), ((0, 2), (1, 0)),
                                                                          ((0, 1), (0, 3)), ((1, 1), (1, 3))])
    assert any("length mismatch" in e for e in validate(short).errors)
    open_edge = TranslationSurface(QQ, unit_torus().polygons, {(0, 0): (0, 2), (0, 2): (0, 0)})
    assert any("unmatched" in e for e in validate(open_edge).errors)
    two = make_surface([square(), square(3)], [((0, 0), (0, 2)), ((0, 1), (0, 3)), ((1, 0), (1, 2)), ((1, 1), (1, 3))])
    assert validate(two).errors == ["surface is disconnected"]


def test_glued_twice_is_rejected():
    with pytest.raises(ValueError):
        make_surface([square()], [((0, 0), (0, 2)), ((0, 0), (0, 3))])


def test_json_round_trip_is_byte_stable(x3, o6_surface):
    for s in (x3[1], o6_surface, octagon()):
        text = json.dumps(s.to_json(), sort_keys=True)
        again = TranslationSurface.from_json(json.loads(text))
        assert json.dumps(again.to_json(), sort_keys=True) == text
        assert validate(again).valid


# ---------------------------------------------------------------------------
# geometry


def test_triangulation_and_convex_model(o6_surface):
    L = origami_surface(l_origami())
    t = triangulate(L)
    assert all(len(p) == 3 for p in t.polygons)
    assert t.area() == L.area() and t.genus() == L.genus() == 2
    assert convex_model(L) is L
    fd, s = xn(2)
    assert stratum(triangulate(s)).orders == (2, 2)


def test_apply_linear_and_isomorphism():
    s = origami_surface(l_origami())
    t = apply_linear(s, ((1, 1), (0, 1)))
    assert validate(t).valid
    assert is_translation_isomorphic(s, t) is None
    assert is_translation_isomorphic(s, apply_linear(t, ((1, -1), (0, 1)))) is not None
    # translated polygons give the same surface
    u = translate_polygons(s, [Vec(QQ(5 * i), QQ(-i)) for i in range(3)])
    assert is_translation_isomorphic(s, u) is not None
    flipped = apply_linear(s, ((-1, 0), (0, 1)))
    assert validate(flipped).valid


def test_parabolic_of_the_l_origami():
    # horizontal moduli 1 and 1/2: the twist [[1, 2], [0, 1]] is an automorphism
    s = origami_surface(l_origami())
    assert is_translation_isomorphic(apply_linear(s, ((1, 2), (0, 1))), s) is not None
    assert is_translation_isomorphic(apply_linear(s, ((1, 1), (0, 1))), s) is None


def test_involution_of_known_surfaces(o6_surface, torus):
    inv = find_involution(o6_surface)
    assert inv is not None and inv.is_identity_squared()
    assert len(inv.fixed_points) == 8
    assert len(find_involution(torus).fixed_points) == 4


def test_trace_on_the_torus(torus):
    loc = trace(torus, Location(0, Vec(QQ(Fraction(1, 3)), QQ(Fraction(1, 5)))), Vec(QQ(3), QQ(2)))
    assert loc is not None
    assert loc.point == Vec(QQ(Fraction(1, 3)), QQ(Fraction(1, 5)))
    # through a regular vertex and on
    loc = trace(torus, Location(0, Vec(QQ(Fraction(1, 2)), QQ(Fraction(1, 2)))), Vec(QQ(1), QQ(1)))
    assert loc is not None and loc.point == Vec(QQ(Fraction(1, 2)), QQ(Fraction(1, 2)))


def test_trace_stops_at_a_cone_point():
    s = octagon()
    centre = s.polygons[0].centroid_hint()
    assert trace(s, Location(0, centre), (s.polygons[0].vertices[0] - centre) * 2) is None


# ---------------------------------------------------------------------------
# Gauss-Bonnet


def _check_gauss_bonnet(s: TranslationSurface) -> None:
    st_ = stratum(s)
    assert sum(st_.orders) == 2 * st_.genus - 2
    assert sum(a - 1 for a in s.cone_angles()) == 2 * s.genus() - 2


def test_gauss_bonnet_on_built_surfaces(o6_surface):
    surfaces = [xn(n)[1] for n in range(1, 9)] + [o6_surface, octagon(), unit_torus()]
    surfaces += [example_surface(e) for e in configuration_examples().values()]
    for s in surfaces:
        assert validate(s).valid
        _check_gauss_bonnet(s)
    for n in range(1, 9):
        assert stratum(xn(n)[1]).orders == (2, 2)


@settings(max_examples=PROPERTY_CASES)
@given(permutations)
def test_gauss_bonnet_on_random_origamis(hv):
    o = Origami(*hv)
    assume(o.is_connected())
    s = origami_surface(o)
    _check_gauss_bonnet(s)
    assert s.area() == QQ(o.squares)
    assert sum(k - 1 for k in o.commutator_cycles()) == sum(stratum(s).orders)


@settings(max_examples=200)
@given(permutations, st.integers(-3, 3), st.integers(1, 3))
def test_gauss_bonnet_after_shear_over_golden_field(hv, k, d):
    o = Origami(*hv)
    assume(o.is_connected())
    phi = golden_field().gen
    s = apply_linear(origami_surface(o), ((1, phi * Fraction(k, d)), (0, 1)))
    assert validate(s).valid
    _check_gauss_bonnet(s)
