from __future__ import annotations

import json
from fractions import Fraction
from typing import List, Sequence, Tuple

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from transurf.exactfield import QQ, WedgeQQ, define_field
from transurf.family import Origami, l_origami, origami6, origami_surface, theta_vector
from transurf.flatsurf import Polygon, TranslationSurface, Vec, apply_linear, make_surface, translate_polygons, \
    triangulate
from transurf.flow import COMPLETELY_PERIODIC
from transurf.invariants import (APERIODIC, IET, NOT_COMPLETELY_PERIODIC, PERIODIC, InvariantError, RauzyTie,
                                 certify_direction, certify_iet_periodic, first_return_iet, j_invariant, j_xx,
                                 rauzy_step, saf_direction, saf_iet)

from conftest import PROPERTY_CASES, golden_field

SQRT2 = define_field([-2, 0, 1], (1, 2))

rationals = st.builds(Fraction, st.integers(-60, 60), st.integers(1, 12))
positive = st.builds(Fraction, st.integers(1, 60), st.integers(1, 12))
small = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 12))
big = st.builds(Fraction, st.integers(8, 80), st.integers(1, 2))
permutations = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n))))


def golden_torus() -> TranslationSurface:
    return make_surface([[(0, 0), (1, 0), (1, 1), (0, 1)]], [((0, 0), (0, 2)), ((0, 1), (0, 3))], golden_field())


def rotate_vertices(s: TranslationSurface, starts: Sequence[int]) -> TranslationSurface:
    """The same surface with polygon p listing its vertices from starts[p]."""
    polys, shift = [], []
    for p, poly in enumerate(s.polygons):
        n = len(poly.vertices)
        k = starts[p] % n
        polys.append(Polygon(list(poly.vertices[k:]) + list(poly.vertices[:k])))
        shift.append((k, n))

    def edge(e):
        p, i = e
        k, n = shift[p]
        return p, (i - k) % n

    return TranslationSurface(s.field, polys, {edge(a): edge(b) for a, b in s.gluings.items()})


def positive_sqrt2():
    return st.tuples(rationals, rationals).map(lambda ab: SQRT2(list(ab))).filter(lambda x: x.sign() > 0)


# ---------------------------------------------------------------------------
# J invariant


def test_j_of_the_unit_square_torus(torus):
    assert j_invariant(torus).degree == 1
    assert j_xx(torus).is_zero()


def test_j_sees_an_irrational_shear(phi, torus):
    s = apply_linear(torus, ((1, phi), (0, 1)))
    assert j_invariant(s).degree == 2
    assert not j_xx(s).is_zero()
    # an integer shear is an automorphism of the square torus
    assert j_invariant(s) == j_invariant(apply_linear(torus, ((1, phi + 1), (0, 1))))
    assert j_invariant(s) != j_invariant(apply_linear(torus, ((1, 2 * phi), (0, 1))))


@settings(max_examples=PROPERTY_CASES)
@given(permutations, st.integers(-3, 3), st.integers(1, 3), st.data())
def test_j_is_invariant_under_regluing(hv, k, d, data):
    o = Origami(*hv)
    assume(o.is_connected())
    phi = golden_field().gen
    s = apply_linear(origami_surface(o), ((1, phi * Fraction(k, d)), (0, 1)))
    j = j_invariant(s)
    shifts = [Vec(phi * data.draw(rationals), data.draw(rationals)) for _ in s.polygons]
    assert j_invariant(translate_polygons(s, shifts)) == j
    assert j_invariant(triangulate(s)) == j
    starts = [data.draw(st.integers(0, 3)) for _ in s.polygons]
    assert j_invariant(rotate_vertices(s, starts)) == j


# ---------------------------------------------------------------------------
# SAF invariant


def test_golden_torus_saf():
    s = golden_torus()
    w = WedgeQQ.from_vectors([1, 0], [0, 1])
    assert saf_direction(s, (1, golden_field().gen)) == w.scale(2)
    f = first_return_iet(s, (1, golden_field().gen))
    phi = golden_field().gen
    assert f.lengths == (phi, golden_field().one) and f.permutation == (1, 0)
    assert saf_iet(f) == -saf_direction(s, (1, phi))


def test_saf_vanishes_in_rational_directions_of_origamis():
    for o in (l_origami(), origami6()):
        s = origami_surface(o)
        for d in ((1, 0), (0, 1), (2, 5), (-3, 4)):
            assert saf_direction(s, d).is_zero()


@settings(max_examples=PROPERTY_CASES)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(st.lists(positive_sqrt2(), min_size=n, max_size=n),
                                                     st.permutations(range(n)))))
def test_rauzy_step_preserves_saf(data):
    lengths, perm = data
    f = IET.of(lengths, perm)
    try:
        g = rauzy_step(f, drop_ties=True)
    except InvariantError:
        assume(False)
    assert saf_iet(g) == saf_iet(f)
    assert g.total == f.total - min(f.lengths[-1], f.lengths[f.bottom_order()[-1]])


def _saf_coords(lengths: List[Tuple[Fraction, Fraction]], perm: Sequence[int]) -> Fraction:
    """SAF of an IET over Q(sqrt 2), as the single coefficient of 1 ^ sqrt 2."""
    n = len(lengths)
    order = [0] * n
    for i, p in enumerate(perm):
        order[p] = i
    top, bot = [None] * n, [None] * n
    acc = (Fraction(0), Fraction(0))
    for i in range(n):
        top[i] = acc
        acc = (acc[0] + lengths[i][0], acc[1] + lengths[i][1])
    acc = (Fraction(0), Fraction(0))
    for i in order:
        bot[i] = acc
        acc = (acc[0] + lengths[i][0], acc[1] + lengths[i][1])
    total = Fraction(0)
    for i in range(n):
        t = (bot[i][0] - top[i][0], bot[i][1] - top[i][1])
        total += lengths[i][0] * t[1] - lengths[i][1] * t[0]
    return total


def _orbit_closes(f: IET, x, cap: int = 20_000) -> bool:
    y = f(x)
    for _ in range(cap):
        if y == x:
            return True
        y = f(y)
    return False


@settings(max_examples=PROPERTY_CASES)
@given(big, small, big, small, big, st.sampled_from([(2, 1, 0), (1, 2, 0), (2, 0, 1)]))
def test_three_interval_exchanges_with_zero_saf_are_periodic(a0, b0, a1, b1, a2, perm):
    # solve the last irrational coordinate so that the SAF vanishes
    l0, l1 = (a0, b0), (a1, b1)
    c0 = _saf_coords([l0, l1, (a2, Fraction(0))], perm)
    c1 = _saf_coords([l0, l1, (a2, Fraction(1))], perm)
    assume(c1 != c0)
    b2 = -c0 / (c1 - c0)
    lengths = [SQRT2([a, b]) for a, b in (l0, l1, (a2, b2))]
    assume(all(x.sign() > 0 for x in lengths))
    f = IET.of(lengths, perm)
    assert saf_iet(f).is_zero()
    cert = certify_iet_periodic(f, find_period=False)
    assert cert.status == PERIODIC
    for i, s in enumerate(f.starts()):
        assert _orbit_closes(f, s + f.lengths[i] / 3)


def test_irrational_rotation_is_aperiodic():
    f = IET.of([SQRT2.gen, SQRT2.one], [1, 0])
    cert = certify_iet_periodic(f)
    assert cert.status == APERIODIC and cert.period is None


def test_rational_iet_has_a_period():
    f = IET.of([QQ(Fraction(1, 3)), QQ(Fraction(1, 2)), QQ(Fraction(1, 6))], [2, 1, 0])
    cert = certify_iet_periodic(f)
    assert cert.status == PERIODIC and cert.period is not None
    x = QQ(Fraction(1, 7))
    y = x
    for _ in range(cert.period):
        y = f(y)
    assert y == x


# ---------------------------------------------------------------------------
# Rauzy induction


def _first_return(f: IET, x, bound):
    y = f(x)
    while (y - bound).sign() >= 0:
        y = f(y)
    return y


@settings(max_examples=PROPERTY_CASES)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(st.lists(positive, min_size=n, max_size=n),
                                                     st.permutations(range(n)))))
def test_rauzy_step_is_the_first_return(data):
    lengths, perm = data
    f = IET.of([QQ(x) for x in lengths], perm)
    try:
        g = rauzy_step(f, drop_ties=True)
    except InvariantError:
        assume(False)
    for i, s in enumerate(g.starts()):
        x = s + g.lengths[i] / 2
        assert g(x) == _first_return(f, x, g.total)


def test_tie_raises_by_default():
    f = IET.of([QQ(2), QQ(1), QQ(1)], [1, 2, 0])
    with pytest.raises(RauzyTie):
        rauzy_step(f)
    g = rauzy_step(f, drop_ties=True)
    assert g.n == 2 and g.total == QQ(3)
    assert saf_iet(g) == saf_iet(f)


def test_iet_json_round_trip():
    f = IET.of([SQRT2.gen, SQRT2(Fraction(1, 3)), SQRT2([1, 1])], [2, 0, 1])
    obj = json.loads(json.dumps(f.to_json()))
    assert obj["permutation"] == [3, 1, 2]
    assert IET.from_json(obj) == f


def test_iet_rejects_bad_data():
    with pytest.raises(InvariantError):
        IET.of([QQ(1), QQ(-1)], [1, 0])
    with pytest.raises(InvariantError):
        IET.of([QQ(1), QQ(1)], [0, 0])


# ---------------------------------------------------------------------------
# certification


def test_certify_direction_steps(x3):
    fd, s = x3
    c = certify_direction(s, (1, 0))
    assert c.status == COMPLETELY_PERIODIC and c.step == "trace"
    g = certify_direction(golden_torus(), (1, golden_field().gen))
    assert g.status == NOT_COMPLETELY_PERIODIC and g.step == "saf"
    r = certify_direction(s, theta_vector(fd), budget=16)
    assert r.step == "reduction" and r.status == COMPLETELY_PERIODIC
    assert r.iet_certificate.status == PERIODIC
    obj = r.to_json()
    assert obj["status"] == COMPLETELY_PERIODIC and "iet" in obj
