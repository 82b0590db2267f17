from __future__ import annotations

from fractions import Fraction

import pytest

from transurf.exactfield import QQ, define_field
from transurf.family import (configuration_examples, example_surface, l_origami, origami_surface, theta_vector,
                             torus_origami)
from transurf.flatsurf import Vec, make_surface
from transurf.flow import (COMPLETELY_PERIODIC, INDEPENDENT, LABELS, PARABOLIC, ConfigurationError, Direction,
                           classify_configuration, commensurability_class, commensurability_of,
                           configuration_signature, decompose, enumerate_cp_directions, float_screen,
                           flux_identity_check, t1_cylinder, trace_separatrices, weierstrass_count)

from conftest import xn


def octagon():
    K = define_field([-2, 0, 1], (1, 2))
    r = K.gen / 2
    pts = [(0, 0), (1, 0), (1 + r, r), (1 + r, 1 + r), (1, 1 + 2 * r), (0, 1 + 2 * r), (-r, 1 + r), (-r, r)]
    return make_surface([pts], [((0, i), (0, i + 4)) for i in range(4)], K)


def test_direction_canonical_form():
    assert Direction.of(QQ(4), QQ(-6)) == Direction.of(QQ(-2), QQ(3))
    d = Direction.of(QQ(0), QQ(-5))
    assert (d.x, d.y) == (QQ(0), QQ(1))
    K = define_field([-2, 0, 1], (1, 2))
    v = Direction.of(-K.gen, K(-1))
    assert v.y.sign() > 0 and v.parallel(Direction.of(K.gen, K(1)))
    with pytest.raises(ValueError):
        Direction.of(QQ(0), QQ(0))


def test_torus_directions(torus):
    dec = decompose(torus, (2, 3))
    assert dec.complete and len(dec.cylinders) == 1
    c = dec.cylinders[0]
    # lengths in units of w = (2, 3)
    assert c.circumference == QQ(1) and c.height == QQ(Fraction(1, 13))
    assert dec.area() == QQ(1)
    with pytest.raises(ConfigurationError):
        classify_configuration(dec)


def test_l_origami_horizontal():
    dec = decompose(origami_surface(l_origami()), (1, 0))
    assert dec.status == COMPLETELY_PERIODIC
    assert sorted((c.circumference, c.height) for c in dec.cylinders) == [(QQ(1), QQ(1)), (QQ(2), QQ(1))]
    assert commensurability_class(dec).kind == PARABOLIC
    scs = trace_separatrices(origami_surface(l_origami()), (1, 0))
    assert len(scs) == 3


def test_regular_octagon_is_parabolic_horizontally():
    dec = decompose(octagon(), (1, 0))
    assert dec.complete and len(dec.cylinders) == 2
    r = dec.model.field.gen
    m = sorted(c.modulus for c in dec.cylinders)
    assert m == [(r - 1) / 2, r - 1]
    assert commensurability_of(m).kind == PARABOLIC


def test_xn_horizontal_and_vertical():
    for n in (1, 3, 5):
        fd, s = xn(n)
        h = decompose(s, (1, 0))
        assert len(h.cylinders) == 3 and all(c.ratio == fd.alpha for c in h.cylinders)
        assert classify_configuration(h) == "d"
        assert weierstrass_count(h) == 8
        v = decompose(s, (0, 1))
        assert classify_configuration(v) == "e"
        assert weierstrass_count(v) == 8
        assert v.area() == s.area()


def test_theta_direction(x3):
    fd, s = x3
    dec = decompose(s, theta_vector(fd))
    assert dec.complete
    sig = configuration_signature(dec)
    assert (sig.cylinders, sig.fixed, sig.simple_exchanged) == (4, 2, 2)
    assert classify_configuration(dec) == "e"
    t1 = t1_cylinder(dec)
    assert t1.fixed and all(float(t1.circumference) <= float(c.circumference) for c in dec.cylinders if c.fixed)
    # the moduli of the non-parabolic direction carry no rational relation
    assert commensurability_class(dec).kind == INDEPENDENT


def test_flux_identity_for_horizontal_directions():
    for n in range(3, 7):
        fd, s = xn(n)
        dec = decompose(s, (1, 0))
        K = dec.model.field
        own = K.own_embedding()
        for e in K.embeddings():
            pairing = flux_identity_check(dec, e)
            if e == own:
                assert not pairing.is_zero()
            else:
                assert pairing.is_zero()


def test_every_example_has_its_label():
    examples = configuration_examples()
    assert sorted(examples) == sorted(LABELS) and len(LABELS) == 11
    for label, entry in examples.items():
        s = example_surface(entry)
        dec = decompose(s, tuple(entry["direction"]))
        assert dec.complete
        assert classify_configuration(dec) == label, label
        assert weierstrass_count(dec) == 8


def test_partial_decomposition_reports_unresolved(x3):
    fd, s = x3
    dec = decompose(s, theta_vector(fd), budget=8)
    assert not dec.complete and dec.unresolved
    assert dec.to_json()["status"] == "partial"
    with pytest.raises(ValueError):
        commensurability_class(dec)


def test_float_screen_agrees_with_exact_tracing(x3):
    fd, s = x3
    K = s.field
    assert float_screen(s, Vec(K(1), K(0)), 1000) is not None
    assert float_screen(s, Vec(K(1), K.gen * K.gen + 1), 50) is None


def test_enumeration_on_the_l_origami():
    found = enumerate_cp_directions(origami_surface(l_origami()), 3)
    dirs = {e.direction.approx() for e in found}
    assert (1.0, 0.0) in dirs and (0.0, 1.0) in dirs and (1.0, 1.0) in dirs
    assert all(e.decomposition.complete for e in found)
    assert len(dirs) == len(found)


def test_decomposition_json(x3):
    fd, s = x3
    obj = decompose(s, (1, 0)).to_json()
    assert obj["version"] == 1 and len(obj["cylinders"]) == 3
    assert all(c["involution"] == "fixed" for c in obj["cylinders"])


def test_origami_surface_torus_has_no_label():
    dec = decompose(origami_surface(torus_origami()), (1, 0))
    assert dec.complete
    with pytest.raises(ConfigurationError):
        classify_configuration(dec)
