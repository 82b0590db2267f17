from __future__ import annotations

import json

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from transurf.family import (FamilyError, Origami, build_origami6, canonical_form, factor_string, family_data,
                             l_origami, origami_cusps, r1_closed_form, theta_report, torus_origami, verify_xn)
from transurf.flatsurf import find_involution, stratum

from conftest import xn


def test_verify_x3_passes_every_check():
    rep = verify_xn(3)
    assert rep.ok, [c for c in rep.checks if not c.passed]
    assert rep.trace_degree == 3
    assert rep.check("T_alpha stabilizes").passed
    assert rep.check("U stabilizes").passed
    assert rep.u_half_stabilizes is False
    obj = rep.to_json()
    assert obj["ok"] and all(c["status"] == "pass" for c in obj["checks"])


def test_small_n_have_a_quadratic_trace_field():
    for n, factors in ((1, "(X-1)(X^2-7X+4)"), (2, "(X-2)(X^2-12X+8)")):
        rep = verify_xn(n)
        assert rep.ok
        assert rep.trace_degree == 2
        assert rep.factorization == factors


def test_verify_up_to_six():
    for n in range(4, 7):
        rep = verify_xn(n)
        assert rep.ok and rep.trace_degree == 3


def test_claim_chain_inequality_holds():
    for n in range(2, 9):
        fd = family_data(n)
        assert float(fd.alpha) / n ** 2 - 1 < n / (n - 1)


def test_theta_for_n_one_is_rational():
    rep = theta_report(1)
    assert rep.ok and rep.label == "e"
    assert rep.r1_rational == 1 / 2


def test_theta_for_irrational_cases():
    for n in (3, 5):
        rep = theta_report(n)
        assert rep.ok
        assert rep.r1 == rep.closed_form == r1_closed_form(xn(n)[0])
        assert rep.r1_rational is None
        assert rep.to_json()["is_rational"] is False


def test_theta_with_a_tiny_budget_is_partial():
    rep = theta_report(3, budget=4)
    assert not rep.ok and rep.status == "partial"


def test_factor_string():
    assert factor_string([4, -7, 1]) == "(X^2-7X+4)"
    assert factor_string([-2, 1]) == "(X-2)"


def test_origami6():
    o, s = build_origami6()
    assert o.squares == 6 and s.area() == s.field(6)
    assert stratum(s).orders == (2, 2)
    assert len(find_involution(s).fixed_points) == 8
    assert Origami.from_json(json.loads(json.dumps(o.to_json()))) == o


def test_cusp_counts():
    assert origami_cusps(build_origami6()[0]).cusps == 3
    assert origami_cusps(torus_origami()).cusps == 1
    rep = origami_cusps(l_origami())
    assert rep.cusps == 2 and rep.orbit_size == 3
    assert sum(rep.widths) == rep.orbit_size


def test_disconnected_origami_is_rejected():
    with pytest.raises(FamilyError):
        origami_cusps(Origami((0, 1), (0, 1)))


@settings(max_examples=200)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n)),
                                                     st.permutations(range(n)))))
def test_cusps_do_not_depend_on_labelling(hvp):
    h, v, p = hvp
    o = Origami(tuple(h), tuple(v))
    assume(o.is_connected())
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    # relabel square i as p[i]
    h2 = tuple(p[h[inv[i]]] for i in range(len(p)))
    v2 = tuple(p[v[inv[i]]] for i in range(len(p)))
    assert canonical_form(h2, v2) == canonical_form(o.h, o.v)
    a, b = origami_cusps(o), origami_cusps(Origami(h2, v2))
    assert (a.cusps, a.orbit_size, sorted(a.widths)) == (b.cusps, b.orbit_size, sorted(b.widths))
