"""The surfaces X_n and the square-tiled examples.

``build_xn`` goes through the Thurston–Veech builder using the chaining table
frozen in ``data/xn_layout.json``; the closed-form heights and widths are
checked against the Perron–Frobenius vector on every build.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from . import polynomials as P
from .exactfield import FieldElement, NumberField, define_field, factor_monic_int_poly, minimal_polynomial
from .exactfield import QQ
from .flatsurf import (DiagramCylinder, Polygon, TranslationSurface, Vec, apply_linear, cylinder_diagram_surface,
                       is_translation_isomorphic)
from .thurston import ThurstonData, build_thurston_detailed, matmul2, matrix_trace, multitwists, perron_data


class FamilyError(ValueError):
    pass


def _data(name: str) -> dict:
    with resources.files("transurf.data").joinpath(name).open() as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# the family X_n


def p_n(n: int) -> List[int]:
    """Coefficients of X^3 - 2(n^2+3)X^2 + (7n^2+4)X - 4n^2, low degree first."""
    return [-4 * n * n, 7 * n * n + 4, -2 * (n * n + 3), 1]


def matrix_a(n: int) -> List[List[int]]:
    return [[5 + n * n, n * n, 1], [n * n, n * n, 0], [1, 0, 1]]


@dataclass
class FamilyData:
    n: int
    field: NumberField
    alpha: FieldElement
    V: Tuple[FieldElement, FieldElement, FieldElement]
    H: Tuple[FieldElement, FieldElement, FieldElement]

    def to_json(self) -> dict:
        return {"n": self.n, "field": self.field.to_json(), "alpha": self.alpha.to_json(),
                "V": [x.to_json() for x in self.V], "H": [x.to_json() for x in self.H]}


def family_data(n: int) -> FamilyData:
    if n < 1:
        raise FamilyError("n must be a positive integer")
    poly = p_n(n)
    lo, hi = P.isolate_real_roots(poly)[-1]
    K = define_field(poly, (lo, hi))
    a = K.gen
    n2 = n * n
    V1 = a - 1
    V2 = (a * a - a * (6 + n2) + 4 + n2) / n2
    V3 = K.one
    H1 = V1 * 2
    H2 = (V1 + V2) * n
    H3 = V1 + V3
    return FamilyData(n, K, a, (V1, V2, V3), (H1, H2, H3))


def _expand(entries: Sequence, n: int) -> List[str]:
    out: List[str] = []
    for e in entries:
        if isinstance(e, str):
            out.append(e)
            continue
        for k in range(n):
            for t in e["for"]:
                name, idx = t[:-1].split("[")
                i = {"k": k, "-k": -k}[idx] % n
                out.append(f"{name}[{i}]")
    return out


def xn_thurston_data(n: int) -> ThurstonData:
    if n < 1:
        raise FamilyError("n must be a positive integer")
    layout = _data("xn_layout.json")
    I = list(layout["horizontal"])
    J = list(layout["vertical"])
    chain = {c: _expand(layout["horizontal"][c], n) for c in I}
    chain.update({c: _expand(layout["vertical"][c], n) for c in J})
    names = I + J
    idx = {c: i for i, c in enumerate(names)}
    M = [[0] * len(names) for _ in names]
    owner_h = {x: r for r in I for x in chain[r]}
    for s in J:
        for x in chain[s]:
            r = owner_h[x]
            M[idx[r]][idx[s]] += 1
            M[idx[s]][idx[r]] += 1
    return ThurstonData(I, J, M, [layout["weights"][c] for c in names], chain)


def build_xn(n: int) -> Tuple[FamilyData, TranslationSurface]:
    fd = family_data(n)
    d = xn_thurston_data(n)
    p = perron_data(d)
    if p.field != fd.field:
        raise FamilyError(f"Perron field {p.field!r} differs from {fd.field!r}")
    expected = list(fd.V) + [fd.H[0], fd.H[0], fd.H[2], fd.H[1]]
    got = [fd.field(list(h.c)) for h in p.heights]
    if got != expected:
        raise FamilyError(f"Perron vector {got!r} differs from closed form {expected!r}")
    return fd, build_thurston_detailed(d, p).surface


def theta_vector(fd: FamilyData) -> Vec:
    return Vec(fd.alpha, fd.field(fd.n))


def factor_string(coeffs: Sequence[int]) -> str:
    """Factorization of a monic integer polynomial, e.g. ``(X-1)(X^2-7X+4)``."""
    parts = [P.to_string(f).replace(" ", "").replace("*", "") for f in factor_monic_int_poly(coeffs)]
    return "".join(f"({x})" for x in parts)


# ---------------------------------------------------------------------------
# verification of X_n


PASS = "pass"
FAIL = "fail"


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "status": PASS if self.passed else FAIL, "detail": self.detail}


@dataclass
class XnReport:
    n: int
    checks: List[Check]
    trace: Optional[FieldElement] = None
    trace_degree: Optional[int] = None
    factorization: str = ""
    u_half_stabilizes: Optional[bool] = None

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"n": self.n, "ok": self.ok, "checks": [c.to_json() for c in self.checks],
                "trace": None if self.trace is None else self.trace.to_json(),
                "trace_degree": self.trace_degree, "factorization": self.factorization,
                "u_half_stabilizes": self.u_half_stabilizes}


def _mismatch(got, want) -> str:
    return f"got {got!r}, expected {want!r}"


def claim_chain(fd: FamilyData) -> List[Check]:
    """Exact checks of the x_i recursion along the periodic leaf in direction (alpha, n)."""
    n, a = fd.n, fd.alpha
    V1, V2, V3 = fd.V
    H1, H2, H3 = fd.H
    K = fd.field
    out = []
    x = H1 + H3
    xs = [x]
    for i in range(1, n + 1):
        x = x + a * V1 / n
        xs.append(x)
    closed = all(xs[i] == a * V1 * i / n + H1 + H3 for i in range(n + 1))
    out.append(Check("x_i closed form", closed))
    end = 3 * H1 + 2 * H3 + n * H2
    out.append(Check("x_n endpoint", xs[n] == end, "" if xs[n] == end else _mismatch(xs[n], end)))
    top = H1 + H3 + n * H2
    bad = [i for i in range(1, n) if (xs[i] - top).sign() >= 0]
    out.append(Check("Delta_i < 0", not bad, f"non-negative at i = {bad}" if bad else ""))
    if n >= 2:
        lhs = a / (n * n) - 1
        rhs = K(Fraction(n, n - 1))
        out.append(Check("alpha/n^2 - 1 < n/(n-1)", (rhs - lhs).sign() > 0))
    return out


def verify_xn(n: int, budget: Optional[int] = None) -> XnReport:
    """Exact checks of the structure of X_n.

    The vertical stabilizer is the multitwist U_t with the smallest t
    compatible with the vertical moduli.  Whether U_{1/2} itself stabilizes
    is recorded separately in ``u_half_stabilizes``.
    """
    from .flow import decompose

    fd, s = build_xn(n)
    K, a = fd.field, fd.alpha
    V = list(fd.V)
    checks = [Check("P_n(alpha) = 0", P.evaluate(p_n(n), a).is_zero())]
    A = matrix_a(n)
    AV = [sum((V[j] * A[i][j] for j in range(3)), K.zero) for i in range(3)]
    checks.append(Check("A V = alpha V", AV == [a * v for v in V],
                        "" if AV == [a * v for v in V] else _mismatch(AV, [a * v for v in V])))
    neg = [name for name, x in zip(("V1", "V2", "V3", "H1", "H2", "H3"), list(fd.V) + list(fd.H)) if x.sign() <= 0]
    checks.append(Check("positivity", not neg, f"non-positive: {neg}" if neg else ""))

    h = decompose(s, (1, 0), budget, involution=False)
    rh = [c.ratio for c in h.cylinders]
    ok = h.complete and len(rh) == 3 and all(r == rh[0] for r in rh)
    checks.append(Check("horizontal: 3 cylinders, equal moduli", ok, "" if ok else f"status {h.status}, c/h {rh!r}"))

    v = decompose(s, (0, 1), budget, involution=False)
    simple = sorted(c.ratio for c in v.cylinders if c.simple)
    other = sorted(c.ratio for c in v.cylinders if not c.simple)
    half = K(Fraction(1, 2))
    ok = v.complete and len(v.cylinders) == 4 and simple == [half, half] and other == [K.one, K.one]
    checks.append(Check("vertical: 4 cylinders, simple 1/2, others 1", ok,
                        "" if ok else f"status {v.status}, simple {simple!r}, others {other!r}"))

    mt = multitwists(xn_thurston_data(n))
    T, U = mt.horizontal, mt.vertical
    checks.append(Check("horizontal twist is T_alpha", T[0][1] == a, _mismatch(T[0][1], a) if T[0][1] != a else ""))
    checks.append(Check("T_alpha stabilizes", is_translation_isomorphic(apply_linear(s, T), s) is not None))
    checks.append(Check("U stabilizes", is_translation_isomorphic(apply_linear(s, U), s) is not None,
                        f"t = {U[1][0]!r}"))
    U_half = [[K.one, K.zero], [half, K.one]]
    u_half = is_translation_isomorphic(apply_linear(s, U_half), s) is not None

    T_alpha = [[K.one, a], [K.zero, K.one]]
    tr = matrix_trace(matmul2(T_alpha, U_half))
    want = (a + 4) / 2
    checks.append(Check("trace(T_alpha U_1/2) = (4+alpha)/2", tr == want, "" if tr == want else _mismatch(tr, want)))
    degree = len(minimal_polynomial(tr)) - 1
    expected = 3 if n > 2 else 2
    checks.append(Check("trace field degree", degree == expected, f"degree {degree}, expected {expected}"))
    factors = factor_monic_int_poly(p_n(n))
    fdeg = max(len(f) - 1 for f in factors)
    checks.append(Check("degree matches factorization", fdeg == degree, factor_string(p_n(n))))
    checks.extend(claim_chain(fd))
    return XnReport(n, checks, tr, degree, factor_string(p_n(n)), u_half)


@dataclass
class ThetaReport:
    n: int
    status: str
    label: Optional[str]
    r1: Optional[FieldElement]
    closed_form: FieldElement
    matches: Optional[bool]
    r1_rational: Optional[Fraction]
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.label == "e" and bool(self.matches)

    def to_json(self) -> dict:
        q = self.r1_rational
        return {"n": self.n, "status": self.status, "label": self.label, "ok": self.ok,
                "r1": None if self.r1 is None else self.r1.to_json(),
                "closed_form": self.closed_form.to_json(), "matches": self.matches,
                "is_rational": q is not None, "rational_value": None if q is None else [q.numerator, q.denominator],
                "detail": self.detail}


def r1_closed_form(fd: FamilyData) -> FieldElement:
    n, a = fd.n, fd.alpha
    return (a - n) * (2 * n ** 3 - n * n - (n - 1) * a) / (2 * n * (a - n * n))


def theta_report(n: int, budget: Optional[int] = None) -> ThetaReport:
    """Decompose X_n in direction (alpha, n) and compare r1 with its closed form.

    r1 is the ratio of circumference over height of an exchanged cylinder
    to that of T_1.
    """
    from .flow import ConfigurationError, classify_configuration, decompose, t1_cylinder

    fd, s = build_xn(n)
    closed = r1_closed_form(fd)
    dec = decompose(s, theta_vector(fd), budget)
    if not dec.complete:
        return ThetaReport(n, dec.status, None, None, closed, None, None,
                           f"{len(dec.unresolved)} separatrices unresolved, {len(dec.cylinders)} cylinders found")
    try:
        label = classify_configuration(dec)
    except ConfigurationError as e:
        return ThetaReport(n, dec.status, None, None, closed, None, None, str(e))
    if label != "e":
        return ThetaReport(n, dec.status, label, None, closed, None, None, "configuration is not 2T_fix2C")
    t1 = t1_cylinder(dec)
    c = next(c for c in dec.cylinders if not c.fixed)
    r1 = c.ratio / t1.ratio
    return ThetaReport(n, dec.status, label, r1, closed, r1 == closed, r1.is_rational())


# ---------------------------------------------------------------------------
# origamis


@dataclass(frozen=True)
class Origami:
    """Square-tiled surface: square i has square h[i] on its right and v[i] above.

    Permutations are 0-based tuples; JSON uses 1-based lists.
    """

    h: Tuple[int, ...]
    v: Tuple[int, ...]

    @property
    def squares(self) -> int:
        return len(self.h)

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in (self.h[i], self.v[i]):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.squares

    def commutator_cycles(self) -> List[int]:
        """Cycle lengths of v h v^-1 h^-1; each cycle of length k is a cone of angle 2 pi k."""
        hi, vi = _inverse(self.h), _inverse(self.v)
        c = tuple(self.v[self.h[vi[hi[i]]]] for i in range(self.squares))
        return sorted(len(cyc) for cyc in _cycles(c))

    def to_json(self) -> dict:
        return {"h": [x + 1 for x in self.h], "v": [x + 1 for x in self.v]}

    @classmethod
    def from_json(cls, obj: dict) -> "Origami":
        h = tuple(int(x) - 1 for x in obj["h"])
        v = tuple(int(x) - 1 for x in obj["v"])
        if sorted(h) != list(range(len(h))) or sorted(v) != list(range(len(h))):
            raise FamilyError("h and v must be permutations of 1..N")
        return cls(h, v)


def _inverse(p: Sequence[int]) -> Tuple[int, ...]:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def _compose(p: Sequence[int], q: Sequence[int]) -> Tuple[int, ...]:
    """Apply p first, then q."""
    return tuple(q[p[i]] for i in range(len(p)))


def _cycles(p: Sequence[int]) -> List[List[int]]:
    seen = set()
    out = []
    for i in range(len(p)):
        if i in seen:
            continue
        cyc = []
        j = i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        out.append(cyc)
    return out


def origami_surface(o: Origami) -> TranslationSurface:
    if not o.is_connected():
        raise FamilyError("origami is disconnected")
    polys = [Polygon([Vec(QQ(i), QQ(0)), Vec(QQ(i + 1), QQ(0)), Vec(QQ(i + 1), QQ(1)), Vec(QQ(i), QQ(1))])
             for i in range(o.squares)]
    pairs = []
    for i in range(o.squares):
        pairs.append(((i, 1), (o.h[i], 3)))
        pairs.append(((i, 2), (o.v[i], 0)))
    return TranslationSurface.from_pairs(QQ, polys, pairs)


def origami6() -> Origami:
    return Origami.from_json(_data("origami6.json"))


def build_origami6() -> Tuple[Origami, TranslationSurface]:
    o = origami6()
    return o, origami_surface(o)


def l_origami() -> Origami:
    """Three squares in an L: two side by side, one on top of the left one."""
    return Origami((1, 0, 2), (2, 1, 0))


def torus_origami() -> Origami:
    return Origami((0,), (0,))


def canonical_form(h: Sequence[int], v: Sequence[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Representative of the simultaneous conjugacy class of a transitive pair."""
    n = len(h)
    best = None
    for start in range(n):
        label = {start: 0}
        order = [start]
        k = 0
        while k < len(order):
            x = order[k]
            for y in (h[x], v[x]):
                if y not in label:
                    label[y] = len(order)
                    order.append(y)
            k += 1
        if len(order) < n:
            raise FamilyError("origami is disconnected")
        hh = tuple(label[h[order[i]]] for i in range(n))
        vv = tuple(label[v[order[i]]] for i in range(n))
        if best is None or (hh, vv) < best:
            best = (hh, vv)
    return best


@dataclass
class CuspReport:
    cusps: int
    orbit_size: int
    widths: List[int]
    representatives: List[Origami]

    def to_json(self) -> dict:
        return {"cusps": self.cusps, "orbit_size": self.orbit_size, "widths": self.widths,
                "representatives": [r.to_json() for r in self.representatives]}


def _act_t(key):
    h, v = key
    return canonical_form(h, _compose(_inverse(h), v))


def _act_s(key):
    h, v = key
    return canonical_form(_inverse(v), h)


def origami_cusps(o: Origami) -> CuspReport:
    """Cusps of the Veech group as cycles of T on the SL2(Z)-orbit."""
    if not o.is_connected():
        raise FamilyError("origami is disconnected")
    start = canonical_form(o.h, o.v)
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in (_act_t(x), _act_s(x)):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    done = set()
    widths, reps = [], []
    for x in sorted(seen):
        if x in done:
            continue
        w = 0
        y = x
        while y not in done:
            done.add(y)
            w += 1
            y = _act_t(y)
        widths.append(w)
        reps.append(Origami(*x))
    return CuspReport(len(widths), len(seen), widths, reps)


# ---------------------------------------------------------------------------
# hand-built configuration examples


def configuration_examples() -> Dict[str, dict]:
    return _data("configuration_examples.json")["examples"]


def example_surface(entry: dict) -> TranslationSurface:
    """Surface of one entry of ``configuration_examples.json``."""
    if entry["kind"] == "origami":
        return origami_surface(Origami.from_json(entry["origami"]))
    if entry["kind"] == "diagram":
        cyls = [DiagramCylinder(c["bottom"], c["top"], c.get("height", 1), c.get("twist", 0))
                for c in entry["cylinders"]]
        return cylinder_diagram_surface(cyls, entry["lengths"])
    raise FamilyError(f"unknown example kind {entry['kind']!r}")
