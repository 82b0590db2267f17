"""Straight-line flow in a fixed direction: saddle connections and cylinders.

Lengths along the flow are measured in units of the direction vector ``w``:
a saddle connection of length ``T`` has holonomy ``T * w``.  Heights are
measured along the perpendicular ``(w.y, -w.x)``, which has the same norm,
so moduli ``h / c`` are exact and a cylinder's true area is
``c * h * |w|^2``.  For the coordinate directions these are plain lengths.

Cylinder boundaries are named by the side of the flow they lie on.  Looking
along ``w``, the ``left`` boundary of a cylinder is the chain of saddle
connections whose right-hand side faces the cylinder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .exactfield import (ConjugatePairing, Embedding, FieldElement, NumberField, common_field,
                         rational_relations)
from .flatsurf import (Corner, Edge, Germ, Involution, Location, TranslationSurface, Vec, _exit, _is_zero,
                       _sgn, _start, convex_model, cross, dot, find_developed_involution, find_involution, normalize_germ, point_key,
                       rotate_ccw, rotate_cw, same_direction, _in_sector, ccw_less)

DEFAULT_BUDGET = 10_000
ENUMERATION_BUDGET = 1_000

COMPLETELY_PERIODIC = "completely-periodic"
PARTIAL = "partial"
NOT_PERIODIC = "not-periodic-certified"


# ---------------------------------------------------------------------------
# directions


@dataclass(frozen=True)
class Direction:
    """Canonical representative of a direction.

    Rational slopes become primitive integer vectors; otherwise the vector is
    kept as given with its sign fixed so that y > 0, or y = 0 and x > 0.
    """

    x: FieldElement
    y: FieldElement

    @classmethod
    def of(cls, x, y=None, field: Optional[NumberField] = None) -> "Direction":
        if y is None:
            x, y = x.x, x.y
        K = field or common_field(x, y)
        x, y = K.lift(x), K.lift(y)
        if x.is_zero() and y.is_zero():
            raise ValueError("zero direction")
        if y.is_zero():
            return cls(K.one, K.zero)
        if x.is_zero():
            return cls(K.zero, K.one)
        q = (x / y).is_rational()
        if q is not None:
            q = Fraction(q)
            a, b = q.numerator, q.denominator
            return cls(K(a), K(b))
        if y.sign() < 0:
            x, y = -x, -y
        return cls(x, y)

    @property
    def field(self) -> NumberField:
        return self.x.field

    @property
    def vector(self) -> Vec:
        return Vec(self.x, self.y)

    def parallel(self, other: "Direction") -> bool:
        return _is_zero(cross(self.vector, other.vector))

    def slope(self) -> Optional[FieldElement]:
        return None if self.x.is_zero() else self.y / self.x

    def approx(self) -> Tuple[float, float]:
        return float(self.x), float(self.y)

    def to_json(self) -> dict:
        return {"x": self.x.to_json(), "y": self.y.to_json()}

    def __repr__(self):
        return f"Direction({self.x!r}, {self.y!r})"


def _direction(s: TranslationSurface, d) -> Direction:
    if isinstance(d, (Direction, Vec)):
        x, y = d.x, d.y
    else:
        x, y = d
    return Direction.of(x, y, common_field(s.field.zero, x, y))


def _lift_surface(s: TranslationSurface, K: NumberField) -> TranslationSurface:
    if s.field == K:
        return s
    from .flatsurf import Polygon

    polys = [Polygon([Vec(K.lift(v.x), K.lift(v.y)) for v in p.vertices]) for p in s.polygons]
    return TranslationSurface(K, polys, s.gluings)


# ---------------------------------------------------------------------------
# following a ray


@dataclass
class Piece:
    """Part of a straight segment inside one polygon: start + (t - t0) w for t0 <= t <= t1."""

    polygon: int
    start: Vec
    t0: FieldElement
    t1: FieldElement


@dataclass
class _Hit:
    target: int
    param: FieldElement
    t: FieldElement
    polygon: int
    point: Vec


@dataclass
class _RayResult:
    kind: str  # "vertex", "hit", "limit", "budget"
    t: FieldElement
    pieces: List[Piece]
    crossings: List[Edge]
    germ: Optional[Germ] = None
    hit: Optional[_Hit] = None
    location: Optional[Location] = None


def _segment_hit(z: Vec, u: Vec, piece: Piece, w: Vec):
    """Where z + t u meets the piece (direction w), as (t, param) or None."""
    den = cross(u, w)
    if _is_zero(den):
        return None
    az = piece.start - z
    t = cross(az, w) / den
    sigma = cross(az, u) / den
    tau = piece.t0 + sigma
    if _sgn(sigma) < 0 or _sgn(tau - piece.t1) > 0:
        return None
    return t, tau


def _follow(s: TranslationSurface, w: Vec, stop: Set[int], budget: int, *, germ: Optional[Germ] = None,
            polygon: Optional[int] = None, point: Optional[Vec] = None,
            limit: Optional[FieldElement] = None, targets: Optional[Dict] = None,
            ) -> _RayResult:
    K = s.field
    if germ is not None:
        p, z = _start(s, Location(germ.corner[0], s.vertex(germ.corner), germ), w)
    else:
        p, z = _start(s, Location(polygon, point), w)
    T = K.zero
    pieces: List[Piece] = []
    crossings: List[Edge] = []
    first = True
    for _ in range(budget):
        t, i, kind = _exit(s, p, z, w, None)
        if targets:
            best = None
            for tid, piece, pw in targets.get(p, ()):
                r = _segment_hit(z, w, piece, pw)
                if r is None:
                    continue
                th, tau = r
                sg = _sgn(th)
                if sg < 0 or (sg == 0 and first) or _sgn(th - t) > 0:
                    continue
                if best is None or th < best[0]:
                    best = (th, tid, tau)
            if best is not None and (limit is None or _sgn(T + best[0] - limit) <= 0):
                th, tid, tau = best
                pieces.append(Piece(p, z, T, T + th))
                return _RayResult("hit", T + th, pieces, crossings,
                                  hit=_Hit(tid, tau, T + th, p, z + w * th))
        if limit is not None and _sgn(T + t - limit) >= 0:
            rem = limit - T
            pieces.append(Piece(p, z, T, limit))
            end = z + w * rem
            if _sgn(T + t - limit) == 0 and kind != "edge":
                j = kind[1]
                g = normalize_germ(s, (p, j), -w)
                return _RayResult("limit", limit, pieces, crossings, germ=g,
                                  location=Location(p, end, g))
            return _RayResult("limit", limit, pieces, crossings, location=Location(p, end))
        pieces.append(Piece(p, z, T, T + t))
        T = T + t
        first = False
        poly = s.polygons[p]
        if kind == "edge":
            q, f = s.gluings[(p, i)]
            crossings.append((p, i))
            shift = s.polygons[q].vertices[(f + 1) % len(s.polygons[q])] - poly.vertices[i]
            p, z = q, z + w * t + shift
            continue
        j = kind[1]
        arrive = normalize_germ(s, (p, j), -w)
        vc = s.corner_class((p, j))
        if vc in stop:
            return _RayResult("vertex", T, pieces, crossings, germ=arrive)
        if targets and ("v", vc) in targets:
            tid, tau = targets[("v", vc)][0]
            return _RayResult("hit", T, pieces, crossings, hit=_Hit(tid, tau, T, p, s.vertex((p, j))))
        g = rotate_ccw(s, arrive, w)
        crossings.append(g.corner)
        p = g.corner[0]
        z = s.vertex(g.corner)
    return _RayResult("budget", T, pieces, crossings)


def singular_classes(s: TranslationSurface) -> List[int]:
    """Cone points, or a single marked vertex when there are none."""
    cones = s.cone_points()
    return cones if cones else [0]


def outgoing_germs(s: TranslationSurface, v: int, w: Vec) -> List[Germ]:
    """The rays in direction w leaving vertex class v, in counterclockwise order."""
    return [Germ(c, w) for c in s.vertex_classes()[v] if _in_sector(s, c, w)]


# ---------------------------------------------------------------------------
# saddle connections


@dataclass
class SaddleConnection:
    id: int
    start: int
    end: int
    start_germ: Germ
    end_germ: Germ
    length: FieldElement
    holonomy: Vec
    pieces: List[Piece] = dc_field(repr=False)
    crossings: List[Edge] = dc_field(repr=False, default_factory=list)

    def to_json(self) -> dict:
        return {"id": self.id, "start": self.start, "end": self.end, "length": self.length.to_json(),
                "holonomy": [self.holonomy.x.to_json(), self.holonomy.y.to_json()],
                "crossings": [list(e) for e in self.crossings]}


@dataclass
class Unresolved:
    start: int
    start_germ: Germ
    crossings: int

    def to_json(self) -> dict:
        return {"start": self.start, "corner": list(self.start_germ.corner), "crossings": self.crossings}


def trace_separatrices(s: TranslationSurface, d, budget: int = DEFAULT_BUDGET) -> List:
    """Saddle connections and unresolved separatrices leaving the singular points."""
    dr = _direction(s, d)
    S = convex_model(_lift_surface(s, dr.field))
    return _trace_all(S, dr.vector, budget)


def _trace_all(S: TranslationSurface, w: Vec, budget: int, give_up_early: bool = False) -> List:
    sing = set(singular_classes(S))
    out: List = []
    for v in sorted(sing):
        for g in outgoing_germs(S, v, w):
            r = _follow(S, w, sing, budget, germ=g)
            if r.kind == "vertex":
                sc = SaddleConnection(len(out), v, S.corner_class(r.germ.corner), g, r.germ, r.t, w * r.t,
                                      r.pieces, r.crossings)
                out.append(sc)
            else:
                out.append(Unresolved(v, g, len(r.crossings)))
                if give_up_early:
                    return out
    return out


# ---------------------------------------------------------------------------
# cylinders


@dataclass
class Cylinder:
    id: int
    left: List[int]
    right: List[int]
    circumference: FieldElement
    height: FieldElement
    twist: FieldElement
    holonomy: Vec
    image: Optional[int] = None
    # a point on the core curve, in the convex model
    core_point: Optional[Tuple[int, Vec]] = dc_field(default=None, repr=False)

    @property
    def modulus(self) -> FieldElement:
        return self.height / self.circumference

    @property
    def ratio(self) -> FieldElement:
        """Circumference over height, the reciprocal of the modulus."""
        return self.circumference / self.height

    @property
    def simple(self) -> bool:
        return len(self.left) == 1 and len(self.right) == 1

    @property
    def fixed(self) -> Optional[bool]:
        return None if self.image is None else self.image == self.id

    def to_json(self) -> dict:
        return {"id": self.id, "left": self.left, "right": self.right,
                "circumference": self.circumference.to_json(), "height": self.height.to_json(),
                "twist": self.twist.to_json(), "modulus": self.modulus.to_json(), "simple": self.simple,
                "involution": None if self.image is None else ("fixed" if self.fixed else {"exchanged_with": self.image})}


@dataclass
class Decomposition:
    surface: TranslationSurface
    model: TranslationSurface
    direction: Direction
    status: str
    saddle_connections: List[SaddleConnection]
    unresolved: List[Unresolved]
    cylinders: List[Cylinder]
    succ_right: Dict[int, Optional[int]] = dc_field(repr=False, default_factory=dict)
    succ_left: Dict[int, Optional[int]] = dc_field(repr=False, default_factory=dict)
    involution: Optional[Involution] = dc_field(repr=False, default=None)
    sc_image: Dict[int, int] = dc_field(repr=False, default_factory=dict)
    label: Optional[str] = None

    @property
    def complete(self) -> bool:
        return self.status == COMPLETELY_PERIODIC

    @property
    def w(self) -> Vec:
        return self.direction.vector

    def area(self) -> FieldElement:
        w = self.w
        n2 = dot(w, w)
        total = self.model.field.zero
        for c in self.cylinders:
            total = total + c.circumference * c.height * n2
        return total

    def cylinder_of_left(self, sc: int) -> Optional[int]:
        for c in self.cylinders:
            if sc in c.left:
                return c.id
        return None

    def cylinder_of_right(self, sc: int) -> Optional[int]:
        for c in self.cylinders:
            if sc in c.right:
                return c.id
        return None

    def to_json(self) -> dict:
        return {
            "version": 1,
            "direction": self.direction.to_json(),
            "status": self.status,
            "label": self.label,
            "saddle_connections": [sc.to_json() for sc in self.saddle_connections],
            "unresolved": [u.to_json() for u in self.unresolved],
            "cylinders": [c.to_json() for c in self.cylinders],
        }


def _cycles(succ: Dict[int, Optional[int]]) -> List[List[int]]:
    out = []
    seen: Set[int] = set()
    for start in sorted(succ):
        if start in seen:
            continue
        path = []
        x = start
        while x is not None and x not in seen and x not in path:
            path.append(x)
            x = succ.get(x)
        seen.update(path)
        if x is not None and path and x == path[0]:
            out.append(path)
    return out


def _piece_index(S: TranslationSurface, scs: Sequence[SaddleConnection], w: Vec):
    """Pieces by polygon, plus ("v", class) entries for regular vertices a connection passes through."""
    idx: Dict = {}
    sing = set(singular_classes(S))
    for sc in scs:
        for pc in sc.pieces:
            idx.setdefault(pc.polygon, []).append((sc.id, pc, w))
            for j, v in enumerate(S.polygons[pc.polygon].vertices):
                if v == pc.start:
                    vc = S.corner_class((pc.polygon, j))
                    if vc not in sing:
                        idx.setdefault(("v", vc), []).append((sc.id, pc.t0))
    return idx


def _generic_fractions():
    yield Fraction(1, 3)
    k = 2
    while True:
        yield Fraction(k, 2 * k + 1)
        yield Fraction(1, k + 2)
        k += 1


def _point_on(sc: SaddleConnection, rho: Fraction) -> Tuple[int, Vec, FieldElement]:
    """Point at relative position rho along sc (polygon, point, length parameter)."""
    tau = sc.length * rho
    for pc in sc.pieces:
        if _sgn(tau - pc.t1) <= 0:
            return pc.polygon, pc.start + sc.holonomy / sc.length * (tau - pc.t0), tau
    pc = sc.pieces[-1]
    return pc.polygon, pc.start + sc.holonomy / sc.length * (tau - pc.t0), tau


def _shoot(S, sing, u, targets, budget, scs, start_sc, tries=12):
    """East ray from a generic point of start_sc; returns (ray, start parameter)."""
    gen = _generic_fractions()
    for _ in range(tries):
        rho = next(gen)
        p, z, tau = _point_on(scs[start_sc], rho)
        r = _follow(S, u, sing, budget, polygon=p, point=z, targets=targets)
        if r.kind == "hit":
            return r, tau
        if r.kind == "budget":
            return None, None
    return None, None


def _walk_to(S, p, z, u, t, budget, sing):
    r = _follow(S, u, sing, budget, polygon=p, point=z, limit=t)
    return r.location if r.kind == "limit" else None


def _closed_leaf(S, loc: Location, w: Vec, length: FieldElement, sing, budget) -> bool:
    r = _follow(S, w, sing, budget, polygon=loc.polygon, point=loc.point, limit=length)
    if r.kind != "limit" or r.location.germ is not None:
        return False
    return point_key(S, r.location) == point_key(S, loc)


def decompose(s: TranslationSurface, d, budget: Optional[int] = None,
              involution=None, give_up_early: bool = False) -> Decomposition:
    """Cut along saddle connections in direction d and assemble the cylinders.

    ``involution`` (of the convex model) skips the search for one, and
    ``False`` skips the involution altogether; with ``give_up_early`` the
    first unresolved separatrix ends the tracing.
    """
    budget = DEFAULT_BUDGET if budget is None else budget
    dr = _direction(s, d)
    base = _lift_surface(s, dr.field)
    S = convex_model(base)
    w = dr.vector
    u = Vec(w.y, -w.x)
    sing = set(singular_classes(S))
    traced = _trace_all(S, w, budget, give_up_early)
    scs = [t for t in traced if isinstance(t, SaddleConnection)]
    unresolved = [t for t in traced if isinstance(t, Unresolved)]
    if unresolved and give_up_early:
        return Decomposition(s, S, dr, PARTIAL, scs, unresolved, [])
    # renumber saddle connections densely
    for k, sc in enumerate(scs):
        sc.id = k
    start_by_corner = {sc.start_germ.corner: sc.id for sc in scs}
    succ_r: Dict[int, Optional[int]] = {}
    succ_l: Dict[int, Optional[int]] = {}
    for sc in scs:
        gr = rotate_ccw(S, sc.end_germ, w)
        gl = rotate_cw(S, sc.end_germ, w)
        succ_r[sc.id] = start_by_corner.get(gr.corner)
        succ_l[sc.id] = start_by_corner.get(gl.corner)
    left_cycles = _cycles(succ_r)
    right_cycles = _cycles(succ_l)
    right_of = {x: k for k, cyc in enumerate(right_cycles) for x in cyc}
    targets = _piece_index(S, scs, w)
    complete = not unresolved
    cylinders: List[Cylinder] = []
    used_right: Set[int] = set()
    for W in left_cycles:
        ray, tau0 = _shoot(S, sing, u, targets, budget, scs, W[0])
        if ray is None:
            continue
        kappa = ray.hit.target
        if kappa not in right_of:
            continue
        E = right_cycles[right_of[kappa]]
        if right_of[kappa] in used_right:
            continue
        cW = sum((scs[x].length for x in W), S.field.zero)
        cE = sum((scs[x].length for x in E), S.field.zero)
        if cW != cE:
            raise AssertionError("cylinder boundaries have different lengths")
        h = ray.t
        start_r = ray.pieces[0]
        mid = _walk_to(S, start_r.polygon, start_r.start, u, h / 2, budget, sing)
        if not complete:
            if mid is None or not _closed_leaf(S, mid, w, cW, sing, budget):
                continue
        a = tau0
        b = ray.hit.param
        k = E.index(kappa)
        b = b + sum((scs[x].length for x in E[:k]), S.field.zero)
        tw = b - a
        while tw.sign() < 0:
            tw = tw + cW
        while _sgn(tw - cW) >= 0:
            tw = tw - cW
        used_right.add(right_of[kappa])
        core = (mid.polygon, mid.point) if mid is not None else None
        cylinders.append(Cylinder(len(cylinders), list(W), list(E), cW, h, tw, w * cW, core_point=core))
    status = COMPLETELY_PERIODIC if complete else PARTIAL
    dec = Decomposition(s, S, dr, status, scs, unresolved, cylinders, succ_r, succ_l)
    if complete and len(cylinders) != len(left_cycles):
        raise AssertionError("could not measure every cylinder")
    if complete and dec.area() != S.area():
        raise AssertionError("cylinder areas do not add up to the surface area")
    inv = involution or None
    if inv is not None and inv.surface is not S:
        inv = None
    if inv is None and involution is None:
        inv = find_involution(S) or find_developed_involution(S)
    if inv is not None:
        _involution_action(dec, inv, u, targets, budget, sing)
    return dec


def weierstrass_count(dec: Decomposition) -> Optional[int]:
    """Fixed points of the involution on a completely periodic decomposition.

    Each fixed point is a fixed singular point, the midpoint of a saddle
    connection carried to itself, or one of the two fixed points on the core
    of a fixed cylinder.
    """
    inv = dec.involution
    if inv is None or not dec.complete or any(c.image is None for c in dec.cylinders):
        return None
    if len(dec.sc_image) != len(dec.saddle_connections):
        return None
    sing = singular_classes(dec.model)
    if not dec.model.cone_points():
        return None
    n = sum(1 for v in sing if inv.vertex_class(v) == v)
    n += sum(1 for k, v in dec.sc_image.items() if k == v)
    n += 2 * sum(1 for c in dec.cylinders if c.fixed)
    return n


def _which_cylinder_from(dec: Decomposition, S, p: int, z: Vec, u: Vec, targets, budget, sing) -> Optional[int]:
    r = _follow(S, u, sing, budget, polygon=p, point=z, targets=targets)
    if r.kind == "hit":
        return dec.cylinder_of_right(r.hit.target)
    r = _follow(S, -u, sing, budget, polygon=p, point=z, targets=targets)
    if r.kind == "hit":
        return dec.cylinder_of_left(r.hit.target)
    return None


def _locate_sc(S, scs, w: Vec, p: int, z: Vec) -> Optional[int]:
    """The saddle connection through the (non-vertex) point z of polygon p."""
    cands = [(p, z)]
    poly = S.polygons[p]
    n = len(poly)
    for i in range(n):
        a = poly.vertices[i]
        e = poly.edge(i)
        if _is_zero(cross(e, z - a)):
            q, f = S.gluings[(p, i)]
            shift = S.polygons[q].vertices[(f + 1) % len(S.polygons[q])] - a
            cands.append((q, z + shift))
    for sc in scs:
        for pc in sc.pieces:
            for q, zz in cands:
                if pc.polygon != q:
                    continue
                off = zz - pc.start
                if not _is_zero(cross(off, w)):
                    continue
                sig = dot(off, w) / dot(w, w)
                tau = pc.t0 + sig
                if _sgn(sig) >= 0 and _sgn(tau - pc.t1) <= 0:
                    return sc.id
    return None


def _involution_action(dec: Decomposition, inv: Involution, u: Vec, targets, budget, sing) -> None:
    S = dec.model
    dec.involution = inv
    for c in dec.cylinders:
        if c.core_point is None:
            continue
        q, z = inv.point(*c.core_point)
        c.image = _which_cylinder_from(dec, S, q, z, u, targets, budget, sing)
    for sc in dec.saddle_connections:
        p, z, _ = _point_on(sc, Fraction(1, 2))
        q, zz = inv.point(p, z)
        img = _locate_sc(S, dec.saddle_connections, dec.w, q, zz)
        if img is not None:
            dec.sc_image[sc.id] = img


def attach_involution(dec: Decomposition, inv) -> Decomposition:
    """Record how an involution of ``dec.model`` permutes cylinders and saddle connections."""
    if inv.surface is not dec.model:
        raise ValueError("involution belongs to another surface")
    w = dec.w
    u = Vec(w.y, -w.x)
    targets = _piece_index(dec.model, dec.saddle_connections, w)
    dec.sc_image = {}
    _involution_action(dec, inv, u, targets, DEFAULT_BUDGET, set(singular_classes(dec.model)))
    return dec


# ---------------------------------------------------------------------------
# configurations


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    cylinders: int
    fixed: int
    simple_fixed: int
    simple_exchanged: int
    # saddle connections per boundary of each fixed cylinder, sorted
    boundary: Tuple[int, ...]

    def to_json(self) -> dict:
        return {"cylinders": self.cylinders, "fixed": self.fixed, "simple_fixed": self.simple_fixed,
                "simple_exchanged": self.simple_exchanged, "boundary": list(self.boundary)}


def _table() -> List[dict]:
    import json
    from importlib import resources

    with resources.files("transurf.data").joinpath("configurations.json").open() as fh:
        return json.load(fh)["configurations"]


CONFIGURATIONS = _table()
LABELS = tuple(row["label"] for row in CONFIGURATIONS)
NAMES = {row["label"]: row.get("name") for row in CONFIGURATIONS}


def configuration_signature(dec: Decomposition, inv=None) -> Signature:
    if not dec.complete:
        raise ConfigurationError("decomposition is not completely periodic")
    if inv is not None and dec.involution is not inv:
        attach_involution(dec, inv)
    if dec.involution is None or any(c.image is None for c in dec.cylinders):
        raise ConfigurationError("no involution action on the cylinders")
    cyl = dec.cylinders
    fixed = [c for c in cyl if c.fixed]
    return Signature(
        len(cyl), len(fixed),
        sum(1 for c in fixed if c.simple),
        sum(1 for c in cyl if c.simple and not c.fixed),
        tuple(sorted(max(len(c.left), len(c.right)) for c in fixed)),
    )


def classify_configuration(dec: Decomposition, inv=None) -> str:
    """Label a..k of a completely periodic direction on a surface in L."""
    sig = configuration_signature(dec, inv)
    for row in CONFIGURATIONS:
        if (row["cylinders"], row["fixed"], row["simple_fixed"], row["simple_exchanged"]) != (
                sig.cylinders, sig.fixed, sig.simple_fixed, sig.simple_exchanged):
            continue
        if "boundary" in row and tuple(row["boundary"]) != sig.boundary:
            continue
        dec.label = row["label"]
        return row["label"]
    raise ConfigurationError(f"no configuration matches {sig}")


def t1_cylinder(dec: Decomposition) -> Cylinder:
    """In a 2T_fix2C direction, the fixed cylinder of least circumference."""
    fixed = [c for c in dec.cylinders if c.fixed]
    if len(fixed) != 2:
        raise ConfigurationError("expected two fixed cylinders")
    return min(fixed, key=lambda c: (float(c.circumference), c.id))


# ---------------------------------------------------------------------------
# moduli


PARABOLIC = "parabolic"
INDEPENDENT = "independent"
FULL_RELATION = "pairwise-incommensurable-with-full-relation"
OTHER = "other"


@dataclass
class Commensurability:
    kind: str
    moduli: List[FieldElement]
    relations: List[Tuple[Fraction, ...]]

    def to_json(self) -> dict:
        return {"kind": self.kind, "moduli": [m.to_json() for m in self.moduli],
                "relations": [[[q.numerator, q.denominator] for q in r] for r in self.relations]}


def commensurability_of(moduli: Sequence[FieldElement]) -> Commensurability:
    ms = list(moduli)
    if all((m / ms[0]).is_rational() is not None for m in ms):
        return Commensurability(PARABOLIC, ms, [])
    distinct: List[FieldElement] = []
    for m in ms:
        if m not in distinct:
            distinct.append(m)
    rels = rational_relations(distinct)
    if not rels:
        return Commensurability(INDEPENDENT, distinct, [])
    if len(rels) == 1 and all(q != 0 for q in rels[0]):
        return Commensurability(FULL_RELATION, distinct, rels)
    return Commensurability(OTHER, distinct, rels)


def commensurability_class(dec: Decomposition) -> Commensurability:
    if not dec.complete:
        raise ValueError("decomposition is not completely periodic")
    reps = []
    seen = set()
    for c in dec.cylinders:
        if c.id in seen:
            continue
        seen.add(c.id)
        if c.image is not None:
            seen.add(c.image)
        reps.append(c.modulus)
    return commensurability_of(reps)


def flux_identity_check(dec: Decomposition, e: Embedding) -> ConjugatePairing:
    """Sum of h_i * sigma(c_i) over the cylinders, for the embedding sigma = e."""
    if not dec.complete:
        raise ValueError("decomposition is not completely periodic")
    K = dec.model.field
    return ConjugatePairing(K, e, [(c.height, c.circumference) for c in dec.cylinders])


# ---------------------------------------------------------------------------
# enumeration


@dataclass
class EnumeratedDirection:
    direction: Direction
    decomposition: Decomposition
    label: Optional[str]

    def to_json(self) -> dict:
        return {"direction": self.direction.to_json(), "label": self.label,
                "cylinders": len(self.decomposition.cylinders),
                "moduli": [c.modulus.to_json() for c in self.decomposition.cylinders]}


def candidate_vectors(s: TranslationSurface, length: object, depth: int = 2) -> List[Vec]:
    """Vertex differences inside chains of at most depth + 1 glued polygons.

    Lengths are measured after rescaling to area one, in the sup norm.
    """
    K = s.field
    bound = K.lift(length) * K.lift(length) * s.area()
    out: List[Vec] = []
    for p in range(len(s.polygons)):
        base = s.polygons[p].vertices
        frontier = [(p, Vec(K.zero, K.zero), -1)]
        for level in range(depth + 1):
            nxt = []
            for q, off, came in frontier:
                poly = s.polygons[q]
                for z in poly.vertices:
                    for a in base:
                        v = z + off - a
                        if v.is_zero():
                            continue
                        if _sgn(v.x * v.x - bound) <= 0 and _sgn(v.y * v.y - bound) <= 0:
                            out.append(v)
                if level == depth:
                    continue
                for i in range(len(poly)):
                    if i == came:
                        continue
                    r, f = s.gluings[(q, i)]
                    shift = poly.vertices[(i + 1) % len(poly)] + off - s.polygons[r].vertices[f]
                    nxt.append((r, shift, f))
            frontier = nxt
    return out


def _angle_key(K: NumberField):
    ref = Vec(K.one, K.zero)

    def cmp(a: Vec, b: Vec) -> int:
        if same_direction(a, b):
            return 0
        return -1 if ccw_less(ref, a, b) else 1

    return cmp_to_key(cmp)


def candidate_directions(s: TranslationSurface, length: object, depth: int = 2) -> List[Direction]:
    vs = candidate_vectors(s, length, depth)
    dirs: List[Direction] = []
    for v in vs:
        d = Direction.of(v.x, v.y, s.field)
        if not any(d.parallel(e) for e in dirs):
            dirs.append(d)
    key = _angle_key(s.field)
    return sorted(dirs, key=lambda d: key(d.vector))


def float_screen(S: TranslationSurface, w: Vec, budget: int = DEFAULT_BUDGET, tol: float = 1e-9) -> Optional[int]:
    """Numerical pre-check: do all separatrices in direction w end at a singularity?

    Runs in floating point on a convex model and returns the largest number
    of crossings used by a separatrix, or None if one did not close up
    within the budget.  Positive answers still have to be confirmed exactly.
    """
    sing = set(singular_classes(S))
    verts = [[(float(v.x), float(v.y)) for v in p.vertices] for p in S.polygons]
    wx, wy = float(w.x), float(w.y)
    nw = math.hypot(wx, wy)
    wx, wy = wx / nw, wy / nw
    classes = S.vertex_classes()
    sectors = {}
    for c in S.corners():
        d1, d2 = S.corner_sector(c)
        sectors[c] = (math.atan2(float(d1.y), float(d1.x)), math.atan2(float(d2.y), float(d2.x)))
    ang = math.atan2(wy, wx)
    most = 0

    def inside(c):
        a1, a2 = sectors[c]
        span = (a2 - a1) % (2 * math.pi)
        off = (ang - a1) % (2 * math.pi)
        return tol < off < span - tol

    def leave(c):
        for d in classes[S.corner_class(c)]:
            if inside(d):
                return d
        for d in classes[S.corner_class(c)]:
            a1, _ = sectors[d]
            if abs(((ang - a1 + math.pi) % (2 * math.pi)) - math.pi) < tol:
                return d
        return None

    for v in sorted(sing):
        for g in outgoing_germs(S, v, w):
            p = g.corner[0]
            zx, zy = verts[p][g.corner[1]]
            closed = False
            for steps in range(budget):
                vs = verts[p]
                n = len(vs)
                best = None
                for i in range(n):
                    ax, ay = vs[i]
                    bx, by = vs[(i + 1) % n]
                    ex, ey = bx - ax, by - ay
                    el = math.hypot(ex, ey)
                    den = wx * ey - wy * ex
                    if den <= tol * el:
                        continue
                    qx, qy = ax - zx, ay - zy
                    t = (qx * ey - qy * ex) / den
                    if t <= tol * el:
                        continue
                    u = (qx * wy - qy * wx) / den
                    if u < -tol or u > 1 + tol:
                        continue
                    if best is None or t < best[0]:
                        best = (t, i, u)
                if best is None:
                    return None
                t, i, u = best
                el = math.hypot(vs[(i + 1) % n][0] - vs[i][0], vs[(i + 1) % n][1] - vs[i][1])
                if u * el < tol or (1 - u) * el < tol:
                    j = i if u * el < tol else (i + 1) % n
                    if S.corner_class((p, j)) in sing:
                        closed = True
                        break
                    c = leave((p, j))
                    if c is None:
                        return None
                    p = c[0]
                    zx, zy = verts[p][c[1]]
                    continue
                q, f = S.gluings[(p, i)]
                ax, ay = vs[i]
                sx, sy = verts[q][(f + 1) % len(verts[q])]
                zx, zy = zx + wx * t - ax + sx, zy + wy * t - ay + sy
                p = q
            if not closed:
                return None
            most = max(most, steps + 1)
    return most


def enumerate_cp_directions(s: TranslationSurface, length: object = 10,
                            budget: int = ENUMERATION_BUDGET, depth: int = 2,
                            screen: bool = True) -> List[EnumeratedDirection]:
    """Completely periodic directions among candidate saddle connection directions.

    Each direction gets ``budget`` crossings per separatrix, so directions
    with very long saddle connections are left out.  With ``screen`` set, a
    floating point trace discards directions before the exact decomposition.
    """
    out = []
    S = convex_model(s)
    inv = find_involution(S) or find_developed_involution(S)
    for d in candidate_directions(s, length, depth):
        if screen and float_screen(S, d.vector, budget) is None:
            continue
        dec = decompose(S, d, budget, involution=inv, give_up_early=True)
        if not dec.complete:
            continue
        try:
            label = classify_configuration(dec) if inv is not None else None
        except ConfigurationError:
            label = None
        dec.label = label
        out.append(EnumeratedDirection(dec.direction, dec, label))
    return out
