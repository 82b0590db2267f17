"""Translation surfaces as glued polygons with exact field coordinates.

A surface is a list of counterclockwise polygons and a perfect matching of
their edges; matched edges are opposite vectors and are identified by the
translation carrying one onto the other.  Edge ``i`` of a polygon runs from
vertex ``i`` to vertex ``i + 1``; corner ``i`` sits at vertex ``i``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exactfield import QQ, FieldElement, FieldMismatch, NumberField, common_field

Edge = Tuple[int, int]
Corner = Tuple[int, int]


# ---------------------------------------------------------------------------
# vectors


class Vec:
    __slots__ = ("x", "y")

    def __init__(self, x, y):
        self.x = x
        self.y = y

    def __add__(self, o: "Vec") -> "Vec":
        return Vec(self.x + o.x, self.y + o.y)

    def __sub__(self, o: "Vec") -> "Vec":
        return Vec(self.x - o.x, self.y - o.y)

    def __neg__(self) -> "Vec":
        return Vec(-self.x, -self.y)

    def __mul__(self, c) -> "Vec":
        return Vec(self.x * c, self.y * c)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Vec":
        return Vec(self.x / c, self.y / c)

    def __eq__(self, o):
        if not isinstance(o, Vec):
            return NotImplemented
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self):
        return f"({self.x!r}, {self.y!r})"

    def is_zero(self) -> bool:
        return _is_zero(self.x) and _is_zero(self.y)

    def approx(self) -> Tuple[float, float]:
        return float(self.x), float(self.y)


def _is_zero(a) -> bool:
    return a.is_zero() if isinstance(a, FieldElement) else a == 0


def _sgn(a) -> int:
    if isinstance(a, FieldElement):
        return a.sign()
    return (a > 0) - (a < 0)


def cross(u: Vec, v: Vec):
    return u.x * v.y - u.y * v.x


def dot(u: Vec, v: Vec):
    return u.x * v.x + u.y * v.y


def _half(ref: Vec, v: Vec) -> int:
    """0 if the counterclockwise angle from ref to v lies in [0, pi), else 1."""
    c = _sgn(cross(ref, v))
    if c > 0:
        return 0
    if c < 0:
        return 1
    return 0 if _sgn(dot(ref, v)) > 0 else 1


def ccw_less(ref: Vec, a: Vec, b: Vec) -> bool:
    """True if the ccw angle ref->a is strictly smaller than ref->b."""
    ha, hb = _half(ref, a), _half(ref, b)
    if ha != hb:
        return ha < hb
    return _sgn(cross(a, b)) > 0


def same_direction(a: Vec, b: Vec) -> bool:
    return _is_zero(cross(a, b)) and _sgn(dot(a, b)) > 0


def is_angle_zero(ref: Vec, v: Vec) -> bool:
    return same_direction(ref, v)


# ---------------------------------------------------------------------------
# polygons and surfaces


class Polygon:
    __slots__ = ("vertices",)

    def __init__(self, vertices: Sequence[Vec]):
        self.vertices = tuple(vertices)

    def __len__(self):
        return len(self.vertices)

    def edge(self, i: int) -> Vec:
        n = len(self.vertices)
        return self.vertices[(i + 1) % n] - self.vertices[i % n]

    def edges(self) -> List[Vec]:
        return [self.edge(i) for i in range(len(self.vertices))]

    def area2(self):
        """Twice the signed area."""
        v = self.vertices
        n = len(v)
        acc = cross(v[n - 1], v[0])
        for i in range(n - 1):
            acc = acc + cross(v[i], v[i + 1])
        return acc

    def translate(self, t: Vec) -> "Polygon":
        return Polygon([p + t for p in self.vertices])

    def is_convex(self) -> bool:
        n = len(self.vertices)
        return all(_sgn(cross(self.edge(i - 1), self.edge(i))) > 0 for i in range(n))

    def centroid_hint(self) -> Vec:
        """A point strictly inside a convex polygon (vertex average)."""
        n = len(self.vertices)
        sx = sum((p.x for p in self.vertices[1:]), self.vertices[0].x)
        sy = sum((p.y for p in self.vertices[1:]), self.vertices[0].y)
        return Vec(sx / n, sy / n)


class TranslationSurface:
    """Polygons plus a perfect matching of their edges."""

    def __init__(self, field: NumberField, polygons: Sequence[Polygon], gluings: Dict[Edge, Edge]):
        self.field = field
        self.polygons: List[Polygon] = list(polygons)
        self.gluings: Dict[Edge, Edge] = dict(gluings)
        self._vertex_classes: Optional[List[List[Corner]]] = None
        self._corner_class: Optional[Dict[Corner, int]] = None
        self._angles: Optional[List[int]] = None

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_pairs(cls, field: NumberField, polygons: Sequence[Polygon], pairs: Iterable[Tuple[Edge, Edge]]):
        g: Dict[Edge, Edge] = {}
        for a, b in pairs:
            a, b = tuple(a), tuple(b)
            if a in g or b in g:
                raise ValueError(f"edge glued twice: {a} or {b}")
            g[a] = b
            g[b] = a
        return cls(field, polygons, g)

    def edge_pairs(self) -> List[Tuple[Edge, Edge]]:
        return sorted({tuple(sorted((a, b))) for a, b in self.gluings.items()})

    def edge_vector(self, e: Edge) -> Vec:
        return self.polygons[e[0]].edge(e[1])

    def vertex(self, c: Corner) -> Vec:
        p = self.polygons[c[0]]
        return p.vertices[c[1] % len(p)]

    # -- combinatorics ----------------------------------------------------

    def corners(self) -> List[Corner]:
        return [(p, i) for p, poly in enumerate(self.polygons) for i in range(len(poly))]

    def next_corner_ccw(self, c: Corner) -> Corner:
        """Corner reached by rotating counterclockwise across the incoming edge."""
        p, i = c
        n = len(self.polygons[p])
        q, f = self.gluings[(p, (i - 1) % n)]
        return (q, f)

    def next_corner_cw(self, c: Corner) -> Corner:
        p, i = c
        q, f = self.gluings[(p, i)]
        return (q, (f + 1) % len(self.polygons[q]))

    def vertex_classes(self) -> List[List[Corner]]:
        """Corners grouped by surface point, each list in counterclockwise order."""
        if self._vertex_classes is None:
            seen: Dict[Corner, int] = {}
            classes: List[List[Corner]] = []
            for c in self.corners():
                if c in seen:
                    continue
                cyc = []
                cur = c
                while cur not in seen:
                    seen[cur] = len(classes)
                    cyc.append(cur)
                    cur = self.next_corner_ccw(cur)
                classes.append(cyc)
            self._vertex_classes = classes
            self._corner_class = seen
        return self._vertex_classes

    def corner_class(self, c: Corner) -> int:
        self.vertex_classes()
        p, i = c
        return self._corner_class[(p, i % len(self.polygons[p]))]

    def corner_sector(self, c: Corner) -> Tuple[Vec, Vec]:
        """(d1, d2): the corner spans counterclockwise from d1 to d2."""
        p, i = c
        poly = self.polygons[p]
        return poly.edge(i), -poly.edge(i - 1)

    def corner_turns(self, c: Corner) -> int:
        """How often the sector [d1, d2) contains the direction (1, 0)."""
        d1, d2 = self.corner_sector(c)
        ref = Vec(QQ.one, QQ.zero) if self.field.degree == 1 else Vec(self.field.one, self.field.zero)
        if is_angle_zero(ref, d1):
            return 1
        if not is_angle_zero(ref, d2) and ccw_less(ref, d2, d1):
            return 1
        return 0

    def cone_angles(self) -> List[int]:
        """Total angle of each vertex class, in units of 2*pi."""
        if self._angles is None:
            self._angles = [sum(self.corner_turns(c) for c in cls) for cls in self.vertex_classes()]
        return list(self._angles)

    def cone_points(self) -> List[int]:
        return [i for i, a in enumerate(self.cone_angles()) if a != 1]

    def euler_characteristic(self) -> int:
        return len(self.vertex_classes()) - len(self.gluings) // 2 + len(self.polygons)

    def genus(self) -> int:
        return (2 - self.euler_characteristic()) // 2

    def area(self):
        total = self.field.zero
        for p in self.polygons:
            total = total + p.area2()
        return total / 2

    def is_connected(self) -> bool:
        if not self.polygons:
            return False
        seen = {0}
        todo = [0]
        while todo:
            p = todo.pop()
            for i in range(len(self.polygons[p])):
                q = self.gluings.get((p, i), (p, i))[0]
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return len(seen) == len(self.polygons)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        def coord(a):
            a = self.field.lift(a)
            return [[c.numerator, c.denominator] for c in a.c]

        return {
            "version": 1,
            "field": self.field.to_json(),
            "polygons": [
                {"id": i, "vertices": [[coord(v.x), coord(v.y)] for v in poly.vertices]}
                for i, poly in enumerate(self.polygons)
            ],
            "gluings": [[list(a), list(b)] for a, b in self.edge_pairs()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TranslationSurface":
        K = NumberField.from_json(obj["field"])

        def elem(c):
            return K([Fraction(n, d) for n, d in c])

        ids = {}
        polys = []
        for k, pj in enumerate(obj["polygons"]):
            ids[pj.get("id", k)] = k
            polys.append(Polygon([Vec(elem(x), elem(y)) for x, y in pj["vertices"]]))
        pairs = []
        for a, b in obj["gluings"]:
            pairs.append(((ids[a[0]], int(a[1])), (ids[b[0]], int(b[1]))))
        return cls.from_pairs(K, polys, pairs)

    def __repr__(self):
        return f"TranslationSurface({len(self.polygons)} polygons over {self.field})"


def make_surface(polygons: Sequence[Sequence[Tuple]], pairs: Iterable[Tuple[Edge, Edge]],
                 field: Optional[NumberField] = None) -> TranslationSurface:
    """Build a surface from raw coordinates (ints, Fractions or field elements)."""
    flat = [c for poly in polygons for v in poly for c in v]
    K = field or common_field(*flat)
    polys = [Polygon([Vec(K.lift(x), K.lift(y)) for x, y in poly]) for poly in polygons]
    return TranslationSurface.from_pairs(K, polys, pairs)


@dataclass
class DiagramCylinder:
    """A horizontal cylinder: boundary labels read left to right, with lengths."""

    bottom: Sequence[str]
    top: Sequence[str]
    height: object = 1
    twist: object = 0


def cylinder_diagram_surface(cylinders: Sequence[DiagramCylinder], lengths: Dict[str, object],
                             field: Optional[NumberField] = None) -> TranslationSurface:
    """Glue horizontal cylinders along labelled saddle connections.

    Each label must occur once on some bottom and once on some top.  Every
    cylinder is cut into a strip of triangles, so no polygon has a straight
    corner.  The top of a cylinder is shifted right by its twist.
    """
    K = field or common_field(*lengths.values(), *(c.height for c in cylinders), *(c.twist for c in cylinders))
    L = {k: K.lift(v) for k, v in lengths.items()}
    polys: List[Polygon] = []
    bottom_edge: Dict[str, Edge] = {}
    top_edge: Dict[str, Edge] = {}
    pairs: List[Tuple[Edge, Edge]] = []
    for ci, cyl in enumerate(cylinders):
        h, tw = K.lift(cyl.height), K.lift(cyl.twist)
        if _sgn(h) <= 0:
            raise ValueError(f"cylinder {ci} needs a positive height")
        bot = [Vec(K.zero, K.zero)]
        for lab in cyl.bottom:
            bot.append(bot[-1] + Vec(L[lab], K.zero))
        top = [Vec(tw, h)]
        for lab in cyl.top:
            top.append(top[-1] + Vec(L[lab], K.zero))
        if bot[-1].x != top[-1].x - tw:
            raise ValueError(f"cylinder {ci} has boundaries of different lengths")
        i = j = 0
        first_back: Optional[Edge] = None
        forward: Optional[Edge] = None
        while i < len(cyl.bottom) or j < len(cyl.top):
            p = len(polys)
            advance_bottom = j == len(cyl.top) or (i < len(cyl.bottom) and _sgn(bot[i + 1].x - top[j + 1].x) <= 0)
            if advance_bottom:
                polys.append(Polygon([bot[i], bot[i + 1], top[j]]))
                lab = cyl.bottom[i]
                if lab in bottom_edge:
                    raise ValueError(f"label {lab} used twice on bottoms")
                bottom_edge[lab] = (p, 0)
                nxt, back = (p, 1), (p, 2)
                i += 1
            else:
                polys.append(Polygon([bot[i], top[j + 1], top[j]]))
                lab = cyl.top[j]
                if lab in top_edge:
                    raise ValueError(f"label {lab} used twice on tops")
                top_edge[lab] = (p, 1)
                nxt, back = (p, 0), (p, 2)
                j += 1
            if forward is None:
                first_back = back
            else:
                pairs.append((forward, back))
            forward = nxt
        pairs.append((forward, first_back))
    if set(top_edge) != set(bottom_edge):
        raise ValueError("every label needs one top and one bottom occurrence")
    for lab in sorted(top_edge):
        pairs.append((top_edge[lab], bottom_edge[lab]))
    return TranslationSurface.from_pairs(K, polys, pairs)


# ---------------------------------------------------------------------------
# validation and stratum


@dataclass
class ValidationReport:
    valid: bool
    errors: List[str] = dc_field(default_factory=list)
    genus: Optional[int] = None

    def to_json(self) -> dict:
        return {"valid": self.valid, "errors": list(self.errors), "genus": self.genus}


def _segments_intersect(a: Vec, b: Vec, c: Vec, d: Vec) -> bool:
    def orient(p, q, r):
        return _sgn(cross(q - p, r - p))

    def on_seg(p, q, r):
        return (_sgn(dot(r - p, r - q)) <= 0) and orient(p, q, r) == 0

    o1, o2, o3, o4 = orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    return on_seg(a, b, c) or on_seg(a, b, d) or on_seg(c, d, a) or on_seg(c, d, b)


def validate(s: TranslationSurface) -> ValidationReport:
    """Check polygons, gluings and connectivity; report the genus if valid."""
    errors: List[str] = []
    for p, poly in enumerate(s.polygons):
        n = len(poly)
        if n < 3:
            errors.append(f"polygon {p}: fewer than 3 vertices")
            continue
        try:
            for v in poly.vertices:
                s.field.lift(v.x)
                s.field.lift(v.y)
        except FieldMismatch:
            errors.append(f"polygon {p}: coordinates outside the surface field")
            continue
        edges = poly.edges()
        if any(e.is_zero() for e in edges):
            errors.append(f"polygon {p}: zero-length edge")
            continue
        for i in range(n):
            if _is_zero(cross(edges[i - 1], edges[i])):
                errors.append(f"polygon {p}: degenerate corner {i} (collinear edges)")
        if _sgn(poly.area2()) <= 0:
            errors.append(f"polygon {p}: not counterclockwise")
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                a, b = poly.vertices[i], poly.vertices[(i + 1) % n]
                c, d = poly.vertices[j], poly.vertices[(j + 1) % n]
                if _segments_intersect(a, b, c, d):
                    errors.append(f"polygon {p}: edges {i} and {j} intersect")
    if errors:
        return ValidationReport(False, errors)
    for e in s.corners():
        partner = s.gluings.get(e)
        if partner is None:
            errors.append(f"edge {e}: unmatched")
            continue
        if partner[0] >= len(s.polygons) or partner[1] >= len(s.polygons[partner[0]]):
            errors.append(f"edge {e}: glued to nonexistent edge {partner}")
            continue
        if s.gluings.get(partner) != e:
            errors.append(f"edge {e}: gluing not symmetric")
            continue
        if partner == e:
            errors.append(f"edge {e}: glued to itself")
            continue
        u, v = s.edge_vector(e), s.edge_vector(partner)
        if e < partner and not (u + v).is_zero():
            if _is_zero(cross(u, v)) and _sgn(dot(u, v)) < 0:
                errors.append(f"edges {e} and {partner}: length mismatch")
            else:
                errors.append(f"edges {e} and {partner}: non-parallel gluing")
    extra = set(s.gluings) - set(s.corners())
    for e in sorted(extra):
        errors.append(f"gluing refers to nonexistent edge {e}")
    if errors:
        return ValidationReport(False, errors)
    if not s.is_connected():
        return ValidationReport(False, ["surface is disconnected"])
    return ValidationReport(True, [], s.genus())


@dataclass(frozen=True)
class Stratum:
    orders: Tuple[int, ...]
    genus: int

    def to_json(self) -> dict:
        return {"orders": list(self.orders), "genus": self.genus}


def stratum(s: TranslationSurface) -> Stratum:
    angles = s.cone_angles()
    orders = tuple(sorted((a - 1 for a in angles if a != 1), reverse=True))
    g = s.genus()
    if sum(orders) != 2 * g - 2:
        raise AssertionError(f"Gauss-Bonnet violated: orders {orders}, genus {g}")
    return Stratum(orders, g)


# ---------------------------------------------------------------------------
# linear action


def _matrix_entries(s: TranslationSurface, m) -> Tuple:
    (a, b), (c, d) = m
    K = s.field
    try:
        a, b, c, d = (K.lift(x) for x in (a, b, c, d))
        return a, b, c, d, K
    except FieldMismatch:
        if K.degree == 1:
            K2 = common_field(a, b, c, d)
            return K2.lift(a), K2.lift(b), K2.lift(c), K2.lift(d), K2
        raise


def apply_linear(s: TranslationSurface, m) -> TranslationSurface:
    """Post-compose the charts with ``m``; orientation-reversing m is allowed."""
    a, b, c, d, K = _matrix_entries(s, m)
    det = a * d - b * c
    if det.is_zero():
        raise ValueError("singular matrix")
    polys = []
    new_edge: Dict[Edge, Edge] = {}
    flip = det.sign() < 0
    for p, poly in enumerate(s.polygons):
        img = [Vec(a * K.lift(v.x) + b * K.lift(v.y), c * K.lift(v.x) + d * K.lift(v.y)) for v in poly.vertices]
        n = len(img)
        if flip:
            img = [img[(n - k) % n] for k in range(n)]
            for i in range(n):
                new_edge[(p, i)] = (p, (n - 1 - i) % n)
        else:
            for i in range(n):
                new_edge[(p, i)] = (p, i)
        polys.append(Polygon(img))
    g = {new_edge[e]: new_edge[f] for e, f in s.gluings.items()}
    return TranslationSurface(K, polys, g)


def translate_polygons(s: TranslationSurface, shifts: Sequence[Vec]) -> TranslationSurface:
    return TranslationSurface(s.field, [p.translate(t) for p, t in zip(s.polygons, shifts)], s.gluings)


# ---------------------------------------------------------------------------
# triangulation


def _ear_clip(poly: Polygon) -> List[Tuple[int, int, int]]:
    idx = list(range(len(poly)))
    v = poly.vertices
    out = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * len(poly) ** 2:
            raise AssertionError("ear clipping failed")
        m = len(idx)
        for k in range(m):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % m]
            a, b, c = v[i0], v[i1], v[i2]
            if _sgn(cross(b - a, c - b)) <= 0:
                continue
            ok = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                p = v[j]
                if (_sgn(cross(b - a, p - a)) >= 0 and _sgn(cross(c - b, p - b)) >= 0
                        and _sgn(cross(a - c, p - c)) >= 0):
                    ok = False
                    break
            if ok:
                out.append((i0, i1, i2))
                idx.pop(k)
                break
    out.append(tuple(idx))
    return out


def triangulate(s: TranslationSurface, only_nonconvex: bool = False) -> TranslationSurface:
    """Equivalent surface made of triangles (or of convex pieces if asked)."""
    polys: List[Polygon] = []
    parent: List[int] = []
    # original edge -> (new polygon, new edge)
    where: Dict[Edge, Edge] = {}
    internal: List[Tuple[Edge, Edge]] = []
    for p, poly in enumerate(s.polygons):
        n = len(poly)
        if only_nonconvex and poly.is_convex():
            base = len(polys)
            polys.append(poly)
            parent.append(p)
            for i in range(n):
                where[(p, i)] = (base, i)
            continue
        if poly.is_convex():
            tris = [(0, k, k + 1) for k in range(1, n - 1)]
        else:
            tris = _ear_clip(poly)
        diag: Dict[Tuple[int, int], Edge] = {}
        for t in tris:
            tid = len(polys)
            polys.append(Polygon([poly.vertices[j] for j in t]))
            parent.append(p)
            for e in range(3):
                u, w = t[e], t[(e + 1) % 3]
                if (u + 1) % n == w:
                    where[(p, u)] = (tid, e)
                else:
                    key = (w, u)
                    if key in diag:
                        internal.append((diag.pop(key), (tid, e)))
                    else:
                        diag[(u, w)] = (tid, e)
        if diag:
            raise AssertionError("unmatched triangulation diagonal")
    g: Dict[Edge, Edge] = {}
    for e, f in s.gluings.items():
        g[where[e]] = where[f]
    for a, b in internal:
        g[a] = b
        g[b] = a
    out = TranslationSurface(s.field, polys, g)
    out.parent_polygon = parent
    return out


def convex_model(s: TranslationSurface) -> TranslationSurface:
    if all(p.is_convex() for p in s.polygons):
        return s
    return triangulate(s, only_nonconvex=True)


# ---------------------------------------------------------------------------
# polygon-matching maps (translations and the rotation by pi)


def _polygon_match(P: Polygon, Q: Polygon, sign: int) -> List[Tuple[int, Vec]]:
    """Shifts k and offsets t with sign * P.vertex(i) + t == Q.vertex(i + k)."""
    n = len(P)
    if len(Q) != n:
        return []
    pe = [P.edge(i) * sign for i in range(n)]
    qe = Q.edges()
    out = []
    for k in range(n):
        if all(pe[i] == qe[(i + k) % n] for i in range(n)):
            out.append((k, Q.vertices[k] - P.vertices[0] * sign))
    return out


def _propagate(s1: TranslationSurface, s2: TranslationSurface, sign: int, p0: int, q0: int, k0: int):
    """Extend p0 -> (q0, shift k0) across gluings; None on conflict."""
    n1 = len(s1.polygons)
    assign: Dict[int, Tuple[int, int]] = {p0: (q0, k0)}
    used = {q0: p0}
    todo = deque([p0])
    while todo:
        p = todo.popleft()
        q, k = assign[p]
        n = len(s1.polygons[p])
        for i in range(n):
            pp, ii = s1.gluings[(p, i)]
            qq, jj = s2.gluings[(q, (i + k) % n)]
            m = len(s1.polygons[pp])
            if len(s2.polygons[qq]) != m:
                return None
            kk = (jj - ii) % m
            if pp in assign:
                if assign[pp] != (qq, kk):
                    return None
                continue
            if qq in used:
                return None
            P, Q = s1.polygons[pp], s2.polygons[qq]
            if not any(sh == kk for sh, _ in _polygon_match(P, Q, sign)):
                return None
            assign[pp] = (qq, kk)
            used[qq] = pp
            todo.append(pp)
    if len(assign) != n1:
        return None
    return assign


@dataclass
class PolygonMap:
    """p -> (q, shift, offset): point z of p goes to sign*z + offset in q."""

    sign: int
    images: Dict[int, Tuple[int, int, Vec]]

    def point(self, p: int, z: Vec) -> Tuple[int, Vec]:
        q, _, t = self.images[p]
        return q, z * self.sign + t

    def corner(self, c: Corner, s: TranslationSurface) -> Corner:
        q, k, _ = self.images[c[0]]
        return (q, (c[1] + k) % len(s.polygons[q]))


def _polygon_isomorphism(s1: TranslationSurface, s2: TranslationSurface, sign: int,
                         restrict_self: bool = False) -> Optional[PolygonMap]:
    if len(s1.polygons) != len(s2.polygons):
        return None
    P0 = s1.polygons[0]
    for q0, Q in enumerate(s2.polygons):
        for k0, _ in _polygon_match(P0, Q, sign):
            if restrict_self and sign == 1 and q0 == 0 and k0 == 0:
                continue
            assign = _propagate(s1, s2, sign, 0, q0, k0)
            if assign is None:
                continue
            images = {}
            for p, (q, k) in assign.items():
                t = s2.polygons[q].vertices[k] - s1.polygons[p].vertices[0] * sign
                images[p] = (q, k, t)
            return PolygonMap(sign, images)
    return None


# ---------------------------------------------------------------------------
# the involution


@dataclass
class FixedPoint:
    kind: str  # "center", "edge", or "vertex"
    polygon: int
    point: Vec
    vertex_class: Optional[int] = None

    def to_json(self) -> dict:
        return {"kind": self.kind, "polygon": self.polygon, "point": [float(self.point.x), float(self.point.y)],
                "vertex_class": self.vertex_class}


@dataclass
class Involution:
    surface: TranslationSurface
    map: PolygonMap
    fixed_points: List[FixedPoint]

    def point(self, p: int, z: Vec) -> Tuple[int, Vec]:
        return self.map.point(p, z)

    def vertex_class(self, v: int) -> int:
        c = self.surface.vertex_classes()[v][0]
        return self.surface.corner_class(self.map.corner(c, self.surface))

    def edge(self, e: Edge) -> Edge:
        q, k, _ = self.map.images[e[0]]
        return (q, (e[1] + k) % len(self.surface.polygons[q]))

    def is_identity_squared(self) -> bool:
        for p in range(len(self.surface.polygons)):
            q, k, t = self.map.images[p]
            q2, k2, t2 = self.map.images[q]
            if q2 != p or (k + k2) % len(self.surface.polygons[p]) != 0:
                return False
            if not (t2 - t).is_zero():
                return False
        return True

    def to_json(self) -> dict:
        return {
            "polygon_map": [[p, q, k] for p, (q, k, _) in sorted(self.map.images.items())],
            "fixed_points": [f.to_json() for f in self.fixed_points],
        }


def find_involution(s: TranslationSurface) -> Optional[Involution]:
    """An automorphism with derivative -1 permuting the polygons, if any."""
    pm = _polygon_isomorphism(s, s, -1)
    if pm is None:
        return None
    fixed: List[FixedPoint] = []
    for p, (q, k, t) in sorted(pm.images.items()):
        if q == p:
            fixed.append(FixedPoint("center", p, t / 2))
    seen = set()
    for e, f in s.edge_pairs():
        img = (pm.images[e[0]][0], (e[1] + pm.images[e[0]][1]) % len(s.polygons[pm.images[e[0]][0]]))
        if img in (e, f) and (e, f) not in seen:
            seen.add((e, f))
            poly = s.polygons[e[0]]
            mid = (poly.vertices[e[1]] + poly.vertices[(e[1] + 1) % len(poly)]) / 2
            fixed.append(FixedPoint("edge", e[0], mid))
    for v, cls in enumerate(s.vertex_classes()):
        c = cls[0]
        if s.corner_class(pm.corner(c, s)) == v:
            fixed.append(FixedPoint("vertex", c[0], s.vertex(c), v))
    return Involution(s, pm, fixed)


class DevelopedInvolution:
    """The rotation by pi realised by developing a triangulation into the rotated surface.

    Used when no polygon of the surface is carried onto a polygon.  Fixed
    points are not enumerated; ``fixed_points`` is None.
    """

    fixed_points = None

    def __init__(self, surface: TranslationSurface, tri: TranslationSurface, rotated: TranslationSurface,
                 outs: Dict[int, List["Location"]]):
        self.surface = surface
        self._tri = tri
        self._rot = rotated
        self._outs = outs

    def _locate(self, p: int, z: Vec) -> int:
        for t, par in enumerate(self._tri.parent_polygon):
            if par != p:
                continue
            T = self._tri.polygons[t]
            if all(_sgn(cross(T.edge(i), z - T.vertices[i])) >= 0 for i in range(3)):
                return t
        raise ValueError("point outside its polygon")

    def point(self, p: int, z: Vec) -> Tuple[int, Vec]:
        t = self._locate(p, z)
        T = self._tri.polygons[t]
        start = self._outs[t][0]
        off = z - T.vertices[0]
        if off.is_zero():
            loc = start
        else:
            if start.germ is not None and not same_direction(start.germ.direction, off):
                g = rotate_ccw(self._rot, start.germ, off)
                start = Location(g.corner[0], self._rot.vertex(g.corner), g)
            loc = trace(self._rot, start, off)
            if loc is None:
                raise ValueError("image passes through a cone point")
        return loc.polygon, -loc.point

    def vertex_class(self, v: int) -> int:
        c = self.surface.vertex_classes()[v][0]
        z = self.surface.vertex(c)
        for t, par in enumerate(self._tri.parent_polygon):
            if par != c[0]:
                continue
            for j, vz in enumerate(self._tri.polygons[t].vertices):
                if vz == z:
                    return self._rot.corner_class(self._outs[t][j].germ.corner)
        raise AssertionError("corner missing from triangulation")


def find_developed_involution(s: TranslationSurface) -> Optional[DevelopedInvolution]:
    """Involution of a convex surface found by development; None if there is none."""
    if not all(p.is_convex() for p in s.polygons) or not s.cone_points():
        return None
    K = s.field
    rot = apply_linear(s, ((K(-1), K.zero), (K.zero, K(-1))))
    t1 = triangulate(s)
    angles1 = t1.cone_angles()
    v1 = max(range(len(angles1)), key=lambda v: angles1[v])
    tri, k = t1.vertex_classes()[v1][0]
    u = t1.polygons[tri].edge(k)
    angles2 = rot.cone_angles()
    for v2, cls in enumerate(rot.vertex_classes()):
        if angles2[v2] != angles1[v1]:
            continue
        for c in cls:
            if _in_sector(rot, c, u):
                outs = _develop(t1, rot, tri, k, Germ(c, u))
                if outs is not None:
                    return DevelopedInvolution(s, t1, rot, outs)
    return None


# ---------------------------------------------------------------------------
# straight-line tracing


@dataclass(frozen=True)
class Germ:
    """A direction at a vertex, attached to the corner whose closed sector holds it."""

    corner: Corner
    direction: Vec


def normalize_germ(s: TranslationSurface, c: Corner, w: Vec) -> Germ:
    """Attach direction w (in the closed sector of c) to a half-open sector."""
    _, d2 = s.corner_sector(c)
    if same_direction(w, d2):
        return Germ(s.next_corner_ccw(c), w)
    return Germ(c, w)


def _in_sector(s: TranslationSurface, c: Corner, w: Vec) -> bool:
    d1, d2 = s.corner_sector(c)
    return same_direction(d1, w) or ccw_less(d1, w, d2)


def rotate_ccw(s: TranslationSurface, g: Germ, w: Vec) -> Germ:
    """Sweep counterclockwise from g until direction w first appears."""
    c, u = g.corner, g.direction
    _, d2 = s.corner_sector(c)
    if not same_direction(u, d2) and not same_direction(u, w):
        if same_direction(w, d2):
            return Germ(s.next_corner_ccw(c), w)
        if ccw_less(u, w, d2):
            return Germ(c, w)
    for _ in range(len(s.corners()) + 1):
        c = s.next_corner_ccw(c)
        if _in_sector(s, c, w):
            return Germ(c, w)
    raise AssertionError("rotation did not terminate")


def rotate_cw(s: TranslationSurface, g: Germ, w: Vec) -> Germ:
    """Sweep clockwise from g until direction w first appears."""
    c, u = g.corner, g.direction
    d1, _ = s.corner_sector(c)
    if not same_direction(u, w) and (same_direction(w, d1) or ccw_less(d1, w, u)):
        return Germ(c, w)
    for _ in range(len(s.corners()) + 1):
        c = s.next_corner_cw(c)
        if _in_sector(s, c, w):
            return Germ(c, w)
    raise AssertionError("rotation did not terminate")


@dataclass
class Location:
    """A point of the surface: polygon and planar point, plus a germ at vertices."""

    polygon: int
    point: Vec
    germ: Optional[Germ] = None


def point_key(s: TranslationSurface, loc: Location):
    """Canonical hashable description of the surface point."""
    if loc.germ is not None:
        return ("v", s.corner_class(loc.germ.corner))
    poly = s.polygons[loc.polygon]
    n = len(poly)
    for i in range(n):
        a = poly.vertices[i]
        e = poly.edge(i)
        z = loc.point - a
        if _is_zero(cross(e, z)):
            t = dot(z, e) / dot(e, e)
            if _sgn(t) >= 0 and _sgn(t - 1) <= 0:
                if _is_zero(t):
                    return ("v", s.corner_class((loc.polygon, i)))
                if _is_zero(t - 1):
                    return ("v", s.corner_class((loc.polygon, (i + 1) % n)))
                f = s.gluings[(loc.polygon, i)]
                cand = [((loc.polygon, i), t), (f, 1 - t)]
                cand.sort(key=lambda r: r[0])
                (ed, tt) = cand[0]
                return ("e", ed, tt)
    return ("i", loc.polygon, loc.point)


def sheet_index(s: TranslationSurface, g: Germ) -> int:
    """Which of the k+1 copies of a direction at a cone point the germ is on."""
    v = s.corner_class(g.corner)
    total = 0
    for c in s.vertex_classes()[v]:
        if c == g.corner:
            break
        total += s.corner_turns(c)
    d1, _ = s.corner_sector(g.corner)
    ref = Vec(s.field.one, s.field.zero)
    if not same_direction(d1, g.direction):
        if same_direction(ref, d1) or ccw_less(d1, ref, g.direction):
            total += 1
    return total % max(s.cone_angles()[v], 1)


def _exit(s: TranslationSurface, p: int, z: Vec, w: Vec, from_vertex: Optional[int]):
    """First boundary point of convex polygon p hit by z + t w, t > 0.

    Returns (t, edge index, kind) where kind is "edge" or ("vertex", j).
    """
    poly = s.polygons[p]
    n = len(poly)
    for i in range(n):
        e = poly.edge(i)
        den = cross(w, e)
        if _sgn(den) <= 0:
            continue
        a = poly.vertices[i]
        az = a - z
        num_t = cross(az, e)
        if _sgn(num_t) <= 0:
            continue
        num_u = cross(az, w)
        su0, su1 = _sgn(num_u), _sgn(num_u - den)
        if su0 < 0 or su1 > 0:
            continue
        t = num_t / den
        if su0 == 0:
            return t, i, ("vertex", i)
        if su1 == 0:
            return t, i, ("vertex", (i + 1) % n)
        return t, i, "edge"
    # ray along an edge: it ends at the far vertex of that edge
    for i in range(n):
        e = poly.edge(i)
        if _is_zero(cross(w, e)):
            a = poly.vertices[i]
            if _is_zero(cross(z - a, e)):
                j = (i + 1) % n if _sgn(dot(w, e)) > 0 else i
                t = dot(poly.vertices[j] - z, w) / dot(w, w)
                if _sgn(t) > 0:
                    return t, i, ("vertex", j)
    raise AssertionError("ray does not leave polygon")


def _start(s: TranslationSurface, loc: Location, w: Vec) -> Tuple[int, Vec]:
    """Polygon in which a ray from loc in direction w starts."""
    if loc.germ is not None:
        c = loc.germ.corner
        if not same_direction(loc.germ.direction, w):
            raise ValueError("germ direction differs from ray direction")
        return c[0], s.vertex(c)
    p, z = loc.polygon, loc.point
    poly = s.polygons[p]
    n = len(poly)
    for i in range(n):
        e = poly.edge(i)
        if _is_zero(cross(e, z - poly.vertices[i])):
            t = cross(e, w)
            if _sgn(t) < 0:
                # w points out of p through edge i
                q, f = s.gluings[(p, i)]
                shift = s.polygons[q].vertices[(f + 1) % len(s.polygons[q])] - poly.vertices[i]
                return q, z + shift
    return p, z


def trace(s: TranslationSurface, loc: Location, w: Vec, budget: int = 10 ** 5,
          stop_at_cone: bool = True) -> Optional[Location]:
    """Follow the segment of holonomy w from loc; None if it meets a cone point."""
    p, z = _start(s, loc, w)
    angles = s.cone_angles()
    remaining = s.field.one
    for _ in range(budget):
        t, i, kind = _exit(s, p, z, w, None)
        cmp = _sgn(t - remaining)
        poly = s.polygons[p]
        if cmp > 0 or (cmp == 0 and kind == "edge"):
            return Location(p, z + w * remaining)
        if kind == "edge":
            pt = z + w * t
            q, f = s.gluings[(p, i)]
            shift = s.polygons[q].vertices[(f + 1) % len(s.polygons[q])] - poly.vertices[i]
            p, z = q, pt + shift
            remaining = remaining - t
            continue
        j = kind[1]
        remaining = remaining - t
        arrive = normalize_germ(s, (p, j), -w)
        if _is_zero(remaining):
            return Location(p, poly.vertices[j], arrive)
        if angles[s.corner_class((p, j))] != 1 and stop_at_cone:
            return None
        g = rotate_ccw(s, arrive, w)
        # a straight continuation through a regular point turns by exactly pi
        p = g.corner[0]
        z = s.vertex(g.corner)
    raise RuntimeError("trace budget exhausted")


# ---------------------------------------------------------------------------
# translation isomorphism


@dataclass
class Isomorphism:
    kind: str
    data: object = None

    def to_json(self) -> dict:
        return {"kind": self.kind}


def _torus_lattice(s: TranslationSurface) -> List[Vec]:
    """Holonomies generating the period lattice (for genus one)."""
    gens = []
    off: Dict[int, Vec] = {0: Vec(s.field.zero, s.field.zero)}
    todo = [0]
    while todo:
        p = todo.pop()
        poly = s.polygons[p]
        for i in range(len(poly)):
            q, f = s.gluings[(p, i)]
            shift = poly.vertices[i] - s.polygons[q].vertices[(f + 1) % len(s.polygons[q])]
            o = off[p] + shift
            if q not in off:
                off[q] = o
                todo.append(q)
            else:
                d = o - off[q]
                if not d.is_zero():
                    gens.append(d)
    return gens


def _rational(x) -> Optional[Fraction]:
    return x.is_rational() if isinstance(x, FieldElement) else Fraction(x)


def _lattice_basis(vs: List[Vec]) -> Optional[Tuple[Vec, Vec]]:
    """A Z-basis of the group generated by vs, or None if it is not a lattice."""
    import math

    vs = [v for v in vs if not v.is_zero()]
    if not vs:
        return None
    a = vs[0]
    b = next((v for v in vs if not _is_zero(cross(a, v))), None)
    if b is None:
        return None
    det = cross(a, b)
    coords = []
    for v in vs:
        x, y = _rational(cross(v, b) / det), _rational(cross(a, v) / det)
        if x is None or y is None:
            return None
        coords.append((x, y))
    den = 1
    for x, y in coords:
        den = den * x.denominator // math.gcd(den, x.denominator)
        den = den * y.denominator // math.gcd(den, y.denominator)
    ints = [(int(x * den), int(y * den)) for x, y in coords]
    g, wx = 0, 0
    for x, y in ints:
        if y == 0:
            continue
        if g == 0:
            g, wx = abs(y), x if y > 0 else -x
            continue
        gg, s_, t_ = _egcd(g, y)
        wx, g = s_ * wx + t_ * x, gg
    gx = 0
    for x, y in ints:
        gx = math.gcd(gx, x - (y // g) * wx)
    if gx == 0:
        return None
    e1 = a * Fraction(gx, den)
    e2 = a * Fraction(wx, den) + b * Fraction(g, den)
    return e1, e2


def _egcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _same_lattice(b1: Tuple[Vec, Vec], b2: Tuple[Vec, Vec]) -> bool:
    for src, dst in ((b1, b2), (b2, b1)):
        a, b = dst
        det = cross(a, b)
        for v in src:
            x, y = _rational(cross(v, b) / det), _rational(cross(a, v) / det)
            if x is None or y is None or x.denominator != 1 or y.denominator != 1:
                return False
    return True


def _develop_check(t1: TranslationSurface, s2: TranslationSurface, base_tri: int, base_vertex: int,
                   g0: Germ) -> bool:
    return _develop(t1, s2, base_tri, base_vertex, g0) is not None


def _develop(t1: TranslationSurface, s2: TranslationSurface, base_tri: int, base_vertex: int,
             g0: Germ) -> Optional[Dict[int, List[Location]]]:
    """Develop the triangulated t1 into s2 from a germ.

    Returns the image of every triangle corner, or None when inconsistent.

    Every triangle is walked around its boundary in s2; the walk must close
    up, neighbouring triangles must agree on shared edges, vertex classes
    must map to points of equal cone angle and cone points injectively.
    """
    angles1 = t1.cone_angles()
    angles2 = s2.cone_angles()
    start: Dict[int, Tuple[int, Location]] = {
        base_tri: (base_vertex, Location(g0.corner[0], s2.vertex(g0.corner), g0))}
    constraints: Dict[int, List[Tuple[int, Location]]] = {}
    vertex_img: Dict[int, object] = {}
    outgoing: Dict[int, List[Location]] = {}
    todo = deque([base_tri])

    def at_vertex(loc: Location, w: Vec, cw: bool) -> Location:
        if loc.germ is None:
            return loc
        g = rotate_cw(s2, loc.germ, w) if cw else loc.germ
        return Location(g.corner[0], s2.vertex(g.corner), g)

    while todo:
        tri = todo.popleft()
        T = t1.polygons[tri]
        r, loc = start[tri]
        outs: List[Optional[Location]] = [None, None, None]
        arrivals: List[Optional[Location]] = [None, None, None]
        outs[r] = loc
        cur = loc
        for step in range(3):
            j = (r + step) % 3
            nxt = trace(s2, cur, T.edge(j))
            if nxt is None:
                return None
            k = (j + 1) % 3
            arrivals[k] = nxt
            cur = at_vertex(nxt, T.edge(k), True)
            if step < 2:
                outs[k] = cur
        # closing: back at vertex r with the original germ
        if not _same_germ(s2, cur, loc, angles2):
            return None
        outgoing[tri] = outs
        for j in range(3):
            v1 = t1.corner_class((tri, j))
            k2 = point_key(s2, outs[j])
            ang2 = angles2[k2[1]] if k2[0] == "v" else 1
            if ang2 != angles1[v1]:
                return None
            if vertex_img.setdefault(v1, k2) != k2:
                return None
        for j in range(3):
            nb, f = t1.gluings[(tri, j)]
            # neighbour's edge f starts at our vertex j + 1 and runs back along our edge j
            ln = arrivals[(j + 1) % 3]
            if nb in start:
                constraints.setdefault(nb, []).append((f, ln))
            else:
                start[nb] = (f, ln)
                todo.append(nb)
    for tri, items in constraints.items():
        for f, ln in items:
            if not _same_germ(s2, outgoing[tri][f], ln, angles2):
                return None
    if len(outgoing) != len(t1.polygons):
        return None
    cones1 = [v for v in range(len(angles1)) if angles1[v] != 1]
    imgs = [vertex_img.get(v) for v in cones1]
    if None in imgs or len(set(imgs)) != len(imgs):
        return None
    if len(cones1) != sum(1 for a in angles2 if a != 1):
        return None
    return outgoing


def _same_germ(s2: TranslationSurface, a: Location, b: Location, angles2) -> bool:
    ka, kb = point_key(s2, a), point_key(s2, b)
    if ka != kb:
        return False
    if a.germ is not None and b.germ is not None and angles2[ka[1]] != 1:
        return sheet_index(s2, a.germ) == sheet_index(s2, b.germ)
    return True


def is_translation_isomorphic(s1: TranslationSurface, s2: TranslationSurface) -> Optional[Isomorphism]:
    """A translation equivalence s1 -> s2, or None.

    Surfaces made of translated copies of the same polygons are matched
    directly.  Otherwise s1 is triangulated and developed into s2 from its
    largest cone point, trying every sheet at every cone point of equal
    angle.
    """
    if s1.field.degree > 1 and s2.field.degree > 1 and s1.field != s2.field:
        return None
    if sorted(a for a in s1.cone_angles() if a != 1) != sorted(a for a in s2.cone_angles() if a != 1):
        return None
    if s1.genus() != s2.genus() or s1.area() != s2.area():
        return None
    pm = _polygon_isomorphism(s1, s2, 1)
    if pm is not None:
        return Isomorphism("polygon-translation", pm)
    if not s1.cone_points():
        l1, l2 = _lattice_basis(_torus_lattice(s1)), _lattice_basis(_torus_lattice(s2))
        if l1 and l2 and _same_lattice(l1, l2):
            return Isomorphism("torus-lattice")
        return None
    t1 = triangulate(s1)
    c2 = convex_model(s2)
    angles1 = t1.cone_angles()
    v1 = max(range(len(angles1)), key=lambda v: angles1[v])
    tri, k = t1.vertex_classes()[v1][0]
    u = t1.polygons[tri].edge(k)
    angles2 = c2.cone_angles()
    for v2, cls in enumerate(c2.vertex_classes()):
        if angles2[v2] != angles1[v1]:
            continue
        for c in cls:
            if _in_sector(c2, c, u):
                if _develop_check(t1, c2, tri, k, Germ(c, u)):
                    return Isomorphism("development")
    return None

