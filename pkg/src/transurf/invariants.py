"""J-invariant, SAF invariant, interval exchanges and periodicity certificates.

The field ``K`` of a surface is a ``d``-dimensional Q-vector space through
its power basis, so ``K^2`` is identified with ``Q^(2d)``: x-coordinates
first, then y-coordinates.  J lives in the exterior square of that space.

Interval exchanges list intervals in their order on the domain;
``permutation[i]`` is the position of interval ``i`` in the image.  The
first return map along ``w`` measures a transversal vector ``v`` by
``cross(v, w)``, which for the vertical direction is the horizontal length.
With this orientation ``saf_iet`` of a first return map equals minus the
``j_xx`` of the surface turned so that ``w`` is vertical.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .exactfield import FieldElement, NumberField, WedgeQQ, common_field, wedge
from .flatsurf import Polygon, TranslationSurface, Vec, _sgn, convex_model, cross
from .flow import (COMPLETELY_PERIODIC, DEFAULT_BUDGET, Decomposition, Piece, _direction, _follow,
                   _lift_surface, decompose, outgoing_germs, singular_classes)

PERIODIC = "periodic"
APERIODIC = "aperiodic-certified"
UNDETERMINED = "undetermined"
NOT_COMPLETELY_PERIODIC = "not-completely-periodic"
ORBIT_BUDGET = 100_000


class InvariantError(ValueError):
    pass


# ---------------------------------------------------------------------------
# J-invariant


class JValue:
    """An element of K^2 wedge_Q K^2 stored as a Q-wedge on 2d coordinates."""

    def __init__(self, field: NumberField, w: Optional[WedgeQQ] = None):
        self.field = field
        self.w = w if w is not None else WedgeQQ(2 * field.degree)

    @property
    def degree(self) -> int:
        return self.field.degree

    def _block(self, a: int, b: int) -> WedgeQQ:
        d = self.degree
        out = {}
        for (i, j), v in self.w.coeffs.items():
            if i // d == a and j // d == b:
                out[(i % d, j % d)] = v
        return WedgeQQ(d, out)

    def xx(self) -> WedgeQQ:
        return self._block(0, 0)

    def yy(self) -> WedgeQQ:
        return self._block(1, 1)

    def xy(self) -> Dict[Tuple[int, int], Fraction]:
        """Coefficients of x_i wedge y_j."""
        d = self.degree
        return {(i, j - d): v for (i, j), v in self.w.coeffs.items() if i < d <= j}

    def is_zero(self) -> bool:
        return self.w.is_zero()

    def __add__(self, other: "JValue") -> "JValue":
        return JValue(self.field, self.w + other.w)

    def __eq__(self, other):
        if not isinstance(other, JValue):
            return NotImplemented
        return self.field == other.field and self.w == other.w

    def __hash__(self):
        return hash(self.w)

    def to_json(self) -> dict:
        return {"field": self.field.to_json(), "wedge": self.w.to_json()}

    def __repr__(self):
        return f"JValue({self.w!r})"


def _coords(v: Vec, K: NumberField) -> Tuple[Fraction, ...]:
    return tuple(K.lift(v.x).c) + tuple(K.lift(v.y).c)


def j_polygon(poly: Polygon, K: NumberField) -> JValue:
    vs = [_coords(v, K) for v in poly.vertices]
    n = len(vs)
    total = WedgeQQ(2 * K.degree)
    for i in range(n):
        total = total + WedgeQQ.from_vectors(vs[i], vs[(i + 1) % n])
    return JValue(K, total)


def j_invariant(s: TranslationSurface) -> JValue:
    total = JValue(s.field)
    for poly in s.polygons:
        total = total + j_polygon(poly, s.field)
    return total


def j_xx(s: TranslationSurface) -> WedgeQQ:
    return j_invariant(s).xx()


def _to_vertical(s: TranslationSurface, d) -> TranslationSurface:
    """The surface under [[y, -x], [x, y]], which sends (x, y) to the vertical."""
    dr = _direction(s, d)
    x, y = dr.x, dr.y
    K = dr.field
    polys = [Polygon([Vec(y * K.lift(v.x) - x * K.lift(v.y), x * K.lift(v.x) + y * K.lift(v.y))
                      for v in p.vertices]) for p in s.polygons]
    return TranslationSurface(K, polys, s.gluings)


def saf_direction(s: TranslationSurface, d) -> WedgeQQ:
    """SAF invariant of the flow in direction d, up to the similarity factor.

    Only its vanishing is meaningful across directions: the similarity
    multiplies the wedge by a field element.
    """
    return j_xx(_to_vertical(s, d))


# ---------------------------------------------------------------------------
# interval exchanges


@dataclass(frozen=True)
class IET:
    lengths: Tuple[FieldElement, ...]
    permutation: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.lengths)
        if n == 0:
            raise InvariantError("an interval exchange needs at least one interval")
        if sorted(self.permutation) != list(range(n)):
            raise InvariantError("permutation must be a bijection of 0..n-1")
        K = common_field(*self.lengths)
        lengths = tuple(K.lift(x) for x in self.lengths)
        if any(x.sign() <= 0 for x in lengths):
            raise InvariantError("interval lengths must be positive")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "permutation", tuple(self.permutation))

    @classmethod
    def of(cls, lengths: Sequence, permutation: Sequence[int], field: Optional[NumberField] = None) -> "IET":
        K = field or common_field(*lengths)
        return cls(tuple(K.lift(x) for x in lengths), tuple(permutation))

    @property
    def field(self) -> NumberField:
        return self.lengths[0].field

    @property
    def n(self) -> int:
        return len(self.lengths)

    @property
    def total(self) -> FieldElement:
        return sum(self.lengths, self.field.zero)

    def starts(self) -> List[FieldElement]:
        out, acc = [], self.field.zero
        for x in self.lengths:
            out.append(acc)
            acc = acc + x
        return out

    def image_starts(self) -> List[FieldElement]:
        order = self.bottom_order()
        pos: Dict[int, FieldElement] = {}
        acc = self.field.zero
        for i in order:
            pos[i] = acc
            acc = acc + self.lengths[i]
        return [pos[i] for i in range(self.n)]

    def bottom_order(self) -> List[int]:
        order = [0] * self.n
        for i, p in enumerate(self.permutation):
            order[p] = i
        return order

    @property
    def translations(self) -> Tuple[FieldElement, ...]:
        return tuple(b - a for a, b in zip(self.starts(), self.image_starts()))

    def interval_of(self, x) -> int:
        x = self.field.lift(x)
        acc = self.field.zero
        for i, l in enumerate(self.lengths):
            acc = acc + l
            if _sgn(x - acc) < 0:
                return i
        raise InvariantError("point outside the domain")

    def __call__(self, x) -> FieldElement:
        x = self.field.lift(x)
        if x.sign() < 0:
            raise InvariantError("point outside the domain")
        return x + self.translations[self.interval_of(x)]

    def to_json(self) -> dict:
        return {"version": 1, "field": self.field.to_json(), "lengths": [x.to_json() for x in self.lengths],
                "permutation": [p + 1 for p in self.permutation]}

    @classmethod
    def from_json(cls, obj: dict) -> "IET":
        lengths = tuple(FieldElement.from_json(x) for x in obj["lengths"])
        return cls(lengths, tuple(int(p) - 1 for p in obj["permutation"]))


def saf_iet(f: IET) -> WedgeQQ:
    total = WedgeQQ(f.field.degree)
    for l, t in zip(f.lengths, f.translations):
        total = total + wedge(l, t)
    return total


class RauzyTie(InvariantError):
    """The two competing intervals have equal length: a connection."""


def rauzy_step(f: IET, drop_ties: bool = False) -> IET:
    """Induce on [0, L - m), m the smaller of the last domain and last image intervals.

    Equal lengths raise ``RauzyTie`` unless ``drop_ties`` is set, in which
    case the last domain interval disappears and the last image interval
    takes its place in the image.
    """
    top = list(range(f.n))
    bot = f.bottom_order()
    lam = list(f.lengths)
    a, b = top[-1], bot[-1]
    c = _sgn(lam[a] - lam[b])
    if a == b:
        raise InvariantError("reducible permutation: the last interval is fixed")
    if c == 0:
        if not drop_ties:
            raise RauzyTie("tie in Rauzy induction")
        top.pop()
        bot.pop()
        bot[bot.index(a)] = b
        lengths = tuple(lam[i] for i in top)
        where = {lab: k for k, lab in enumerate(top)}
        perm = [0] * len(top)
        for pos, lab in enumerate(bot):
            perm[where[lab]] = pos
        return IET(lengths, tuple(perm))
    if c > 0:
        lam[a] = lam[a] - lam[b]
        bot.pop()
        bot.insert(bot.index(a) + 1, b)
    else:
        lam[b] = lam[b] - lam[a]
        top.pop()
        top.insert(top.index(b) + 1, a)
    lengths = tuple(lam[i] for i in top)
    where = {lab: k for k, lab in enumerate(top)}
    perm = [0] * f.n
    for pos, lab in enumerate(bot):
        perm[where[lab]] = pos
    return IET(lengths, tuple(perm))


def merge_fake(f: IET) -> IET:
    """Join neighbours that stay neighbours in the image."""
    lam = list(f.lengths)
    perm = list(f.permutation)
    i = 0
    while i + 1 < len(lam):
        if perm[i + 1] == perm[i] + 1:
            lam[i] = lam[i] + lam[i + 1]
            gone = perm[i + 1]
            del lam[i + 1], perm[i + 1]
            perm = [p - 1 if p > gone else p for p in perm]
        else:
            i += 1
    return IET(tuple(lam), tuple(perm))


def components(f: IET) -> List[IET]:
    """Split at every k with intervals 0..k-1 mapped onto themselves."""
    out = []
    start = 0
    seen_max = -1
    for i, p in enumerate(f.permutation):
        seen_max = max(seen_max, p)
        if seen_max == i:
            lam = f.lengths[start:i + 1]
            perm = [q - start for q in f.permutation[start:i + 1]]
            out.append(IET(tuple(lam), tuple(perm)))
            start = i + 1
    return out


def _pieces(f: IET) -> List[Tuple[FieldElement, FieldElement, FieldElement]]:
    return [(a, a + l, t) for a, l, t in zip(f.starts(), f.lengths, f.translations)]


def _compose(g, f, count: List[int]):
    """Pieces of f followed by g, both given as sorted (start, end, translation) lists."""
    out = []
    for a, b, t in f:
        lo, hi = a + t, b + t
        for c, d, u in g:
            count[0] += 1
            if _sgn(d - lo) <= 0:
                continue
            if _sgn(c - hi) >= 0:
                break
            x0 = lo if _sgn(lo - c) >= 0 else c
            x1 = hi if _sgn(hi - d) <= 0 else d
            out.append((x0 - t, x1 - t, t + u))
    out.sort(key=lambda p: float(p[0]))
    merged = []
    for p in out:
        if merged and merged[-1][2] == p[2] and merged[-1][1] == p[0]:
            merged[-1] = (merged[-1][0], p[1], p[2])
        else:
            merged.append(p)
    return merged


def orbit_period(f: IET, budget: int = ORBIT_BUDGET) -> Optional[int]:
    """Smallest k with f^k the identity, or None if not found within the budget."""
    base = _pieces(f)
    cur = base
    count = [0]
    k = 1
    while count[0] <= budget:
        if len(cur) == 1 and cur[0][2].is_zero():
            return k
        cur = _compose(base, cur, count)
        k += 1
    return None


@dataclass
class IETCertificate:
    status: str
    period: Optional[int]
    saf: WedgeQQ
    reason: str
    components: List[IET] = dc_field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {"status": self.status, "period": self.period, "saf": self.saf.to_json(),
                "reason": self.reason, "components": [c.to_json() for c in self.components]}


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def certify_iet_periodic(f: IET, budget: int = ORBIT_BUDGET, find_period: bool = True) -> IETCertificate:
    """Periodic, certified aperiodic, or undetermined.

    A non-zero SAF rules out periodicity.  Otherwise the map is reduced to
    irreducible pieces; a piece with at most three intervals and zero SAF
    is periodic, larger pieces go through Rauzy induction (a tie is a
    connection and removes an interval) until they reach that size, and the
    period is then looked for by composing ``f`` with itself, unless
    ``find_period`` is off and the lemma already settles the question.
    """
    saf = saf_iet(f)
    if not saf.is_zero():
        return IETCertificate(APERIODIC, None, saf, "non-zero SAF invariant")
    work = [merge_fake(c) for c in components(merge_fake(f))]
    done: List[IET] = []
    steps = 0
    lemma_ok = True
    while work:
        g = work.pop()
        if g.n <= 3:
            if not saf_iet(g).is_zero():
                return IETCertificate(APERIODIC, None, saf, "a component has non-zero SAF invariant")
            done.append(g)
            continue
        if steps >= budget:
            lemma_ok = False
            done.append(g)
            continue
        h = rauzy_step(g, drop_ties=True)
        steps += 1
        work.extend(merge_fake(c) for c in components(merge_fake(h)))
    period = orbit_period(f, budget) if find_period or not lemma_ok else None
    if lemma_ok:
        return IETCertificate(PERIODIC, period, saf, "three-interval lemma on every component", done)
    if period is not None:
        return IETCertificate(PERIODIC, period, saf, "orbit closure", done)
    return IETCertificate(UNDETERMINED, None, saf, "budget exhausted", done)


# ---------------------------------------------------------------------------
# first return maps


@dataclass
class Segment:
    """Transversal piece z + s v, 0 <= s < 1, in the convex model."""

    polygon: int
    start: Vec
    vector: Vec


def _segment_pieces(S: TranslationSurface, seg: Segment, sing, budget: int) -> List[Piece]:
    r = _follow(S, seg.vector, sing, budget, polygon=seg.polygon, point=seg.start, limit=S.field.one)
    if r.kind != "limit":
        raise InvariantError("transversal runs into a singular point")
    return r.pieces


def _edge_segments(S: TranslationSurface, w: Vec) -> List[Segment]:
    """One segment per glued pair of edges transverse to w, oriented so cross(v, w) > 0."""
    out = []
    for (p, i), _ in S.edge_pairs():
        poly = S.polygons[p]
        e = poly.edge(i)
        c = _sgn(cross(e, w))
        if c == 0:
            continue
        if c > 0:
            out.append(Segment(p, poly.vertices[i], e))
        else:
            out.append(Segment(p, poly.vertices[(i + 1) % len(poly)], -e))
    return out


def _cross_sections(dec: Decomposition) -> List[Segment]:
    from .flow import _point_on

    w = dec.w
    u = Vec(w.y, -w.x)
    out = []
    for c in dec.cylinders:
        sc = dec.saddle_connections[c.left[0]]
        p, z, _ = _point_on(sc, Fraction(1, 3))
        out.append(Segment(p, z, u * c.height))
    return out


def first_return_iet(s: TranslationSurface, d, transversal: Optional[Sequence[Segment]] = None,
                     budget: int = DEFAULT_BUDGET) -> IET:
    """First return map of the flow in direction d to a union of segments.

    Segments are given in the convex model of ``s`` (which is ``s`` itself
    when every polygon is convex) and are laid end to end in the given
    order.  The default is the cylinder cross-sections when the direction
    is completely periodic, and the transverse polygon edges otherwise.
    """
    dr = _direction(s, d)
    S = convex_model(_lift_surface(s, dr.field))
    K = S.field
    w = dr.vector
    sing = set(singular_classes(S))
    if transversal is None:
        dec = decompose(S, dr, budget, involution=False)
        transversal = _cross_sections(dec) if dec.status == COMPLETELY_PERIODIC else _edge_segments(S, w)
    segs = list(transversal)
    if not segs:
        raise InvariantError("empty transversal")
    targets: Dict = {}
    offsets: List[FieldElement] = []
    scale: List[FieldElement] = []
    ends: List[Tuple[int, Vec]] = []
    acc = K.zero
    for k, seg in enumerate(segs):
        v = Vec(K.lift(seg.vector.x), K.lift(seg.vector.y))
        m = cross(v, w)
        if m.sign() <= 0:
            raise InvariantError("transversal segments must cross the flow from right to left of w")
        seg = segs[k] = Segment(seg.polygon, Vec(K.lift(seg.start.x), K.lift(seg.start.y)), v)
        pieces = _segment_pieces(S, seg, sing, budget)
        for pc in pieces:
            targets.setdefault(pc.polygon, []).append((k, pc, v))
        last = pieces[-1]
        ends.append((pieces[0].polygon, pieces[0].start))
        ends.append((last.polygon, last.start + v * (last.t1 - last.t0)))
        offsets.append(acc)
        scale.append(m)
        acc = acc + m
    total = acc

    def hit_param(r) -> Optional[FieldElement]:
        if r.kind != "hit":
            return None
        k = r.hit.target
        tau = r.hit.param
        if _sgn(tau) < 0 or _sgn(tau - 1) >= 0:
            return None
        return offsets[k] + tau * scale[k]

    cuts = set(offsets)
    for v in sorted(sing):
        for g in outgoing_germs(S, v, -w):
            x = hit_param(_follow(S, -w, sing, budget, germ=g, targets=targets))
            if x is not None:
                cuts.add(x)
    for p, z in ends:
        r = _ray_from(S, p, z, -w, sing, budget, targets)
        x = None if r is None else hit_param(r)
        if x is not None:
            cuts.add(x)
    cuts.discard(total)
    pts = sorted(cuts, key=lambda x: (float(x), x.c))
    # exact sort check
    for a, b in zip(pts, pts[1:]):
        if _sgn(b - a) <= 0:
            pts = _exact_sort(pts)
            break
    bounds = pts + [total]
    lengths, images = [], []
    for a, b in zip(bounds, bounds[1:]):
        mid = (a + b) / 2
        k = max(j for j in range(len(segs)) if _sgn(mid - offsets[j]) >= 0)
        tau = (mid - offsets[k]) / scale[k]
        p, z = _locate_on(targets, k, tau)
        r = _follow(S, w, sing, budget, polygon=p, point=z, targets=targets)
        y = hit_param(r)
        if y is None:
            raise InvariantError("a leaf did not return to the transversal within the budget")
        lengths.append(b - a)
        images.append(y - (b - a) / 2)
    order = sorted(range(len(lengths)), key=lambda i: (float(images[i]), images[i].c))
    perm = [0] * len(lengths)
    acc = K.zero
    for pos, i in enumerate(order):
        if images[i] != acc:
            raise InvariantError("return map does not tile the transversal")
        perm[i] = pos
        acc = acc + lengths[i]
    return merge_fake(IET(tuple(lengths), tuple(perm)))


def _ray_from(S: TranslationSurface, p: int, z: Vec, w: Vec, sing, budget: int, targets):
    """Ray from a point of polygon p; None when the point is singular."""
    poly = S.polygons[p]
    for j, v in enumerate(poly.vertices):
        if v == z:
            vc = S.corner_class((p, j))
            if vc in sing:
                return None
            g = outgoing_germs(S, vc, w)[0]
            return _follow(S, w, sing, budget, germ=g, targets=targets)
    return _follow(S, w, sing, budget, polygon=p, point=z, targets=targets)


def _exact_sort(xs: List[FieldElement]) -> List[FieldElement]:
    from functools import cmp_to_key

    return sorted(xs, key=cmp_to_key(lambda a, b: _sgn(a - b)))


def _locate_on(targets, k: int, tau: FieldElement) -> Tuple[int, Vec]:
    """Polygon and point at parameter tau of transversal segment k."""
    for items in targets.values():
        for tid, pc, v in items:
            if tid == k and _sgn(tau - pc.t0) >= 0 and _sgn(tau - pc.t1) <= 0:
                return pc.polygon, pc.start + v * (tau - pc.t0)
    raise InvariantError("parameter outside the transversal")


# ---------------------------------------------------------------------------
# certificates for directions


@dataclass
class DirectionCertificate:
    status: str
    step: str
    decomposition: Optional[Decomposition] = None
    saf: Optional[WedgeQQ] = None
    iet: Optional[IET] = None
    iet_certificate: Optional[IETCertificate] = None

    def to_json(self) -> dict:
        out = {"version": 1, "status": self.status, "step": self.step}
        if self.decomposition is not None:
            out["decomposition"] = self.decomposition.to_json()
        if self.saf is not None:
            out["saf"] = self.saf.to_json()
        if self.iet is not None:
            out["iet"] = self.iet.to_json()
        if self.iet_certificate is not None:
            out["iet_certificate"] = self.iet_certificate.to_json()
        return out


def certify_direction(s: TranslationSurface, d, budget: int = DEFAULT_BUDGET) -> DirectionCertificate:
    """Decide complete periodicity of direction d where the evidence allows.

    Steps: a full trace; a non-zero SAF invariant; and, when a cylinder
    fixed by the involution was found, the reduction of the first return
    map on the rest of the surface to pieces of at most three intervals.
    """
    dec = decompose(s, d, budget)
    if dec.status == COMPLETELY_PERIODIC:
        return DirectionCertificate(COMPLETELY_PERIODIC, "trace", dec)
    saf = saf_direction(s, d)
    if not saf.is_zero():
        return DirectionCertificate(NOT_COMPLETELY_PERIODIC, "saf", dec, saf)
    fixed = [c for c in dec.cylinders if c.fixed]
    if not fixed:
        return DirectionCertificate(UNDETERMINED, "no fixed cylinder", dec, saf)
    try:
        f = first_return_iet(dec.model, dec.direction, _edge_segments(dec.model, dec.w), budget)
    except InvariantError:
        return DirectionCertificate(UNDETERMINED, "first return map not determined", dec, saf)
    cert = certify_iet_periodic(f, ORBIT_BUDGET)
    if cert.status == PERIODIC:
        return DirectionCertificate(COMPLETELY_PERIODIC, "reduction", dec, saf, f, cert)
    if cert.status == APERIODIC:
        return DirectionCertificate(NOT_COMPLETELY_PERIODIC, "reduction", dec, saf, f, cert)
    return DirectionCertificate(UNDETERMINED, "reduction", dec, saf, f, cert)
