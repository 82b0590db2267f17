"""SVG pictures of surfaces and cylinder decompositions.

Coordinates are evaluated to floats only for drawing.  Strips of a
decomposition are cut exactly and located with the exact tracer; only the
final outlines are rounded, to 1e-6.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

from .flatsurf import TranslationSurface, Vec, cross, find_involution
from .flow import Decomposition, _piece_index, _which_cylinder_from, singular_classes

FIXED_FILL = "#9ecae1"
EXCHANGED_FILL = "#fdae6b"
UNKNOWN_FILL = "#d9d9d9"
PAD = 0.15

Point = Tuple[float, float]


def _fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _floats(poly: Sequence[Vec]) -> List[Point]:
    return [(float(v.x), float(v.y)) for v in poly]


def _clip(poly: List[Vec], w: Vec, lo, hi) -> List[Vec]:
    """Part of a convex polygon with lo <= cross(w, z) <= hi, exactly."""
    def half(pts, f):
        out = []
        n = len(pts)
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            fa, fb = f(a), f(b)
            if fa.sign() >= 0:
                out.append(a)
            if fa.sign() * fb.sign() < 0:
                t = fa / (fa - fb)
                out.append(a + (b - a) * t)
        return out

    pts = half(poly, lambda z: cross(w, z) - lo)
    if pts:
        pts = half(pts, lambda z: hi - cross(w, z))
    return pts


def _overlapping(polys: Sequence[List[Point]]) -> bool:
    def axes(p):
        n = len(p)
        return [(p[(i + 1) % n][1] - p[i][1], p[i][0] - p[(i + 1) % n][0]) for i in range(n)]

    def separated(p, q):
        for ax in axes(p) + axes(q):
            a = [x * ax[0] + y * ax[1] for x, y in p]
            b = [x * ax[0] + y * ax[1] for x, y in q]
            if max(a) <= min(b) + 1e-9 or max(b) <= min(a) + 1e-9:
                return True
        return False

    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if not separated(polys[i], polys[j]):
                return True
    return False


def _layout(polys: Sequence[List[Point]]) -> List[Point]:
    """Offsets for each polygon: zero if the chart layout is already disjoint, else a row."""
    if not _overlapping(polys):
        return [(0.0, 0.0)] * len(polys)
    offs = []
    x = 0.0
    for p in polys:
        xmin = min(a for a, _ in p)
        ymin = min(b for _, b in p)
        offs.append((x - xmin, -ymin))
        x += max(a for a, _ in p) - xmin + PAD * 2
    return offs


def _strips(dec: Decomposition) -> List[Tuple[int, List[Vec], Optional[int]]]:
    """(polygon, exact outline, cylinder id) for the regions cut by the saddle connections."""
    S = dec.model
    w = dec.w
    u = Vec(w.y, -w.x)
    targets = _piece_index(S, dec.saddle_connections, w)
    sing = set(singular_classes(S))
    out = []
    for p, poly in enumerate(S.polygons):
        offs = [cross(w, v) for v in poly.vertices]
        lo, hi = min(offs), max(offs)
        cuts = {cross(w, pc.start) for sc in dec.saddle_connections for pc in sc.pieces if pc.polygon == p}
        levels = sorted({lo, hi} | {c for c in cuts if lo < c < hi})
        for a, b in zip(levels, levels[1:]):
            region = _clip(list(poly.vertices), w, a, b)
            if len(region) < 3:
                continue
            c = Vec(S.field.zero, S.field.zero)
            for z in region:
                c = c + z
            c = c / len(region)
            cyl = _which_cylinder_from(dec, S, p, c, u, targets, 10_000, sing)
            out.append((p, region, cyl))
    return out


def _fill(dec: Decomposition, cyl: Optional[int]) -> str:
    if cyl is None:
        return UNKNOWN_FILL
    fixed = dec.cylinders[cyl].fixed
    if fixed is None:
        return UNKNOWN_FILL
    return FIXED_FILL if fixed else EXCHANGED_FILL


def render(s: TranslationSurface, dec: Optional[Decomposition] = None, scale: float = 60.0) -> str:
    """SVG of the polygons of s, or of the cut model when a decomposition is given.

    Glued edges carry the same number, cylinders are shaded by whether the
    involution fixes them, and fixed points of the involution are bullets.
    """
    S = dec.model if dec is not None else s
    polys = [_floats(p.vertices) for p in S.polygons]
    offs = _layout(polys)

    def at(p: int, z: Point) -> Point:
        return z[0] + offs[p][0], z[1] + offs[p][1]

    placed = [[at(p, z) for z in poly] for p, poly in enumerate(polys)]
    xs = [x for poly in placed for x, _ in poly]
    ys = [y for poly in placed for _, y in poly]
    x0, x1 = min(xs) - PAD, max(xs) + PAD
    y0, y1 = min(ys) - PAD, max(ys) + PAD
    width, height = (x1 - x0) * scale, (y1 - y0) * scale

    def tr(z: Point) -> str:
        return f"{_fmt((z[0] - x0) * scale)},{_fmt((y1 - z[1]) * scale)}"

    body: List[str] = []
    if dec is not None:
        for p, region, cyl in _strips(dec):
            pts = " ".join(tr(at(p, z)) for z in _floats(region))
            body.append(f'<polygon points="{pts}" fill="{_fill(dec, cyl)}" stroke="none"/>')
    for poly in placed:
        pts = " ".join(tr(z) for z in poly)
        fill = "none" if dec is not None else "#f7f7f7"
        body.append(f'<polygon points="{pts}" fill="{fill}" stroke="black" stroke-width="1"/>')
    if dec is not None:
        for sc in dec.saddle_connections:
            for pc in sc.pieces:
                end = pc.start + sc.holonomy / sc.length * (pc.t1 - pc.t0)
                ax, ay = tr(at(pc.polygon, (float(pc.start.x), float(pc.start.y)))).split(",")
                bx, by = tr(at(pc.polygon, (float(end.x), float(end.y)))).split(",")
                body.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke="#08519c" stroke-width="1.5"/>')
        for c in dec.cylinders:
            if c.core_point is None:
                continue
            p, z = c.core_point
            x, y = tr(at(p, (float(z.x), float(z.y)))).split(",")
            body.append(f'<text x="{x}" y="{y}" font-size="10" fill="#08306b">C{c.id}</text>')
    for k, (e, f) in enumerate(S.edge_pairs(), start=1):
        for p, i in (e, f):
            poly = placed[p]
            a, b = poly[i], poly[(i + 1) % len(poly)]
            cx = sum(x for x, _ in poly) / len(poly)
            cy = sum(y for _, y in poly) / len(poly)
            mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
            lx, ly = mx + (cx - mx) * 0.12, my + (cy - my) * 0.12
            x, y = tr((lx, ly)).split(",")
            body.append(f'<text x="{x}" y="{y}" font-size="9" text-anchor="middle">{k}</text>')
    inv = dec.involution if dec is not None else find_involution(S)
    points = getattr(inv, "fixed_points", None) or []
    for fp in points:
        x, y = tr(at(fp.polygon, (float(fp.point.x), float(fp.point.y)))).split(",")
        body.append(f'<circle cx="{x}" cy="{y}" r="3" fill="black"/>')
    title = escape(repr(S))
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
            f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">\n<title>{title}</title>\n'
            + "\n".join(body) + "\n</svg>\n")
