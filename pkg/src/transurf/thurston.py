"""Thurston–Veech construction from a weighted intersection pattern.

The input names the horizontal curves ``I`` and vertical curves ``J``, the
intersection matrix, integer weights, and a *chaining table*: the cyclic
order of intersection points along every curve.  Each intersection point
of a horizontal curve r and a vertical curve s becomes a rectangle of
width ``h[s]`` and height ``h[r]``; rectangles are glued side to side along
horizontal chains and top to bottom along vertical chains.

Bipartite data is solved through the operator ``W_I N W_J N^T`` on the
horizontal curves.  Heights are its Perron–Frobenius eigenvector and widths
are ``W_J N^T h_I``; when the eigenvalue is a rational square the widths are
rescaled to the symmetric normalization ``mu h = W M h``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import isqrt
from typing import Dict, List, Optional, Sequence, Tuple

from . import polynomials as P
from .exactfield import QQ, FieldElement, NumberField, define_field, minimal_polynomial
from .flatsurf import Polygon, TranslationSurface, Vec


class ThurstonError(ValueError):
    pass


@dataclass
class ThurstonData:
    """Multicurve data; ``chain[c]`` lists intersection ids in cyclic order.

    Horizontal chains run left to right, vertical chains bottom to top.  An
    intersection id is any hashable label used once in a horizontal chain
    and once in a vertical chain.
    """

    I: List[str]
    J: List[str]
    M: List[List[int]]
    m: List[int]
    chain: Dict[str, List[str]] = dc_field(default_factory=dict)

    @property
    def names(self) -> List[str]:
        return list(self.I) + list(self.J)

    def check(self) -> None:
        n = len(self.names)
        if len(self.M) != n or any(len(r) != n for r in self.M):
            raise ThurstonError("intersection matrix has the wrong shape")
        if len(self.m) != n or any(w <= 0 for w in self.m):
            raise ThurstonError("weights must be positive integers, one per curve")
        for a in range(n):
            for b in range(n):
                if self.M[a][b] != self.M[b][a]:
                    raise ThurstonError("intersection matrix is not symmetric")
                if self.M[a][b] < 0:
                    raise ThurstonError("negative intersection number")

    def is_bipartite(self) -> bool:
        k = len(self.I)
        n = len(self.names)
        return all(self.M[a][b] == 0 for a in range(n) for b in range(n) if (a < k) == (b < k))

    def to_json(self) -> dict:
        return {"I": list(self.I), "J": list(self.J), "M": [list(r) for r in self.M], "m": list(self.m),
                "chain": {k: list(v) for k, v in sorted(self.chain.items())}}

    @classmethod
    def from_json(cls, obj: dict) -> "ThurstonData":
        return cls(list(obj["I"]), list(obj["J"]), [list(map(int, r)) for r in obj["M"]],
                   list(map(int, obj["m"])), {k: list(v) for k, v in obj.get("chain", {}).items()})


@dataclass
class PerronData:
    """Eigenvalue and positive eigenvector.

    ``squared`` marks the bipartite normalization: ``eigenvalue`` is then
    the square of the stretch factor and satisfies
    ``eigenvalue * h_r = m_r sum_s M_rs h_s`` for horizontal r, while
    ``h_s = m_s sum_r M_sr h_r`` for vertical s.
    """

    eigenvalue: FieldElement
    heights: List[FieldElement]
    squared: bool = False

    @property
    def field(self) -> NumberField:
        return self.eigenvalue.field

    def to_json(self) -> dict:
        return {"eigenvalue": self.eigenvalue.to_json(), "heights": [h.to_json() for h in self.heights],
                "squared": self.squared}


# ---------------------------------------------------------------------------
# exact linear algebra


def charpoly(A: Sequence[Sequence[int]]) -> List[int]:
    """Characteristic polynomial det(X - A), low degree first (Faddeev-LeVerrier)."""
    n = len(A)
    Af = [[Fraction(x) for x in r] for r in A]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        prev = Mk
        Mk = [[sum(Af[i][l] * prev[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            Mk[i][i] += coeffs[n - k + 1]
        AM = [[sum(Af[i][l] * Mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(AM[i][i] for i in range(n)) / k
    out = [int(c) for c in coeffs]
    if any(Fraction(o) != c for o, c in zip(out, coeffs)):
        raise AssertionError("non-integral characteristic polynomial")
    return out


def _matmul(A, B):
    return [[sum(A[i][l] * B[l][j] for l in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def is_irreducible_matrix(A: Sequence[Sequence[int]]) -> bool:
    n = len(A)
    B = [[A[i][j] + (1 if i == j else 0) for j in range(n)] for i in range(n)]
    R = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(max(n - 1, 1)):
        R = _matmul(R, B)
    return all(x > 0 for r in R for x in r)


def kernel_vector(A: List[List[FieldElement]]) -> List[FieldElement]:
    """A nonzero kernel vector of a square singular matrix over a field."""
    n = len(A)
    m = [list(r) for r in A]
    pivots = []
    row = 0
    for col in range(n):
        piv = next((i for i in range(row, n) if not m[i][col].is_zero()), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = m[row][col].inverse()
        m[row] = [x * inv for x in m[row]]
        for i in range(n):
            if i != row and not m[i][col].is_zero():
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
    free = [c for c in range(n) if c not in pivots]
    if not free:
        raise ThurstonError("matrix is not singular")
    fc = free[-1]
    K = A[0][0].field
    v = [K.zero] * n
    v[fc] = K.one
    for i, pc in enumerate(pivots):
        v[pc] = -m[i][fc]
    return v


def perron_frobenius(A: Sequence[Sequence[int]]) -> Tuple[FieldElement, List[FieldElement]]:
    """Largest eigenvalue and eigenvector (last coordinate 1) of a nonnegative irreducible matrix."""
    if not is_irreducible_matrix(A):
        raise ThurstonError("matrix is reducible")
    n = len(A)
    if n > 4:
        raise ThurstonError("matrix size is capped at 4")
    cp = charpoly(A)
    lo, hi = P.isolate_real_roots(_squarefree(cp))[-1]
    K = define_field(cp, (lo, hi))
    lam = K.gen
    B = [[K(A[i][j]) - (lam if i == j else K.zero) for j in range(n)] for i in range(n)]
    v = kernel_vector(B)
    if v[-1].is_zero():
        raise ThurstonError("Perron vector has a vanishing last coordinate")
    inv = v[-1].inverse()
    v = [x * inv for x in v]
    if any(x.sign() <= 0 for x in v):
        raise ThurstonError("eigenvector is not positive")
    return lam, v


def _squarefree(cp: List[int]) -> List[Fraction]:
    p = [Fraction(c) for c in cp]
    g = P.poly_gcd(p, P.derivative(p))
    if len(g) > 1:
        p, _ = P.divmod_poly(p, g)
    return p


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def perron_data(d: ThurstonData) -> PerronData:
    d.check()
    n = len(d.names)
    if not d.is_bipartite():
        WM = [[d.m[i] * d.M[i][j] for j in range(n)] for i in range(n)]
        lam, h = perron_frobenius(WM)
        return PerronData(lam, h, squared=False)
    k = len(d.I)
    N = [[d.M[i][k + j] for j in range(len(d.J))] for i in range(k)]
    wI, wJ = d.m[:k], d.m[k:]
    op = [[wI[i] * sum(N[i][s] * wJ[s] * N[j][s] for s in range(len(d.J))) for j in range(k)] for i in range(k)]
    full = [[d.m[i] * d.M[i][j] for j in range(n)] for i in range(n)]
    if not is_irreducible_matrix(full):
        raise ThurstonError("weighted intersection matrix is reducible")
    lam, hI = perron_frobenius(op)
    K = lam.field
    hJ = [sum((hI[i] * (wJ[s] * N[i][s]) for i in range(k)), K.zero) for s in range(len(d.J))]
    lq = lam.is_rational()
    root = _rational_sqrt(lq) if lq is not None else None
    if root is not None:
        hJ = [x / root for x in hJ]
        h = hI + hJ
        scale = h[-1].inverse()
        return PerronData(K(root), [x * scale for x in h], squared=False)
    return PerronData(lam, hI + hJ, squared=True)


def eigen_residual(d: ThurstonData, p: PerronData) -> List[FieldElement]:
    """Coordinatewise residual of the eigen-equation (all zero when exact)."""
    n = len(d.names)
    k = len(d.I)
    h = p.heights
    K = p.field
    out = []
    for r in range(n):
        acc = K.zero
        for s in range(n):
            if d.M[r][s]:
                acc = acc + h[s] * (d.m[r] * d.M[r][s])
        if not p.squared:
            out.append(p.eigenvalue * h[r] - acc)
        elif r < k:
            out.append(p.eigenvalue * h[r] - acc)
        else:
            out.append(h[r] - acc)
    return out


# ---------------------------------------------------------------------------
# building


@dataclass
class BuiltSurface:
    surface: TranslationSurface
    rectangles: Dict[str, int]
    # intersection id -> (horizontal curve, vertical curve)
    owners: Dict[str, Tuple[str, str]]


def _owners(d: ThurstonData) -> Dict[str, Tuple[str, str]]:
    hor: Dict[str, str] = {}
    ver: Dict[str, str] = {}
    for r in d.I:
        for x in d.chain.get(r, []):
            if x in hor:
                raise ThurstonError(f"intersection {x} used twice horizontally")
            hor[x] = r
    for s in d.J:
        for x in d.chain.get(s, []):
            if x in ver:
                raise ThurstonError(f"intersection {x} used twice vertically")
            ver[x] = s
    if set(hor) != set(ver):
        missing = sorted(set(hor) ^ set(ver), key=str)
        raise ThurstonError(f"dangling rectangle side at intersections {missing}")
    names = d.names
    idx = {c: i for i, c in enumerate(names)}
    counts: Dict[Tuple[str, str], int] = {}
    for x in hor:
        key = (hor[x], ver[x])
        counts[key] = counts.get(key, 0) + 1
    for r in d.I:
        for s in d.J:
            if counts.get((r, s), 0) != d.M[idx[r]][idx[s]]:
                raise ThurstonError(f"chaining table disagrees with M at ({r}, {s})")
    return {x: (hor[x], ver[x]) for x in hor}


def build_thurston(d: ThurstonData, p: Optional[PerronData] = None) -> TranslationSurface:
    return build_thurston_detailed(d, p).surface


def build_thurston_detailed(d: ThurstonData, p: Optional[PerronData] = None) -> BuiltSurface:
    p = p or perron_data(d)
    owners = _owners(d)
    idx = {c: i for i, c in enumerate(d.names)}
    K = p.field
    h = p.heights
    polys: List[Polygon] = []
    rect: Dict[str, int] = {}
    y0 = K.zero
    for r in d.I:
        x0 = K.zero
        hr = h[idx[r]]
        for x in d.chain[r]:
            ws = h[idx[owners[x][1]]]
            rect[x] = len(polys)
            polys.append(Polygon([Vec(x0, y0), Vec(x0 + ws, y0), Vec(x0 + ws, y0 + hr), Vec(x0, y0 + hr)]))
            x0 = x0 + ws
        y0 = y0 + hr
    pairs = []
    for r in d.I:
        ch = d.chain[r]
        for a, b in zip(ch, ch[1:] + ch[:1]):
            pairs.append(((rect[a], 1), (rect[b], 3)))
    for s in d.J:
        ch = d.chain[s]
        for a, b in zip(ch, ch[1:] + ch[:1]):
            pairs.append(((rect[a], 2), (rect[b], 0)))
    return BuiltSurface(TranslationSurface.from_pairs(K, polys, pairs), rect, owners)


# ---------------------------------------------------------------------------
# multitwists


@dataclass
class Multitwists:
    horizontal: List[List[FieldElement]]
    vertical: List[List[FieldElement]]
    trace: FieldElement
    trace_minpoly: List[Fraction]
    horizontal_moduli: List[FieldElement]
    vertical_moduli: List[FieldElement]

    @property
    def trace_degree(self) -> int:
        return len(self.trace_minpoly) - 1

    def to_json(self) -> dict:
        return {
            "horizontal": [[x.to_json() for x in r] for r in self.horizontal],
            "vertical": [[x.to_json() for x in r] for r in self.vertical],
            "trace": self.trace.to_json(),
            "trace_minpoly": [[c.numerator, c.denominator] for c in self.trace_minpoly],
            "trace_degree": self.trace_degree,
        }


def _lcm_ratio(ratios: List[FieldElement], labels: List[str]) -> FieldElement:
    """Smallest t with t / ratio an integer for every ratio."""
    base = ratios[0]
    qs = []
    for r, lab in zip(ratios, labels):
        q = (r / base).is_rational()
        if q is None:
            raise ThurstonError(f"moduli are incommensurable: {lab} has c/h = {r!r} vs {base!r}")
        qs.append(Fraction(q))
    from math import gcd

    num = 1
    den = 0
    for q in qs:
        num = num * q.numerator // gcd(num, q.numerator)
        den = gcd(den, q.denominator)
    return base * Fraction(num, den)


def circumference_ratios(d: ThurstonData, p: PerronData) -> Tuple[List[FieldElement], List[FieldElement]]:
    """Circumference over height for every horizontal and vertical cylinder."""
    n = len(d.names)
    k = len(d.I)
    h = p.heights
    K = p.field
    out_h, out_v = [], []
    for r in range(n):
        c = K.zero
        for s in range(n):
            if d.M[r][s]:
                c = c + h[s] * d.M[r][s]
        (out_h if r < k else out_v).append(c / h[r])
    return out_h, out_v


def multitwists(d: ThurstonData, p: Optional[PerronData] = None) -> Multitwists:
    p = p or perron_data(d)
    if not d.is_bipartite():
        raise ThurstonError("multitwists need a bipartite intersection pattern")
    rh, rv = circumference_ratios(d, p)
    th = _lcm_ratio(rh, list(d.I))
    tv = _lcm_ratio(rv, list(d.J))
    K = p.field
    T = [[K.one, th], [K.zero, K.one]]
    U = [[K.one, K.zero], [tv, K.one]]
    TU = [[T[i][0] * U[0][j] + T[i][1] * U[1][j] for j in range(2)] for i in range(2)]
    tr = TU[0][0] + TU[1][1]
    return Multitwists(T, U, tr, minimal_polynomial(tr), rh, rv)


def matrix_trace(A) -> FieldElement:
    return A[0][0] + A[1][1]


def matmul2(A, B):
    return [[A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)] for i in range(2)]


def load(path: str) -> ThurstonData:
    with open(path) as fh:
        return ThurstonData.from_json(json.load(fh))
