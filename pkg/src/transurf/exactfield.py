"""Exact arithmetic in real number fields Q(alpha) of degree at most 4.

A :class:`NumberField` is a monic irreducible integer polynomial together
with a rational interval isolating one real root.  Elements are rational
coordinate vectors in the power basis ``1, alpha, ..., alpha^(d-1)``.  Signs
are decided by exact interval arithmetic on rational (integer-scaled)
endpoints; no floating point is used in any decision.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import polynomials as P

Rational = Union[int, Fraction]

MAX_DEGREE = 4


class FieldMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# factorization of small monic integer polynomials


def _divisors(n: int) -> List[int]:
    n = abs(n)
    out = set()
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.add(i)
            out.add(n // i)
        i += 1
    return sorted(out)


def _int_eval(coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _check_monic(coeffs: Sequence[int]) -> List[int]:
    c = [int(a) for a in coeffs]
    while c and c[-1] == 0:
        c.pop()
    if len(c) < 2:
        raise ValueError("polynomial must have degree >= 1")
    if c[-1] != 1:
        raise ValueError(f"polynomial must be monic, got leading coefficient {c[-1]}")
    return c


def _synthetic_div(coeffs: List[int], r: int) -> List[int]:
    # divide by (X - r); caller guarantees exactness
    n = len(coeffs) - 1
    out = [0] * n
    acc = 0
    for i in range(n, 0, -1):
        acc = acc * r + coeffs[i]
        out[i - 1] = acc
    return out


def factor_monic_int_poly(coeffs: Sequence[int]) -> List[List[int]]:
    """Irreducible monic factors (low degree first coefficient lists).

    Degree at most 4.  Integer roots are stripped first; a remaining quartic
    is tested against every quadratic pair whose constant terms divide the
    constant coefficient.  Factors are returned with multiplicity, sorted by
    degree then coefficients.
    """
    c = _check_monic(coeffs)
    if len(c) - 1 > MAX_DEGREE:
        raise ValueError("factorization is limited to degree <= 4")
    factors: List[List[int]] = []
    while len(c) > 2:
        if c[0] == 0:
            factors.append([0, 1])
            c = c[1:]
            continue
        for d in _divisors(c[0]):
            hit = None
            for r in (d, -d):
                if _int_eval(c, r) == 0:
                    hit = r
                    break
            if hit is not None:
                factors.append([-hit, 1])
                c = _synthetic_div(c, hit)
                break
        else:
            break
    if len(c) - 1 == 4:
        split = _quadratic_pair(c)
        if split:
            factors.extend(split)
            c = [1]
    if len(c) > 1:
        factors.append(c)
    factors.sort(key=lambda f: (len(f), f))
    return factors


def _quadratic_pair(c: List[int]) -> Optional[List[List[int]]]:
    a0, a1, a2, a3 = c[0], c[1], c[2], c[3]
    for d in _divisors(a0):
        for c1 in (d, -d):
            e1 = a0 // c1
            # (X^2 + b X + c1)(X^2 + f X + e1): b + f = a3, b f = a2 - c1 - e1
            s, p = a3, a2 - c1 - e1
            disc = s * s - 4 * p
            if disc < 0:
                continue
            r = isqrt(disc)
            if r * r != disc or (s + r) % 2:
                continue
            for b in ((s + r) // 2, (s - r) // 2):
                f = s - b
                if b * e1 + c1 * f == a1:
                    return [[c1, b, 1], [e1, f, 1]]
    return None


def is_irreducible(coeffs: Sequence[int]) -> bool:
    return len(factor_monic_int_poly(coeffs)) == 1


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class Embedding:
    """One real root of a field's minimal polynomial, ordered ascending."""

    index: int
    interval: Tuple[Fraction, Fraction]


class NumberField:
    """Q(alpha) with alpha the unique root of ``min_poly`` in ``interval``.

    Degree 1 fields all represent Q; they only differ in which rational is
    called the generator.
    """

    def __init__(self, min_poly: Sequence[int], interval: Tuple[Rational, Rational]):
        coeffs = _check_monic(min_poly)
        d = len(coeffs) - 1
        if d > MAX_DEGREE:
            raise ValueError("degree is capped at 4")
        if d > 1 and not is_irreducible(coeffs):
            raise ValueError(f"{P.to_string(coeffs)} is reducible over Q")
        lo, hi = Fraction(interval[0]), Fraction(interval[1])
        if not lo < hi:
            raise ValueError("empty isolating interval")
        if P.sign_at(coeffs, lo) == 0 or P.sign_at(coeffs, hi) == 0:
            raise ValueError("isolating interval endpoints must not be roots")
        n = P.count_roots(coeffs, lo, hi)
        if n != 1:
            raise ValueError(f"interval ({lo}, {hi}) contains {n} roots of {P.to_string(coeffs)}")
        self.min_poly: Tuple[int, ...] = tuple(coeffs)
        self.degree = d
        self.interval = (lo, hi)
        self._poly_f = [Fraction(a) for a in coeffs]
        # reduction table: X^(d+k) as a combination of the power basis
        self._reduce = []
        cur = [-Fraction(a) for a in coeffs[:-1]]
        for _ in range(max(d - 1, 0)):
            self._reduce.append(cur)
            nxt = [Fraction(0)] + cur[:-1]
            top = cur[-1]
            nxt = [nxt[i] + top * self._reduce[0][i] for i in range(d)]
            cur = nxt
        self._lock = threading.Lock()
        # integer-scaled isolating interval [A/D, B/D]
        den = lo.denominator * hi.denominator
        self._iv = (int(lo * den), int(hi * den), den)
        self._sgn_lo = P.sign_at(coeffs, lo)
        self._refine(48)
        self._embeddings: Optional[List[Embedding]] = None
        self._inverses: Dict[Tuple[Fraction, ...], Tuple[Fraction, ...]] = {}

    # -- identity -------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, NumberField):
            return NotImplemented
        if self.degree == 1 and other.degree == 1:
            return True
        if self.min_poly != other.min_poly:
            return False
        lo = max(self.interval[0], other.interval[0])
        hi = min(self.interval[1], other.interval[1])
        return lo < hi and P.count_roots(self.min_poly, lo, hi) == 1

    def __hash__(self):
        return hash(("field", self.min_poly if self.degree > 1 else 1))

    def __repr__(self):
        if self.degree == 1:
            return "Rational Field"
        lo, hi = self.interval
        return f"NumberField({P.to_string(self.min_poly)}, root in ({lo}, {hi}))"

    # -- elements -------------------------------------------------------

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            return self.lift(value)
        if isinstance(value, (list, tuple)):
            if len(value) > self.degree:
                raise ValueError("too many coordinates")
            coords = [Fraction(v) for v in value] + [Fraction(0)] * (self.degree - len(value))
            return FieldElement(self, tuple(coords))
        return FieldElement(self, (Fraction(value),) + (Fraction(0),) * (self.degree - 1))

    @property
    def zero(self) -> "FieldElement":
        return self(0)

    @property
    def one(self) -> "FieldElement":
        return self(1)

    @property
    def gen(self) -> "FieldElement":
        if self.degree == 1:
            return self(-Fraction(self.min_poly[0]))
        return self([0, 1])

    def lift(self, x) -> "FieldElement":
        if isinstance(x, FieldElement):
            if x.field is self or x.field == self:
                return x if x.field is self else FieldElement(self, x.c)
            if x.field.degree == 1:
                return self(x.c[0])
            raise FieldMismatch(f"cannot lift element of {x.field} into {self}")
        return self(x)

    def reduce_poly(self, coeffs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        d = self.degree
        out = [Fraction(0)] * d
        for i, c in enumerate(coeffs):
            if not c:
                continue
            if i < d:
                out[i] += c
            else:
                row = self._reduce[i - d]
                for j in range(d):
                    out[j] += c * row[j]
        return tuple(out)

    # -- root refinement ------------------------------------------------

    def _refine(self, bits: int) -> None:
        """Bisect the isolating interval until its width is below 2**-bits."""
        with self._lock:
            a, b, den = self._iv
            if self.degree == 1:
                r = -Fraction(self.min_poly[0])
                self._iv = (r.numerator, r.numerator, r.denominator)
                return
            coeffs = self.min_poly
            s_lo = self._sgn_lo
            while (b - a) * (1 << bits) > den:
                a, b, den = 2 * a, 2 * b, 2 * den
                m = (a + b) // 2
                # exact sign of P(m/den) scaled by den^deg
                acc = 0
                dp = 1
                for c in reversed(coeffs):
                    acc = acc * m + c * dp
                    dp *= den
                # acc == den^deg * P(m/den) up to the factor dp/den^(deg+1) > 0
                s = (acc > 0) - (acc < 0)
                if s == 0:
                    raise ArithmeticError("rational root in irreducible polynomial")
                if s == s_lo:
                    a = m
                else:
                    b = m
            self._iv = (a, b, den)

    def root_interval(self, bits: int = 48) -> Tuple[Fraction, Fraction]:
        a, b, den = self._iv
        if (b - a) * (1 << bits) > den:
            self._refine(bits)
            a, b, den = self._iv
        return Fraction(a, den), Fraction(b, den)

    def _sign_coords(self, c: Sequence[Fraction]) -> int:
        nz = [x for x in c if x]
        if not nz:
            return 0
        if len(nz) == 1 and c[0]:
            return 1 if c[0] > 0 else -1
        lcm = 1
        for x in c:
            d = x.denominator
            lcm = lcm * d // _gcd(lcm, d)
        ints = [int(x * lcm) for x in c]
        while len(ints) > 1 and ints[-1] == 0:
            ints.pop()
        if len(ints) == 1:
            return (ints[0] > 0) - (ints[0] < 0)
        bits = 48
        while True:
            a, b, den = self._iv
            if (b - a) * (1 << bits) > den:
                self._refine(bits)
                a, b, den = self._iv
            m = len(ints) - 1
            lo = hi = ints[m]
            dp = den
            for i in range(m - 1, -1, -1):
                p1, p2, p3, p4 = lo * a, lo * b, hi * a, hi * b
                lo = min(p1, p2, p3, p4) + ints[i] * dp
                hi = max(p1, p2, p3, p4) + ints[i] * dp
                dp *= den
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def approx(self, x: "FieldElement", bits: int = 60) -> Tuple[Fraction, Fraction]:
        """Rational enclosure of the value of ``x``."""
        if all(v == 0 for v in x.c[1:]):
            return x.c[0], x.c[0]
        lo_r, hi_r = self.root_interval(bits)
        lo = hi = x.c[-1]
        for coef in reversed(x.c[:-1]):
            prods = (lo * lo_r, lo * hi_r, hi * lo_r, hi * hi_r)
            lo, hi = min(prods) + coef, max(prods) + coef
        return lo, hi

    # -- embeddings -----------------------------------------------------

    def embeddings(self) -> List[Embedding]:
        if self._embeddings is None:
            poly = [Fraction(a) for a in self.min_poly]
            ivs = [_shrink(poly, lo, hi, Fraction(1, 16)) for lo, hi in P.isolate_real_roots(poly)]
            self._embeddings = [Embedding(i, iv) for i, iv in enumerate(ivs)]
        return list(self._embeddings)

    def own_embedding(self) -> Embedding:
        for e in self.embeddings():
            if self.degree == 1 or self.conjugate_field(e) == self:
                return e
        raise AssertionError("field root not among real roots")

    def conjugate_field(self, e: Embedding) -> "NumberField":
        if self.degree == 1:
            return self
        return _conjugate_field_cache(self.min_poly, e.interval)

    def is_totally_real(self) -> bool:
        return len(self.embeddings()) == self.degree

    def trace(self, x: "FieldElement") -> Fraction:
        """Sum over all complex conjugates, via Newton power sums."""
        d = self.degree
        coeffs = [Fraction(a) for a in self.min_poly]
        # power sums p_k of the roots, k = 0..d-1
        e = [coeffs[d - i] * (-1) ** i for i in range(d + 1)]  # elementary symmetric
        p = [Fraction(d)]
        for k in range(1, d):
            s = Fraction(0)
            for i in range(1, k):
                s += (-1) ** (i - 1) * e[i] * p[k - i]
            s += (-1) ** (k - 1) * k * e[k]
            p.append(s)
        return sum((x.c[k] * p[k] for k in range(d)), Fraction(0))

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        lo, hi = self.interval
        return {
            "poly": list(self.min_poly),
            "interval": [lo.numerator, lo.denominator, hi.numerator, hi.denominator],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NumberField":
        iv = obj["interval"]
        return field_from_data(obj["poly"], (Fraction(iv[0], iv[1]), Fraction(iv[2], iv[3])))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _shrink(poly, lo: Fraction, hi: Fraction, width: Fraction) -> Tuple[Fraction, Fraction]:
    s_lo = P.sign_at(poly, lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = P.sign_at(poly, mid)
        if s == 0:
            mid = lo + (hi - lo) / 3
            s = P.sign_at(poly, mid)
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


_FIELD_CACHE: Dict[tuple, NumberField] = {}
_CACHE_LOCK = threading.Lock()


def field_from_data(poly: Sequence[int], interval: Tuple[Rational, Rational]) -> NumberField:
    """Cached constructor: equal inputs return the identical field object."""
    key = (tuple(int(a) for a in poly), Fraction(interval[0]), Fraction(interval[1]))
    with _CACHE_LOCK:
        f = _FIELD_CACHE.get(key)
    if f is None:
        f = NumberField(poly, interval)
        with _CACHE_LOCK:
            f = _FIELD_CACHE.setdefault(key, f)
    return f


def _conjugate_field_cache(poly, interval) -> NumberField:
    return field_from_data(poly, interval)


QQ = field_from_data([0, 1], (-1, 1))


def define_field(p: Sequence[int], interval: Tuple[Rational, Rational]) -> NumberField:
    """Field generated by the unique root of ``p`` inside ``interval``.

    If ``p`` is reducible the irreducible factor vanishing at that root is
    used; ``field.min_poly`` reports which one.
    """
    coeffs = _check_monic(p)
    if len(coeffs) - 1 > MAX_DEGREE:
        raise ValueError("degree is capped at 4")
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    n = P.count_roots(coeffs, lo, hi)
    if P.sign_at(coeffs, lo) == 0:
        n += 1
    if n == 0:
        raise ValueError(f"no root of {P.to_string(coeffs)} in ({lo}, {hi})")
    if n > 1 or P.sign_at(coeffs, lo) == 0 or P.sign_at(coeffs, hi) == 0:
        raise ValueError(f"interval ({lo}, {hi}) does not isolate a single root")
    for f in factor_monic_int_poly(coeffs):
        if P.count_roots(f, lo, hi) == 1:
            return field_from_data(f, (lo, hi))
    raise AssertionError("root vanished during factorization")


# ---------------------------------------------------------------------------
# elements


class FieldElement:
    __slots__ = ("field", "c")

    def __init__(self, field: NumberField, coords: Tuple[Fraction, ...]):
        self.field = field
        self.c = coords

    # -- coercion -------------------------------------------------------

    def _coerce(self, other) -> Tuple[NumberField, Tuple[Fraction, ...], Tuple[Fraction, ...]]:
        if isinstance(other, FieldElement):
            if other.field is self.field:
                return self.field, self.c, other.c
            if self.field.degree == 1 and other.field.degree == 1:
                return self.field, self.c, other.c
            if other.field.degree == 1:
                oc = (other.c[0],) + (Fraction(0),) * (self.field.degree - 1)
                return self.field, self.c, oc
            if self.field.degree == 1:
                sc = (self.c[0],) + (Fraction(0),) * (other.field.degree - 1)
                return other.field, sc, other.c
            if self.field == other.field:
                return self.field, self.c, other.c
            raise FieldMismatch(f"{self.field} vs {other.field}")
        if isinstance(other, (int, Fraction)):
            oc = (Fraction(other),) + (Fraction(0),) * (self.field.degree - 1)
            return self.field, self.c, oc
        raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        try:
            f, a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return FieldElement(f, tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            f, a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return FieldElement(f, tuple(x - y for x, y in zip(a, b)))

    def __rsub__(self, other):
        try:
            f, a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return FieldElement(f, tuple(y - x for x, y in zip(a, b)))

    def __neg__(self):
        return FieldElement(self.field, tuple(-x for x in self.c))

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, tuple(x * other for x in self.c))
        try:
            f, a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        d = f.degree
        if d == 1:
            return FieldElement(f, (a[0] * b[0],))
        if not any(b[1:]):
            return FieldElement(f, tuple(x * b[0] for x in a))
        if not any(a[1:]):
            return FieldElement(f, tuple(x * a[0] for x in b))
        prod = [Fraction(0)] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return FieldElement(f, f.reduce_poly(prod))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in number field")
        f = self.field
        if not any(self.c[1:]):
            return FieldElement(f, (1 / self.c[0],) + self.c[1:])
        hit = f._inverses.get(self.c)
        if hit is not None:
            return FieldElement(f, hit)
        g, u, _ = P.ext_gcd(list(self.c), list(Fraction(a) for a in f.min_poly))
        if len(g) != 1:
            raise ArithmeticError("element shares a factor with the minimal polynomial")
        inv = f.reduce_poly(u)
        if len(f._inverses) > 4096:
            f._inverses.clear()
        f._inverses[self.c] = inv
        return FieldElement(f, inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in number field")
            return FieldElement(self.field, tuple(x / other for x in self.c))
        if isinstance(other, FieldElement):
            if other.field.degree == 1 or not any(other.c[1:]):
                if other.c[0] == 0:
                    raise ZeroDivisionError("division by zero in number field")
                q = other.c[0]
                if other.field.degree > 1 and self.field.degree == 1:
                    return other.field(self.c[0] / q)
                return FieldElement(self.field, tuple(x / q for x in self.c))
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- predicates -----------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self):
        return not self.is_zero()

    def sign(self) -> int:
        return self.field._sign_coords(self.c)

    def is_rational(self) -> Optional[Fraction]:
        if any(self.c[1:]):
            return None
        return self.c[0]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.c[0] == other and not any(self.c[1:])
        if isinstance(other, FieldElement):
            try:
                _, a, b = self._coerce(other)
            except FieldMismatch:
                return False
            return a == b
        return NotImplemented

    def __hash__(self):
        if not any(self.c[1:]):
            return hash(self.c[0])
        return hash(self.c)

    def _cmp(self, other) -> int:
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        lo, hi = self.field.approx(self, 64)
        return float((lo + hi) / 2)

    def __repr__(self):
        if not any(self.c[1:]):
            return str(self.c[0])
        return P.to_string(self.c, "a")

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        out = self.field.to_json()
        out["coords"] = [[x.numerator, x.denominator] for x in self.c]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "FieldElement":
        f = NumberField.from_json(obj)
        return f([Fraction(n, d) for n, d in obj["coords"]])


def sign(a: FieldElement) -> int:
    return a.sign()


def is_rational(a: FieldElement) -> Optional[Fraction]:
    return a.is_rational()


def arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    ops = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    return ops[op]()


def common_field(*xs) -> NumberField:
    """The unique non-rational field among the arguments (or Q)."""
    f = QQ
    for x in xs:
        if isinstance(x, FieldElement) and x.field.degree > 1:
            if f.degree > 1 and not (f is x.field or f == x.field):
                raise FieldMismatch(f"{f} vs {x.field}")
            f = x.field
    return f


def conjugates(f: NumberField) -> List[Embedding]:
    return f.embeddings()


def conjugate(a: FieldElement, e: Embedding) -> FieldElement:
    """``a`` read in the embedding ``e``: same coordinates, other root."""
    return FieldElement(a.field.conjugate_field(e), a.c)


# ---------------------------------------------------------------------------
# Q-linear algebra


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> List[Tuple[Fraction, ...]]:
    """Basis of the right kernel of a rational matrix (reduced echelon form)."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][col]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                fac = m[i][col]
                m[i] = [x - fac * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(tuple(v))
    return basis


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    return ncols - len(nullspace(rows, ncols))


def rational_relations(xs: Sequence[FieldElement]) -> List[Tuple[Fraction, ...]]:
    """Basis of {a in Q^k : sum a_i x_i = 0}."""
    if not xs:
        return []
    f = common_field(*xs)
    vs = [f.lift(x).c for x in xs]
    rows = [[v[i] for v in vs] for i in range(f.degree)]
    return nullspace(rows, len(xs))


def minimal_polynomial(x: FieldElement) -> List[Fraction]:
    """Monic minimal polynomial over Q, found from relations among powers."""
    f = x.field
    powers = [f.one]
    while True:
        powers.append(powers[-1] * x)
        rel = rational_relations(powers)
        if rel:
            v = rel[0]
            top = max(i for i, c in enumerate(v) if c)
            return [c / v[top] for c in v[: top + 1]]


# ---------------------------------------------------------------------------
# wedge products over Q


class WedgeQQ:
    """Element of V ^_Q V for V = Q^dim, stored on basis pairs (i < j)."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: Optional[Dict[Tuple[int, int], Fraction]] = None):
        self.dim = dim
        self.coeffs = {k: Fraction(v) for k, v in (coeffs or {}).items() if v}

    @classmethod
    def from_vectors(cls, u: Sequence[Fraction], v: Sequence[Fraction]) -> "WedgeQQ":
        n = len(u)
        out = {}
        nz_u = [i for i in range(n) if u[i]]
        nz_v = [i for i in range(n) if v[i]]
        for i in nz_u:
            for j in nz_v:
                if i == j:
                    continue
                k = (i, j) if i < j else (j, i)
                s = 1 if i < j else -1
                out[k] = out.get(k, Fraction(0)) + s * u[i] * v[j]
        return cls(n, out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "WedgeQQ") -> "WedgeQQ":
        if self.dim != other.dim:
            raise FieldMismatch("wedge dimension mismatch")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return WedgeQQ(self.dim, out)

    def __neg__(self):
        return WedgeQQ(self.dim, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q: Rational) -> "WedgeQQ":
        return WedgeQQ(self.dim, {k: v * q for k, v in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, WedgeQQ):
            return NotImplemented
        return self.dim == other.dim and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.dim, tuple(sorted(self.coeffs.items()))))

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        i, j = key
        if i == j:
            return Fraction(0)
        if i < j:
            return self.coeffs.get((i, j), Fraction(0))
        return -self.coeffs.get((j, i), Fraction(0))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "coeffs": [[i, j, v.numerator, v.denominator] for (i, j), v in sorted(self.coeffs.items())],
        }

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{v}*b{i}^b{j}" for (i, j), v in sorted(self.coeffs.items()))


def wedge(a: FieldElement, b: FieldElement) -> WedgeQQ:
    f = common_field(a, b)
    return WedgeQQ.from_vectors(f.lift(a).c, f.lift(b).c)


def wedge_add(x: WedgeQQ, y: WedgeQQ) -> WedgeQQ:
    return x + y


def wedge_is_zero(x: WedgeQQ) -> bool:
    return x.is_zero()


# ---------------------------------------------------------------------------
# values of sum a_i * sigma(b_i) for two embeddings


class ConjugatePairing:
    """The real number sum_i a_i * sigma_e(b_i) with a_i, b_i in one field.

    The value lives in the compositum of two conjugate fields, which can
    exceed the degree cap, so it is kept as a rational tensor
    ``T[k][l] * r1^k * r2^l`` and tested for zero exactly.
    """

    def __init__(self, field: NumberField, e: Embedding, pairs: Iterable[Tuple[FieldElement, FieldElement]]):
        self.field = field
        self.embedding = e
        d = field.degree
        T = [[Fraction(0)] * d for _ in range(d)]
        for a, b in pairs:
            ac, bc = field.lift(a).c, field.lift(b).c
            for k in range(d):
                if ac[k]:
                    for l in range(d):
                        if bc[l]:
                            T[k][l] += ac[k] * bc[l]
        self.tensor = T
        self.conj_field = field.conjugate_field(e)

    def same_embedding(self) -> bool:
        return self.field.degree == 1 or self.conj_field == self.field

    def _as_field_element(self) -> Optional[FieldElement]:
        """Exact value as an element of the first field when possible."""
        f = self.field
        d = f.degree
        if self.same_embedding():
            out = f.zero
            for k in range(d):
                for l in range(d):
                    if self.tensor[k][l]:
                        out = out + f.gen ** (k + l) * self.tensor[k][l]
            return out
        s = _galois_image(f, self.embedding)
        if s is None:
            return None
        out = f.zero
        for k in range(d):
            for l in range(d):
                if self.tensor[k][l]:
                    out = out + f.gen ** k * s ** l * self.tensor[k][l]
        return out

    def _reduced_quotient(self) -> List[FieldElement]:
        """Coefficients (in y) of the value modulo q(x, y) = m(y)/(y - x)."""
        f = self.field
        d = f.degree
        x = f.gen
        # g_l = sum_k T[k][l] x^k
        g = []
        for l in range(d):
            acc = f.zero
            for k in range(d):
                if self.tensor[k][l]:
                    acc = acc + x ** k * self.tensor[k][l]
            g.append(acc)
        # q(x, y) = (m(y) - m(x)) / (y - x): coefficient of y^j is sum_{i>j} m_i x^(i-1-j)
        m = f.min_poly
        q = []
        for j in range(d):
            acc = f.zero
            for i in range(j + 1, d + 1):
                acc = acc + x ** (i - 1 - j) * m[i]
            q.append(acc)
        # q has degree d-1 in y and is monic
        r = list(g)
        while len(r) >= d:
            top = r[-1]
            if not top.is_zero():
                shift = len(r) - d
                for j in range(d):
                    r[j + shift] = r[j + shift] - top * q[j]
            r.pop()
        return r

    def is_zero(self) -> bool:
        exact = self._as_field_element()
        if exact is not None:
            return exact.is_zero()
        red = self._reduced_quotient()
        if all(c.is_zero() for c in red):
            return True
        if self.field.degree == 3:
            # non-Galois cubic: q is irreducible over the field, so this is exact
            return False
        lo, hi = self.enclosure(64)
        bits = 64
        while lo <= 0 <= hi:
            bits *= 2
            if bits > 1 << 13:
                raise ArithmeticError("could not decide whether the pairing vanishes")
            lo, hi = self.enclosure(bits)
        return False

    def enclosure(self, bits: int = 60) -> Tuple[Fraction, Fraction]:
        r1 = self.field.root_interval(bits)
        r2 = self.conj_field.root_interval(bits)
        d = self.field.degree

        def powers(iv):
            out = [(Fraction(1), Fraction(1))]
            for _ in range(d - 1):
                lo, hi = out[-1]
                ps = (lo * iv[0], lo * iv[1], hi * iv[0], hi * iv[1])
                out.append((min(ps), max(ps)))
            return out

        p1, p2 = powers(r1), powers(r2)
        lo = hi = Fraction(0)
        for k in range(d):
            for l in range(d):
                t = self.tensor[k][l]
                if not t:
                    continue
                a, b = p1[k], p2[l]
                ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
                mn, mx = min(ps) * t, max(ps) * t
                if t < 0:
                    mn, mx = mx, mn
                lo += min(mn, mx)
                hi += max(mn, mx)
        return lo, hi

    def __float__(self):
        lo, hi = self.enclosure(64)
        return float((lo + hi) / 2)

    def to_json(self) -> dict:
        return {
            "embedding": self.embedding.index,
            "zero": self.is_zero(),
            "approx": float(self),
        }


_GALOIS_CACHE: Dict[tuple, Optional[FieldElement]] = {}


def _galois_image(f: NumberField, e: Embedding) -> Optional[FieldElement]:
    """Element s of f with s = sigma_e(alpha), or None if sigma_e(f) != f.

    Only quadratic and cyclic cubic fields have such elements for every
    embedding.
    """
    key = (f.min_poly, f.interval, e.interval)
    if key in _GALOIS_CACHE:
        return _GALOIS_CACHE[key]
    result = None
    d = f.degree
    m = f.min_poly
    if d == 2:
        result = -f.gen - m[1]
    elif d == 3:
        disc = _cubic_disc(m)
        r = isqrt(disc) if disc >= 0 else -1
        if r >= 0 and r * r == disc:
            result = _find_conjugate_root(f, e)
    _GALOIS_CACHE[key] = result
    return result


def _cubic_disc(m: Sequence[int]) -> int:
    c, b, a = m[0], m[1], m[2]
    # X^3 + a X^2 + b X + c
    return a * a * b * b - 4 * b ** 3 - 4 * a ** 3 * c - 27 * c * c + 18 * a * b * c


def _find_conjugate_root(f: NumberField, e: Embedding) -> Optional[FieldElement]:
    """Solve for s(alpha) = other root, in a cyclic cubic field.

    Candidate coefficients come from a high-precision Vandermonde solve and
    are rationalized, then verified exactly by substitution.
    """
    target = f.conjugate_field(e)
    roots = [f.conjugate_field(x) for x in f.embeddings()]
    bits = 200
    while bits <= 3200:
        approx = [sum(r.root_interval(bits)) / 2 for r in roots]
        i1 = next(i for i, r in enumerate(roots) if r == f)
        i2 = next(i for i, r in enumerate(roots) if r == target)
        i3 = 3 - i1 - i2
        # s(r1)=r2, s(r2)=r3, s(r3)=r1
        xs = [approx[i1], approx[i2], approx[i3]]
        ys = [approx[i2], approx[i3], approx[i1]]
        coeffs = _solve3([[1, x, x * x] for x in xs], ys)
        guess = [c.limit_denominator(10 ** (bits // 8)) for c in coeffs]
        s = f(guess)
        if _eval_poly_elem(f.min_poly, s).is_zero():
            lo, hi = f.approx(s, 80)
            elo, ehi = target.root_interval(80)
            if not (hi < elo or lo > ehi):
                return s
        bits *= 2
    return None


def _eval_poly_elem(coeffs: Sequence[int], s: FieldElement) -> FieldElement:
    acc = s.field.zero
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


def _solve3(a, b):
    m = [list(map(Fraction, r)) + [Fraction(v)] for r, v in zip(a, b)]
    n = 3
    for c in range(n):
        p = max(range(c, n), key=lambda i: abs(m[i][c]))
        m[c], m[p] = m[p], m[c]
        for i in range(n):
            if i != c:
                fac = m[i][c] / m[c][c]
                m[i] = [x - fac * y for x, y in zip(m[i], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]
