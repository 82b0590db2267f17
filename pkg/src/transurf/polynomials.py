"""Dense univariate polynomials over Q.

Coefficient lists are stored low degree first, so ``[c0, c1, c2]`` is
``c0 + c1*X + c2*X**2``.  The helpers here are deliberately small: the
field code only ever needs degree at most 8 (products before reduction).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, List, Sequence, Tuple

Poly = List[Fraction]


def trim(p: Iterable) -> Poly:
    q = [Fraction(c) for c in p]
    while q and q[-1] == 0:
        q.pop()
    return q


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def add(p: Sequence, q: Sequence) -> Poly:
    n = max(len(p), len(q))
    return trim((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n))


def sub(p: Sequence, q: Sequence) -> Poly:
    return add(p, [-c for c in q])


def mul(p: Sequence, q: Sequence) -> Poly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def scale(p: Sequence, c) -> Poly:
    return trim(c * a for a in p)


def divmod_poly(p: Sequence, q: Sequence) -> Tuple[Poly, Poly]:
    p, q = trim(p), trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    out = [Fraction(0)] * max(len(p) - len(q) + 1, 1)
    r = list(p)
    lead = q[-1]
    while len(r) >= len(q):
        c = r[-1] / lead
        k = len(r) - len(q)
        out[k] = c
        for i, b in enumerate(q):
            r[i + k] -= c * b
        r = trim(r)
    return trim(out), r


def mod(p: Sequence, q: Sequence) -> Poly:
    return divmod_poly(p, q)[1]


def monic(p: Sequence) -> Poly:
    p = trim(p)
    return [c / p[-1] for c in p]


def poly_gcd(p: Sequence, q: Sequence) -> Poly:
    a, b = trim(p), trim(q)
    while b:
        a, b = b, mod(a, b)
    return monic(a) if a else []


def ext_gcd(p: Sequence, q: Sequence) -> Tuple[Poly, Poly, Poly]:
    """Return (g, u, v) with u*p + v*q = g, g monic."""
    r0, r1 = trim(p), trim(q)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        quo, rem = divmod_poly(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, sub(s0, mul(quo, s1))
        t0, t1 = t1, sub(t0, mul(quo, t1))
    lead = r0[-1]
    return [c / lead for c in r0], [c / lead for c in s0], [c / lead for c in t0]


def derivative(p: Sequence) -> Poly:
    return trim(i * c for i, c in enumerate(p))[1:] if len(p) > 1 else []


def evaluate(p: Sequence, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sign_at(p: Sequence, x) -> int:
    v = evaluate(p, x)
    return (v > 0) - (v < 0)


def sturm_sequence(p: Sequence) -> List[Poly]:
    seq = [trim(p), derivative(p)]
    while seq[-1]:
        r = mod(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(seq: Sequence[Poly], x) -> int:
    signs = [sign_at(s, x) for s in seq]
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: Sequence, lo, hi) -> int:
    """Number of distinct real roots of ``p`` in the half-open interval (lo, hi]."""
    seq = sturm_sequence(p)
    return _sign_changes(seq, Fraction(lo)) - _sign_changes(seq, Fraction(hi))


def root_bound(p: Sequence) -> Fraction:
    p = trim(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def isolate_real_roots(p: Sequence) -> List[Tuple[Fraction, Fraction]]:
    """Disjoint open intervals (lo, hi), each holding exactly one real root.

    ``p`` must be squarefree.  Endpoints are never roots.  Output sorted.
    """
    p = trim(p)
    seq = sturm_sequence(p)
    b = root_bound(p)
    out = []
    stack = [(-b, b)]
    while stack:
        lo, hi = stack.pop()
        n = _sign_changes(seq, lo) - _sign_changes(seq, hi)
        if n == 0:
            continue
        if n == 1 and sign_at(p, hi) != 0:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if sign_at(p, mid) == 0:
            # nudge so that endpoints avoid roots
            eps = (hi - lo) / 7
            mid = mid + eps
            while sign_at(p, mid) == 0:
                eps /= 3
                mid = (lo + hi) / 2 + eps
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted(out)


def integer_coefficients(p: Sequence) -> List[int]:
    p = trim(p)
    den = 1
    for c in p:
        den = den * c.denominator // gcd(den, c.denominator)
    return [int(c * den) for c in p]


def to_string(p: Sequence, var: str = "X") -> str:
    p = trim(p)
    if not p:
        return "0"
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and abs(c) == 1:
            coef = "-" if c < 0 else "+"
            terms.append((coef, mono))
        else:
            coef = "-" if c < 0 else "+"
            mag = str(abs(c))
            terms.append((coef, f"{mag}{'*' if mono else ''}{mono}"))
    s = "".join(f" {sg} {t}" for sg, t in terms).strip()
    if s.startswith("+ "):
        s = s[2:]
    elif s.startswith("- "):
        s = "-" + s[2:]
    return s
