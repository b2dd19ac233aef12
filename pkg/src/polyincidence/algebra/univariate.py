"""Univariate exact polynomials: Sturm sequences, root counting, isolation, resultants.

A univariate polynomial is a list of Fractions, lowest degree first, with no
trailing zeros (``[]`` is zero).
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .linalg import det
from .poly import MultiPoly

UPoly = List[Fraction]
INF = float("inf")


def trim(p: Sequence) -> UPoly:
    out = [Fraction(c) for c in p]
    while out and out[-1] == 0:
        out.pop()
    return out


def from_multipoly(p: MultiPoly) -> UPoly:
    if p.nvars != 1:
        raise ValueError(f"expected a univariate polynomial, got {p.nvars} variables")
    if p.is_zero():
        return []
    out = [Fraction(0)] * (p.degree() + 1)
    for (a,), c in p.items():
        out[a] = c
    return trim(out)


def to_multipoly(p: Sequence) -> MultiPoly:
    return MultiPoly(1, {(i,): c for i, c in enumerate(p) if c})


def degree(p: Sequence) -> int:
    return len(p) - 1


def evaluate(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Sequence[Fraction]) -> UPoly:
    return trim([i * c for i, c in enumerate(p)][1:])


def mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> UPoly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def divmod_poly(p: Sequence[Fraction], q: Sequence[Fraction]) -> Tuple[UPoly, UPoly]:
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = trim(p)
    if len(r) < len(q):
        return [], r
    quot = [Fraction(0)] * (len(r) - len(q) + 1)
    lead = q[-1]
    while len(r) >= len(q) and r:
        shift = len(r) - len(q)
        f = r[-1] / lead
        quot[shift] = f
        for i, c in enumerate(q):
            r[i + shift] -= f * c
        r = trim(r)
    return trim(quot), r


def monic(p: Sequence[Fraction]) -> UPoly:
    p = trim(p)
    if not p:
        return p
    lead = p[-1]
    return [c / lead for c in p]


# Integer kernels.  Sign computations only need positive multiples, so the
# Euclidean sequences below work on primitive integer polynomials and never
# touch Fractions; that keeps coefficient growth in check.
IPoly = List[int]


def _itrim(p: List[int]) -> IPoly:
    while p and p[-1] == 0:
        p.pop()
    return p


def _primitive(p: IPoly) -> IPoly:
    g = 0
    for c in p:
        g = math.gcd(g, c)
        if g == 1:
            return p
    return [c // g for c in p] if g > 1 else p


def to_integer_poly(p: Sequence) -> IPoly:
    """Primitive integer polynomial that is a positive multiple of ``p``."""
    p = trim(p)
    den = 1
    for c in p:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return _primitive([int(c * den) for c in p])


def _pdivmod(a: IPoly, b: IPoly) -> Tuple[IPoly, IPoly]:
    """``(q, r)`` with ``m * a = q * b + r`` for some integer ``m > 0``."""
    r = list(a)
    lc = b[-1]
    alc, sg = abs(lc), (1 if lc > 0 else -1)
    db = len(b) - 1
    if len(r) <= db:
        return [], r
    q = [0] * (len(r) - db)
    while len(r) > db and r:
        shift = len(r) - 1 - db
        top = r[-1]
        r = [alc * c for c in r]
        q = [alc * c for c in q]
        f = sg * top
        q[shift] += f
        for i, c in enumerate(b):
            r[i + shift] -= f * c
        r = _itrim(r)
    return _itrim(q), r


def _iderivative(p: IPoly) -> IPoly:
    return _itrim([i * c for i, c in enumerate(p)][1:])


def _igcd(a: IPoly, b: IPoly) -> IPoly:
    a, b = _primitive(list(a)), _primitive(list(b))
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, _primitive(r)
    return a


def _isquarefree(p: IPoly) -> IPoly:
    if len(p) <= 2:
        return p
    g = _igcd(p, _iderivative(p))
    if len(g) <= 1:
        return p
    q, _ = _pdivmod(p, g)
    return _primitive(q)


def _isturm(p: IPoly) -> List[IPoly]:
    chain = [p, _primitive(_iderivative(p))]
    while True:
        _, r = _pdivmod(chain[-2], chain[-1])
        if not r:
            return chain
        chain.append(_primitive([-c for c in r]))


def _isign(p: IPoly, x) -> int:
    """Sign of ``p(x)`` for rational or infinite ``x``."""
    if not p:
        return 0
    if x == INF:
        return 1 if p[-1] > 0 else -1
    if x == -INF:
        s = 1 if p[-1] > 0 else -1
        return s if (len(p) - 1) % 2 == 0 else -s
    if isinstance(x, Fraction):
        a, b = x.numerator, x.denominator
    else:
        a, b = int(x), 1
    acc = 0
    bp = 1
    # Horner on b^n p(a/b) = sum c_i a^i b^(n-i)
    for c in reversed(p):
        acc = acc * a + c * bp
        bp *= b
    return (acc > 0) - (acc < 0)


def integer_sign_at(p: IPoly, x) -> int:
    """Exact sign of an integer polynomial at a rational or infinite point."""
    return _isign(p, x)


def integer_squarefree(p: IPoly) -> IPoly:
    return _isquarefree(p)


def integer_mul(p: IPoly, q: IPoly) -> IPoly:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _ivariations(chain: Sequence[IPoly], x) -> int:
    prev = 0
    n = 0
    for p in chain:
        s = _isign(p, x)
        if s:
            if prev and s != prev:
                n += 1
            prev = s
    return n


def gcd(p: Sequence[Fraction], q: Sequence[Fraction]) -> UPoly:
    a, b = trim(p), trim(q)
    if not a:
        return monic(b)
    if not b:
        return monic(a)
    return monic([Fraction(c) for c in _igcd(to_integer_poly(a), to_integer_poly(b))])


def squarefree(p: Sequence[Fraction]) -> UPoly:
    """Squarefree part (same distinct roots, all simple), up to a positive factor."""
    p = trim(p)
    if len(p) <= 2:
        return p
    return [Fraction(c) for c in _isquarefree(to_integer_poly(p))]


def sturm_chain(p: Sequence[Fraction]) -> List[UPoly]:
    """Sturm sequence of ``p``; entries are positive multiples of the classical ones."""
    p = trim(p)
    if not p:
        return []
    return [[Fraction(c) for c in q] for q in _isturm(to_integer_poly(p))]


def sign_variations(chain: Sequence[Sequence], x) -> int:
    return _ivariations([to_integer_poly(c) for c in chain], x)


def count_roots(p: Sequence[Fraction], lo=-INF, hi=INF) -> int:
    """Number of distinct real roots in the open interval ``(lo, hi)``."""
    p = trim(p)
    if not p:
        raise ValueError("polynomial is identically zero")
    if len(p) == 1:
        return 0
    if lo != -INF and hi != INF and lo >= hi:
        return 0
    sq = _isquarefree(to_integer_poly(p))
    chain = _isturm(sq)
    # Sturm counts roots in (lo, hi]; drop hi itself if it is a root.
    n = _ivariations(chain, lo) - _ivariations(chain, hi)
    if hi != INF and _isign(sq, Fraction(hi)) == 0:
        n -= 1
    return n


def univariate_real_root_count(p: MultiPoly, interval: Tuple = (-INF, INF)) -> int:
    """Distinct real roots of a one-variable MultiPoly inside an open interval."""
    lo, hi = interval
    lo = lo if lo in (-INF, INF) else Fraction(lo)
    hi = hi if hi in (-INF, INF) else Fraction(hi)
    up = from_multipoly(p)
    if not up:
        raise ValueError("polynomial is identically zero")
    return count_roots(up, lo, hi)


def root_bound(p: Sequence[Fraction]) -> Fraction:
    """Cauchy bound: every real root has absolute value below it."""
    p = trim(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def isolate_real_roots(p: Sequence[Fraction]) -> List[Tuple[Fraction, Fraction]]:
    """Disjoint open intervals ``(a, b)``, sorted, each holding exactly one root.

    Endpoints are never roots, so ``a_1`` lies left of every root and ``b_i``
    lies between root ``i`` and root ``i + 1``.
    """
    p = trim(p)
    if not p:
        raise ValueError("polynomial is identically zero")
    if len(p) == 1:
        return []
    sq = _isquarefree(to_integer_poly(p))
    chain = _isturm(sq)
    bound = root_bound([Fraction(c) for c in sq])
    # a power of two keeps bisection points dyadic
    top = Fraction(1)
    while top < bound:
        top *= 2
    out: List[Tuple[Fraction, Fraction]] = []

    def var(x):
        return _ivariations(chain, x)

    stack = [(-top, top, var(-top), var(top))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        # nudge off a root so endpoints stay root-free
        step = (b - a) / 8
        k = 1
        while _isign(sq, mid) == 0:
            mid = (a + b) / 2 + step / 2 ** k * (1 if k % 2 else -1)
            k += 1
        vm = var(mid)
        stack.append((mid, b, vm, vb))
        stack.append((a, mid, va, vm))
    out.sort()
    return out


def resultant(p: Sequence[Fraction], q: Sequence[Fraction]) -> Fraction:
    """Resultant via the Sylvester determinant."""
    p, q = trim(p), trim(q)
    if not p or not q:
        return Fraction(0)
    m, n = len(p) - 1, len(q) - 1
    if m == 0 and n == 0:
        return Fraction(1)
    if m == 0:
        return p[0] ** n
    if n == 0:
        return q[0] ** m
    size = m + n
    rows = []
    hp = list(reversed(p))
    hq = list(reversed(q))
    for i in range(n):
        rows.append([Fraction(0)] * i + hp + [Fraction(0)] * (size - i - len(hp)))
    for i in range(m):
        rows.append([Fraction(0)] * i + hq + [Fraction(0)] * (size - i - len(hq)))
    return det(rows)


def interpolate(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> UPoly:
    """Lagrange interpolation through distinct nodes (exact)."""
    n = len(xs)
    out = [Fraction(0)] * n
    for i in range(n):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j != i:
                basis = mul(basis, [-xs[j], Fraction(1)])
                denom *= xs[i] - xs[j]
        f = ys[i] / denom
        for k, c in enumerate(basis):
            out[k] += f * c
    return trim(out)

