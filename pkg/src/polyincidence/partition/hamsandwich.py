"""Polynomial ham-sandwich bisection.

Points are lifted by the Veronese map of degree ``D`` to ``R^M`` with
``M = C(D + d, d) - 1``; a hyperplane there pulls back to a polynomial of degree
at most ``D``.  The search is a floating-point heuristic, and every polynomial
it proposes is certified by exact sign counts before it is returned.

Search
------
Counting the points on the positive side of ``w . y + c`` is replaced by a sum
of sigmoids at temperature ``T``.  The smoothed "half on each side" equations
are underdetermined (``k <= M`` equations, ``M`` unknowns after fixing the
scale) and a minimum-norm Gauss-Newton step solves them reliably; ``T`` is
lowered whenever the smoothed residual is small, so the solution is dragged
toward a true bisection.  Whenever the float counts meet the per-set caps the
rounded hyperplane is certified exactly.

A single set always has an exact solution: cut at the exact median of the
projections along any rational direction.  For several sets in exact mode the
search also tries hyperplanes through the exact per-set anchors (medians, or
midpoints of the two middle points).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..algebra import linalg
from ..algebra.batch import PointBatch, signs
from ..algebra.poly import MultiPoly, hyperplane_pullback, monomials, veronese_dimension


class BisectionNotFound(RuntimeError):
    """The search budget ran out.  A bisecting polynomial still exists; the search is incomplete."""


@dataclass(frozen=True)
class SetCount:
    negative: int
    zero: int
    positive: int

    @property
    def size(self) -> int:
        return self.negative + self.zero + self.positive


@dataclass(frozen=True)
class BisectionCertificate:
    counts: Tuple[SetCount, ...]
    tau: Fraction

    def slack(self, n: int) -> int:
        return ceil(self.tau * n)

    def holds(self) -> bool:
        for c in self.counts:
            cap = c.size // 2 + self.slack(c.size)
            if c.negative > cap or c.positive > cap:
                return False
        return True

    def to_json(self) -> list:
        return [[c.negative, c.zero, c.positive] for c in self.counts]


def min_degree_for(num_sets: int, d: int) -> int:
    """Smallest ``D`` with ``C(D + d, d) - 1 >= num_sets``."""
    D = 1
    while veronese_dimension(d, D) < num_sets:
        D += 1
    return D


def certify(q: MultiPoly, batch: PointBatch, sets: Sequence[Sequence[int]], tau: Fraction) -> BisectionCertificate:
    counts = []
    for rows in sets:
        s = signs(q, batch, rows)
        counts.append(SetCount(int((s < 0).sum()), int((s == 0).sum()), int((s > 0).sum())))
    return BisectionCertificate(tuple(counts), tau)


class _Normalizer:
    """Rational affine map sending the bounding box of the points into ``[-1, 1]^d``."""

    def __init__(self, points: Sequence[Sequence[Fraction]]):
        d = len(points[0])
        lo = [min(p[i] for p in points) for i in range(d)]
        hi = [max(p[i] for p in points) for i in range(d)]
        self.center = [(a + b) / 2 for a, b in zip(lo, hi)]
        half = max((b - a) / 2 for a, b in zip(lo, hi))
        scale = Fraction(1)
        while scale < half:
            scale *= 2
        while half and scale / 2 >= half:
            scale /= 2
        self.scale = scale
        self.d = d

    def apply(self, p: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        return tuple((x - c) / self.scale for x, c in zip(p, self.center))

    def pull_back(self, q: MultiPoly) -> MultiPoly:
        """Express ``q(normalized(x))`` as a polynomial in the original coordinates."""
        base = [-c / self.scale for c in self.center]
        dirs = [[Fraction(int(i == j)) / self.scale for j in range(self.d)] for i in range(self.d)]
        return q.compose_affine(base, dirs)


def _lift_float(x: np.ndarray, mons) -> np.ndarray:
    out = np.ones((x.shape[0], len(mons)))
    for j, e in enumerate(mons):
        for i, a in enumerate(e):
            if a:
                out[:, j] *= x[:, i] ** a
    return out


def _lift_exact(p: Sequence[Fraction], mons) -> List[Fraction]:
    out = []
    for e in mons:
        v = Fraction(1)
        for xi, a in zip(p, e):
            if a:
                v *= xi ** a
        out.append(v)
    return out


def _normalize_poly(q: MultiPoly) -> MultiPoly:
    """Scale to coprime integer coefficients with a positive leading (graded-lex max) term."""
    if q.is_zero():
        return q
    coeffs = [c for _, c in q.sorted_terms()]
    ints = linalg.primitive_integer_row(list(reversed(coeffs)))
    factor = Fraction(ints[0]) / list(reversed(coeffs))[0]
    return q * factor


def _round_vector(v: np.ndarray, bits: int = 30) -> List[Fraction]:
    top = float(np.max(np.abs(v))) if len(v) else 0.0
    if top == 0.0 or not np.isfinite(top):
        return [Fraction(0)] * len(v)
    scale = 2 ** bits / top
    return [Fraction(int(round(x * scale))) for x in v]


class _Search:
    def __init__(self, points, sets, D, caps, rng):
        self.sets = [list(s) for s in sets]
        self.rng = rng
        self.D = D
        used = sorted({i for s in self.sets for i in s})
        self.norm = _Normalizer([points[i] for i in used])
        self.d = self.norm.d
        self.mons = monomials(self.d, D, 1)
        self.M = len(self.mons)
        self.normed = {i: self.norm.apply(points[i]) for i in used}
        xf = np.array([[float(c) for c in self.normed[i]] for s in self.sets for i in s]).reshape(-1, self.d)
        self.Y = _lift_float(xf, self.mons)
        self.grp = np.repeat(np.arange(len(self.sets)), [len(s) for s in self.sets])
        self.sizes = np.array([len(s) for s in self.sets])
        self.caps = np.array(caps)
        # whitened features plus a constant column
        self.mu = self.Y.mean(axis=0)
        self.sd = self.Y.std(axis=0) + 1e-12
        self.Z = np.hstack([(self.Y - self.mu) / self.sd, np.ones((len(self.Y), 1))])
        self._exact_lift = {}

    def exact_lift(self, i: int) -> List[Fraction]:
        if i not in self._exact_lift:
            self._exact_lift[i] = _lift_exact(self.normed[i], self.mons)
        return self._exact_lift[i]

    def to_hyperplane(self, v: np.ndarray) -> Tuple[np.ndarray, float]:
        w = v[:-1] / self.sd
        return w, float(v[-1] - self.mu @ w)

    def float_ok(self, v: np.ndarray) -> bool:
        s = self.Z @ v
        tol = 1e-9 * (np.abs(self.Z) @ np.abs(v))
        k = len(self.sets)
        neg = np.bincount(self.grp, s < -tol, minlength=k)
        pos = np.bincount(self.grp, s > tol, minlength=k)
        return bool(np.all(neg <= self.caps) and np.all(pos <= self.caps))

    def smoothed(self, iterations: int):
        """Yield float solutions ``v`` whose rounded counts meet the caps."""
        k = len(self.sets)
        v = self.rng.standard_normal(self.M + 1)
        v[-1] = 0.0
        v /= np.linalg.norm(v)
        T = 1.0
        half = self.sizes / 2
        for _ in range(iterations):
            with np.errstate(over="ignore"):
                sig = 1.0 / (1.0 + np.exp(-(self.Z @ v) / T))
            resid = np.bincount(self.grp, sig, minlength=k) - half
            dsig = sig * (1 - sig) / T
            J = np.zeros((k, self.M + 1))
            np.add.at(J, self.grp, dsig[:, None] * self.Z)
            step, *_ = np.linalg.lstsq(np.vstack([J, v]), np.append(-resid, 0.0), rcond=None)
            nrm = np.linalg.norm(step)
            if nrm > 0.5:
                step *= 0.5 / nrm
            v = v + step
            v /= np.linalg.norm(v)
            if np.abs(resid).max() < 0.25:
                T *= 0.85
            if self.float_ok(v):
                yield v

    def rounded_candidate(self, v: np.ndarray) -> Optional[MultiPoly]:
        w, c = self.to_hyperplane(v)
        vec = _round_vector(np.append(w, c))
        if not any(vec[:-1]):
            return None
        return hyperplane_pullback(vec[:-1], vec[-1], self.d, self.D)

    def median_candidate(self, w: Sequence[Fraction]) -> MultiPoly:
        """Exact median cut of the single set along rational direction ``w``."""
        s = self.sets[0]
        proj = sorted(sum((a * b for a, b in zip(self.exact_lift(i), w)), Fraction(0)) for i in s)
        n = len(proj)
        t = proj[n // 2] if n % 2 else (proj[n // 2 - 1] + proj[n // 2]) / 2
        return hyperplane_pullback(list(w), -t, self.d, self.D)

    def exact_anchor_candidate(self, v: np.ndarray) -> Optional[MultiPoly]:
        """Hyperplane through the exact anchors of every set, near the float one."""
        w, c = self.to_hyperplane(v)
        wq = _round_vector(w)
        if not any(wq):
            return None
        anchors = []
        for s in self.sets:
            lifted = [self.exact_lift(i) for i in s]
            proj = [sum((a * b for a, b in zip(y, wq)), Fraction(0)) for y in lifted]
            order = sorted(range(len(s)), key=lambda j: proj[j])
            n = len(order)
            if n % 2:
                anchors.append(lifted[order[n // 2]])
            else:
                ya, yb = lifted[order[n // 2 - 1]], lifted[order[n // 2]]
                anchors.append([(a + b) / 2 for a, b in zip(ya, yb)])
        basis = linalg.nullspace([list(a) + [Fraction(1)] for a in anchors])
        if not basis:
            return None
        basis = [[x / max(abs(y) for y in b) for x in b] for b in basis]
        B = np.array([[float(x) for x in b] for b in basis])
        target = np.append(w, c)
        target = target / np.max(np.abs(target))
        lam, *_ = np.linalg.lstsq(B.T, target, rcond=None)
        vec = [Fraction(0)] * (self.M + 1)
        for coef, b in zip(_round_vector(lam), basis):
            if coef:
                vec = [x + coef * y for x, y in zip(vec, b)]
        if not any(vec[:-1]):
            vec = basis[0]
            if not any(vec[:-1]):
                return None
        return hyperplane_pullback(vec[:-1], vec[-1], self.d, self.D)


def ham_sandwich_polynomial(points: Sequence[Sequence[Fraction]], sets: Sequence[Sequence[int]], D: int,
                            mode: str = "exact", tau=Fraction(1, 20), *, rng=None,
                            budget: int = 10 ** 6, max_iterations: int = 30000,
                            caps: Optional[Sequence[int]] = None,
                            batch: Optional[PointBatch] = None) -> Tuple[MultiPoly, BisectionCertificate]:
    """Find ``Q`` of degree <= ``D`` bisecting each index set in ``sets``.

    ``points`` is the ambient point list, ``sets`` index into it.  ``mode`` is
    ``"exact"`` (tolerance 0) or ``"relaxed"`` (tolerance ``tau``).  ``caps``
    optionally tightens the allowed count per open side of each set.  Returns
    the polynomial, scaled to coprime integer coefficients with a positive
    leading coefficient, and its exact certificate.
    """
    if mode not in ("exact", "relaxed"):
        raise ValueError(f"unknown mode {mode!r}")
    tau = Fraction(0) if mode == "exact" else Fraction(tau).limit_denominator(10 ** 6)
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if rng is None:
        rng = np.random.default_rng(0)
    if not points:
        raise ValueError("no points")
    d = len(points[0])
    if D < 1:
        raise ValueError("D must be at least 1")
    M = veronese_dimension(d, D)
    if len(sets) > M:
        raise ValueError(f"{len(sets)} sets exceed the capacity M = {M} for d={d}, D={D}")
    if batch is None:
        batch = PointBatch(points)
    if caps is None:
        caps = [len(s) // 2 + ceil(tau * len(s)) for s in sets]
    live = [(list(s), cap) for s, cap in zip(sets, caps) if len(s)]
    if not live:
        q = MultiPoly.linear([1] + [0] * (d - 1))
        return q, certify(q, batch, sets, tau)

    def good(cert: BisectionCertificate) -> bool:
        return cert.holds() and all(
            c.negative <= cap and c.positive <= cap for c, cap in zip(cert.counts, caps))

    search = _Search(points, [s for s, _ in live], D, [c for _, c in live], rng)
    tried = 0

    def attempt(q: Optional[MultiPoly]):
        nonlocal tried
        if q is None or q.is_constant():
            return None
        tried += 1
        q = _normalize_poly(search.norm.pull_back(q))
        cert = certify(q, batch, sets, tau)
        return (q, cert) if good(cert) else None

    if len(live) == 1:
        # exact median cuts along random small rational directions
        while tried < min(budget, 64):
            w = [Fraction(int(x)) for x in rng.integers(-50, 51, size=search.M)]
            if not any(w):
                continue
            found = attempt(search.median_candidate(w))
            if found:
                return found

    iterations = 0
    per_restart = 2000
    while iterations < max_iterations and tried < budget:
        for v in search.smoothed(min(per_restart, max_iterations - iterations)):
            found = attempt(search.rounded_candidate(v))
            if not found and tau == 0:
                found = attempt(search.exact_anchor_candidate(v))
            if found:
                return found
            if tried >= budget:
                break
        iterations += per_restart
    raise BisectionNotFound(
        f"bisection not found after {tried} certified candidates and {iterations} search steps "
        f"(d={d}, D={D}, sets={len(sets)}, mode={mode})")
