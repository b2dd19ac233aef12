"""Batched exact evaluation over many rational points.

A :class:`PointBatch` stores each point ``p`` as an integer vector ``X`` and a
positive integer ``den`` with ``p = X / den``.  Signs of polynomials are
computed in floating point first; any value whose magnitude does not clear a
rigorous rounding-error bound is recomputed with Python integers, so every
returned sign is exact.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .poly import Exponent, MultiPoly, monomials
from .scalar import integer_form

# Two primes below 2**23: with at most ~64 feature columns, dot products of
# residues stay below 2**53 and float64 matmul is exact.
PRIMES = (8388593, 8388587)
_EPS = np.finfo(float).eps


class PointBatch:
    def __init__(self, points: Sequence[Sequence[Fraction]]):
        self.points = [tuple(p) for p in points]
        self.n = len(self.points)
        self.dim = len(self.points[0]) if self.points else 0
        ints = [integer_form(p) for p in self.points]
        self.X: List[Tuple[int, ...]] = [x for x, _ in ints]
        self.den: List[int] = [d for _, d in ints]
        if self.n:
            self.floats = np.array([[float(c) for c in p] for p in self.points], dtype=float)
        else:
            self.floats = np.zeros((0, self.dim))
        self._residues: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}

    def __len__(self):
        return self.n

    def residues(self, prime: int) -> Tuple[np.ndarray, np.ndarray]:
        """``(X mod p, den mod p)`` as int64 arrays."""
        if prime not in self._residues:
            xr = np.array([[v % prime for v in x] for x in self.X], dtype=np.int64).reshape(self.n, self.dim)
            dr = np.array([v % prime for v in self.den], dtype=np.int64)
            self._residues[prime] = (xr, dr)
        return self._residues[prime]


def exact_value_int(coeffs: Dict[Exponent, int], degree: int, X: Sequence[int], den: int) -> int:
    """``den**degree * p(X/den)`` for integer coefficients (sign equals sign of p)."""
    total = 0
    for e, c in coeffs.items():
        term = c
        for xi, a in zip(X, e):
            if a:
                term *= xi ** a
        s = degree - sum(e)
        if s:
            term *= den ** s
        total += term
    return total


def _float_eval(p: MultiPoly, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Value and absolute-term sum at each row of ``x``."""
    n = x.shape[0]
    val = np.zeros(n)
    mag = np.zeros(n)
    ax = np.abs(x)
    for e, c in p.items():
        cf = float(c)
        mono = np.ones(n)
        amono = np.ones(n)
        for i, a in enumerate(e):
            if a:
                mono = mono * x[:, i] ** a
                amono = amono * ax[:, i] ** a
        val += cf * mono
        mag += abs(cf) * amono
    return val, mag


def signs(p: MultiPoly, batch: PointBatch, rows: Sequence[int] | None = None) -> np.ndarray:
    """Exact signs (-1, 0, +1) of ``p`` at the batch points (or a subset of rows)."""
    if p.nvars != batch.dim:
        raise ValueError(f"polynomial has {p.nvars} variables, points have {batch.dim} coordinates")
    idx = np.arange(batch.n) if rows is None else np.asarray(rows, dtype=int)
    if idx.size == 0:
        return np.zeros(0, dtype=np.int8)
    if p.is_zero():
        return np.zeros(idx.size, dtype=np.int8)
    x = batch.floats[idx]
    with np.errstate(over="ignore", invalid="ignore"):
        val, mag = _float_eval(p, x)
    deg = max(p.degree(), 0)
    nterms = len(p._terms)
    # generous bound on accumulated rounding (inputs, monomials, summation)
    bound = 4.0 * (nterms + 2 * deg + 4) * _EPS * mag
    out = np.sign(val).astype(np.int8)
    unsure = ~(np.abs(val) > bound) | ~np.isfinite(val)
    if unsure.any():
        coeffs, _ = p.integer_coefficients()
        for j in np.nonzero(unsure)[0]:
            r = idx[j]
            v = exact_value_int(coeffs, deg, batch.X[r], batch.den[r])
            out[j] = (v > 0) - (v < 0)
    return out


def monomial_features(batch: PointBatch, degree: int, prime: int,
                      rows: np.ndarray | None = None) -> Tuple[np.ndarray, List[Exponent]]:
    """Residues of ``X^e * den^(degree - |e|)`` for every monomial ``e`` of degree <= ``degree``.

    A polynomial ``p`` of degree at most ``degree`` vanishes at a point iff the
    dot product of these features with the integer coefficients of ``p`` is 0;
    modulo a prime this is a necessary condition.
    """
    xr, dr = batch.residues(prime)
    if rows is not None:
        xr, dr = xr[rows], dr[rows]
    mons = monomials(batch.dim, degree)
    n = xr.shape[0]
    feats = np.empty((n, len(mons)), dtype=np.int64)
    den_pows = [np.ones(n, dtype=np.int64)]
    for _ in range(degree):
        den_pows.append(den_pows[-1] * dr % prime)
    x_pows: Dict[Tuple[int, int], np.ndarray] = {}

    def xpow(i: int, a: int) -> np.ndarray:
        key = (i, a)
        if key not in x_pows:
            x_pows[key] = np.ones(n, dtype=np.int64) if a == 0 else xpow(i, a - 1) * xr[:, i] % prime
        return x_pows[key]

    for j, e in enumerate(mons):
        col = den_pows[degree - sum(e)].copy()
        for i, a in enumerate(e):
            if a:
                col = col * xpow(i, a) % prime
        feats[:, j] = col
    return feats, mons
