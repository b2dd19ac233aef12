"""Component counts of ``{q != 0}`` and critical-point counts of the gradient map."""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..algebra import univariate as uv
from ..algebra.batch import PointBatch, signs
from ..algebra.poly import MultiPoly


class NonGenericShift(ValueError):
    """The shift ``u`` makes ``grad q = u`` degenerate; draw another ``u``."""


class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _axis_boxes(box, k: int) -> List[Tuple[Fraction, Fraction]]:
    if len(box) == 2 and not isinstance(box[0], (tuple, list)):
        box = [box] * k
    if len(box) != k:
        raise ValueError(f"box has {len(box)} axes, polynomial has {k} variables")
    out = [(Fraction(a), Fraction(b)) for a, b in box]
    if any(a >= b for a, b in out):
        raise ValueError("box sides must have lo < hi")
    return out


def _count_1d(p: List[Fraction], lo: Fraction, hi: Fraction) -> int:
    # [lo, hi] minus the zero set: one piece more than the roots strictly inside
    if len(uv.trim(p)) == 1:
        return 1
    return uv.count_roots(p, lo, hi) + 1


EVIDENCE = 64


def count_components_complement(q: MultiPoly, box, resolution: int = 32,
                                budget: Optional[int] = None, evidence: int = EVIDENCE) -> int:
    """Connected components of ``{q != 0}`` inside ``box`` seen by a certified grid.

    Grid nodes with the same nonzero sign are joined when the segment between
    them is zero-free, which is checked exactly by a Sturm count along the grid
    line.  Every reported class therefore lies in one component, but one
    component may show up as several classes or be missed, so the count is an
    estimate.  In one variable the count is exact: distinct roots inside
    the box, plus one.

    Connectivity is judged on a grid of ``evidence`` steps per axis (raised
    to a multiple of ``resolution`` when needed) and the count is the number
    of classes holding a node of the coarser ``resolution`` grid.  Doubling
    ``resolution`` below ``evidence`` only adds sample nodes, so the count
    never drops.

    ``box`` is ``(lo, hi)`` for every axis or a list of per-axis pairs.
    ``budget``, when given, is an upper bound the count must respect.
    """
    if q.is_zero():
        raise ValueError("polynomial is identically zero")
    k = q.nvars
    axes = _axis_boxes(box, k)
    if k == 1:
        count = _count_1d(uv.from_multipoly(q), axes[0][0], axes[0][1])
    else:
        fine = resolution * max(1, -(-evidence // resolution))
        count = _count_grid(q, axes, fine, fine // resolution)
    if budget is not None and count > budget:
        raise RuntimeError(f"component count {count} exceeds the supplied budget {budget}")
    return count


def _count_grid(q: MultiPoly, axes, resolution: int, stride: int = 1) -> int:
    k = q.nvars
    ticks = [[a + (b - a) * i / resolution for i in range(resolution + 1)] for a, b in axes]
    shape = (resolution + 1,) * k
    grid = np.indices(shape).reshape(k, -1).T
    pts = [tuple(ticks[a][i] for a, i in enumerate(row)) for row in grid]
    node_sign = signs(q, PointBatch(pts)).reshape(shape)
    flat_index = np.arange(len(pts)).reshape(shape)
    dsu = _DSU(len(pts))
    for axis in range(k):
        others = [a for a in range(k) if a != axis]
        for fixed in np.ndindex(*([resolution + 1] * (k - 1))):
            base = [Fraction(0)] * k
            for a, i in zip(others, fixed):
                base[a] = ticks[a][i]
            direction = [Fraction(int(a == axis)) for a in range(k)]
            line = uv.from_multipoly(q.compose_affine(base, [direction]))
            sl: List = list(fixed)
            sl.insert(axis, slice(None))
            s_line = node_sign[tuple(sl)]
            ids = flat_index[tuple(sl)]
            if not line:
                continue
            ip = uv.to_integer_poly(line)
            if len(ip) == 1:
                for j in range(resolution):
                    dsu.union(int(ids[j]), int(ids[j + 1]))
                continue
            chain = uv._isturm(uv.integer_squarefree(ip))
            v = [uv._ivariations(chain, t) for t in ticks[axis]]
            for j in range(resolution):
                # roots in (t_j, t_{j+1}]; both nodes nonzero excludes the endpoints
                if s_line[j] and s_line[j + 1] and v[j] == v[j + 1]:
                    dsu.union(int(ids[j]), int(ids[j + 1]))
    sampled = np.zeros(shape, dtype=bool)
    sampled[(slice(None, None, stride),) * k] = True
    alive = np.nonzero((node_sign.ravel() != 0) & sampled.ravel())[0]
    return len({dsu.find(int(i)) for i in alive})


def _shear(p: MultiPoly, lam: Fraction) -> MultiPoly:
    # x = x' + lam * y', y = y'
    return p.compose_affine([Fraction(0), Fraction(0)], [[Fraction(1), Fraction(0)], [lam, Fraction(1)]])


def _at_x(p: MultiPoly, a: Fraction) -> List[Fraction]:
    return uv.from_multipoly(p.compose_affine([a, Fraction(0)], [[Fraction(0), Fraction(1)]]))


def eliminate_y(f: MultiPoly, g: MultiPoly) -> List[Fraction]:
    """``Res_y(f, g)`` as a polynomial in ``x``, by evaluation and interpolation.

    Both inputs must have constant leading coefficient in ``y`` (so
    specialising ``x`` commutes with taking the resultant).
    """
    bound = max(f.degree(), 0) * max(g.degree(), 0)
    xs = [Fraction(i) for i in range(bound + 1)]
    ys = [uv.resultant(_at_x(f, a), _at_x(g, a)) for a in xs]
    return uv.interpolate(xs, ys)


def critical_point_count(q: MultiPoly, u: Sequence, rng=None, attempts: int = 8) -> int:
    """Exact number of real solutions of ``grad q = u`` for bivariate ``q``.

    After a random shear both equations have constant leading coefficient in
    ``y``, and ``R = Res_y`` vanishes exactly at the ``x``-coordinates of the
    complex solutions.  When ``R`` is squarefree every fibre holds one simple
    solution; a real root of ``R`` then has a real ``y`` (its conjugate would
    be a second point in the fibre), so real solutions match real roots.
    """
    if q.nvars != 2:
        raise ValueError("critical_point_count needs a polynomial in 2 variables")
    if q.is_constant():
        raise ValueError("polynomial is constant")
    if len(u) != 2:
        raise ValueError("u must have 2 coordinates")
    rng = np.random.default_rng(0) if rng is None else rng
    D = q.degree()
    f = q.diff(0) - Fraction(u[0])
    g = q.diff(1) - Fraction(u[1])
    for p in (f, g):
        if p.is_constant() and not p.is_zero():
            return 0
    if f.is_zero() or g.is_zero():
        raise NonGenericShift("non-generic shift, re-draw u: infinitely many solutions")
    for _ in range(attempts):
        lam = Fraction(int(rng.integers(-97, 98)), int(rng.integers(1, 30)))
        fs, gs = _shear(f, lam), _shear(g, lam)
        if not fs.coeff((0, fs.degree())) or not gs.coeff((0, gs.degree())):
            continue
        R = eliminate_y(fs, gs)
        if not R:
            raise NonGenericShift("non-generic shift, re-draw u: resultant vanishes identically")
        if len(R) == 1:
            count = 0
        else:
            if len(uv.gcd(R, uv.derivative(R))) > 1:
                continue
            count = uv.count_roots(R)
        if count > (D - 1) ** 2:
            raise AssertionError(f"{count} critical points exceed the Bezout bound {(D - 1) ** 2}")
        return count
    raise NonGenericShift("non-generic shift, re-draw u: repeated solutions for every shear tried")
