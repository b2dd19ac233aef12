"""Iterated bisection into sign-vector cells, cell assignment and flat crossings."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..algebra import univariate as uv
from ..algebra.batch import PointBatch, signs
from ..algebra.poly import MultiPoly
from ..algebra.scalar import format_scalar, to_scalar
from .hamsandwich import BisectionCertificate, SetCount, ham_sandwich_polynomial, min_degree_for

BOUNDARY = "boundary"
ON_BOUNDARY = "on-boundary"


def _sign_char(s: int) -> str:
    return "+" if s > 0 else "-"


@dataclass(frozen=True)
class Partition:
    d: int
    n: int
    rounds: Tuple[MultiPoly, ...]
    cells: Dict[str, Tuple[int, ...]]
    boundary: Tuple[int, ...]
    certificates: Tuple[BisectionCertificate, ...] = ()
    mode: str = "relaxed"
    tau: Fraction = Fraction(1, 20)
    seed: Optional[int] = None
    bbox: Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]] = field(default=((), ()))

    @property
    def r(self) -> int:
        return len(self.rounds)

    @property
    def product_degree(self) -> int:
        return sum(q.degree() for q in self.rounds)

    def cell_cap(self) -> int:
        """Largest allowed cell size: ``ceil((1 + 2 tau)^r n / 2^r)``."""
        return ceil((1 + 2 * self.tau) ** self.r * self.n / 2 ** self.r)

    def violations(self) -> List[str]:
        out = []
        seen = [i for pts in self.cells.values() for i in pts] + list(self.boundary)
        if sorted(seen) != list(range(self.n)):
            out.append("points are not covered exactly once by cells and boundary")
        cap = self.cell_cap()
        for key, pts in self.cells.items():
            if len(key) != self.r or set(key) - {"+", "-"}:
                out.append(f"bad cell key {key!r}")
            if len(pts) > cap:
                out.append(f"cell {key} holds {len(pts)} > {cap} points")
        if sum(1 for p in self.cells.values() if p) > 2 ** self.r:
            out.append("more than 2^r nonempty cells")
        for j, cert in enumerate(self.certificates):
            if not cert.holds():
                out.append(f"round {j + 1} certificate fails")
        return out

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "mode": self.mode,
            "tau": format_scalar(self.tau),
            "d": self.d,
            "n": self.n,
            "rounds": [q.to_json() for q in self.rounds],
            "cells": {k: list(v) for k, v in sorted(self.cells.items())},
            "boundary": list(self.boundary),
            "product_degree": self.product_degree,
            "certificates": [c.to_json() for c in self.certificates],
            "bbox": [[format_scalar(x) for x in self.bbox[0]], [format_scalar(x) for x in self.bbox[1]]],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Partition":
        d = int(doc["d"])
        tau = to_scalar(doc.get("tau", "0"))
        certs = tuple(
            BisectionCertificate(tuple(SetCount(*map(int, c)) for c in cert), tau)
            for cert in doc.get("certificates", []))
        bbox = doc.get("bbox") or [[], []]
        return cls(
            d=d,
            n=int(doc["n"]),
            rounds=tuple(MultiPoly.from_json(d, q) for q in doc["rounds"]),
            cells={k: tuple(int(i) for i in v) for k, v in doc["cells"].items()},
            boundary=tuple(int(i) for i in doc["boundary"]),
            certificates=certs,
            mode=doc.get("mode", "relaxed"),
            tau=tau,
            seed=doc.get("seed"),
            bbox=(tuple(to_scalar(x) for x in bbox[0]), tuple(to_scalar(x) for x in bbox[1])),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def cell_decompose(points: Sequence[Sequence[Fraction]], r: int, mode: str = "relaxed",
                   tau=Fraction(1, 20), seed: int = 0, budget: int = 10 ** 6,
                   max_iterations: int = 30000) -> Partition:
    """Split ``points`` by ``r`` rounds of simultaneous bisection.

    Round ``j`` bisects all current parts with one polynomial of the minimal
    degree whose Veronese dimension reaches ``2^(j-1)``.  Points on the zero
    set of a round polynomial leave for the boundary and stay there.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    if not points:
        raise ValueError("no points")
    tau = Fraction(0) if mode == "exact" else Fraction(tau).limit_denominator(10 ** 6)
    rng = np.random.default_rng(seed)
    n = len(points)
    d = len(points[0])
    batch = PointBatch(points)
    parts: Dict[str, List[int]] = {"": list(range(n))}
    boundary: List[int] = []
    rounds, certs = [], []
    for j in range(1, r + 1):
        keys = sorted(k for k, v in parts.items() if v)
        sets = [parts[k] for k in keys]
        D = min_degree_for(2 ** (j - 1), d)
        # keep cumulative growth within the partition-level cap
        target = ceil((1 + 2 * tau) ** j * n / 2 ** j)
        caps = [min(len(s) // 2 + ceil(tau * len(s)), max(len(s) // 2, target)) for s in sets]
        q, cert = ham_sandwich_polynomial(points, sets, D, mode, tau, rng=rng, budget=budget,
                                          max_iterations=max_iterations, caps=caps, batch=batch)
        rounds.append(q)
        certs.append(cert)
        new_parts: Dict[str, List[int]] = {}
        for k, s in zip(keys, sets):
            sg = signs(q, batch, s)
            for i, v in zip(s, sg):
                if v == 0:
                    boundary.append(i)
                else:
                    new_parts.setdefault(k + _sign_char(v), []).append(i)
        parts = new_parts
    lo = tuple(min(p[i] for p in batch.points) for i in range(d))
    hi = tuple(max(p[i] for p in batch.points) for i in range(d))
    return Partition(d=d, n=n, rounds=tuple(rounds),
                     cells={k: tuple(v) for k, v in sorted(parts.items())},
                     boundary=tuple(sorted(boundary)), certificates=tuple(certs),
                     mode=mode, tau=tau, seed=seed, bbox=(lo, hi))


def assign_cells(part: Partition, X: Sequence[Sequence[Fraction]]) -> List[str]:
    """Sign-vector label of each point, or ``"boundary"`` if some round vanishes there."""
    if not X:
        return []
    if any(len(x) != part.d for x in X):
        raise ValueError(f"points must have {part.d} coordinates")
    batch = PointBatch([tuple(to_scalar(c) for c in x) for x in X])
    table = np.array([signs(q, batch) for q in part.rounds]).T
    out = []
    for row in table:
        out.append(BOUNDARY if (row == 0).any() else "".join(_sign_char(v) for v in row))
    return out


@dataclass(frozen=True)
class Crossing:
    """Cells of a partition met by a flat.

    ``count`` is exact when ``exact`` is set (lines); otherwise it is a sampled
    lower bound and ``upper`` is a certified upper bound.
    """
    cells: FrozenSet[str]
    exact: bool
    upper: int
    on_boundary: bool = False

    @property
    def count(self) -> int:
        return len(self.cells)

    @property
    def value(self) -> Union[int, str]:
        return ON_BOUNDARY if self.on_boundary else self.count


def _restrictions(part: Partition, flat) -> List[MultiPoly]:
    if flat.ambient_dim != part.d:
        raise ValueError(f"flat lives in R^{flat.ambient_dim}, partition in R^{part.d}")
    return [q.compose_affine(flat.base, flat.directions) for q in part.rounds]


def _feasible_upper(restricted: Sequence[MultiPoly]) -> int:
    total = 1
    for q in restricted:
        total *= 1 if q.is_constant() else 2
    return total


def line_cells(restricted: Sequence[MultiPoly]) -> FrozenSet[str]:
    """Exact sign vectors met by a line, from root isolation of the restricted rounds."""
    ups = [uv.to_integer_poly(uv.from_multipoly(q)) for q in restricted]
    prod = [1]
    for p in ups:
        if len(p) > 1:
            prod = uv.integer_mul(prod, uv.integer_squarefree(p))
    if len(prod) > 1:
        iv = uv.isolate_real_roots([Fraction(c) for c in prod])
        samples = [iv[0][0]] + [b for _, b in iv]
    else:
        samples = [Fraction(0)]
    return frozenset(
        "".join(_sign_char(uv.integer_sign_at(p, t)) for p in ups) for t in samples)


def _float_roots(p: List[int]) -> List[float]:
    coeffs = np.array([float(c) for c in reversed(p)])
    if not np.all(np.isfinite(coeffs)):
        return []
    coeffs = coeffs / np.max(np.abs(coeffs))
    roots = np.roots(coeffs)
    return [float(r.real) for r in roots if abs(r.imag) <= 1e-7 * (1 + abs(r))]


def line_sign_vectors(restricted: Sequence[MultiPoly], max_depth: int = 60) -> Tuple[FrozenSet[str], bool]:
    """Sign vectors met by a line, via float root guesses and exact verification.

    Sample points are placed between floating-point root estimates; each gap
    between samples is then checked exactly with per-round Sturm counts.  A gap
    in which one round changes sign once contributes nothing new; crowded gaps
    are bisected.  Gaps that stay crowded (shared roots) add every sign vector
    that could occur there, so the result is always a superset of the truth.
    Returns the vectors and whether they are exact.
    """
    ups = [uv.to_integer_poly(uv.from_multipoly(q)) for q in restricted]
    moving = [j for j, p in enumerate(ups) if len(p) > 1]
    chains = {j: uv._isturm(uv.integer_squarefree(ups[j])) for j in moving}
    if not moving:
        return frozenset(["".join(_sign_char(p[0]) for p in ups)]), True
    bound = max(uv.root_bound([Fraction(c) for c in ups[j]]) for j in moving)
    top = Fraction(1)
    while top <= bound:
        top *= 2
    guesses = sorted({r for j in moving for r in _float_roots(ups[j]) if -top < r < top})
    samples = [-top] + [Fraction((a + b) / 2) for a, b in zip(guesses, guesses[1:])] + [top]
    samples = sorted(set(samples))

    def nudge(t: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
        # move off any root while staying inside (lo, hi)
        k = 2
        while any(uv.integer_sign_at(ups[j], t) == 0 for j in moving):
            t = lo + (hi - lo) * Fraction(2 * k - 1, 4 * k)
            k += 1
        return t

    clean = []
    for idx, t in enumerate(samples):
        lo = samples[idx - 1] if idx else t - 1
        hi = samples[idx + 1] if idx + 1 < len(samples) else t + 1
        clean.append(nudge(t, (lo + t) / 2, (t + hi) / 2))
    samples = clean
    var_cache: Dict[Tuple[int, Fraction], int] = {}

    def var(j: int, t: Fraction) -> int:
        key = (j, t)
        if key not in var_cache:
            var_cache[key] = uv._ivariations(chains[j], t)
        return var_cache[key]

    def vector(t: Fraction) -> str:
        return "".join(_sign_char(uv.integer_sign_at(p, t)) for p in ups)

    out = set(vector(t) for t in samples)
    exact = True
    work = [(a, b, 0) for a, b in zip(samples, samples[1:])]
    while work:
        a, b, depth = work.pop()
        active = {j: var(j, a) - var(j, b) for j in moving}
        active = {j: c for j, c in active.items() if c}
        if not active or (len(active) == 1 and next(iter(active.values())) == 1):
            continue
        if depth < max_depth:
            m = nudge((a + b) / 2, (3 * a + b) / 4, (a + 3 * b) / 4)
            out.add(vector(m))
            work.extend([(a, m, depth + 1), (m, b, depth + 1)])
            continue
        exact = False
        base = vector(a)
        flips = sorted(active)
        for mask in range(1 << len(flips)):
            v = list(base)
            for bit, j in enumerate(flips):
                if mask >> bit & 1:
                    v[j] = "+" if v[j] == "-" else "-"
            out.add("".join(v))
    return frozenset(out), exact


def cells_met_by_flat(part: Partition, flat, resolution: int = 24, box=None,
                      seed: Optional[int] = None) -> Crossing:
    """Distinct sign-vector cells met by ``flat``.

    Lines are handled exactly.  For ``k >= 2`` the parameter box (default: a
    box covering the partition's points) is sampled on a jittered
    ``resolution^k`` grid; the sampled count is a lower bound, and the upper
    bound multiplies 1 for rounds constant on the flat and 2 otherwise.
    """
    restricted = _restrictions(part, flat)
    if any(q.is_zero() for q in restricted):
        return Crossing(frozenset(), True, 0, on_boundary=True)
    upper = _feasible_upper(restricted)
    k = flat.dim
    if k == 0:
        pt = flat.base
        label = assign_cells(part, [pt])[0]
        return Crossing(frozenset() if label == BOUNDARY else frozenset([label]), True, upper)
    if k == 1:
        cells, exact = line_sign_vectors(restricted)
        if not exact:
            cells = line_cells(restricted)
        return Crossing(cells, True, min(upper, len(cells)))
    if box is None:
        box = _default_box(part, flat)
    rng = np.random.default_rng(part.seed if seed is None else seed)
    lo, hi = float(box[0]), float(box[1])
    step = (hi - lo) / resolution
    grids = np.meshgrid(*[np.arange(resolution)] * k, indexing="ij")
    base = np.stack([g.ravel() for g in grids], axis=1).astype(float)
    t = lo + (base + rng.random(base.shape)) * step
    tb = PointBatch([tuple(Fraction(v) for v in row) for row in t])
    table = np.array([signs(q, tb) for q in restricted]).T
    cells = set()
    for row in table:
        if not (row == 0).any():
            cells.add("".join(_sign_char(v) for v in row))
    return Crossing(frozenset(cells), False, upper)


def _default_box(part: Partition, flat) -> Tuple[Fraction, Fraction]:
    lo, hi = part.bbox
    reach = max([abs(x) for x in lo + hi] + [Fraction(1)])
    base = max([abs(x) for x in flat.base] + [Fraction(0)])
    shortest = min(max(abs(x) for x in v) for v in flat.directions)
    R = 2 * (reach + base) / shortest
    return -R, R
