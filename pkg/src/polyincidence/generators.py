"""Seeded constructors for the configuration families.

Every generator returns a :class:`Config` whose metadata records the family,
its parameters and the seed, so the same :class:`FamilySpec` always rebuilds
the same configuration byte for byte.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import linalg
from .algebra.scalar import PointD, make_point, random_point, random_scalar, to_scalar
from .incidence.config import Config
from .varieties import (Flat, complex_unit_circle, embed_complex_point, embed_quaternion_line,
                        quaternion_mul)

FAMILIES = ("extremal_grid", "product", "sum_product", "affine_rich", "unit_circles", "quaternion", "random")


def _meta(family: str, params: dict, seed: Optional[int] = None) -> dict:
    return {"family": family, "params": params, "seed": seed}


def gen_extremal_grid(N: int) -> Config:
    """``{1..N} x {1..2N^2}`` against lines ``y = m x + b``, ``m <= N``, ``b <= N^2``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    pts = [make_point((x, y)) for x in range(1, N + 1) for y in range(1, 2 * N * N + 1)]
    lines = [Flat((Fraction(0), Fraction(b)), ((Fraction(1), Fraction(m)),))
             for m in range(1, N + 1) for b in range(1, N * N + 1)]
    return Config(2, 1, pts, lines, C0=1, metadata=_meta("extremal_grid", {"N": N}))


def _planar_line_config(c: Config) -> None:
    if c.d != 2 or c.k != 1 or not c.all_flats():
        raise ValueError("product factors must be planar point-line configurations")


def gen_product_config(c1: Config, c2: Config) -> Config:
    """Points ``P1 x P2`` in ``R^4`` and the 2-flats ``l1 x l2``."""
    _planar_line_config(c1)
    _planar_line_config(c2)
    pts = [p + q for p in c1.points for q in c2.points]
    zero = (Fraction(0), Fraction(0))
    flats = [Flat(f.base + g.base, (f.directions[0] + zero, zero + g.directions[0]))
             for f in c1.objects for g in c2.objects]
    meta = _meta("product", {"factors": [c1.metadata, c2.metadata]})
    return Config(4, 2, pts, flats, C0=1, metadata=meta)


def _as_matrix(A) -> List[List[Fraction]]:
    if isinstance(A, (int, Fraction, str)):
        return [[to_scalar(A)]]
    return [[to_scalar(x) for x in row] for row in A]


def _as_vector(v) -> Tuple[Fraction, ...]:
    if isinstance(v, (int, Fraction, str)):
        return (to_scalar(v),)
    return make_point(v)


def gen_sum_product(A_set: Sequence, V: Sequence, W: Sequence) -> Config:
    """Flats ``y = A (x - v)`` against points ``(V + W) x (A W)`` in ``R^(2k)``.

    Requires ``det(A - B) != 0`` for distinct ``A, B``, which makes two flats
    with different matrices share at most one point.  Flats with the same
    matrix are translates; they must not coincide, i.e. ``A (v - v')`` must
    not vanish.
    """
    mats = [_as_matrix(A) for A in A_set]
    Vs = [_as_vector(v) for v in V]
    Ws = [_as_vector(w) for w in W]
    if not mats:
        raise ValueError("A_set is empty")
    k = len(mats[0])
    for A in mats:
        if len(A) != k or any(len(r) != k for r in A):
            raise ValueError("all matrices must be k x k")
    if any(len(v) != k for v in Vs + Ws):
        raise ValueError(f"vectors must have {k} entries")
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            diff = [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(mats[a], mats[b])]
            if linalg.det(diff) == 0:
                raise ValueError(f"det(A - B) = 0 for matrices {a} and {b}")
    for a, A in enumerate(mats):
        for i in range(len(Vs)):
            for j in range(i + 1, len(Vs)):
                if not any(linalg.matvec(A, [x - y for x, y in zip(Vs[i], Vs[j])])):
                    raise ValueError(f"matrix {a} maps v{i} - v{j} to 0, so their flats coincide")
    sums = sorted({tuple(x + y for x, y in zip(v, w)) for v in Vs for w in Ws})
    images = sorted({tuple(linalg.matvec(A, w)) for A in mats for w in Ws})
    pts = [s + t for s in sums for t in images]
    flats = []
    unit = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    for A in mats:
        dirs = tuple(tuple(unit[j]) + tuple(A[i][j] for i in range(k)) for j in range(k))
        for v in Vs:
            flats.append(Flat(tuple(v) + (Fraction(0),) * k, dirs))
    params = {"k": k, "n_matrices": len(mats), "n_V": len(Vs), "n_W": len(Ws)}
    return Config(2 * k, k, pts, flats, C0=1, metadata=_meta("sum_product", params))


def _solution_dimension(A, v, B, u) -> int:
    """Dimension of ``{x : A x + v = B x + u}``; ``-1`` when empty."""
    diff = [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]
    rhs = [y - x for x, y in zip(v, u)]
    sol = linalg.solve(diff, rhs, ncols=len(A))
    if sol is None:
        return -1
    return len(sol[1])


def transform_richness(base: Sequence[PointD], transform) -> int:
    """``|{x in base : A x + v in base}|`` by direct set intersection."""
    A, v = transform
    A = _as_matrix(A)
    v = _as_vector(v)
    pts = {make_point(p) for p in base}
    return sum(1 for x in pts if tuple(a + b for a, b in zip(linalg.matvec(A, x), v)) in pts)


def gen_affine_rich(base_points: Sequence, transforms: Sequence) -> Config:
    """Graphs ``{(x, A x + v)}`` of affine maps as ``d``-flats in ``R^(2d)``.

    Points are ``base x base``; the degree of a flat is the number of base
    points mapped into the base.  Maps must be invertible and pairwise
    independent: two maps may agree on at most one point.
    """
    base = [_as_vector(p) for p in base_points]
    if not base:
        raise ValueError("base is empty")
    d = len(base[0])
    maps = [(_as_matrix(A), _as_vector(v)) for A, v in transforms]
    for i, (A, v) in enumerate(maps):
        if len(A) != d or any(len(r) != d for r in A) or len(v) != d:
            raise ValueError(f"transform {i} does not act on R^{d}")
        if linalg.det(A) == 0:
            raise ValueError(f"transform {i} is not invertible")
    for i in range(len(maps)):
        for j in range(i + 1, len(maps)):
            if _solution_dimension(*maps[i], *maps[j]) >= 1:
                raise ValueError(f"transforms {i} and {j} agree on a line (not independent)")
    pts = sorted({x + y for x in base for y in base})
    flats = []
    for A, v in maps:
        dirs = tuple(tuple(Fraction(int(i == j)) for i in range(d)) + tuple(A[i][j] for i in range(d))
                     for j in range(d))
        flats.append(Flat((Fraction(0),) * d + tuple(v), dirs))
    params = {"d": d, "n_base": len(base), "n_transforms": len(maps)}
    return Config(2 * d, d, pts, flats, C0=1, metadata=_meta("affine_rich", params))


def _complex_point(p) -> PointD:
    p = list(p)
    if len(p) == 2:
        return embed_complex_point(p[0], p[1])
    return make_point(p)


def gen_complex_unit_circles(P_complex: Sequence) -> Config:
    """Complex unit circles centred at each point of ``P`` against ``P`` itself, in ``R^4``.

    A point is ``((Re z, Im z), (Re w, Im w))`` or a flat 4-tuple.  Incidences
    are the ordered pairs with ``(z - z')^2 + (w - w')^2 = 1``.
    """
    pts = [_complex_point(p) for p in P_complex]
    circles = [complex_unit_circle(p[:2], p[2:]) for p in pts]
    return Config(4, 2, pts, circles, C0=4, metadata=_meta("unit_circles", {"n": len(pts)}))


def gen_quaternion_grid(X: Sequence, slopes: Sequence, offsets: Sequence) -> Config:
    """Quaternionic lines ``y = x m + q`` in ``H^2 = R^8`` with the points ``(x, x m + q)``."""
    Xs = [make_point(x) for x in X]
    Ms = [make_point(m) for m in slopes]
    Qs = [make_point(q) for q in offsets]
    one = make_point((1, 0, 0, 0))
    zero = make_point((0, 0, 0, 0))
    flats = [embed_quaternion_line(zero, q, one, m) for m in Ms for q in Qs]
    pts = sorted({x + tuple(a + b for a, b in zip(quaternion_mul(x, m), q)) for x in Xs for m in Ms for q in Qs})
    params = {"n_x": len(Xs), "n_slopes": len(Ms), "n_offsets": len(Qs)}
    return Config(8, 4, pts, flats, C0=1, metadata=_meta("quaternion", params))


def _random_direction_set(rng, d: int, k: int, lo: int = -5, hi: int = 5) -> Tuple[PointD, ...]:
    while True:
        dirs = [make_point(rng.integers(lo, hi + 1, size=d).tolist()) for _ in range(k)]
        if k == 0 or linalg.rank(dirs) == k:
            return tuple(dirs)


def gen_random_config(n: int, m: int, d: int, k: int, seed: int, plant: int = 0,
                      max_den: int = 1000) -> Config:
    """``n`` random rational points and ``m`` random ``k``-flats in ``R^d``.

    ``plant`` of the points are placed on randomly chosen flats, so the
    incidence set is not empty; with ``plant=0`` it almost surely is.
    """
    if not (d >= 2 * k >= 2):
        raise ValueError(f"need d >= 2k >= 2, got d={d}, k={k}")
    if plant > n:
        raise ValueError("cannot plant more points than n")
    rng = np.random.default_rng(seed)
    flats = []
    for _ in range(m):
        base = random_point(rng, d, -10, 10, max_den)
        flats.append(Flat(base, _random_direction_set(rng, d, k)))
    seen = set()
    pts = []
    while len(pts) < n:
        if len(pts) < plant and flats:
            f = flats[int(rng.integers(len(flats)))]
            t = [random_scalar(rng, -2, 2, 50) for _ in range(k)]
            p = f.point_at(t)
        else:
            p = random_point(rng, d, -10, 10, max_den)
        if p not in seen:
            seen.add(p)
            pts.append(p)
    params = {"n": n, "m": m, "d": d, "k": k, "plant": plant, "max_den": max_den}
    return Config(d, k, pts, flats, C0=1, metadata=_meta("random", params, seed))


# --- randomised instances of the structured families --------------------------

def random_sum_product(k: int, n: int, seed: int, bound: int = 6) -> Config:
    """``n`` invertible integer matrices with invertible differences and ``n`` vectors ``V``, ``W``."""
    if (2 * bound + 1) ** k < n:
        raise ValueError(f"only {(2 * bound + 1) ** k} integer vectors with entries in [-{bound}, {bound}]")
    rng = np.random.default_rng(seed)
    mats: List[List[List[Fraction]]] = []
    tries = 0
    while len(mats) < n:
        tries += 1
        if tries > 10000:
            raise RuntimeError("could not draw matrices with invertible differences")
        A = [[Fraction(int(x)) for x in rng.integers(-bound, bound + 1, size=k)] for _ in range(k)]
        if linalg.det(A) == 0:
            continue
        ok = all(linalg.det([[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]) != 0 for B in mats)
        if ok:
            mats.append(A)

    def vectors():
        out = set()
        while len(out) < n:
            out.add(tuple(Fraction(int(x)) for x in rng.integers(-bound, bound + 1, size=k)))
        return sorted(out)

    cfg = gen_sum_product(mats, vectors(), vectors())
    cfg.metadata = _meta("sum_product", {"k": k, "n": n, "bound": bound}, seed)
    return cfg


def random_affine_rich(d: int, n_base: int, n_transforms: int, seed: int, side: int = 4) -> Config:
    """Base points in ``{0..side}^d`` and integer affine maps (mostly permutations and shifts)."""
    if n_base > (side + 1) ** d:
        raise ValueError(f"{n_base} base points do not fit in {{0..{side}}}^{d}")
    rng = np.random.default_rng(seed)
    base = set()
    while len(base) < n_base:
        base.add(tuple(Fraction(int(x)) for x in rng.integers(0, side + 1, size=d)))
    base = sorted(base)
    maps = []
    tries = 0
    while len(maps) < n_transforms:
        tries += 1
        if tries > 10000:
            raise RuntimeError("could not draw independent transforms")
        perm = rng.permutation(d)
        signs = rng.choice([-1, 1], size=d)
        A = [[Fraction(int(signs[i]) if perm[i] == j else 0) for j in range(d)] for i in range(d)]
        if rng.random() < 0.3:
            A = [[Fraction(int(x)) for x in rng.integers(-2, 3, size=d)] for _ in range(d)]
        v = tuple(Fraction(int(x)) for x in rng.integers(-1, 2, size=d))
        try:
            if linalg.det(A) == 0:
                continue
        except ZeroDivisionError:
            continue
        if any(_solution_dimension(A, v, B, u) >= 1 for B, u in maps):
            continue
        maps.append((A, v))
    cfg = gen_affine_rich(base, maps)
    cfg.metadata = _meta("affine_rich", {"d": d, "n_base": n_base, "n_transforms": n_transforms,
                                         "side": side}, seed)
    return cfg


# Pythagorean unit vectors give rational points at complex distance 1.
_UNIT_STEPS = ((Fraction(3, 5), Fraction(4, 5)), (Fraction(5, 13), Fraction(12, 13)),
               (Fraction(8, 17), Fraction(15, 17)), (Fraction(1), Fraction(0)))


def random_unit_circles(n: int, seed: int, planted: Optional[int] = None) -> Config:
    """Random rational points of ``C^2`` with some planted unit-distance pairs."""
    rng = np.random.default_rng(seed)
    planted = n // 2 if planted is None else planted
    pts: List[PointD] = []
    seen = set()
    while len(pts) < n:
        if pts and len(pts) < planted:
            anchor = pts[int(rng.integers(len(pts)))]
            a, b = _UNIT_STEPS[int(rng.integers(len(_UNIT_STEPS)))]
            sgn = [int(s) for s in rng.choice([-1, 1], size=2)]
            if rng.random() < 0.5:
                step = (sgn[0] * a, Fraction(0), sgn[1] * b, Fraction(0))
            else:
                step = (Fraction(0), Fraction(0), sgn[0] * a, Fraction(0)) if b == 0 else \
                    (sgn[0] * b, Fraction(0), sgn[1] * a, Fraction(0))
            p = tuple(x + y for x, y in zip(anchor, step))
        else:
            p = tuple(Fraction(int(x), 4) for x in rng.integers(-12, 13, size=4))
        if p not in seen:
            seen.add(p)
            pts.append(p)
    cfg = gen_complex_unit_circles(pts)
    cfg.metadata = _meta("unit_circles", {"n": n, "planted": planted}, seed)
    return cfg


def reflected_circle_pair(p=(0, 0, 0, 0), step=(Fraction(3, 5), 0, Fraction(4, 5), 0)) -> Config:
    """Centres ``c`` and ``2p - c`` whose unit circles share ``p`` with identical tangent spaces."""
    p = make_point(p)
    step = make_point(step)
    c1 = tuple(a - b for a, b in zip(p, step))
    c2 = tuple(a + b for a, b in zip(p, step))
    cfg = gen_complex_unit_circles([c1, p, c2])
    cfg.metadata = _meta("unit_circles", {"reflected_pair": True})
    return cfg


def random_quaternion_grid(n_x: int, n_slopes: int, n_offsets: int, seed: int, bound: int = 3) -> Config:
    rng = np.random.default_rng(seed)

    def draw(count, nonzero=False):
        out = set()
        while len(out) < count:
            q = tuple(Fraction(int(x)) for x in rng.integers(-bound, bound + 1, size=4))
            if nonzero and not any(q):
                continue
            out.add(q)
        return sorted(out)

    cfg = gen_quaternion_grid(draw(n_x), draw(n_slopes, nonzero=True), draw(n_offsets))
    cfg.metadata = _meta("quaternion", {"n_x": n_x, "n_slopes": n_slopes, "n_offsets": n_offsets,
                                        "bound": bound}, seed)
    return cfg


@dataclass(frozen=True)
class FamilySpec:
    """A family name with size parameters and a seed; :meth:`build` is deterministic."""
    family: str
    params: Dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")

    def build(self) -> Config:
        p = dict(self.params)
        f = self.family
        if f == "extremal_grid":
            cfg = gen_extremal_grid(int(p.get("N", 2)))
        elif f == "product":
            cfg = gen_product_config(gen_extremal_grid(int(p.get("N1", p.get("N", 2)))),
                                     gen_extremal_grid(int(p.get("N2", p.get("N", 2)))))
        elif f == "sum_product":
            cfg = random_sum_product(int(p.get("k", 1)), int(p.get("n", 3)), self.seed,
                                     int(p.get("bound", 6)))
        elif f == "affine_rich":
            cfg = random_affine_rich(int(p.get("d", 2)), int(p.get("n_base", 10)),
                                     int(p.get("n_transforms", 3)), self.seed, int(p.get("side", 4)))
        elif f == "unit_circles":
            cfg = random_unit_circles(int(p.get("n", 20)), self.seed,
                                      None if p.get("planted") is None else int(p["planted"]))
        elif f == "quaternion":
            cfg = random_quaternion_grid(int(p.get("n_x", 3)), int(p.get("n_slopes", 2)),
                                         int(p.get("n_offsets", 2)), self.seed, int(p.get("bound", 3)))
        else:
            cfg = gen_random_config(int(p.get("n", 50)), int(p.get("m", 10)), int(p.get("d", 2)),
                                    int(p.get("k", 1)), self.seed, int(p.get("plant", 0)),
                                    int(p.get("max_den", 1000)))
        cfg.metadata = dict(cfg.metadata, spec=self.to_json())
        return cfg

    def to_json(self) -> dict:
        return {"family": self.family, "params": dict(sorted(self.params.items())), "seed": self.seed}

    @classmethod
    def from_json(cls, doc: dict) -> "FamilySpec":
        return cls(doc["family"], dict(doc.get("params", {})), int(doc.get("seed", 0)))
