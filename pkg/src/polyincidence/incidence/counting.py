"""Incidence counting, trivial bounds and rich points."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import isqrt
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..algebra.batch import PointBatch, signs
from ..partition.cells import Partition, line_sign_vectors
from ..varieties import Flat, flats_intersection
from .config import Config, IncidenceSet
from .kernel import MembershipKernel


def incidences_bruteforce(cfg: Config, exact: bool = False) -> IncidenceSet:
    """All incident pairs of ``cfg``.

    By default every pair goes through the modular membership filter and
    survivors are confirmed exactly.  ``exact=True`` runs ``contains`` on every
    one of the ``|P| * |L|`` pairs instead (slow; used as an oracle).
    """
    n, m = cfg.n_points, cfg.n_objects
    work = {"candidate_pairs": n * m}
    if n == 0 or m == 0:
        return IncidenceSet(n, m, [], work)
    if exact:
        pairs = [(i, j) for j, o in enumerate(cfg.objects) for i, p in enumerate(cfg.points) if o.contains(p)]
        return IncidenceSet(n, m, pairs, work)
    kernel = MembershipKernel(PointBatch(cfg.points), cfg.objects)
    return IncidenceSet(n, m, kernel.all_pairs(), work)


def _allowed_cells(part: Partition, obj) -> Optional[List[str]]:
    """Cells a flat may meet (a superset); ``None`` means every cell."""
    if not isinstance(obj, Flat):
        return None
    restricted = [q.compose_affine(obj.base, obj.directions) for q in part.rounds]
    if any(q.is_zero() for q in restricted):
        return []
    if obj.dim == 1:
        vectors, _ = line_sign_vectors(restricted)
        return [c for c in vectors if c in part.cells]
    fixed = {}
    for j, q in enumerate(restricted):
        if q.is_constant():
            fixed[j] = "+" if q.constant_term() > 0 else "-"
    return [c for c in part.cells if all(c[j] == s for j, s in fixed.items())]


def check_partition_matches(cfg: Config, part: Partition) -> None:
    if part.n != cfg.n_points or part.d != cfg.d:
        raise ValueError(f"partition covers {part.n} points in R^{part.d}, config has "
                         f"{cfg.n_points} points in R^{cfg.d}")
    batch = PointBatch(cfg.points)
    table = np.array([signs(q, batch) for q in part.rounds])
    for key, pts in part.cells.items():
        want = np.array([1 if ch == "+" else -1 for ch in key])[:, None]
        if pts and not np.array_equal(table[:, list(pts)], np.repeat(want, len(pts), axis=1)):
            raise ValueError(f"cell {key} does not match the config's points")
    if part.boundary and np.all(table[:, list(part.boundary)] != 0, axis=0).any():
        raise ValueError("a boundary point lies off every round's zero set")


def incidences_partitioned(cfg: Config, part: Partition) -> IncidenceSet:
    """Incidences found by scanning each object only against cells it can meet.

    Points on the zero sets (the boundary) are always scanned; the remaining
    candidates come from the cells the object crosses (exactly for lines, by
    per-round sign feasibility for higher flats, all cells for varieties).
    ``work["candidate_pairs"]`` counts the pairs examined.
    """
    check_partition_matches(cfg, part)
    n, m = cfg.n_points, cfg.n_objects
    if n == 0 or m == 0:
        return IncidenceSet(n, m, [], {"candidate_pairs": 0})
    kernel = MembershipKernel(PointBatch(cfg.points), cfg.objects)
    cell_rows = {k: np.asarray(v, dtype=np.int64) for k, v in part.cells.items()}
    boundary = np.asarray(part.boundary, dtype=np.int64)
    everything = np.arange(n, dtype=np.int64)
    pairs: List[Tuple[int, int]] = []
    examined = 0
    cache: Dict[Tuple[str, ...], np.ndarray] = {}
    for j, obj in enumerate(cfg.objects):
        allowed = _allowed_cells(part, obj)
        if allowed is None:
            rows = everything
        else:
            key = tuple(sorted(allowed))
            if key not in cache:
                cache[key] = np.sort(np.concatenate([boundary] + [cell_rows[c] for c in key]))
            rows = cache[key]
        examined += rows.size
        pairs.extend(kernel.pairs_for(j, rows))
    return IncidenceSet(n, m, pairs, {"candidate_pairs": examined, "all_pairs": n * m})


def _sqrt_up(x: int, bits: int = 40) -> Fraction:
    """A rational upper bound on ``sqrt(x)`` within ``2^-bits``."""
    scaled = x << (2 * bits)
    r = isqrt(scaled)
    if r * r < scaled:
        r += 1
    return Fraction(r, 1 << bits)


def trivial_bounds(cfg: Config) -> Tuple[Fraction, Fraction]:
    """``(C0^(1/2) |P| |L|^(1/2) + |L|, C0^(1/2) |L| |P|^(1/2) + |P|)``, square roots rounded up."""
    P, L, C0 = cfg.n_points, cfg.n_objects, cfg.C0
    a = P * _sqrt_up(C0 * L) + L
    b = L * _sqrt_up(C0 * P) + P
    return a, b


def rich_points(cfg: Config, r: int) -> List[Tuple[Tuple[Fraction, ...], int]]:
    """Points lying on at least ``r`` objects, with their multiplicities.

    Candidates are the pairwise intersections of flats that are single
    points; intersections of positive dimension are skipped (their points are
    not isolated).  Multiplicities count every object through the point.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    if not cfg.all_flats():
        raise ValueError("rich points need flat objects; intersections are only computed for flats")
    candidates = set()
    for f, g in combinations(cfg.objects, 2):
        meet = flats_intersection(f, g)
        if meet is not None and meet.dim == 0:
            candidates.add(meet.base)
    if not candidates:
        return []
    pts = sorted(candidates)
    kernel = MembershipKernel(PointBatch(pts), cfg.objects)
    deg = np.bincount(np.array([i for i, _ in kernel.all_pairs()], dtype=np.int64), minlength=len(pts))
    return [(p, int(c)) for p, c in zip(pts, deg) if c >= r]
