"""Checking the pseudoline-type axioms (i)-(v) on a configuration."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..algebra import linalg
from ..algebra.batch import PRIMES
from ..varieties import (DegenerateTangentError, Flat, NotSupportedError, Variety, directions_transverse,
                         tangent_space)
from .config import Config, IncidenceSet

PASS, FAIL, NOT_CHECKED = "pass", "fail", "not checked"
AXIOMS = ("i", "ii", "iii", "iv", "v")


@dataclass
class AxiomResult:
    status: str
    witness: Optional[Tuple] = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.witness is not None:
            out["witness"] = list(self.witness)
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class AxiomReport:
    results: Dict[str, AxiomResult] = field(default_factory=dict)

    def __getitem__(self, axiom: str) -> AxiomResult:
        return self.results[axiom]

    @property
    def passed(self) -> bool:
        return all(r.status == PASS for r in self.results.values())

    @property
    def failed(self) -> List[str]:
        return [a for a, r in self.results.items() if r.status == FAIL]

    def to_json(self) -> dict:
        return {a: r.to_json() for a, r in self.results.items()}


def _pairs_within_groups(keys: np.ndarray, members: np.ndarray) -> np.ndarray:
    """All unordered pairs ``(a, b)``, ``a < b``, of members sharing a key."""
    order = np.lexsort((members, keys))
    keys, members = keys[order], members[order]
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    sizes = np.diff(np.r_[starts, len(keys)])
    out = []
    for g in np.unique(sizes[sizes >= 2]):
        sel = starts[sizes == g]
        block = members[sel[:, None] + np.arange(g)[None, :]]
        a, b = np.triu_indices(g, 1)
        out.append(np.stack([block[:, a].ravel(), block[:, b].ravel()], axis=1))
    if not out:
        return np.zeros((0, 2), dtype=np.int64)
    return np.concatenate(out)


def _shared_count_check(keys: np.ndarray, members: np.ndarray, limit: int):
    """Find a pair of members sharing more than ``limit`` keys."""
    pairs = _pairs_within_groups(keys, members)
    if len(pairs) == 0:
        return None
    uniq, counts = np.unique(pairs, axis=0, return_counts=True)
    bad = np.flatnonzero(counts > limit)
    if bad.size == 0:
        return None
    a, b = uniq[bad[0]]
    return int(a), int(b), int(counts[bad[0]])


def _integer_rows(vectors: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    return [linalg.primitive_integer_row(list(v)) if any(v) else [0] * len(v) for v in vectors]


def _inverse_mod(v: np.ndarray, p: int) -> np.ndarray:
    """Elementwise ``v^(p-2) mod p`` by square and multiply (products stay below 2^46)."""
    result = np.ones_like(v)
    base = v % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def rank_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Rank modulo ``p`` of each matrix in a batch (rows are reduced in place)."""
    A = mats % p
    B, nr, nc = A.shape
    rank = np.zeros(B, dtype=np.int64)
    rows = np.arange(B)
    for c in range(nc):
        # pivot row index per batch, among rows >= rank
        cand = (A[:, :, c] != 0) & (np.arange(nr)[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        piv = np.argmax(cand, axis=1)
        idx = rows[has]
        if idx.size == 0:
            continue
        r_now = rank[idx]
        pr = piv[idx]
        # swap pivot row into position r_now
        tmp = A[idx, r_now].copy()
        A[idx, r_now] = A[idx, pr]
        A[idx, pr] = tmp
        inv = _inverse_mod(A[idx, r_now, c], p)
        A[idx, r_now] = A[idx, r_now] * inv[:, None] % p
        for r in range(nr):
            f = A[idx, r, c].copy()
            f[r_now == r] = 0
            A[idx, r] = (A[idx, r] - f[:, None] * A[idx, r_now]) % p
        rank[idx] += 1
    return rank


def _transverse_flat_pairs(cfg: Config, pairs: np.ndarray) -> np.ndarray:
    """Boolean per object pair: are the direction spaces independent."""
    objs = cfg.objects
    dirs = [_integer_rows(o.directions) for o in objs]
    k = cfg.k
    ok = np.zeros(len(pairs), dtype=bool)
    if len(pairs) == 0:
        return ok
    if k == 0:
        return np.ones(len(pairs), dtype=bool)
    p = PRIMES[0]
    same_shape = all(len(dv) == k for dv in dirs)
    if same_shape:
        D = np.array([[[c % p for c in row] for row in dv] for dv in dirs], dtype=np.int64)
        mats = np.concatenate([D[pairs[:, 0]], D[pairs[:, 1]]], axis=1)
        ok = rank_mod_p(mats, p) == 2 * k
    # anything not certified mod p gets an exact rank computation
    for t in np.flatnonzero(~ok):
        a, b = pairs[t]
        ok[t] = directions_transverse(objs[a].directions, objs[b].directions)
    return ok


def check_axioms(cfg: Config, inc: IncidenceSet) -> AxiomReport:
    """Check axioms (i)-(v) for the incidences ``inc`` of ``cfg``.

    (i) degree <= C0 and dimension k; (ii) two objects share <= C0 incident
    points; (iii) two points share <= C0 objects; (iv) a real tangent space of
    the right dimension exists at each incidence; (v) tangent spaces of two
    objects through a common point meet only there.  Failures carry a witness.
    Objects without a tangent recipe leave (iv) and (v) "not checked".
    """
    if cfg.d < 2 * cfg.k:
        raise ValueError(f"axiom checks need d >= 2k, got d={cfg.d}, k={cfg.k}")
    C0 = cfg.C0
    rep = AxiomReport()
    arr = inc.array

    bad = next((j for j, o in enumerate(cfg.objects) if o.degree > C0 or o.dim != cfg.k), None)
    if bad is None:
        rep.results["i"] = AxiomResult(PASS)
    else:
        o = cfg.objects[bad]
        rep.results["i"] = AxiomResult(FAIL, (bad,), f"object {bad} has dim {o.dim}, degree {o.degree}")

    hit = _shared_count_check(arr[:, 0], arr[:, 1], C0) if len(arr) else None
    rep.results["ii"] = AxiomResult(PASS) if hit is None else AxiomResult(
        FAIL, hit[:2], f"objects {hit[0]} and {hit[1]} share {hit[2]} incident points")
    hit = _shared_count_check(arr[:, 1], arr[:, 0], C0) if len(arr) else None
    rep.results["iii"] = AxiomResult(PASS) if hit is None else AxiomResult(
        FAIL, hit[:2], f"points {hit[0]} and {hit[1]} share {hit[2]} objects")

    unsupported = [j for j, o in enumerate(cfg.objects) if isinstance(o, Variety) and o.kind == "custom"]
    if unsupported:
        note = f"object {unsupported[0]} has no tangent recipe"
        rep.results["iv"] = AxiomResult(NOT_CHECKED, detail=note)
        rep.results["v"] = AxiomResult(NOT_CHECKED, detail=note)
        return rep

    tangents: Dict[Tuple[int, int], Flat] = {}
    iv = AxiomResult(PASS)
    for i, j in arr.tolist():
        o = cfg.objects[j]
        if isinstance(o, Flat):
            continue
        try:
            tangents[(i, j)] = tangent_space(o, cfg.points[i])
        except (DegenerateTangentError, NotSupportedError, ValueError) as exc:
            iv = AxiomResult(FAIL, (i, j), str(exc))
            break
    rep.results["iv"] = iv
    if iv.status != PASS:
        rep.results["v"] = AxiomResult(NOT_CHECKED, detail="tangent spaces unavailable")
        return rep

    rep.results["v"] = _check_transversality(cfg, arr, tangents)
    return rep


def _check_transversality(cfg: Config, arr: np.ndarray, tangents) -> AxiomResult:
    pts = arr[:, 0]
    objs = arr[:, 1]
    order = np.lexsort((objs, pts))
    pts, objs = pts[order], objs[order]
    starts = np.flatnonzero(np.r_[True, pts[1:] != pts[:-1]]) if len(pts) else np.zeros(0, dtype=int)
    sizes = np.diff(np.r_[starts, len(pts)])
    triples = []
    for g in np.unique(sizes[sizes >= 2]):
        sel = starts[sizes == g]
        block = objs[sel[:, None] + np.arange(g)[None, :]]
        a, b = np.triu_indices(g, 1)
        point_ids = np.repeat(pts[sel], len(a))
        triples.append(np.stack([point_ids, block[:, a].ravel(), block[:, b].ravel()], axis=1))
    if not triples:
        return AxiomResult(PASS)
    triples = np.concatenate(triples)
    flat_pair = np.array([isinstance(cfg.objects[a], Flat) and isinstance(cfg.objects[b], Flat)
                          for _, a, b in triples.tolist()], dtype=bool) if len(triples) else np.zeros(0, bool)
    # flats: transversality depends only on the object pair
    fp = triples[flat_pair]
    if len(fp):
        uniq, inverse = np.unique(fp[:, 1:], axis=0, return_inverse=True)
        ok = _transverse_flat_pairs(cfg, uniq)[inverse.ravel()]
        if not ok.all():
            p, a, b = fp[np.flatnonzero(~ok)[0]].tolist()
            return AxiomResult(FAIL, (p, a, b),
                               f"tangent spaces of objects {a} and {b} at point {p} meet in more than the point")
    for p, a, b in triples[~flat_pair].tolist():
        ta = tangents.get((p, a), cfg.objects[a])
        tb = tangents.get((p, b), cfg.objects[b])
        if not directions_transverse(ta.directions, tb.directions):
            return AxiomResult(FAIL, (p, a, b),
                               f"tangent spaces of objects {a} and {b} at point {p} meet in more than the point")
    return AxiomResult(PASS)


def radial_sign_class(point: Sequence[Fraction], center: Sequence[Fraction]) -> Tuple[int, ...]:
    """Default orientation class: the sign pattern of ``point - center``."""
    return tuple((x > c) - (x < c) for x, c in zip(point, center))


def orientation_classes(cfg: Config, inc: IncidenceSet,
                        class_fn: Callable = radial_sign_class) -> Dict[Tuple, IncidenceSet]:
    """Split incidences with centred varieties into classes by radial orientation."""
    labels = []
    for i, j in inc.array.tolist():
        o = cfg.objects[j]
        center = getattr(o, "center", None)
        if center is None:
            raise ValueError(f"object {j} has no center; orientation classes need centred varieties")
        labels.append(class_fn(cfg.points[i], center))
    out: Dict[Tuple, IncidenceSet] = {}
    for lab in sorted(set(labels)):
        out[lab] = inc.subset([x == lab for x in labels])
    return out
