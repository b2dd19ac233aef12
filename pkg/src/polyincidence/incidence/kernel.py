"""Vectorized membership filter for many points against many objects.

Every object is described by integer polynomial equations.  Reduced modulo a
prime ``p`` and homogenised with the point denominators, membership of
``X / den`` becomes a dot product between a row of monomial features and a
column of coefficients.  One random combination of an object's equations is
used per prime: a member always gives 0, a non-member survives both primes
with probability about ``1/p^2`` and is then rejected by the exact test.
Residues stay below ``2^23``; float64 matmuls over chunks of at most 64
columns are therefore exact.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..algebra.batch import PRIMES, PointBatch, monomial_features
from ..algebra.poly import Exponent
from ..varieties import Flat, Variety

_CHUNK = 64
_BLOCK_ROWS = 256
_BLOCK_COLS = 512


def object_equations(obj) -> List[Tuple[Dict[Exponent, int], int]]:
    """Integer equations ``(coefficients, degree)`` cutting out ``obj``."""
    if isinstance(obj, Flat):
        d = obj.ambient_dim
        out = []
        for normal, offset in zip(obj.normals, obj.offsets):
            coeffs = {}
            for i, a in enumerate(normal):
                if a:
                    e = [0] * d
                    e[i] = 1
                    coeffs[tuple(e)] = a
            if offset:
                coeffs[(0,) * d] = -offset
            out.append((coeffs, 1))
        return out
    if isinstance(obj, Variety):
        return list(obj._integer_equations)
    raise TypeError(f"unsupported object {type(obj).__name__}")


def zero_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Boolean ``a @ b == 0 (mod p)``."""
    if a.shape[1] <= _CHUNK:
        # one chunk: the float product is an exact integer below 2^53; the
        # rounded quotient is off by at most one, so the remainder is 0 or +-p
        part = a.astype(np.float64, copy=False) @ b.astype(np.float64, copy=False)
        q = part * (1.0 / p)
        np.floor(q, out=q)
        q *= p
        part -= q
        return (part == 0) | (part == p) | (part == -p)
    return matmul_mod(a, b, p) == 0


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """``a @ b mod p`` for int64 residues, exact through float64 chunks."""
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for s in range(0, a.shape[1], _CHUNK):
        part = a[:, s:s + _CHUNK].astype(np.float64) @ b[s:s + _CHUNK].astype(np.float64)
        out = (out + np.fmod(part, p).astype(np.int64)) % p
    return out


def rowdot_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Row-wise dot products mod ``p`` of equally shaped int64 residue arrays."""
    out = np.zeros(a.shape[0], dtype=np.int64)
    for s in range(0, a.shape[1], _CHUNK):
        out = (out + (a[:, s:s + _CHUNK] * b[:, s:s + _CHUNK]).sum(axis=1) % p) % p
    return out


class MembershipKernel:
    """Membership tests of a fixed point batch against a fixed object list."""

    def __init__(self, batch: PointBatch, objects: Sequence, seed: int = 20240611):
        self.batch = batch
        self.objects = list(objects)
        rng = np.random.default_rng(seed)
        self.equations = [object_equations(o) for o in self.objects]
        # group objects by the degree of their highest equation
        self.groups: Dict[int, List[int]] = {}
        for j, eqs in enumerate(self.equations):
            deg = max((dg for _, dg in eqs), default=0)
            self.groups.setdefault(deg, []).append(j)
        self._features: Dict[Tuple[int, int], np.ndarray] = {}
        self._columns: Dict[Tuple[int, int], np.ndarray] = {}
        self._mons: Dict[int, List[Exponent]] = {}
        self._col_of = {}
        for deg, members in self.groups.items():
            for k, j in enumerate(members):
                self._col_of[j] = (deg, k)
        self._weights = {
            p: [rng.integers(1, p, size=max(len(e), 1)) for e in self.equations] for p in PRIMES}

    def features(self, deg: int, p: int) -> np.ndarray:
        key = (deg, p)
        if key not in self._features:
            feats, mons = monomial_features(self.batch, deg, p)
            self._features[key] = feats
            self._mons[deg] = mons
        return self._features[key]

    def columns(self, deg: int, p: int) -> np.ndarray:
        key = (deg, p)
        if key not in self._columns:
            self.features(deg, p)
            index = {e: i for i, e in enumerate(self._mons[deg])}
            members = self.groups[deg]
            cols = np.zeros((len(index), len(members)), dtype=np.int64)
            for k, j in enumerate(members):
                eqs = self.equations[j]
                if not eqs:
                    continue
                for (coeffs, _), w in zip(eqs, self._weights[p][j]):
                    for e, c in coeffs.items():
                        cols[index[e], k] = (cols[index[e], k] + int(w) * (c % p)) % p
            self._columns[key] = cols
        return self._columns[key]

    def _survivors_second_prime(self, deg: int, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        p = PRIMES[1]
        F = self.features(deg, p)
        C = self.columns(deg, p)
        keep = rowdot_mod(F[rows], C[:, cols].T, p) == 0
        return keep

    def _exact(self, pairs: Iterable[Tuple[int, int]]) -> List[Tuple[int, int]]:
        pts, X, den = self.batch.points, self.batch.X, self.batch.den
        out = []
        for i, j in pairs:
            o = self.objects[j]
            if isinstance(o, Flat):
                ok = all(sum(a * b for a, b in zip(n, X[i])) == c * den[i] for n, c in zip(o.normals, o.offsets))
            else:
                ok = o.contains(pts[i])
            if ok:
                out.append((i, j))
        return out

    def all_pairs(self) -> List[Tuple[int, int]]:
        """Every incident (point, object) pair."""
        out: List[Tuple[int, int]] = []
        n = self.batch.n
        if n == 0:
            return out
        p = PRIMES[0]
        for deg, members in self.groups.items():
            F = self.features(deg, p)
            C = self.columns(deg, p)
            members_arr = np.asarray(members)
            Ff = F.astype(np.float64) if F.shape[1] <= _CHUNK else F
            Cf = C.astype(np.float64) if F.shape[1] <= _CHUNK else C
            for r0 in range(0, n, _BLOCK_ROWS):
                Fb = Ff[r0:r0 + _BLOCK_ROWS]
                for c0 in range(0, len(members), _BLOCK_COLS):
                    hit = zero_mod(Fb, Cf[:, c0:c0 + _BLOCK_COLS], p)
                    ri, ci = np.nonzero(hit)
                    if ri.size == 0:
                        continue
                    rows = ri + r0
                    cols = ci + c0
                    keep = self._survivors_second_prime(deg, rows, cols)
                    out.extend(self._exact(zip(rows[keep].tolist(), members_arr[cols[keep]].tolist())))
        return out

    def pairs_for(self, j: int, rows: np.ndarray) -> List[Tuple[int, int]]:
        """Incident pairs between object ``j`` and the given point rows."""
        if rows.size == 0:
            return []
        deg, k = self._col_of[j]
        p = PRIMES[0]
        F = self.features(deg, p)
        col = self.columns(deg, p)[:, k:k + 1]
        hit = zero_mod(F[rows], col, p)[:, 0]
        cand = rows[hit]
        if cand.size == 0:
            return []
        keep = self._survivors_second_prime(deg, cand, np.full(cand.size, k))
        return self._exact((int(i), j) for i in cand[keep])
