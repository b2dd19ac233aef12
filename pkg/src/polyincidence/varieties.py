"""Affine flats and the explicit bounded-degree varieties used by the incidence theorems.

Two object types live here:

* :class:`Flat` -- an affine ``k``-flat ``base + span(directions)`` in ``R^d``.
* :class:`Variety` -- the common zero set of a list of polynomials with a
  declared dimension and degree.  Only ``unit_circle`` varieties get tangent
  spaces; ``custom`` ones are usable for counting only.

Every predicate is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .algebra import linalg
from .algebra.batch import exact_value_int
from .algebra.poly import MultiPoly
from .algebra.scalar import PointD, format_point, integer_form, make_point, to_scalar

FLAT_KINDS = ("flat", "complex_line", "quaternion_line")
VARIETY_KINDS = ("unit_circle", "custom")


class DegenerateTangentError(ValueError):
    """The Jacobian kernel at a point does not have the declared dimension."""


class NotSupportedError(ValueError):
    """The requested predicate is not available for this object kind."""


def _check_dim(obj_dim: int, x: Sequence) -> None:
    if len(x) != obj_dim:
        raise ValueError(f"point has {len(x)} coordinates, object lives in R^{obj_dim}")


@dataclass(frozen=True, eq=False)
class Flat:
    base: PointD
    directions: Tuple[PointD, ...]
    kind: str = "flat"

    def __post_init__(self):
        object.__setattr__(self, "base", make_point(self.base))
        object.__setattr__(self, "directions", tuple(make_point(v) for v in self.directions))
        d = len(self.base)
        if any(len(v) != d for v in self.directions):
            raise ValueError("direction vectors must match the ambient dimension")
        if self.directions and linalg.rank(self.directions) != len(self.directions):
            raise ValueError("flat directions are linearly dependent")
        if self.kind not in FLAT_KINDS:
            raise ValueError(f"unknown flat kind {self.kind!r}")

    @property
    def ambient_dim(self) -> int:
        return len(self.base)

    @property
    def dim(self) -> int:
        return len(self.directions)

    @property
    def degree(self) -> int:
        return 1

    @cached_property
    def _implicit(self) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[int, ...]]:
        # normals spanning the orthogonal complement of the directions
        if self.directions:
            normals = linalg.nullspace(self.directions)
        else:
            normals = [[Fraction(int(i == j)) for j in range(self.ambient_dim)]
                       for i in range(self.ambient_dim)]
        rows, rhs = [], []
        for n in normals:
            r = linalg.primitive_integer_row(n)
            c = sum(Fraction(a) * b for a, b in zip(r, self.base))
            # scale so the offset is an integer as well
            rows.append(tuple(a * c.denominator for a in r))
            rhs.append(c.numerator)
        return tuple(rows), tuple(rhs)

    @property
    def normals(self) -> Tuple[Tuple[int, ...], ...]:
        return self._implicit[0]

    @property
    def offsets(self) -> Tuple[int, ...]:
        return self._implicit[1]

    def equations(self) -> List[MultiPoly]:
        """Linear equations ``n . x - c = 0`` cutting out the flat."""
        return [MultiPoly.linear(list(n), -c) for n, c in zip(self.normals, self.offsets)]

    def point_at(self, t: Sequence) -> PointD:
        p = list(self.base)
        for ti, v in zip(t, self.directions):
            ti = Fraction(ti)
            for i, vi in enumerate(v):
                p[i] += ti * vi
        return tuple(p)

    @cached_property
    def canonical(self) -> Tuple:
        """Hashable key identifying the affine subspace itself."""
        if not self.directions:
            return (self.base, ())
        red, pivots = linalg.rref(self.directions)
        base = list(self.base)
        for row, p in zip(red, pivots):
            f = base[p]
            if f:
                base = [b - f * r for b, r in zip(base, row)]
        return (tuple(base), tuple(tuple(r) for r in red))

    def same_as(self, other: "Flat") -> bool:
        return isinstance(other, Flat) and self.canonical == other.canonical

    def contains(self, x: Sequence) -> bool:
        _check_dim(self.ambient_dim, x)
        X, den = integer_form(make_point(x))
        return all(sum(a * b for a, b in zip(n, X)) == c * den
                   for n, c in zip(self.normals, self.offsets))

    def to_json(self) -> dict:
        out = {"type": "flat", "base": format_point(self.base),
               "directions": [format_point(v) for v in self.directions]}
        if self.kind != "flat":
            out["kind"] = self.kind
        return out


@dataclass(frozen=True, eq=False)
class Variety:
    ambient_dim: int
    equations_: Tuple[MultiPoly, ...]
    declared_dim: int
    declared_degree: int
    kind: str = "custom"
    center: Optional[PointD] = None

    def __post_init__(self):
        object.__setattr__(self, "equations_", tuple(self.equations_))
        if self.kind not in VARIETY_KINDS:
            raise ValueError(f"unknown variety kind {self.kind!r}")
        if any(e.nvars != self.ambient_dim for e in self.equations_):
            raise ValueError("equation variable count differs from the ambient dimension")
        if not 0 <= self.declared_dim <= self.ambient_dim:
            raise ValueError("declared dimension out of range")
        if self.center is not None:
            object.__setattr__(self, "center", make_point(self.center))

    @property
    def dim(self) -> int:
        return self.declared_dim

    @property
    def degree(self) -> int:
        return self.declared_degree

    def equations(self) -> List[MultiPoly]:
        return list(self.equations_)

    @cached_property
    def _integer_equations(self) -> List[Tuple[Dict, int]]:
        return [(e.integer_coefficients()[0], max(e.degree(), 0)) for e in self.equations_]

    def contains(self, x: Sequence) -> bool:
        _check_dim(self.ambient_dim, x)
        X, den = integer_form(make_point(x))
        return all(exact_value_int(c, deg, X, den) == 0 for c, deg in self._integer_equations)

    @cached_property
    def canonical(self) -> Tuple:
        return (self.kind, self.declared_dim, frozenset(self.equations_))

    def same_as(self, other) -> bool:
        return isinstance(other, Variety) and self.canonical == other.canonical

    def to_json(self) -> dict:
        out = {"type": "variety", "kind": self.kind,
               "equations": [e.to_json() for e in self.equations_],
               "dim": self.declared_dim, "degree": self.declared_degree}
        if self.center is not None:
            out["center"] = format_point(self.center)
        return out


GeomObject = Union[Flat, Variety]


def object_from_json(doc: dict, ambient_dim: Optional[int] = None) -> GeomObject:
    kind = doc.get("type")
    if kind == "flat":
        f = Flat(make_point(doc["base"]), tuple(make_point(v) for v in doc.get("directions", [])),
                 kind=doc.get("kind", "flat"))
        if ambient_dim is not None and f.ambient_dim != ambient_dim:
            raise ValueError(f"flat lives in R^{f.ambient_dim}, config says R^{ambient_dim}")
        return f
    if kind == "variety":
        n = ambient_dim if ambient_dim is not None else int(doc["ambient_dim"])
        eqs = tuple(MultiPoly.from_json(n, e) for e in doc["equations"])
        return Variety(n, eqs, int(doc["dim"]), int(doc["degree"]), kind=doc.get("kind", "custom"),
                       center=doc.get("center"))
    raise ValueError(f"unknown object type {kind!r}")


def contains(v: GeomObject, x: Sequence) -> bool:
    """Exact membership of ``x`` in a flat or variety."""
    return v.contains(x)


def flats_intersection(f: Flat, g: Flat) -> Optional[Flat]:
    """Exact intersection of two flats: ``None`` when empty, else a flat (a point is a 0-flat)."""
    if f.ambient_dim != g.ambient_dim:
        raise ValueError("flats live in different ambient spaces")
    rows = [list(map(Fraction, n)) for n in f.normals + g.normals]
    rhs = [Fraction(c) for c in f.offsets + g.offsets]
    sol = linalg.solve(rows, rhs, ncols=f.ambient_dim)
    if sol is None:
        return None
    base, null = sol
    return Flat(tuple(base), tuple(tuple(v) for v in null))


def jacobian(equations: Sequence[MultiPoly], x: Sequence) -> List[List[Fraction]]:
    return [[g(x) for g in e.gradient()] for e in equations]


def tangent_space(v: GeomObject, x: Sequence) -> Flat:
    """Real tangent flat of ``v`` at the smooth point ``x``."""
    if not v.contains(x):
        raise ValueError("point is not on the object")
    if isinstance(v, Flat):
        return v
    if v.kind == "custom":
        raise NotSupportedError("tangent spaces are only computed for supported variety kinds")
    kernel = linalg.nullspace(jacobian(v.equations_, x))
    if len(kernel) != v.declared_dim:
        raise DegenerateTangentError(
            f"degenerate tangent: Jacobian kernel has dimension {len(kernel)}, expected {v.declared_dim}")
    return Flat(make_point(x), tuple(tuple(k) for k in kernel))


def transverse_at(f: Flat, g: Flat, x: Sequence) -> bool:
    """True iff the two flats through ``x`` meet only at ``x``."""
    if not (f.contains(x) and g.contains(x)):
        raise ValueError("point does not lie on both flats")
    return directions_transverse(f.directions, g.directions)


def directions_transverse(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> bool:
    stacked = list(a) + list(b)
    if not stacked:
        return True
    return linalg.rank(stacked) == len(stacked)


# --- constructions ---------------------------------------------------------

def embed_complex_line(A: Optional[Sequence], B: Sequence) -> Flat:
    """The complex line ``w = A z + B`` in ``C^2 = R^4`` as a real 2-flat.

    ``A = a + bi`` and ``B = c + di`` are given as pairs.  ``A=None`` encodes the
    vertical line ``z = B``.
    """
    c, d = (to_scalar(v) for v in B)
    if A is None:
        return Flat((c, d, Fraction(0), Fraction(0)),
                    ((0, 0, 1, 0), (0, 0, 0, 1)), kind="complex_line")
    a, b = (to_scalar(v) for v in A)
    return Flat((Fraction(0), Fraction(0), c, d), ((1, 0, a, b), (0, 1, -b, a)), kind="complex_line")


def embed_complex_point(z: Sequence, w: Sequence) -> PointD:
    return make_point([z[0], z[1], w[0], w[1]])


def quaternion_mul(p: Sequence, q: Sequence) -> Tuple[Fraction, ...]:
    """Hamilton product of quaternions given as ``(real, i, j, k)``."""
    a1, b1, c1, d1 = (to_scalar(v) for v in p)
    a2, b2, c2, d2 = (to_scalar(v) for v in q)
    return (
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


QUATERNION_UNITS = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))


def embed_quaternion_line(a: Sequence, b: Sequence, c: Sequence, d: Sequence) -> Flat:
    """``{(a, b) + t (c, d) : t in H}`` in ``H^2 = R^8`` as a real 4-flat."""
    c = make_point(c)
    d = make_point(d)
    if not any(c) and not any(d):
        raise ValueError("(c, d) must not be (0, 0)")
    base = make_point(list(a) + list(b))
    dirs = tuple(quaternion_mul(t, c) + quaternion_mul(t, d) for t in QUATERNION_UNITS)
    return Flat(base, dirs, kind="quaternion_line")


def complex_unit_circle(z0: Sequence, w0: Sequence) -> Variety:
    """``{(z, w) : (z - z0)^2 + (w - w0)^2 = 1}`` in ``R^4``: real and imaginary parts."""
    a1, a2 = (to_scalar(v) for v in z0)
    b1, b2 = (to_scalar(v) for v in w0)
    x = [MultiPoly.var(i, 4) for i in range(4)]
    u1, u2, v1, v2 = x[0] - a1, x[1] - a2, x[2] - b1, x[3] - b2
    re = u1 * u1 - u2 * u2 + v1 * v1 - v2 * v2 - 1
    im = 2 * u1 * u2 + 2 * v1 * v2
    return Variety(4, (re, im), 2, 4, kind="unit_circle", center=(a1, a2, b1, b2))


def real_unit_circle(center: Sequence) -> Variety:
    """The circle of radius 1 about ``center`` in ``R^2``."""
    cx, cy = (to_scalar(v) for v in center)
    x, y = MultiPoly.var(0, 2) - cx, MultiPoly.var(1, 2) - cy
    return Variety(2, (x * x + y * y - 1,), 1, 2, kind="unit_circle", center=(cx, cy))


def line_through(p: Sequence, q: Sequence) -> Flat:
    p, q = make_point(p), make_point(q)
    return Flat(p, (tuple(b - a for a, b in zip(p, q)),))
