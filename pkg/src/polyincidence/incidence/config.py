"""Configurations of points and objects, and incidence sets between them."""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..algebra.scalar import PointD, format_point, make_point
from ..varieties import Flat, GeomObject, Variety, object_from_json


@dataclass
class Config:
    """Points ``P`` and objects ``L`` in ``R^d``; every object has dimension ``k``.

    Points must be distinct.  Repeated objects are accepted on purpose so the
    axiom checker can report them.
    """
    d: int
    k: int
    points: List[PointD]
    objects: List[GeomObject]
    C0: int = 1
    metadata: Dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = [make_point(p) for p in self.points]
        self.objects = list(self.objects)
        if self.d < 1 or self.k < 0 or self.k > self.d:
            raise ValueError(f"need 0 <= k <= d and d >= 1, got d={self.d}, k={self.k}")
        for i, p in enumerate(self.points):
            if len(p) != self.d:
                raise ValueError(f"point {i} has {len(p)} coordinates, expected {self.d}")
        if len(set(self.points)) != len(self.points):
            seen = {}
            for i, p in enumerate(self.points):
                if p in seen:
                    raise ValueError(f"points {seen[p]} and {i} coincide")
                seen[p] = i
        for j, o in enumerate(self.objects):
            if o.ambient_dim != self.d:
                raise ValueError(f"object {j} lives in R^{o.ambient_dim}, expected R^{self.d}")
        if self.C0 < 1:
            raise ValueError("C0 must be at least 1")

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    def all_flats(self) -> bool:
        return all(isinstance(o, Flat) for o in self.objects)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "k": self.k,
            "C0": self.C0,
            "points": [format_point(p) for p in self.points],
            "objects": [o.to_json() for o in self.objects],
            "metadata": self.metadata,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, doc: dict) -> "Config":
        d = int(doc["d"])
        return cls(
            d=d,
            k=int(doc["k"]),
            points=[make_point(p) for p in doc["points"]],
            objects=[object_from_json(o, d) for o in doc["objects"]],
            C0=int(doc.get("C0", 1)),
            metadata=dict(doc.get("metadata", {})),
        )

    @classmethod
    def loads(cls, text: str) -> "Config":
        return cls.from_json(json.loads(text))


class IncidenceSet:
    """A set of (point index, object index) pairs with degree counts."""

    def __init__(self, n_points: int, n_objects: int, pairs: Iterable[Tuple[int, int]],
                 work: Optional[Dict[str, int]] = None):
        arr = np.asarray(pairs if isinstance(pairs, np.ndarray) else list(pairs), dtype=np.int64).reshape(-1, 2)
        if arr.size:
            arr = np.unique(arr, axis=0)
        if arr.size and (arr[:, 0].max() >= n_points or arr[:, 1].max() >= n_objects or arr.min() < 0):
            raise ValueError("incidence pair index out of range")
        self.n_points = n_points
        self.n_objects = n_objects
        self.array = arr
        self.work = dict(work or {})

    def __len__(self) -> int:
        return len(self.array)

    @property
    def size(self) -> int:
        return len(self.array)

    @property
    def pairs(self) -> frozenset:
        return frozenset(map(tuple, self.array.tolist()))

    def point_degrees(self) -> np.ndarray:
        return np.bincount(self.array[:, 0], minlength=self.n_points)

    def object_degrees(self) -> np.ndarray:
        return np.bincount(self.array[:, 1], minlength=self.n_objects)

    def subset(self, keep: Sequence[bool]) -> "IncidenceSet":
        mask = np.asarray(keep, dtype=bool)
        return IncidenceSet(self.n_points, self.n_objects, self.array[mask])

    def __eq__(self, other) -> bool:
        if not isinstance(other, IncidenceSet):
            return NotImplemented
        return (self.n_points, self.n_objects) == (other.n_points, other.n_objects) and np.array_equal(
            self.array, other.array)

    def __repr__(self) -> str:
        return f"IncidenceSet(|I|={self.size}, |P|={self.n_points}, |L|={self.n_objects})"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("point_index,object_index\n")
        for i, j in self.array.tolist():
            buf.write(f"{i},{j}\n")
        return buf.getvalue()
