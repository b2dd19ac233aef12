"""Bound verification, constant search, exponent fits, regimes and generic projection."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .algebra import linalg
from .incidence.config import Config, IncidenceSet
from .incidence.counting import incidences_bruteforce
from .varieties import Flat

PRECISION = 60
A_DIGITS = 50
BELOW, INSIDE, ABOVE = "below", "inside", "above"

_FLOOR = Context(prec=PRECISION, rounding=ROUND_FLOOR)
_CEIL = Context(prec=A_DIGITS, rounding=ROUND_CEILING)


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        # floats are read through their shortest repr, so 0.05 means 1/20
        return Fraction(repr(x))
    return Fraction(x)


def _dec(x: Fraction, ctx: Context) -> Decimal:
    return ctx.divide(Decimal(x.numerator), Decimal(x.denominator))


def _power_floor(base: int, exponent: Fraction) -> Decimal:
    """A lower bound on ``base ** exponent`` accurate to about ``PRECISION`` digits."""
    if base == 0:
        return Decimal(0) if exponent > 0 else Decimal(1)
    # ln and exp are correctly rounded; two extra guard digits absorb the rest,
    # then a relative 10^-(PRECISION-5) is shaved off to stay one-sided
    work = Context(prec=PRECISION + 10)
    val = work.exp(work.multiply(work.ln(Decimal(base)), _dec(exponent, work)))
    return _FLOOR.multiply(val, _FLOOR.subtract(Decimal(1), Decimal(10) ** -(PRECISION - 5)))


@dataclass
class BoundReport:
    """How a single configuration sits against ``|I| <= A |P|^(2/3+e) |L|^(2/3) + 3/2 (|P| + |L|)``.

    ``rhs_main`` is rounded down and ``minimal_A`` up, so ``holds(minimal_A)``
    is a certified statement.
    """
    config_id: str
    n_points: int
    n_objects: int
    incidences: int
    epsilon: Fraction
    rhs_main: Decimal
    rhs_linear: Fraction
    minimal_A: Decimal
    regime: str
    k: int = 1
    C0: int = 1
    family: str = ""
    params: dict = field(default_factory=dict)

    def holds(self, A) -> bool:
        A = Decimal(str(A)) if not isinstance(A, Decimal) else A
        ctx = Context(prec=PRECISION + 10)
        rhs = ctx.add(ctx.multiply(A, self.rhs_main), _dec(self.rhs_linear, ctx))
        return Decimal(self.incidences) <= rhs

    def row(self) -> dict:
        return {
            "family": self.family,
            "params": json.dumps(self.params, sort_keys=True, separators=(",", ":")),
            "n_points": self.n_points,
            "n_objects": self.n_objects,
            "incidences": self.incidences,
            "epsilon": str(self.epsilon),
            "rhs_main": format_decimal(self.rhs_main, 9, ROUND_FLOOR),
            "rhs_linear": str(self.rhs_linear),
            "minimal_A": format_decimal(self.minimal_A, 9, ROUND_CEILING),
            "regime": self.regime,
        }


REPORT_COLUMNS = ("family", "params", "n_points", "n_objects", "incidences", "epsilon",
                  "rhs_main", "rhs_linear", "minimal_A", "regime")


def format_decimal(x: Decimal, places: int, rounding) -> str:
    if x == 0:
        return "0"
    return format(x.quantize(Decimal(1).scaleb(-places), rounding=rounding), "f")


def config_id(cfg: Config) -> str:
    spec = cfg.metadata.get("spec")
    if spec:
        return json.dumps(spec, sort_keys=True, separators=(",", ":"))
    return f"{cfg.metadata.get('family', 'config')}:{cfg.n_points}x{cfg.n_objects}"


def bound_report(cfg: Config, inc: IncidenceSet, epsilon=0, C2=1) -> BoundReport:
    """The least ``A`` for which the incidence bound holds on this configuration."""
    eps = _as_fraction(epsilon)
    P, L, I = cfg.n_points, cfg.n_objects, inc.size
    main = _FLOOR.multiply(_power_floor(P, Fraction(2, 3) + eps), _power_floor(L, Fraction(2, 3)))
    linear = Fraction(3, 2) * (P + L)
    excess = I - linear
    if excess <= 0:
        A = Decimal(0)
    elif main == 0:
        raise ValueError("positive excess over the linear term with an empty main term")
    else:
        A = _CEIL.divide(_dec(excess, Context(prec=PRECISION + 10)), main)
    meta = cfg.metadata or {}
    spec = meta.get("spec") or {}
    return BoundReport(
        config_id=config_id(cfg), n_points=P, n_objects=L, incidences=I, epsilon=eps,
        rhs_main=main, rhs_linear=linear, minimal_A=A, regime=regime_check((P, L), C2),
        k=cfg.k, C0=cfg.C0, family=str(meta.get("family", "")),
        params=dict(spec.get("params", meta.get("params", {})) or {}))


def family_constant(reports: Sequence[BoundReport]) -> Decimal:
    """``A*``: the largest ``minimal_A`` over a family sharing ``(k, epsilon, C0)``."""
    if not reports:
        raise ValueError("family_constant needs at least one report")
    keys = {(r.k, r.epsilon, r.C0) for r in reports}
    if len({e for _, e, _ in keys}) > 1:
        raise ValueError("reports mix different epsilon values")
    if len(keys) > 1:
        raise ValueError("reports mix different k or C0 values")
    return max(r.minimal_A for r in reports)


@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    residual: float      # root mean square of the residuals
    max_residual: float

    def to_json(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "residual": self.residual, "max_residual": self.max_residual}


def fit_exponent(points: Sequence[Tuple[float, float]]) -> Fit:
    """Least-squares line through ``(x, y)`` pairs (usually logarithms)."""
    if len(points) < 3:
        raise ValueError("need at least 3 points to fit an exponent")
    xy = np.asarray(points, dtype=float)
    X = np.column_stack([xy[:, 0], np.ones(len(xy))])
    coef, *_ = np.linalg.lstsq(X, xy[:, 1], rcond=None)
    res = xy[:, 1] - X @ coef
    return Fit(float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(res ** 2))), float(np.abs(res).max()))


def balanced_fit_points(counts: Iterable[Tuple[int, int, int]]) -> List[Tuple[float, float]]:
    """``(log(|P|^(2/3) |L|^(2/3)), log |I|)`` for each ``(|P|, |L|, |I|)``."""
    out = []
    for P, L, I in counts:
        if P <= 0 or L <= 0 or I <= 0:
            raise ValueError("log-log fit needs positive counts")
        out.append((float((2.0 / 3.0) * (np.log(P) + np.log(L))), float(np.log(I))))
    return out


def loglog_table(points: Sequence[Tuple[float, float]]) -> str:
    return "".join(f"{float(x)!r} {float(y)!r}\n" for x, y in points)


def regime_check(cfg_or_counts: Union[Config, Tuple[int, int]], C2=1) -> str:
    """Place ``|L|`` against ``C2 |P|^(1/2) <= |L| <= |P|^2 / C2`` by exact comparisons."""
    C2 = _as_fraction(C2)
    if C2 < 1:
        raise ValueError("C2 must be at least 1")
    if isinstance(cfg_or_counts, Config):
        P, L = cfg_or_counts.n_points, cfg_or_counts.n_objects
    else:
        P, L = cfg_or_counts
    if C2 * C2 * P > L * L:
        return BELOW
    if L * C2 > P * P:
        return ABOVE
    return INSIDE


def write_report_csv(reports: Sequence[BoundReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


# --- generic projection -------------------------------------------------------

class NonGenericProjection(RuntimeError):
    pass


def _project_point(M: Sequence[Sequence[int]], p: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    return tuple(linalg.matvec(M, p))


def _try_projection(cfg: Config, M, original: IncidenceSet) -> Optional[Tuple[Config, str]]:
    pts = [_project_point(M, p) for p in cfg.points]
    if len(set(pts)) != len(pts):
        return None, "point map not injective"
    flats = []
    for o in cfg.objects:
        dirs = [_project_point(M, v) for v in o.directions]
        if linalg.rank(dirs) != len(dirs):
            return None, "an image flat lost dimension"
        flats.append(Flat(_project_point(M, o.base), dirs))
    distinct_before = len({o.canonical for o in cfg.objects})
    if len({f.canonical for f in flats}) != distinct_before:
        return None, "object map not injective"
    image = Config(len(M), cfg.k, pts, flats, C0=cfg.C0, metadata=dict(cfg.metadata))
    after = incidences_bruteforce(image)
    if after != original:
        return None, "projection created new incidences"
    return image, ""


def generic_project(cfg: Config, target: Optional[int] = None, seed: int = 0,
                    retries: int = 8, bound: int = 4) -> Config:
    """Map a flat configuration into ``R^target`` (default ``2k``) keeping its incidence structure.

    Draws seeded integer matrices with entries in ``[-bound, bound]``.  A draw
    is accepted only when, checked exactly, it is injective on points and on
    objects, keeps every flat ``k``-dimensional and yields the same incidence
    pairs.  The accepted draw and the number of attempts go into metadata.
    """
    target = 2 * cfg.k if target is None else target
    if cfg.d <= target:
        raise ValueError(f"d must exceed 2k (d={cfg.d}, target={target})")
    if target < 2 * cfg.k:
        raise ValueError(f"target {target} is below 2k = {2 * cfg.k}")
    if not cfg.all_flats():
        raise ValueError("generic projection needs flat objects")
    original = incidences_bruteforce(cfg)
    reasons = []
    for attempt in range(retries):
        rng = np.random.default_rng([seed, attempt])
        M = [[Fraction(int(x)) for x in row] for row in rng.integers(-bound, bound + 1, size=(target, cfg.d))]
        image, why = _try_projection(cfg, M, original)
        if image is not None:
            image.metadata["projection"] = {
                "seed": seed, "draws": attempt + 1,
                "matrix": [[int(x) for x in row] for row in M], "from_dim": cfg.d}
            return image
        reasons.append(why)
    raise NonGenericProjection(f"non-generic after {retries} draws ({'; '.join(reasons)})")
