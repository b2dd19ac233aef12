"""Exact arithmetic substrate: rationals, linear algebra, polynomials."""
from .scalar import PointD, Scalar, format_scalar, make_point, to_scalar
from .poly import MultiPoly, monomials, poly_eval, poly_gradient, veronese_dimension, veronese_lift
from .univariate import univariate_real_root_count

__all__ = [
    "MultiPoly",
    "PointD",
    "Scalar",
    "format_scalar",
    "make_point",
    "monomials",
    "poly_eval",
    "poly_gradient",
    "poly_restrict_to_flat",
    "to_scalar",
    "univariate_real_root_count",
    "veronese_dimension",
    "veronese_lift",
]


def poly_restrict_to_flat(p: MultiPoly, flat) -> MultiPoly:
    """``q(t) = p(base + sum t_i dir_i)`` for a :class:`~polyincidence.varieties.Flat`."""
    if p.nvars != flat.ambient_dim:
        raise ValueError(f"polynomial has {p.nvars} variables, flat lives in R^{flat.ambient_dim}")
    return p.compose_affine(flat.base, flat.directions)
