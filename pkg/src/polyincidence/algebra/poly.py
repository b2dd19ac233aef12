"""Sparse multivariate polynomials with rational coefficients."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, lcm
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

from .scalar import format_scalar, to_scalar

Exponent = Tuple[int, ...]


def graded_lex_key(e: Exponent):
    """Sort key: total degree ascending, then lexicographically descending.

    For two variables of degree 2 this yields ``x1^2, x1*x2, x2^2``.
    """
    return (sum(e), tuple(-a for a in e))


def monomials(nvars: int, max_degree: int, min_degree: int = 0) -> List[Exponent]:
    """All exponent vectors with ``min_degree <= |e| <= max_degree`` in graded-lex order."""
    out: List[Exponent] = []
    for deg in range(min_degree, max_degree + 1):
        block = []
        for combo in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            block.append(tuple(e))
        block.sort(reverse=True)
        out.extend(block)
    return out


def veronese_dimension(d: int, D: int) -> int:
    """Number of non-constant monomials of degree at most ``D`` in ``d`` variables."""
    return comb(D + d, d) - 1


class MultiPoly:
    """Immutable sparse polynomial in ``nvars`` variables.

    ``terms`` maps exponent tuples to nonzero Fractions.  Arithmetic returns
    new objects; the zero polynomial has no terms.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = nvars
        clean: Dict[Exponent, Fraction] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(a) for a in e)
                if len(e) != nvars or any(a < 0 for a in e):
                    raise ValueError(f"bad exponent {e} for {nvars} variables")
                c = to_scalar(c) if not isinstance(c, Fraction) else c
                if c:
                    clean[e] = clean.get(e, Fraction(0)) + c
                    if not clean[e]:
                        del clean[e]
        self._terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def constant(cls, nvars: int, c) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int, nvars: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs: Sequence, const=0) -> "MultiPoly":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        terms[(0,) * n] = const
        return cls(n, terms)

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Exponent, Fraction]) -> "MultiPoly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Exponent, Fraction]]:
        return iter(self._terms.items())

    def sorted_terms(self) -> List[Tuple[Exponent, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: graded_lex_key(t[0]))

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def coeff(self, e: Exponent) -> Fraction:
        return self._terms.get(tuple(e), Fraction(0))

    # arithmetic
    def _check(self, other: "MultiPoly"):
        if other.nvars != self.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(self.nvars, other)

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            c = to_scalar(other)
            if not c:
                return MultiPoly(self.nvars)
            return MultiPoly._raw(self.nvars, {e: v * c for e, v in self._terms.items()})
        self._check(other)
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in reversed(self.sorted_terms()):
            mono = "*".join(
                f"x{i + 1}" if a == 1 else f"x{i + 1}^{a}" for i, a in enumerate(e) if a
            )
            if not mono:
                parts.append(format_scalar(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{format_scalar(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # evaluation and calculus
    def __call__(self, x: Sequence) -> Fraction:
        return poly_eval(self, x)

    def diff(self, i: int) -> "MultiPoly":
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return MultiPoly._raw(self.nvars, out)

    def gradient(self) -> List["MultiPoly"]:
        return [self.diff(i) for i in range(self.nvars)]

    def homogeneous_part(self, deg: int) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, {e: c for e, c in self._terms.items() if sum(e) == deg})

    def compose_affine(self, base: Sequence, directions: Sequence[Sequence]) -> "MultiPoly":
        """Substitute ``x = base + sum_j t_j * directions[j]``; result is in ``len(directions)`` variables."""
        k = len(directions)
        if len(base) != self.nvars or any(len(d) != self.nvars for d in directions):
            raise ValueError("affine map does not match the polynomial's variable count")
        linear_forms = []
        for i in range(self.nvars):
            linear_forms.append(
                MultiPoly.linear([Fraction(d[i]) for d in directions], Fraction(base[i]))
                if k else MultiPoly.constant(0, Fraction(base[i]))
            )
        powers: Dict[Tuple[int, int], MultiPoly] = {}

        def power(i: int, a: int) -> MultiPoly:
            key = (i, a)
            if key not in powers:
                powers[key] = MultiPoly.constant(k, 1) if a == 0 else power(i, a - 1) * linear_forms[i]
            return powers[key]

        out = MultiPoly(k)
        for e, c in self._terms.items():
            term = MultiPoly.constant(k, c)
            for i, a in enumerate(e):
                if a:
                    term = term * power(i, a)
            out = out + term
        return out

    # integer forms for fast exact sign evaluation
    def integer_coefficients(self) -> Tuple[Dict[Exponent, int], int]:
        """``(C, L)`` with ``self == C / L`` and integer ``C``."""
        den = 1
        for c in self._terms.values():
            den = lcm(den, c.denominator)
        return {e: int(c * den) for e, c in self._terms.items()}, den

    # serialization
    def to_json(self) -> List[dict]:
        return [{"exponents": list(e), "coeff": format_scalar(c)} for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, nvars: int, records: Iterable[Mapping]) -> "MultiPoly":
        terms: Dict[Exponent, Fraction] = {}
        for r in records:
            e = tuple(int(a) for a in r["exponents"])
            if len(e) != nvars:
                raise ValueError(f"exponent vector {e} does not have {nvars} entries")
            terms[e] = terms.get(e, Fraction(0)) + to_scalar(r["coeff"])
        return cls(nvars, terms)


def poly_eval(p: MultiPoly, x: Sequence) -> Fraction:
    """Exact value of ``p`` at ``x``."""
    if len(x) != p.nvars:
        raise ValueError(f"point has {len(x)} coordinates, polynomial has {p.nvars} variables")
    xs = [Fraction(v) for v in x]
    cache: Dict[Tuple[int, int], Fraction] = {}
    total = Fraction(0)
    for e, c in p.items():
        term = c
        for i, a in enumerate(e):
            if a:
                key = (i, a)
                v = cache.get(key)
                if v is None:
                    v = xs[i] ** a
                    cache[key] = v
                term *= v
        total += term
    return total


def poly_gradient(p: MultiPoly) -> List[MultiPoly]:
    return p.gradient()


def veronese_lift(x: Sequence, D: int) -> Tuple[Fraction, ...]:
    """All monomials of total degree 1..D at ``x``, graded-lex order."""
    if D < 1:
        raise ValueError("D must be at least 1")
    xs = [Fraction(v) for v in x]
    out = []
    for e in monomials(len(xs), D, 1):
        v = Fraction(1)
        for xi, a in zip(xs, e):
            if a:
                v *= xi ** a
        out.append(v)
    return tuple(out)


def hyperplane_pullback(w: Sequence, c, d: int, D: int) -> MultiPoly:
    """Polynomial ``x -> w . veronese_lift(x, D) + c``."""
    mons = monomials(d, D, 1)
    if len(w) != len(mons):
        raise ValueError(f"expected {len(mons)} hyperplane coefficients, got {len(w)}")
    terms = {e: wi for e, wi in zip(mons, w)}
    terms[(0,) * d] = c
    return MultiPoly(d, terms)
