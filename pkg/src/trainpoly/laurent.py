"""Multivariate Laurent polynomials with integer coefficients.

Elements of the group ring Z[H] for H free abelian of rank ``nvars``.  Terms
are kept in a dict from exponent tuples to nonzero Python ints.
"""
from __future__ import annotations

from fractions import Fraction
from math import prod
from numbers import Rational
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]


class LaurentPoly:
    __slots__ = ("_terms", "nvars")

    def __init__(self, terms: Mapping[Exponent, int] | Iterable[tuple[Exponent, int]] = (),
                 nvars: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, int] = {}
        for exp, c in items:
            exp = tuple(int(v) for v in exp)
            if nvars is None:
                nvars = len(exp)
            elif len(exp) != nvars:
                raise ValueError(f"exponent length {len(exp)} != {nvars}")
            acc[exp] = acc.get(exp, 0) + int(c)
        if nvars is None:
            raise ValueError("nvars required for the zero polynomial")
        self._terms = {k: v for k, v in acc.items() if v}
        self.nvars = nvars

    # -- constructors
    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls({}, nvars)

    @classmethod
    def constant(cls, c: int, nvars: int) -> "LaurentPoly":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def monomial(cls, exp: Sequence[int], c: int = 1) -> "LaurentPoly":
        return cls({tuple(exp): c}, len(exp))

    @classmethod
    def variable(cls, i: int, nvars: int) -> "LaurentPoly":
        exp = [0] * nvars
        exp[i] = 1
        return cls.monomial(exp)

    # -- access
    @property
    def terms(self) -> dict[Exponent, int]:
        return dict(self._terms)

    def items(self):
        """Terms in canonical (ascending lexicographic) order."""
        return sorted(self._terms.items())

    def coefficient(self, exp: Sequence[int]) -> int:
        return self._terms.get(tuple(exp), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    # -- arithmetic
    def _check(self, other: "LaurentPoly") -> None:
        if other.nvars != self.nvars:
            raise ValueError(f"exponent length mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        if isinstance(other, int):
            return LaurentPoly.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0) + v
        return LaurentPoly(acc, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self._terms.items()}, self.nvars)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[Exponent, int] = {}
        for ka, va in self._terms.items():
            for kb, vb in other._terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                acc[k] = acc.get(k, 0) + va * vb
        return LaurentPoly(acc, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials are invertible")
            (k, v), = self._terms.items()
            if v not in (1, -1):
                raise ValueError("only unit monomials are invertible")
            return LaurentPoly({tuple(x * n for x in k): v ** -n}, self.nvars)
        out = LaurentPoly.constant(1, self.nvars)
        for _ in range(n):
            out = out * self
        return out

    def shift(self, exp: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial with exponent ``exp``."""
        return LaurentPoly({tuple(a + b for a, b in zip(k, exp)): v
                            for k, v in self._terms.items()}, self.nvars)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.constant(other, self.nvars)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._terms.items())))

    def map_exponents(self, fn) -> "LaurentPoly":
        """Push exponents through a group homomorphism ``fn``."""
        out: dict[Exponent, int] = {}
        nv = None
        for k, v in self._terms.items():
            nk = tuple(fn(k))
            nv = len(nk)
            out[nk] = out.get(nk, 0) + v
        if nv is None:
            nv = len(tuple(fn((0,) * self.nvars)))
        return LaurentPoly(out, nv)

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = list(names) if names else (
            ["x"] if self.nvars == 1 else [f"t{i + 1}" for i in range(self.nvars - 1)] + ["x"])
        parts = []
        order = sorted(self._terms.items(), key=lambda kv: (kv[0][::-1]), reverse=True)
        for k, v in order:
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, k) if e)
            if not mono:
                body = str(abs(v))
            elif abs(v) == 1:
                body = mono
            else:
                body = f"{abs(v)}*{mono}"
            parts.append(("- " if v < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[1:]

    def __repr__(self) -> str:
        return f"LaurentPoly({self.format()!s})"

    # -- serialization
    def to_dict(self, names: Sequence[str]) -> dict:
        return {"variables": list(names),
                "terms": [{"exponents": list(k), "coefficient": str(v)} for k, v in self.items()]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "LaurentPoly":
        n = len(data["variables"])
        return cls(((tuple(t["exponents"]), int(t["coefficient"])) for t in data["terms"]), n)


# --------------------------------------------------------------------------

def determinant(M: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    """Exact determinant by cofactor expansion over memoized column subsets."""
    m = len(M)
    if any(len(row) != m for row in M):
        raise ValueError("matrix is not square")
    if m == 0:
        raise ValueError("empty matrix: pass nvars via determinant_or_one")
    nvars = M[0][0].nvars
    one = LaurentPoly.constant(1, nvars)
    # minors[mask] = det of rows m-popcount(mask).. with the columns in mask
    minors: dict[int, LaurentPoly] = {0: one}
    nz = [[j for j in range(m) if not M[i][j].is_zero()] for i in range(m)]
    for size in range(1, m + 1):
        row = m - size
        new: dict[int, LaurentPoly] = {}
        for mask, sub in minors.items():
            if sub.is_zero():
                continue
            for j in nz[row]:
                bit = 1 << j
                if mask & bit:
                    continue
                # sign from the position of column j among the columns of mask|bit
                pos = bin(mask & (bit - 1)).count("1")
                term = M[row][j] * sub
                if pos % 2:
                    term = -term
                key = mask | bit
                new[key] = new[key] + term if key in new else term
        minors = new
    return minors.get((1 << m) - 1, LaurentPoly.zero(nvars))


def determinant_or_one(M: Sequence[Sequence[LaurentPoly]], nvars: int) -> LaurentPoly:
    return determinant(M) if M else LaurentPoly.constant(1, nvars)


def eval_positive(p: LaurentPoly, point: Sequence) -> Fraction | float:
    """Evaluate at a strictly positive point; exact for rational input."""
    if len(point) != p.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {p.nvars}")
    if any(v <= 0 for v in point):
        raise ValueError("nonpositive coordinate")
    exact = all(isinstance(v, Rational) for v in point)
    pt = [Fraction(v) for v in point] if exact else [float(v) for v in point]
    total = Fraction(0) if exact else 0.0
    for k, c in p.items():
        total += c * prod(v ** e for v, e in zip(pt, k))
    return total


def substitute_character(p: LaurentPoly, u: Sequence[int]) -> LaurentPoly:
    """Single-variable polynomial with each term sent to zeta^<u, exponent>."""
    if len(u) != p.nvars:
        raise ValueError("covector length mismatch")
    return p.map_exponents(lambda k: (sum(a * b for a, b in zip(u, k)),))


def newton_support(p: LaurentPoly) -> set[Exponent]:
    if p.is_zero():
        raise ValueError("zero polynomial")
    return set(p.terms)


def unit_normalize(p: LaurentPoly) -> LaurentPoly:
    """Representative of p up to +-monomials: minimal exponents 0, leading coefficient positive."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    lows = [min(k[i] for k in p.terms) for i in range(p.nvars)]
    q = p.shift([-v for v in lows])
    lead = max(q.terms)
    return -q if q.coefficient(lead) < 0 else q
