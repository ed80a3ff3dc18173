"""Open rational polyhedral cones of cohomology classes.

A cone is ``{u : <n, u> > 0 for every stored n}``.  Implication between
strict systems is decided with Farkas' lemma: on a nonempty open cone
``{N u > 0}`` the inequality ``<n, u> > 0`` holds everywhere exactly when
``n`` is a nonnegative combination of the rows of N.  The witness system
``N u >= 1, <n, u> <= 0`` is feasible precisely when it does not.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

from .exact_lp import fm_solve, simplex_solve
from .laurent import LaurentPoly

Covector = tuple[int, ...]

FM_MAX_DIM = 4


class ConeError(ValueError):
    pass


def primitive(v: Sequence) -> Covector:
    """Smallest positive multiple with coprime integer entries."""
    fr = [Fraction(x) for x in v]
    den = reduce(lcm, (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = reduce(gcd, (abs(x) for x in ints), 0)
    return tuple(x // g for x in ints) if g else tuple(ints)


@dataclass(frozen=True)
class OpenCone:
    dim: int
    inequalities: tuple[Covector, ...]
    names: tuple[str, ...] = ()
    redundant: tuple[Covector, ...] = field(default=())   # flagged, kept for membership

    @classmethod
    def from_inequalities(cls, dim: int, ineqs, names: Sequence[str] = ()) -> "OpenCone":
        out = set()
        for n in ineqs:
            if len(n) != dim:
                raise ConeError(f"inequality {tuple(n)} has wrong length for dimension {dim}")
            # a zero row is kept: it makes the cone empty, which callers should see
            out.add(primitive(n))
        return cls(dim, tuple(sorted(out)), tuple(names))

    def is_minimal(self) -> bool:
        return not self.redundant and len(minimal(self).inequalities) == len(self.inequalities)

    def rays_2d(self) -> list[Covector]:
        """Boundary rays of a planar cone (closure extreme rays)."""
        if self.dim != 2:
            raise ConeError("rays are only reported for planar cones")
        ineqs = minimal(self).inequalities
        rays = set()
        for n in ineqs:
            for d in ((-n[1], n[0]), (n[1], -n[0])):
                if all(m[0] * d[0] + m[1] * d[1] >= 0 for m in ineqs):
                    rays.add(primitive(d))
        return sorted(rays)

    def to_dict(self) -> dict:
        mini = minimal(self)
        out = {"coordinates": list(self.names), "inequalities": [list(n) for n in mini.inequalities],
               "strict": True, "minimal": True,
               "redundant": [list(n) for n in self.inequalities if n not in mini.inequalities]}
        if self.dim == 2:
            out["rays"] = [list(r) for r in self.rays_2d()]
        return out


def mcmullen_cone(p: LaurentPoly, names: Sequence[str] = ()) -> OpenCone:
    """Dual cone of the top-stable-degree vertex of the Newton support."""
    if p.is_zero():
        raise ConeError("zero polynomial")
    terms = list(p.terms)
    top = max(k[-1] for k in terms)
    tops = [k for k in terms if k[-1] == top]
    if len(tops) != 1:
        raise ConeError(f"no unique top term: {tops}")
    j0 = tops[0]
    diffs = [tuple(a - b for a, b in zip(j0, j)) for j in terms if j != j0]
    return OpenCone.from_inequalities(p.nvars, diffs, names)


def fried_cone(classes: Sequence[Sequence[int]], dim: int | None = None,
               names: Sequence[str] = ()) -> OpenCone:
    """Classes positive on every given orbit class."""
    if dim is None:
        if not classes:
            raise ConeError("dimension required for an empty class list")
        dim = len(classes[0])
    return OpenCone.from_inequalities(dim, classes, names)


def contains(c: OpenCone, u: Sequence) -> bool:
    if len(u) != c.dim:
        raise ConeError(f"covector of length {len(u)} for a cone of dimension {c.dim}")
    u = [Fraction(v) for v in u]
    return all(sum(a * b for a, b in zip(n, u)) > 0 for n in c.inequalities)


# --------------------------------------------------------------------------
# implication

@dataclass(frozen=True)
class Implication:
    inequality: Covector
    implied: bool
    multipliers: tuple[Fraction, ...] | None = None   # n = sum mu_i N_i
    witness: Covector | None = None                     # inside the cone, n.u <= 0


def _solver(route: str, dim: int):
    if route == "auto":
        route = "fm" if dim <= FM_MAX_DIM else "simplex"
    if route == "fm":
        return fm_solve
    if route == "simplex":
        return simplex_solve
    raise ValueError(f"unknown route {route!r}")


def interior_point(c: OpenCone, route: str = "auto") -> Covector | None:
    """An integral point of the cone, or None when empty."""
    rows = [([-x for x in n], -1) for n in c.inequalities]
    ok, pt = _solver(route, c.dim)(rows, c.dim)
    if not ok:
        return None
    return primitive(pt)


def implies(N: Sequence[Covector], n: Covector, dim: int, route: str = "auto") -> Implication:
    """Does ``N u > 0`` force ``n.u > 0``?  Assumes ``{N u > 0}`` nonempty."""
    rows = [([-x for x in r], -1) for r in N] + [(list(n), 0)]
    ok, data = _solver(route, dim)(rows, dim)
    if ok:
        return Implication(tuple(n), False, witness=primitive(data) if any(data) else tuple(data))
    lam0 = data[-1]
    if lam0 == 0:
        raise ConeError("cone is empty")
    return Implication(tuple(n), True, multipliers=tuple(x / lam0 for x in data[:-1]))


def _require_nonempty(c: OpenCone, route: str) -> None:
    if interior_point(c, route) is None:
        raise ConeError("empty cone input")


def minimal(c: OpenCone, route: str = "auto") -> OpenCone:
    """Drop inequalities implied by the remaining ones."""
    _require_nonempty(c, route)
    keep = list(c.inequalities)
    i = 0
    while i < len(keep):
        others = keep[:i] + keep[i + 1:]
        if implies(others, keep[i], c.dim, route).implied:
            keep.pop(i)
        else:
            i += 1
    return OpenCone(c.dim, tuple(keep), c.names)


def with_redundancy(c: OpenCone, route: str = "auto") -> OpenCone:
    """Same cone, with implied inequalities flagged."""
    mini = minimal(c, route)
    return OpenCone(c.dim, c.inequalities, c.names,
                    tuple(n for n in c.inequalities if n not in mini.inequalities))


@dataclass(frozen=True)
class ConeComparison:
    equal: bool
    first_in_second: tuple[Implication, ...]   # each inequality of c2 checked on c1
    second_in_first: tuple[Implication, ...]

    def witness(self) -> Covector | None:
        for imp in self.first_in_second + self.second_in_first:
            if not imp.implied:
                return imp.witness
        return None


def cones_equal(c1: OpenCone, c2: OpenCone, route: str = "auto") -> ConeComparison:
    if c1.dim != c2.dim:
        raise ConeError(f"dimension mismatch: {c1.dim} vs {c2.dim}")
    _require_nonempty(c1, route)
    _require_nonempty(c2, route)
    a = tuple(implies(c1.inequalities, n, c1.dim, route) for n in c2.inequalities)
    b = tuple(implies(c2.inequalities, n, c1.dim, route) for n in c1.inequalities)
    return ConeComparison(all(x.implied for x in a + b), a, b)
