"""Specializations, largest roots, Perron-Frobenius data and the entropy function."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .cones import OpenCone, contains, fried_cone
from .laurent import LaurentPoly, substitute_character, unit_normalize
from .marking import CoordinateSystem
from .twisted import LabeledTransitionGraph, circuits, orbit_class

DEFAULT_TOL = 1e-12
MAX_ITER = 10**6


class SpectralError(ValueError):
    pass


def specialize(p: LaurentPoly, u: Sequence[int]) -> LaurentPoly:
    """Substitute zeta^<u, h> for each monomial h, up to units."""
    if any(Fraction(v).denominator != 1 for v in u):
        raise SpectralError(f"specialization needs an integral class, got {tuple(u)}")
    return unit_normalize(substitute_character(p, [int(v) for v in u]))


# --------------------------------------------------------------------------
# univariate exact arithmetic, coefficient lists low degree first

def _coeffs(q: LaurentPoly) -> list[Fraction]:
    if q.nvars != 1:
        raise SpectralError("expected a single-variable polynomial")
    if q.is_zero():
        raise SpectralError("zero polynomial")
    lo = min(k[0] for k in q.terms)
    hi = max(k[0] for k in q.terms)
    out = [Fraction(0)] * (hi - lo + 1)
    for (e,), c in q.items():
        out[e - lo] = Fraction(c)
    return out


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a.pop()
        _trim(a)
    return a


def _deriv(p: list[Fraction]) -> list[Fraction]:
    return [i * c for i, c in enumerate(p)][1:]


def _div(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    out = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        out[shift] = f
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a.pop()
        _trim(a)
    return out


def _gcd(a, b):
    while b:
        a, b = b, _rem(a, b)
    return a


def _eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def squarefree(p: list[Fraction]) -> list[Fraction]:
    g = _gcd(p, _deriv(p))
    return _div(p, g) if len(g) > 1 else p


def sturm_sequence(p: list[Fraction]) -> list[list[Fraction]]:
    seq = [p, _deriv(p)]
    while True:
        r = _rem(seq[-2], seq[-1])
        if not r:
            return seq
        seq.append([-c for c in r])


def _variations(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(seq, lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots in (lo, hi] of a squarefree polynomial."""
    return _variations([_eval(s, lo) for s in seq]) - _variations([_eval(s, hi) for s in seq])


def largest_real_root(q: LaurentPoly, tol: float = DEFAULT_TOL) -> float:
    """Largest positive real root: exact Sturm isolation, then float bisection."""
    p = squarefree(_coeffs(q))
    if len(p) < 2:
        raise SpectralError("no positive real root")
    bound = 1 + max(abs(c / p[-1]) for c in p[:-1])
    seq = sturm_sequence(p)
    lo, hi = Fraction(0), Fraction(bound)
    if count_roots(seq, lo, hi) == 0:
        raise SpectralError("no positive real root")
    # p is squarefree, so counts over (lo, hi] stay exact even at roots
    while count_roots(seq, lo, hi) > 1:
        mid = (lo + hi) / 2
        if count_roots(seq, mid, hi) >= 1:
            lo = mid
        else:
            hi = mid
    if _eval(p, hi) == 0:
        return float(hi)
    s_hi = _eval(p, hi) > 0
    while float(hi - lo) > tol:
        mid = (lo + hi) / 2
        v = _eval(p, mid)
        if v == 0:
            return float(mid)
        if (v > 0) == s_hi:
            hi = mid
        else:
            lo = mid
    return float((lo + hi) / 2)


# --------------------------------------------------------------------------
# Perron-Frobenius

@dataclass(frozen=True)
class PFResult:
    eigenvalue: float
    vector: np.ndarray        # left Perron vector: vector @ M == eigenvalue * vector
    residual: float
    iterations: int
    log_shift: float = 0.0    # eigenvalue of the unscaled matrix is eigenvalue * exp(log_shift)

    @property
    def log_eigenvalue(self) -> float:
        return math.log(self.eigenvalue) + self.log_shift


def _arc_arrays(L: LabeledTransitionGraph):
    idx = L.node_index
    src = np.array([idx[a.source] for a in L.arcs], dtype=np.int64)
    tgt = np.array([idx[a.target] for a in L.arcs], dtype=np.int64)
    labels = np.array([a.label for a in L.arcs], dtype=np.float64).reshape(len(L.arcs), L.b - 1)
    return src, tgt, labels


def pf_matrix(M, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER) -> PFResult:
    M = np.asarray(M, dtype=np.float64)
    E, U, resid, it = _kernels.power_iteration(M, tol, max_iter)
    if it >= max_iter and resid > 10 * tol:
        raise SpectralError(f"power iteration did not converge in {max_iter} steps (residual {resid:g})")
    return PFResult(float(E), np.asarray(U), float(resid), int(it))


def _pf_log(L: LabeledTransitionGraph, logw: np.ndarray, tol: float, max_iter: int) -> PFResult:
    src, tgt, _ = _arc_arrays(L)
    M, shift = _kernels.weighted_matrix(src, tgt, np.ascontiguousarray(logw, dtype=np.float64),
                                        len(L.nodes))
    r = pf_matrix(M, tol, max_iter)
    return PFResult(r.eigenvalue, r.vector, r.residual, r.iterations, float(shift))


def pf_eigen(L: LabeledTransitionGraph, point: Sequence[float], tol: float = DEFAULT_TOL,
             max_iter: int = MAX_ITER) -> PFResult:
    """Leading eigen-data of A(t) at a strictly positive point ``t`` (internal H_0 coordinates)."""
    if len(point) != L.b - 1:
        raise SpectralError(f"point needs {L.b - 1} coordinates")
    if any(v <= 0 for v in point):
        raise SpectralError("point must be strictly positive")
    _, _, labels = _arc_arrays(L)
    logw = labels @ np.log(np.asarray(point, dtype=np.float64)) if L.b > 1 else np.zeros(len(L.arcs))
    r = _pf_log(L, logw, tol, max_iter)
    scale = math.exp(r.log_shift)
    return PFResult(r.eigenvalue * scale, r.vector, r.residual, r.iterations)


# --------------------------------------------------------------------------
# entropy

@dataclass(frozen=True)
class EntropyResult:
    value: float
    bracket: tuple[float, float]
    samples: tuple[tuple[float, float], ...]   # (q, F(q)) seen while bracketing
    multiple_sign_changes: bool
    residual: float


def _internal(u, coords: CoordinateSystem | None):
    return tuple(coords.covector_to_internal(u)) if coords is not None else tuple(u)


def orbit_cone(L: LabeledTransitionGraph, coords: CoordinateSystem | None = None) -> OpenCone:
    classes = [orbit_class(L, y)[0] for y in circuits(L)]
    if coords is not None:
        classes = [coords.point(c) for c in classes]
    return fried_cone(classes, L.b, coords.names if coords else ())


def level_function(L: LabeledTransitionGraph, u_int: Sequence, tol: float = DEFAULT_TOL):
    """F(q) = log E(A weighted by exp(q u(label))) - q u(x), and its last PF result."""
    _, _, labels = _arc_arrays(L)
    u = np.array([float(v) for v in u_int], dtype=np.float64)
    pairing = labels @ u[:-1] if L.b > 1 else np.zeros(len(L.arcs))
    ux = u[-1]

    def F(q: float):
        r = _pf_log(L, q * pairing, tol, MAX_ITER)
        return r.log_eigenvalue - q * ux, r

    return F


def entropy_details(L: LabeledTransitionGraph, u, coords: CoordinateSystem | None = None,
                    tol: float = DEFAULT_TOL, cone: OpenCone | None = None,
                    max_doublings: int = 40) -> EntropyResult:
    if cone is None:
        cone = orbit_cone(L, coords)
    if not contains(cone, u):
        raise SpectralError(f"class {tuple(u)} is outside the cone")
    F = level_function(L, _internal(u, coords), tol)
    lo = tol
    f_lo, _ = F(lo)
    samples = [(lo, f_lo)]
    hi = 1.0
    f_hi, _ = F(hi)
    samples.append((hi, f_hi))
    k = 0
    while f_hi >= 0:
        if k >= max_doublings:
            raise SpectralError(f"no sign change up to q = {hi:g}; samples {samples}")
        lo, f_lo = hi, f_hi
        hi *= 2
        k += 1
        f_hi, _ = F(hi)
        samples.append((hi, f_hi))
    # F should be positive then negative along the samples
    ordered = sorted(samples)
    flips = sum(1 for (_, a), (_, b) in zip(ordered, ordered[1:]) if (a >= 0) != (b >= 0))
    bracket = (lo, hi)
    a, b = lo, hi
    r = None
    while b - a > tol * max(1.0, b):
        mid = (a + b) / 2
        fm, r = F(mid)
        if fm > 0:
            a = mid
        else:
            b = mid
    q = (a + b) / 2
    _, r = F(q)
    return EntropyResult(q, bracket, tuple(samples), flips > 1, r.residual)


def entropy(L: LabeledTransitionGraph, u, coords: CoordinateSystem | None = None,
            tol: float = DEFAULT_TOL, cone: OpenCone | None = None) -> float:
    """The entropy function at ``u`` (output coordinates when ``coords`` is given)."""
    return entropy_details(L, u, coords, tol, cone).value


def stretch(L: LabeledTransitionGraph, u, coords: CoordinateSystem | None = None,
            tol: float = DEFAULT_TOL, cone: OpenCone | None = None) -> float:
    if any(Fraction(v).denominator != 1 for v in u):
        raise SpectralError("stretch factors are defined for integral classes")
    return math.exp(entropy(L, u, coords, tol, cone))
