"""Exact rational linear feasibility.

Two independent engines: Fourier-Motzkin elimination with multiplier
tracking (small dimension) and a phase-one simplex using Bland's rule.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Vector = list[Fraction]


def _frac(v) -> Vector:
    return [Fraction(x) for x in v]


# --------------------------------------------------------------------------
# Fourier-Motzkin

def fm_solve(rows: Sequence[tuple[Sequence, object]], dim: int
             ) -> tuple[bool, Vector]:
    """Decide ``{u : a.u <= beta for (a, beta) in rows}``.

    Returns ``(True, point)`` when feasible.  Otherwise ``(False, lam)`` with
    ``lam >= 0``, ``sum lam_k a_k = 0`` and ``sum lam_k beta_k < 0``.
    """
    k = len(rows)
    # each row: (coefficients, bound, multipliers over the original rows)
    cur = [(_frac(a), Fraction(beta), [Fraction(int(i == j)) for j in range(k)])
           for i, (a, beta) in enumerate(rows)]
    stages = []
    for var in range(dim):
        stages.append(cur)
        pos = [r for r in cur if r[0][var] > 0]
        neg = [r for r in cur if r[0][var] < 0]
        nxt = [r for r in cur if r[0][var] == 0]
        for ap, bp, lp in pos:
            for an, bn, ln in neg:
                cp, cn = -an[var], ap[var]
                a = [cp * x + cn * y for x, y in zip(ap, an)]
                beta = cp * bp + cn * bn
                lam = [cp * x + cn * y for x, y in zip(lp, ln)]
                nxt.append((a, beta, lam))
        cur = _dedupe(nxt)
    for a, beta, lam in cur:
        if beta < 0:
            return False, lam
    point = [Fraction(0)] * dim
    for var in reversed(range(dim)):
        lo, hi = None, None
        for a, beta, _ in stages[var]:
            c = a[var]
            if c == 0:
                continue
            rest = beta - sum(a[j] * point[j] for j in range(var + 1, dim))
            bound = rest / c
            if c > 0:
                hi = bound if hi is None else min(hi, bound)
            else:
                lo = bound if lo is None else max(lo, bound)
        if lo is not None and hi is not None:
            point[var] = (lo + hi) / 2
        elif lo is not None:
            point[var] = lo
        elif hi is not None:
            point[var] = hi
    return True, point


def _dedupe(rows):
    seen = {}
    for a, beta, lam in rows:
        scale = next((abs(x) for x in a if x), abs(beta) or Fraction(1))
        key = (tuple(x / scale for x in a), beta / scale)
        if key not in seen:
            seen[key] = (a, beta, lam)
    return list(seen.values())


# --------------------------------------------------------------------------
# simplex

def nonneg_solution(A: Sequence[Sequence], b: Sequence) -> Vector | None:
    """Some ``x >= 0`` with ``A x = b``, or None.  Phase-one simplex, Bland's rule."""
    m = len(A)
    n = len(A[0]) if m else 0
    T = []
    for i in range(m):
        row = _frac(A[i])
        rhs = Fraction(b[i])
        if rhs < 0:
            row, rhs = [-x for x in row], -rhs
        T.append(row + [Fraction(int(k == i)) for k in range(m)] + [rhs])
    width = n + m
    obj = [-sum((T[i][j] for i in range(m)), Fraction(0)) if j < n else Fraction(0)
           for j in range(width)] + [-sum((T[i][-1] for i in range(m)), Fraction(0))]
    basis = [n + i for i in range(m)]
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or (ratio, basis[i]) < (best[0], basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded cannot happen in phase one
            raise ArithmeticError("phase-one objective unbounded")
        r = best[1]
        piv = T[r][enter]
        T[r] = [v / piv for v in T[r]]
        for i in range(m):
            if i != r and T[i][enter]:
                f = T[i][enter]
                T[i] = [x - f * y for x, y in zip(T[i], T[r])]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, T[r])]
        basis[r] = enter
    if obj[-1] != 0:
        return None
    x = [Fraction(0)] * n
    for i, v in enumerate(basis):
        if v < n:
            x[v] = T[i][-1]
    return x


def simplex_solve(rows: Sequence[tuple[Sequence, object]], dim: int) -> tuple[bool, Vector]:
    """Same contract as :func:`fm_solve`, via two phase-one problems."""
    k = len(rows)
    # primal: a.(p - q) + s = beta with p, q, s >= 0
    A = [list(a) + [-x for x in a] + [int(j == i) for j in range(k)] for i, (a, _) in enumerate(rows)]
    x = nonneg_solution(A, [beta for _, beta in rows]) if k else []
    if x is not None:
        if not k:
            return True, [Fraction(0)] * dim
        return True, [x[j] - x[dim + j] for j in range(dim)]
    # dual: lam >= 0, sum lam a = 0, sum lam beta = -1
    D = [[rows[i][0][j] for i in range(k)] for j in range(dim)] + [[rows[i][1] for i in range(k)]]
    lam = nonneg_solution(D, [0] * dim + [-1])
    if lam is None:
        raise ArithmeticError("neither primal nor dual system is feasible")
    return False, lam
