"""The McMullen polynomial by determinant and by disjoint circuit families."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .graphcore import GraphMap, PointOrbit
from .laurent import LaurentPoly, determinant_or_one, unit_normalize
from .marking import (CohomologyClass, CoordinateSystem, MarkedAbelianization, internal_characters,
                      internal_coordinates, make_coordinates, mark, transport_class, transport_tree)
from .twisted import LabeledTransitionGraph, build_labels, circuit_label, circuits


class IdentityCheckError(AssertionError):
    pass


def _x_minus(M: Sequence[Sequence[LaurentPoly]], b: int) -> list[list[LaurentPoly]]:
    x = LaurentPoly.variable(b - 1, b)
    n = len(M)
    return [[(x if i == j else 0) - M[i][j] for j in range(n)] for i in range(n)]


def to_coordinates(p: LaurentPoly, coords: CoordinateSystem | None) -> LaurentPoly:
    if coords is None:
        return p
    return p.map_exponents(coords.point)


def mcmullen_det(L: LabeledTransitionGraph, coords: CoordinateSystem | None = None) -> LaurentPoly:
    """det(xI - A(t)), exponents in the given output coordinates."""
    p = determinant_or_one(_x_minus(L.matrix(), L.b), L.b)
    return to_coordinates(p, coords)


def mcmullen_cycle(L: LabeledTransitionGraph, coords: CoordinateSystem | None = None) -> LaurentPoly:
    """Sum over node-disjoint circuit families of (-1)^#family p_family x^(m - length)."""
    m, b = len(L.nodes), L.b
    idx = L.node_index
    # circuits with the same node set share a factor: the sum of -p_y over them
    by_mask: dict[int, LaurentPoly] = {}
    for y in circuits(L):
        mask = sum(1 << idx[n] for n in y.nodes)
        term = LaurentPoly.monomial(circuit_label(L, y) + (0,), -1)
        by_mask[mask] = by_mask[mask] + term if mask in by_mask else term
    masks = sorted(by_mask, key=lambda k: ((k & -k).bit_length(), k))
    total: dict[int, LaurentPoly] = {}

    def extend(start: int, used: int, acc: LaurentPoly) -> None:
        total[used] = total[used] + acc if used in total else acc
        for k in range(start, len(masks)):
            c = masks[k]
            if c & used:
                continue
            extend(k + 1, used | c, acc * by_mask[c])

    extend(0, 0, LaurentPoly.constant(1, b))
    out = LaurentPoly.zero(b)
    for used, poly in total.items():
        out = out + poly.shift((0,) * (b - 1) + (m - bin(used).count("1"),))
    return to_coordinates(out, coords)


def same_up_to_units(p: LaurentPoly, q: LaurentPoly) -> bool:
    if p.is_zero() or q.is_zero():
        return p == q
    return unit_normalize(p) == unit_normalize(q)


@dataclass(frozen=True)
class SubdivisionCheck:
    before: LaurentPoly       # m * det(xI - B)
    after: LaurentPoly        # polynomial of the subdivided map
    factor: LaurentPoly       # det(xI - B)
    ok: bool


def check_subdivision(m: MarkedAbelianization, L: LabeledTransitionGraph, g2: GraphMap,
                      orbit: PointOrbit, B: Sequence[Sequence[LaurentPoly]],
                      chars: Sequence[CohomologyClass] | None = None,
                      raise_on_failure: bool = True) -> SubdivisionCheck:
    """Compare the polynomial of ``g2`` against m * det(xI - B), in common coordinates."""
    chars = list(chars) if chars is not None else internal_characters(m)
    coords = make_coordinates(m, chars)
    m2 = mark(g2, root=m.root, tree=transport_tree(m, orbit.pieces), check=False)
    coords2 = make_coordinates(m2, [transport_class(u, orbit.pieces) for u in chars])
    L2 = build_labels(m2)
    factor = to_coordinates(determinant_or_one(_x_minus(B, L.b), L.b), coords)
    before = mcmullen_det(L, coords) * factor
    after = mcmullen_det(L2, coords2)
    ok = same_up_to_units(before, after)
    if not ok and raise_on_failure:
        raise IdentityCheckError(f"subdivision identity fails: {after.format(coords.names)} vs "
                                 f"{before.format(coords.names)}")
    return SubdivisionCheck(before, after, factor, ok)


__all__ = ["IdentityCheckError", "mcmullen_det", "mcmullen_cycle", "check_subdivision",
           "same_up_to_units", "to_coordinates", "internal_coordinates", "SubdivisionCheck"]
