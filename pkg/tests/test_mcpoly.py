import random

from trainpoly.fixtures import random_periodic_point, random_train_track_map, rose
from trainpoly.graphcore import PeriodicPoint, subdivide_at_invariant_set
from trainpoly.laurent import LaurentPoly, eval_positive
from trainpoly.marking import mark
from trainpoly.mcpoly import (check_subdivision, mcmullen_cycle, mcmullen_det, same_up_to_units,
                              to_coordinates)
from trainpoly.twisted import build_labels, evaluate_at_one, subdivision_factor

from oracles import charpoly_coeffs, permutation_determinant


def x_minus(A, b):
    m = len(A)
    x = LaurentPoly.variable(b - 1, b)
    return [[(x if i == j else LaurentPoly.zero(b)) - A[i][j] for j in range(m)] for i in range(m)]


def test_det_against_leibniz(running):
    L = running.L
    assert mcmullen_det(L) == permutation_determinant(x_minus(L.matrix(), L.b))


def test_value_at_one_is_charpoly():
    rng = random.Random(47)
    for _ in range(20):
        L = build_labels(mark(random_train_track_map(rng, max_edges=6)))
        p = mcmullen_det(L)
        # set every H_0 variable to 1: the integer characteristic polynomial
        uni = p.map_exponents(lambda e: (e[-1],))
        coeffs = charpoly_coeffs(evaluate_at_one(L))
        deg = len(coeffs) - 1
        assert uni == LaurentPoly({(deg - k,): c for k, c in enumerate(coeffs) if c}, 1)


def test_running_value_at_one(running):
    # one term with coefficient 1, seven with -1
    m = mcmullen_det(running.L, running.coords)
    assert eval_positive(m, (1, 1)) == -6


def test_cycle_route_on_rose():
    L = build_labels(mark(rose({"a": "ab", "b": "a"})))
    assert mcmullen_det(L) == mcmullen_cycle(L)


def test_same_up_to_units():
    p = LaurentPoly({(1, 2): 1, (0, 0): -1}, 2)
    assert same_up_to_units(p, -p.shift((3, -1)))
    assert not same_up_to_units(p, p + 1)


def test_to_coordinates_inverts(running):
    p = mcmullen_det(running.L, running.coords)
    back = p.map_exponents(running.coords.point_to_internal)
    assert back == mcmullen_det(running.L)
    assert to_coordinates(back, running.coords) == p


def test_subdivision_period_two_rose():
    g = rose({"a": "aba", "b": "bab"})
    m = mark(g)
    L = build_labels(m)
    g2, orbit = subdivide_at_invariant_set(g, [PeriodicPoint.resolve(g, "a", 2, 2)])
    assert check_subdivision(m, L, g2, orbit, subdivision_factor(L, orbit)).ok


def test_subdivision_orientation_reversed_points():
    rng = random.Random(53)
    reversed_seen = 0
    tried = 0
    while reversed_seen < 5 and tried < 400:
        tried += 1
        g = random_train_track_map(rng, max_edges=5)
        pt = random_periodic_point(rng, g)
        if pt is None:
            continue
        g2, orbit = subdivide_at_invariant_set(g, [pt])
        if all(p.sign > 0 for p in orbit.points):
            continue
        reversed_seen += 1
        m = mark(g)
        L = build_labels(m)
        assert check_subdivision(m, L, g2, orbit, subdivision_factor(L, orbit)).ok
    assert reversed_seen == 5


def test_wrong_factor_is_detected(running):
    g2, orbit = subdivide_at_invariant_set(running.g, [PeriodicPoint("d", (3,))])
    B = subdivision_factor(running.L, orbit)
    bad = [[B[0][0] * LaurentPoly.variable(0, 2)]]
    res = check_subdivision(running.m, running.L, g2, orbit, bad, raise_on_failure=False)
    assert not res.ok
