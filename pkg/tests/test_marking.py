import random

import pytest
from hypothesis import given, strategies as st

from trainpoly.fixtures import random_train_track_map, rose, running_example
from trainpoly.marking import (ClassError, MarkingError, class_from_dict, class_on_H,
                               class_to_dict, det_int, int_inverse, internal_characters,
                               make_class, make_coordinates, mark, matmul, rebase_class,
                               smith_normal_form, spanning_tree, validate_class)

from oracles import smith_diagonal

int_matrices = st.integers(1, 4).flatmap(lambda r: st.integers(1, 4).flatmap(
    lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c),
                       min_size=r, max_size=r)))


@given(int_matrices)
def test_smith_normal_form(A):
    U, D, V = smith_normal_form(A)
    assert matmul(matmul(U, A), V) == D
    assert abs(det_int(U)) == 1 and abs(det_int(V)) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert sorted(diag) == smith_diagonal(A)


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3))
def test_int_inverse(A):
    if abs(det_int(A)) != 1:
        with pytest.raises(Exception):
            int_inverse(A)
        return
    assert matmul(A, int_inverse(A)) == [[int(i == j) for j in range(3)] for i in range(3)]


def test_running_marking(running):
    m = running.m
    assert m.b == 2 and m.torsion == ()
    assert m.cycle_edges == ("b", "c", "d")
    assert m.h1_action == [[0, -1, 0], [0, 0, 1], [-1, 0, 0]]
    assert [row[:] for row in m.pi0] == [[1, -1, -1]]
    assert m.smith[1] == [[1, 0, 0], [0, 1, 0], [0, 0, 0]]


def test_pi0_kills_coinvariant_relations(running):
    m = running.m
    n = len(m.cycle_edges)
    MI = [[m.h1_action[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    assert matmul(m.pi0, MI) == [[0] * n for _ in m.pi0]
    # the section lifts the H_0 basis
    assert matmul(m.pi0, m.pi0_section) == [[1]]


def test_random_maps_coinvariants():
    rng = random.Random(29)
    for _ in range(20):
        g = random_train_track_map(rng)
        m = mark(g)
        n = len(m.cycle_edges)
        MI = [[m.h1_action[i][j] - int(i == j) for j in range(n)] for i in range(n)]
        diag = smith_diagonal(MI)
        assert m.b - 1 == diag.count(0)
        assert sorted(m.torsion) == sorted(d for d in diag if d > 1)


def test_rank_independent_of_tree_and_root():
    g = running_example()
    ranks = {mark(g, root=r, tree=t).b for r in "LR" for t in (["a"], ["b"], ["d"])}
    assert ranks == {2}


def test_running_classes_are_invariant(running):
    for u in running.classes.values():
        assert validate_class(running.m, u) == []
    assert class_on_H(running.m, running.classes["u1"]) == (1, 2)
    assert running.coords.covector((1, 2)) == (-1, 2)
    assert running.coords.matrix == [[-1, 0], [0, 1]]


def test_non_invariant_class_rejected(running):
    bad = make_class({"b": 1}, 0, name="bad")
    assert validate_class(running.m, bad)
    with pytest.raises(ClassError):
        class_on_H(running.m, bad)


def test_class_dict_round_trip(running):
    u = running.classes["u1"]
    assert class_from_dict(class_to_dict(u)) == u


def test_marking_errors():
    g = running_example()
    with pytest.raises(MarkingError):
        mark(g, root="Z")
    with pytest.raises(MarkingError):
        mark(g, tree=["a", "b"])
    with pytest.raises(MarkingError):
        mark(g, tree=["q"])
    with pytest.raises(MarkingError):
        mark(rose({"a": "b", "b": "a"}))      # not expanding


def test_non_unimodular_characters(running):
    s, w = running.classes["s"], running.classes["w"]
    with pytest.raises(ClassError):
        make_coordinates(running.m, [s.scaled(2), w])


def test_coordinates_round_trip(running):
    c = running.coords
    for h in [(1, 0), (0, 1), (-3, 2), (5, -7)]:
        assert c.point_to_internal(c.point(h)) == h
        assert c.covector_to_internal(c.covector(h)) == h
        # pairing is preserved
        p, v = c.point(h), c.covector((2, 3))
        assert sum(a * b for a, b in zip(p, v)) == 2 * h[0] + 3 * h[1]


def test_spanning_tree_is_spanning():
    g = running_example()
    for r in "LR":
        assert len(spanning_tree(g, r)) == 1


def test_rebased_characters_stay_unimodular(running):
    m1 = running.m
    for root, tree in [("L", ["a"]), ("L", ["b"]), ("R", ["d"])]:
        m2 = mark(running.g, root=root, tree=tree)
        chars = [rebase_class(u, m1, m2) for u in internal_characters(m1)]
        T = make_coordinates(m2, chars)
        assert abs(det_int(T.matrix)) == 1
        assert T.matrix[-1][:-1] == [0] * (m2.b - 1) and T.matrix[-1][-1] == 1
        for name, u in running.classes.items():
            v = rebase_class(u, m1, m2)
            assert validate_class(m2, v) == []
            # same class, same values on H after the change of basis
            assert T.covector(class_on_H(m2, v)) == class_on_H(m1, u)
