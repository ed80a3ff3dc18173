import json
import random

import pytest
from hypothesis import given, strategies as st

from trainpoly.fixtures import (random_graph_map, random_train_track_map, rose, running_example,
                                running_fixture_path, word)
from trainpoly.graphcore import (BacktrackError, GraphMapError, OrbitError, PeriodicPoint,
                                 backtracks, graph_map_from_dict, graph_map_to_dict,
                                 is_expanding, is_irreducible, is_train_track, iterate_edge,
                                 load_graph_map, make_graph_map, require_valid,
                                 subdivide_at_invariant_set, transition_matrix,
                                 validate_graph_map)

from oracles import charpoly_coeffs


def kinds(g):
    return {p.kind for p in validate_graph_map(g)}


def test_running_example_is_valid():
    g = running_example()
    assert validate_graph_map(g) == []
    assert is_irreducible(g) and is_expanding(g)
    assert is_train_track(g).ok


def test_fixture_file_matches_builder():
    assert load_graph_map(running_fixture_path()) == running_example()


def test_transition_matrix_running():
    # columns a, b, c, d; rows count crossings
    assert transition_matrix(running_example()) == [
        [0, 1, 1, 2],
        [0, 0, 1, 2],
        [0, 0, 0, 1],
        [1, 0, 0, 1],
    ]
    # det(xI - A(1)) = x^4 - x^3 - 2x^2 - 3x - 1 (the u0 specialization)
    assert charpoly_coeffs(transition_matrix(running_example())) == [1, -1, -2, -3, -1]


@pytest.mark.parametrize("mutate, kind", [
    (lambda d: d["edges"].append(dict(d["edges"][0])), "duplicate edge id"),
    (lambda d: d["edges"][0].update({"from": "Q"}), "unknown vertex"),
    (lambda d: d["vertex_images"].pop("L"), "missing vertex image"),
    (lambda d: d["edge_images"]["a"].append({"edge": "z", "sign": 1}), "dangling edge id"),
    (lambda d: d["edge_images"].update({"a": []}), "empty image"),
    (lambda d: d["edge_images"].update({"a": [{"edge": "c", "sign": 1}]}), "endpoint mismatch"),
])
def test_validation_problems(mutate, kind):
    d = graph_map_to_dict(running_example())
    mutate(d)
    g = graph_map_from_dict(d)
    assert kind in kinds(g)
    with pytest.raises(GraphMapError):
        require_valid(g)


def test_valence_one_vertex():
    g = make_graph_map(["v", "w"], [("a", "v", "v"), ("b", "v", "w")], {"v": "v", "w": "w"},
                       {"a": word("a"), "b": word("b")})
    assert "valence-1 vertex" in kinds(g)


def test_all_problems_reported_together():
    d = graph_map_to_dict(running_example())
    d["edge_images"]["a"] = []
    d["edge_images"]["b"] = [{"edge": "zz", "sign": 1}]
    assert {"empty image", "dangling edge id"} <= kinds(graph_map_from_dict(d))


def test_not_train_track_has_witness():
    g = rose({"a": "ab", "b": "bA"})
    assert validate_graph_map(g) == []
    res = is_train_track(g)
    assert not res.ok
    turn, k, degenerate = res.witness
    assert degenerate[0] == degenerate[1]
    assert k >= 0


def test_train_track_rose():
    assert is_train_track(rose({"a": "ab", "b": "a"})).ok


def test_iterate_edge_detects_backtracking():
    g = rose({"a": "ab", "b": "bA"})
    with pytest.raises(BacktrackError):
        for n in range(1, 6):
            iterate_edge(g, "a", n, expect_train_track=True)


def test_json_round_trip():
    g = running_example()
    text = json.dumps(graph_map_to_dict(g))
    assert graph_map_from_dict(json.loads(text)) == g


def test_train_track_iterates_never_backtrack():
    rng = random.Random(23)
    for _ in range(15):
        g = random_train_track_map(rng, max_edges=5)
        n_dirs = 2 * len(g.edge_ids)
        for e in g.edge_ids:
            n = 1
            # lengths grow geometrically, so stop on length rather than on 2 * #directions
            while n <= n_dirs:
                path = iterate_edge(g, e, n)
                assert backtracks(path) == []
                if len(path) > 3000:
                    break
                n += 1


@given(st.integers(0, 2**32 - 1))
def test_random_maps_validate(seed):
    g = random_graph_map(random.Random(seed))
    if g is not None:
        assert validate_graph_map(g) == []


def test_subdivide_running_fixed_point():
    g = running_example()
    g2, orbit = subdivide_at_invariant_set(g, [PeriodicPoint("d", (3,))])
    assert validate_graph_map(g2) == []
    assert len(orbit.points) == 1
    p = orbit.points[0]
    assert (p.edge, p.image, p.sign) == ("d", 0, 1)
    assert str(p.coord) == "2/5"
    assert len(orbit.pieces["d"]) == 2
    assert all(orbit.pieces[e] == (e,) for e in "abc")
    assert len(g2.graph.vertices) == 3
    assert is_train_track(g2).ok


def test_subdivide_period_two_orbit():
    g = rose({"a": "aba", "b": "bab"})
    g2, orbit = subdivide_at_invariant_set(g, [PeriodicPoint.resolve(g, "a", 2, 2)])
    assert len(orbit.points) == 2
    assert len(g2.edge_ids) == 4
    assert validate_graph_map(g2) == []


def test_subdivide_rejects_vertex_orbit():
    # the period-2 chain of a -> b, b -> ab lands on the vertex
    g = rose({"a": "b", "b": "ab"})
    with pytest.raises(OrbitError):
        subdivide_at_invariant_set(g, [PeriodicPoint.resolve(g, "a", 1, 2)])


def test_subdivide_empty_is_identity():
    g = running_example()
    g2, orbit = subdivide_at_invariant_set(g, [])
    assert g2 == g and orbit.points == ()
