import json

import pytest
from click.testing import CliRunner

from trainpoly.cli import main
from trainpoly.fixtures import rose, running_fixture_path
from trainpoly.graphcore import graph_map_to_dict

MAP = running_fixture_path()
CLASSES = running_fixture_path("running_classes.json")
COORDS = running_fixture_path("running_coords.json")
WITH_COORDS = [MAP, "--classes", CLASSES, "--coords", COORDS]


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args], catch_exceptions=False)


def result(*args):
    r = invoke(*args, "--json")
    assert r.exit_code == 0, r.output
    doc = json.loads(r.output)
    assert doc["schema"] == "trainpoly/1"
    return doc["result"]


def test_polynomial_text():
    r = invoke("polynomial", *WITH_COORDS)
    assert r.exit_code == 0
    assert 'text: "w^4 - s^2*w^3 - s^3*w^2 - s*w^2 - s^3*w - s^2*w - w - s"' in r.output


def test_polynomial_both_routes():
    res = result("polynomial", *WITH_COORDS, "--route", "both")
    assert res["routes_agree"]
    assert res["provenance"]["root"] == "R" and res["provenance"]["tree"] == ["a"]


def test_orbits():
    res = result("orbits", *WITH_COORDS)
    assert res["count"] == 7
    assert all(c["orbit_identity"] for c in res["circuits"])
    assert {tuple(c["orbit_class"]) for c in res["circuits"]} == {
        (-2, 1), (-3, 2), (-1, 2), (0, 3), (-1, 4), (-3, 3), (-2, 3)}


def test_cones_check_equal():
    res = result("cones", *WITH_COORDS, "--check-equal")
    assert res["equal"]
    assert sorted(map(tuple, res["mcmullen"]["inequalities"])) == [(-2, 1), (0, 1)]
    assert res["certificate"]


def test_corrupted_labels_exit_3():
    r = invoke("cones", *WITH_COORDS, "--check-equal", "--corrupt-gauge", "--json")
    assert r.exit_code == 3
    err = json.loads(r.output)["error"]
    assert err["stage"] == "cones"
    w = err["detail"]["witness"]
    # rebuild both cones from the same corrupted labels; the witness separates them
    from trainpoly.cli import Session
    sess = Session(json.load(open(MAP)), None, None, CLASSES, COORDS, 1e-12, True)

    def closed(c):
        return all(n[0] * w[0] + n[1] * w[1] >= 0 for n in c.inequalities)

    def inside(c):
        return all(n[0] * w[0] + n[1] * w[1] > 0 for n in c.inequalities)

    a, b = sess.mcmullen, sess.fried
    assert (closed(a) and not inside(b)) or (closed(b) and not inside(a))
    r2 = invoke("analyze", *WITH_COORDS, "--corrupt-gauge")
    assert r2.exit_code == 3


@pytest.mark.parametrize("name, value", [("u1", 1.35827), ("u2", 1.632992)])
def test_stretch(name, value):
    res = result("stretch", *WITH_COORDS, "--class", name)
    assert abs(res["value"] - value) < 1e-4
    assert abs(res["cross_check"]["value"] - res["value"]) < 1e-8
    assert res["tolerance"] == 1e-12


def test_specialize():
    res = result("specialize", *WITH_COORDS, "--class", "u2")
    assert res["text"] == "zeta^6 - 3*zeta^3 - 3*zeta - 1"
    assert res["largest_root"]["route"] == "sturm"


def test_entropy_with_samples():
    res = result("entropy", *WITH_COORDS, "--class", "u1", "--samples", "4")
    assert len(res["samples"]) == 4
    assert not res["multiple_sign_changes"]


def test_class_outside_cone_exit_2(tmp_path):
    p = tmp_path / "classes.json"
    classes = json.load(open(CLASSES)) + [{"name": "out", "edge_values": {}, "stable_value": "-1"}]
    p.write_text(json.dumps(classes))
    r = invoke("entropy", MAP, "--classes", p, "--coords", COORDS, "--class", "out")
    assert r.exit_code == 2


def test_subdivide():
    res = result("subdivide", *WITH_COORDS, "--point", "d:3")
    assert res["identity_holds"]
    assert res["factor"] == "w - s^2"
    assert res["B"] == [["s^2"]]


def test_subdivide_vertex_orbit_exit_2(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps(graph_map_to_dict(rose({"a": "aba", "b": "bab"}))))
    assert invoke("subdivide", p, "--point", "a:2:2").exit_code == 0
    p.write_text(json.dumps(graph_map_to_dict(rose({"a": "b", "b": "ab"}))))
    assert invoke("subdivide", p, "--point", "a:1:2").exit_code == 2


def test_validate_not_train_track(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps(graph_map_to_dict(rose({"a": "ab", "b": "bA"}))))
    r = invoke("validate", p, "--json")
    assert r.exit_code == 2
    detail = json.loads(r.output)["error"]["detail"]
    assert not detail["train_track"]
    assert "offending_turn" in detail
    assert invoke("polynomial", p).exit_code == 2


def test_invalid_map_exit_2(tmp_path):
    d = graph_map_to_dict(rose({"a": "ab", "b": "a"}))
    d["edge_images"]["a"] = []
    p = tmp_path / "m.json"
    p.write_text(json.dumps(d))
    r = invoke("validate", p, "--json")
    assert r.exit_code == 2
    assert "empty image" in r.output


def test_analyze_is_deterministic():
    a = invoke("analyze", *WITH_COORDS, "--json")
    b = invoke("analyze", *WITH_COORDS, "--json")
    assert a.exit_code == 0 and a.output == b.output
    res = json.loads(a.output)["result"]
    assert set(res) == {"validate", "polynomial", "cones", "orbits", "classes"}
    assert abs(res["classes"]["u1"]["stretch"]["value"] - 1.35827) < 1e-4


def test_seeded_random_map():
    res = result("analyze", "--seed", 3)
    assert res["polynomial"]["routes_agree"]
    assert res["cones"]["equal"]


def test_endo_analyze():
    res = result("endo", "analyze", running_fixture_path("phi1.json"))
    assert res["injective"] and not res["surjective"]
    assert res["rank_sequence"] == [5, 5]
    res = result("endo", "analyze", running_fixture_path("phi2.json"))
    assert res["injective"] and res["surjective"]


def test_missing_input_is_usage_error():
    assert invoke("polynomial").exit_code == 2
