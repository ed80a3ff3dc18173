"""Worked examples and seeded random inputs for tests, the CLI and benchmarks."""
from __future__ import annotations

import json
import random
from importlib import resources
from typing import Mapping

from .graphcore import (GraphMap, PeriodicPoint, is_expanding, is_irreducible,
                        is_train_track, make_graph_map, validate_graph_map,
                        backtracks, OrbitError, _trace_orbit)


def word(s: str) -> list[tuple[str, int]]:
    """Parse a word of single-letter edge names; uppercase means inverse."""
    return [(c.lower(), -1 if c.isupper() else 1) for c in s if not c.isspace()]


def rose(images: Mapping[str, str]) -> GraphMap:
    """Single-vertex graph map from letter words, e.g. ``rose({"a": "ab", "b": "a"})``."""
    names = list(images)
    return make_graph_map(["v"], [(e, "v", "v") for e in names], {"v": "v"},
                          {e: word(w) for e, w in images.items()})


def running_example() -> GraphMap:
    return make_graph_map(
        ["L", "R"],
        [("a", "L", "R"), ("b", "L", "R"), ("c", "R", "R"), ("d", "L", "R")],
        {"L": "L", "R": "R"},
        {"a": word("d"), "b": word("a"), "c": word("Ba"), "d": word("bAdBac")},
    )


def _data(name: str):
    return json.loads(resources.files("trainpoly.data").joinpath(name).read_text())


def load_fixture(name: str):
    """Load a bundled JSON fixture by file name."""
    return _data(name)


def running_fixture_path(name: str = "running_example.json") -> str:
    return str(resources.files("trainpoly.data").joinpath(name))


def running_classes():
    from .marking import class_from_dict
    return {d["name"]: class_from_dict(d) for d in _data("running_classes.json")}


def phi1():
    from .stallings import endo_from_dict
    return endo_from_dict(_data("phi1.json"))


def phi2():
    from .stallings import endo_from_dict
    return endo_from_dict(_data("phi2.json"))


# --------------------------------------------------------------------------
# random inputs

def _random_graph(rng: random.Random, n_vertices: int, n_edges: int):
    verts = [f"v{i}" for i in range(n_vertices)]
    for _ in range(200):
        edges = []
        # a spanning path first keeps the graph connected
        for i in range(1, n_vertices):
            edges.append((verts[rng.randrange(i)], verts[i]))
        while len(edges) < n_edges:
            edges.append((rng.choice(verts), rng.choice(verts)))
        rng.shuffle(edges)
        edges = [(o, t) if rng.random() < 0.5 else (t, o) for o, t in edges]
        val = {v: 0 for v in verts}
        for o, t in edges:
            val[o] += 1
            val[t] += 1
        if all(val[v] >= 2 for v in verts):
            names = "abcdefgh"[:n_edges]
            return verts, [(names[i], o, t) for i, (o, t) in enumerate(edges)]
    return None


def _random_walk(rng, edges, start, end, length, positive_only):
    outs: dict[str, list] = {}
    for eid, o, t in edges:
        outs.setdefault(o, []).append(((eid, 1), t))
        if not positive_only:
            outs.setdefault(t, []).append(((eid, -1), o))
    for _ in range(50):
        cur, path = start, []
        for _ in range(length):
            choices = [c for c in outs.get(cur, [])
                       if not path or not (c[0][0] == path[-1][0] and c[0][1] == -path[-1][1])]
            if not choices:
                break
            step, cur = rng.choice(choices)
            path.append(step)
        if len(path) == length and cur == end:
            return path
    return None


def random_graph_map(rng: random.Random, max_edges: int = 8, max_image: int = 3) -> GraphMap | None:
    """One draw from the generator; ``None`` when the draw is not a valid map."""
    n_vertices = rng.choice([1, 1, 2, 2, 3])
    lo = max(2, n_vertices)
    n_edges = rng.randint(lo, min(max_edges, lo + 3))
    gr = _random_graph(rng, n_vertices, n_edges)
    if gr is None:
        return None
    verts, edges = gr
    positive_only = rng.random() < 0.5
    vimg = {v: rng.choice(verts) for v in verts}
    images = {}
    for eid, o, t in edges:
        p = _random_walk(rng, edges, vimg[o], vimg[t], rng.randint(1, max_image), positive_only)
        if p is None:
            return None
        images[eid] = p
    g = make_graph_map(verts, edges, vimg, images)
    if validate_graph_map(g):
        return None
    return g


def random_train_track_map(rng: random.Random, max_edges: int = 8, max_image: int = 3,
                           tries: int = 10_000) -> GraphMap:
    """Rejection-sample a valid expanding irreducible train track map."""
    for _ in range(tries):
        g = random_graph_map(rng, max_edges, max_image)
        if g is None or not is_irreducible(g) or not is_expanding(g):
            continue
        if any(backtracks(v) for v in g.edge_image.values()):
            continue
        if is_train_track(g).ok:
            return g
    raise RuntimeError("no train track map found")


def random_periodic_point(rng: random.Random, g: GraphMap, max_period: int = 3,
                          tries: int = 500) -> PeriodicPoint | None:
    """A random occurrence chain whose periodic orbit avoids vertices."""
    edges = list(g.edge_ids)
    for _ in range(tries):
        start = rng.choice(edges)
        period = rng.randint(1, max_period)
        cur, pos = start, []
        for _ in range(period):
            img = g.edge_image[cur]
            p = rng.randint(1, len(img))
            pos.append(p)
            cur = img[p - 1][0]
        if cur != start:
            continue
        pt = PeriodicPoint(start, tuple(pos))
        try:
            _trace_orbit(g, pt)
        except OrbitError:
            continue
        return pt
    return None
