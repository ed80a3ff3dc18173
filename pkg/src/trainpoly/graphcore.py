"""Finite graphs, combinatorial graph maps and their dynamical checks.

A graph map sends vertices to vertices and each oriented edge to a nonempty
edge path.  Edge paths are tuples of ``(edge_id, sign)`` steps; a step with
sign ``-1`` traverses the edge against its fixed orientation.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence

Step = tuple[str, int]
EdgePath = tuple[Step, ...]


class GraphMapError(ValueError):
    """Raised when a graph map fails validation.

    ``problems`` holds the full list of :class:`Problem` records.
    """

    def __init__(self, problems: Sequence["Problem"]):
        self.problems = list(problems)
        super().__init__("; ".join(str(p) for p in self.problems))


class BacktrackError(ValueError):
    pass


class OrbitError(ValueError):
    pass


@dataclass(frozen=True)
class Problem:
    kind: str
    element: str
    detail: str = ""

    def __str__(self) -> str:
        s = f"{self.kind}: {self.element}"
        return f"{s} ({self.detail})" if self.detail else s


@dataclass(frozen=True)
class Edge:
    id: str
    origin: str
    terminus: str


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    @cached_property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    @cached_property
    def index(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _by_id(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    def edge(self, eid: str) -> Edge:
        return self._by_id[eid]

    def valence(self, v: str) -> int:
        return sum((e.origin == v) + (e.terminus == v) for e in self.edges)

    def step_origin(self, step: Step) -> str:
        e = self.edge(step[0])
        return e.origin if step[1] > 0 else e.terminus

    def step_terminus(self, step: Step) -> str:
        e = self.edge(step[0])
        return e.terminus if step[1] > 0 else e.origin

    def directions(self, v: str | None = None) -> list[Step]:
        """Outgoing edge germs, sorted by (vertex, edge index, sign)."""
        out = []
        for e in self.edges:
            out.append((e.id, 1))
            out.append((e.id, -1))
        if v is not None:
            out = [d for d in out if self.step_origin(d) == v]
        return sorted(out, key=self.direction_key)

    def direction_key(self, d: Step) -> tuple[int, int, int]:
        return (self.vertex_index[self.step_origin(d)], self.index[d[0]], d[1])


@dataclass(frozen=True)
class GraphMap:
    graph: Graph
    vertex_image: Mapping[str, str]
    edge_image: Mapping[str, EdgePath] = field(hash=False)

    def __hash__(self) -> int:  # mappings are not hashable
        return hash((self.graph, tuple(sorted(self.vertex_image.items())),
                     tuple(sorted(self.edge_image.items()))))

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return self.graph.edge_ids

    def image_of_path(self, path: Iterable[Step]) -> EdgePath:
        out: list[Step] = []
        for eid, s in path:
            img = self.edge_image[eid]
            out.extend(img if s > 0 else invert_path(img))
        return tuple(out)


def invert_path(path: Sequence[Step]) -> EdgePath:
    return tuple((e, -s) for e, s in reversed(path))


def path_str(path: Sequence[Step]) -> str:
    return "".join(e if s > 0 else f"{e}^-1" for e, s in path) or "1"


def backtracks(path: Sequence[Step]) -> list[int]:
    """Indices ``i`` where step ``i+1`` undoes step ``i``."""
    return [i for i in range(len(path) - 1)
            if path[i][0] == path[i + 1][0] and path[i][1] == -path[i + 1][1]]


# --------------------------------------------------------------------------
# construction and serialization

def make_graph_map(vertices: Sequence[str],
                   edges: Sequence[tuple[str, str, str]],
                   vertex_images: Mapping[str, str],
                   edge_images: Mapping[str, Sequence[Step]]) -> GraphMap:
    graph = Graph(tuple(vertices), tuple(Edge(*e) for e in edges))
    return GraphMap(graph, dict(vertex_images),
                    {k: tuple((e, int(s)) for e, s in v) for k, v in edge_images.items()})


def graph_map_from_dict(data: Mapping) -> GraphMap:
    edges = [(e["id"], e["from"], e["to"]) for e in data["edges"]]
    images = {k: [(st["edge"], int(st["sign"])) for st in v]
              for k, v in data["edge_images"].items()}
    return make_graph_map(data["vertices"], edges, data["vertex_images"], images)


def graph_map_to_dict(g: GraphMap) -> dict:
    return {
        "vertices": list(g.graph.vertices),
        "edges": [{"id": e.id, "from": e.origin, "to": e.terminus} for e in g.graph.edges],
        "vertex_images": {v: g.vertex_image[v] for v in g.graph.vertices},
        "edge_images": {e: [{"edge": a, "sign": s} for a, s in g.edge_image[e]]
                        for e in g.edge_ids},
    }


def load_graph_map(path) -> GraphMap:
    with open(path) as fh:
        return graph_map_from_dict(json.load(fh))


# --------------------------------------------------------------------------
# validation

def validate_graph_map(g: GraphMap) -> list[Problem]:
    """Return every invariant violation of ``g``; an empty list means valid."""
    problems: list[Problem] = []
    graph = g.graph
    vset = set(graph.vertices)
    seen: set[str] = set()
    for e in graph.edges:
        if e.id in seen:
            problems.append(Problem("duplicate edge id", e.id))
        seen.add(e.id)
        for end in (e.origin, e.terminus):
            if end not in vset:
                problems.append(Problem("unknown vertex", e.id, f"endpoint {end!r}"))
    if problems:
        return problems
    for v in graph.vertices:
        if graph.valence(v) == 1:
            problems.append(Problem("valence-1 vertex", v))
    for v in graph.vertices:
        w = g.vertex_image.get(v)
        if w is None:
            problems.append(Problem("missing vertex image", v))
        elif w not in vset:
            problems.append(Problem("unknown vertex", v, f"image {w!r}"))
    for e in graph.edges:
        img = g.edge_image.get(e.id)
        if img is None:
            problems.append(Problem("dangling edge id", e.id, "no image given"))
            continue
        if not img:
            problems.append(Problem("empty image", e.id))
            continue
        bad = [st for st in img if st[0] not in seen or st[1] not in (1, -1)]
        if bad:
            problems.append(Problem("dangling edge id", e.id, f"image uses {bad[0]!r}"))
            continue
        for i in range(len(img) - 1):
            if graph.step_terminus(img[i]) != graph.step_origin(img[i + 1]):
                problems.append(Problem("endpoint mismatch", e.id,
                                        f"steps {i + 1},{i + 2} of image do not chain"))
        want_o = g.vertex_image.get(e.origin)
        want_t = g.vertex_image.get(e.terminus)
        if want_o is not None and graph.step_origin(img[0]) != want_o:
            problems.append(Problem("endpoint mismatch", e.id,
                                    f"image starts at {graph.step_origin(img[0])}, "
                                    f"expected f({e.origin})={want_o}"))
        if want_t is not None and graph.step_terminus(img[-1]) != want_t:
            problems.append(Problem("endpoint mismatch", e.id,
                                    f"image ends at {graph.step_terminus(img[-1])}, "
                                    f"expected f({e.terminus})={want_t}"))
    for k in g.edge_image:
        if k not in seen:
            problems.append(Problem("dangling edge id", k, "image for unknown edge"))
    return problems


def require_valid(g: GraphMap) -> GraphMap:
    problems = validate_graph_map(g)
    if problems:
        raise GraphMapError(problems)
    return g


# --------------------------------------------------------------------------
# transition matrix and dynamics

def transition_matrix(g: GraphMap) -> list[list[int]]:
    """Entry ``[i][j]`` counts crossings of edge ``i`` by the image of edge ``j``."""
    idx = g.graph.index
    m = len(idx)
    A = [[0] * m for _ in range(m)]
    for j, eid in enumerate(g.edge_ids):
        for e, _ in g.edge_image[eid]:
            A[idx[e]][j] += 1
    return A


def _strongly_connected(A: Sequence[Sequence[int]]) -> bool:
    m = len(A)
    if m == 0:
        return False

    def reach(forward: bool) -> int:
        seen = {0}
        todo = [0]
        while todo:
            j = todo.pop()
            for i in range(m):
                w = A[i][j] if forward else A[j][i]
                if w and i not in seen:
                    seen.add(i)
                    todo.append(i)
        return len(seen)

    return reach(True) == m and reach(False) == m


def is_irreducible(g: GraphMap) -> bool:
    return _strongly_connected(transition_matrix(g))


def is_expanding(g: GraphMap) -> bool:
    A = transition_matrix(g)
    if not _strongly_connected(A):
        raise ValueError("irreducibility required")
    rows = [sum(r) for r in A]
    cols = [sum(c) for c in zip(*A)]
    is_perm = all(v in (0, 1) for r in A for v in r) and all(r == 1 for r in rows) \
        and all(c == 1 for c in cols)
    return not is_perm


class TrainTrackResult(NamedTuple):
    ok: bool
    witness: tuple | None = None  # (taken turn, power, degenerate image)

    def __bool__(self) -> bool:
        return self.ok


def direction_map(g: GraphMap, d: Step) -> Step:
    img = g.edge_image[d[0]]
    if d[1] > 0:
        return img[0]
    e, s = img[-1]
    return (e, -s)


def _turn(graph: Graph, d1: Step, d2: Step) -> tuple[Step, Step]:
    return tuple(sorted((d1, d2), key=graph.direction_key))  # type: ignore[return-value]


def taken_turns(g: GraphMap) -> list[tuple[Step, Step]]:
    """Turns crossed inside edge images plus the turn at each valence-2 vertex."""
    graph = g.graph
    turns = set()
    for eid in g.edge_ids:
        img = g.edge_image[eid]
        for a, b in zip(img, img[1:]):
            turns.add(_turn(graph, (a[0], -a[1]), b))
    for v in graph.vertices:
        if graph.valence(v) == 2:
            d1, d2 = graph.directions(v)
            turns.add(_turn(graph, d1, d2))
    return sorted(turns, key=lambda t: (graph.direction_key(t[0]), graph.direction_key(t[1])))


def is_train_track(g: GraphMap, max_power: int | None = None) -> TrainTrackResult:
    """Decide the train track property by closing taken turns under Df.

    Returns ``TrainTrackResult(False, (turn, k, image))`` when the taken ``turn``
    becomes degenerate after ``k`` applications of the direction map.
    """
    graph = g.graph
    n_dirs = 2 * len(graph.edges)
    cap = max_power if max_power is not None else n_dirs * n_dirs + 1
    queue: deque = deque()
    seen = set()
    for t in taken_turns(g):
        queue.append((t, t, 0))
        seen.add(t)
    while queue:
        t, origin, k = queue.popleft()
        if t[0] == t[1]:
            return TrainTrackResult(False, (origin, k, t))
        if k >= cap:
            continue
        nt = _turn(graph, direction_map(g, t[0]), direction_map(g, t[1]))
        if nt not in seen:
            seen.add(nt)
            queue.append((nt, origin, k + 1))
    return TrainTrackResult(True, None)


def iterate_edge(g: GraphMap, e: str, n: int, *, expect_train_track: bool = False) -> EdgePath:
    """The edge path f^n(e); unreduced, so backtracking stays visible."""
    path: EdgePath = ((e, 1),)
    for _ in range(n):
        path = g.image_of_path(path)
    if expect_train_track:
        bt = backtracks(path)
        if bt:
            raise BacktrackError(f"f^{n}({e}) backtracks at step {bt[0] + 1}")
    return path


# --------------------------------------------------------------------------
# subdivision along a finite invariant set

@dataclass(frozen=True)
class PeriodicPoint:
    """A periodic point named by its occurrence chain.

    ``positions[k]`` is the 1-based step of the image of the k-th edge of the
    chain that the orbit passes through; the chain closes up on ``edge``.
    """
    edge: str
    positions: tuple[int, ...]

    @property
    def period(self) -> int:
        return len(self.positions)

    @classmethod
    def resolve(cls, g: GraphMap, edge: str, position: int, period: int) -> "PeriodicPoint":
        """Complete a chain from its first position; it must be unique."""
        first = g.edge_image[edge]
        if not 1 <= position <= len(first):
            raise OrbitError(f"position {position} outside f({edge})")
        start = first[position - 1][0]
        chains = []
        for rest in product(*[range(1, 1 + max(len(v) for v in g.edge_image.values()))] * (period - 1)):
            cur = start
            ok = True
            for p in rest:
                img = g.edge_image[cur]
                if p > len(img):
                    ok = False
                    break
                cur = img[p - 1][0]
            if ok and cur == edge:
                chains.append((position,) + rest)
        if len(chains) != 1:
            raise OrbitError(f"occurrence chain from ({edge}, {position}) of period {period} "
                             f"is {'ambiguous' if chains else 'not closed'}")
        return cls(edge, chains[0])


@dataclass(frozen=True)
class OrbitPoint:
    edge: str
    coord: Fraction
    vertex: str
    image: int        # index of f(point) in PointOrbit.points
    position: int     # step of f(edge) the point is carried through
    sign: int         # +1 iff f preserves the edge orientation at the point


@dataclass(frozen=True)
class PointOrbit:
    points: tuple[OrbitPoint, ...]
    pieces: Mapping[str, tuple[str, ...]]  # old edge -> its sub-edges, in order

    def __len__(self) -> int:
        return len(self.points)


def _step_affine(k: int, pos: int, sign: int) -> tuple[Fraction, Fraction]:
    # x in [(pos-1)/k, pos/k] -> coordinate in the target edge
    if sign > 0:
        return Fraction(k), Fraction(-(pos - 1))
    return Fraction(-k), Fraction(pos)


def _trace_orbit(g: GraphMap, pt: PeriodicPoint) -> list[tuple[str, Fraction, int, int]]:
    a, c = Fraction(1), Fraction(0)
    cur = pt.edge
    steps = []
    for pos in pt.positions:
        img = g.edge_image[cur]
        if not 1 <= pos <= len(img):
            raise OrbitError(f"position {pos} outside f({cur})")
        nxt, s = img[pos - 1]
        sa, sc = _step_affine(len(img), pos, s)
        steps.append((cur, len(img), pos, s))
        a, c = sa * a, sa * c + sc
        cur = nxt
    if cur != pt.edge:
        raise OrbitError(f"chain from {pt.edge} does not return to it")
    if a == 1:
        raise OrbitError(f"chain from {pt.edge} is not periodic: f^{pt.period} fixes an interval")
    x = c / (1 - a)
    out = []
    for cur, k, pos, s in steps:
        if not (Fraction(pos - 1, k) < x < Fraction(pos, k)):
            raise OrbitError(f"orbit of {pt} hits a vertex")
        out.append((cur, x, pos, s))
        sa, sc = _step_affine(k, pos, s)
        x = sa * x + sc
    return out


def subdivide_at_invariant_set(g: GraphMap, points: Iterable) -> tuple[GraphMap, PointOrbit]:
    """Split edges at the finite forward orbits of the given periodic points.

    ``points`` holds :class:`PeriodicPoint` objects or ``(edge, position,
    period)`` triples.  Returns the subdivided map and its orbit data.
    """
    require_valid(g)
    graph = g.graph
    raw: dict[tuple[str, Fraction], tuple[int, int]] = {}
    order: list[tuple[str, Fraction]] = []
    for p in points:
        if not isinstance(p, PeriodicPoint):
            p = PeriodicPoint.resolve(g, *p)
        for cur, x, pos, s in _trace_orbit(g, p):
            key = (cur, x)
            if key not in raw:
                raw[key] = (pos, s)
                order.append(key)
    if not raw:
        return g, PointOrbit((), {e: (e,) for e in graph.edge_ids})

    splits: dict[str, list[Fraction]] = {e: [] for e in graph.edge_ids}
    for e, x in order:
        splits[e].append(x)
    for e in splits:
        splits[e].sort()

    taken = set(graph.vertices) | set(graph.edge_ids)

    def fresh(base: str) -> str:
        name = base
        while name in taken:
            name += "_"
        taken.add(name)
        return name

    pieces: dict[str, tuple[str, ...]] = {}
    vname: dict[tuple[str, Fraction], str] = {}
    new_edges: list[Edge] = []
    for e in graph.edges:
        xs = splits[e.id]
        if not xs:
            pieces[e.id] = (e.id,)
            new_edges.append(e)
            continue
        verts = [fresh(f"{e.id}:{i + 1}") for i in range(len(xs))]
        for x, v in zip(xs, verts):
            vname[(e.id, x)] = v
        names = tuple(fresh(e.id + "'" * (i + 1)) for i in range(len(xs) + 1))
        ends = [e.origin] + verts + [e.terminus]
        for i, nm in enumerate(names):
            new_edges.append(Edge(nm, ends[i], ends[i + 1]))
        pieces[e.id] = names

    def sub_path(eid: str, lo: Fraction, hi: Fraction, sign: int) -> list[Step]:
        cuts = [Fraction(0)] + splits[eid] + [Fraction(1)]
        i, j = cuts.index(lo), cuts.index(hi)
        segs = [(pieces[eid][k], 1) for k in range(i, j)]
        return segs if sign > 0 else [(nm, -1) for nm, _ in reversed(segs)]

    images: dict[str, EdgePath] = {}
    for e in graph.edges:
        img = g.edge_image[e.id]
        K = len(img)
        cuts = [Fraction(0)] + splits[e.id] + [Fraction(1)]
        for k, nm in enumerate(pieces[e.id]):
            A, B = K * cuts[k], K * cuts[k + 1]
            out: list[Step] = []
            for i, (te, s) in enumerate(img):
                lo, hi = max(Fraction(i), A), min(Fraction(i + 1), B)
                if lo >= hi:
                    continue
                al, be = lo - i, hi - i
                if s < 0:
                    al, be = 1 - be, 1 - al
                out.extend(sub_path(te, al, be, s))
            images[nm] = tuple(out)

    index = {key: n for n, key in enumerate(order)}
    orbit_pts = []
    vimg = dict(g.vertex_image)
    for (e, x) in order:
        pos, s = raw[(e, x)]
        k = len(g.edge_image[e])
        te = g.edge_image[e][pos - 1][0]
        sa, sc = _step_affine(k, pos, s)
        y = sa * x + sc
        orbit_pts.append(OrbitPoint(e, x, vname[(e, x)], index[(te, y)], pos, s))
        vimg[vname[(e, x)]] = vname[(te, y)]

    new_vertices = list(graph.vertices) + [vname[key] for key in sorted(vname, key=lambda k: (graph.index[k[0]], k[1]))]
    g2 = GraphMap(Graph(tuple(new_vertices), tuple(new_edges)), vimg, images)
    require_valid(g2)
    return g2, PointOrbit(tuple(orbit_pts), pieces)
