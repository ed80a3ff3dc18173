"""Homology-labeled transition graph.

Nodes are the edges of the graph; each occurrence of edge e_i in the image
of e_j is an arc j -> i.  Every arc carries a correction chain delta, a closed
1-chain measuring how the occurrence sits relative to the root and tree.
Then

    orbit_step = (pi0(delta), 1)     in internal H coordinates
    label      = -pi0(delta)         in H_0 coordinates

and A(t)[i][j] is the sum of t^label over arcs j -> i.  Per-arc labels are
gauge dependent; determinants, circuit monomials and orbit classes are not.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product
from typing import Mapping, Sequence

from .graphcore import PointOrbit
from .laurent import LaurentPoly
from .marking import MarkedAbelianization, chain_add, path_chain


@dataclass(frozen=True)
class Arc:
    source: str            # e_j, whose image contains the occurrence
    target: str            # e_i, the edge crossed
    position: int          # 1-based index into f(e_j)
    sign: int
    label: tuple[int, ...]
    orbit_step: tuple[int, ...]
    delta: Mapping[str, int]


@dataclass(frozen=True)
class Circuit:
    arcs: tuple[int, ...]      # indices into LabeledTransitionGraph.arcs
    nodes: tuple[str, ...]     # nodes[k] is the source of arcs[k]

    def __len__(self) -> int:
        return len(self.arcs)


@dataclass(frozen=True, eq=False)
class LabeledTransitionGraph:
    nodes: tuple[str, ...]
    arcs: tuple[Arc, ...]
    b: int

    @property
    def node_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    def arc_at(self, source: str, position: int) -> int:
        for k, a in enumerate(self.arcs):
            if a.source == source and a.position == position:
                return k
        raise KeyError((source, position))

    def monomial(self, label: Sequence[int]) -> LaurentPoly:
        return LaurentPoly.monomial(tuple(label) + (0,))

    def matrix(self) -> list[list[LaurentPoly]]:
        """A(t) as polynomials in the b internal variables (stable exponent 0)."""
        m = len(self.nodes)
        idx = self.node_index
        A = [[LaurentPoly.zero(self.b) for _ in range(m)] for _ in range(m)]
        for a in self.arcs:
            i, j = idx[a.target], idx[a.source]
            A[i][j] = A[i][j] + self.monomial(a.label)
        return A

    def with_labels(self, labels: Sequence[Sequence[int]], steps: Sequence[Sequence[int]] | None = None
                    ) -> "LabeledTransitionGraph":
        if steps is None:
            steps = [a.orbit_step for a in self.arcs]
        arcs = tuple(replace(a, label=tuple(lab), orbit_step=tuple(st))
                     for a, lab, st in zip(self.arcs, labels, steps))
        return LabeledTransitionGraph(self.nodes, arcs, self.b)


def build_labels(m: MarkedAbelianization) -> LabeledTransitionGraph:
    g = m.base
    graph = g.graph
    arcs = []
    for src in graph.edges:
        lead = chain_add(m.tau, m.push(m.tree_paths[src.origin]))
        image = g.edge_image[src.id]
        for pos, (tgt, sign) in enumerate(image, start=1):
            prefix = path_chain(image[:pos - 1])
            back = {tgt: -1} if sign < 0 else {}
            delta = chain_add(lead, prefix, back, m.tree_paths[graph.edge(tgt).origin],
                              coeffs=[1, 1, 1, -1])
            h0 = m.project(delta)
            arcs.append(Arc(src.id, tgt, pos, sign, tuple(-v for v in h0), h0 + (1,), delta))
    return LabeledTransitionGraph(graph.edge_ids, tuple(arcs), m.b)


def evaluate_at_one(L: LabeledTransitionGraph) -> list[list[int]]:
    m = len(L.nodes)
    idx = L.node_index
    A = [[0] * m for _ in range(m)]
    for a in L.arcs:
        A[idx[a.target]][idx[a.source]] += 1
    return A


# --------------------------------------------------------------------------
# circuits

def _successors(L: LabeledTransitionGraph) -> list[list[int]]:
    idx = L.node_index
    succ = [set() for _ in L.nodes]
    for a in L.arcs:
        succ[idx[a.source]].add(idx[a.target])
    return [sorted(s) for s in succ]


def elementary_cycles(succ: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Johnson's enumeration of elementary cycles of a simple digraph.

    Each cycle is returned starting at its least node.
    """
    n = len(succ)
    out: list[tuple[int, ...]] = []
    for s in range(n):
        sub = [[w for w in succ[v] if w >= s] for v in range(n)]
        blocked = [False] * n
        bmap: list[set[int]] = [set() for _ in range(n)]
        path = [s]
        blocked[s] = True
        # iterative circuit(v): frames of (v, successor iterator, found flag)
        stack = [(s, iter(sub[s]))]
        found = [False]
        while stack:
            v, it = stack[-1]
            w = next(it, None)
            if w is not None:
                if w == s:
                    out.append(tuple(path))
                    found[-1] = True
                elif not blocked[w] and w > s:
                    path.append(w)
                    blocked[w] = True
                    stack.append((w, iter(sub[w])))
                    found.append(False)
                continue
            f = found.pop()
            stack.pop()
            if f:
                todo = [v]
                while todo:
                    u = todo.pop()
                    if blocked[u]:
                        blocked[u] = False
                        todo.extend(bmap[u])
                        bmap[u].clear()
            else:
                for w in sub[v]:
                    bmap[w].add(v)
            path.pop()
            if found:
                found[-1] = found[-1] or f
    return out


def circuits(L: LabeledTransitionGraph) -> list[Circuit]:
    """All circuits, with every parallel-arc choice, in canonical order."""
    idx = L.node_index
    parallel: dict[tuple[int, int], list[int]] = {}
    for k, a in enumerate(L.arcs):
        parallel.setdefault((idx[a.source], idx[a.target]), []).append(k)
    out = []
    for cyc in elementary_cycles(_successors(L)):
        hops = [parallel[(cyc[k], cyc[(k + 1) % len(cyc)])] for k in range(len(cyc))]
        for choice in product(*hops):
            out.append(Circuit(tuple(choice), tuple(L.nodes[v] for v in cyc)))
    out.sort(key=lambda c: ([idx[n] for n in c.nodes], c.arcs))
    return out


def circuit_label(L: LabeledTransitionGraph, y: Circuit) -> tuple[int, ...]:
    """Exponent of p_y: the sum of arc labels."""
    total = [0] * (L.b - 1)
    for k in y.arcs:
        total = [s + v for s, v in zip(total, L.arcs[k].label)]
    return tuple(total)


def orbit_class(L: LabeledTransitionGraph, y: Circuit, check: bool = True
                ) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Internal H class of the closed orbit of ``y`` and the exponent of p_y.

    The class is summed from orbit steps, independently of the labels; with
    ``check`` it must equal p_y^-1 x^|y|.
    """
    cls = [0] * L.b
    for k in y.arcs:
        cls = [s + v for s, v in zip(cls, L.arcs[k].orbit_step)]
    p = circuit_label(L, y)
    expected = tuple(-v for v in p) + (len(y),)
    if check and tuple(cls) != expected:
        raise AssertionError(f"orbit class {tuple(cls)} != p_y^-1 x^|y| = {expected}")
    return tuple(cls), p


def _canonical(L: LabeledTransitionGraph, arcs: Sequence[int]) -> Circuit:
    idx = L.node_index
    nodes = [L.arcs[k].source for k in arcs]
    r = min(range(len(arcs)), key=lambda i: idx[nodes[i]])
    return Circuit(tuple(arcs[r:]) + tuple(arcs[:r]), tuple(nodes[r:]) + tuple(nodes[:r]))


def decompose_closed_walk(L: LabeledTransitionGraph, walk: Sequence[int]) -> list[Circuit]:
    """Split a closed walk (arc indices) into circuits by greedy excision."""
    if not walk:
        return []
    for a, b in zip(walk, list(walk[1:]) + [walk[0]]):
        if L.arcs[a].target != L.arcs[b].source:
            raise ValueError(f"arcs {a} and {b} do not chain")
    stack: list[int] = []
    where: dict[str, int] = {}
    out = []
    for k in walk:
        where[L.arcs[k].source] = len(stack)
        stack.append(k)
        t = L.arcs[k].target
        if t in where:
            i = where[t]
            cyc = stack[i:]
            del stack[i:]
            for c in cyc:
                where.pop(L.arcs[c].source, None)
            out.append(_canonical(L, cyc))
    assert not stack
    return out


def walk_class(L: LabeledTransitionGraph, walk: Sequence[int]) -> tuple[int, ...]:
    cls = [0] * L.b
    for k in walk:
        cls = [s + v for s, v in zip(cls, L.arcs[k].orbit_step)]
    return tuple(cls)


# --------------------------------------------------------------------------
# relabelings

def gauge(L: LabeledTransitionGraph, potential: Mapping[str, Sequence[int]]) -> LabeledTransitionGraph:
    """Add the coboundary of a node potential to every label."""
    zero = (0,) * (L.b - 1)
    labels, steps = [], []
    for a in L.arcs:
        d = [x - y for x, y in zip(potential.get(a.target, zero), potential.get(a.source, zero))]
        lab = tuple(v + w for v, w in zip(a.label, d))
        labels.append(lab)
        steps.append(tuple(-v for v in lab) + (1,))
    return L.with_labels(labels, steps)


def perturb_label(L: LabeledTransitionGraph, arc: int, shift: Sequence[int]) -> LabeledTransitionGraph:
    """Shift a single label, leaving orbit steps alone (a deliberately broken gauge)."""
    labels = [a.label for a in L.arcs]
    labels[arc] = tuple(v + w for v, w in zip(labels[arc], shift))
    return L.with_labels(labels)


def subdivision_factor(L: LabeledTransitionGraph, orbit: PointOrbit) -> list[list[LaurentPoly]]:
    """B(t): entry (image, point) is sign * t^label of the occurrence carrying the point."""
    k = len(orbit.points)
    B = [[LaurentPoly.zero(L.b) for _ in range(k)] for _ in range(k)]
    for j, p in enumerate(orbit.points):
        img = orbit.points[p.image]
        arc = L.arcs[L.arc_at(p.edge, p.position)]
        if arc.target != img.edge or arc.sign != p.sign:
            raise ValueError(f"orbit is not f-invariant at point {j}")
        B[p.image][j] = L.monomial(arc.label) * p.sign
    return B
