"""Marked abelianization of a graph map.

For f: G -> G with induced action M on H_1(G; Z), the abelianization of the
mapping torus group modulo torsion is H = coker(M - I)/torsion + Z*r, where
r is the stable letter at the chosen root.  Internal coordinates of an
element of H are ``(pi0(z), n)`` for ``z + n*r``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .graphcore import (GraphMap, Step, is_expanding, is_irreducible, is_train_track,
                        require_valid)

Chain = dict[str, int]
IntMatrix = list[list[int]]


class MarkingError(ValueError):
    pass


class ClassError(ValueError):
    pass


# --------------------------------------------------------------------------
# integer linear algebra

def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> IntMatrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(A))]


def int_inverse(A: Sequence[Sequence[int]]) -> IntMatrix:
    """Inverse of a unimodular integer matrix."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            raise MarkingError("singular matrix")
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    out = [[v for v in row[n:]] for row in M]
    if any(v.denominator != 1 for row in out for v in row):
        raise MarkingError("matrix is not unimodular")
    return [[int(v) for v in row] for row in out]


def det_int(A: Sequence[Sequence[int]]) -> int:
    n = len(A)
    M = [[Fraction(v) for v in row] for row in A]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return int(det)


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U @ A @ V == D`` and U, V unimodular.

    D is diagonal, nonnegative, with each diagonal entry dividing the next.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(map(int, row)) for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst += q * row src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if t < m and t < n and D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            U[t] = [-v for v in U[t]]
    return U, D, V


# --------------------------------------------------------------------------
# chains

def chain_add(*chains: Mapping[str, int], coeffs: Sequence[int] | None = None) -> Chain:
    out: Chain = {}
    coeffs = coeffs or [1] * len(chains)
    for c, k in zip(chains, coeffs):
        for e, v in c.items():
            out[e] = out.get(e, 0) + k * v
    return {e: v for e, v in out.items() if v}


def path_chain(path: Sequence[Step]) -> Chain:
    out: Chain = {}
    for e, s in path:
        out[e] = out.get(e, 0) + s
    return {e: v for e, v in out.items() if v}


# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CohomologyClass:
    """A class given by an edge cochain plus its value on the stable letter."""
    edge_values: Mapping[str, Fraction]
    stable_value: Fraction
    name: str | None = None

    def value(self, chain: Mapping[str, int]) -> Fraction:
        return sum((Fraction(self.edge_values.get(e, 0)) * v for e, v in chain.items()),
                   Fraction(0))

    def scaled(self, k) -> "CohomologyClass":
        k = Fraction(k)
        return CohomologyClass({e: v * k for e, v in self.edge_values.items()},
                               self.stable_value * k, self.name)


def make_class(edge_values: Mapping[str, object], stable_value, name: str | None = None) -> CohomologyClass:
    return CohomologyClass({e: Fraction(v) for e, v in edge_values.items()},
                           Fraction(stable_value), name)


def class_from_dict(d: Mapping) -> CohomologyClass:
    return make_class(d.get("edge_values", {}), d.get("stable_value", 0), d.get("name"))


def class_to_dict(u: CohomologyClass) -> dict:
    return {"name": u.name,
            "edge_values": {e: str(v) for e, v in sorted(u.edge_values.items())},
            "stable_value": str(u.stable_value)}


@dataclass(frozen=True, eq=False)
class MarkedAbelianization:
    base: GraphMap
    root: str
    tree: tuple[str, ...]
    tree_paths: Mapping[str, Chain]
    cycle_edges: tuple[str, ...]
    cycle_basis: tuple[Chain, ...]
    h1_action: IntMatrix
    smith: tuple[IntMatrix, IntMatrix, IntMatrix]
    b: int
    pi0: IntMatrix
    pi0_section: IntMatrix          # columns: cycle coordinates of H_0 basis lifts
    torsion: tuple[int, ...]
    tau: Chain = field(default_factory=dict)  # tree path from root to f(root)

    # -- chain maps
    def push(self, chain: Mapping[str, int]) -> Chain:
        """f_# on 1-chains."""
        g = self.base
        out: Chain = {}
        for e, v in chain.items():
            for te, s in g.edge_image[e]:
                out[te] = out.get(te, 0) + v * s
        return {e: v for e, v in out.items() if v}

    def boundary(self, chain: Mapping[str, int]) -> dict[str, int]:
        out: dict[str, int] = {}
        for e, v in chain.items():
            ed = self.base.graph.edge(e)
            out[ed.terminus] = out.get(ed.terminus, 0) + v
            out[ed.origin] = out.get(ed.origin, 0) - v
        return {k: v for k, v in out.items() if v}

    def cycle_coords(self, chain: Mapping[str, int]) -> list[int]:
        if self.boundary(chain):
            raise MarkingError(f"chain {dict(chain)} is not a cycle")
        return [chain.get(e, 0) for e in self.cycle_edges]

    def project(self, chain: Mapping[str, int]) -> tuple[int, ...]:
        """pi0 of a 1-cycle: its H_0 coordinates."""
        z = self.cycle_coords(chain)
        return tuple(sum(r * c for r, c in zip(row, z)) for row in self.pi0)

    def section_chain(self, k: int) -> Chain:
        return chain_add(*self.cycle_basis, coeffs=[row[k] for row in self.pi0_section])

    @property
    def rank_h0(self) -> int:
        return self.b - 1


def default_root(g: GraphMap) -> str:
    verts = g.graph.vertices
    fixed = [v for v in verts if g.vertex_image[v] == v]
    if fixed:
        return fixed[0]

    def period(v):
        w, k = g.vertex_image[v], 1
        while w != v and k <= len(verts):
            w, k = g.vertex_image[w], k + 1
        return k if w == v else len(verts) + 1

    return min(verts, key=period)


def spanning_tree(g: GraphMap, root: str) -> tuple[str, ...]:
    """Breadth-first spanning tree, edges scanned in declaration order."""
    graph = g.graph
    seen = {root}
    tree = []
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for e in graph.edges:
            for a, bv in ((e.origin, e.terminus), (e.terminus, e.origin)):
                if a == v and bv not in seen:
                    seen.add(bv)
                    tree.append(e.id)
                    queue.append(bv)
    if len(seen) != len(graph.vertices):
        raise MarkingError("graph is not connected")
    return tuple(tree)


def _tree_paths(g: GraphMap, root: str, tree: Sequence[str]) -> dict[str, Chain]:
    graph = g.graph
    paths: dict[str, Chain] = {root: {}}
    queue = deque([root])
    tset = set(tree)
    while queue:
        v = queue.popleft()
        for eid in tree:
            e = graph.edge(eid)
            for a, bv, s in ((e.origin, e.terminus, 1), (e.terminus, e.origin, -1)):
                if a == v and bv not in paths:
                    paths[bv] = chain_add(paths[v], {eid: s})
                    queue.append(bv)
    if len(paths) != len(graph.vertices) or len(tset) != len(graph.vertices) - 1:
        raise MarkingError("non-spanning tree")
    return paths


def mark(g: GraphMap, root: str | None = None, tree: Sequence[str] | None = None,
         check: bool = True) -> MarkedAbelianization:
    """Build the marked abelianization of ``g``.

    ``check=False`` skips the irreducible/expanding/train-track gate, which is
    useful for degenerate test maps such as the identity.
    """
    require_valid(g)
    if check:
        if not is_irreducible(g):
            raise MarkingError("map is not irreducible")
        if not is_expanding(g):
            raise MarkingError("map is not expanding")
        tt = is_train_track(g)
        if not tt.ok:
            raise MarkingError(f"map is not a train track map: turn {tt.witness[0]} "
                               f"degenerates after {tt.witness[1]} steps")
    graph = g.graph
    if root is None:
        root = default_root(g)
    if root not in graph.vertex_index:
        raise MarkingError(f"root {root!r} is not a vertex")
    if tree is None:
        tree = spanning_tree(g, root)
    else:
        tree = tuple(tree)
        unknown = [e for e in tree if e not in graph.index]
        if unknown:
            raise MarkingError(f"non-spanning tree: unknown edges {unknown}")
        tree = tuple(sorted(set(tree), key=graph.index.__getitem__))
    paths = _tree_paths(g, root, tree)
    tset = set(tree)
    cycle_edges = tuple(e.id for e in graph.edges if e.id not in tset)
    basis = tuple(chain_add(paths[graph.edge(e).origin], {e: 1}, paths[graph.edge(e).terminus],
                            coeffs=[1, 1, -1]) for e in cycle_edges)
    n = len(cycle_edges)
    proto = MarkedAbelianization(g, root, tree, paths, cycle_edges, basis, [], ([], [], []),
                                 1, [], [], ())
    cols = [proto.cycle_coords(proto.push(z)) for z in basis]
    M = [[cols[j][i] for j in range(n)] for i in range(n)]
    MI = [[M[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    U, D, V = smith_normal_form(MI) if n else ([], [], [])
    zero = [i for i in range(n) if D[i][i] == 0]
    torsion = tuple(D[i][i] for i in range(n) if D[i][i] > 1)
    pi0 = [list(U[i]) for i in zero]
    Uinv = int_inverse(U) if n else []
    section = [[Uinv[r][i] for i in zero] for r in range(n)]
    for k, row in enumerate(pi0):
        first = next((v for v in row if v), 0)
        if first < 0:
            pi0[k] = [-v for v in row]
            for r in range(n):
                section[r][k] = -section[r][k]
    tau = paths[g.vertex_image[root]]
    return MarkedAbelianization(g, root, tree, paths, cycle_edges, basis, M, (U, D, V),
                                1 + len(zero), pi0, section, torsion, dict(tau))


# --------------------------------------------------------------------------
# classes

def validate_class(m: MarkedAbelianization, u: CohomologyClass) -> list[tuple[str, Fraction, Fraction]]:
    """Cycles where u is not f-invariant, as ``(edge, u(z), u(f_# z))``."""
    bad = []
    for e, z in zip(m.cycle_edges, m.cycle_basis):
        a, b = u.value(z), u.value(m.push(z))
        if a != b:
            bad.append((e, a, b))
    unknown = [e for e in u.edge_values if e not in m.base.graph.index]
    if unknown:
        raise ClassError(f"class {u.name!r} names unknown edges {unknown}")
    return bad


def require_class(m: MarkedAbelianization, u: CohomologyClass) -> CohomologyClass:
    bad = validate_class(m, u)
    if bad:
        desc = ", ".join(f"cycle of {e}: {a} != {b}" for e, a, b in bad)
        raise ClassError(f"class {u.name or ''} is not f-invariant ({desc})")
    return u


def class_on_H(m: MarkedAbelianization, u: CohomologyClass) -> tuple[Fraction, ...]:
    """Internal covector of ``u`` on H."""
    require_class(m, u)
    return tuple(u.value(m.section_chain(k)) for k in range(m.b - 1)) + (u.stable_value,)


def stable_shift(m_old: MarkedAbelianization, m_new: MarkedAbelianization) -> Chain:
    """Cycle z with r_new = r_old + z in H (same map, other root or tree)."""
    root = m_new.root
    return chain_add(m_old.tree_paths[root], m_old.tau, m_old.push(m_old.tree_paths[root]),
                     m_new.tau, coeffs=[-1, 1, 1, -1])


def rebase_class(u: CohomologyClass, m_old: MarkedAbelianization,
                 m_new: MarkedAbelianization) -> CohomologyClass:
    """Express ``u`` (stable value taken at m_old's root) relative to m_new's root."""
    return CohomologyClass(dict(u.edge_values),
                           u.stable_value + u.value(stable_shift(m_old, m_new)), u.name)


@dataclass(frozen=True, eq=False)
class CoordinateSystem:
    """Integer coordinates on H from a unimodular family of characters."""
    names: tuple[str, ...]
    matrix: IntMatrix          # row i: character i on the internal basis
    inverse: IntMatrix

    @property
    def b(self) -> int:
        return len(self.names)

    def point(self, h) -> tuple[int, ...]:
        """Output coordinates of an internal H vector."""
        return tuple(sum(r * v for r, v in zip(row, h)) for row in self.matrix)

    def point_to_internal(self, h) -> tuple[int, ...]:
        return tuple(sum(r * v for r, v in zip(row, h)) for row in self.inverse)

    def covector(self, v) -> tuple:
        """Output coordinates of an internal covector."""
        return tuple(sum(v[i] * self.inverse[i][j] for i in range(self.b)) for j in range(self.b))

    def covector_to_internal(self, w) -> tuple:
        return tuple(sum(w[i] * self.matrix[i][j] for i in range(self.b)) for j in range(self.b))


def internal_coordinates(b: int) -> CoordinateSystem:
    names = tuple(f"t{i + 1}" for i in range(b - 1)) + ("x",)
    return CoordinateSystem(names, identity(b), identity(b))


def make_coordinates(m: MarkedAbelianization, chars: Sequence[CohomologyClass]) -> CoordinateSystem:
    if len(chars) != m.b:
        raise ClassError(f"need {m.b} characters, got {len(chars)}")
    rows = []
    for u in chars:
        vals = class_on_H(m, u)
        if any(v.denominator != 1 for v in vals):
            raise ClassError(f"character {u.name!r} is not integral")
        rows.append([int(v) for v in vals])
    if abs(det_int(rows)) != 1:
        raise ClassError("non-unimodular character family")
    names = tuple(u.name or f"chi{i}" for i, u in enumerate(chars))
    return CoordinateSystem(names, rows, int_inverse(rows))


def internal_characters(m: MarkedAbelianization) -> list[CohomologyClass]:
    """Characters whose values are the internal coordinates."""
    out = []
    for k, row in enumerate(m.pi0):
        vals = {e: Fraction(v) for e, v in zip(m.cycle_edges, row) if v}
        out.append(CohomologyClass(vals, Fraction(0), f"t{k + 1}"))
    out.append(CohomologyClass({}, Fraction(1), "x"))
    return out


def transport_class(u: CohomologyClass, pieces: Mapping[str, Sequence[str]]) -> CohomologyClass:
    """Pull a class back to a subdivision: the first piece of each edge carries its value."""
    vals = {ps[0]: Fraction(u.edge_values[e]) for e, ps in pieces.items() if u.edge_values.get(e)}
    return CohomologyClass(vals, u.stable_value, u.name)


def transport_tree(m: MarkedAbelianization, pieces: Mapping[str, Sequence[str]]) -> tuple[str, ...]:
    """Spanning tree of a subdivision that keeps the stable letter at the root."""
    tree = set(m.tree)
    out = []
    for e, ps in pieces.items():
        out.extend(ps if e in tree else ps[:-1])
    return tuple(out)
