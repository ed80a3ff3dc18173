"""Free group endomorphisms and Stallings folding.

Words are tuples of nonzero ints: ``k`` is the generator x_k, ``-k`` its
inverse.  The image subgroup of an endomorphism is read off the folded
graph of the wedge of its image loops.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

Word = tuple[int, ...]


def reduce_word(w: Sequence[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def parse_letter(s: str) -> int:
    neg = s.startswith("-")
    body = s[1:] if neg else s
    if not body.startswith("x") or not body[1:].isdigit():
        raise ValueError(f"bad generator {s!r}")
    k = int(body[1:])
    return -k if neg else k


def letter_str(x: int) -> str:
    return f"-x{-x}" if x < 0 else f"x{x}"


@dataclass(frozen=True)
class FreeGroupEndo:
    rank: int
    images: tuple[Word, ...]

    def __post_init__(self):
        if len(self.images) != self.rank:
            raise ValueError(f"{len(self.images)} images for rank {self.rank}")
        for w in self.images:
            if any(x == 0 or abs(x) > self.rank for x in w):
                raise ValueError(f"word {w} uses generators outside 1..{self.rank}")

    @classmethod
    def make(cls, images: Sequence[Sequence[int]]) -> "FreeGroupEndo":
        return cls(len(images), tuple(reduce_word(w) for w in images))

    @classmethod
    def identity(cls, rank: int) -> "FreeGroupEndo":
        return cls(rank, tuple((k,) for k in range(1, rank + 1)))

    def apply(self, w: Sequence[int]) -> Word:
        out: list[int] = []
        for x in w:
            out.extend(self.images[x - 1] if x > 0 else invert_word(self.images[-x - 1]))
        return reduce_word(out)

    def compose(self, other: "FreeGroupEndo") -> "FreeGroupEndo":
        """``self`` after ``other``."""
        return FreeGroupEndo(self.rank, tuple(self.apply(w) for w in other.images))

    def power(self, k: int) -> "FreeGroupEndo":
        out = FreeGroupEndo.identity(self.rank)
        for _ in range(k):
            out = self.compose(out)
        return out


def endo_from_dict(d: Mapping) -> FreeGroupEndo:
    images = [[parse_letter(s) for s in w] for w in d["images"]]
    e = FreeGroupEndo.make(images)
    if e.rank != d.get("rank", e.rank):
        raise ValueError(f"rank {d['rank']} does not match {e.rank} images")
    return e


def endo_to_dict(e: FreeGroupEndo) -> dict:
    return {"rank": e.rank, "images": [[letter_str(x) for x in w] for w in e.images]}


def random_endo(rng: random.Random, rank: int, max_len: int = 3) -> FreeGroupEndo:
    images = []
    for _ in range(rank):
        w = [rng.choice([1, -1]) * rng.randint(1, rank) for _ in range(rng.randint(0, max_len))]
        images.append(w)
    return FreeGroupEndo.make(images)


# --------------------------------------------------------------------------
# folding

class _Folder:
    """Labeled graph kept immersed as edges are added (union-find on vertices)."""

    def __init__(self):
        self.parent: list[int] = []
        self.out: list[dict[int, int]] = []
        self.inn: list[dict[int, int]] = []

    def vertex(self) -> int:
        self.parent.append(len(self.parent))
        self.out.append({})
        self.inn.append({})
        return len(self.parent) - 1

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def add(self, u: int, label: int, v: int) -> None:
        pending = [(u, label, v)]
        while pending:
            u, label, v = pending.pop()
            u, v = self.find(u), self.find(v)
            w = self.out[u].get(label)
            if w is not None:
                self._merge(v, w, pending)
                continue
            w = self.inn[v].get(label)
            if w is not None:
                self._merge(u, w, pending)
                continue
            self.out[u][label] = v
            self.inn[v][label] = u

    def _merge(self, a: int, b: int, pending: list) -> None:
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if b < a:
            a, b = b, a
        self.parent[b] = a
        for label, w in list(self.out[b].items()):
            if self.inn[w].get(label) == b:
                del self.inn[w][label]
            pending.append((a, label, w))
        for label, w in list(self.inn[b].items()):
            if self.out[w].get(label) == b:
                del self.out[w][label]
            pending.append((w, label, a))
        self.out[b] = {}
        self.inn[b] = {}


@dataclass(frozen=True)
class FoldedGraph:
    """Immersed labeled graph, vertices numbered by BFS from the base 0."""
    n_vertices: int
    edges: tuple[tuple[int, int, int], ...]   # (origin, generator, terminus)

    @property
    def betti(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    def is_rose(self, rank: int) -> bool:
        return self.n_vertices == 1 and len(self.edges) == rank

    def read(self, w: Sequence[int]) -> int | None:
        """End vertex of the path spelling ``w`` from the base, or None."""
        out: dict[tuple[int, int], int] = {}
        for u, k, v in self.edges:
            out[(u, k)] = v
            out[(v, -k)] = u
        cur = 0
        for x in w:
            cur = out.get((cur, x))
            if cur is None:
                return None
        return cur

    def contains(self, w: Sequence[int]) -> bool:
        return self.read(w) == 0


def _canonical(f: _Folder, base: int) -> FoldedGraph:
    base = f.find(base)
    number = {base: 0}
    queue = deque([base])
    edges = []
    while queue:
        v = queue.popleft()
        nbrs = sorted([(k, w, 1) for k, w in f.out[v].items()] + [(-k, w, -1) for k, w in f.inn[v].items()])
        for k, w, d in nbrs:
            if w not in number:
                number[w] = len(number)
                queue.append(w)
    for v, i in number.items():
        for k, w in f.out[v].items():
            edges.append((i, k, number[w]))
    return FoldedGraph(len(number), tuple(sorted(edges)))


def fold_words(words: Sequence[Sequence[int]], seed: int | None = None) -> FoldedGraph:
    """Fold the wedge of loops spelling ``words``.

    With a seed the edges are inserted in a shuffled order; the result does
    not depend on it.
    """
    f = _Folder()
    base = f.vertex()
    edges = []
    for w in words:
        w = reduce_word(w)
        if not w:
            continue
        verts = [base] + [f.vertex() for _ in range(len(w) - 1)] + [base]
        for i, x in enumerate(w):
            edges.append((verts[i], x, verts[i + 1]) if x > 0 else (verts[i + 1], -x, verts[i]))
    if seed is not None:
        random.Random(seed).shuffle(edges)
    for u, k, v in edges:
        f.add(u, k, v)
    return _canonical(f, base)


def fold(e: FreeGroupEndo, seed: int | None = None) -> FoldedGraph:
    return fold_words(e.images, seed)


def image_rank(e: FreeGroupEndo) -> int:
    return fold(e).betti


def is_injective(e: FreeGroupEndo) -> bool:
    # free groups of finite rank are Hopfian: rank n image means injective
    return image_rank(e) == e.rank


def is_surjective(e: FreeGroupEndo) -> bool:
    g = fold(e)
    return all(g.contains((k,)) for k in range(1, e.rank + 1))


def stable_image_index(e: FreeGroupEndo, cap: int | None = None) -> tuple[int, list[int]]:
    """Least i with rank(phi^i) = rank(phi^(i+1)), and the ranks seen."""
    if cap is None:
        cap = e.rank + 1
    if cap < 1:
        raise ValueError("cap must be at least 1")
    ranks = [e.rank]
    cur = FreeGroupEndo.identity(e.rank)
    for i in range(cap):
        cur = e.compose(cur)
        ranks.append(image_rank(cur))
        if ranks[-1] > ranks[-2]:
            raise AssertionError(f"image ranks increased: {ranks}")
        if ranks[-1] == ranks[-2]:
            return i, ranks
    raise ValueError(f"image rank did not stabilize within {cap} iterates: {ranks}")
