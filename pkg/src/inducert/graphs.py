"""Small labeled graphs, canonical forms, subgraph classes of K_m and the n_j counts."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .errors import MalformedGraph6, NotEmbeddable, PreconditionError, TooLarge

MAX_CANON_ORDER = 9


@dataclass(frozen=True)
class Graph:
    """Labeled simple graph on ``{0, ..., order-1}``; edges are stored as ``(u, v)`` with ``u < v``."""

    order: int
    edges: frozenset

    def __init__(self, order: int, edges: Iterable[tuple[int, int]] = ()):
        if order < 0:
            raise ValueError("order must be non-negative")
        clean = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < order and 0 <= v < order):
                raise ValueError(f"edge ({u}, {v}) outside vertex range {order}")
            clean.add((min(u, v), max(u, v)))
        object.__setattr__(self, "order", int(order))
        object.__setattr__(self, "edges", frozenset(clean))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def non_edges(self) -> list[tuple[int, int]]:
        return [pr for pr in itertools.combinations(range(self.order), 2) if pr not in self.edges]

    def degrees(self) -> list[int]:
        deg = [0] * self.order
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Image under vertex map ``i -> perm[i]``."""
        return Graph(self.order, ((perm[u], perm[v]) for u, v in self.edges))

    def without_isolated(self) -> "Graph":
        keep = sorted({x for e in self.edges for x in e})
        index = {v: i for i, v in enumerate(keep)}
        return Graph(len(keep), ((index[u], index[v]) for u, v in self.edges))

    def padded(self, order: int) -> "Graph":
        if order < self.order:
            raise ValueError("cannot pad to a smaller order")
        return Graph(order, self.edges)

    def __repr__(self):
        return f"Graph({self.order}, {self.sorted_edges()})"



def min_degree(g: Graph) -> int:
    return min(g.degrees()) if g.order else 0


def is_clique(g: Graph) -> bool:
    return g.num_edges == comb(g.order, 2)


def complement(g: Graph) -> Graph:
    return Graph(g.order, g.non_edges())


def complete_graph(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    return Graph(n, ((i, (i + 1) % n) for i in range(n)))


def path_graph(length: int) -> Graph:
    """Path with ``length`` edges."""
    return Graph(length + 1, ((i, i + 1) for i in range(length)))


NAMED_GRAPHS: dict[str, Graph] = {
    "K2": complete_graph(2),
    "K3": complete_graph(3),
    "K4": complete_graph(4),
    "K5": complete_graph(5),
    "C4": cycle_graph(4),
    "C5": cycle_graph(5),
    "P2": path_graph(2),
    "P3": path_graph(3),
    "paw": Graph(4, [(0, 1), (0, 2), (1, 2), (2, 3)]),
    "path3+v": Graph(5, [(0, 1), (1, 2), (2, 3)]),
}


def parse_graph(text: str) -> Graph:
    """A built-in name (``"C5"``, ``"path3+v"``, ...) or a graph6 string."""
    if text in NAMED_GRAPHS:
        return NAMED_GRAPHS[text]
    return parse_graph6(text)


# ---------------------------------------------------------------------------
# canonical forms
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(itertools.combinations(range(n), 2))


@lru_cache(maxsize=None)
def _pair_index(n: int) -> dict[tuple[int, int], int]:
    return {pr: i for i, pr in enumerate(_pairs(n))}


@lru_cache(maxsize=None)
def _perm_pair_table(n: int) -> np.ndarray:
    """``table[k, r]`` = index of the image of pair ``r`` under the k-th permutation of ``range(n)``."""
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int8).reshape(-1, n)
    pairs = np.array(_pairs(n), dtype=np.int64).reshape(-1, 2)
    idx = np.full((n, n), -1, dtype=np.int64)
    for r, (i, j) in enumerate(_pairs(n)):
        idx[i, j] = idx[j, i] = r
    if len(pairs) == 0:
        return np.zeros((len(perms), 0), dtype=np.int8)
    a = perms[:, pairs[:, 0]]
    b = perms[:, pairs[:, 1]]
    return idx[a, b].astype(np.int8)


@dataclass(frozen=True, order=True)
class CanonGraph:
    """Canonical representative of an isomorphism class.

    ``edges`` is the lexicographically smallest sorted edge list among all
    relabelings of the vertices.
    """

    order: int
    edges: tuple[tuple[int, int], ...]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def graph(self) -> Graph:
        return Graph(self.order, self.edges)

    def graph6(self) -> str:
        return to_graph6(self.graph)

    def __str__(self):
        return graph_name(self)


def _canonical_edges(n: int, edges: tuple[tuple[int, int], ...]) -> tuple[tuple[int, int], ...]:
    if not edges:
        return ()
    table = _perm_pair_table(n)
    npairs = len(_pairs(n))
    index = _pair_index(n)
    # for equal-size edge sets, lexicographically smallest sorted list == largest
    # mask when earlier pairs carry heavier bits
    acc = np.zeros(table.shape[0], dtype=np.int64)
    for e in edges:
        acc += np.left_shift(np.int64(1), (npairs - 1 - table[:, index[e]]).astype(np.int64))
    best = int(acc.max())
    pairs = _pairs(n)
    return tuple(pairs[npairs - 1 - b] for b in range(npairs - 1, -1, -1) if best >> b & 1)


@lru_cache(maxsize=200_000)
def _canonical_cached(n: int, edges: tuple[tuple[int, int], ...]) -> tuple[tuple[int, int], ...]:
    return _canonical_edges(n, edges)


def canonical_form(g: Graph) -> CanonGraph:
    """Exhaustive-permutation canonical form; equal outputs iff the inputs are isomorphic."""
    if g.order > MAX_CANON_ORDER:
        raise TooLarge(f"canonical_form supports order <= {MAX_CANON_ORDER}, got {g.order}")
    return CanonGraph(g.order, _canonical_cached(g.order, tuple(sorted(g.edges))))


def is_isomorphic(g: Graph, h: Graph) -> bool:
    return g.order == h.order and g.num_edges == h.num_edges and canonical_form(g) == canonical_form(h)


def canonical_H(g: Graph) -> CanonGraph:
    """Canonical class of ``g`` after deleting isolated vertices."""
    return canonical_form(g.without_isolated())


@lru_cache(maxsize=None)
def _all_classes(m: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Canonical edge sets of all graphs on exactly ``m`` vertices with at least one edge."""
    pairs = _pairs(m)
    level = {_canonical_edges(m, (pairs[0],))}
    out = list(level)
    while level:
        nxt = set()
        for edges in level:
            present = set(edges)
            for pr in pairs:
                if pr not in present:
                    nxt.add(_canonical_cached(m, tuple(sorted(present | {pr}))))
        out.extend(sorted(nxt))
        level = nxt
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_H(m: int) -> tuple[CanonGraph, ...]:
    """Isomorphism classes of non-empty graphs without isolated vertices that embed in ``K_m``.

    Sorted by edge count, then by canonical edge list.
    """
    if m > MAX_CANON_ORDER:
        raise TooLarge(f"enumerate_H supports m <= {MAX_CANON_ORDER}")
    if m < 3:
        raise PreconditionError("enumerate_H needs m >= 3")
    found = {canonical_H(Graph(m, edges)) for edges in _all_classes(m)}
    return tuple(sorted(found, key=lambda h: (h.num_edges, h.order, h.edges)))


# ---------------------------------------------------------------------------
# n_j counts
# ---------------------------------------------------------------------------


def _popcount(arr: np.ndarray) -> np.ndarray:
    arr = arr.astype(np.uint64)
    count = np.zeros(arr.shape, dtype=np.int64)
    while np.any(arr):
        count += (arr & np.uint64(1)).astype(np.int64)
        arr = arr >> np.uint64(1)
    return count


def labeled_copies(H: Graph, m: int) -> np.ndarray:
    """Bitmasks (bit ``r`` = r-th pair of ``[m]``) of all distinct copies of ``H`` inside ``K_m``."""
    if H.order > m:
        raise NotEmbeddable(f"graph on {H.order} vertices does not embed in K_{m}")
    if m > MAX_CANON_ORDER:
        raise TooLarge(f"order {m} too large")
    table = _perm_pair_table(m)
    index = _pair_index(m)
    acc = np.zeros(table.shape[0], dtype=np.int64)
    for e in H.edges:
        acc |= np.left_shift(np.int64(1), table[:, index[e]].astype(np.int64))
    return np.unique(acc)


def count_nj(H: Graph, F: Graph) -> list[int]:
    """``n_j(H, F)`` for ``j = 0..e(H)``: copies of ``H`` in ``K_{v(F)}`` using ``j`` non-edges of ``F``.

    Counted by enumerating the orbit of ``H`` under all relabelings of ``V(F)``.
    """
    if H.num_edges == 0 or min_degree(H) == 0:
        raise NotEmbeddable("H must have edges and no isolated vertices")
    m = F.order
    copies = labeled_copies(H, m)
    index = _pair_index(m)
    non_mask = 0
    for pr in F.non_edges():
        non_mask |= 1 << index[pr]
    js = _popcount(copies & np.int64(non_mask))
    counts = np.bincount(js, minlength=H.num_edges + 1)
    return [int(c) for c in counts[: H.num_edges + 1]]


# ---------------------------------------------------------------------------
# graph6
# ---------------------------------------------------------------------------


def to_graph6(g: Graph) -> str:
    """McKay graph6 encoding (orders up to 62)."""
    n = g.order
    if n > 62:
        raise TooLarge("graph6 encoder supports n <= 62")
    bits = [1 if g.has_edge(i, j) else 0 for j in range(1, n) for i in range(j)]
    while len(bits) % 6:
        bits.append(0)
    chars = [chr(n + 63)]
    for k in range(0, len(bits), 6):
        val = 0
        for b in bits[k : k + 6]:
            val = (val << 1) | b
        chars.append(chr(val + 63))
    return "".join(chars)


def parse_graph6(s: str) -> Graph:
    s = s.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<") :]
    if not s:
        raise MalformedGraph6("empty graph6 string")
    codes = [ord(c) - 63 for c in s]
    if any(c < 0 or c > 63 for c in codes):
        raise MalformedGraph6(f"invalid graph6 character in {s!r}")
    n = codes[0]
    if n == 63:
        raise MalformedGraph6("graph6 orders above 62 are not supported")
    nbits = n * (n - 1) // 2
    if len(codes) - 1 != (nbits + 5) // 6:
        raise MalformedGraph6(f"graph6 string {s!r} has wrong length for n={n}")
    bits = []
    for c in codes[1:]:
        bits.extend((c >> (5 - k)) & 1 for k in range(6))
    if any(bits[nbits:]):
        raise MalformedGraph6("non-zero padding bits")
    edges, k = [], 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return Graph(n, edges)


# ---------------------------------------------------------------------------
# naming
# ---------------------------------------------------------------------------


def graph_name(h: CanonGraph | Graph) -> str:
    """Short human-readable name for common small graphs, graph6 otherwise."""
    g = h.graph if isinstance(h, CanonGraph) else h
    c = canonical_form(g) if g.order <= MAX_CANON_ORDER else None
    n, e = g.order, g.num_edges
    degs = sorted(g.degrees())
    if n >= 2 and is_clique(g):
        return f"K{n}"
    if n >= 4 and e == n and degs == [2] * n and c == canonical_form(cycle_graph(n)):
        return f"C{n}"
    if e == n - 1 and n >= 3 and c == canonical_form(path_graph(n - 1)):
        return f"P{n - 1}"
    if n == 4 and e == 5:
        return "diamond"
    if c is not None and c == canonical_form(NAMED_GRAPHS["paw"]):
        return "paw"
    return to_graph6(g)
