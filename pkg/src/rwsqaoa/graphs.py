"""Graphs, Max-Cut metrics, the brute-force oracle and edge lightcones.

Bitstrings are ``uint8`` arrays of 0/1 of length ``n``.  Basis-state
indices use little-endian order: bit ``i`` of an integer code is the value
of vertex ``i``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "Cut",
    "Lightcone",
    "BruteForceResult",
    "InfeasibleGraphError",
    "generate_random_regular",
    "laplacian_qubo",
    "cut_value",
    "cut_fraction",
    "approximation_ratio",
    "brute_force_maxcut",
    "edge_lightcone",
    "cut_diagonal",
    "load_graph",
    "save_graph",
]

BRUTE_FORCE_CAP = 28


class InfeasibleGraphError(ValueError):
    """Raised when no graph with the requested parameters exists."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    ``edges`` is an ``(m, 2)`` int array with ``i < j`` in every row, in the
    order given at construction (duplicates and self-loops rejected).
    """

    n: int
    edges: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        if e.size:
            if e.min() < 0 or e.max() >= self.n:
                raise ValueError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loops are not allowed")
        e = np.sort(e, axis=1)
        if len(np.unique(e[:, 0] * max(self.n, 1) + e[:, 1])) != len(e):
            raise ValueError("duplicate edges are not allowed")
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        return cls(n, np.asarray(list(edges), dtype=np.int64).reshape(-1, 2))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, ...]:
        """Per-vertex sorted neighbour arrays."""
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges.tolist():
            nbrs[i].append(j)
            nbrs[j].append(i)
        return tuple(np.array(sorted(x), dtype=np.int64) for x in nbrs)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    @cached_property
    def adjacency_matrix(self) -> sp.csr_matrix:
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.m)
        a = sp.coo_matrix(
            (data, (np.r_[i, j], np.r_[j, i])), shape=(self.n, self.n)
        )
        return a.tocsr()

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(int(i), int(j)): k for k, (i, j) in enumerate(self.edges)}

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edge_index

    def to_dict(self) -> dict:
        return {"n": int(self.n), "edges": self.edges.tolist()}

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Cut:
    assignment: np.ndarray
    value: int

    def fraction(self, g: Graph) -> float:
        return cut_fraction(g, self.assignment)


@dataclass(frozen=True)
class Lightcone:
    """Induced subgraph around one edge.

    The centre edge is always local ``(0, 1)``; ``vertex_map[k]`` is the
    global index of local vertex ``k``.
    """

    subgraph: Graph
    center_edge: tuple[int, int]
    vertex_map: np.ndarray
    depth: int


@dataclass(frozen=True)
class BruteForceResult:
    f_max: int
    optima: np.ndarray = field(repr=False)  # (k, n) uint8, one row per optimum


def generate_random_regular(n: int, d: int, seed: int | None = None,
                            max_tries: int = 100_000) -> Graph:
    """Random simple ``d``-regular graph from the configuration model.

    Stubs are paired uniformly at random and the whole pairing is rejected
    if it contains a self-loop or a repeated edge.
    """
    if n <= 0 or d < 0 or d >= n or (n * d) % 2:
        raise InfeasibleGraphError(f"no simple {d}-regular graph on {n} vertices")
    if d == 0:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        pairs.sort(axis=1)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        keys = pairs[:, 0] * n + pairs[:, 1]
        if len(np.unique(keys)) != len(keys):
            continue
        order = np.argsort(keys)
        return Graph(n, pairs[order])
    raise RuntimeError("configuration model did not produce a simple graph")


def laplacian_qubo(g: Graph, sparse: bool = False):
    """QUBO matrix ``Q = -L``; minimising ``x^T Q x`` maximises the cut."""
    q = g.adjacency_matrix - sp.diags(g.degrees.astype(float))
    return q.tocsr() if sparse else q.toarray()


def _as_bits(g: Graph, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (g.n,):
        raise ValueError(f"expected bit vector of length {g.n}, got shape {x.shape}")
    return x.astype(np.uint8)


def cut_value(g: Graph, x) -> int:
    x = _as_bits(g, x)
    if g.m == 0:
        return 0
    return int(np.count_nonzero(x[g.edges[:, 0]] != x[g.edges[:, 1]]))


def cut_fraction(g: Graph, x) -> float:
    if g.m == 0:
        raise ZeroDivisionError("cut fraction undefined for a graph without edges")
    return cut_value(g, x) / g.m


def approximation_ratio(g: Graph, x, f_max: int) -> float:
    if f_max <= 0:
        raise ZeroDivisionError("approximation ratio needs a positive optimum")
    return cut_value(g, x) / f_max


def _codes_to_bits(codes: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n, dtype=np.uint64)
    return ((codes.astype(np.uint64)[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)


def cut_diagonal(g: Graph) -> np.ndarray:
    """Cut value of every basis state, indexed by little-endian code."""
    if g.n > BRUTE_FORCE_CAP:
        raise ValueError(f"cut diagonal needs 2^{g.n} entries")
    idx = np.arange(1 << g.n, dtype=np.int64)
    out = np.zeros(1 << g.n, dtype=np.int64)
    for i, j in g.edges.tolist():
        out += ((idx >> i) ^ (idx >> j)) & 1
    return out


def _internal_cuts(sub_edges, k: int) -> np.ndarray:
    idx = np.arange(1 << k, dtype=np.int64)
    out = np.zeros(1 << k, dtype=np.int64)
    for i, j in sub_edges:
        out += ((idx >> i) ^ (idx >> j)) & 1
    return out


def brute_force_maxcut(g: Graph, cap: int = BRUTE_FORCE_CAP,
                       low_bits: int = 16, batch: int = 256) -> BruteForceResult:
    """Exact Max-Cut by enumeration.

    Vertex ``n-1`` is pinned to 0 (complement symmetry); the remaining
    ``n-1`` bits are split into a low block, tabulated once, and a high
    block whose cross-edge contribution is a matrix product with the
    low-block bit table.
    """
    n = g.n
    if n > cap:
        raise ValueError(f"instance too large for brute force: n={n} > {cap}")
    if n <= 1:
        return BruteForceResult(0, _codes_to_bits(np.arange(1 << n), n))
    free = n - 1
    k = min(free, low_bits)
    h = free - k
    edges = g.edges.tolist()
    low_e = [(i, j) for i, j in edges if i < k and j < k]
    high_e = [(i - k, j - k) for i, j in edges if i >= k and j >= k]
    cross = [(i, j - k) for i, j in edges if i < k <= j]  # i low, j high (incl. pinned)

    t_low = _internal_cuts(low_e, k).astype(np.float64)
    low_bits_tab = _codes_to_bits(np.arange(1 << k), k).astype(np.float64)
    # high block includes the pinned vertex n-1 (local index h), always 0
    t_high = _internal_cuts(high_e, h + 1)[: 1 << h].astype(np.float64)
    high_codes = np.arange(1 << h, dtype=np.int64)

    deg_cross = np.zeros(k)
    for i, _ in cross:
        deg_cross[i] += 1

    best = -1
    hits: list[np.ndarray] = []
    for start in range(0, 1 << h, batch):
        hc = high_codes[start:start + batch]
        # c[i, b] = number of cross neighbours of low vertex i set to 1 in high code b
        c = np.zeros((k, len(hc)))
        for i, jh in cross:
            c[i] += (hc >> jh) & 1
        w = deg_cross[:, None] - 2.0 * c
        vals = t_low[:, None] + (t_high[hc] + c.sum(axis=0))[None, :] + low_bits_tab @ w
        vmax = int(round(vals.max()))
        if vmax > best:
            best = vmax
            hits = []
        if vmax == best:
            lo, hi = np.nonzero(np.rint(vals) == best)
            hits.append(lo.astype(np.int64) + (hc[hi] << k))
    codes = np.sort(np.concatenate(hits))
    half = _codes_to_bits(codes, n)
    optima = np.concatenate([half, 1 - half])
    return BruteForceResult(best, optima)


def edge_lightcone(g: Graph, e, p: int) -> Lightcone:
    """Induced subgraph on vertices within distance ``p`` of either endpoint."""
    i, j = int(min(e)), int(max(e))
    if not g.has_edge(i, j):
        raise KeyError(f"edge {(i, j)} not in graph")
    if p < 0:
        raise ValueError("depth must be non-negative")
    adj = g.adjacency
    dist = {i: 0, j: 0}
    order = [i, j]
    queue = deque([i, j])
    while queue:
        v = queue.popleft()
        if dist[v] == p:
            continue
        for w in adj[v].tolist():
            if w not in dist:
                dist[w] = dist[v] + 1
                order.append(w)
                queue.append(w)
    local = {v: k for k, v in enumerate(order)}
    sub_edges = []
    for v in order:
        lv = local[v]
        for w in adj[v].tolist():
            lw = local.get(w)
            if lw is not None and lv < lw:
                sub_edges.append((lv, lw))
    sub = Graph(len(order), np.array(sorted(sub_edges), dtype=np.int64).reshape(-1, 2))
    return Lightcone(sub, (0, 1), np.array(order, dtype=np.int64), p)


def load_graph(path) -> Graph:
    """Read a graph from JSON (``{"n", "edges"}``) or an ``i j`` edge list."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = json.loads(text)
        return Graph(int(obj["n"]), np.array(obj["edges"], dtype=np.int64).reshape(-1, 2))
    pairs = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            a, b = line.split()[:2]
            pairs.append((int(a), int(b)))
    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    n = int(arr.max()) + 1 if arr.size else 0
    return Graph(n, arr)


def save_graph(g: Graph, path) -> None:
    Path(path).write_text(json.dumps(g.to_dict()))
