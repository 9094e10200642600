"""Greedy single/double-flip local search and degree-3 HLZ local improvement."""

from __future__ import annotations

import numpy as np

from ..graphs import Cut, Graph, cut_value

__all__ = [
    "flip_gains",
    "local_search",
    "local_search_to_convergence",
    "is_local_optimum",
    "hlz_local_improve",
]


def _bits(g: Graph, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (g.n,):
        raise ValueError(f"expected bit vector of length {g.n}, got shape {x.shape}")
    return x.astype(np.uint8).copy()


def _same_counts(g: Graph, x: np.ndarray) -> np.ndarray:
    """Number of neighbours on the same side, per vertex."""
    if g.m == 0:
        return np.zeros(g.n, dtype=np.int64)
    i, j = g.edges[:, 0], g.edges[:, 1]
    s = (x[i] == x[j]).astype(np.int64)
    return np.bincount(i, s, minlength=g.n).astype(np.int64) + np.bincount(j, s, minlength=g.n).astype(np.int64)


def flip_gains(g: Graph, x) -> np.ndarray:
    """Change in cut value from flipping each single vertex."""
    x = _bits(g, x)
    same = _same_counts(g, x)
    return 2 * same - g.degrees


def _pair_gain(gu: int, gv: int, same_side: bool) -> int:
    # the shared edge is counted in both single gains but does not change
    return gu + gv - 2 if same_side else gu + gv + 2


def local_search(g: Graph, x) -> Cut:
    """One pass of improving single flips, then one pass of improving edge-pair flips."""
    x = _bits(g, x)
    adj = g.adjacency
    gain = flip_gains(g, x)

    def flip(v):
        gain[v] = -gain[v]
        for w in adj[v].tolist():
            # w's edge to v toggles between same-side and cut
            gain[w] += -2 if x[w] == x[v] else 2
        x[v] ^= 1

    for v in range(g.n):
        if gain[v] > 0:
            flip(v)
    for u, v in g.edges.tolist():
        if _pair_gain(int(gain[u]), int(gain[v]), x[u] == x[v]) > 0:
            flip(u)
            flip(v)
    return Cut(x, cut_value(g, x))


def local_search_to_convergence(g: Graph, x, max_passes: int | None = None) -> Cut:
    """Repeat :func:`local_search` until a full pass changes nothing."""
    cut = Cut(_bits(g, x), cut_value(g, x))
    passes = 0
    while max_passes is None or passes < max_passes:
        nxt = local_search(g, cut.assignment)
        passes += 1
        if np.array_equal(nxt.assignment, cut.assignment):
            break
        cut = nxt
    return cut


def is_local_optimum(g: Graph, x) -> bool:
    """True when no single flip and no edge-pair flip strictly improves the cut."""
    x = _bits(g, x)
    gain = flip_gains(g, x)
    if np.any(gain > 0):
        return False
    for u, v in g.edges.tolist():
        if _pair_gain(int(gain[u]), int(gain[v]), x[u] == x[v]) > 0:
            return False
    return True


# -- HLZ local improvement ---------------------------------------------------

def _flip_set_gain(g: Graph, x: np.ndarray, vs) -> int:
    y = x.copy()
    y[list(vs)] ^= 1
    return cut_value(g, y) - cut_value(g, x)


def _v2_chains(g: Graph, x: np.ndarray, same: np.ndarray):
    """Maximal chains of V2 vertices linked by uncut edges.

    Every V2 vertex has exactly two uncut edges, so the chains are disjoint
    paths or cycles.  Yields ``("path", [u, v1, ..., vk, w])`` and
    ``("cycle", [v1, ..., vk])`` in order of their first V2 vertex.
    """
    in_v2 = same == 2
    adj = g.adjacency
    uncut = [adj[v][x[adj[v]] == x[v]].tolist() for v in range(g.n)]
    seen = np.zeros(g.n, dtype=bool)

    def walk(s, first):
        prev, cur, part = s, first, []
        while in_v2[cur] and cur != s:
            seen[cur] = True
            part.append(cur)
            prev, cur = cur, next(w for w in uncut[cur] if w != prev)
        return part, cur

    for s in np.nonzero(in_v2)[0].tolist():
        if seen[s]:
            continue
        seen[s] = True
        fwd, end0 = walk(s, uncut[s][0])
        if end0 == s:
            yield "cycle", [s] + fwd
            continue
        bwd, end1 = walk(s, uncut[s][1])
        yield "path", [end1] + bwd[::-1] + [s] + fwd + [end0]


def hlz_local_improve(g: Graph, x, max_moves: int | None = None) -> Cut:
    """HLZ moves until none increases the cut (graphs of maximum degree 3).

    (a) flip a vertex with all neighbours on its side, choosing the one with
        the fewest such neighbours (lowest index on ties);
    (b) along a path of uncut edges whose internal vertices have exactly two
        same-side neighbours, flip every other internal vertex;
    (c) the same on a closed cycle of such vertices.

    Moves are tried in that order; a move is applied only if it strictly
    increases the cut.
    """
    if g.n and g.degrees.max() > 3:
        raise ValueError("HLZ moves need maximum degree <= 3")
    x = _bits(g, x)
    moves = 0
    while max_moves is None or moves < max_moves:
        same = _same_counts(g, x)
        v3 = np.nonzero(same == 3)[0]
        if len(v3):
            in_v3 = same == 3
            counts = [int(np.count_nonzero(in_v3[g.adjacency[v]])) for v in v3.tolist()]
            v = int(v3[int(np.argmin(counts))])
            x[v] ^= 1
            moves += 1
            continue
        applied = False
        chains = list(_v2_chains(g, x, same))
        for kind in ("path", "cycle"):
            for k, seq in chains:
                if k != kind:
                    continue
                if kind == "path":
                    inner = seq[1:-1]
                    if seq[-1] < seq[0]:
                        inner = inner[::-1]
                    flips = inner[0::2]  # v1, v3, ...
                else:
                    flips = seq[1::2]  # v2, v4, ...
                if flips and _flip_set_gain(g, x, flips) > 0:
                    x[flips] ^= 1
                    applied = True
                    break
            if applied:
                break
        if not applied:
            break
        moves += 1
    return Cut(x, cut_value(g, x))
