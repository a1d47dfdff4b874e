"""Independent reference implementations used to check the package.

These deliberately use different algorithms from the library code: perfect
matchings are enumerated pairing by pairing, spanning trees come from
Prüfer sequences, and antichain selection is a pruned exhaustive search.
"""
from __future__ import annotations

import itertools
import math


def mwm_by_pairings(rows: list[list[float]]) -> float:
    """Minimum perfect-matching weight by enumerating all pairings."""
    points = list(range(len(rows)))
    if len(points) % 2 != 0:
        raise ValueError("need an even number of points")

    def recurse(remaining: tuple[int, ...]) -> float:
        if not remaining:
            return 0.0
        first = remaining[0]
        rest = remaining[1:]
        best = math.inf
        for pos, partner in enumerate(rest):
            sub = rest[:pos] + rest[pos + 1 :]
            cost = rows[first][partner] + recurse(sub)
            if cost < best:
                best = cost
        return best

    return recurse(tuple(points))


def mst_by_pruefer(rows: list[list[float]]) -> float:
    """Minimum spanning tree weight by enumerating all labeled trees.

    Feasible for up to ~7 points (s^(s-2) trees).
    """
    s = len(rows)
    if s == 1:
        return 0.0
    if s == 2:
        return rows[0][1]
    best = math.inf
    for seq in itertools.product(range(s), repeat=s - 2):
        edges = _pruefer_to_edges(seq, s)
        cost = sum(rows[a][b] for a, b in edges)
        if cost < best:
            best = cost
    return best


def _pruefer_to_edges(seq: tuple[int, ...], s: int) -> list[tuple[int, int]]:
    degree = [1] * s
    for v in seq:
        degree[v] += 1
    edges = []
    remaining = list(seq)
    leaves = sorted(v for v in range(s) if degree[v] == 1)
    for v in remaining:
        leaf = leaves.pop(0)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            # Keep the leaf pool sorted so the construction is canonical.
            lo, hi = 0, len(leaves)
            while lo < hi:
                mid = (lo + hi) // 2
                if leaves[mid] < v:
                    lo = mid + 1
                else:
                    hi = mid
            leaves.insert(lo, v)
    edges.append((leaves[0], leaves[1]))
    return edges


def max_antichain_value(tree, k: int) -> float:
    """Best sum of 5^-level over k-node antichains, by pruned search."""
    nodes = sorted(tree.nodes())
    values = [5.0 ** (-lvl) for lvl, _ in nodes]

    ancestors: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for node in nodes:
        chain = set()
        cur = node
        while cur in tree.parent:
            cur = tree.parent[cur]
            chain.add(cur)
        ancestors[node] = chain

    order = sorted(range(len(nodes)), key=lambda i: -values[i])
    best = -math.inf

    def recurse(pos: int, taken: list[int], total: float) -> None:
        nonlocal best
        if len(taken) == k:
            best = max(best, total)
            return
        if pos >= len(order):
            return
        need = k - len(taken)
        if len(order) - pos < need:
            return
        # Optimistic bound: grab the next `need` values ignoring structure.
        bound = total + sum(values[order[i]] for i in range(pos, pos + need))
        if bound <= best:
            return
        idx = order[pos]
        node = nodes[idx]
        compatible = all(
            node not in ancestors[nodes[t]] and nodes[t] not in ancestors[node] and nodes[t] != node
            for t in taken
        )
        if compatible:
            taken.append(idx)
            recurse(pos + 1, taken, total + values[idx])
            taken.pop()
        recurse(pos + 1, taken, total)

    recurse(0, [], 0.0)
    return best
