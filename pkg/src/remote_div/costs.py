"""Exact evaluators for the three subset cost functions.

* minimum-weight perfect matching, via a bitmask dynamic program,
* minimum spanning tree, via a dense Prim scan,
* pseudoforest cost (sum of nearest-neighbor distances),

plus the threshold-graph component counter and the dyadic component sum
that brackets the MST cost. All evaluators are pure functions over an
immutable point set and an index subset; each returns a `SubsetCostReport`
whose witness re-evaluates to exactly the reported value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalInvariantError, PreconditionError
from .metric import PointSet

MATCHING_EXACT_CAP = 20


@dataclass(frozen=True)
class SubsetCostReport:
    subset: list[int]
    objective: str
    value: float
    witness: list | None = None

    def to_dict(self) -> dict:
        out = {"objective": self.objective, "value": self.value, "subset": list(self.subset)}
        if self.witness is not None:
            out["witness"] = [list(w) for w in self.witness]
        return out


@dataclass(frozen=True)
class ThresholdComponents:
    radius: float
    component_of: dict[int, int]
    count: int


class UnionFind:
    """Array-based union-find with path compression."""

    __slots__ = ("parent",)

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def _as_subset(subset, n: int) -> list[int]:
    idx = sorted(int(i) for i in subset)
    if any(i < 0 or i >= n for i in idx):
        raise PreconditionError(f"subset index out of range for n={n}")
    if len(set(idx)) != len(idx):
        raise PreconditionError("subset indices must be distinct")
    return idx


def _subset_rows(ps: PointSet, subset: list[int], dmat: np.ndarray | None) -> list[list[float]]:
    """Pairwise distances among `subset`, as plain float rows for fast lookup."""
    if dmat is not None:
        return [[float(dmat[i, j]) for j in subset] for i in subset]
    if ps.kind == "matrix":
        m = ps.distance_matrix()
        return [[float(m[i, j]) for j in subset] for i in subset]
    rows = []
    for i in subset:
        d = ps.distances_from(i)
        rows.append([float(d[j]) for j in subset])
    return rows


# ---------------------------------------------------------------------------
# Minimum-weight perfect matching
# ---------------------------------------------------------------------------

def matching_table(rows: list[list[float]]) -> list[float]:
    """DP table over vertex masks: table[mask] = min perfect-matching weight
    of the points selected by `mask`. Odd-popcount masks stay at +inf.
    """
    s = len(rows)
    full = 1 << s
    inf = math.inf
    table = [inf] * full
    table[0] = 0.0
    for mask in range(1, full):
        if mask.bit_count() % 2 == 1:
            continue
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        row = rows[i]
        best = inf
        sub = rest
        while sub:
            j = (sub & -sub).bit_length() - 1
            sub ^= 1 << j
            cand = row[j] + table[rest ^ (1 << j)]
            if cand < best:
                best = cand
        table[mask] = best
    return table


def _matching_witness(rows: list[list[float]], table: list[float]) -> list[tuple[int, int]]:
    """Recover one optimal pairing (local indices) by replaying the DP."""
    s = len(rows)
    mask = (1 << s) - 1
    pairs = []
    while mask:
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        sub = rest
        chosen = -1
        while sub:
            j = (sub & -sub).bit_length() - 1
            sub ^= 1 << j
            if rows[i][j] + table[rest ^ (1 << j)] == table[mask]:
                chosen = j
                break
        if chosen < 0:
            raise InternalInvariantError("matching witness reconstruction failed")
        pairs.append((i, chosen))
        mask = rest ^ (1 << chosen)
    return pairs


def matching_value(rows: list[list[float]]) -> float:
    if len(rows) == 0:
        return 0.0
    return matching_table(rows)[(1 << len(rows)) - 1]


def mwm_exact(
    ps: PointSet,
    subset,
    *,
    dmat: np.ndarray | None = None,
    with_witness: bool = True,
) -> SubsetCostReport:
    """Exact minimum-weight perfect matching cost of an even subset.

    Raises on odd subsets and on subsets above MATCHING_EXACT_CAP, which
    signals the caller to shrink the instance.
    """
    idx = _as_subset(subset, ps.n)
    if len(idx) % 2 != 0:
        raise PreconditionError(f"matching needs an even subset; got size {len(idx)}")
    if len(idx) > MATCHING_EXACT_CAP:
        raise PreconditionError(
            f"subset size {len(idx)} exceeds exact matching cap {MATCHING_EXACT_CAP}"
        )
    if len(idx) == 0:
        return SubsetCostReport(idx, "mwm", 0.0, [] if with_witness else None)
    rows = _subset_rows(ps, idx, dmat)
    table = matching_table(rows)
    value = table[(1 << len(idx)) - 1]
    witness = None
    if with_witness:
        witness = sorted(
            tuple(sorted((idx[a], idx[b]))) for a, b in _matching_witness(rows, table)
        )
    return SubsetCostReport(idx, "mwm", value, witness)


# ---------------------------------------------------------------------------
# Minimum spanning tree
# ---------------------------------------------------------------------------

def mst_value_and_edges(rows: list[list[float]]) -> tuple[float, list[tuple[int, int]]]:
    """Dense Prim over a complete graph given as distance rows."""
    s = len(rows)
    if s == 1:
        return 0.0, []
    in_tree = [False] * s
    best = rows[0][:]
    best_from = [0] * s
    in_tree[0] = True
    best[0] = math.inf
    total = 0.0
    edges = []
    for _ in range(s - 1):
        u = -1
        u_key = math.inf
        for v in range(s):
            if not in_tree[v] and best[v] < u_key:
                u_key = best[v]
                u = v
        if u < 0:
            raise InternalInvariantError("Prim scan ran out of reachable vertices")
        in_tree[u] = True
        total += u_key
        edges.append((min(u, best_from[u]), max(u, best_from[u])))
        row = rows[u]
        for v in range(s):
            if not in_tree[v] and row[v] < best[v]:
                best[v] = row[v]
                best_from[v] = u
    return total, edges


def mst_cost(
    ps: PointSet,
    subset,
    *,
    dmat: np.ndarray | None = None,
    with_witness: bool = True,
) -> SubsetCostReport:
    """Minimum spanning tree weight over the induced complete graph."""
    idx = _as_subset(subset, ps.n)
    if len(idx) < 1:
        raise PreconditionError("mst needs a nonempty subset")
    rows = _subset_rows(ps, idx, dmat)
    value, edges = mst_value_and_edges(rows)
    witness = None
    if with_witness:
        witness = sorted((idx[a], idx[b]) for a, b in edges)
    return SubsetCostReport(idx, "mst", value, witness)


# ---------------------------------------------------------------------------
# Pseudoforest cost
# ---------------------------------------------------------------------------

def pf_value(rows: list[list[float]]) -> float:
    s = len(rows)
    total = 0.0
    for i in range(s):
        row = rows[i]
        nn = math.inf
        for j in range(s):
            if j != i and row[j] < nn:
                nn = row[j]
        total += nn
    return total


def pf_cost(
    ps: PointSet,
    subset,
    *,
    dmat: np.ndarray | None = None,
    with_witness: bool = True,
) -> SubsetCostReport:
    """Sum over subset members of the distance to the nearest other member."""
    idx = _as_subset(subset, ps.n)
    if len(idx) < 2:
        raise PreconditionError("pseudoforest cost needs at least 2 points")
    rows = _subset_rows(ps, idx, dmat)
    total = 0.0
    assignment = []
    for a, row in enumerate(rows):
        nn = math.inf
        nn_at = -1
        for b in range(len(rows)):
            if b != a and row[b] < nn:
                nn = row[b]
                nn_at = b
        total += nn
        assignment.append((idx[a], idx[nn_at]))
    return SubsetCostReport(idx, "pf", total, assignment if with_witness else None)


# ---------------------------------------------------------------------------
# Threshold graphs
# ---------------------------------------------------------------------------

def threshold_components(
    ps: PointSet,
    subset,
    r: float,
    *,
    dmat: np.ndarray | None = None,
) -> ThresholdComponents:
    """Connected components of the graph joining pairs at distance <= r.

    Component ids are the smallest member index of each component.
    """
    idx = _as_subset(subset, ps.n)
    if len(idx) < 1:
        raise PreconditionError("need at least one point")
    if r < 0:
        raise PreconditionError("radius must be nonnegative")
    rows = _subset_rows(ps, idx, dmat)
    uf = UnionFind(len(idx))
    for a in range(len(idx)):
        row = rows[a]
        for b in range(a + 1, len(idx)):
            if row[b] <= r:
                uf.union(a, b)
    smallest: dict[int, int] = {}
    for a in range(len(idx)):
        root = uf.find(a)
        if root not in smallest or idx[a] < smallest[root]:
            smallest[root] = idx[a]
    component_of = {idx[a]: smallest[uf.find(a)] for a in range(len(idx))}
    return ThresholdComponents(float(r), component_of, len(smallest))


def component_count(rows: list[list[float]], r: float) -> int:
    """Number of components of the threshold graph at radius r."""
    s = len(rows)
    uf = UnionFind(s)
    count = s
    for a in range(s):
        row = rows[a]
        for b in range(a + 1, s):
            if row[b] <= r and uf.union(a, b):
                count -= 1
    return count


def mst_component_sum(ps: PointSet, subset, *, dmat: np.ndarray | None = None) -> float:
    """Sum over dyadic radii 2^i of 2^i * (components(2^i) - 1).

    The window of radii that can change the component count runs from just
    below the minimum pairwise distance up to the diameter; radii below the
    window all leave every point isolated and contribute a closed-form
    geometric tail, radii above contribute zero. The MST weight of the
    subset always lies in [1/2, 1] times this sum.
    """
    idx = _as_subset(subset, ps.n)
    if len(idx) < 2:
        raise PreconditionError("component sum needs at least 2 points")
    rows = _subset_rows(ps, idx, dmat)
    s = len(idx)
    dmin = math.inf
    dmax = 0.0
    for a in range(s):
        row = rows[a]
        for b in range(a + 1, s):
            d = row[b]
            if d < dmin:
                dmin = d
            if d > dmax:
                dmax = d
    if dmin <= 0.0:
        raise PreconditionError("component sum undefined for coincident points")
    lo = math.floor(math.log2(dmin)) - 1
    hi = math.ceil(math.log2(dmax))
    total = math.ldexp(1.0, lo) * (s - 1)  # tail: all radii below 2^lo leave s singletons
    for i in range(lo, hi + 1):
        radius = math.ldexp(1.0, i)
        total += radius * (component_count(rows, radius) - 1)
    return total
