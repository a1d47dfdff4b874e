"""Offline remote-pseudoforest solver built on hierarchical nets.

The input metric is rescaled so its diameter is exactly 1/20, and (when n
is large enough relative to k) all distances are floored at a small
constant over k. The floor caps the aspect ratio, so the number of net
levels stays logarithmic in k no matter how skewed the input scale is,
while changing any k-subset's pseudoforest cost by at most the constant.

On the clamped metric we grow nested greedy nets: level l keeps a maximal
set of points pairwise separated by 5^-l/20, each level extending the one
above. Linking every net point to its closest point one level up gives a
tree whose nodes are (point, level) pairs. Selecting k nodes that form an
antichain (no node an ancestor of another) and maximizing the sum of
5^-level values is solved exactly by a knapsack-style dynamic program over
children; the selected nodes map to k distinct points whose pseudoforest
cost is within a constant factor of the best possible.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .costs import pf_cost
from .errors import InternalInvariantError, PreconditionError
from .metric import ClampedMetric, PointSet, diameter, min_offdiag_distance
from .results import DiversitySolution

CLAMP_CONSTANT = 1.0 / 160.0
TARGET_DIAMETER = 1.0 / 20.0

Node = tuple[int, int]  # (level, point index)


@dataclass(frozen=True)
class NetTree:
    levels: list[list[int]]
    parent: dict[Node, Node]
    children: dict[Node, list[Node]]
    depth: int

    @property
    def root(self) -> Node:
        return (0, self.levels[0][0])

    def nodes(self):
        for level, members in enumerate(self.levels):
            for p in members:
                yield (level, p)

    def to_json(self) -> str:
        parents = {
            f"{p}@{lvl}": f"{pp}@{plvl}" for (lvl, p), (plvl, pp) in sorted(self.parent.items())
        }
        return json.dumps({"levels": self.levels, "parents": parents})


@dataclass(frozen=True)
class DpTable:
    values: dict[tuple[Node, int], float]
    picks: dict[tuple[Node, int], list[Node]]


def rescale_and_clamp(ps: PointSet, k: int) -> tuple[ClampedMetric, float]:
    """Rescale to diameter 1/20, then floor distances at (1/160)/k.

    Returns the clamped metric and the scale factor applied to the original
    distances.
    """
    if k < 1:
        raise PreconditionError("k must be a positive integer")
    scaled, scale = _rescale(ps)
    return ClampedMetric(scaled, CLAMP_CONSTANT / k), scale


def _rescale(ps: PointSet) -> tuple[PointSet, float]:
    if ps.n < 2:
        raise PreconditionError("need at least 2 points to rescale")
    diam = diameter(ps)
    if diam <= 0.0:
        raise PreconditionError("all points coincide; diameter is zero")
    scale = TARGET_DIAMETER / diam
    scaled = PointSet.from_matrix(ps.distance_matrix() * scale, validate=False)
    return scaled, scale


def build_net_tree(metric: ClampedMetric, root: int = 0) -> NetTree:
    """Grow nested greedy nets and link each point to its closest coarser
    net point.

    Candidate points are scanned in ascending index order, and a point joins
    level l as soon as it is at distance >= 5^-l/20 from everything already
    in the level. Parent ties break to the lowest index.
    """
    n = metric.n
    if not (0 <= root < n):
        raise PreconditionError(f"root index {root} out of range for n={n}")
    dmat = metric.distance_matrix()
    if n == 1:
        return NetTree(levels=[[root]], parent={}, children={(0, root): []}, depth=0)
    if float(dmat.max()) > TARGET_DIAMETER * (1.0 + 1e-12):
        raise PreconditionError("net tree expects a metric rescaled to diameter <= 1/20")

    min_dist = float(np.min(np.where(np.eye(n, dtype=bool), np.inf, dmat)))
    if min_dist <= 0.0:
        raise PreconditionError("net tree needs all pairwise distances positive (clamp first)")
    depth = max(0, math.ceil(math.log(1.0 / min_dist, 5)))

    in_net = np.zeros(n, dtype=bool)
    in_net[root] = True
    mind = dmat[root].copy()  # distance to the current net
    levels = [[root]]
    for level in range(1, depth + 1):
        sep = 5.0 ** (-level) / 20.0
        for q in range(n):
            if not in_net[q] and mind[q] >= sep:
                in_net[q] = True
                np.minimum(mind, dmat[q], out=mind)
        levels.append([q for q in range(n) if in_net[q]])
    while len(levels[-1]) < n:
        # The log-based depth always suffices with a 20x margin; keep a
        # guarded extension in case of pathological rounding.
        depth += 1
        if depth > 128:
            raise InternalInvariantError("net tree failed to absorb all points")
        sep = 5.0 ** (-depth) / 20.0
        for q in range(n):
            if not in_net[q] and mind[q] >= sep:
                in_net[q] = True
                np.minimum(mind, dmat[q], out=mind)
        levels.append([q for q in range(n) if in_net[q]])

    parent: dict[Node, Node] = {}
    children: dict[Node, list[Node]] = {(lvl, p): [] for lvl, members in enumerate(levels) for p in members}
    for level in range(1, depth + 1):
        prev = levels[level - 1]
        prev_arr = np.asarray(prev)
        prev_set = set(prev)
        for p in levels[level]:
            if p in prev_set:
                par = (level - 1, p)
            else:
                col = dmat[p, prev_arr]
                par = (level - 1, int(prev_arr[int(np.argmin(col))]))
            parent[(level, p)] = par
            children[par].append((level, p))
    return NetTree(levels=levels, parent=parent, children=children, depth=depth)


def dp_antichain(tree: NetTree, k: int) -> tuple[DpTable, list[Node]]:
    """Select k tree nodes, none an ancestor of another, maximizing the sum
    of 5^-level values.

    The table is computed with exact integer weights (5^(depth-level)), so
    reconstruction can test equality safely. Only the winning selection's
    picks are materialized.
    """
    n = len(tree.levels[-1])
    if not (1 <= k <= n):
        raise PreconditionError(f"k must satisfy 1 <= k <= n; got k={k}, n={n}")
    depth = tree.depth
    weight = {lvl: 5 ** (depth - lvl) for lvl in range(depth + 1)}
    table: dict[Node, list[int]] = {}

    for level in range(depth, -1, -1):
        for p in tree.levels[level]:
            node = (level, p)
            kids = tree.children[node]
            row = [-1] * (k + 1)
            row[0] = 0
            if kids and k >= 2:
                fold = _fold_children(table, kids, k)
                for cnt in range(2, k + 1):
                    row[cnt] = fold[cnt]
            row[0] = 0
            if k >= 1:
                row[1] = weight[level]
            table[node] = row

    root = tree.root
    if table[root][k] < 0:
        raise InternalInvariantError("antichain of size k must exist when k <= n")

    picks: dict[tuple[Node, int], list[Node]] = {}
    selected = _reconstruct(tree, table, root, k, picks)
    inv_scale = float(5 ** depth)
    values = {
        (node, cnt): (val / inv_scale if val >= 0 else -math.inf)
        for node, row in table.items()
        for cnt, val in enumerate(row)
    }
    return DpTable(values=values, picks=picks), selected


def _fold_children(table: dict[Node, list[int]], kids: list[Node], k: int) -> list[int]:
    fold = table[kids[0]][:]
    for child in kids[1:]:
        child_row = table[child]
        nxt = [-1] * (k + 1)
        for have in range(k + 1):
            base = fold[have]
            if base < 0:
                continue
            for take in range(0, k + 1 - have):
                add = child_row[take]
                if add < 0:
                    continue
                if base + add > nxt[have + take]:
                    nxt[have + take] = base + add
        fold = nxt
    return fold


def _reconstruct(
    tree: NetTree,
    table: dict[Node, list[int]],
    node: Node,
    count: int,
    picks: dict[tuple[Node, int], list[Node]],
) -> list[Node]:
    if count == 0:
        return []
    level, _ = node
    target = table[node][count]
    if count == 1 and target == 5 ** (tree.depth - level):
        picks[(node, 1)] = [node]
        return [node]
    kids = tree.children[node]
    # Replay the fold to find a split that reproduces the stored optimum.
    folds = [table[kids[0]][:]]
    for child in kids[1:]:
        child_row = table[child]
        prev = folds[-1]
        nxt = [-1] * (len(prev))
        for have in range(len(prev)):
            base = prev[have]
            if base < 0:
                continue
            for take in range(0, len(prev) - have):
                add = child_row[take]
                if add < 0:
                    continue
                if base + add > nxt[have + take]:
                    nxt[have + take] = base + add
        folds.append(nxt)
    chosen: list[Node] = []
    remaining = count
    for pos in range(len(kids) - 1, 0, -1):
        child_row = table[kids[pos]]
        prev = folds[pos - 1]
        found = False
        for take in range(0, remaining + 1):
            if child_row[take] < 0 or prev[remaining - take] < 0:
                continue
            if child_row[take] + prev[remaining - take] == folds[pos][remaining]:
                if take:
                    chosen.extend(_reconstruct(tree, table, kids[pos], take, picks))
                remaining -= take
                found = True
                break
        if not found:
            raise InternalInvariantError("dp reconstruction failed to split the fold")
    chosen.extend(_reconstruct(tree, table, kids[0], remaining, picks))
    chosen.sort()
    picks[(node, count)] = chosen
    return chosen


def pf_offline(ps: PointSet, k: int, root: int = 0) -> DiversitySolution:
    """Constant-factor offline solver for remote-pseudoforest.

    When n >= 2k the metric is clamped (the floor provably costs only an
    additive constant there); for smaller n the true rescaled metric is kept
    unless coincident points force a floor to keep the net depth finite.
    """
    n = ps.n
    if not (2 <= k <= n):
        raise PreconditionError(f"need 2 <= k <= n; got k={k}, n={n}")
    started = time.perf_counter()
    scaled, _scale = _rescale(ps)
    if n >= 2 * k:
        metric = ClampedMetric(scaled, CLAMP_CONSTANT / k)
    elif min_offdiag_distance(scaled) > 0.0:
        metric = ClampedMetric(scaled, 0.0)
    else:
        metric = ClampedMetric(scaled, CLAMP_CONSTANT / k)
    tree = build_net_tree(metric, root)
    _table, nodes = dp_antichain(tree, k)
    points = sorted(p for _lvl, p in nodes)
    if len(set(points)) != k:
        raise InternalInvariantError("antichain nodes must map to distinct points")
    value = pf_cost(ps, points, with_witness=False).value
    return DiversitySolution(
        indices=points,
        value=value,
        objective="pseudoforest",
        algorithm="nets",
        seed=None,
        elapsed_seconds=time.perf_counter() - started,
    )
