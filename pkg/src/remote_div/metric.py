"""Finite metric spaces: point sets, distance evaluation, and file I/O.

A `PointSet` is either a set of coordinate vectors under the Euclidean
distance or an explicit symmetric distance matrix. Matrix inputs are
validated on load (symmetry, zero diagonal, nonnegativity, triangle
inequality) with an absolute tolerance of 1e-9; algorithms themselves
compare distances exactly, since they only need a consistent total order.

Point identity is by index into the original dataset. Every subset that
the algorithms pass around is a list of indices, never a copy of the
coordinates, so coresets can be composed across dataset parts.
"""
from __future__ import annotations

import enum
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

VALIDATION_ATOL = 1e-9


class Objective(enum.Enum):
    REMOTE_MATCHING = "matching"
    REMOTE_PSEUDOFOREST = "pseudoforest"

    @classmethod
    def parse(cls, name: str) -> "Objective":
        for member in cls:
            if member.value == name:
                return member
        raise PreconditionError(f"unknown objective {name!r}; expected 'matching' or 'pseudoforest'")


class PointSet:
    """An immutable finite metric space over points 0..n-1.

    Construct through `from_coords` (Euclidean) or `from_matrix` (explicit
    distances). Euclidean distances are computed on demand; call
    `distance_matrix()` once and reuse it when an algorithm needs repeated
    all-pairs access.
    """

    __slots__ = ("kind", "n", "dim", "_coords", "_matrix")

    def __init__(self, kind: str, coords: np.ndarray | None, matrix: np.ndarray | None):
        self.kind = kind
        self._coords = coords
        self._matrix = matrix
        if kind == "euclidean":
            assert coords is not None
            self.n = coords.shape[0]
            self.dim = coords.shape[1]
        else:
            assert matrix is not None
            self.n = matrix.shape[0]
            self.dim = None

    @classmethod
    def from_coords(cls, coords) -> "PointSet":
        arr = np.asarray(coords, dtype=np.float64)
        if arr.ndim != 2:
            raise PreconditionError("coordinates must be a 2-D array of shape (n, dim)")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise PreconditionError("need n >= 1 points of dimension >= 1")
        if not np.all(np.isfinite(arr)):
            raise PreconditionError("coordinates must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        return cls("euclidean", arr, None)

    @classmethod
    def from_matrix(cls, matrix, validate: bool = True) -> "PointSet":
        arr = np.asarray(matrix, dtype=np.float64).copy()
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise PreconditionError("distance matrix must be square")
        if arr.shape[0] < 1:
            raise PreconditionError("need n >= 1 points")
        if validate:
            arr = _validate_matrix(arr)
        arr.flags.writeable = False
        return cls("matrix", None, arr)

    @property
    def coords(self) -> np.ndarray:
        if self._coords is None:
            raise PreconditionError("point set has no coordinates (matrix kind)")
        return self._coords

    def distance(self, i: int, j: int) -> float:
        _check_index(i, self.n)
        _check_index(j, self.n)
        if i == j:
            return 0.0
        if self.kind == "euclidean":
            diff = self._coords[i] - self._coords[j]
            return float(np.sqrt(np.dot(diff, diff)))
        return float(self._matrix[i, j])

    def distances_from(self, i: int) -> np.ndarray:
        """All distances from point i, as a length-n array."""
        _check_index(i, self.n)
        if self.kind == "euclidean":
            diff = self._coords - self._coords[i]
            return np.sqrt(np.einsum("ij,ij->i", diff, diff))
        return self._matrix[i].copy()

    def distance_matrix(self) -> np.ndarray:
        """Dense n-by-n distance matrix. O(n^2) memory; caller keeps it."""
        if self.kind == "matrix":
            return self._matrix
        out = np.empty((self.n, self.n), dtype=np.float64)
        for i in range(self.n):
            out[i] = self.distances_from(i)
            out[i, i] = 0.0
        return out

    def restrict(self, indices: list[int]) -> "PointSet":
        """Sub-point-set over `indices`; local index p maps to indices[p]."""
        idx = list(indices)
        if len(idx) == 0:
            raise PreconditionError("cannot restrict to an empty index list")
        if len(set(idx)) != len(idx):
            raise PreconditionError("restriction indices must be distinct")
        for i in idx:
            _check_index(i, self.n)
        if self.kind == "euclidean":
            return PointSet.from_coords(self._coords[idx])
        sub = self._matrix[np.ix_(idx, idx)].copy()
        sub.flags.writeable = False
        return PointSet("matrix", None, sub)

    def __repr__(self) -> str:
        return f"PointSet(kind={self.kind!r}, n={self.n})"


class ClampedMetric:
    """A metric with all off-diagonal distances floored at a constant.

    d(i, j) = max(base distance, floor) for i != j, and d(i, i) = 0. The
    floor preserves the triangle inequality whenever the base satisfies it.
    """

    __slots__ = ("base", "floor")

    def __init__(self, base: PointSet, floor: float):
        if floor < 0:
            raise PreconditionError("clamp floor must be nonnegative")
        self.base = base
        self.floor = float(floor)

    @property
    def n(self) -> int:
        return self.base.n

    def distance(self, i: int, j: int) -> float:
        if i == j:
            _check_index(i, self.n)
            return 0.0
        return max(self.base.distance(i, j), self.floor)

    def distance_matrix(self) -> np.ndarray:
        out = np.maximum(self.base.distance_matrix(), self.floor)
        np.fill_diagonal(out, 0.0)
        return out


@dataclass(frozen=True)
class RunConfig:
    """Parameters shared by the randomized pipelines."""

    k: int
    epsilon: float = 1.0
    seed: int = 0
    repeats: int = 20
    objective: Objective = Objective.REMOTE_MATCHING

    def __post_init__(self):
        if self.k < 1:
            raise PreconditionError("k must be a positive integer")
        if not (0.0 < self.epsilon <= 1.0):
            raise PreconditionError("epsilon must lie in (0, 1]")
        if self.repeats < 1:
            raise PreconditionError("repeats must be a positive integer")
        if self.seed < 0 or self.seed >= 2**64:
            raise PreconditionError("seed must fit in 64 unsigned bits")


def distance(ps: PointSet, i: int, j: int) -> float:
    return ps.distance(i, j)


def diameter(ps) -> float:
    """Maximum pairwise distance; 0 for a single point."""
    if ps.n == 1:
        return 0.0
    dmat = ps.distance_matrix()
    return float(dmat.max())


def min_offdiag_distance(ps) -> float:
    """Smallest distance between two distinct points."""
    if ps.n < 2:
        raise PreconditionError("need at least 2 points")
    dmat = np.array(ps.distance_matrix(), copy=True)
    np.fill_diagonal(dmat, np.inf)
    return float(dmat.min())


def clamp_metric(ps: PointSet, c: float, k: int) -> ClampedMetric:
    """Floor all off-diagonal distances at c/k."""
    if c <= 0:
        raise PreconditionError("c must be positive")
    if k < 1:
        raise PreconditionError("k must be a positive integer")
    return ClampedMetric(ps, c / k)


# ---------------------------------------------------------------------------
# File formats. Three on-disk forms are supported:
#   json       {"dim": d, "points": [[f64, ...], ...]}
#   csv        one point per row, optional header line "# dim=<d>"
#   matrix-csv n rows of n comma-separated decimals, zero diagonal
# ---------------------------------------------------------------------------

FORMATS = ("json", "csv", "matrix-csv")


def load_pointset(document: str | bytes, format: str) -> PointSet:
    """Parse and validate a point file. See module docstring for grammars."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    if format == "json":
        return _load_json(document)
    if format == "csv":
        return _load_csv(document)
    if format == "matrix-csv":
        return _load_matrix_csv(document)
    raise PreconditionError(f"unknown format {format!r}; expected one of {FORMATS}")


def dump_pointset(ps: PointSet, format: str) -> str:
    """Serialize so that load_pointset(dump_pointset(ps)) preserves distances."""
    if format == "json":
        if ps.kind != "euclidean":
            raise PreconditionError("json format stores coordinates; point set has none")
        points = [[float(v) for v in row] for row in ps.coords]
        return json.dumps({"dim": ps.dim, "points": points})
    if format == "csv":
        if ps.kind != "euclidean":
            raise PreconditionError("csv format stores coordinates; point set has none")
        lines = [f"# dim={ps.dim}"]
        lines.extend(",".join(repr(float(v)) for v in row) for row in ps.coords)
        return "\n".join(lines) + "\n"
    if format == "matrix-csv":
        dmat = ps.distance_matrix()
        lines = [",".join(repr(float(v)) for v in row) for row in dmat]
        return "\n".join(lines) + "\n"
    raise PreconditionError(f"unknown format {format!r}; expected one of {FORMATS}")


def _load_json(text: str) -> PointSet:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"invalid JSON point file: {exc}") from exc
    if not isinstance(obj, dict) or "points" not in obj:
        raise PreconditionError("JSON point file must be an object with a 'points' field")
    points = obj["points"]
    dim = obj.get("dim")
    try:
        arr = np.asarray(points, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise PreconditionError(f"invalid point rows: {exc}") from exc
    if arr.ndim != 2:
        raise PreconditionError("points must be a list of equal-length coordinate rows")
    if dim is not None and int(dim) != arr.shape[1]:
        raise PreconditionError(f"declared dim={dim} but rows have {arr.shape[1]} fields")
    return PointSet.from_coords(arr)


def _load_csv(text: str) -> PointSet:
    declared_dim = None
    rows = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            stripped = line.lstrip("#").strip()
            if stripped.startswith("dim="):
                declared_dim = int(stripped[4:])
            continue
        try:
            rows.append([float(fieldval) for fieldval in line.split(",")])
        except ValueError as exc:
            raise PreconditionError(f"csv line {lineno}: {exc}") from exc
    if not rows:
        raise PreconditionError("csv point file contains no points")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise PreconditionError(f"csv rows have inconsistent field counts: {sorted(widths)}")
    if declared_dim is not None and declared_dim != len(rows[0]):
        raise PreconditionError(f"declared dim={declared_dim} but rows have {len(rows[0])} fields")
    return PointSet.from_coords(np.asarray(rows, dtype=np.float64))


def _load_matrix_csv(text: str) -> PointSet:
    rows = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(fieldval) for fieldval in line.split(",")])
        except ValueError as exc:
            raise PreconditionError(f"matrix-csv line {lineno}: {exc}") from exc
    if not rows:
        raise PreconditionError("matrix-csv file contains no rows")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise PreconditionError(f"matrix-csv must be square; got {n} rows of widths {[len(r) for r in rows]}")
    return PointSet.from_matrix(np.asarray(rows, dtype=np.float64))


def _validate_matrix(arr: np.ndarray) -> np.ndarray:
    n = arr.shape[0]
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("distance matrix entries must be finite")
    bad = np.argwhere(arr < -VALIDATION_ATOL)
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise PreconditionError(f"negative distance at ({i},{j}): {arr[i, j]}")
    asym = np.abs(arr - arr.T)
    bad = np.argwhere(asym > VALIDATION_ATOL)
    if bad.size:
        i, j = sorted(int(v) for v in bad[0])
        raise PreconditionError(
            f"asymmetric distances at ({i},{j}): {arr[i, j]} vs {arr[j, i]}"
        )
    diag = np.abs(np.diagonal(arr))
    if diag.max(initial=0.0) > VALIDATION_ATOL:
        i = int(np.argmax(diag))
        raise PreconditionError(f"nonzero diagonal at ({i},{i}): {arr[i, i]}")
    # Normalize round-trip noise, then check the triangle inequality exactly
    # once on the cleaned matrix.
    arr = np.maximum((arr + arr.T) / 2.0, 0.0)
    np.fill_diagonal(arr, 0.0)
    for j in range(n):
        slack = arr - (arr[:, j][:, None] + arr[None, j, :])
        bad = np.argwhere(slack > VALIDATION_ATOL)
        if bad.size:
            i, l = (int(v) for v in bad[0])
            raise PreconditionError(
                f"triangle inequality violated for ({i},{j},{l}): "
                f"{arr[i, l]} > {arr[i, j]} + {arr[j, l]}"
            )
    return arr


def _check_index(i: int, n: int) -> None:
    if not (0 <= i < n):
        raise PreconditionError(f"point index {i} out of range for n={n}")
