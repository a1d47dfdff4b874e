from __future__ import annotations

import numpy as np
import pytest

from remote_div import (
    ClampedMetric,
    Objective,
    PointSet,
    PreconditionError,
    RunConfig,
    clamp_metric,
    diameter,
    distance,
    dump_pointset,
    load_pointset,
    pf_cost,
)
from conftest import line_pointset, random_euclidean, random_matrix_metric


def test_distance_345_triangle():
    ps = PointSet.from_coords([[0.0, 0.0], [3.0, 4.0]])
    assert distance(ps, 0, 1) == 5.0
    assert distance(ps, 1, 0) == 5.0


def test_distance_identity_is_zero():
    ps = random_euclidean(3, 7)
    for i in range(ps.n):
        assert distance(ps, i, i) == 0.0


def test_matrix_entry_readback():
    m = np.array([[0.0, 4.0, 5.0], [4.0, 0.0, 7.25], [5.0, 7.25, 0.0]])
    ps = PointSet.from_matrix(m)
    assert distance(ps, 1, 2) == 7.25


def test_distance_index_out_of_range():
    ps = line_pointset([0.0, 1.0])
    with pytest.raises(PreconditionError):
        distance(ps, 0, 2)


def test_diameter_line(line3):
    assert diameter(line3) == 10.0


def test_diameter_single_point():
    assert diameter(PointSet.from_coords([[4.2]])) == 0.0


def test_diameter_two_points():
    assert diameter(line_pointset([1.0, 3.5])) == 2.5


def test_load_json_basic():
    ps = load_pointset('{"dim":1,"points":[[0],[5]]}', "json")
    assert ps.n == 2
    assert distance(ps, 0, 1) == 5.0


def test_load_matrix_symmetry_error_names_indices():
    doc = "0,3,1\n4,0,1\n1,1,0\n"
    with pytest.raises(PreconditionError, match=r"\(0,1\)"):
        load_pointset(doc, "matrix-csv")


def test_load_matrix_triangle_error():
    doc = "0,1,10\n1,0,2\n10,2,0\n"
    with pytest.raises(PreconditionError, match="triangle"):
        load_pointset(doc, "matrix-csv")


def test_load_matrix_negative_entry():
    doc = "0,-1\n-1,0\n"
    with pytest.raises(PreconditionError, match="negative"):
        load_pointset(doc, "matrix-csv")


def test_load_csv_with_header():
    ps = load_pointset("# dim=2\n0,0\n3,4\n", "csv")
    assert ps.dim == 2
    assert distance(ps, 0, 1) == 5.0


def test_roundtrip_matrix_bit_exact():
    ps = random_matrix_metric(11, 9)
    doc = dump_pointset(ps, "matrix-csv")
    again = load_pointset(doc, "matrix-csv")
    assert np.array_equal(ps.distance_matrix(), again.distance_matrix())
    # a second round trip is also stable
    assert dump_pointset(again, "matrix-csv") == doc


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_roundtrip_euclidean(fmt):
    ps = random_euclidean(5, 8, dim=3)
    again = load_pointset(dump_pointset(ps, fmt), fmt)
    assert np.array_equal(ps.coords, again.coords)


def test_clamp_applies_floor():
    ps = line_pointset([0.0, 0.001])
    cm = clamp_metric(ps, 0.4, 4)
    assert cm.distance(0, 1) == pytest.approx(0.1)
    assert cm.distance(0, 0) == 0.0


def test_clamp_inactive_above_floor():
    ps = line_pointset([0.0, 5.0])
    cm = ClampedMetric(ps, 0.1)
    assert cm.distance(0, 1) == 5.0


def test_clamp_changes_pf_by_at_most_c():
    from itertools import combinations

    ps = random_euclidean(17, 8, scale=0.05)
    k = 3
    c = 0.02
    cm = clamp_metric(ps, c, k)
    base = ps.distance_matrix()
    clamped = PointSet.from_matrix(cm.distance_matrix(), validate=False)
    for subset in combinations(range(ps.n), k):
        before = pf_cost(ps, list(subset)).value
        after = pf_cost(clamped, list(subset)).value
        assert after >= before - 1e-12
        assert after - before <= c + 1e-12


def test_triangle_inequality_exhaustive():
    for seed, n in [(1, 12), (2, 25), (3, 50)]:
        ps = random_euclidean(seed, n, dim=3)
        dmat = ps.distance_matrix()
        for j in range(n):
            assert np.all(dmat <= dmat[:, j][:, None] + dmat[None, j, :] + 1e-9)


def test_clamped_metric_preserves_triangle():
    ps = random_matrix_metric(23, 20)
    cm = ClampedMetric(ps, 0.3)
    dmat = cm.distance_matrix()
    n = ps.n
    for j in range(n):
        assert np.all(dmat <= dmat[:, j][:, None] + dmat[None, j, :] + 1e-9)


def test_restrict_preserves_distances():
    ps = random_euclidean(9, 10)
    sub = ps.restrict([1, 4, 7])
    assert sub.n == 3
    assert sub.distance(0, 2) == pytest.approx(ps.distance(1, 7))


def test_runconfig_validation():
    RunConfig(k=2, epsilon=1.0, seed=0, repeats=1)
    with pytest.raises(PreconditionError):
        RunConfig(k=0)
    with pytest.raises(PreconditionError):
        RunConfig(k=2, epsilon=0.0)
    with pytest.raises(PreconditionError):
        RunConfig(k=2, epsilon=1.5)
    with pytest.raises(PreconditionError):
        RunConfig(k=2, repeats=0)


def test_objective_parse():
    assert Objective.parse("matching") is Objective.REMOTE_MATCHING
    assert Objective.parse("pseudoforest") is Objective.REMOTE_PSEUDOFOREST
    with pytest.raises(PreconditionError):
        Objective.parse("clique")
