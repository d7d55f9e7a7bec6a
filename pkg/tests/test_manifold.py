import numpy as np
import pytest

from ahgeom import ChartManifold, models, validate
from ahgeom.manifold import (
    DegenerateFrameError,
    ManifoldError,
    antiholomorphic_pair,
    gram_schmidt,
    random_frame,
    rng_for,
    sample_frame,
    sample_points,
)


def test_from_dict_round_trip():
    M = models.manifold_by_name("cp2")
    assert ChartManifold.from_dict(M.to_dict()) == M


def test_metric_and_J_values():
    M = models.manifold_by_name("s2")
    p = np.array([1.0, 0.5])
    assert np.allclose(M.metric(p), np.diag([1.0, np.sin(1.0) ** 2]), rtol=0, atol=1e-15)
    C = models.manifold_by_name("flat-c2")
    J = C.complex_structure(np.zeros(4))
    assert np.array_equal(J @ J, -np.eye(4))
    assert np.array_equal(J @ np.eye(4)[:, 0], np.eye(4)[:, 1])


@pytest.mark.parametrize(
    "g, J, message",
    [
        ([["1", "0"], ["0", "1 +"]], None, r"g\[1\]\[1\].*offset 3"),
        ([["1", "0"], ["0", "x3"]], None, "out of range"),
        ([["1", "0"]], None, "2x2"),
        ([["1", "0"], ["0", "1"]], [["0", "1"], ["1"]], "J"),
    ],
)
def test_malformed_definitions_are_rejected(g, J, message):
    with pytest.raises(ManifoldError, match=message):
        M = ChartManifold.create("bad", 2, [[0, 1], [0, 1]], g, J)
        M.g_expr
        M.J_expr


def test_validation_catches_structural_failures():
    base = dict(name="t", dim=2, domain=[[-1, 1], [-1, 1]])
    indefinite = ChartManifold.create(g=[["1", "0"], ["0", "-1"]], **base)
    assert not validate(indefinite).passed
    asym = ChartManifold.create(g=[["1", "x1"], ["0", "1"]], **base)
    assert validate(asym).symmetry > 0.1
    not_complex = ChartManifold.create(g=[["1", "0"], ["0", "1"]], J=[["0", "1"], ["1", "0"]], **base)
    assert validate(not_complex).j_squared == pytest.approx(2.0)
    not_compatible = ChartManifold.create(g=[["1", "0"], ["0", "4"]], J=[["0", "-1"], ["1", "0"]], **base)
    rep = validate(not_compatible)
    assert rep.j_squared == 0.0 and rep.compatibility > 1
    singular = ChartManifold.create(g=[["1", "0"], ["0", "1/x1"]], **base)
    assert not validate(singular).passed


def test_sampling_is_seeded_and_inside_the_margin():
    M = models.manifold_by_name("s2")
    a = sample_points(M, 50, 9)
    assert np.array_equal(a, sample_points(M, 50, 9))
    assert not np.array_equal(a, sample_points(M, 50, 10))
    assert all(M.contains(p) for p in a)


def test_gram_schmidt_is_orthonormal_for_the_metric():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(4, 4))
    g = A @ A.T + np.eye(4)
    E = random_frame(g, rng_for(3, 1))
    assert np.allclose(E.T @ g @ E, np.eye(4), atol=1e-13)
    with pytest.raises(DegenerateFrameError):
        gram_schmidt(np.column_stack([E[:, 0], 2 * E[:, 0]]), g)


def test_antiholomorphic_pair_is_orthogonal_to_the_complex_line():
    M = models.manifold_by_name("cp2")
    p = np.array([0.3, -0.2, 0.1, 0.4])
    g, J = M.metric(p), M.complex_structure(p)
    X, Y = antiholomorphic_pair(g, J, rng_for(1, 5))
    assert abs(X @ g @ X - 1) < 1e-13 and abs(Y @ g @ Y - 1) < 1e-13
    assert abs(X @ g @ Y) < 1e-13 and abs((J @ X) @ g @ Y) < 1e-13


def test_sample_frame_rejects_points_outside_the_chart():
    M = models.manifold_by_name("h2")
    with pytest.raises(ManifoldError):
        sample_frame(M, [0.0, 5.0], 0)
