import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ahgeom import models
from ahgeom import submanifold as sub
from ahgeom.submanifold import Embedding, EmbeddingError
from oracles import fd_partial, fd_second_fundamental


def E(name):
    return models.get(name).model


@pytest.mark.parametrize("name", ["graph-in-r3", "sphere-in-conf-r4", "sphere-in-s4", "cp1-in-cp2", "s2-in-s6"])
def test_second_fundamental_form_matches_finite_differences(name):
    emb = E(name)
    for u in sub.sample_params(emb, 3, 5):
        sp = sub.induce(emb, u)
        ref, jac, _ = fd_second_fundamental(emb, u)
        assert np.allclose(sp.jac, jac, rtol=0, atol=1e-9)
        assert np.abs(sp.B - ref).max() < 1e-6 * max(1.0, np.abs(ref).max())


def test_mean_curvature_derivative_matches_finite_differences():
    emb = E("graph-in-r3")
    u = np.array([0.2, -0.1])
    sp = sub.induce(emb, u)
    # flat ambient: nabla-perp_c H is the normal part of dH/du_c
    dH = np.stack([fd_partial(lambda v: sub.induce(emb, v).H, u, (c,), 1e-3) for c in range(2)])
    ref = np.einsum("mr,cr->cm", sp.P_normal, dH)
    assert np.allclose(sp.nablaH, ref, rtol=0, atol=1e-8)


def test_sphere_mean_curvature():
    umb = sub.umbilical_test(E("sphere-in-r3"))
    assert umb.verdict and umb.constants["mean_curvature"] == pytest.approx(0.5, abs=1e-12)
    # geodesic sphere of chart radius r in the stereographic unit S^4: |H| = (1 - r^2) / (2 r)
    umb4 = sub.umbilical_test(E("sphere-in-s4"))
    assert umb4.verdict and umb4.constants["mean_curvature"] == pytest.approx(0.51 / 1.4, abs=1e-12)


def test_graph_is_not_umbilical():
    assert not sub.umbilical_test(E("graph-in-r3")).verdict
    assert not sub.parallel_H_test(E("graph-in-r3")).verdict


@pytest.mark.parametrize("entry", [e.name for e in models.catalog() if e.is_embedding])
def test_codazzi_and_weingarten_hold_everywhere(entry):
    assert sub.codazzi_residual(E(entry)).max < 1e-6
    assert sub.weingarten_test(E(entry)).max < 1e-9


@pytest.mark.parametrize("name", ["sphere-in-conf-r4", "sphere-in-s4"])
def test_codazzi_detects_a_corrupted_connection(name):
    assert sub.codazzi_residual(E(name), gamma_fault=1e-3).max > 1e-4


def test_eq57_on_umbilical_examples():
    for name in ("sphere-in-r3", "sphere-in-conf-r4", "sphere-in-s4"):
        assert sub.eq57_residual(E(name)).max < 1e-6, name


def test_theorem52_equivalence():
    flat = sub.theorem52_check(E("sphere-in-r3"))
    assert flat.status == "CONSISTENT"
    assert flat.details["r_invariance_weak"].verdict and flat.details["parallel_H"].verdict
    curved = sub.theorem52_check(E("sphere-in-conf-r4"))
    assert curved.status == "CONSISTENT"
    assert not curved.details["r_invariance_weak"].verdict and not curved.details["parallel_H"].verdict
    assert sub.theorem52_check(E("graph-in-r3")).status == "INCONCLUSIVE"


def test_holomorphic_tests():
    assert sub.holomorphic_test(E("cp1-in-cp2")).verdict
    real = sub.holomorphic_test(E("totally-real-in-c2"))
    assert real.max == pytest.approx(1.0, abs=1e-12)
    odd = sub.holomorphic_test(E("sphere-in-s4"))
    assert not odd.verdict and "odd" in odd.note
    with pytest.raises(EmbeddingError):
        sub.holomorphic_test(E("sphere-in-r3"))


def test_r_invariance_on_cp1():
    weak = sub.r_invariance_residual(E("cp1-in-cp2"), "weak")
    strong = sub.r_invariance_residual(E("cp1-in-cp2"), "strong")
    assert weak.max < 1e-7
    assert strong.max > 0.1
    with pytest.raises(ValueError):
        sub.r_invariance_residual(E("cp1-in-cp2"), "medium")


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["cp1-in-cp2", "sphere-in-conf-r4", "s2-in-s6", "sphere-in-s4"]), st.integers(0, 10**6))
def test_strong_residual_dominates_weak(name, seed):
    emb = E(name)
    sps = sub._subpoints(emb, 4, seed)
    weak = sub.r_invariance_residual(emb, "weak", 4, seed, subpoints=sps)
    strong = sub.r_invariance_residual(emb, "strong", 4, seed, subpoints=sps)
    assert strong.max >= weak.max - 1e-15
    assert strong.max <= 1 + 1e-12


def test_contradiction_checks():
    assert sub.theorem61_check(E("cp1-in-cp2")).status == "CONTRADICTION-CONFIRMED"
    assert sub.theorem62_check(E("cp1-in-cp2")).reason == "constant type is zero"
    th62 = sub.theorem62_check(E("s2-in-s6"))
    assert th62.status == "CONTRADICTION-CONFIRMED"
    assert th62.details["weak_constant_type"].constants["alpha"] == pytest.approx(1.0, abs=1e-5)
    assert th62.details["eq64"].max < 1e-6
    assert th62.details["r_invariance_strong"].max > 0.1
    for th in (sub.theorem61_check, sub.theorem62_check):
        assert th(E("plane-in-c2")).status == "INCONCLUSIVE"


def test_embedding_validation():
    C2 = models.manifold_by_name("flat-c2")
    with pytest.raises(EmbeddingError):
        Embedding.create("short", C2, 2, ["u1", "u2", "0"], [[0, 1], [0, 1]])
    with pytest.raises(EmbeddingError):
        Embedding.create("full", C2, 4, ["u1", "u2", "u3", "u4"], [[0, 1]] * 4)
    with pytest.raises(EmbeddingError, match="phi"):
        Embedding.create("bad", C2, 2, ["u1", "u2", "u3", "0"], [[0, 1], [0, 1]]).phi_expr
    pinched = Embedding.create("pinched", C2, 2, ["u1", "u1", "0", "0"], [[0, 1], [0, 1]])
    with pytest.raises(EmbeddingError, match="rank"):
        sub.induce(pinched, [0.5, 0.5])


def test_embedding_dict_round_trip():
    emb = E("sphere-in-s4")
    assert Embedding.from_dict(emb.to_dict(), models.manifold_by_name) == emb
    assert Embedding.from_dict(emb.to_dict(inline_ambient=True)) == emb
    with pytest.raises(EmbeddingError):
        Embedding.from_dict(emb.to_dict())
