"""Acceptance criteria 1-10, one test each.

Every criterion records a one-line PASS/FAIL summary; the lines are printed when
the module finishes (``pytest -s`` not required) and when the file is run
directly with ``python tests/test_acceptance.py``.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from ahgeom import classify as cl
from ahgeom import models
from ahgeom import submanifold as sub
from ahgeom.curvature import curvature_batch, sectional, symmetry_residuals
from ahgeom.manifold import antiholomorphic_pair, random_frame, rng_for, sample_points
from oracles import random_metric

ROOT = Path(__file__).resolve().parent.parent
LINES: dict[int, str] = {}


def M(name):
    return models.manifold_by_name(name)


def E(name):
    return models.get(name).model


def record(number, ok, detail):
    LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, LINES[number]


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    text = "\n".join(LINES[k] for k in sorted(LINES))
    if reporter is not None:
        reporter.write_line("")
        for line in text.splitlines():
            reporter.write_line(line)
    else:
        print(text)


def test_criterion_01_calibration():
    t0 = time.perf_counter()
    worst = 0.0
    for name, K in (("s2", 1.0), ("h2", -1.0)):
        m = M(name)
        for i, cp in enumerate(curvature_batch(m, sample_points(m, 32, 0))):
            Fr = random_frame(cp.g, rng_for(0, 2, i))
            worst = max(worst, abs(sectional(cp, Fr[:, 0], Fr[:, 1]) - K))
    dt = time.perf_counter() - t0
    record(1, worst < 1e-8 and dt < 1.0, f"S^2 K=+1, H^2 K=-1: max |K - K0| = {worst:.2e}, {dt:.2f} s")


def test_criterion_02_symmetries():
    t0 = time.perf_counter()
    worst = 0.0
    for entry in models.catalog():
        if entry.is_embedding:
            continue
        for cp in curvature_batch(entry.model, sample_points(entry.model, 8, 0)):
            worst = max(worst, max(symmetry_residuals(cp).values()))
    rng = np.random.default_rng(7)
    for k in range(100):
        m = random_metric(rng, 2 + k % 4, name=f"random-{k}")
        for i, cp in enumerate(curvature_batch(m, sample_points(m, 4, k))):
            worst = max(worst, max(symmetry_residuals(cp, random_frame(cp.g, rng_for(k, 2, i))).values()))
    dt = time.perf_counter() - t0
    record(2, worst < 1e-8 and dt < 30, f"catalog + 100 random metrics: max relative = {worst:.2e}, {dt:.1f} s")


def test_criterion_03_kaehler_chain():
    nabla, ident = 0.0, 0.0
    for name in ("flat-c1", "flat-c2", "flat-c3", "cp2"):
        kah, _ = cl.kahler_nearly_kahler(M(name))
        ids = cl.identity_residuals(M(name))
        nabla = max(nabla, kah.max)
        ident = max(ident, *(ids[k].max for k in ("AH1", "AH2", "AH3")))
    violations = [e.name for e in models.catalog()
                  if not e.is_embedding and e.model.hermitian and not cl.classify(e.model).monotone]
    ok = nabla < 1e-8 and ident < 1e-7 and not violations
    record(3, ok, f"|nabla J| = {nabla:.2e}, identities = {ident:.2e}, monotonicity violations: {violations or 'none'}")


def test_criterion_04_theorem41():
    S6 = M("s6")
    weak = cl.weak_constant_type_test(S6)
    strict = cl.constant_type_test(S6)
    ah3 = cl.identity_residuals(S6)["AH3"]
    aw, a = weak.constants["alpha"], strict.constants["alpha"]
    # oracle: lambda evaluated directly on anti-holomorphic pairs
    lam = []
    for i, cp in enumerate(curvature_batch(S6, sample_points(S6, 32, 1))):
        rng = rng_for(1, 77, i)
        for _ in range(32):
            X, Y = antiholomorphic_pair(cp.g, cp.J, rng)
            lam.append(cl.lambda_(cp, X, Y))
    lam = np.array(lam)
    oracle_dev = float(np.abs(lam - aw).max())
    pert = cl.theorem41_check(M("perturbed-r4"))
    pert_ah3 = cl.identity_residuals(M("perturbed-r4"))["AH3"]
    contrapositive = pert.status in ("INCONCLUSIVE", "INCONSISTENT") and not pert_ah3.verdict
    ok = (weak.verdict and abs(aw - 1) < 1e-5 and ah3.max < 1e-7 and strict.verdict and abs(a - aw) < 1e-6
          and lam.size >= 1000 and oracle_dev < 1e-6 and contrapositive)
    record(4, ok, f"S^6 alpha_w = {aw:.10f}, alpha = {a:.10f}, AH3 = {ah3.max:.2e}, "
                  f"lambda oracle ({lam.size} pairs) dev = {oracle_dev:.1e}; perturbed: {pert.status}, "
                  f"AH3 residual {pert_ah3.max:.2e}")


def test_criterion_05_spaceform_fit():
    fit = cl.spaceform_fit(M("cp2"))
    hol = cl.sectional_constancy(M("cp2"), "holomorphic")
    pred = fit.holomorphic_curvature
    flats = [cl.spaceform_fit(M(n)) for n in ("flat-c2", "flat-c3")]
    flat1 = cl.spaceform_fit(M("flat-c1"))
    flat_exact = all(f.alpha == 0.0 and f.beta == 0.0 for f in flats) and flat1.alpha == 0.0
    prod = cl.spaceform_fit(M("s2xs2"))
    ok = (fit.stat.max < 1e-7 and abs(pred - 4) < 1e-5 and abs(pred - hol.estimate) < 1e-5 and flat_exact
          and prod.stat.max > 1e-2)
    record(5, ok, f"CP^2 residual {fit.stat.max:.2e}, -(a+3b) = {pred:.10f} vs sampled {hol.estimate:.10f}; "
                  f"flat exact: {flat_exact}; S^2xS^2 residual {prod.stat.max:.3f}")


def test_criterion_06_theorem51_converse():
    weak = sub.r_invariance_residual(E("cp1-in-cp2"), "weak")
    record(6, weak.max < 1e-7, f"CP^1 in CP^2 weak R-invariance residual {weak.max:.2e}")


def test_criterion_07_theorem52():
    parts = []
    ok = True
    for name in ("sphere-in-r3", "sphere-in-conf-r4"):
        th = sub.theorem52_check(E(name))
        e57 = th.details["eq57"].max
        ok &= th.status == "CONSISTENT" and e57 < 1e-6
        parts.append(f"{name}: eq57 {e57:.1e}, R-inv {th.details['r_invariance_weak'].verdict} "
                     f"<=> parallel H {th.details['parallel_H'].verdict}")
    fault = sub.codazzi_residual(E("sphere-in-conf-r4"), gamma_fault=1e-3).max
    ok &= fault > 1e-4
    record(7, ok, "; ".join(parts) + f"; fault-injected Codazzi residual {fault:.2e}")


def test_criterion_08_contradictions():
    th61 = sub.theorem61_check(E("cp1-in-cp2"))
    mu = th61.details["holomorphic_sectional"].constants["estimate"]
    s61 = th61.details.get("r_invariance_strong")
    th62 = sub.theorem62_check(E("s2-in-s6"))
    aw = th62.details["weak_constant_type"].constants["alpha"]
    s62 = th62.details.get("r_invariance_strong")
    flat = [sub.theorem61_check(E("plane-in-c2")).status, sub.theorem62_check(E("plane-in-c2")).status]
    ok = (th61.status == "CONTRADICTION-CONFIRMED" and abs(mu - 4) < 1e-6 and s61.max > 0.1
          and th62.status == "CONTRADICTION-CONFIRMED" and abs(aw - 1) < 1e-5 and s62.max > 0.1
          and flat == ["INCONCLUSIVE", "INCONCLUSIVE"])
    record(8, ok, f"CP^1 in CP^2 (mu = {mu:.6f}) strong {s61.max:.3f}; S^2 in S^6 (alpha_w = {aw:.6f}) "
                  f"strong {s62.max:.3f}; flat gates {flat}")


def test_criterion_09_rizza():
    res = {n: cl.rizza_identity_residual(M(n)).max for n in ("cp2", "flat-c1", "flat-c2", "flat-c3")}
    gated = cl.rizza_identity_residual(M("s2xs2"))
    ok = max(res.values()) < 1e-6 and gated.inconclusive
    record(9, ok, f"max residual {max(res.values()):.2e} over {sorted(res)}; S^2xS^2 inconclusive: {gated.inconclusive}")


def test_criterion_10_pipeline(tmp_path):
    reports, times, codes = [], [], []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        t0 = time.perf_counter()
        proc = subprocess.run([sys.executable, "-m", "ahgeom", "all", "--seed", "0", "--report", str(path)],
                              capture_output=True, text=True, cwd=ROOT)
        times.append(time.perf_counter() - t0)
        codes.append(proc.returncode)
        reports.append(path.read_bytes() if path.exists() else b"")
    identical = reports[0] == reports[1] and len(reports[0]) > 0
    ok = codes == [0, 0] and identical and max(times) < 60
    record(10, ok, f"full catalog exit codes {codes}, {max(times):.1f} s, byte-identical: {identical}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
