"""Curvature identities, class membership, constant type and space-form fits.

All sampled tests work in g-orthonormal frames: with ``Rf`` the curvature
tensor and ``Jf`` the complex structure on the frame, every contraction is
plain Euclidean.  ``Jf[:, a]`` holds the frame components of ``J E_a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .curvature import CurvaturePoint, J_in_frame, curvature_batch, frobenius, in_frame, relative
from .manifold import (
    STREAM_ANTI,
    STREAM_FRAMES,
    STREAM_HOLO,
    STREAM_PAIRS,
    ChartManifold,
    ManifoldError,
    antiholomorphic_pair,
    random_frame,
    rng_for,
    sample_points,
)
from .report import ResidualStat, TheoremVerdict

TAU_CLASS = 1e-7
MIN_WEIGHT = 1e-6


class FitError(ValueError):
    pass


@dataclass
class AmbientSample:
    M: ChartManifold
    points: np.ndarray
    curvature: list[CurvaturePoint]
    frames: list[list[np.ndarray]]  # frames[i][f]: n x n g-orthonormal columns

    def frame_tensors(self, i: int, f: int):
        """``(Rf, Jf)`` on frame ``f`` at point ``i`` (``Jf`` is None without J)."""
        cp = self.curvature[i]
        E = self.frames[i][f]
        Rf = in_frame(cp.riemann, E)
        Jf = None if cp.J is None else J_in_frame(cp.J, E, cp.g)
        return Rf, Jf


@lru_cache(maxsize=64)
def ambient_sample(M: ChartManifold, points: int, frames: int, seed: int) -> AmbientSample:
    pts = sample_points(M, points, seed)
    curv = curvature_batch(M, pts)
    frame_list = []
    for i, cp in enumerate(curv):
        rng = rng_for(seed, STREAM_FRAMES, i)
        frame_list.append([random_frame(cp.g, rng) for _ in range(frames)])
    return AmbientSample(M, pts, curv, frame_list)


def _require_J(M: ChartManifold, what: str):
    if not M.hermitian:
        raise ManifoldError(f"{what} needs an almost complex structure ({M.name} is Riemannian only)")


def japply(T: np.ndarray, Jf: np.ndarray, slots) -> np.ndarray:
    """Feed ``J`` into the given argument slots of a frame tensor."""
    for s in slots:
        T = np.moveaxis(np.tensordot(Jf, T, axes=([0], [s])), 0, s)
    return T


def R_term(Rf, Jf, args: str) -> np.ndarray:
    """``out[a,b,c,d]`` = R evaluated on the argument pattern ``args``.

    ``args`` names the four slots with X, Y, Z, W (bound to a, b, c, d),
    prefixed by ``J`` when J is applied, e.g. ``"X W JY JZ"``.
    """
    toks = args.split()
    slots = [i for i, t in enumerate(toks) if t.startswith("J")]
    T = japply(Rf, Jf, slots) if slots else Rf
    letters = "".join("abcd"["XYZW".index(t[-1])] for t in toks)
    return np.einsum(f"{letters}->abcd", T)


def identity_defects(Rf, Jf) -> dict[str, np.ndarray]:
    """Left minus right side of curvature identities (1), (2), (3) on a frame."""
    return {
        "AH1": Rf - R_term(Rf, Jf, "X Y JZ JW"),
        "AH2": Rf - (R_term(Rf, Jf, "JX JY Z W") + R_term(Rf, Jf, "JX Y JZ W") + R_term(Rf, Jf, "JX Y Z JW")),
        "AH3": Rf - R_term(Rf, Jf, "JX JY JZ JW"),
    }


def identity_residuals(M: ChartManifold, points: int = 64, frames_per_point: int = 8, seed: int = 0,
                       tol: float = TAU_CLASS) -> dict[str, ResidualStat]:
    _require_J(M, "curvature identities")
    S = ambient_sample(M, points, frames_per_point, seed)
    vals = {"AH1": [], "AH2": [], "AH3": []}
    for i in range(points):
        for f in range(frames_per_point):
            Rf, Jf = S.frame_tensors(i, f)
            scale = frobenius(Rf)
            for key, d in identity_defects(Rf, Jf).items():
                vals[key].append(relative(np.abs(d).max(), scale))
    return {k: ResidualStat.from_values(f"identity_{k}", v, tol) for k, v in vals.items()}


def nabla_J_frame(cp: CurvaturePoint, E: np.ndarray) -> np.ndarray:
    """``T[a, b, c]``: frame component b of ``(nabla_{E_a} J) E_c``."""
    Einv = E.T @ cp.g
    return np.einsum("ikj,ia,bk,jc->abc", cp.nabla_J, E, Einv, E)


def kahler_nearly_kahler(M: ChartManifold, points: int = 64, seed: int = 0,
                         tol: float = TAU_CLASS) -> tuple[ResidualStat, ResidualStat]:
    """Kaehler residual ||nabla J|| and nearly-Kaehler residual ||sym nabla J||."""
    _require_J(M, "Kaehler tests")
    S = ambient_sample(M, points, 1, seed)
    kah, nk = [], []
    for cp, frames in zip(S.curvature, S.frames):
        T = nabla_J_frame(cp, frames[0])
        kah.append(frobenius(T))
        nk.append(frobenius(T + T.transpose(2, 1, 0)))
    return ResidualStat.from_values("kahler", kah, tol), ResidualStat.from_values("nearly_kahler", nk, tol)


def lambda_(cp: CurvaturePoint, X, Y) -> float:
    """``R(X, Y, X, Y) - R(X, Y, JX, JY)``."""
    R = cp.riemann
    JX, JY = cp.J @ X, cp.J @ Y
    return float(np.einsum("ijkl,i,j,k,l->", R, X, Y, X, Y) - np.einsum("ijkl,i,j,k,l->", R, X, Y, JX, JY))


def ah3_defect(cp: CurvaturePoint, X, Y, Z, W) -> float:
    """``R(X, Y, Z, W) - R(JX, JY, JZ, JW)``."""
    J = cp.J
    R = cp.riemann
    return float(np.einsum("ijkl,i,j,k,l->", R, X, Y, Z, W) - np.einsum("ijkl,i,j,k,l->", R, J @ X, J @ Y, J @ Z, J @ W))


def _pair_terms(Rf, Jf, X, Y):
    """Batched ``R(X,Y,X,Y)``, ``R(X,Y,JX,JY)``, ``R(JX,JY,JX,JY)`` and weight w."""
    JX, JY = X @ Jf.T, Y @ Jf.T
    k_xy = np.einsum("abcd,pa,pb,pc,pd->p", Rf, X, Y, X, Y, optimize=True)
    chi = np.einsum("abcd,pa,pb,pc,pd->p", Rf, X, Y, JX, JY, optimize=True)
    k_j = np.einsum("abcd,pa,pb,pc,pd->p", Rf, JX, JY, JX, JY, optimize=True)
    w = np.sum(X * X, 1) * np.sum(Y * Y, 1) - np.sum(X * Y, 1) ** 2 - np.sum(JX * Y, 1) ** 2
    return k_xy, chi, k_j, w


def _unit_rows(rng, count, n):
    V = rng.standard_normal((count, n))
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def _type_fit(M, points, pairs, seed, tol, weak: bool, name: str) -> ResidualStat:
    _require_J(M, "constant-type tests")
    if M.dim < 4:
        raise ManifoldError("constant type needs dimension >= 4")
    S = ambient_sample(M, points, 1, seed)
    lhs_all, w_all, per_point = [], [], []
    for i in range(points):
        Rf, Jf = S.frame_tensors(i, 0)
        rng = rng_for(seed, STREAM_PAIRS, i)
        X = _unit_rows(rng, pairs, M.dim)
        Y = _unit_rows(rng, pairs, M.dim)
        k_xy, chi, k_j, w = _pair_terms(Rf, Jf, X, Y)
        if weak:
            lhs, w = k_xy - 2 * chi + k_j, 2 * w
        else:
            lhs = k_xy - chi
        lhs_all.append(lhs)
        w_all.append(w)
        if np.any(w > MIN_WEIGHT):
            per_point.append(float(lhs @ w / (w @ w)))
    lam = np.concatenate(lhs_all)
    w = np.concatenate(w_all)
    if not np.any(w > MIN_WEIGHT):
        raise FitError("all pair weights are below the fitting threshold")
    alpha = float(lam @ w / (w @ w))
    resid = np.abs(lam - alpha * w) / (1 + abs(alpha))
    spread = float(max(per_point) - min(per_point)) if per_point else 0.0
    return ResidualStat.from_values(
        name, resid, tol,
        constants={"alpha": alpha, "pointwise_alpha_min": min(per_point), "pointwise_alpha_max": max(per_point),
                   "global": bool(spread < tol)},
    )


def constant_type_test(M: ChartManifold, points: int = 64, pairs: int = 32, seed: int = 0,
                       tol: float = TAU_CLASS) -> ResidualStat:
    """Least-squares fit of ``lambda(X, Y) = alpha * w(X, Y)`` over generic pairs."""
    return _type_fit(M, points, pairs, seed, tol, weak=False, name="constant_type")


def weak_constant_type_test(M: ChartManifold, points: int = 64, pairs: int = 32, seed: int = 0,
                            tol: float = TAU_CLASS) -> ResidualStat:
    """Same fit for the symmetrised combination against ``2 alpha w``."""
    return _type_fit(M, points, pairs, seed, tol, weak=True, name="weak_constant_type")


def eq45_residual(M: ChartManifold, points: int = 64, pairs: int = 32, seed: int = 0,
                  tol: float = TAU_CLASS) -> ResidualStat:
    """``R(X,Y,X,Y) - R(JX,JY,JX,JY)`` over unit pairs, relative to ||R||."""
    S = ambient_sample(M, points, 1, seed)
    vals = []
    for i in range(points):
        Rf, Jf = S.frame_tensors(i, 0)
        rng = rng_for(seed, STREAM_PAIRS, i)
        X = _unit_rows(rng, pairs, M.dim)
        Y = _unit_rows(rng, pairs, M.dim)
        k_xy, _, k_j, _ = _pair_terms(Rf, Jf, X, Y)
        vals.append(relative(np.abs(k_xy - k_j).max(), frobenius(Rf)))
    return ResidualStat.from_values("eq45", vals, tol)


def ah3_defect_stat(M: ChartManifold, points: int = 64, frames: int = 8, seed: int = 0,
                    tol: float = TAU_CLASS) -> ResidualStat:
    S = ambient_sample(M, points, frames, seed)
    vals = []
    for i in range(points):
        for f in range(frames):
            Rf, Jf = S.frame_tensors(i, f)
            vals.append(relative(np.abs(Rf - R_term(Rf, Jf, "JX JY JZ JW")).max(), frobenius(Rf)))
    return ResidualStat.from_values("ah3_defect", vals, tol)


def theorem41_check(M: ChartManifold, points: int = 64, frames: int = 8, pairs: int = 32, seed: int = 0,
                    tol: float = TAU_CLASS) -> TheoremVerdict:
    """Almost constant type: constant type iff AH3."""
    weak = weak_constant_type_test(M, points, pairs, seed, tol)
    details = {"weak_constant_type": weak}
    if not weak.verdict:
        return TheoremVerdict("theorem41", "INCONCLUSIVE", "not of weak constant type on the samples", details)
    strict = constant_type_test(M, points, pairs, seed, tol)
    ah3 = identity_residuals(M, points, frames, seed, tol)["AH3"]
    details.update(constant_type=strict, AH3=ah3)
    if strict.verdict and ah3.verdict:
        details["eq45"] = eq45_residual(M, points, pairs, seed, tol)
        details["alpha_difference"] = abs(strict.constants["alpha"] - weak.constants["alpha"])
    status = "CONSISTENT" if strict.verdict == ah3.verdict else "INCONSISTENT"
    return TheoremVerdict("theorem41", status, "", details)


# -- space form fit ----------------------------------------------------------


def model_tensors(Jf: Optional[np.ndarray], n: int):
    """``R1`` and ``R2`` on an orthonormal frame (``R2`` is None without J)."""
    I = np.eye(n)
    R1 = np.einsum("xw,yz->xyzw", I, I) - np.einsum("xz,yw->xyzw", I, I)
    if Jf is None:
        return R1, None
    R2 = (
        np.einsum("wx,zy->xyzw", Jf, Jf)
        - np.einsum("zx,wy->xyzw", Jf, Jf)
        - 2 * np.einsum("yx,wz->xyzw", Jf, Jf)
    )
    return R1, R2


@dataclass
class SpaceformFit:
    alpha: float
    beta: Optional[float]
    stat: ResidualStat
    degenerate: bool = False

    @property
    def holomorphic_curvature(self) -> Optional[float]:
        return None if self.beta is None else -(self.alpha + 3 * self.beta)

    @property
    def antiholomorphic_curvature(self) -> float:
        return -self.alpha

    def to_dict(self) -> dict:
        return {
            "alpha_sf": self.alpha,
            "beta_sf": self.beta,
            "degenerate": self.degenerate,
            "predicted_holomorphic_curvature": self.holomorphic_curvature,
            "predicted_antiholomorphic_curvature": self.antiholomorphic_curvature,
            "fit": self.stat,
        }


def spaceform_fit(M: ChartManifold, points: int = 64, frames: int = 8, seed: int = 0,
                  tol: float = TAU_CLASS) -> SpaceformFit:
    """Least-squares ``R = alpha R1 + beta R2`` over all frame quadruples."""
    S = ambient_sample(M, points, frames, seed)
    n = M.dim
    iu = [(a, b) for a in range(n) for b in range(a + 1, n)]
    sel = tuple(np.array(ix) for ix in zip(*[(a, b, c, d) for (a, b) in iu for (c, d) in iu]))
    rows, rhs, tensors = [], [], []
    for i in range(points):
        for f in range(frames):
            Rf, Jf = S.frame_tensors(i, f)
            R1, R2 = model_tensors(Jf, n)
            cols = [R1[sel]] + ([] if R2 is None else [R2[sel]])
            rows.append(np.column_stack(cols))
            rhs.append(Rf[sel])
            tensors.append((Rf, R1, R2))
    A = np.vstack(rows)
    y = np.concatenate(rhs)
    degenerate = A.shape[1] == 1
    if A.shape[1] == 2:
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[-1] < 1e-10 * sv[0]:
            degenerate = True
            A = A[:, :1]
    coef = np.linalg.lstsq(A, y, rcond=None)[0]
    alpha = float(coef[0])
    beta = float(coef[1]) if len(coef) > 1 else None
    vals = []
    for Rf, R1, R2 in tensors:
        model = alpha * R1 + (0.0 if beta is None else beta * R2)
        vals.append(relative(frobenius(Rf - model), frobenius(Rf)))
    note = "R1 and R2 numerically dependent; beta not fitted" if (degenerate and M.hermitian) else ""
    stat = ResidualStat.from_values("spaceform", vals, tol, constants={"alpha_sf": alpha, "beta_sf": beta}, note=note)
    return SpaceformFit(alpha, beta, stat, degenerate)


# -- sectional constancy -----------------------------------------------------


@dataclass
class ConstancyResult:
    kind: str
    estimate: float
    max_deviation: float
    point_means: list[float]
    stat: ResidualStat

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "estimate": self.estimate,
            "max_deviation": self.max_deviation,
            "pointwise_min": min(self.point_means),
            "pointwise_max": max(self.point_means),
            "test": self.stat,
        }


def sectional_constancy(M: ChartManifold, kind: str, points: int = 64, pairs: int = 32, seed: int = 0,
                        tol: float = TAU_CLASS) -> ConstancyResult:
    """Per-point mean and spread of K over holomorphic / anti-holomorphic / all planes."""
    if kind not in ("holomorphic", "anti-holomorphic", "any"):
        raise ValueError(f"unknown plane kind {kind!r}")
    if kind != "any":
        _require_J(M, f"{kind} sectional curvature")
    if kind == "anti-holomorphic" and M.dim < 4:
        raise ManifoldError("anti-holomorphic planes need dimension >= 4")
    S = ambient_sample(M, points, 1, seed)
    means, devs = [], []
    stream = {"holomorphic": STREAM_HOLO, "anti-holomorphic": STREAM_ANTI, "any": STREAM_PAIRS}[kind]
    n = M.dim
    I = np.eye(n)
    for i in range(points):
        Rf, Jf = S.frame_tensors(i, 0)
        rng = rng_for(seed, stream, i)
        if kind == "holomorphic":
            X = _unit_rows(rng, pairs, n)
            Y = X @ Jf.T
        elif kind == "anti-holomorphic":
            XY = [antiholomorphic_pair(I, Jf, rng) for _ in range(pairs)]
            X = np.array([p[0] for p in XY])
            Y = np.array([p[1] for p in XY])
        else:
            X = _unit_rows(rng, pairs, n)
            Y = _unit_rows(rng, pairs, n)
            Y = Y - np.sum(X * Y, 1)[:, None] * X
            Y /= np.linalg.norm(Y, axis=1, keepdims=True)
        K = np.einsum("abcd,pa,pb,pc,pd->p", Rf, X, Y, X, Y, optimize=True)
        means.append(float(K.mean()))
        devs.append(float(np.abs(K - K.mean()).max()))
    stat = ResidualStat.from_values(f"sectional_constancy_{kind}", devs, tol,
                                    constants={"estimate": float(np.mean(means))})
    return ConstancyResult(kind, float(np.mean(means)), float(max(devs)), means, stat)


# -- Rizza identity ----------------------------------------------------------


def rizza_defect(Rf: np.ndarray, Jf: np.ndarray, mu: float) -> np.ndarray:
    """Left minus right side of the identity for pointwise constant holomorphic curvature mu."""
    t = lambda s: R_term(Rf, Jf, s)  # noqa: E731
    lhs = (
        3 * (t("X Y Z W") + t("X Y JZ JW") + t("JX JY Z W") + t("JX JY JZ JW"))
        - 2 * (t("X W JY JZ") + t("JX JW Y Z") - t("X Z JY JW") - t("JX JZ Y W"))
        - (t("X JY JZ W") + t("JX Y Z JW") + t("X JY Z JW") + t("JX Y JZ W"))
    )
    n = Rf.shape[0]
    I = np.eye(n)
    rhs = 4 * mu * (
        np.einsum("ac,bd->abcd", I, I)
        - np.einsum("ad,bc->abcd", I, I)
        + np.einsum("ac,bd->abcd", Jf, Jf)
        - np.einsum("ad,bc->abcd", Jf, Jf)
        + 2 * np.einsum("ab,cd->abcd", Jf, Jf)
    )
    return lhs - rhs


def rizza_identity_residual(M: ChartManifold, points: int = 64, frames: int = 8, pairs: int = 32,
                            seed: int = 0, tol: float = TAU_CLASS) -> ResidualStat:
    const = sectional_constancy(M, "holomorphic", points, pairs, seed, tol)
    if not const.stat.verdict:
        return ResidualStat.gated("rizza", "holomorphic sectional curvature is not pointwise constant", tol)
    S = ambient_sample(M, points, frames, seed)
    vals = []
    for i in range(points):
        for f in range(frames):
            Rf, Jf = S.frame_tensors(i, f)
            vals.append(relative(np.abs(rizza_defect(Rf, Jf, const.point_means[i])).max(), frobenius(Rf)))
    return ResidualStat.from_values("rizza", vals, tol, constants={"mu": const.estimate})


# -- summary -----------------------------------------------------------------


@dataclass
class ClassVerdict:
    name: str
    flags: dict = field(default_factory=dict)
    raw_flags: dict = field(default_factory=dict)
    tests: dict = field(default_factory=dict)

    @property
    def monotone(self) -> bool:
        f = self.raw_flags
        chain = [f.get("AH1"), f.get("AH2"), f.get("AH3")]
        return not any(chain[i] and not chain[i + 1] for i in range(2) if chain[i] is not None)

    def to_dict(self) -> dict:
        return {"name": self.name, "flags": self.flags, "raw_flags": self.raw_flags,
                "monotone": self.monotone, "tests": self.tests}


def classify(M: ChartManifold, points: int = 64, frames: int = 8, pairs: int = 32, seed: int = 0,
             tol: float = TAU_CLASS) -> ClassVerdict:
    """Identities, Kaehler / nearly Kaehler and sectional constancy in one record."""
    out = ClassVerdict(M.name)
    anyk = sectional_constancy(M, "any", points, pairs, seed, tol)
    out.tests["sectional_any"] = anyk
    out.raw_flags["constant_curvature"] = anyk.stat.verdict
    if not M.hermitian:
        out.flags = dict(out.raw_flags)
        return out
    ids = identity_residuals(M, points, frames, seed, tol)
    kah, nk = kahler_nearly_kahler(M, points, seed, tol)
    out.tests.update(ids)
    out.tests.update(kahler=kah, nearly_kahler=nk)
    raw = {k: v.verdict for k, v in ids.items()}
    raw.update(kahler=kah.verdict, nearly_kahler=nk.verdict)
    hol = sectional_constancy(M, "holomorphic", points, pairs, seed, tol)
    out.tests["holomorphic_sectional"] = hol
    raw["holomorphic_constant"] = hol.stat.verdict
    if M.dim >= 4:
        anti = sectional_constancy(M, "anti-holomorphic", points, pairs, seed, tol)
        out.tests["antiholomorphic_sectional"] = anti
        raw["antiholomorphic_constant"] = anti.stat.verdict
    out.raw_flags.update(raw)
    flags = dict(out.raw_flags)
    flags["AH2"] = flags["AH2"] or flags["AH1"]
    flags["AH3"] = flags["AH3"] or flags["AH2"]
    out.flags = flags
    return out
