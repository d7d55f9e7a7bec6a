"""Induced geometry of embedded submanifolds and the submanifold-level tests.

Quantities along the submanifold are carried to first order in the parameter
chart ``u``: each field ``F(u)`` is kept together with ``dF/du_c``, which is
what the covariant derivatives of the second fundamental form and of the mean
curvature vector need.  Tensorial expressions are assembled on the coordinate
fields ``d/du_a`` and only then contracted with (pointwise) orthonormal frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Optional

import numpy as np

from . import expr as ex
from .curvature import CurvaturePoint, curvature_batch, frobenius, in_frame, relative
from .manifold import (
    STREAM_SUB,
    ChartManifold,
    DegenerateFrameError,
    ManifoldError,
    field_jets,
    gram_schmidt,
    random_frame,
    rng_for,
    sample_points,
)
from .report import ResidualStat, TheoremVerdict

TAU_SUB = 1e-7
RANK_MARGIN = 1e-6
CONTRADICTION_FLOOR = 0.01


class EmbeddingError(ManifoldError):
    pass


@dataclass(frozen=True)
class Embedding:
    name: str
    ambient: ChartManifold
    subdim: int
    phi: tuple[str, ...]
    subdomain: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.phi) != self.ambient.dim:
            raise EmbeddingError(f"phi has {len(self.phi)} components, ambient dimension is {self.ambient.dim}")
        if not 1 <= self.subdim < self.ambient.dim:
            raise EmbeddingError("sub-dimension must lie strictly between 0 and the ambient dimension")
        if len(self.subdomain) != self.subdim:
            raise EmbeddingError("subdomain must have one interval per parameter")

    @classmethod
    def create(cls, name, ambient, subdim, phi, subdomain) -> "Embedding":
        return cls(
            name=name,
            ambient=ambient,
            subdim=int(subdim),
            phi=tuple(str(c) for c in phi),
            subdomain=tuple((float(lo), float(hi)) for lo, hi in subdomain),
        )

    @classmethod
    def from_dict(cls, data: dict, resolve=None) -> "Embedding":
        amb = data["ambient"]
        if isinstance(amb, str):
            if resolve is None:
                raise EmbeddingError(f"cannot resolve ambient model {amb!r}")
            amb = resolve(amb)
        else:
            amb = ChartManifold.from_dict(amb)
        return cls.create(data.get("name", "embedding"), amb, data["subdim"], data["phi"], data["subdomain"])

    def to_dict(self, inline_ambient: bool = False) -> dict:
        return {
            "name": self.name,
            "ambient": self.ambient.to_dict() if inline_ambient else self.ambient.name,
            "subdim": self.subdim,
            "phi": list(self.phi),
            "subdomain": [list(iv) for iv in self.subdomain],
        }

    @cached_property
    def phi_expr(self):
        out = []
        for i, text in enumerate(self.phi):
            try:
                out.append(ex.parse(text, self.subdim, "u"))
            except ex.ExprError as exc:
                raise EmbeddingError(f"phi[{i}]: {exc}") from exc
        return tuple(out)


@dataclass
class SubPoint:
    """Induced geometry at one parameter point ``u``.

    Coordinate-basis quantities use the parameter fields ``d/du_a``; vectors
    are ambient chart components.
    """

    u: np.ndarray
    p: np.ndarray
    jac: np.ndarray  # (n, k) columns d phi / du_a
    T: np.ndarray  # (n, k) g-orthonormal tangent frame
    Nor: np.ndarray  # (n, n-k) g-orthonormal normal frame
    g: np.ndarray  # ambient metric at p
    ghat: np.ndarray  # induced metric (k, k), coordinate basis
    B: np.ndarray  # (k, k, n) B(d_a, d_b)
    H: np.ndarray  # (n,)
    nablaB: np.ndarray  # (k, k, k, n) [c, a, b] = (nabla_c B)(d_a, d_b)
    nablaH: np.ndarray  # (k, n) [c] = nabla-perp_c H
    P_normal: np.ndarray  # (n, n) g-orthogonal projector onto the normal space
    shape_ops: np.ndarray  # (n-k, k, k) A_xi in the T frame, from the Weingarten formula
    ambient: CurvaturePoint = field(repr=False)
    J: Optional[np.ndarray] = None

    @property
    def coeffs(self) -> np.ndarray:
        """(k, k) coefficients of the orthonormal frame on the coordinate fields."""
        return np.linalg.lstsq(self.jac, self.T, rcond=None)[0]

    def norm(self, v) -> float:
        return float(np.sqrt(max(v @ self.g @ v, 0.0)))

    def B_frame(self) -> np.ndarray:
        C = self.coeffs
        return np.einsum("abm,ai,bj->ijm", self.B, C, C)

    def weingarten_defect(self) -> float:
        """max |g(B(X,Y), xi) - g(A_xi X, Y)| over the frames."""
        Bf = self.B_frame()
        lhs = np.einsum("ijm,mn,nr->rij", Bf, self.g, self.Nor)
        return float(np.abs(lhs - self.shape_ops).max())


def _gamma_vec(gamma, X, Y):
    return np.einsum("mij,i,j->m", gamma, X, Y)


def induce_batch(E: Embedding, us, seed: int = 0, gamma_fault: float = 0.0) -> list[SubPoint]:
    """Induced geometry at every row of ``us``.

    ``gamma_fault`` adds a constant to every Christoffel symbol on the second
    fundamental form path only (fault injection for the Codazzi check).
    """
    us = np.atleast_2d(np.asarray(us, dtype=float))
    n, k = E.ambient.dim, E.subdim
    try:
        ph = field_jets(E.phi_expr, us, 3, "phi")
    except ManifoldError as exc:
        raise EmbeddingError(str(exc)) from exc
    P = ph.val  # (b, n)
    amb = curvature_batch(E.ambient, P)
    Jvals = E.ambient.J_jets(P, 0).val if E.ambient.hermitian else None
    out = []
    I = np.eye(n)
    for b, u in enumerate(us):
        cp = amb[b]
        jac = ph.d1[b]  # (n, k): d_a phi^m at [m, a]
        d2 = ph.d2[b]  # (n, k, k)
        d3 = ph.d3[b]  # (n, k, k, k)
        sv = np.linalg.svd(jac, compute_uv=False)
        if sv.min() < RANK_MARGIN:
            raise EmbeddingError(f"d phi is rank deficient at u={u} (sigma_min={sv.min():.3g})")
        g = cp.g
        dg = np.einsum("ijm,ma->ija", cp.dg, jac)  # along d_a
        gam = cp.gamma + gamma_fault
        dgam = np.einsum("kijm,ma->kija", cp.dgamma, jac)

        # N_ab = nabla_{d_a} d_b (ambient, as a field along the submanifold)
        N = d2 + np.einsum("mij,ia,jb->mab", gam, jac, jac)
        dN = (
            d3
            + np.einsum("mijc,ia,jb->mabc", dgam, jac, jac)
            + np.einsum("mij,iac,jb->mabc", gam, d2, jac)
            + np.einsum("mij,ia,jbc->mabc", gam, jac, d2)
        )
        ghat = jac.T @ g @ jac
        dghat = (
            np.einsum("mac,mn,nb->abc", d2, g, jac)
            + np.einsum("ma,mnc,nb->abc", jac, dg, jac)
            + np.einsum("ma,mn,nbc->abc", jac, g, d2)
        )
        gh_inv = np.linalg.inv(ghat)
        dgh_inv = -np.einsum("ad,dec,eb->abc", gh_inv, dghat, gh_inv)
        # tangential projector P_t = jac ghat^-1 jac^T g
        Pt = jac @ gh_inv @ jac.T @ g
        dPt = (
            np.einsum("mac,ab,nb,nr->mrc", d2, gh_inv, jac, g)
            + np.einsum("ma,abc,nb,nr->mrc", jac, dgh_inv, jac, g)
            + np.einsum("ma,ab,nbc,nr->mrc", jac, gh_inv, d2, g)
            + np.einsum("ma,ab,nb,nrc->mrc", jac, gh_inv, jac, dg)
        )
        Pn = I - Pt
        dPn = -dPt

        B = np.einsum("mr,rab->abm", Pn, N)
        dB = np.einsum("mrc,rab->abcm", dPn, N) + np.einsum("mr,rabc->abcm", Pn, dN)
        # normal connection applied to B_ab along d_c
        amb_dB = dB + np.einsum("mij,ic,abj->abcm", gam, jac, B)
        nperp_B = np.einsum("mr,abcr->cabm", Pn, amb_dB)
        # induced Christoffel symbols Gamma-hat^d_ab
        ghat_chr = np.einsum("de,me,mn,nab->dab", gh_inv, jac, g, N)
        nablaB = (
            nperp_B
            - np.einsum("dca,dbm->cabm", ghat_chr, B)
            - np.einsum("dcb,adm->cabm", ghat_chr, B)
        )
        H = np.einsum("ab,abm->m", gh_inv, B) / k
        dH = (np.einsum("abc,abm->cm", dgh_inv, B) + np.einsum("ab,abcm->cm", gh_inv, dB)) / k
        nablaH = np.einsum("mr,cr->cm", Pn, dH + np.einsum("mij,ic,j->cm", gam, jac, H))

        rng = rng_for(seed, STREAM_SUB, b)
        T = gram_schmidt(jac, g)
        Nor = _normal_frame(Pn, g, n - k, rng)
        # Weingarten: A_xi X = -(nabla_X xi)^T for the normal field xi(u) = Pn(u) xi0
        C = np.linalg.lstsq(jac, T, rcond=None)[0]
        shape_ops = np.empty((n - k, k, k))
        for r in range(n - k):
            xi0 = Nor[:, r]
            dxi = np.einsum("mnc,n->cm", dPn, xi0)
            nab = dxi + np.einsum("mij,ic,j->cm", gam, jac, xi0)  # (c, m)
            A_coord = -np.einsum("mn,cn->cm", Pt, nab)  # A_xi d_c
            A_frame = np.einsum("cm,ci->im", A_coord, C)  # A_xi T_i
            shape_ops[r] = np.einsum("im,mn,nj->ij", A_frame, g, T)
        out.append(
            SubPoint(
                u=u, p=P[b], jac=jac, T=T, Nor=Nor, g=g, ghat=ghat, B=B, H=H, nablaB=nablaB,
                nablaH=nablaH, P_normal=Pn, shape_ops=shape_ops, ambient=cp,
                J=None if Jvals is None else Jvals[b],
            )
        )
    return out


def _normal_frame(Pn, g, count, rng):
    for _ in range(16):
        try:
            return gram_schmidt(Pn @ rng.standard_normal((Pn.shape[0], count)), g)
        except DegenerateFrameError:
            continue
    raise DegenerateFrameError("could not build a normal frame")


def induce(E: Embedding, u, seed: int = 0) -> SubPoint:
    return induce_batch(E, [u], seed)[0]


def sample_params(E: Embedding, count: int, seed: int) -> np.ndarray:
    return sample_points(None, count, seed, domain=E.subdomain)


# -- sampled tests -----------------------------------------------------------


def _subpoints(E, points, seed, gamma_fault=0.0):
    return induce_batch(E, sample_params(E, points, seed), seed, gamma_fault)


def _tangent_frames(sp: SubPoint, seed: int, index: int, count: int):
    """Orthonormal tangent frames: the Gram-Schmidt frame plus seeded rotations."""
    frames = [sp.T]
    rng = rng_for(seed, STREAM_SUB, 1000 + index)
    k = sp.T.shape[1]
    for _ in range(count - 1):
        Q = random_frame(np.eye(k), rng)
        frames.append(sp.T @ Q)
    return frames


def _stat(name, values, tol, samples=None, **constants):
    return ResidualStat.from_values(name, values, tol, samples=samples, constants=constants)


def umbilical_test(E: Embedding, points: int = 64, seed: int = 0, tol: float = TAU_SUB, subpoints=None) -> ResidualStat:
    """max ||B(X,Y) - g(X,Y) H|| / (1 + ||H||) over orthonormal tangent pairs."""
    if E.subdim < 2:
        raise EmbeddingError("umbilicity needs sub-dimension >= 2")
    sps = subpoints or _subpoints(E, points, seed)
    vals = []
    for i, sp in enumerate(sps):
        hn = sp.norm(sp.H)
        for F in _tangent_frames(sp, seed, i, 2):
            C = np.linalg.lstsq(sp.jac, F, rcond=None)[0]
            Bf = np.einsum("abm,ai,bj->ijm", sp.B, C, C)
            k = E.subdim
            for a, b in product(range(k), repeat=2):
                d = Bf[a, b] - (1.0 if a == b else 0.0) * sp.H
                vals.append(sp.norm(d) / (1 + hn))
    return _stat("umbilical", vals, tol, mean_curvature=float(np.mean([sp.norm(sp.H) for sp in sps])))


def _R_vec(cp: CurvaturePoint, X, Y, Z):
    return np.einsum("xyzw,x,y,z,mw->m", cp.riemann, X, Y, Z, cp.g_inv)


def codazzi_residual(E: Embedding, points: int = 64, seed: int = 0, tol: float = TAU_SUB,
                     gamma_fault: float = 0.0, subpoints=None) -> ResidualStat:
    """Both sides of the Codazzi equation computed independently.

    Left: normal part of the ambient curvature; right:
    ``(nabla_X B)(Y, Z) - (nabla_Y B)(X, Z)`` from the transported second
    fundamental form.  With the sign convention of ``curvature`` the identity
    reads ``-(R(X, Y)Z)^perp = (nabla_X B)(Y, Z) - (nabla_Y B)(X, Z)``.
    """
    sps = subpoints or _subpoints(E, points, seed, gamma_fault)
    vals = []
    for sp in sps:
        cp = sp.ambient
        scale = frobenius(in_frame(cp.riemann, _ambient_frame(sp)))
        C = sp.coeffs
        k = E.subdim
        # (nabla_X B)(Y, Z) on the frame
        nB = np.einsum("cabm,ci,aj,bl->ijlm", sp.nablaB, C, C, C)
        worst = 0.0
        for x, y, z in product(range(k), repeat=3):
            lhs = -sp.P_normal @ _R_vec(cp, sp.T[:, x], sp.T[:, y], sp.T[:, z])
            rhs = nB[x, y, z] - nB[y, x, z]
            worst = max(worst, sp.norm(lhs - rhs))
        vals.append(relative(worst, scale))
    return _stat("codazzi", vals, tol)


def parallel_H_test(E: Embedding, points: int = 64, seed: int = 0, tol: float = TAU_SUB, subpoints=None) -> ResidualStat:
    """max ||nabla-perp_X H|| over unit tangent X."""
    sps = subpoints or _subpoints(E, points, seed)
    vals = []
    for i, sp in enumerate(sps):
        for F in _tangent_frames(sp, seed, i, 2):
            C = np.linalg.lstsq(sp.jac, F, rcond=None)[0]
            nH = np.einsum("cm,ci->im", sp.nablaH, C)
            vals.extend(sp.norm(v) for v in nH)
    return _stat("parallel_H", vals, tol)


def holomorphic_test(E: Embedding, points: int = 64, seed: int = 0, tol: float = TAU_SUB, subpoints=None) -> ResidualStat:
    """max ||(J v)^perp|| over unit tangent v."""
    if not E.ambient.hermitian:
        raise EmbeddingError("holomorphicity needs an almost Hermitian ambient")
    if E.subdim % 2:
        return ResidualStat("holomorphic", 0, 1.0, 1.0, tol, False,
                            note="odd sub-dimension: a tangent space cannot be J-invariant")
    sps = subpoints or _subpoints(E, points, seed)
    vals = []
    for i, sp in enumerate(sps):
        rng = rng_for(seed, STREAM_SUB, 2000 + i)
        vecs = [sp.T[:, a] for a in range(E.subdim)]
        for _ in range(4):
            c = rng.standard_normal(E.subdim)
            vecs.append(sp.T @ (c / np.linalg.norm(c)))
        vals.extend(sp.norm(sp.P_normal @ (sp.J @ v)) for v in vecs)
    return _stat("holomorphic", vals, tol)


def _ambient_frame(sp: SubPoint) -> np.ndarray:
    return np.column_stack([sp.T, sp.Nor])


def r_invariance_residual(E: Embedding, mode: str = "weak", points: int = 64, seed: int = 0,
                          tol: float = TAU_SUB, subpoints=None) -> ResidualStat:
    """Normal leakage of the curvature operator on tangent vectors.

    ``weak``: X, Y, Z tangent.  ``strong``: X, Y ambient, Z tangent.  Both are
    normalised by the same scale, ``max ||R(X, Y)Z||`` over ambient X, Y and
    tangent Z, so the strong residual dominates the weak one sample by sample.
    """
    if mode not in ("weak", "strong"):
        raise ValueError("mode must be 'weak' or 'strong'")
    sps = subpoints or _subpoints(E, points, seed)
    vals = []
    k = E.subdim
    for sp in sps:
        F = _ambient_frame(sp)
        op = np.einsum("xyzw,xa,yb,zc,mw->abcm", sp.ambient.riemann, F, F, F[:, :k], sp.ambient.g_inv,
                       optimize=True)
        norms = np.sqrt(np.einsum("abcm,mn,abcn->abc", op, sp.g, op))
        normal = np.einsum("mr,abcr->abcm", sp.P_normal, op)
        nnorms = np.sqrt(np.maximum(np.einsum("abcm,mn,abcn->abc", normal, sp.g, normal), 0.0))
        scale = float(norms.max())
        leak = nnorms[:k, :k, :].max() if mode == "weak" else nnorms.max()
        vals.append(relative(leak, scale))
    return _stat(f"r_invariance_{mode}", vals, tol)


def eq57_residual(E: Embedding, points: int = 64, seed: int = 0, tol: float = 1e-6, subpoints=None) -> ResidualStat:
    """-(R(X,Y)Z)^perp against g(Y,Z) nabla-perp_X H - g(X,Z) nabla-perp_Y H (umbilical Codazzi)."""
    sps = subpoints or _subpoints(E, points, seed)
    vals = []
    k = E.subdim
    for sp in sps:
        cp = sp.ambient
        scale = frobenius(in_frame(cp.riemann, _ambient_frame(sp)))
        nH = np.einsum("cm,ci->im", sp.nablaH, sp.coeffs)
        worst = 0.0
        for x, y, z in product(range(k), repeat=3):
            lhs = -sp.P_normal @ _R_vec(cp, sp.T[:, x], sp.T[:, y], sp.T[:, z])
            rhs = (y == z) * nH[x] - (x == z) * nH[y]
            worst = max(worst, sp.norm(lhs - rhs))
        vals.append(relative(worst, scale))
    return _stat("eq57", vals, tol)


def totally_geodesic_test(E: Embedding, points: int = 64, seed: int = 0, tol: float = TAU_SUB, subpoints=None) -> ResidualStat:
    sps = subpoints or _subpoints(E, points, seed)
    vals = [max(sp.norm(v) for v in sp.B_frame().reshape(-1, sp.g.shape[0])) for sp in sps]
    return _stat("totally_geodesic", vals, tol)


def weingarten_test(E: Embedding, points: int = 64, seed: int = 0, tol: float = 1e-9, subpoints=None) -> ResidualStat:
    sps = subpoints or _subpoints(E, points, seed)
    return _stat("weingarten_duality", [sp.weingarten_defect() for sp in sps], tol)


# -- theorem checks ----------------------------------------------------------


def theorem52_check(E: Embedding, points: int = 64, seed: int = 0, tol: float = TAU_SUB, subpoints=None) -> TheoremVerdict:
    """Totally umbilical: R-invariant iff parallel mean curvature."""
    sps = subpoints or _subpoints(E, points, seed)
    umb = umbilical_test(E, points, seed, tol, sps)
    if not umb.verdict:
        return TheoremVerdict("theorem52", "INCONCLUSIVE", "submanifold is not totally umbilical",
                              {"umbilical": umb})
    weak = r_invariance_residual(E, "weak", points, seed, tol, sps)
    par = parallel_H_test(E, points, seed, tol, sps)
    e57 = eq57_residual(E, points, seed, 1e-6, sps)
    status = "CONSISTENT" if (weak.verdict == par.verdict) else "INCONSISTENT"
    return TheoremVerdict("theorem52", status, "", {"umbilical": umb, "r_invariance_weak": weak,
                                                    "parallel_H": par, "eq57": e57})


def _strong_confirmation(name, E, points, seed, tol, sps, gate_details):
    strong = r_invariance_residual(E, "strong", points, seed, tol, sps)
    status = "CONTRADICTION-CONFIRMED" if strong.max > CONTRADICTION_FLOOR else "NOT-CONFIRMED"
    gate_details["r_invariance_strong"] = strong
    return TheoremVerdict(name, status, "", gate_details)


def theorem61_check(E: Embedding, points: int = 64, seed: int = 0, tol: float = TAU_SUB, subpoints=None,
                    ambient_points: Optional[int] = None, pairs: int = 32) -> TheoremVerdict:
    """No holomorphic strongly R-invariant submanifold when mu is a non-zero constant."""
    from .classify import sectional_constancy

    M = E.ambient
    if not M.hermitian:
        return TheoremVerdict("theorem61", "INCONCLUSIVE", "ambient is not almost Hermitian", {})
    sps = subpoints or _subpoints(E, points, seed)
    hol = holomorphic_test(E, points, seed, tol, sps)
    const = sectional_constancy(M, "holomorphic", ambient_points or points, pairs, seed, tol)
    details = {"holomorphic": hol, "holomorphic_sectional": const.stat}
    if not const.stat.verdict:
        return TheoremVerdict("theorem61", "INCONCLUSIVE", "holomorphic sectional curvature not pointwise constant", details)
    if min(abs(m) for m in const.point_means) <= tol:
        return TheoremVerdict("theorem61", "INCONCLUSIVE", "holomorphic sectional curvature vanishes", details)
    if not hol.verdict:
        return TheoremVerdict("theorem61", "INCONCLUSIVE", "submanifold is not holomorphic", details)
    return _strong_confirmation("theorem61", E, points, seed, tol, sps, details)


def eq64_residual(E: Embedding, alpha: float, points: int = 64, seed: int = 0, tol: float = 1e-6, subpoints=None) -> ResidualStat:
    """R(X,xi,X,xi) - 2R(X,xi,JX,Jxi) + R(JX,Jxi,JX,Jxi) against 2 alpha, unit tangent X, unit normal xi."""
    sps = subpoints or _subpoints(E, points, seed)
    vals = []
    for sp in sps:
        R = sp.ambient.riemann
        J = sp.J

        def r4(a, b, c, d):
            return np.einsum("ijkl,i,j,k,l->", R, a, b, c, d)

        for a in range(sp.T.shape[1]):
            X = sp.T[:, a]
            for r in range(sp.Nor.shape[1]):
                xi = sp.Nor[:, r]
                lhs = r4(X, xi, X, xi) - 2 * r4(X, xi, J @ X, J @ xi) + r4(J @ X, J @ xi, J @ X, J @ xi)
                vals.append(abs(lhs - 2 * alpha) / (1 + abs(alpha)))
    return _stat("eq64", vals, tol, alpha_weak=alpha)


def theorem62_check(E: Embedding, points: int = 64, seed: int = 0, tol: float = TAU_SUB, subpoints=None,
                    ambient_points: Optional[int] = None, pairs: int = 32) -> TheoremVerdict:
    """No holomorphic strongly R-invariant submanifold of non-zero weak constant type."""
    from .classify import FitError, weak_constant_type_test

    M = E.ambient
    if not M.hermitian or M.dim < 4:
        return TheoremVerdict("theorem62", "INCONCLUSIVE", "ambient is not almost Hermitian of dimension >= 4", {})
    sps = subpoints or _subpoints(E, points, seed)
    hol = holomorphic_test(E, points, seed, tol, sps)
    try:
        weak = weak_constant_type_test(M, ambient_points or points, pairs, seed, tol)
    except FitError as exc:
        return TheoremVerdict("theorem62", "INCONCLUSIVE", str(exc), {"holomorphic": hol})
    alpha = weak.constants["alpha"]
    details = {"holomorphic": hol, "weak_constant_type": weak}
    if not weak.verdict:
        return TheoremVerdict("theorem62", "INCONCLUSIVE", "ambient is not of weak constant type", details)
    if abs(alpha) <= tol:
        return TheoremVerdict("theorem62", "INCONCLUSIVE", "constant type is zero", details)
    if not hol.verdict:
        return TheoremVerdict("theorem62", "INCONCLUSIVE", "submanifold is not holomorphic", details)
    details["eq64"] = eq64_residual(E, alpha, points, seed, 1e-6, sps)
    return _strong_confirmation("theorem62", E, points, seed, tol, sps, details)
