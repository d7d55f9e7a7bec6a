"""Christoffel symbols, Riemann tensor, covariant derivative of J, sectional curvature.

Sign convention: ``R(X, Y) = nabla_[X,Y] - [nabla_X, nabla_Y]`` and
``R(X, Y, Z, W) = g(R(X, Y)Z, W)``, so that ``K(X, Y) = R(X, Y, X, Y)`` is
``+1`` on the unit sphere.  In components ``R[i, j, k, l] = R(d_i, d_j, d_k, d_l)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .manifold import ChartManifold, ManifoldError

TAU_CURV = 1e-8
NORM_FLOOR = 1e-12
DEGENERATE_PLANE = 1e-6


class SingularMetricError(ManifoldError):
    pass


class DegeneratePlaneError(ValueError):
    pass


@dataclass
class CurvaturePoint:
    point: np.ndarray
    g: np.ndarray  # g_ij
    g_inv: np.ndarray  # g^ij
    gamma: np.ndarray  # gamma[k, i, j] = Gamma^k_ij
    riemann: np.ndarray  # R_ijkl, all indices lowered
    dg: np.ndarray  # dg[i, j, m] = d_m g_ij
    dgamma: np.ndarray  # dgamma[k, i, j, m] = d_m Gamma^k_ij
    J: Optional[np.ndarray] = None  # J^i_j
    nabla_J: Optional[np.ndarray] = None  # nabla_J[i, k, j] = (nabla_i J)^k_j

    @property
    def dim(self) -> int:
        return self.g.shape[0]


def relative(delta: float, scale: float, floor: float = NORM_FLOOR) -> float:
    """``delta / scale``, falling back to the absolute value when the scale vanishes."""
    return float(delta / scale) if scale > floor else float(delta)


def _inverse(g: np.ndarray) -> np.ndarray:
    eig = np.linalg.eigvalsh(0.5 * (g + np.swapaxes(g, -1, -2)))
    if np.any(np.abs(eig).min(axis=-1) < 1e-14 * np.abs(eig).max(axis=-1)):
        raise SingularMetricError("metric is singular at a sample point")
    return np.linalg.inv(g)


def connection_arrays(g, dg, d2g):
    """Batch Christoffel symbols and their first derivatives.

    ``g[b, i, j]``, ``dg[b, i, j, m] = d_m g_ij``, ``d2g[b, i, j, m, p]``.
    Returns ``(g_inv, gamma[b, k, i, j], dgamma[b, k, i, j, m])``.
    """
    g_inv = _inverse(g)
    # first kind: Gamma_{l,ij} = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    first = 0.5 * (
        np.einsum("bjli->blij", dg) + np.einsum("bilj->blij", dg) - np.einsum("bijl->blij", dg)
    )
    gamma = np.einsum("bkl,blij->bkij", g_inv, first)
    if d2g is None:
        return g_inv, gamma, None
    dfirst = 0.5 * (
        np.einsum("bjlim->blijm", d2g) + np.einsum("biljm->blijm", d2g) - np.einsum("bijlm->blijm", d2g)
    )
    dg_inv = -np.einsum("zka,zacm,zcl->zklm", g_inv, dg, g_inv)
    dgamma = np.einsum("bklm,blij->bkijm", dg_inv, first) + np.einsum("bkl,blijm->bkijm", g_inv, dfirst)
    return g_inv, gamma, dgamma


def riemann_from_connection(g, gamma, dgamma):
    """Lowered curvature tensor with K = +1 on the unit sphere (batch)."""
    # textbook R^l_{kij} = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    text = (
        np.einsum("bljki->blkij", dgamma)
        - np.einsum("blikj->blkij", dgamma)
        + np.einsum("blim,bmjk->blkij", gamma, gamma)
        - np.einsum("bljm,bmik->blkij", gamma, gamma)
    )
    # R(d_i, d_j) d_k = -R^l_{kij} d_l, lowered on the last slot
    return -np.einsum("blm,bmkij->bijkl", g, text)


def nabla_J_from(gamma, J, dJ):
    """``(nabla_i J)^k_j`` from Christoffel symbols and ``dJ[b, k, j, i] = d_i J^k_j``."""
    return (
        np.einsum("bkji->bikj", dJ)
        + np.einsum("bkim,bmj->bikj", gamma, J)
        - np.einsum("bmij,bkm->bikj", gamma, J)
    )


def curvature_batch(M: ChartManifold, points, with_J: bool = True) -> list[CurvaturePoint]:
    """Full curvature package at every row of ``points``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    gj = M.metric_jets(points, 2)
    g_inv, gamma, dgamma = connection_arrays(gj.val, gj.d1, gj.d2)
    R = riemann_from_connection(gj.val, gamma, dgamma)
    J = nJ = None
    if with_J and M.hermitian:
        jj = M.J_jets(points, 1)
        J = jj.val
        nJ = nabla_J_from(gamma, J, jj.d1)
    out = []
    for b, p in enumerate(points):
        out.append(
            CurvaturePoint(
                point=p,
                g=gj.val[b],
                g_inv=g_inv[b],
                gamma=gamma[b],
                riemann=R[b],
                dg=gj.d1[b],
                dgamma=dgamma[b],
                J=None if J is None else J[b],
                nabla_J=None if nJ is None else nJ[b],
            )
        )
    return out


def christoffel(M: ChartManifold, p) -> np.ndarray:
    """``Gamma[k, i, j] = Gamma^k_ij`` at ``p``."""
    gj = M.metric_jets(np.atleast_2d(np.asarray(p, dtype=float)), 1)
    return connection_arrays(gj.val, gj.d1, None)[1][0]


def riemann(M: ChartManifold, p) -> CurvaturePoint:
    return curvature_batch(M, [p])[0]


def nabla_J(M: ChartManifold, p) -> np.ndarray:
    cp = curvature_batch(M, [p])[0]
    if cp.nabla_J is None:
        raise ManifoldError(f"{M.name} has no almost complex structure")
    return cp.nabla_J


def curvature_4form(cp: CurvaturePoint, X, Y, Z, W) -> float:
    return float(np.einsum("ijkl,i,j,k,l->", cp.riemann, X, Y, Z, W))


def sectional(cp: CurvaturePoint, X, Y) -> float:
    """``R(X, Y, X, Y)`` for an orthonormal pair."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    g = cp.g
    gram = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    if gram < DEGENERATE_PLANE:
        raise DegeneratePlaneError(f"degenerate plane (Gram determinant {gram:.3g})")
    return curvature_4form(cp, X, Y, X, Y)


def curvature_operator(cp: CurvaturePoint) -> np.ndarray:
    """``op[x, y, z, m]``: components of the vector ``R(d_x, d_y) d_z``."""
    return np.einsum("xyzw,mw->xyzm", cp.riemann, cp.g_inv)


def in_frame(T: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Components of a covariant 4-tensor on the frame columns of ``E``."""
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", T, E, E, E, E, optimize=True)


def J_in_frame(J: np.ndarray, E: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Matrix of J in a g-orthonormal frame (column a = J E_a in frame coordinates)."""
    return E.T @ g @ J @ E


def frobenius(T: np.ndarray) -> float:
    return float(np.sqrt(np.sum(T * T)))


def symmetry_residuals(cp: CurvaturePoint, E: Optional[np.ndarray] = None) -> dict[str, float]:
    """Relative violations of the algebraic Riemann symmetries and first Bianchi."""
    R = cp.riemann if E is None else in_frame(cp.riemann, E)
    scale = frobenius(R)
    res = {
        "antisym_12": np.abs(R + R.transpose(1, 0, 2, 3)).max(),
        "antisym_34": np.abs(R + R.transpose(0, 1, 3, 2)).max(),
        "pair_sym": np.abs(R - R.transpose(2, 3, 0, 1)).max(),
        # R_ijkl + R_iklj + R_iljk
        "bianchi": np.abs(R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)).max(),
    }
    return {k: relative(v, scale) for k, v in res.items()}
