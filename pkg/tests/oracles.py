"""Independent reference computations used by the tests.

Nothing here touches the jet machinery: derivatives come from finite-difference
stencils on plain metric evaluations, and curvature from the closed formula in
second derivatives of g rather than from derivatives of Christoffel symbols.
"""

from itertools import product

import numpy as np

from ahgeom import expr as ex

# 5-point central weights: exact on polynomials of degree <= 4
STENCIL = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))


def fd_partial(f, p, idx, h):
    """Nested 5-point derivative of ``f`` at ``p`` along the multi-index ``idx``."""
    p = np.asarray(p, dtype=float)
    if not idx:
        return f(p)
    i, rest = idx[0], idx[1:]
    total = 0.0
    for k, w in STENCIL:
        q = p.copy()
        q[i] += k * h
        total = total + w * fd_partial(f, q, rest, h)
    return total / h


def fd_metric_derivs(M, p, h1=1e-4, h2=1e-3):
    """``g``, ``dg[i,j,m]`` and ``d2g[i,j,m,q]`` by finite differences."""
    n = M.dim
    g = M.metric(p)
    dg = np.stack([fd_partial(M.metric, p, (m,), h1) for m in range(n)], axis=-1)
    d2g = np.empty((n, n, n, n))
    for m, q in product(range(n), repeat=2):
        d2g[:, :, m, q] = fd_partial(M.metric, p, (m, q), h2)
    return g, dg, d2g


def fd_christoffel(M, p):
    g, dg, _ = fd_metric_derivs(M, p)
    gi = np.linalg.inv(g)
    n = M.dim
    G = np.zeros((n, n, n))
    for k, i, j in product(range(n), repeat=3):
        G[k, i, j] = 0.5 * sum(gi[k, l] * (dg[j, l, i] + dg[i, l, j] - dg[i, j, l]) for l in range(n))
    return G


def fd_riemann(M, p):
    """``R[a,b,c,d] = R(d_a, d_b, d_c, d_d)``; K(X,Y) = R(X,Y,X,Y) is +1 on the unit sphere."""
    g, dg, d2g = fd_metric_derivs(M, p)
    gi = np.linalg.inv(g)
    n = M.dim
    G = np.einsum("kl,lij->kij", gi, 0.5 * (np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg)
                                            - np.einsum("ijl->lij", dg)))
    R = np.zeros((n,) * 4)
    for a, b, c, d in product(range(n), repeat=4):
        second = 0.5 * (d2g[a, d, b, c] + d2g[b, c, a, d] - d2g[b, d, a, c] - d2g[a, c, b, d])
        quad = sum(g[e, f] * (G[e, b, c] * G[f, a, d] - G[e, b, d] * G[f, a, c])
                   for e in range(n) for f in range(n))
        R[a, b, c, d] = second + quad
    return R


def plain_function(e):
    """``p -> evaluate(e, p)`` on plain floats."""
    return lambda p: ex.evaluate(e, [float(x) for x in p])


def fd_second_fundamental(E, u, h=1e-3):
    """``B(d_a, d_b)`` from finite differences of phi and of the ambient metric."""
    M = E.ambient
    phi = [plain_function(e) for e in E.phi_expr]
    n, k = M.dim, E.subdim

    def embed(v):
        return np.array([f(v) for f in phi])

    p = embed(u)
    jac = np.column_stack([[fd_partial(f, u, (a,), h) for f in phi] for a in range(k)])
    hess = np.empty((k, k, n))
    for a, b in product(range(k), repeat=2):
        hess[a, b] = [fd_partial(f, u, (a, b), h) for f in phi]
    G = fd_christoffel(M, p)
    g = M.metric(p)
    acc = hess + np.einsum("mij,ia,jb->abm", G, jac, jac)
    # normal projection: subtract the g-orthogonal projection on span(jac)
    gt = jac.T @ g @ jac
    P = np.eye(n) - jac @ np.linalg.solve(gt, jac.T @ g)
    return np.einsum("mr,abr->abm", P, acc), jac, g


_ATOMS = ("x{i}", "sin(x{i})", "cos(x{j})*x{i}", "x{i}*x{j}", "exp(0.3*x{i})", "x{i}^2")


def random_metric(rng, n, name="random", half_width=0.8):
    """``g = I + A^T A`` with random closed-form entries of ``A``: positive definite everywhere."""
    from ahgeom import ChartManifold

    A = []
    for _ in range(n):
        row = []
        for _ in range(n):
            i, j = rng.integers(1, n + 1, 2)
            atom = _ATOMS[rng.integers(len(_ATOMS))].format(i=i, j=j)
            row.append(f"({round(float(rng.uniform(-0.7, 0.7)), 4)!r})*{atom}")
        A.append(row)
    g = [[" + ".join(["1" if a == b else "0"] + [f"{A[k][a]}*{A[k][b]}" for k in range(n)])
          for b in range(n)] for a in range(n)]
    return ChartManifold.create(name, n, [[-half_width, half_width]] * n, g)
