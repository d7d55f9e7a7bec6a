"""Chart model of an almost Hermitian manifold, validation and frame sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import expr as ex
from .jets import Jet, lift

TAU_ALG = 1e-9
TAU_STRUCT = 1e-8
BOUNDARY_MARGIN = 1e-3
MAX_FRAME_ATTEMPTS = 16

# sampling streams, mixed into the seed so each purpose gets independent draws
STREAM_POINTS = 1
STREAM_FRAMES = 2
STREAM_PAIRS = 3
STREAM_HOLO = 4
STREAM_ANTI = 5
STREAM_SUB = 6


class ManifoldError(ValueError):
    pass


class DegenerateFrameError(ManifoldError):
    pass


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Deterministic generator for ``(seed, stream...)``."""
    return np.random.default_rng([int(seed) & (2**64 - 1), *stream])


@dataclass(frozen=True)
class ChartManifold:
    """Single-chart almost Hermitian manifold given by component expressions.

    ``g[i][j]`` are the metric components and ``J[i][j]`` the mixed components
    ``J^i_j`` of the almost complex structure.  ``J`` is ``None`` for a purely
    Riemannian ambient (odd dimension allowed).
    """

    name: str
    dim: int
    domain: tuple[tuple[float, float], ...]
    g: tuple[tuple[str, ...], ...]
    J: Optional[tuple[tuple[str, ...], ...]] = None

    def __post_init__(self):
        n = self.dim
        if n < 1:
            raise ManifoldError("dimension must be positive")
        if len(self.domain) != n:
            raise ManifoldError(f"domain has {len(self.domain)} intervals, expected {n}")
        for lo, hi in self.domain:
            if not lo < hi:
                raise ManifoldError(f"empty domain interval [{lo}, {hi}]")
        _check_square(self.g, n, "g")
        if self.J is not None:
            _check_square(self.J, n, "J")
            if n % 2:
                raise ManifoldError("an almost complex structure needs even dimension")

    @classmethod
    def create(cls, name, dim, domain, g, J=None) -> "ChartManifold":
        return cls(
            name=name,
            dim=int(dim),
            domain=tuple((float(lo), float(hi)) for lo, hi in domain),
            g=tuple(tuple(str(c) for c in row) for row in g),
            J=None if J is None else tuple(tuple(str(c) for c in row) for row in J),
        )

    @classmethod
    def from_dict(cls, data: dict) -> "ChartManifold":
        for key in ("dim", "domain", "g", "name"):
            if key not in data:
                raise ManifoldError(f"manifold definition lacks {key!r}")
        return cls.create(data["name"], data["dim"], data["domain"], data["g"], data.get("J"))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "domain": [list(iv) for iv in self.domain],
            "g": [list(row) for row in self.g],
            "J": None if self.J is None else [list(row) for row in self.J],
        }

    @property
    def hermitian(self) -> bool:
        return self.J is not None

    @cached_property
    def g_expr(self):
        return _parse_matrix(self.g, self.dim, "g")

    @cached_property
    def J_expr(self):
        if self.J is None:
            return None
        return _parse_matrix(self.J, self.dim, "J")

    # -- evaluation ----------------------------------------------------------

    def metric_jets(self, points, order: int) -> "FieldJets":
        return field_jets(self.g_expr, points, order, "g")

    def J_jets(self, points, order: int) -> "FieldJets":
        if self.J_expr is None:
            raise ManifoldError(f"{self.name} has no almost complex structure")
        return field_jets(self.J_expr, points, order, "J")

    def metric(self, p) -> np.ndarray:
        return evaluate_matrix(self.g_expr, p, "g")

    def complex_structure(self, p) -> np.ndarray:
        if self.J_expr is None:
            raise ManifoldError(f"{self.name} has no almost complex structure")
        return evaluate_matrix(self.J_expr, p, "J")

    def contains(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        return all(lo <= x <= hi for x, (lo, hi) in zip(p, self.domain))


def _check_square(rows, n, label):
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ManifoldError(f"{label} must be a {n}x{n} matrix of expressions")


def _parse_matrix(rows, n, label, prefix="x"):
    out = []
    for i, row in enumerate(rows):
        parsed = []
        for j, text in enumerate(row):
            try:
                parsed.append(ex.parse(text, n, prefix))
            except ex.ExprError as exc:
                raise ManifoldError(f"{label}[{i}][{j}]: {exc}") from exc
        out.append(tuple(parsed))
    return tuple(out)


@dataclass
class FieldJets:
    """Matrix field with derivatives: ``val[..., r, c]``, ``d1[..., r, c, m]`` etc."""

    val: np.ndarray
    d1: Optional[np.ndarray] = None
    d2: Optional[np.ndarray] = None
    d3: Optional[np.ndarray] = None


def field_jets(exprs, points, order: int, label: str = "field", prefix_dim: Optional[int] = None) -> FieldJets:
    """Evaluate a matrix (or vector) of expressions as jets at a batch of points."""
    points = np.asarray(points, dtype=float)
    batch = points.shape[:-1]
    n = points.shape[-1]
    coords = Jet.coordinates(points, order)
    flat = []
    shape = (len(exprs),) if not isinstance(exprs[0], tuple) else (len(exprs), len(exprs[0]))
    items = list(exprs) if len(shape) == 1 else [e for row in exprs for e in row]
    for k, e in enumerate(items):
        try:
            jet = lift(ex.evaluate(e, coords), n, order, batch)
        except ex.EvaluationError as exc:
            idx = divmod(k, shape[1]) if len(shape) == 2 else (k,)
            raise ManifoldError(f"{label}{list(idx)}: {exc}") from exc
        flat.append(jet)
    parts = []
    for level in range(order + 1):
        arrs = [j.val if level == 0 else (j.d1, j.d2, j.d3)[level - 1] for j in flat]
        arrs = [np.broadcast_to(np.asarray(a, dtype=float), batch + (n,) * level) for a in arrs]
        stacked = np.stack(arrs, axis=len(batch))
        parts.append(stacked.reshape(batch + shape + (n,) * level))
    return FieldJets(*parts)


def evaluate_matrix(exprs, p, label="field") -> np.ndarray:
    p = [float(x) for x in np.asarray(p, dtype=float)]
    out = np.empty((len(exprs), len(exprs[0])))
    for i, row in enumerate(exprs):
        for j, e in enumerate(row):
            try:
                out[i, j] = ex.evaluate(e, p)
            except ex.EvaluationError as exc:
                raise ManifoldError(f"{label}[{i}][{j}] at {p}: {exc}") from exc
    return out


# -- validation -------------------------------------------------------------


@dataclass
class ValidationReport:
    name: str
    samples: int
    symmetry: float
    min_eigenvalue: float
    j_squared: Optional[float]
    compatibility: Optional[float]
    tol: float = TAU_STRUCT
    failure: Optional[str] = None

    @property
    def passed(self) -> bool:
        if self.failure is not None:
            return False
        checks = [self.symmetry < self.tol, self.min_eigenvalue > 0]
        if self.j_squared is not None:
            checks += [self.j_squared < self.tol, self.compatibility < self.tol]
        return all(checks)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "symmetry": self.symmetry,
            "min_eigenvalue": self.min_eigenvalue,
            "j_squared": self.j_squared,
            "compatibility": self.compatibility,
            "tolerance": self.tol,
            "failure": self.failure,
            "verdict": "pass" if self.passed else "fail",
        }


def sample_points(M: ChartManifold, count: int, seed: int, domain=None) -> np.ndarray:
    """Uniform points in the domain box, kept ``BOUNDARY_MARGIN`` inside."""
    box = np.asarray(domain if domain is not None else M.domain, dtype=float)
    lo = box[:, 0] + BOUNDARY_MARGIN
    hi = box[:, 1] - BOUNDARY_MARGIN
    rng = rng_for(seed, STREAM_POINTS)
    return lo + (hi - lo) * rng.random((count, len(box)))


def validate(M: ChartManifold, samples: int = 64, seed: int = 0, tol: float = TAU_STRUCT) -> ValidationReport:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    pts = sample_points(M, samples, seed)
    report = ValidationReport(M.name, samples, 0.0, np.inf, None, None, tol)
    try:
        g = M.metric_jets(pts, 0).val
        J = M.J_jets(pts, 0).val if M.hermitian else None
    except ManifoldError as exc:
        report.failure = str(exc)
        report.min_eigenvalue = float("nan")
        return report
    report.symmetry = float(np.max(np.abs(g - np.swapaxes(g, -1, -2))))
    sym = 0.5 * (g + np.swapaxes(g, -1, -2))
    report.min_eigenvalue = float(np.min(np.linalg.eigvalsh(sym)))
    if J is not None:
        eye = np.eye(M.dim)
        report.j_squared = float(np.max(np.abs(J @ J + eye)))
        compat = np.einsum("bki,bkl,blj->bij", J, g, J) - g
        report.compatibility = float(np.max(np.abs(compat)))
    return report


# -- frames -----------------------------------------------------------------


def gram_schmidt(vectors: np.ndarray, g: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """g-orthonormalise the columns of ``vectors`` (two passes of modified GS)."""
    cols = []
    for j in range(vectors.shape[1]):
        v = vectors[:, j].astype(float).copy()
        scale = np.sqrt(abs(v @ g @ v))
        for _ in range(2):
            for q in cols:
                v -= (q @ g @ v) * q
        norm = np.sqrt(max(v @ g @ v, 0.0))
        if scale == 0 or norm < tol * scale:
            raise DegenerateFrameError(f"column {j} is (numerically) dependent")
        cols.append(v / norm)
    return np.column_stack(cols) if cols else np.zeros((vectors.shape[0], 0))


@dataclass
class PointFrame:
    point: np.ndarray
    E: np.ndarray  # columns are g-orthonormal tangent vectors


def random_frame(g: np.ndarray, rng: np.random.Generator, columns: Optional[int] = None) -> np.ndarray:
    n = g.shape[0]
    k = n if columns is None else columns
    for _ in range(MAX_FRAME_ATTEMPTS):
        try:
            return gram_schmidt(rng.standard_normal((n, k)), g)
        except DegenerateFrameError:
            continue
    raise DegenerateFrameError(f"no non-degenerate frame after {MAX_FRAME_ATTEMPTS} draws")


def sample_frame(M: ChartManifold, p, seed: int) -> PointFrame:
    p = np.asarray(p, dtype=float)
    if not M.contains(p):
        raise ManifoldError(f"point {p} lies outside the domain of {M.name}")
    return PointFrame(p, random_frame(M.metric(p), rng_for(seed, STREAM_FRAMES)))


@dataclass
class PlanePair:
    point: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    kind: str  # "holomorphic" | "anti-holomorphic" | "generic"


def unit_vector(g: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    for _ in range(MAX_FRAME_ATTEMPTS):
        v = rng.standard_normal(g.shape[0])
        norm = np.sqrt(v @ g @ v)
        if norm > 1e-8:
            return v / norm
    raise DegenerateFrameError("could not draw a unit vector")


def antiholomorphic_pair(g: np.ndarray, J: np.ndarray, rng: np.random.Generator):
    """Unit X and unit Y g-orthogonal to span{X, JX}."""
    n = g.shape[0]
    if n < 4:
        raise ManifoldError("anti-holomorphic planes need dimension >= 4")
    X = unit_vector(g, rng)
    basis = gram_schmidt(np.column_stack([X, J @ X]), g)
    for _ in range(MAX_FRAME_ATTEMPTS):
        Y = rng.standard_normal(n)
        for _ in range(2):
            Y = Y - basis @ (basis.T @ g @ Y)
        norm = np.sqrt(Y @ g @ Y)
        if norm > 1e-8:
            return X, Y / norm
    raise DegenerateFrameError("could not draw an anti-holomorphic partner")


def sample_antiholomorphic_pair(M: ChartManifold, p, seed: int) -> PlanePair:
    if M.dim < 4:
        raise ManifoldError("anti-holomorphic planes need dimension >= 4")
    p = np.asarray(p, dtype=float)
    X, Y = antiholomorphic_pair(M.metric(p), M.complex_structure(p), rng_for(seed, STREAM_ANTI))
    return PlanePair(p, X, Y, "anti-holomorphic")


def sample_holomorphic_pair(M: ChartManifold, p, seed: int) -> PlanePair:
    p = np.asarray(p, dtype=float)
    g = M.metric(p)
    X = unit_vector(g, rng_for(seed, STREAM_HOLO))
    return PlanePair(p, X, M.complex_structure(p) @ X, "holomorphic")
