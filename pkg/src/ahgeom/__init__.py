"""Curvature identities and submanifold tests for almost Hermitian charts."""

from .curvature import christoffel, curvature_batch, nabla_J, riemann, sectional
from .expr import parse
from .manifold import ChartManifold, sample_points, validate
from .submanifold import Embedding, induce

__version__ = "0.1.0"

__all__ = [
    "ChartManifold",
    "Embedding",
    "christoffel",
    "curvature_batch",
    "induce",
    "nabla_J",
    "parse",
    "riemann",
    "sample_points",
    "sectional",
    "validate",
]
