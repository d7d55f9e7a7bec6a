"""Truncated multivariate Taylor arithmetic (jets) up to order 3.

A :class:`Jet` carries the value of a scalar function together with all of its
partial derivatives in ``n`` chart coordinates up to a fixed order.  Values may
be plain floats or numpy arrays (a leading batch of sample points); every
derivative tensor then carries the batch shape in front of its ``n`` axes.

Derivative tensors are stored densely (``d2[..., i, j]``, ``d3[..., i, j, k]``)
and are symmetric under index permutation up to rounding;
:meth:`Jet.partial` reads a mixed partial through its sorted multi-index so
each multi-index has exactly one canonical storage slot.
"""

from __future__ import annotations

import numpy as np

MAX_ORDER = 3


class DomainError(ArithmeticError):
    """Raised when an elementary function is applied outside its domain."""


def _sym3(u, m):
    # u_i m_jk + u_j m_ik + u_k m_ij
    return (
        u[..., :, None, None] * m[..., None, :, :]
        + u[..., None, :, None] * m[..., :, None, :]
        + u[..., None, None, :] * m[..., :, :, None]
    )


def _outer(u, v):
    return u[..., :, None] * v[..., None, :]


def _outer3(u):
    return u[..., :, None, None] * u[..., None, :, None] * u[..., None, None, :]


class Jet:
    """Scalar (or batch of scalars) with partial derivatives through ``order``."""

    __slots__ = ("val", "d1", "d2", "d3", "order", "n")
    __array_priority__ = 1000  # keep numpy scalars from hijacking the operators

    def __init__(self, val, d1=None, d2=None, d3=None, *, order: int, n: int):
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"jet order must be in 0..{MAX_ORDER}, got {order}")
        self.val = val
        self.d1 = d1
        self.d2 = d2
        self.d3 = d3
        self.order = order
        self.n = n

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, value, n: int, order: int) -> "Jet":
        value = np.asarray(value, dtype=float) if np.ndim(value) else float(value)
        shape = np.shape(value)
        parts = [np.zeros(shape + (n,) * k) for k in range(1, order + 1)]
        parts += [None] * (MAX_ORDER - order)
        return cls(value, *parts, order=order, n=n)

    @classmethod
    def variable(cls, value, index: int, n: int, order: int) -> "Jet":
        """Coordinate function ``x_index`` seeded at ``value``."""
        jet = cls.constant(value, n, order)
        if order >= 1:
            jet.d1[..., index] = 1.0
        return jet

    @classmethod
    def coordinates(cls, point, order: int) -> list["Jet"]:
        """Jets of all coordinate functions at ``point`` (shape ``(n,)`` or ``(B, n)``)."""
        point = np.asarray(point, dtype=float)
        n = point.shape[-1]
        return [cls.variable(point[..., i], i, n, order) for i in range(n)]

    # -- helpers ------------------------------------------------------------

    def _check(self, other: "Jet") -> None:
        if other.order != self.order or other.n != self.n:
            raise ValueError(
                f"jet mismatch: order {self.order}/{other.order}, dim {self.n}/{other.n}"
            )

    def _parts(self):
        return [p for p in (self.d1, self.d2, self.d3)[: self.order]]

    def _new(self, val, parts) -> "Jet":
        parts = list(parts) + [None] * (MAX_ORDER - len(parts))
        return Jet(val, *parts, order=self.order, n=self.n)

    def partial(self, *idx: int):
        """Mixed partial derivative for the multi-index ``idx`` (order = len(idx))."""
        k = len(idx)
        if k == 0:
            return self.val
        if k > self.order:
            raise ValueError(f"order-{self.order} jet has no {k}-th derivatives")
        arr = (self.d1, self.d2, self.d3)[k - 1]
        return arr[(Ellipsis,) + tuple(sorted(idx))]

    def compose(self, f0, f1, f2=None, f3=None) -> "Jet":
        """Chain rule: jet of ``f(self)`` given the derivatives ``f^(k)`` at ``self.val``."""
        parts = []
        if self.order >= 1:
            parts.append(_e(f1, 1) * self.d1)
        if self.order >= 2:
            parts.append(_e(f1, 2) * self.d2 + _e(f2, 2) * _outer(self.d1, self.d1))
        if self.order >= 3:
            parts.append(
                _e(f1, 3) * self.d3
                + _e(f2, 3) * _sym3(self.d1, self.d2)
                + _e(f3, 3) * _outer3(self.d1)
            )
        return self._new(f0, parts)

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "Jet":
        return self._new(-self.val, [-p for p in self._parts()])

    def __pos__(self) -> "Jet":
        return self

    def __add__(self, other) -> "Jet":
        if isinstance(other, Jet):
            self._check(other)
            return self._new(
                self.val + other.val,
                [a + b for a, b in zip(self._parts(), other._parts())],
            )
        return self._new(self.val + other, self._parts())

    def __radd__(self, other) -> "Jet":
        return self._new(other + self.val, self._parts())

    def __sub__(self, other) -> "Jet":
        if isinstance(other, Jet):
            self._check(other)
            return self._new(
                self.val - other.val,
                [a - b for a, b in zip(self._parts(), other._parts())],
            )
        return self._new(self.val - other, self._parts())

    def __rsub__(self, other) -> "Jet":
        return self._new(other - self.val, [-p for p in self._parts()])

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return self._new(self.val * other, [p * _e(other, k + 1) for k, p in enumerate(self._parts())])
        self._check(other)
        a, b = self, other
        parts = []
        if a.order >= 1:
            parts.append(_e(a.val, 1) * b.d1 + a.d1 * _e(b.val, 1))
        if a.order >= 2:
            parts.append(
                _e(a.val, 2) * b.d2
                + _outer(a.d1, b.d1)
                + _outer(b.d1, a.d1)
                + a.d2 * _e(b.val, 2)
            )
        if a.order >= 3:
            parts.append(
                _e(a.val, 3) * b.d3
                + _sym3(a.d1, b.d2)
                + _sym3(b.d1, a.d2)
                + a.d3 * _e(b.val, 3)
            )
        return self._new(a.val * b.val, parts)

    def __rmul__(self, other) -> "Jet":
        return self._new(other * self.val, [_e(other, k + 1) * p for k, p in enumerate(self._parts())])

    def reciprocal(self) -> "Jet":
        x = self.val
        if np.any(x == 0):
            raise DomainError("division by a jet with zero value")
        r = 1.0 / x
        return self.compose(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r)

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, Jet):
            self._check(other)
            out = self * other.reciprocal()
            out.val = self.val / other.val
            return out
        if np.any(np.asarray(other) == 0):
            raise DomainError("division of a jet by zero")
        out = self * (1.0 / other)
        out.val = self.val / other
        return out

    def __rtruediv__(self, other) -> "Jet":
        out = other * self.reciprocal()
        out.val = other / self.val
        return out

    def __pow__(self, k) -> "Jet":
        if isinstance(k, (int, np.integer)):
            return ipow(self, int(k))
        return NotImplemented

    # -- elementary functions ----------------------------------------------

    def sin(self) -> "Jet":
        s, c = np.sin(self.val), np.cos(self.val)
        return self.compose(s, c, -s, -c)

    def cos(self) -> "Jet":
        s, c = np.sin(self.val), np.cos(self.val)
        return self.compose(c, -s, -c, s)

    def tan(self) -> "Jet":
        t = np.tan(self.val)
        sec2 = 1.0 + t * t
        return self.compose(t, sec2, 2.0 * t * sec2, sec2 * (2.0 + 6.0 * t * t))

    def exp(self) -> "Jet":
        e = np.exp(self.val)
        return self.compose(e, e, e, e)

    def log(self) -> "Jet":
        x = self.val
        if np.any(x <= 0):
            raise DomainError("log of a non-positive jet")
        r = 1.0 / x
        return self.compose(np.log(x), r, -r * r, 2.0 * r * r * r)

    def sqrt(self) -> "Jet":
        x = self.val
        if np.any(x < 0) or (self.order >= 1 and np.any(x == 0)):
            raise DomainError("sqrt of a negative jet (or zero with derivatives)")
        r = np.sqrt(x)
        if self.order == 0:
            return self._new(r, [])
        inv = 1.0 / r
        return self.compose(r, 0.5 * inv, -0.25 * inv**3, 0.375 * inv**5)

    def sinh(self) -> "Jet":
        s, c = np.sinh(self.val), np.cosh(self.val)
        return self.compose(s, c, s, c)

    def cosh(self) -> "Jet":
        s, c = np.sinh(self.val), np.cosh(self.val)
        return self.compose(c, s, c, s)

    def arctan(self) -> "Jet":
        x = self.val
        q = 1.0 / (1.0 + x * x)
        return self.compose(np.arctan(x), q, -2.0 * x * q * q, (6.0 * x * x - 2.0) * q * q * q)

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, n={self.n}, val={self.val!r})"


def _e(x, k):
    """Append ``k`` trailing axes to a batch-shaped coefficient."""
    if np.ndim(x) == 0:
        return x
    return np.asarray(x)[(Ellipsis,) + (None,) * k]


def ipow(x, k: int):
    """Integer power by binary exponentiation.

    Works for floats, arrays and jets alike, with the same multiplication
    sequence in every case so that an order-0 jet reproduces the plain value
    bit for bit.
    """
    if k < 0:
        return 1.0 / ipow(x, -k)
    if k == 0:
        return 1.0
    result = None
    base = x
    while True:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if not k:
            return result
        base = base * base


def lift(x, n: int, order: int, shape=()) -> Jet:
    """Promote a plain value (from a constant subexpression) to a jet."""
    if isinstance(x, Jet):
        return x
    return Jet.constant(np.broadcast_to(np.asarray(x, dtype=float), shape).copy() if shape else x, n, order)
