"""Truncated Taylor-series arithmetic.

A :class:`TaylorJet` holds the coefficients ``c_m = f^(m)(s0) / m!`` for
``m = 0..order``. The coefficient array has shape ``(order + 1, *batch)`` so a
single jet can carry the expansion about every point of a sample grid at
once; all recurrences below act on the leading axis only.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import OrderExceededError, SingularEvaluationError

DEFAULT_ORDER = 5


class TaylorJet:
    __slots__ = ("coeffs",)
    __array_priority__ = 1000  # make ndarray <op> jet defer to the jet

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 0:
            raise ValueError("a jet needs at least one coefficient")
        self.coeffs = coeffs

    @classmethod
    def seed(cls, s0, order: int = DEFAULT_ORDER) -> "TaylorJet":
        """The jet of the independent variable about ``s0`` (scalar or array)."""
        s0 = np.asarray(s0, dtype=float)
        c = np.zeros((order + 1,) + s0.shape)
        c[0] = s0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def const(cls, value, order: int = DEFAULT_ORDER, batch=None) -> "TaylorJet":
        value = np.asarray(value, dtype=float)
        if batch is not None:
            value = np.broadcast_to(value, batch)
        c = np.zeros((order + 1,) + np.shape(value))
        c[0] = value
        return cls(c)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def value(self):
        return self.coeffs[0]

    @property
    def batch_shape(self):
        return self.coeffs.shape[1:]

    def __repr__(self):
        return f"TaylorJet(order={self.order}, coeffs={self.coeffs.tolist()!r})"

    def truncate(self, order: int) -> "TaylorJet":
        if order > self.order:
            raise OrderExceededError(f"cannot raise jet order {self.order} to {order}")
        return TaylorJet(self.coeffs[: order + 1])

    def derivative(self) -> "TaylorJet":
        """Jet of f' about the same point, one order shorter."""
        if self.order < 1:
            raise OrderExceededError("derivative of an order-0 jet")
        m = np.arange(1, self.order + 1).reshape((-1,) + (1,) * len(self.batch_shape))
        return TaylorJet(self.coeffs[1:] * m)

    def derivatives(self, upto: int):
        return extract_derivatives(self, upto)

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TaylorJet):
            return _match(self, other)
        other = np.asarray(other, dtype=float)
        batch = np.broadcast_shapes(self.batch_shape, other.shape)
        c = np.zeros(self.coeffs.shape[:1] + batch)
        c[0] = other
        return TaylorJet(_lift(self.coeffs, batch)), TaylorJet(c)

    def __add__(self, other):
        x, y = self._coerce(other)
        return TaylorJet(x.coeffs + y.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        x, y = self._coerce(other)
        return TaylorJet(x.coeffs - y.coeffs)

    def __rsub__(self, other):
        x, y = self._coerce(other)
        return TaylorJet(y.coeffs - x.coeffs)

    def __neg__(self):
        return TaylorJet(-self.coeffs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, TaylorJet):
            other = np.asarray(other, dtype=float)
            batch = np.broadcast_shapes(self.batch_shape, other.shape)
            return TaylorJet(_lift(self.coeffs, batch) * other)
        x, y = _match(self, other)
        return TaylorJet(_cauchy(x.coeffs, y.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TaylorJet):
            other = np.asarray(other, dtype=float)
            if np.any(other == 0):
                raise SingularEvaluationError("division by zero")
            batch = np.broadcast_shapes(self.batch_shape, other.shape)
            return TaylorJet(_lift(self.coeffs, batch) / other)
        x, y = _match(self, other)
        return TaylorJet(_divide(x.coeffs, y.coeffs))

    def __rtruediv__(self, other):
        x, y = self._coerce(other)
        return TaylorJet(_divide(y.coeffs, x.coeffs))

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("jets support only non-negative integer powers")
        result = TaylorJet.const(1.0, self.order, self.batch_shape)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result


def _match(x: TaylorJet, y: TaylorJet):
    # mixed orders truncate to the shorter expansion
    n = min(x.order, y.order)
    xc, yc = x.coeffs[: n + 1], y.coeffs[: n + 1]
    batch = np.broadcast_shapes(xc.shape[1:], yc.shape[1:])
    return TaylorJet(_lift(xc, batch)), TaylorJet(_lift(yc, batch))


def _lift(c, batch):
    """Broadcast a coefficient array to ``(order + 1, *batch)``."""
    batch = tuple(batch)
    extra = len(batch) - (c.ndim - 1)
    c = c.reshape((c.shape[0],) + (1,) * extra + c.shape[1:])
    return np.broadcast_to(c, (c.shape[0],) + batch)


def _cauchy(a, b):
    n = a.shape[0]
    out = np.zeros(a.shape)
    for m in range(n):
        out[m] = np.sum(a[: m + 1] * b[m::-1], axis=0)
    return out


def _divide(a, b):
    if np.any(b[0] == 0):
        raise SingularEvaluationError("division by a jet with zero constant term")
    n = a.shape[0]
    out = np.zeros(a.shape)
    for m in range(n):
        acc = a[m] - np.sum(b[1 : m + 1] * out[m - 1 :: -1][:m], axis=0) if m else a[0]
        out[m] = acc / b[0]
    return out


def _weighted(x):
    # k * x_k, used by the exp and sin/cos recurrences
    k = np.arange(x.shape[0]).reshape((-1,) + (1,) * (x.ndim - 1))
    return k * x


def sqrt(x: TaylorJet) -> TaylorJet:
    c = x.coeffs
    if np.any(c[0] <= 0):
        raise SingularEvaluationError("sqrt of a jet with non-positive constant term")
    out = np.zeros(c.shape)
    out[0] = np.sqrt(c[0])
    for m in range(1, c.shape[0]):
        cross = np.sum(out[1:m] * out[m - 1 : 0 : -1], axis=0) if m > 1 else 0.0
        out[m] = (c[m] - cross) / (2.0 * out[0])
    return TaylorJet(out)


def exp(x: TaylorJet) -> TaylorJet:
    c = x.coeffs
    kc = _weighted(c)
    out = np.zeros(c.shape)
    out[0] = np.exp(c[0])
    for m in range(1, c.shape[0]):
        out[m] = np.sum(kc[1 : m + 1] * out[m - 1 :: -1][:m], axis=0) / m
    return TaylorJet(out)


def sincos(x: TaylorJet) -> tuple[TaylorJet, TaylorJet]:
    """Sine and cosine jets from the coupled recurrence s' = c x', c' = -s x'."""
    c = x.coeffs
    kc = _weighted(c)
    sn = np.zeros(c.shape)
    cs = np.zeros(c.shape)
    sn[0] = np.sin(c[0])
    cs[0] = np.cos(c[0])
    for m in range(1, c.shape[0]):
        sn[m] = np.sum(kc[1 : m + 1] * cs[m - 1 :: -1][:m], axis=0) / m
        cs[m] = -np.sum(kc[1 : m + 1] * sn[m - 1 :: -1][:m], axis=0) / m
    return TaylorJet(sn), TaylorJet(cs)


def sin(x: TaylorJet) -> TaylorJet:
    return sincos(x)[0]


def cos(x: TaylorJet) -> TaylorJet:
    return sincos(x)[1]


def jet_arith(op: str, x: TaylorJet, y: TaylorJet) -> TaylorJet:
    if x.order != y.order:
        raise ValueError(f"jet orders differ: {x.order} vs {y.order}")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown jet operation {op!r}")


_TRANSCENDENTALS = {"sin": sin, "cos": cos, "sqrt": sqrt, "exp": exp}


def jet_transcend(fn: str, x: TaylorJet) -> TaylorJet:
    try:
        f = _TRANSCENDENTALS[fn]
    except KeyError:
        raise ValueError(f"unknown function {fn!r}") from None
    return f(x)


def extract_derivatives(x: TaylorJet, upto: int) -> np.ndarray:
    """``(f, f', ..., f^(upto))`` at the expansion point, stacked on axis 0."""
    if upto > x.order:
        raise OrderExceededError(f"requested derivative {upto} exceeds jet order {x.order}")
    fact = np.array([math.factorial(m) for m in range(upto + 1)], dtype=float)
    return x.coeffs[: upto + 1] * fact.reshape((-1,) + (1,) * len(x.batch_shape))
