"""Truncated Taylor-series (jet) arithmetic over numpy batches.

A ``Jet`` holds the coefficients ``c[k]`` of a truncated power series
``f(t) = sum_k c[k] t^k`` where each coefficient is a numpy array (one lane
per evaluation point).  Propagating jets through a field's defining
expression yields exact directional derivatives of any order:
``(theta . grad)^k f = k! * c[k]`` for the curve ``x + t theta``.

Supported primitives are the ones the field algebra needs: ring ops,
integer powers, reciprocal, sqrt and exp.  Orders are small (<= ~8), so the
plain O(K^2) convolution recurrences are the right tool.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Jet"]


class Jet:
    """Truncated Taylor series with array-valued coefficients.

    coef has shape (order+1,) + lane_shape; coef[k] is the t^k coefficient.
    """

    __slots__ = ("coef",)

    def __init__(self, coef):
        self.coef = np.asarray(coef, dtype=float)

    @property
    def order(self) -> int:
        return self.coef.shape[0] - 1

    @classmethod
    def variable(cls, value, slope, order: int) -> "Jet":
        """Jet of the affine function ``value + slope * t``."""
        value = np.asarray(value, dtype=float)
        slope = np.asarray(slope, dtype=float)
        coef = np.zeros((order + 1,) + value.shape)
        coef[0] = value
        if order >= 1:
            coef[1] = slope
        return cls(coef)

    @classmethod
    def constant(cls, value, order: int, shape=()) -> "Jet":
        coef = np.zeros((order + 1,) + tuple(shape))
        coef[0] = value
        return cls(coef)

    def value(self):
        return self.coef[0]

    def derivative(self, k: int):
        """k-th derivative at t=0, i.e. k! * coef[k]."""
        from math import factorial

        return factorial(k) * self.coef[k]

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.coef + other.coef)
        out = self.coef.copy()
        out[0] = out[0] + other
        return Jet(out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coef)

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.coef - other.coef)
        return self + (-np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coef * np.asarray(other, dtype=float))
        a, b = self.coef, other.coef
        K = a.shape[0] - 1
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for k in range(K + 1):
            acc = a[0] * b[k]
            for i in range(1, k + 1):
                acc = acc + a[i] * b[k - i]
            out[k] = acc
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.coef / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        if k == 0:
            return Jet.constant(1.0, self.order, self.coef.shape[1:])
        result = self
        for _ in range(k - 1):
            result = result * self
        return result

    # -- analytic primitives -------------------------------------------------

    def reciprocal(self) -> "Jet":
        a = self.coef
        K = a.shape[0] - 1
        out = np.zeros_like(a)
        inv0 = 1.0 / a[0]
        out[0] = inv0
        for k in range(1, K + 1):
            acc = a[1] * out[k - 1]
            for i in range(2, k + 1):
                acc = acc + a[i] * out[k - i]
            out[k] = -inv0 * acc
        return Jet(out)

    def sqrt(self) -> "Jet":
        a = self.coef
        K = a.shape[0] - 1
        out = np.zeros_like(a)
        s0 = np.sqrt(a[0])
        out[0] = s0
        if K >= 1:
            half_inv = 0.5 / s0
            for k in range(1, K + 1):
                acc = a[k] + 0.0
                for i in range(1, k):
                    acc = acc - out[i] * out[k - i]
                out[k] = half_inv * acc
        return Jet(out)

    def exp(self) -> "Jet":
        a = self.coef
        K = a.shape[0] - 1
        out = np.zeros_like(a)
        out[0] = np.exp(a[0])
        for k in range(1, K + 1):
            acc = 1.0 * a[1] * out[k - 1]
            for i in range(2, k + 1):
                acc = acc + i * a[i] * out[k - i]
            out[k] = acc / k
        return Jet(out)
