"""Forward-mode scalar automatic differentiation up to second order.

A :class:`DualScalar` carries a function value together with its gradient and
Hessian with respect to a fixed set of seed variables.  Arithmetic propagates
all three parts exactly (truncated Taylor arithmetic), so no finite-difference
step ever enters a production derivative.

Coefficients are ordinarily floats, but they may themselves be DualScalar
instances.  Nesting a first-order pass inside a second-order one yields mixed
higher derivatives, which is how second derivatives of pulled-back metric
components (and hence intrinsic curvature) are obtained without a dedicated
third-order type.
"""

from __future__ import annotations

import math

import numpy as np


class DualScalar:
    """Scalar with value, gradient and symmetric Hessian.

    The Hessian stays symmetric under all operations because every product
    rule below adds ``outer(a, b) + outer(b, a)`` pairs.
    """

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value, grad, hess):
        self.value = value
        self.grad = np.asarray(grad)
        self.hess = np.asarray(hess)

    # -- construction -----------------------------------------------------

    @staticmethod
    def constant(value, dim):
        return DualScalar(value, np.zeros(dim), np.zeros((dim, dim)))

    @staticmethod
    def seed(values):
        """Independent variables: identity gradients, zero Hessians."""
        values = list(values)
        d = len(values)
        return [DualScalar(v, np.eye(d)[i], np.zeros((d, d))) for i, v in enumerate(values)]

    @property
    def dim(self):
        return self.grad.shape[0]

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, DualScalar):
            return DualScalar(self.value + other.value, self.grad + other.grad, self.hess + other.hess)
        if isinstance(other, np.ndarray):
            return NotImplemented  # let numpy broadcast elementwise
        return DualScalar(self.value + other, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return DualScalar(-self.value, -self.grad, -self.hess)

    def __sub__(self, other):
        if isinstance(other, DualScalar):
            return DualScalar(self.value - other.value, self.grad - other.grad, self.hess - other.hess)
        if isinstance(other, np.ndarray):
            return NotImplemented
        return DualScalar(self.value - other, self.grad, self.hess)

    def __rsub__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        return DualScalar(other - self.value, -self.grad, -self.hess)

    def __mul__(self, other):
        if isinstance(other, DualScalar):
            cross = np.outer(self.grad, other.grad)
            return DualScalar(
                self.value * other.value,
                self.value * other.grad + other.value * self.grad,
                self.value * other.hess + other.value * self.hess + cross + cross.T,
            )
        if isinstance(other, np.ndarray):
            return NotImplemented
        return DualScalar(self.value * other, self.grad * other, self.hess * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        if not isinstance(other, DualScalar):
            inv = 1.0 / other
            return DualScalar(self.value * inv, self.grad * inv, self.hess * inv)
        q = self.value / other.value
        dq = (self.grad - q * other.grad) / other.value
        cross = np.outer(dq, other.grad)
        hq = (self.hess - q * other.hess - cross - cross.T) / other.value
        return DualScalar(q, dq, hq)

    def __rtruediv__(self, other):
        # other / self with other constant
        if isinstance(other, np.ndarray):
            return NotImplemented
        q = other / self.value
        dq = -q * self.grad / self.value
        cross = np.outer(dq, self.grad)
        hq = (-q * self.hess - cross - cross.T) / self.value
        return DualScalar(q, dq, hq)

    def __pow__(self, p):
        if isinstance(p, DualScalar):
            raise TypeError("dual exponents are not supported")
        if p == 2:  # common in metric components
            return self * self
        f0 = self.value ** p
        f1 = p * self.value ** (p - 1)
        f2 = p * (p - 1) * self.value ** (p - 2)
        return self._chain(f0, f1, f2)

    # -- chain rule --------------------------------------------------------

    def _chain(self, f0, f1, f2):
        """Compose with a scalar map given its value and two derivatives."""
        cross = np.outer(self.grad, self.grad)
        return DualScalar(f0, f1 * self.grad, f1 * self.hess + f2 * cross)

    def sin(self):
        s, c = sin(self.value), cos(self.value)
        return self._chain(s, c, -s)

    def cos(self):
        s, c = sin(self.value), cos(self.value)
        return self._chain(c, -s, -c)

    def sqrt(self):
        r = sqrt(self.value)
        return self._chain(r, 0.5 / r, -0.25 / (r * self.value))

    def exp(self):
        e = exp(self.value)
        return self._chain(e, e, e)

    def log(self):
        return self._chain(log(self.value), 1.0 / self.value, -1.0 / (self.value * self.value))

    def __repr__(self):
        return f"DualScalar({self.value!r}, grad={self.grad!r})"


# -- scalar functions that dispatch between floats and duals ----------------
#
# Metric and immersion component functions are written against these, so the
# same code path can be evaluated on plain floats, on DualScalar seeds, or on
# DualScalar seeds whose coefficients are again DualScalar (nested passes).


def sin(x):
    return x.sin() if isinstance(x, DualScalar) else math.sin(x)


def cos(x):
    return x.cos() if isinstance(x, DualScalar) else math.cos(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, DualScalar) else math.sqrt(x)


def exp(x):
    return x.exp() if isinstance(x, DualScalar) else math.exp(x)


def log(x):
    return x.log() if isinstance(x, DualScalar) else math.log(x)


def value_of(x):
    """Strip all dual layers and return the underlying float."""
    while isinstance(x, DualScalar):
        x = x.value
    return float(x)


def jet2(fn, coords):
    """Evaluate ``fn`` (sequence of scalars -> sequence of scalars) to second order.

    Returns ``(values, jacobian, hessians)`` with shapes (m,), (m, d) and
    (m, d, d) where d = len(coords).
    """
    xs = DualScalar.seed([float(c) for c in coords])
    ys = fn(xs)
    d = len(xs)
    values = np.empty(len(ys))
    jac = np.empty((len(ys), d))
    hess = np.empty((len(ys), d, d))
    for a, y in enumerate(ys):
        if isinstance(y, DualScalar):
            values[a] = y.value
            jac[a] = y.grad
            hess[a] = y.hess
        else:
            values[a] = y
            jac[a] = 0.0
            hess[a] = 0.0
    return values, jac, hess


def matrix_jet(fn, coords):
    """Evaluate a matrix-valued ``fn`` to first and second order.

    Returns ``(M, dM, d2M)`` with ``dM[c, a, b] = d M[a,b] / d x_c`` and
    ``d2M[c, d, a, b]`` the second derivatives.
    """
    xs = DualScalar.seed([float(c) for c in coords])
    rows = fn(xs)
    m = len(rows)
    d = len(xs)
    val = np.empty((m, m))
    der = np.zeros((d, m, m))
    der2 = np.zeros((d, d, m, m))
    for a in range(m):
        for b in range(m):
            y = rows[a][b]
            if isinstance(y, DualScalar):
                val[a, b] = y.value
                der[:, a, b] = y.grad
                der2[:, :, a, b] = y.hess
            else:
                val[a, b] = y
    return val, der, der2
