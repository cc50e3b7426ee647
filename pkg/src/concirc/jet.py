"""Second-order forward-mode differentiation.

A :class:`Jet2` carries the value, gradient and Hessian of a scalar field at a
chart point. Arithmetic on jets applies the product, quotient and chain rules
up to second order, so anything built from them (Christoffel symbols and their
partials, hence curvature) is exact to rounding.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

DIVISION_EPS = 1e-300
TAN_POLE_EPS = 1e-12


class JetError(ArithmeticError):
    pass


class DimensionMismatch(JetError):
    pass


class DivisionByZero(JetError, ZeroDivisionError):
    pass


class DomainError(JetError, ValueError):
    """A function was applied outside its domain."""

    def __init__(self, fn: str, value: float, position: int | None = None):
        self.fn = fn
        self.value = value
        self.position = position
        where = "" if position is None else f" at offset {position}"
        super().__init__(f"{fn} undefined at {value!r}{where}")


class EvaluationError(RuntimeError):
    pass


class Jet2:
    """Value, gradient and Hessian of a scalar at one point."""

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad, hess):
        self.value = float(value)
        self.grad = np.asarray(grad, dtype=float)
        hess = np.asarray(hess, dtype=float)
        # symmetric by construction
        self.hess = 0.5 * (hess + hess.T)

    @classmethod
    def constant(cls, value: float, n: int) -> "Jet2":
        return cls._raw(float(value), np.zeros(n), np.zeros((n, n)))

    @classmethod
    def coordinate(cls, value: float, index: int, n: int) -> "Jet2":
        grad = np.zeros(n)
        grad[index] = 1.0
        return cls._raw(float(value), grad, np.zeros((n, n)))

    @classmethod
    def _raw(cls, value: float, grad: np.ndarray, hess: np.ndarray) -> "Jet2":
        # skips symmetrization; callers guarantee hess is symmetric
        jet = cls.__new__(cls)
        jet.value = value
        jet.grad = grad
        jet.hess = hess
        return jet

    @property
    def dim(self) -> int:
        return self.grad.shape[0]

    def __repr__(self) -> str:
        return f"Jet2(value={self.value!r}, grad={self.grad.tolist()!r}, hess={self.hess.tolist()!r})"

    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            if other.dim != self.dim:
                raise DimensionMismatch(f"jets of dimension {self.dim} and {other.dim}")
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet2.constant(float(other), self.dim)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return j2_binary("add", self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return j2_binary("sub", self, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return j2_binary("sub", other, self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return j2_binary("mul", self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return j2_binary("div", self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return j2_binary("div", other, self)

    def __neg__(self):
        return j2_unary("neg", self)

    def __pow__(self, exponent):
        if isinstance(exponent, Jet2):
            return j2_unary("exp", exponent * j2_unary("ln", self))
        return j2_unary("pow", self, float(exponent))


def j2_binary(op: str, a: Jet2, b: Jet2) -> Jet2:
    if a.dim != b.dim:
        raise DimensionMismatch(f"jets of dimension {a.dim} and {b.dim}")
    if op == "add":
        return Jet2._raw(a.value + b.value, a.grad + b.grad, a.hess + b.hess)
    if op == "sub":
        return Jet2._raw(a.value - b.value, a.grad - b.grad, a.hess - b.hess)
    if op == "mul":
        cross = np.outer(a.grad, b.grad)
        # grouping keeps the result exactly symmetric and exactly commutative
        return Jet2._raw(
            a.value * b.value,
            a.value * b.grad + b.value * a.grad,
            (a.value * b.hess + b.value * a.hess) + (cross + cross.T),
        )
    if op == "div":
        if abs(b.value) < DIVISION_EPS:
            raise DivisionByZero(f"division by {b.value!r}")
        return j2_binary("mul", a, _reciprocal(b))
    raise ValueError(f"unknown binary op {op!r}")


def _reciprocal(b: Jet2) -> Jet2:
    v = b.value
    return _chain(b, 1.0 / v, -1.0 / v**2, 2.0 / v**3)


def _chain(a: Jet2, f0: float, f1: float, f2: float) -> Jet2:
    return Jet2._raw(f0, f1 * a.grad, f2 * np.outer(a.grad, a.grad) + f1 * a.hess)


def _derivatives(fn: str, v: float, p: float | None) -> tuple[float, float, float]:
    if fn == "neg":
        return -v, -1.0, 0.0
    if fn == "exp":
        e = math.exp(v)
        return e, e, e
    if fn == "ln":
        if v <= 0.0:
            raise DomainError("ln", v)
        return math.log(v), 1.0 / v, -1.0 / v**2
    if fn == "sin":
        s, c = math.sin(v), math.cos(v)
        return s, c, -s
    if fn == "cos":
        s, c = math.sin(v), math.cos(v)
        return c, -s, -c
    if fn == "tan":
        if abs(math.cos(v)) < TAN_POLE_EPS:
            raise DomainError("tan", v)
        t = math.tan(v)
        sec2 = 1.0 + t * t
        return t, sec2, 2.0 * t * sec2
    if fn == "sinh":
        return math.sinh(v), math.cosh(v), math.sinh(v)
    if fn == "cosh":
        return math.cosh(v), math.sinh(v), math.cosh(v)
    if fn == "tanh":
        t = math.tanh(v)
        d = 1.0 - t * t
        return t, d, -2.0 * t * d
    if fn == "sqrt":
        if v <= 0.0:
            raise DomainError("sqrt", v)
        s = math.sqrt(v)
        return s, 0.5 / s, -0.25 / (s * v)
    if fn == "pow":
        return _pow_derivatives(v, p)
    raise ValueError(f"unknown function {fn!r}")


def _pow_derivatives(v: float, p: float) -> tuple[float, float, float]:
    integral = float(p).is_integer()
    if v < 0.0 and not integral:
        raise DomainError(f"pow(.., {p!r})", v)
    if v == 0.0:
        if p < 0.0:
            raise DivisionByZero(f"0 raised to {p!r}")
        if not integral and p < 2.0:
            raise DomainError(f"pow(.., {p!r})", v)
    if integral:
        k = int(p)

        def ipow(x: float, e: int) -> float:
            return 0.0 if e < 0 and x == 0.0 else x**e

        f0 = ipow(v, k)
        f1 = k * ipow(v, k - 1) if k != 0 else 0.0
        f2 = k * (k - 1) * ipow(v, k - 2) if k not in (0, 1) else 0.0
        return float(f0), float(f1), float(f2)
    return v**p, p * v ** (p - 1.0), p * (p - 1.0) * v ** (p - 2.0)


def j2_unary(fn: str, a: Jet2, p: float | None = None) -> Jet2:
    """Apply ``fn`` to ``a`` with second-order chain rule.

    ``p`` is the constant exponent for ``fn == "pow"``.
    """
    if fn == "pow" and p is None:
        raise ValueError("pow needs a constant exponent")
    f0, f1, f2 = _derivatives(fn, a.value, p)
    if fn == "neg":
        return Jet2._raw(-a.value, -a.grad, -a.hess)
    return _chain(a, f0, f1, f2)


def coordinate_jets(point: Sequence[float]) -> list[Jet2]:
    n = len(point)
    return [Jet2.coordinate(x, i, n) for i, x in enumerate(point)]


def finite_difference_oracle(
    field: Callable[[np.ndarray], float], point: Sequence[float], h: float = 1e-4
) -> Jet2:
    """Central-difference value, gradient and Hessian of ``field``.

    Uses the 2n^2 + 1 point stencil; both derivative estimates are O(h^2).
    Meant as an independent check on jet arithmetic, never in production paths.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(point, dtype=float)
    n = x.size
    eye = np.eye(n) * h

    def f(y: np.ndarray) -> float:
        try:
            return float(field(y))
        except (ArithmeticError, ValueError) as exc:
            raise EvaluationError(f"field failed at {y.tolist()}: {exc}") from exc

    f0 = f(x)
    plus = np.array([f(x + eye[i]) for i in range(n)])
    minus = np.array([f(x - eye[i]) for i in range(n)])
    grad = (plus - minus) / (2.0 * h)
    hess = np.zeros((n, n))
    for i in range(n):
        hess[i, i] = (plus[i] - 2.0 * f0 + minus[i]) / h**2
        for j in range(i + 1, n):
            val = (
                f(x + eye[i] + eye[j])
                - f(x + eye[i] - eye[j])
                - f(x - eye[i] + eye[j])
                + f(x - eye[i] - eye[j])
            ) / (4.0 * h**2)
            hess[i, j] = hess[j, i] = val
    return Jet2(f0, grad, hess)
