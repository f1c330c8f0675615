"""Classical orthogonal polynomials and Gauss-Legendre quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NonConvergenceError, ParameterError


@dataclass(frozen=True)
class JacobiParams:
    n: int
    a: float
    b: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ParameterError(f"Jacobi degree must be a nonnegative integer, got {self.n!r}")
        if not (self.a > -1 and self.b > -1):
            raise ParameterError(f"Jacobi indices must exceed -1, got a={self.a!r}, b={self.b!r}")


def jacobi_eval(jp: JacobiParams, u):
    """P_n^{(a,b)}(u) by the three-term recurrence in n."""
    n, a, b = jp.n, jp.a, jp.b
    u = np.asarray(u, dtype=float)
    p_prev = np.ones_like(u)
    if n == 0:
        return _scalar(p_prev, u)
    p = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * u
    for m in range(2, n + 1):
        c = 2.0 * m + a + b
        a1 = 2.0 * m * (m + a + b) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - b * b)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * c
        p_prev, p = p, ((a2 + a3 * u) * p - a4 * p_prev) / a1
    return _scalar(p, u)


def jacobi_derivative(jp: JacobiParams, u, order: int = 1):
    """d^k/du^k P_n^{(a,b)} = (n+a+b+1)_k / 2^k P_{n-k}^{(a+k,b+k)}."""
    n, a, b = jp.n, jp.a, jp.b
    if order > n:
        return _scalar(np.zeros_like(np.asarray(u, dtype=float)), np.asarray(u))
    factor = 1.0
    for j in range(order):
        factor *= 0.5 * (n + a + b + 1.0 + j)
    return factor * jacobi_eval(JacobiParams(n - order, a + order, b + order), u)


def laguerre_eval(n: int, alpha: float, t):
    """Generalized Laguerre L_n^{(alpha)}(t)."""
    t = np.asarray(t, dtype=float)
    p_prev = np.ones_like(t)
    if n == 0:
        return _scalar(p_prev, t)
    p = 1.0 + alpha - t
    for m in range(2, n + 1):
        p_prev, p = p, ((2.0 * m - 1.0 + alpha - t) * p - (m - 1.0 + alpha) * p_prev) / m
    return _scalar(p, t)


def laguerre_derivative(n: int, alpha: float, t, order: int = 1):
    if order > n:
        return _scalar(np.zeros_like(np.asarray(t, dtype=float)), np.asarray(t))
    return (-1) ** order * laguerre_eval(n - order, alpha + order, t)


def hermite_eval(n: int, t):
    """Physicists' Hermite H_n(t)."""
    t = np.asarray(t, dtype=float)
    p_prev = np.ones_like(t)
    if n == 0:
        return _scalar(p_prev, t)
    p = 2.0 * t
    for m in range(2, n + 1):
        p_prev, p = p, 2.0 * t * p - 2.0 * (m - 1.0) * p_prev
    return _scalar(p, t)


def hermite_derivative(n: int, t, order: int = 1):
    if order > n:
        return _scalar(np.zeros_like(np.asarray(t, dtype=float)), np.asarray(t))
    factor = 1.0
    for j in range(order):
        factor *= 2.0 * (n - j)
    return factor * hermite_eval(n - order, t)


def _scalar(values, like):
    return float(values) if np.ndim(like) == 0 else values


def jacobi_nodes_count(jp: JacobiParams, interval=(-1.0, 1.0), samples: int = 20001) -> int:
    """Sign changes of P_n^{(a,b)} on a Chebyshev-clustered grid of the open interval."""
    lo, hi = interval
    theta = np.linspace(0.0, math.pi, samples + 2)[1:-1]
    u = 0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos(theta)
    values = jacobi_eval(jp, u)
    signs = np.sign(values)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""

    nodes: tuple
    weights: tuple

    @property
    def order(self) -> int:
        return len(self.nodes)

    def mapped(self, a: float, b: float):
        x = np.asarray(self.nodes)
        w = np.asarray(self.weights)
        half = 0.5 * (b - a)
        return 0.5 * (a + b) + half * x, half * w


def _legendre_with_derivative(order: int, x):
    p0, p1 = np.ones_like(x), x.copy()
    for m in range(2, order + 1):
        p0, p1 = p1, ((2 * m - 1) * x * p1 - (m - 1) * p0) / m
    return p1, order * (x * p1 - p0) / (x * x - 1.0)


@lru_cache(maxsize=64)
def gauss_legendre(order: int, tol: float = 1e-15) -> QuadratureRule:
    """Nodes from Newton iteration on P_order, started at Chebyshev-like points."""
    if order < 1:
        raise ParameterError("quadrature order must be >= 1")
    i = np.arange(1, order + 1)
    x = np.cos(math.pi * (i - 0.25) / (order + 0.5))
    for _ in range(100):
        p, dp = _legendre_with_derivative(order, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < tol:
            break
    _, dp = _legendre_with_derivative(order, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    idx = np.argsort(x)
    return QuadratureRule(tuple(x[idx]), tuple(w[idx]))


def integrate(f, a: float, b: float, rule: QuadratureRule | None = None, rtol: float = 1e-10,
              atol: float = 1e-14, max_panels: int = 4096) -> float:
    """Composite Gauss-Legendre integral of ``f`` over [a, b].

    Panels double until two successive estimates agree to ``rtol`` (or
    ``atol`` absolutely).  ``f`` must accept a numpy array.
    """
    rule = rule or gauss_legendre(20)
    x0 = np.asarray(rule.nodes)
    w0 = np.asarray(rule.weights)

    def estimate(panels):
        edges = np.linspace(a, b, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        x = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
        w = (half[:, None] * w0[None, :]).ravel()
        return float(np.dot(w, f(x)))

    panels = 1
    previous = estimate(panels)
    while panels < max_panels:
        panels *= 2
        current = estimate(panels)
        if abs(current - previous) <= max(rtol * abs(current), atol):
            return current
        previous = current
    raise NonConvergenceError(
        f"quadrature did not converge with {max_panels} panels", estimates=(previous, current)
    )
