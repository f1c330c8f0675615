"""Physical model: mass profile, Hulthen potential, effective potential, and
the coefficients of the hypergeometric-type equation in the variable
``s = 1 / (1 - q exp(-lambda x))``.

Units follow hbar = 2 m0 = 1, so energies and ``lambda**2`` share a unit.

Regimes
-------
``q < 0``
    The mass ``m(x) = s`` is positive on the whole real line and ``s`` maps it
    onto ``(0, 1)``.  This is the verified regime.
``0 < q``
    The mass is singular at ``x_s = ln(q) / lambda``.  Only ``x > x_s`` is
    physical and ``s`` lives on ``(1, inf)``.  Evaluation works, but nothing
    downstream is checked against the closed form there.
``q == 0``
    Constant unit mass.  Supported for position-space evaluation only (the
    finite-difference sanity checks use it); the ``s`` map is degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

# exp(700) is close to the float64 overflow edge.
_EXP_CUTOFF = 700.0


@dataclass(frozen=True)
class ModelParams:
    """Hulthen strength ``V0``, screening ``lam``, deformation ``q``, ordering
    parameters ``alpha``/``beta`` and the wavefunction-transform exponent
    ``eta``.  Derived constants are properties so they never go stale."""

    V0: float
    lam: float
    q: float
    alpha: float
    beta: float
    eta: float = 0.5

    def __post_init__(self):
        for name in ("V0", "lam", "q", "alpha", "beta", "eta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
        if self.lam <= 0:
            raise ParameterError(f"lambda must be > 0, got {self.lam!r}")

    @property
    def a_star(self) -> float:
        """Ordering constant alpha(alpha+beta+1)+beta+1."""
        a, b = self.alpha, self.beta
        return a * (a + b + 1.0) + b + 1.0

    @property
    def z(self) -> float:
        return 0.5 * (1.0 - 2.0 * self.eta)

    @property
    def B(self) -> float:
        """Coefficient of (m'/m)^2 after the m**eta transform (sign flipped)."""
        return self.eta * (self.eta - 2.0) + self.a_star

    @property
    def C(self) -> float:
        """Coefficient of m''/m after the m**eta transform."""
        return 0.5 * (self.beta + 1.0) - self.eta

    @property
    def v(self) -> float:
        """Reduced potential strength V0 / (q lambda^2)."""
        if self.q == 0:
            raise ParameterError("q = 0 has no s-representation (V0/(q lambda^2) undefined)")
        return self.V0 / (self.q * self.lam**2)

    @property
    def mu_sq(self) -> float:
        """xi3 + z^2; eta- and energy-independent."""
        return 0.25 + 0.5 * (self.beta + 1.0) - self.a_star

    @property
    def gamma(self) -> float:
        """xi1 + z(z-1); eta- and energy-independent."""
        return self.beta + 0.75 - self.a_star - self.v

    @property
    def singular_x(self) -> float | None:
        """Abscissa where the mass diverges (q > 0 only)."""
        if self.q > 0:
            return math.log(self.q) / self.lam
        return None

    @property
    def regime(self) -> str:
        if self.q < 0:
            return "full-line"
        if self.q > 0:
            return "half-line"
        return "constant-mass"

    def replace(self, **changes) -> "ModelParams":
        fields = {k: getattr(self, k) for k in ("V0", "lam", "q", "alpha", "beta", "eta")}
        fields.update(changes)
        return ModelParams(**fields)


REFERENCE = ModelParams(V0=10.0, lam=1.0, q=-1.0, alpha=-0.5, beta=0.0, eta=0.5)


@dataclass(frozen=True)
class XiCoefficients:
    xi1: float
    xi2: float
    xi3: float
    mu_sq: float
    gamma: float

    @property
    def decay_sq(self) -> float:
        """xi1 - xi2 + xi3, equal to -E / lambda^2."""
        return self.xi1 - self.xi2 + self.xi3


@dataclass(frozen=True)
class Domain:
    x_min: float
    x_max: float
    s_min: float
    s_max: float
    verified: bool


def domain(p: ModelParams) -> Domain:
    """Physical x-interval and its image under ``s_of_x``."""
    if p.q < 0:
        return Domain(-math.inf, math.inf, 0.0, 1.0, True)
    if p.q > 0:
        return Domain(p.singular_x, math.inf, 1.0, math.inf, False)
    return Domain(-math.inf, math.inf, 1.0, 1.0, False)


def _s_pair(p: ModelParams, x):
    """Return ``(s, 1 - s)`` computed without cancellation or overflow."""
    x = np.asarray(x, dtype=float)
    arg = -p.lam * x
    with np.errstate(over="ignore"):
        u = p.q * np.exp(np.minimum(arg, _EXP_CUTOFF))
    denom = 1.0 - u
    bad = ~(denom > 0) | ((arg > _EXP_CUTOFF) & (p.q > 0))
    if np.any(bad):
        where = x[bad].flat[0] if x.ndim else float(x)
        raise DomainError(
            f"x = {where!r} is outside the physical domain "
            f"(1 - q exp(-lambda x) <= 0; singular point x_s = {p.singular_x!r})",
            singular_x=p.singular_x,
        )
    s = 1.0 / denom
    one_minus_s = -u / denom
    deep = arg > _EXP_CUTOFF
    if np.any(deep):
        # q < 0 and x -> -inf: s ~ exp(lambda x) / |q| underflows toward 0
        s = np.where(deep, np.exp(np.maximum(-arg, -_EXP_CUTOFF * 2)) / abs(p.q), s)
        one_minus_s = np.where(deep, 1.0 - s, one_minus_s)
    return s, one_minus_s


def _out(value, x):
    return float(value) if np.ndim(x) == 0 else value


def mass_at(p: ModelParams, x):
    """m(x) = (1 - q exp(-lambda x))^-1."""
    s, _ = _s_pair(p, x)
    return _out(s, x)


def mass_log_derivatives(p: ModelParams, x):
    """Return ``(m'/m, m''/m)``.

    With ``s = m`` these are ``lambda (1-s)`` and ``lambda^2 (1-s)(1-2s)``,
    which avoids the large intermediate exponentials of the x-form.
    """
    s, oms = _s_pair(p, x)
    r1 = p.lam * oms
    r2 = p.lam**2 * oms * (1.0 - 2.0 * s)
    return _out(r1, x), _out(r2, x)


def potential_at(p: ModelParams, x):
    """Hulthen potential -V0 exp(-lambda x) / (1 - q exp(-lambda x))."""
    s, oms = _s_pair(p, x)
    if p.q == 0:
        xa = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            value = -p.V0 * np.exp(-p.lam * xa)
    else:
        value = (p.V0 / p.q) * oms
    return _out(value, x)


def effective_potential_at(p: ModelParams, x):
    """V + (beta+1)/2 m''/m^2 - A* m'^2/m^3."""
    s, oms = _s_pair(p, x)
    r1, r2 = mass_log_derivatives(p, x)
    r1 = np.asarray(r1)
    r2 = np.asarray(r2)
    V = np.asarray(potential_at(p, x))
    # m''/m^2 = (m''/m)/m and m'^2/m^3 = (m'/m)^2/m, with m = s
    with np.errstate(divide="ignore", invalid="ignore"):
        kinetic = (0.5 * (p.beta + 1.0) * r2 - p.a_star * r1**2) / s
    return _out(V + kinetic, x)


def s_of_x(p: ModelParams, x):
    """Coordinate map s = 1/(1 - q exp(-lambda x)); equals ``mass_at``."""
    return mass_at(p, x)


def x_of_s(p: ModelParams, s):
    """Inverse of ``s_of_x`` on the image interval of the physical domain."""
    if p.q == 0:
        raise ParameterError("s(x) is constant when q = 0 and has no inverse")
    s = np.asarray(s, dtype=float)
    dom = domain(p)
    if np.any(~((s > dom.s_min) & (s < dom.s_max))):
        raise DomainError(
            f"s outside the image interval ({dom.s_min}, {dom.s_max})",
            singular_x=p.singular_x,
        )
    # q exp(-lambda x) = (s - 1)/s
    ratio = (s - 1.0) / (p.q * s)
    return _out(-np.log(ratio) / p.lam, s)


def xi_coefficients(p: ModelParams, E: float) -> XiCoefficients:
    """Coefficients of -xi1 s^2 + xi2 s - xi3 in the transformed equation."""
    B, C, v = p.B, p.C, p.v
    xi1 = -(B - 2.0 * C + v)
    xi2 = -2.0 * B + 3.0 * C - v + E / p.lam**2
    xi3 = -(B - C)
    z = p.z
    return XiCoefficients(
        xi1=xi1,
        xi2=xi2,
        xi3=xi3,
        mu_sq=xi3 + z * z,
        gamma=xi1 + z * (z - 1.0),
    )
