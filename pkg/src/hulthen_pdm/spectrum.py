"""Bound states of the Hulthen potential with position-dependent mass.

Energies come from the quantization condition of the hypergeometric
equation: with Lambda = sqrt(xi1 - xi2 + xi3) + sqrt(mu_sq),

    Lambda_n = (-(2n+1) +/- sqrt(1 + 4 gamma)) / 2         (case 1 / case 2)

and the identity xi1 - xi2 + xi3 = -E / lambda^2 gives

    E_n = -lambda^2 (Lambda_n - sqrt(mu_sq))^2,   Lambda_n > sqrt(mu_sq).

Neither mu_sq nor gamma depends on eta, so neither does E_n.  The
closed-form expressions printed alongside the derivation
(``energy_level_as_printed``) do depend on eta and are kept only as a
comparison surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import specfun
from .errors import (
    ComplexParameterError,
    ParameterError,
    QuantumNumberError,
    RegimeError,
    UnphysicalStateError,
)
from .model import ModelParams, _s_pair, xi_coefficients
from .nu_engine import HypergeometricForm, Polynomial

CASES = (1, 2)


def _check_case(case: int) -> int:
    if case not in CASES:
        raise ParameterError(f"case must be 1 or 2, got {case!r}")
    return case


# Relative size of rounding noise tolerated below zero in mu_sq and 1 + 4 gamma;
# alpha = -1/2, for example, gives mu_sq = 0 exactly but -2e-16 in floats.
ROUNDOFF_RTOL = 1e-12


def _clamped(value: float, scale: float) -> float:
    return 0.0 if -ROUNDOFF_RTOL * max(1.0, scale) <= value < 0 else value


def root_mu(p: ModelParams) -> float:
    """sqrt(mu_sq) with rounding noise below zero removed."""
    return math.sqrt(_clamped(p.mu_sq, abs(p.a_star) + abs(p.beta)))


def _disc(p: ModelParams) -> float:
    return _clamped(1.0 + 4.0 * p.gamma, 4.0 * (abs(p.gamma) + abs(p.v) + abs(p.a_star)))


def _check_real(p: ModelParams) -> None:
    mu_sq = _clamped(p.mu_sq, abs(p.a_star) + abs(p.beta))
    if mu_sq < 0:
        raise ComplexParameterError("mu_sq", mu_sq)
    disc = _disc(p)
    if disc < 0:
        raise ComplexParameterError("1+4*gamma", disc)


def assemble_ode(p: ModelParams, E: float) -> HypergeometricForm:
    """sigma = s(1-s), tau_tilde = 2 eta - (2 eta + 1) s, sigma_tilde = -xi1 s^2 + xi2 s - xi3."""
    xi = xi_coefficients(p, E)
    return HypergeometricForm(
        sigma=Polynomial((0.0, 1.0, -1.0)),
        tau_tilde=Polynomial((2.0 * p.eta, -(2.0 * p.eta + 1.0))),
        sigma_tilde=Polynomial((-xi.xi3, xi.xi2, -xi.xi1)),
    )


@dataclass(frozen=True)
class QuantizationData:
    """Lambda_n for one case; ``decay`` = Lambda - sqrt(mu_sq), equal to
    sqrt(-E)/lambda when positive."""

    Lambda: float
    zeta: float | None
    case_tag: int
    n: int
    decay: float


def _lambda_n(p: ModelParams, n: int, case: int) -> float:
    root = math.sqrt(_disc(p))
    sign = 1.0 if case == 1 else -1.0
    return 0.5 * (-(2 * n + 1) + sign * root)


def _zeta(p: ModelParams, E: float) -> float | None:
    xi = xi_coefficients(p, E)
    z = p.z
    arg = xi.xi3 * (xi.xi1 - xi.xi2 + xi.xi3 + z * z) - z * z * (xi.xi2 - xi.xi1)
    if arg < 0:
        return None if arg < -1e-12 * max(1.0, abs(xi.xi1), abs(xi.xi2)) else 0.0
    return math.sqrt(arg)


def quantization(p: ModelParams, n: int, case: int = 1) -> QuantizationData:
    _check_case(case)
    _check_real(p)
    if n < 0:
        raise QuantumNumberError(f"n must be >= 0, got {n}")
    Lam = _lambda_n(p, n, case)
    decay = Lam - root_mu(p)
    zeta = _zeta(p, -p.lam**2 * decay**2) if decay > 0 else None
    return QuantizationData(Lambda=Lam, zeta=zeta, case_tag=case, n=n, decay=decay)


def energy_level(p: ModelParams, n: int, case: int = 1) -> float | None:
    """Bound-state energy E_n, or ``None`` when level n is not bound (E < 0 strictly).

    Raises ComplexParameterError when mu_sq < 0 or 1 + 4 gamma < 0.
    """
    decay = quantization(p, n, case).decay
    if not decay > 0:
        return None
    return -(p.lam**2) * decay * decay


def energy_level_as_printed(p: ModelParams, n: int, case: int = 1) -> float | None:
    """Literal evaluation of the as-printed closed forms; ``None`` if a root goes complex.

    case 1: -lambda^2/4 (2n+1 - sqrt(1+4 gamma) - 2 sqrt(w))^2 - lambda^2 (eta - 1/2)^2
    case 2: +lambda^2/4 (2n+1 + sqrt(1+4 gamma) + 2 sqrt(w))^2 - lambda^2 (eta - 1/2)^2
    with w = -eta(eta-1) - A* + (beta+1)/2.
    """
    _check_case(case)
    eta = p.eta
    w = -eta * (eta - 1.0) - p.a_star + 0.5 * (p.beta + 1.0)
    disc = 1.0 + 4.0 * p.gamma
    if w < 0 or disc < 0:
        return None
    shift = p.lam**2 * (eta - 0.5) ** 2
    if case == 1:
        inner = 2 * n + 1 - math.sqrt(disc) - 2.0 * math.sqrt(w)
        return -0.25 * p.lam**2 * inner * inner - shift
    inner = 2 * n + 1 + math.sqrt(disc) + 2.0 * math.sqrt(w)
    return 0.25 * p.lam**2 * inner * inner - shift


def bound_state_count(p: ModelParams, case: int = 1) -> int:
    """Number of n >= 0 with Lambda_n > sqrt(mu_sq)."""
    _check_case(case)
    _check_real(p)
    if case == 2:
        return 0
    top = 0.5 * (math.sqrt(_disc(p)) - 1.0) - root_mu(p)
    # levels n < top; a level exactly at threshold (E = 0) is not bound
    count = max(0, math.ceil(top))
    while count > 0 and energy_level(p, count - 1, case) is None:
        count -= 1
    return count


@dataclass(frozen=True)
class PhysicalityVerdict:
    printed_rule: bool
    normalizable: bool
    reason: str

    @property
    def physical(self) -> bool:
        return self.printed_rule and self.normalizable


@dataclass(frozen=True)
class BoundState:
    """One bound level.  ``exponent_left`` multiplies ln s, ``exponent_right``
    multiplies ln(1-s); the Jacobi indices are twice the square roots."""

    n: int
    energy: float
    case: int
    eta: float
    jacobi_a: float
    jacobi_b: float
    exponent_left: float
    exponent_right: float
    norm_constant: float = math.nan
    physical: bool = True
    reason: str = ""


def physicality_check(st: BoundState) -> PhysicalityVerdict:
    """Exponent conditions as printed, plus square-integrability of m^eta psi.

    Printed rule: if the s-exponent is negative and the (1-s)-exponent
    positive, the former must dominate in magnitude; mirrored when the signs
    are swapped.  Integrability: |Phi|^2 dx ~ s^(2(eta+left)-1) ds near s=0
    and (1-s)^(2 right - 1) ds near s=1.
    """
    left, right = st.exponent_left, st.exponent_right
    reasons = []
    printed = True
    if left < 0 < right and abs(left) < right:
        printed = False
        reasons.append(f"|left exponent| {abs(left):.6g} < right exponent {right:.6g}")
    if right < 0 < left and abs(right) < left:
        printed = False
        reasons.append(f"|right exponent| {abs(right):.6g} < left exponent {left:.6g}")
    normalizable = True
    if not st.eta + left > 0:
        normalizable = False
        reasons.append("|Phi|^2 not integrable as s -> 0")
    if not right > 0:
        normalizable = False
        reasons.append("|Phi|^2 not integrable as s -> 1")
    return PhysicalityVerdict(printed, normalizable, "; ".join(reasons) or "ok")


def bound_state(p: ModelParams, n: int, case: int = 1) -> BoundState:
    """Assemble level n with exponents, Jacobi indices and unit-L2 normalization."""
    E = energy_level(p, n, case)
    if E is None:
        raise QuantumNumberError(
            f"no bound state with n={n} (case {case}); {bound_state_count(p, case)} level(s) exist"
        )
    xi = xi_coefficients(p, E)
    root_left = math.sqrt(max(xi.mu_sq, 0.0))
    root_right = math.sqrt(max(xi.decay_sq, 0.0))
    st = BoundState(
        n=n,
        energy=E,
        case=case,
        eta=p.eta,
        jacobi_a=2.0 * root_left,
        jacobi_b=2.0 * root_right,
        exponent_left=p.z + root_left,
        exponent_right=root_right,
    )
    verdict = physicality_check(st)
    norm = math.nan
    if p.q < 0 and verdict.physical:
        norm = 1.0 / math.sqrt(Wavefunction(p, st, 1.0).norm_squared())
    return replace(st, norm_constant=norm, physical=verdict.physical, reason=verdict.reason)


def bound_states(p: ModelParams, case: int = 1) -> list[BoundState]:
    return [bound_state(p, n, case) for n in range(bound_state_count(p, case))]


class Wavefunction:
    """psi_n(s) and the normalized position-space amplitude Phi_n(x) = m^eta psi_n.

    Sign convention: Phi_n > 0 as s -> 1 (x -> +inf).
    """

    def __init__(self, p: ModelParams, st: BoundState, norm: float | None = None):
        self.p = p
        self.st = st
        self.jacobi = specfun.JacobiParams(st.n, st.jacobi_a, st.jacobi_b)
        self.sign = -1.0 if st.n % 2 else 1.0  # P_n^{(a,b)}(-1) = (-1)^n C(n+b, n)
        self.norm = st.norm_constant if norm is None else norm

    def psi(self, s, one_minus_s=None):
        s = np.asarray(s, dtype=float)
        oms = 1.0 - s if one_minus_s is None else one_minus_s
        st = self.st
        poly = specfun.jacobi_eval(self.jacobi, oms - s)
        return s**st.exponent_left * oms**st.exponent_right * poly

    def psi_derivatives(self, s):
        """(psi, dpsi/ds, d2psi/ds2) for s in (0, 1)."""
        s = np.asarray(s, dtype=float)
        oms = 1.0 - s
        L, R = self.st.exponent_left, self.st.exponent_right
        u = oms - s
        y = specfun.jacobi_eval(self.jacobi, u)
        y1 = -2.0 * specfun.jacobi_derivative(self.jacobi, u, 1)
        y2 = 4.0 * specfun.jacobi_derivative(self.jacobi, u, 2)
        f = s**L * oms**R
        g = L / s - R / oms
        g1 = -L / s**2 - R / oms**2
        return f * y, f * (y1 + g * y), f * (y2 + 2.0 * g * y1 + (g * g + g1) * y)

    def phi_x(self, x):
        """Normalized Phi_n(x); requires the full-line regime (q < 0)."""
        if self.p.q >= 0:
            raise RegimeError("position-space wavefunctions are only available for q < 0")
        s, oms = _s_pair(self.p, x)
        st = self.st
        poly = specfun.jacobi_eval(self.jacobi, oms - s)
        # m^eta * s^left = s^(eta + left)
        amp = s ** (st.eta + st.exponent_left) * oms**st.exponent_right * poly
        out = self.sign * self.norm * amp
        return float(out) if np.ndim(x) == 0 else out

    def x_support(self, decades: float = 70.0) -> tuple[float, float]:
        """Interval outside which |Phi|^2 is below exp(-decades) of its scale."""
        p, st = self.p, self.st
        shift = math.log(abs(p.q)) / p.lam
        lo = shift - decades / (2.0 * (st.eta + st.exponent_left)) / p.lam
        hi = shift + decades / (2.0 * st.exponent_right) / p.lam
        return lo, hi

    def norm_squared(self) -> float:
        lo, hi = self.x_support()
        return specfun.integrate(lambda x: self.phi_x(x) ** 2, lo, hi)


def wavefunction(p: ModelParams, st: BoundState) -> Wavefunction:
    if p.q >= 0:
        raise RegimeError("closed-form wavefunctions are only verified for q < 0")
    if not st.physical:
        raise UnphysicalStateError(f"state n={st.n} is unphysical: {st.reason}")
    return Wavefunction(p, st)


def overlap(p: ModelParams, a: Wavefunction, b: Wavefunction) -> float:
    lo = min(a.x_support()[0], b.x_support()[0])
    hi = max(a.x_support()[1], b.x_support()[1])
    return specfun.integrate(lambda x: a.phi_x(x) * b.phi_x(x), lo, hi)
