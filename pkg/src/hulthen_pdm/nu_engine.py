"""Nikiforov-Uvarov solver for equations of hypergeometric type

    psi'' + (tau_tilde / sigma) psi' + (sigma_tilde / sigma^2) psi = 0

with deg sigma <= 2, deg tau_tilde <= 1, deg sigma_tilde <= 2.

The solver enumerates the (k, pi) pairs that make the radicand of pi a
perfect square, flags the branches whose tau = tau_tilde + 2 pi is
decreasing, and builds the weight, the factor phi and the classical
polynomial y_n that together give psi_n = phi * y_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import specfun
from .errors import NoRealBranchError, ParameterError, UnsupportedSigmaError

PERFECT_SQUARE_RTOL = 1e-9


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, coefficients in ascending order, trailing zeros trimmed."""

    coef: tuple = (0.0,)

    def __post_init__(self):
        c = [float(v) for v in self.coef] or [0.0]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coef", tuple(c))

    @property
    def degree(self) -> int:
        return 0 if self.coef == (0.0,) else len(self.coef) - 1

    def __getitem__(self, i: int) -> float:
        return self.coef[i] if i < len(self.coef) else 0.0

    def __call__(self, s):
        return npoly.polyval(s, self.coef)

    def deriv(self) -> "Polynomial":
        return Polynomial(tuple(npoly.polyder(self.coef)))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(tuple(npoly.polyadd(self.coef, other.coef)))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(tuple(npoly.polysub(self.coef, other.coef)))

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return Polynomial(tuple(npoly.polymul(self.coef, other.coef)))
        return Polynomial(tuple(float(other) * c for c in self.coef))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.coef == (0.0,)


@dataclass(frozen=True)
class HypergeometricForm:
    sigma: Polynomial
    tau_tilde: Polynomial
    sigma_tilde: Polynomial

    def __post_init__(self):
        if self.sigma.is_zero():
            raise ParameterError("sigma must not vanish identically")
        if self.sigma.degree > 2:
            raise ParameterError("deg sigma must be <= 2")
        if self.tau_tilde.degree > 1:
            raise ParameterError("deg tau_tilde must be <= 1")
        if self.sigma_tilde.degree > 2:
            raise ParameterError("deg sigma_tilde must be <= 2")

    def radicand(self, k: float) -> Polynomial:
        """(sigma' - tau_tilde)^2 / 4 - sigma_tilde + k sigma."""
        half = 0.5 * (self.sigma.deriv() - self.tau_tilde)
        return half * half - self.sigma_tilde + k * self.sigma

    def shifted(self, delta: float) -> "HypergeometricForm":
        """Same equation with sigma_tilde + delta * sigma (moves k and lambda by delta)."""
        return HypergeometricForm(self.sigma, self.tau_tilde, self.sigma_tilde + delta * self.sigma)


@dataclass(frozen=True)
class NuBranch:
    k: float
    pi: Polynomial
    tau: Polynomial
    tau_prime: float
    lambda_of_k: float
    admissible: bool
    selected: bool = False
    note: str = ""


@dataclass(frozen=True)
class SigmaClass:
    """Canonical class of sigma.

    ``kind`` is ``"hermite"`` (constant), ``"laguerre"`` (linear, root
    ``roots[0]``) or ``"jacobi"`` (two real roots ``roots[0] < roots[1]``).
    ``lead`` is the leading coefficient.
    """

    kind: str
    lead: float
    roots: tuple = ()


def classify_sigma(sigma: Polynomial) -> SigmaClass:
    if sigma.degree == 0:
        return SigmaClass("hermite", sigma[0])
    if sigma.degree == 1:
        return SigmaClass("laguerre", sigma[1], (-sigma[0] / sigma[1],))
    a, b, c = sigma[2], sigma[1], sigma[0]
    disc = b * b - 4.0 * a * c
    if disc <= 0:
        raise UnsupportedSigmaError(
            f"quadratic sigma {sigma.coef} has no pair of distinct real roots"
        )
    r = math.sqrt(disc)
    # numerically stable root pair
    qq = -0.5 * (b + math.copysign(r, b))
    roots = sorted([qq / a, c / qq] if qq != 0 else [0.0, -b / a])
    return SigmaClass("jacobi", a, (roots[0], roots[1]))


def _perfect_square_ks(form: HypergeometricForm) -> list[float]:
    """Real k for which the radicand is the square of a real polynomial.

    The radicand's coefficients are affine in k, so its discriminant is a
    polynomial of degree <= 2 in k, solved in closed form.
    """
    base = form.radicand(0.0)
    c0, c1, c2 = base[0], base[1], base[2]
    s0, s1, s2 = form.sigma[0], form.sigma[1], form.sigma[2]
    K2 = s1 * s1 - 4.0 * s0 * s2
    K1 = 2.0 * c1 * s1 - 4.0 * (c0 * s2 + c2 * s0)
    K0 = c1 * c1 - 4.0 * c0 * c2
    scale = max(abs(K2), abs(K1), abs(K0), 1.0)

    if abs(K2) > PERFECT_SQUARE_RTOL * scale:
        d = K1 * K1 - 4.0 * K2 * K0
        dscale = max(K1 * K1, abs(4.0 * K2 * K0), 1.0)
        if d < -PERFECT_SQUARE_RTOL * dscale:
            raise NoRealBranchError(f"perfect-square condition has complex k (disc = {d:.6g})")
        if d <= PERFECT_SQUARE_RTOL * dscale:
            return [-K1 / (2.0 * K2)]
        r = math.sqrt(d)
        qq = -0.5 * (K1 + math.copysign(r, K1))
        return sorted([qq / K2, K0 / qq])
    if abs(K1) > PERFECT_SQUARE_RTOL * scale:
        return [-K0 / K1]
    if abs(K0) <= PERFECT_SQUARE_RTOL * scale:
        raise NoRealBranchError("perfect-square condition holds for every k (pi not unique)")
    raise NoRealBranchError("perfect-square condition has no solution k")


def _sqrt_poly(R: Polynomial) -> Polynomial | None:
    """Real polynomial P with P^2 = R (R assumed a perfect square), or None."""
    r0, r1, r2 = R[0], R[1], R[2]
    scale = max(abs(r0), abs(r1), abs(r2), 1.0)
    if r2 > PERFECT_SQUARE_RTOL * scale:
        root = math.sqrt(r2)
        return Polynomial((r1 / (2.0 * root), root))
    if r2 < -PERFECT_SQUARE_RTOL * scale:
        return None
    if abs(r1) > math.sqrt(PERFECT_SQUARE_RTOL) * scale:
        return None
    if r0 < -PERFECT_SQUARE_RTOL * scale:
        return None
    return Polynomial((math.sqrt(max(r0, 0.0)),))


def discriminant(R: Polynomial) -> float:
    return R[1] ** 2 - 4.0 * R[0] * R[2]


def _tau_zero_inside(tau: Polynomial, cls: SigmaClass) -> bool:
    if cls.kind != "jacobi" or tau.degree != 1:
        return False
    root = -tau[0] / tau[1]
    return cls.roots[0] < root < cls.roots[1]


def candidate_branches(form: HypergeometricForm) -> list[NuBranch]:
    """All real (k, pi) branches, at most four, with the physical one marked.

    Selection among admissible branches (tau' < 0): prefer a tau whose zero
    lies strictly between the roots of sigma, then the smaller |k|.
    """
    ks = _perfect_square_ks(form)
    half = 0.5 * (form.sigma.deriv() - form.tau_tilde)
    branches: list[NuBranch] = []
    seen = set()
    for k in ks:
        root = _sqrt_poly(form.radicand(k))
        if root is None:
            continue
        for sign in (1.0, -1.0):
            pi = half + sign * root
            key = (round(k, 12), tuple(round(c, 12) for c in pi.coef))
            if key in seen:
                continue
            seen.add(key)
            tau = form.tau_tilde + 2.0 * pi
            tau_prime = tau[1]
            branches.append(
                NuBranch(
                    k=k,
                    pi=pi,
                    tau=tau,
                    tau_prime=tau_prime,
                    lambda_of_k=k + pi[1],
                    admissible=tau_prime < 0,
                )
            )
    if not branches:
        raise NoRealBranchError("no real polynomial square root for any admissible k")
    return _mark_selected(branches, form)


def _mark_selected(branches: list[NuBranch], form: HypergeometricForm) -> list[NuBranch]:
    admissible = [b for b in branches if b.admissible]
    if not admissible:
        return branches
    try:
        cls = classify_sigma(form.sigma)
    except UnsupportedSigmaError:
        cls = None

    def rank(b):
        return (not (cls is not None and _tau_zero_inside(b.tau, cls)), abs(b.k))

    ranked = sorted(admissible, key=rank)
    best = ranked[0]
    if len(ranked) == 1:
        note = "unique admissible branch"
    elif rank(ranked[1])[0] != rank(best)[0]:
        note = "tie broken by zero of tau inside sigma interval"
    else:
        note = "tie broken by smaller |k|"
    return [replace(b, selected=True, note=note) if b is best else b for b in branches]


def select_branch(form: HypergeometricForm) -> NuBranch:
    for b in candidate_branches(form):
        if b.selected:
            return b
    raise NoRealBranchError("no branch with tau' < 0")


def eigenvalue_rule(b: NuBranch, form: HypergeometricForm, n: int) -> float:
    """lambda_n = -n tau' - n(n-1)/2 sigma''."""
    if n < 0:
        raise ParameterError("n must be a nonnegative integer")
    sigma_pp = 2.0 * form.sigma[2]
    return -n * b.tau_prime - 0.5 * n * (n - 1) * sigma_pp


def matching_level(b: NuBranch, form: HypergeometricForm) -> tuple[float, int, float]:
    """Solve lambda_n = lambda(k) for real n.

    Returns ``(n_real, n_nearest, mismatch)`` where ``mismatch`` is
    ``lambda(k) - lambda_{n_nearest}`` (``n_nearest`` clamped at 0).
    """
    a = -form.sigma[2]  # coefficient of n^2: -sigma''/2
    bcoef = -b.tau_prime + form.sigma[2]
    lam = b.lambda_of_k
    if abs(a) < 1e-300:
        n_real = lam / bcoef if bcoef != 0 else math.nan
    else:
        d = bcoef * bcoef + 4.0 * a * lam
        if d < 0:
            n_real = math.nan
        else:
            roots = [(-bcoef + sgn * math.sqrt(d)) / (2.0 * a) for sgn in (1.0, -1.0)]
            nonneg = [r for r in roots if r >= -0.5]
            n_real = min(nonneg) if nonneg else max(roots)
    n_near = 0 if not math.isfinite(n_real) else max(0, int(round(n_real)))
    return n_real, n_near, lam - eigenvalue_rule(b, form, n_near)


@dataclass(frozen=True)
class WeightSolution:
    """Closed-form solution rho of (sigma rho)' = tau rho.

    jacobi:   rho = |s - r1|^A |s - r2|^B
    laguerre: rho = |s - r0|^A exp(c s)
    hermite:  rho = exp(c1 s + c2 s^2)
    """

    kind: str
    params: dict = field(default_factory=dict)

    def log_derivative(self, s):
        p = self.params
        s = np.asarray(s, dtype=float)
        if self.kind == "jacobi":
            return p["A"] / (s - p["r1"]) + p["B"] / (s - p["r2"])
        if self.kind == "laguerre":
            return p["A"] / (s - p["r0"]) + p["c"]
        return p["c1"] + 2.0 * p["c2"] * s

    def __call__(self, s):
        p = self.params
        s = np.asarray(s, dtype=float)
        if self.kind == "jacobi":
            return np.abs(s - p["r1"]) ** p["A"] * np.abs(s - p["r2"]) ** p["B"]
        if self.kind == "laguerre":
            return np.abs(s - p["r0"]) ** p["A"] * np.exp(p["c"] * s)
        return np.exp(p["c1"] * s + p["c2"] * s * s)


@dataclass(frozen=True)
class PhiFactor:
    """Closed form of phi with phi'/phi = pi/sigma, same families as the weight.

    jacobi:   phi = |s - r1|^p |s - r2|^r
    laguerre: phi = |s - r0|^p exp(c s)
    hermite:  phi = exp(c1 s + c2 s^2)
    """

    kind: str
    params: dict = field(default_factory=dict)

    def log_derivative(self, s):
        return WeightSolution(self.kind, self._as_weight()).log_derivative(s)

    def __call__(self, s):
        return WeightSolution(self.kind, self._as_weight())(s)

    def _as_weight(self):
        p = dict(self.params)
        if "p" in p:
            p["A"] = p.pop("p")
        if "r" in p:
            p["B"] = p.pop("r")
        return p


def _poly_residue_split(num: Polynomial, cls: SigmaClass) -> dict:
    """Partial fractions of num/sigma for deg num <= 1."""
    a = cls.lead
    if cls.kind == "jacobi":
        r1, r2 = cls.roots
        # num/sigma = P/(s-r1) + Q/(s-r2), sigma'(r) = a (r - other)
        return {"r1": r1, "r2": r2, "A": num(r1) / (a * (r1 - r2)), "B": num(r2) / (a * (r2 - r1))}
    if cls.kind == "laguerre":
        (r0,) = cls.roots
        return {"r0": r0, "A": (num[0] + num[1] * r0) / a, "c": num[1] / a}
    return {"c1": num[0] / a, "c2": 0.5 * num[1] / a}


def weight_function(b: NuBranch, form: HypergeometricForm) -> WeightSolution:
    """rho with (sigma rho)' = tau rho, i.e. rho'/rho = (tau - sigma')/sigma."""
    cls = classify_sigma(form.sigma)
    return WeightSolution(cls.kind, _poly_residue_split(b.tau - form.sigma.deriv(), cls))


def phi_factor(b: NuBranch, form: HypergeometricForm) -> PhiFactor:
    """phi with phi'/phi = pi/sigma."""
    cls = classify_sigma(form.sigma)
    parts = _poly_residue_split(b.pi, cls)
    if cls.kind == "jacobi":
        parts = {"r1": parts["r1"], "r2": parts["r2"], "p": parts["A"], "r": parts["B"]}
    elif cls.kind == "laguerre":
        parts = {"r0": parts["r0"], "p": parts["A"], "c": parts["c"]}
    return PhiFactor(cls.kind, parts)


@dataclass(frozen=True)
class RodriguesSolution:
    """y_n as a classical polynomial of an affine argument t = scale*(s - shift).

    ``family`` is jacobi (indices ``a``, ``b``), laguerre (``alpha``) or
    hermite.  The Rodrigues constant B_n is left to the caller.
    """

    family: str
    n: int
    scale: float
    shift: float
    a: float = 0.0
    b: float = 0.0
    alpha: float = 0.0
    lambda_n: float = 0.0

    def argument(self, s):
        return self.scale * (np.asarray(s, dtype=float) - self.shift)

    def __call__(self, s):
        t = self.argument(s)
        if self.family == "jacobi":
            return specfun.jacobi_eval(specfun.JacobiParams(self.n, self.a, self.b), t)
        if self.family == "laguerre":
            return specfun.laguerre_eval(self.n, self.alpha, t)
        return specfun.hermite_eval(self.n, t)

    def derivative(self, s, order: int = 1):
        t = self.argument(s)
        if self.family == "jacobi":
            d = specfun.jacobi_derivative(specfun.JacobiParams(self.n, self.a, self.b), t, order)
        elif self.family == "laguerre":
            d = specfun.laguerre_derivative(self.n, self.alpha, t, order)
        else:
            d = specfun.hermite_derivative(self.n, t, order)
        return self.scale**order * d


def rodrigues_solution(b: NuBranch, form: HypergeometricForm, n: int) -> RodriguesSolution:
    """Identify y_n ~ rho^-1 d^n/ds^n (sigma^n rho) with a classical polynomial."""
    if n < 0:
        raise ParameterError("n must be a nonnegative integer")
    w = weight_function(b, form)
    lam_n = eigenvalue_rule(b, form, n)
    if w.kind == "jacobi":
        r1, r2 = w.params["r1"], w.params["r2"]
        # u = (r1 + r2 - 2 s)/(r2 - r1): r1 -> +1, r2 -> -1
        return RodriguesSolution(
            "jacobi", n, scale=-2.0 / (r2 - r1), shift=0.5 * (r1 + r2),
            a=w.params["A"], b=w.params["B"], lambda_n=lam_n,
        )
    if w.kind == "laguerre":
        if w.params["c"] >= 0:
            raise UnsupportedSigmaError("Laguerre-class weight does not decay (tau_1/sigma_1 >= 0)")
        return RodriguesSolution(
            "laguerre", n, scale=-w.params["c"], shift=w.params["r0"],
            alpha=w.params["A"], lambda_n=lam_n,
        )
    c1, c2 = w.params["c1"], w.params["c2"]
    if c2 >= 0:
        raise UnsupportedSigmaError("Hermite-class weight does not decay (tau'/sigma >= 0)")
    return RodriguesSolution(
        "hermite", n, scale=math.sqrt(-c2), shift=-c1 / (2.0 * c2), lambda_n=lam_n,
    )


def harmonic_oscillator_form(epsilon: float) -> HypergeometricForm:
    """psi'' + (epsilon - s^2) psi = 0: sigma = 1, tau_tilde = 0, sigma_tilde = epsilon - s^2.

    Bound states sit at epsilon = 2n + 1, where lambda(k) = epsilon - 1 = 2n.
    """
    return HypergeometricForm(Polynomial((1.0,)), Polynomial((0.0,)), Polynomial((epsilon, 0.0, -1.0)))
