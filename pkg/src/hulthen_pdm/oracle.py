"""Finite-difference eigenvalue oracle for H = -d/dx (1/m) d/dx + V_eff.

Two discretizations are provided.

``plain``
    Conservative three-point scheme with Dirichlet walls at both ends.  It is
    the textbook operator, used for the constant-mass sanity checks and the
    q > 0 half-line regime.

``gauged``
    For q < 0 the endpoint x -> -inf (m -> 0) admits two square-integrable
    local solutions, Phi ~ s^(1/2 + mu) and s^(1/2 - mu) (or s^(1/2) ln s when
    mu = 0).  A wall at a finite x_min then converges only like 1/|x_min|.
    Writing Phi = s^c u with c = 1/2 + sqrt(mu_sq) (the local exponent of the
    operator at s -> 0) turns the problem into the weighted Sturm-Liouville
    pencil

        -(P u')' + R u = E w u,   P = s^(2c-1),  w = s^(2c),
        R = w (V_eff - (p g')'/g),  p = 1/m,  g = s^c,

    whose coefficients stay bounded.  A natural (zero-flux) condition on u at
    x_min picks the subdominant solution with an error of order exp(lambda
    x_min).  The right end keeps a Dirichlet wall.

Eigenvalues come from Sturm-sequence multisection on A - t B (B diagonal
and positive, so the inertia of the LDL^T pivots counts eigenvalues below t);
eigenvectors from inverse iteration with a Thomas solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, OracleNonConvergence, ParameterError
from .model import ModelParams, _s_pair, effective_potential_at, mass_at
from .spectrum import ROUNDOFF_RTOL, BoundState, Wavefunction, assemble_ode, root_mu

BISECTION_WIDTH = 1e-12
LEAKAGE_TOL = 1e-8
_SHIFTS_PER_SWEEP = 15


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 3:
            raise ParameterError(f"n_points must be an integer >= 3, got {self.n_points!r}")
        if not self.x_min < self.x_max:
            raise ParameterError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def scaled(self, factor: float) -> "GridSpec":
        """Interval stretched about x = 0 by ``factor`` at (nearly) the same spacing."""
        n = int(round((self.n_points - 1) * factor)) + 1
        return GridSpec(self.x_min * factor, self.x_max * factor, n)

    def refined(self, levels: int) -> list["GridSpec"]:
        """Grids with spacing ratio ~2, coarsest first, ending at ``self``."""
        n1 = self.n_points - 1
        out = []
        for k in range(levels - 1, 0, -1):
            out.append(GridSpec(self.x_min, self.x_max, max(2, int(round(n1 / 2**k))) + 1))
        out.append(self)
        return out


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric pencil (A, B): ``diagonal``/``offdiag`` define A, ``weight`` the
    diagonal of B.  ``index`` maps unknowns to grid nodes; ``gauge`` holds
    s^c at those nodes so that Phi = gauge * u."""

    diagonal: np.ndarray
    offdiag: np.ndarray
    weight: np.ndarray
    grid: GridSpec
    index: np.ndarray
    gauge: np.ndarray
    scheme: str = "plain"

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def dense(self) -> np.ndarray:
        return (np.diag(self.diagonal) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1))


@dataclass
class OracleEigenpair:
    index: int
    eigenvalue: float
    x: np.ndarray = field(repr=False)
    vector: np.ndarray = field(repr=False)
    leakage: float

    @property
    def spurious(self) -> bool:
        return self.leakage > LEAKAGE_TOL


def _check_grid(p: ModelParams, g: GridSpec) -> None:
    if p.q > 0 and not g.x_min > p.singular_x:
        raise DomainError(
            f"grid starts at {g.x_min} but the mass is singular at x_s = {p.singular_x:.9g}",
            singular_x=p.singular_x,
        )


def discretize(p: ModelParams, g: GridSpec, scheme: str = "plain") -> TridiagonalOperator:
    """Staggered conservative discretization of the effective Hamiltonian."""
    _check_grid(p, g)
    if scheme == "plain":
        return _discretize_plain(p, g)
    if scheme == "gauged":
        return _discretize_gauged(p, g)
    raise ParameterError(f"unknown scheme {scheme!r}")


def _discretize_plain(p: ModelParams, g: GridSpec) -> TridiagonalOperator:
    x = g.nodes()
    h2 = g.h**2
    mid = 0.5 * (x[:-1] + x[1:])
    inv_mass_mid = 1.0 / np.asarray(mass_at(p, mid))
    veff = np.asarray(effective_potential_at(p, x))
    diag = (inv_mass_mid[:-1] + inv_mass_mid[1:]) / h2 + veff[1:-1]
    off = -inv_mass_mid[1:-1] / h2
    n = len(diag)
    return TridiagonalOperator(
        diagonal=diag, offdiag=off, weight=np.ones(n), grid=g,
        index=np.arange(1, g.n_points - 1), gauge=np.ones(n), scheme="plain",
    )


def gauge_exponent(p: ModelParams) -> float:
    if p.mu_sq < -ROUNDOFF_RTOL * max(1.0, abs(p.a_star) + abs(p.beta)):
        raise ParameterError("gauged scheme needs mu_sq >= 0")
    return 0.5 + root_mu(p)


def _gauged_potential(p: ModelParams, c: float, oms, s):
    """V_eff - (p g')'/g for g = s^c, with the 1/s pole removed.

    Over a common 1/s the kinetic part is
    (beta+1)/2 (1-s)(1-2s) - A* (1-s)^2 - c(c-1)(1-s)^2 + c s (1-s),
    whose constant term (beta+1)/2 - A* - c(c-1) vanishes for c = 1/2 + sqrt(mu_sq).
    """
    const = -1.5 * (p.beta + 1.0) + 2.0 * p.a_star + 2.0 * c * (c - 1.0) + c
    lin = (p.beta + 1.0) - p.a_star - c * (c - 1.0) - c
    return (p.V0 / p.q) * oms + p.lam**2 * (const + lin * s)


def _discretize_gauged(p: ModelParams, g: GridSpec) -> TridiagonalOperator:
    if not p.q < 0:
        raise ParameterError("gauged scheme is defined for the full-line regime q < 0")
    c = gauge_exponent(p)
    x = g.nodes()
    h2 = g.h**2
    s, oms = _s_pair(p, x)
    s_mid, _ = _s_pair(p, 0.5 * (x[:-1] + x[1:]))
    P = s_mid ** (2.0 * c - 1.0)
    w = s ** (2.0 * c)
    R = w * _gauged_potential(p, c, oms, s)
    # unknowns: nodes 0 .. N-2 (natural left end, Dirichlet right end)
    diag = np.empty(g.n_points - 1)
    diag[0] = P[0] / h2 + 0.5 * R[0]
    diag[1:] = (P[:-1] + P[1:])[: g.n_points - 2] / h2 + R[1:-1]
    weight = w[:-1].copy()
    weight[0] *= 0.5
    off = -P[: g.n_points - 2] / h2
    return TridiagonalOperator(
        diagonal=diag, offdiag=off, weight=weight, grid=g,
        index=np.arange(0, g.n_points - 1), gauge=s[:-1] ** c, scheme="gauged",
    )


def sturm_count(T: TridiagonalOperator, shifts) -> np.ndarray:
    """Number of eigenvalues of the pencil strictly below each shift."""
    t = np.atleast_1d(np.asarray(shifts, dtype=float))
    d, e2, w = T.diagonal, T.offdiag**2, T.weight
    pivmin = np.finfo(float).tiny * max(1.0, float(e2.max()) if e2.size else 1.0)
    count = np.zeros(t.shape, dtype=int)
    piv = d[0] - t * w[0]
    for i in range(T.size):
        if i:
            piv = d[i] - t * w[i] - e2[i - 1] / piv
        piv = np.where(np.abs(piv) < pivmin, -pivmin, piv)
        count += piv < 0
    return count


def _lower_bound(T: TridiagonalOperator, start: float) -> float:
    lo = min(start, -1.0)
    for _ in range(200):
        if sturm_count(T, lo)[0] == 0:
            return lo
        lo *= 4.0
    raise OracleNonConvergence("could not bracket the bottom of the spectrum")


def _bisect(T: TridiagonalOperator, ks: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """k-th eigenvalues (0-based) by multisection of [lo, hi]."""
    m = len(ks)
    lows = np.full(m, float(lo))
    highs = np.full(m, float(hi))
    frac = np.arange(1, _SHIFTS_PER_SWEEP + 1) / (_SHIFTS_PER_SWEEP + 1)
    while True:
        width = highs - lows
        limit = np.maximum(BISECTION_WIDTH, 4 * np.spacing(np.maximum(np.abs(lows), np.abs(highs))))
        if np.all(width <= limit):
            break
        shifts = lows[:, None] + width[:, None] * frac[None, :]
        counts = sturm_count(T, shifts.ravel()).reshape(shifts.shape)
        above = counts > ks[:, None]
        for j in range(m):
            hit = np.flatnonzero(above[j])
            if hit.size:
                highs[j] = shifts[j, hit[0]]
                if hit[0] > 0:
                    lows[j] = shifts[j, hit[0] - 1]
            else:
                lows[j] = shifts[j, -1]
    return 0.5 * (lows + highs)


def _thomas(sub, diag, sup, rhs):
    """Solve a tridiagonal system; zero pivots are nudged to a tiny value."""
    n = len(diag)
    c = [0.0] * n
    d = [0.0] * n
    tiny = 1e-300
    beta = diag[0] if diag[0] != 0 else tiny
    c[0] = sup[0] / beta if n > 1 else 0.0
    d[0] = rhs[0] / beta
    for i in range(1, n):
        beta = diag[i] - sub[i - 1] * c[i - 1]
        if beta == 0:
            beta = tiny
        c[i] = sup[i] / beta if i < n - 1 else 0.0
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / beta
    for i in range(n - 2, -1, -1):
        d[i] -= c[i] * d[i + 1]
    return np.array(d)


def _inverse_iteration(T: TridiagonalOperator, ev: float, iterations: int = 4) -> np.ndarray:
    shift = ev + 1e-10 * max(1.0, abs(ev))
    diag = (T.diagonal - shift * T.weight).tolist()
    off = T.offdiag.tolist()
    u = np.ones(T.size)
    for _ in range(iterations):
        u = _thomas(off, diag, off, (T.weight * u).tolist())
        u /= math.sqrt(float(np.dot(T.weight * u, u)))
    return u


def _full_vector(T: TridiagonalOperator, u: np.ndarray) -> np.ndarray:
    phi = np.zeros(T.grid.n_points)
    phi[T.index] = T.gauge * u
    return phi


def _trapezoid_sq(phi: np.ndarray, h: float) -> np.ndarray:
    wts = np.full(phi.size, h)
    wts[0] = wts[-1] = 0.5 * h
    return wts * phi**2


def eigenvalues_below(T: TridiagonalOperator, threshold: float, max_count: int) -> list[OracleEigenpair]:
    """Lowest eigenpairs below ``threshold`` (at most ``max_count``), ascending."""
    found = int(sturm_count(T, threshold)[0])
    m = min(found, max_count)
    if m <= 0:
        return []
    start = float(np.min(T.diagonal / T.weight)) if np.all(T.weight > 0) else -1.0
    lo = _lower_bound(T, min(start, threshold) - 1.0)
    values = _bisect(T, np.arange(m), lo, threshold)
    h = T.grid.h
    x = T.grid.nodes()
    edge = max(1, int(round(0.1 * T.grid.n_points)))
    pairs = []
    for k, ev in enumerate(values):
        phi = _full_vector(T, _inverse_iteration(T, float(ev)))
        dens = _trapezoid_sq(phi, h)
        phi /= math.sqrt(dens.sum())
        dens = _trapezoid_sq(phi, h)
        leak = float((dens[:edge].sum() + dens[-edge:].sum()) / dens.sum())
        # sign: positive at the right-most point carrying appreciable weight
        big = np.flatnonzero(np.abs(phi) > 1e-3 * np.abs(phi).max())
        if phi[big[-1]] < 0:
            phi = -phi
        pairs.append(OracleEigenpair(k, float(ev), x, phi, min(max(leak, 0.0), 1.0)))
    return pairs


def residual_scan(p: ModelParams, st: BoundState, energy: float | None = None, points: int = 50) -> float:
    """Max over Chebyshev points in (0.02, 0.98) of |psi'' + tau~/sigma psi' + sigma~/sigma^2 psi|,
    each point scaled by its largest term.  ``energy`` overrides the ODE's E."""
    E = st.energy if energy is None else energy
    form = assemble_ode(p, E)
    j = np.arange(points)
    s = 0.5 + 0.48 * np.cos(math.pi * (j + 0.5) / points)
    wf = Wavefunction(p, st, norm=1.0)
    psi, d1, d2 = wf.psi_derivatives(s)
    sigma = form.sigma(s)
    t1 = d2
    t2 = form.tau_tilde(s) / sigma * d1
    t3 = form.sigma_tilde(s) / sigma**2 * psi
    scale = np.maximum(np.maximum(np.abs(t1), np.abs(t2)), np.abs(t3))
    return float(np.max(np.abs(t1 + t2 + t3) / scale))


@dataclass
class ConvergenceRow:
    h: float
    n_points: int
    eigenvalues: list
    leakage: list


@dataclass
class ConvergenceStudy:
    rows: list
    extrapolated: list
    error_estimate: list
    observed_order: list
    warnings: list

    def as_table(self) -> list[dict]:
        return [
            {"h": r.h, "n_points": r.n_points, "eigenvalues": list(r.eigenvalues), "leakage": list(r.leakage)}
            for r in self.rows
        ]


def _observed_order(h, e) -> float:
    (h1, h2, h3), (e1, e2, e3) = h, e
    d1, d2 = e1 - e2, e2 - e3
    if d2 == 0 or d1 * d2 <= 0:
        return math.nan
    ratio = d1 / d2

    def f(p):
        return (h1**p - h2**p) / (h2**p - h3**p) - ratio

    try:
        return brentq(f, 0.05, 12.0)
    except ValueError:
        return math.nan


def richardson(h_coarse: float, e_coarse: float, h_fine: float, e_fine: float, order: float = 2.0) -> float:
    rc, rf = h_coarse**order, h_fine**order
    return (rc * e_fine - rf * e_coarse) / (rc - rf)


def _scheme_for(p: ModelParams) -> str:
    return "gauged" if p.q < 0 else "plain"


def convergence_study(p: ModelParams, grids: list[GridSpec], levels: int | None = None,
                      threshold: float = 0.0) -> ConvergenceStudy:
    """Eigenvalues on successively refined grids, Richardson extrapolation with the
    scheme's formal order 2, and the observed order from the three finest grids."""
    if len(grids) < 3:
        raise ParameterError("convergence_study needs at least three grids")
    grids = sorted(grids, key=lambda g: -g.h)
    rows = []
    warnings = []
    for g in grids:
        T = discretize(p, g, _scheme_for(p))
        pairs = eigenvalues_below(T, threshold, levels if levels is not None else 64)
        rows.append(ConvergenceRow(g.h, g.n_points, [e.eigenvalue for e in pairs], [e.leakage for e in pairs]))
        if any(e.spurious for e in pairs):
            warnings.append(f"boundary leakage above {LEAKAGE_TOL:g} at n_points={g.n_points}")
    counts = {len(r.eigenvalues) for r in rows}
    if len(counts) != 1:
        raise OracleNonConvergence("number of eigenvalues changes under refinement", table=rows)
    nlev = counts.pop()
    extrapolated, errors, orders = [], [], []
    for k in range(nlev):
        hs = [r.h for r in rows[-3:]]
        es = [r.eigenvalues[k] for r in rows[-3:]]
        ext = richardson(hs[1], es[1], hs[2], es[2])
        ext_prev = richardson(hs[0], es[0], hs[1], es[1])
        extrapolated.append(ext)
        errors.append(abs(ext - ext_prev))
        order = _observed_order(hs, es)
        orders.append(order)
        if not math.isfinite(order):
            warnings.append(f"non-monotone convergence for level {k}")
    return ConvergenceStudy(rows, extrapolated, errors, orders, warnings)
