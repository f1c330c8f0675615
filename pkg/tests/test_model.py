import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hulthen_pdm.errors import DomainError, ParameterError
from hulthen_pdm.model import (
    REFERENCE,
    ModelParams,
    domain,
    effective_potential_at,
    mass_at,
    mass_log_derivatives,
    potential_at,
    s_of_x,
    x_of_s,
    xi_coefficients,
)

E0 = -7.298437881283575


def _five_point(f, x, h):
    d1 = (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)
    d2 = (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)
    return d1, d2


def test_derived_constants_reference():
    p = REFERENCE
    assert p.a_star == pytest.approx(0.75, abs=1e-15)
    assert p.z + p.eta == 0.5
    assert p.mu_sq == pytest.approx(0.0, abs=1e-15)
    assert p.gamma == pytest.approx(10.0, abs=1e-14)
    assert p.v == -10.0


def test_derived_constants_recomputed_after_replace():
    p = REFERENCE.replace(alpha=0.0, beta=0.0)
    assert p.a_star == 1.0
    assert p.mu_sq == -0.25


@pytest.mark.parametrize("field,value", [("lam", 0.0), ("lam", -1.0), ("V0", math.nan), ("q", math.inf)])
def test_invalid_params_rejected(field, value):
    with pytest.raises(ParameterError):
        REFERENCE.replace(**{field: value})


def test_v_undefined_for_constant_mass():
    with pytest.raises(ParameterError):
        _ = REFERENCE.replace(q=0.0).v


@pytest.mark.parametrize(
    "q,x,expected",
    [(-1.0, 0.0, 0.5), (-1.0, math.log(3.0), 0.75), (0.5, 0.0, 2.0)],
)
def test_mass_examples(q, x, expected):
    assert mass_at(REFERENCE.replace(q=q), x) == pytest.approx(expected, rel=1e-15)


def test_mass_domain_error_reports_singular_point():
    p = REFERENCE.replace(q=0.5)
    with pytest.raises(DomainError) as info:
        mass_at(p, -2.0)
    assert info.value.singular_x == pytest.approx(math.log(0.5))
    with pytest.raises(DomainError):
        mass_at(p, math.log(0.5))


def test_mass_log_derivatives_examples():
    r1, r2 = mass_log_derivatives(REFERENCE, 0.0)
    assert r1 == pytest.approx(0.5, rel=1e-15)
    assert r2 == pytest.approx(0.0, abs=1e-15)
    r1, r2 = mass_log_derivatives(REFERENCE, 800.0)
    assert (r1, r2) == (0.0, 0.0)


def test_mass_log_derivatives_match_central_differences_at_zero():
    d1, d2 = _five_point(lambda x: mass_at(REFERENCE, x), 0.0, 1e-3)
    r1, r2 = mass_log_derivatives(REFERENCE, 0.0)
    m = mass_at(REFERENCE, 0.0)
    assert d1 / m == pytest.approx(r1, rel=1e-8)
    assert abs(d2 / m - r2) < 1e-8


def test_mass_log_derivatives_random_points():
    rng = np.random.default_rng(7)
    for q in (-1.0, -0.3, 0.6):
        p = REFERENCE.replace(q=q, lam=1.3)
        lo = (p.singular_x or -8.0) + 0.5
        xs = rng.uniform(lo, 8.0, 100)
        for x in xs:
            d1, d2 = _five_point(lambda t: mass_at(p, t), x, 1e-3)
            r1, r2 = mass_log_derivatives(p, x)
            m = mass_at(p, x)
            assert d1 / m == pytest.approx(r1, rel=1e-7, abs=1e-10)
            assert d2 / m == pytest.approx(r2, rel=1e-7, abs=1e-9)


def test_mass_log_derivatives_against_exponential_form():
    p = REFERENCE.replace(q=-0.7, lam=0.8)
    x = np.linspace(-3, 3, 13)
    e = np.exp(-p.lam * x)
    want1 = -p.q * p.lam * e / (1 - p.q * e)
    want2 = p.q * p.lam**2 * e * (1 + p.q * e) / (1 - p.q * e) ** 2
    r1, r2 = mass_log_derivatives(p, x)
    np.testing.assert_allclose(r1, want1, rtol=1e-13)
    np.testing.assert_allclose(r2, want2, rtol=1e-12, atol=1e-15)


def test_potential_examples():
    assert potential_at(REFERENCE, 0.0) == pytest.approx(-5.0, rel=1e-15)
    assert potential_at(REFERENCE, 800.0) == 0.0
    assert potential_at(REFERENCE, -800.0) == pytest.approx(-10.0, rel=1e-15)


def test_effective_potential_reference_point():
    assert effective_potential_at(REFERENCE, 0.0) == pytest.approx(-5.375, rel=1e-14)


def test_effective_potential_constant_mass_limit():
    for x in (20.0, 30.0):
        assert abs(effective_potential_at(REFERENCE, x) - potential_at(REFERENCE, x)) < 1e-6


def test_effective_potential_equals_potential_when_coefficients_cancel():
    p = REFERENCE.replace(alpha=0.0, beta=-1.0)
    x = np.linspace(-10, 10, 41)
    np.testing.assert_array_equal(effective_potential_at(p, x), potential_at(p, x))


def test_s_map_examples_and_round_trip():
    assert s_of_x(REFERENCE, 0.0) == 0.5
    assert x_of_s(REFERENCE, 0.75) == pytest.approx(math.log(3.0), rel=1e-15)
    x = 2.317
    assert x_of_s(REFERENCE, s_of_x(REFERENCE, x)) == pytest.approx(x, rel=1e-12)
    xs = np.linspace(-20, 20, 101)
    np.testing.assert_array_equal(s_of_x(REFERENCE, xs), mass_at(REFERENCE, xs))


def test_s_map_monotone_and_image():
    # beyond |x| ~ 36 s rounds to 1.0 in double precision
    xs = np.linspace(-30, 30, 2001)
    s = s_of_x(REFERENCE, xs)
    assert np.all(np.diff(s) > 0)
    assert np.all((s > 0) & (s < 1))
    p = REFERENCE.replace(q=0.5)
    s = s_of_x(p, np.linspace(p.singular_x + 1e-3, 20, 500))
    assert np.all(np.diff(s) < 0) and np.all(s > 1)


def test_x_of_s_range_errors():
    with pytest.raises(DomainError):
        x_of_s(REFERENCE, 1.2)
    with pytest.raises(DomainError):
        x_of_s(REFERENCE.replace(q=0.5), 0.5)


def test_domain_metadata():
    assert domain(REFERENCE).verified
    d = domain(REFERENCE.replace(q=0.5))
    assert not d.verified and d.s_min == 1.0 and d.x_min == pytest.approx(math.log(0.5))


def test_far_left_tail_uses_asymptotic_form():
    s = s_of_x(REFERENCE, -750.0)
    assert 0.0 <= s < 1e-300
    assert potential_at(REFERENCE, -750.0) == pytest.approx(-10.0)


def test_xi_reference_values():
    xi = xi_coefficients(REFERENCE, E0)
    assert xi.xi1 == pytest.approx(10.0, rel=1e-14)
    assert xi.xi2 == pytest.approx(2.701562118716424, rel=1e-12)
    assert xi.xi3 == pytest.approx(0.0, abs=1e-15)
    assert xi.mu_sq == pytest.approx(0.0, abs=1e-15)
    assert xi.gamma == pytest.approx(10.0, rel=1e-14)
    assert xi.decay_sq == pytest.approx(-E0, rel=1e-14)


def test_xi_identity_zero_energy():
    xi = xi_coefficients(REFERENCE.replace(alpha=0.3, eta=1.7), 0.0)
    assert abs(xi.decay_sq) < 1e-13


def test_mu_and_gamma_eta_independent():
    a = xi_coefficients(REFERENCE.replace(eta=0.0), -1.0)
    b = xi_coefficients(REFERENCE.replace(eta=2.0), -3.0)
    assert a.mu_sq == pytest.approx(b.mu_sq, abs=1e-14)
    assert a.gamma == pytest.approx(b.gamma, abs=1e-13)


finite = dict(allow_nan=False, allow_infinity=False)


@settings(max_examples=300, deadline=None)
@given(
    V0=st.floats(-50, 50, **finite),
    lam=st.floats(0.05, 5, **finite),
    q=st.floats(-3, -0.01, **finite) | st.floats(0.01, 3, **finite),
    alpha=st.floats(-3, 3, **finite),
    beta=st.floats(-3, 3, **finite),
    eta=st.floats(-2, 3, **finite),
    E=st.floats(-100, 100, **finite),
)
def test_xi_identity_property(V0, lam, q, alpha, beta, eta, E):
    p = ModelParams(V0, lam, q, alpha, beta, eta)
    xi = xi_coefficients(p, E)
    scale = max(abs(xi.xi1), abs(xi.xi2), abs(xi.xi3), abs(E / lam**2), 1.0)
    assert abs(xi.xi1 - xi.xi2 + xi.xi3 + E / lam**2) <= 1e-12 * scale
    assert xi.mu_sq == pytest.approx(p.mu_sq, abs=1e-12 * max(1.0, abs(p.a_star)))
    assert xi.gamma == pytest.approx(p.gamma, abs=1e-12 * scale)
