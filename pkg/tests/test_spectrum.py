import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hulthen_pdm import nu_engine as nu
from hulthen_pdm.errors import ComplexParameterError, QuantumNumberError, RegimeError, UnphysicalStateError
from hulthen_pdm.model import REFERENCE, ModelParams
from hulthen_pdm.oracle import residual_scan
from hulthen_pdm.specfun import JacobiParams, jacobi_nodes_count
from hulthen_pdm.spectrum import (
    BoundState,
    Wavefunction,
    assemble_ode,
    bound_state,
    bound_state_count,
    bound_states,
    energy_level,
    energy_level_as_printed,
    overlap,
    physicality_check,
    quantization,
    wavefunction,
)

REF_E = (-7.298437881283575, -2.8953136438507268, -0.4921894064178782)
# nonzero mu_sq = 0.75 exercises the left exponent and the Jacobi index a
GENERIC = ModelParams(V0=20.0, lam=1.2, q=-0.8, alpha=1.0, beta=-2.0, eta=0.3)


def test_reference_energies():
    for n, want in enumerate(REF_E):
        assert energy_level(REFERENCE, n) == pytest.approx(want, rel=1e-14)
        lam_n = (math.sqrt(41.0) - (2 * n + 1)) / 2
        assert energy_level(REFERENCE, n) == pytest.approx(-(lam_n**2), rel=1e-14)
    assert energy_level(REFERENCE, 3) is None


def test_case_two_has_no_bound_state():
    for n in range(4):
        assert energy_level(REFERENCE, n, case=2) is None
        assert quantization(REFERENCE, n, 2).Lambda < 0
    assert bound_state_count(REFERENCE, case=2) == 0


def test_threshold_state_is_not_bound():
    p = REFERENCE.replace(V0=0.0)  # gamma = 0 -> Lambda_0 = 0 = sqrt(mu_sq)
    assert p.gamma == pytest.approx(0.0, abs=1e-15)
    assert quantization(p, 0).Lambda == pytest.approx(0.0, abs=1e-15)
    assert energy_level(p, 0) is None
    assert bound_state_count(p) == 0


def test_quantization_data():
    qd = quantization(REFERENCE, 1)
    assert qd.Lambda == pytest.approx((math.sqrt(41) - 3) / 2, rel=1e-14)
    assert qd.case_tag == 1 and qd.n == 1
    assert qd.zeta == pytest.approx(0.0, abs=1e-7)
    with pytest.raises(QuantumNumberError):
        quantization(REFERENCE, -1)


def test_printed_formula_examples():
    assert energy_level_as_printed(REFERENCE, 0, 1) == pytest.approx(REF_E[0], rel=1e-12)
    assert energy_level_as_printed(REFERENCE.replace(eta=0.0), 0, 1) is None
    e2 = energy_level_as_printed(REFERENCE, 0, 2)
    assert e2 == pytest.approx(0.25 * (1 + math.sqrt(41)) ** 2, rel=1e-12) and e2 > 0


def test_printed_formula_departs_from_derived_away_from_special_point():
    # at the reference point the printed inner root is -(eta - 1/2)^2, so use GENERIC
    p = GENERIC
    printed = energy_level_as_printed(p, 0, 1)
    assert printed is not None
    assert abs(printed - energy_level(p, 0)) > 1e-3


def test_bound_state_count_examples():
    assert bound_state_count(REFERENCE) == 3
    assert bound_state_count(REFERENCE.replace(V0=0.1)) == 1
    with pytest.raises(ComplexParameterError) as info:
        bound_state_count(REFERENCE.replace(alpha=0.0, beta=0.0))
    assert info.value.quantity == "mu_sq" and info.value.value == pytest.approx(-0.25)
    with pytest.raises(ComplexParameterError) as info:
        energy_level(REFERENCE.replace(V0=-10.0), 0)
    assert info.value.quantity == "1+4*gamma"


def test_bound_state_count_formula():
    for p in (REFERENCE, GENERIC, REFERENCE.replace(V0=3.3), REFERENCE.replace(V0=55.0, lam=0.7)):
        top = (math.sqrt(1 + 4 * p.gamma) - 1) / 2 - math.sqrt(p.mu_sq)
        assert bound_state_count(p) == max(0, math.floor(top) + 1)


def test_eta_invariance_bitwise():
    for p in (REFERENCE, GENERIC):
        base = [energy_level(p, n) for n in range(bound_state_count(p))]
        for eta in (0.0, 0.25, 0.5, 1.0, 2.0):
            assert [energy_level(p.replace(eta=eta), n) for n in range(len(base))] == base


def test_assemble_ode_examples():
    form = assemble_ode(REFERENCE, REF_E[0])
    assert form.sigma.coef == (0.0, 1.0, -1.0)
    assert form.tau_tilde.coef == (1.0, -2.0)
    np.testing.assert_allclose(form.sigma_tilde.coef, (0.0, 2.701562118716424, -10.0), atol=1e-12)
    assert assemble_ode(REFERENCE.replace(eta=0.0), -1.0).tau_tilde.coef == (0.0, -1.0)


@pytest.mark.parametrize("p", [REFERENCE, GENERIC, REFERENCE.replace(eta=1.7)])
def test_nu_engine_consistency(p):
    for stt in bound_states(p):
        form = assemble_ode(p, stt.energy)
        ok = [b for b in nu.candidate_branches(form)
              if b.admissible and abs(b.lambda_of_k - nu.eigenvalue_rule(b, form, stt.n)) <= 1e-9]
        assert ok, f"no admissible branch quantizes level {stt.n}"


@pytest.mark.parametrize("p", [REFERENCE, GENERIC])
def test_bound_state_invariants(p):
    for stt in bound_states(p):
        assert stt.jacobi_b == pytest.approx(2 * math.sqrt(-stt.energy) / p.lam, rel=1e-10)
        assert stt.jacobi_a == pytest.approx(2 * math.sqrt(p.mu_sq), abs=1e-12)
        assert stt.exponent_left == pytest.approx(p.z + math.sqrt(p.mu_sq), abs=1e-12)
        assert stt.physical and stt.norm_constant > 0


def test_reference_ground_state_shape():
    stt = bound_state(REFERENCE, 0)
    assert stt.exponent_left == 0.0
    assert stt.exponent_right == pytest.approx(2.701562118716424, rel=1e-12)
    wf = wavefunction(REFERENCE, stt)
    want = stt.norm_constant * 0.5**0.5 * 0.5**stt.exponent_right
    assert wf.phi_x(0.0) == pytest.approx(want, rel=1e-13)
    assert wf.psi(1.0) == 0.0


@pytest.mark.parametrize("p", [REFERENCE, GENERIC])
def test_wavefunction_nodes_and_sign(p):
    s = np.linspace(1e-4, 1 - 1e-4, 20001)
    for stt in bound_states(p):
        wf = wavefunction(p, stt)
        vals = wf.psi(s)
        signs = np.sign(vals[vals != 0])
        assert np.count_nonzero(signs[1:] != signs[:-1]) == stt.n
        assert jacobi_nodes_count(JacobiParams(stt.n, stt.jacobi_a, stt.jacobi_b)) == stt.n
        assert wf.phi_x(np.array([12.0]))[0] > 0


@pytest.mark.parametrize("p", [REFERENCE, GENERIC])
def test_normalization_and_orthogonality(p):
    wfs = [wavefunction(p, stt) for stt in bound_states(p)]
    gram = np.array([[overlap(p, a, b) for b in wfs] for a in wfs])
    np.testing.assert_allclose(gram, np.eye(len(wfs)), atol=1e-6)


def test_normalization_against_trapezoid():
    wf = wavefunction(REFERENCE, bound_state(REFERENCE, 1))
    x = np.linspace(-60, 40, 200001)
    dens = wf.phi_x(x) ** 2
    assert float(np.sum(dens[1:] + dens[:-1]) * 0.5 * (x[1] - x[0])) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("p", [REFERENCE, GENERIC])
def test_ode_residual(p):
    for stt in bound_states(p):
        assert residual_scan(p, stt) <= 1e-8


def test_physicality_examples():
    assert physicality_check(bound_state(REFERENCE, 0)).physical
    bad = BoundState(n=0, energy=-4.0, case=1, eta=0.5, jacobi_a=2.0, jacobi_b=4.0,
                     exponent_left=-1.0, exponent_right=2.0)
    v = physicality_check(bad)
    assert not v.printed_rule and not v.physical
    mixed = BoundState(n=0, energy=-0.16, case=1, eta=0.5, jacobi_a=0.6, jacobi_b=0.8,
                       exponent_left=0.3, exponent_right=-0.4)
    v = physicality_check(mixed)
    assert v.printed_rule and not v.normalizable and not v.physical
    assert "s -> 1" in v.reason


def test_wavefunction_preconditions():
    stt = bound_state(REFERENCE, 0)
    with pytest.raises(RegimeError):
        wavefunction(REFERENCE.replace(q=0.5), stt)
    bad = BoundState(n=0, energy=-0.16, case=1, eta=0.5, jacobi_a=0.6, jacobi_b=0.8,
                     exponent_left=0.3, exponent_right=-0.4, physical=False, reason="x")
    with pytest.raises(UnphysicalStateError):
        wavefunction(REFERENCE, bad)
    with pytest.raises(QuantumNumberError):
        bound_state(REFERENCE, 3)


def test_psi_derivatives_against_differences():
    wf = Wavefunction(GENERIC, bound_state(GENERIC, 2), norm=1.0)
    s = np.linspace(0.1, 0.9, 9)
    h = 1e-5
    psi, d1, d2 = wf.psi_derivatives(s)
    np.testing.assert_allclose(psi, wf.psi(s), rtol=1e-13)
    np.testing.assert_allclose(d1, (wf.psi(s + h) - wf.psi(s - h)) / (2 * h), rtol=1e-6, atol=1e-8)
    p1 = wf.psi_derivatives(s + h)[1]
    m1 = wf.psi_derivatives(s - h)[1]
    np.testing.assert_allclose(d2, (p1 - m1) / (2 * h), rtol=1e-6, atol=1e-7)


finite = dict(allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(
    V0=st.floats(0.5, 60, **finite),
    lam=st.floats(0.2, 3, **finite),
    q=st.floats(-3, -0.05, **finite),
    beta=st.floats(-2, 2, **finite),
)
def test_eta_invariance_property(V0, lam, q, beta):
    p = ModelParams(V0, lam, q, alpha=-0.5, beta=beta, eta=0.5)
    assume(1 + 4 * p.gamma >= 0)
    n_levels = bound_state_count(p)
    base = [energy_level(p, n) for n in range(n_levels)]
    for eta in (0.0, 0.25, 1.0, 2.0):
        got = [energy_level(p.replace(eta=eta), n) for n in range(n_levels)]
        for a, b in zip(got, base):
            assert a == pytest.approx(b, rel=1e-12)
