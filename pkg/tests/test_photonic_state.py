import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from emitter_energetics import photonic_state as ps
from emitter_energetics.errors import DegenerateStateError, InvalidArgumentError
from emitter_energetics.timegrid import default_grid, integrate, SampledAmplitude

GRID = default_grid(1.0)


def state(theta=math.pi / 2, gamma=1.0, gamma_star=0.0, offset=0.0, alpha=0.0, grid=None):
    params = ps.EmitterParams(gamma, gamma_star, diffusion=ps.DiffusionDist("delta", offset))
    return ps.build_state(theta, alpha, params, grid or default_grid(gamma))


def test_ideal_wavefunction_values():
    f = ps.ideal_wavefunction(ps.EmitterParams(1.0), GRID)
    assert f.values[0] == pytest.approx(1.0)
    norm = integrate(SampledAmplitude(GRID, np.abs(f.values) ** 2)).real
    assert norm == pytest.approx(1.0, abs=1e-5)


def test_ideal_wavefunction_gamma_two():
    g = default_grid(2.0, 2001)
    f = ps.ideal_wavefunction(ps.EmitterParams(2.0), g)
    i = int(np.argmin(np.abs(g.points - 1.0)))
    assert g.points[i] == pytest.approx(1.0)
    assert abs(f.values[i]) == pytest.approx(math.sqrt(2) * math.exp(-1), abs=1e-4)


def test_params_validation():
    with pytest.raises(InvalidArgumentError):
        ps.EmitterParams(0.0)
    with pytest.raises(InvalidArgumentError):
        ps.EmitterParams(1.0, gamma_star=-0.1)
    with pytest.raises(InvalidArgumentError):
        ps.DiffusionDist("cauchy")
    with pytest.raises(InvalidArgumentError):
        ps.DiffusionDist("gaussian", sigma=-1.0)


def test_build_state_full_inversion():
    s = state(math.pi)
    assert s.p0 == pytest.approx(0.0, abs=1e-15)
    assert s.p1 == pytest.approx(1.0)


def test_build_state_rejects_pulse_area():
    with pytest.raises(InvalidArgumentError):
        state(-0.1)
    with pytest.raises(InvalidArgumentError):
        state(3.2)


def test_state_invariants():
    s = state(1.1, gamma_star=0.3)
    assert s.p0 + s.p1 == pytest.approx(1.0, abs=1e-15)
    assert s.xi.is_hermitian(0.0)
    trace = integrate(s.xi.diagonal()).real
    assert trace == pytest.approx(1.0, abs=1e-5)
    assert ps.number_purity(s) <= math.sqrt(ps.indistinguishability(s)) + 1e-9


def test_no_dephasing_is_pure():
    s = state()
    assert ps.number_purity(s) == pytest.approx(1.0, abs=1e-5)
    assert ps.indistinguishability(s) == pytest.approx(1.0, abs=1e-5)


def test_dephased_purities_match_closed_form():
    s = state(gamma_star=0.5)
    assert ps.number_purity(s) == pytest.approx(0.5, abs=1e-5)
    assert ps.indistinguishability(s) == pytest.approx(0.5, abs=1e-5)


def test_indistinguishability_near_reference_value():
    # gamma* chosen so that M_s = 0.925
    assert ps.indistinguishability(state(gamma_star=0.04054)) == pytest.approx(0.925, abs=2e-3)


@pytest.mark.parametrize("gs", [0.0, 0.2, 1.0, 3.0])
def test_number_purity_equals_indistinguishability(gs):
    s = state(gamma_star=gs)
    assert ps.number_purity(s) == pytest.approx(ps.indistinguishability(s), abs=1e-5)


def test_total_purity_cases():
    assert ps.total_purity(state(math.pi)) == pytest.approx(1.0, abs=1e-5)
    assert ps.total_purity(state()) == pytest.approx(1.0, abs=1e-5)
    assert ps.purity_from_parts(0.5, 0.5, 0.5, 0.5) == pytest.approx(0.625)


def test_closed_form_values():
    assert ps.ms_closed_form(1, 0, 0) == 1.0
    assert ps.ms_closed_form(1, 0.5, 0) == pytest.approx(0.5)
    assert ps.ms_closed_form(1, 0, 1) == pytest.approx(0.5)
    assert ps.c_closed_form(1, 0, 0) == 1.0
    assert ps.c_closed_form(1, 0.5, 0) == pytest.approx(0.5)
    assert ps.c_closed_form(2, 0.3, 0.4) == ps.ms_closed_form(2, 0.3, 0.4)
    assert ps.mfc_closed_form(1, 0, 0) == 1.0
    assert ps.mfc_closed_form(1, 0.5, 0) == pytest.approx(1.5 / 2.25)
    assert ps.mfc_closed_form(1, 1, 0) == pytest.approx(0.5)


def test_closed_form_rejects_bad_rates():
    with pytest.raises(InvalidArgumentError):
        ps.ms_closed_form(0.0, 0.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        ps.mfc_closed_form(1.0, -1.0, 0.0)


def test_c_closed_form_against_scipy_integral():
    # Re of the integral of zeta_a zeta_b^* for copies detuned by dw
    g, gs, dw = 1.3, 0.4, 0.9
    re = quad(lambda t: g * math.exp(-(g + 2 * gs) * t) * math.cos(dw * t), 0, 80, limit=200)[0]
    assert ps.c_closed_form(g, gs, dw) == pytest.approx(re, rel=1e-8)


def test_mfc_closed_form_against_scipy_integral():
    # Re of sqrt-envelope classical density times the dephased, detuned one-photon density;
    # symmetric in (t, u), so twice the lower triangle
    from scipy.integrate import dblquad

    g, gs, dw = 1.3, 0.4, 0.9
    f = lambda u, t: g * g * math.exp(-g * (t + u) - gs * (t - u)) * math.cos(dw * (t - u))
    half = dblquad(f, 0, 40, lambda t: 0.0, lambda t: t, epsabs=1e-12)[0]
    assert ps.mfc_closed_form(g, gs, dw) == pytest.approx(2 * half, rel=1e-7)


@pytest.mark.parametrize("gamma,gs,dw", [(1.0, 0.0, 1.0), (2.0, 0.3, 0.4), (0.5, 1.0, 2.0), (4.0, 0.1, 4.0)])
def test_frequency_shifted_overlaps_match_closed_forms(gamma, gs, dw):
    a = state(gamma=gamma, gamma_star=gs)
    b = state(gamma=gamma, gamma_star=gs, offset=dw)
    assert ps.wavepacket_overlap(a, b) == pytest.approx(ps.ms_closed_form(gamma, gs, dw), rel=1e-5)
    assert ps.coherence_overlap(a, b) == pytest.approx(ps.c_closed_form(gamma, gs, dw), rel=1e-5)


@pytest.mark.parametrize("gamma,gs,dw", [(1.0, 0.5, 0.0), (2.0, 0.3, 0.4), (8.0, 2.0, 4.0)])
def test_fc_overlap_matches_closed_form(gamma, gs, dw):
    s = state(gamma=gamma, gamma_star=gs, offset=dw)
    c = ps.matched_classical_field(s)
    assert ps.fc_overlap(s, c) == pytest.approx(ps.mfc_closed_form(gamma, gs, dw), rel=1e-5)


def test_fc_coherence_no_dephasing_is_one():
    s = state()
    assert ps.fc_coherence(s, ps.matched_classical_field(s)) == pytest.approx(1.0, abs=1e-5)


def test_matched_classical_field_intensity():
    assert ps.matched_classical_field(state()).mu_c == pytest.approx(0.5, abs=1e-5)
    assert ps.matched_classical_field(state(math.pi)).mu_c == pytest.approx(1.0, abs=1e-5)
    with pytest.raises(DegenerateStateError):
        ps.matched_classical_field(state(0.0))


def test_fields_report_nominal_g2():
    s = state()
    assert s.g2 == 0.0
    assert ps.matched_classical_field(s).g2 == 1.0


def test_alpha_is_a_global_phase_of_zeta():
    a = state(alpha=0.0, gamma_star=0.2)
    b = state(alpha=1.234, gamma_star=0.2)
    np.testing.assert_allclose(b.zeta.values, a.zeta.values * np.exp(1.234j), atol=1e-15)
    for f in (ps.indistinguishability, ps.number_purity, ps.total_purity):
        assert abs(f(a) - f(b)) < 1e-12


def test_average_over_diffusion_delta():
    f = lambda d: ps.ms_closed_form(1.0, 0.0, d)
    assert ps.average_over_diffusion(f, ps.DiffusionDist()) == 1.0


def test_average_over_diffusion_narrow_gaussian():
    f = lambda d: 1.0 / (1.0 + d * d)
    got = ps.average_over_diffusion(f, ps.DiffusionDist("gaussian", 0.0, 1e-6))
    assert got == pytest.approx(1.0, abs=1e-6)


def test_average_over_diffusion_lorentzian():
    # independent oracle: adaptive quadrature of f times the normal density
    f = lambda d: 1.0 / (1.0 + d * d)
    pdf = lambda d: math.exp(-0.5 * d * d) / math.sqrt(2 * math.pi)
    exact = quad(lambda d: f(d) * pdf(d), -np.inf, np.inf, epsabs=1e-13)[0]
    got = ps.average_over_diffusion(f, ps.DiffusionDist("gaussian", 0.0, 1.0))
    assert exact == pytest.approx(0.6557, abs=1e-4)
    assert got == pytest.approx(exact, abs=1e-8)


def test_average_over_diffusion_requires_nodes():
    with pytest.raises(InvalidArgumentError):
        ps.average_over_diffusion(lambda d: d, ps.DiffusionDist("gaussian", 0, 1), n_nodes=8)


def test_ms_closed_form_monotone():
    gs = np.linspace(0, 3, 31)
    vals = [ps.ms_closed_form(1.0, g, 0.3) for g in gs]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    dws = np.linspace(0, 3, 31)
    vals = [ps.ms_closed_form(1.0, 0.2, d) for d in dws]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 10), st.floats(0, 10), st.floats(-10, 10))
def test_mfc_at_least_ms_unless_detuning_dominates(gamma, gs, dw):
    # a/(a^2+d^2) >= b/(b^2+d^2) for a < b exactly when a*b >= d^2
    mfc = ps.mfc_closed_form(gamma, gs, dw)
    ms = ps.ms_closed_form(gamma, gs, dw)
    ab = (gamma + gs) * (gamma + 2 * gs)
    if ab >= dw * dw * (1 + 1e-9):
        assert mfc >= ms - 1e-15
    elif ab <= dw * dw * (1 - 1e-9) and gs > 1e-6:
        assert mfc < ms


def test_mfc_at_least_ms_without_detuning():
    for gs in np.linspace(0, 5, 51):
        assert ps.mfc_closed_form(1.0, gs, 0.0) >= ps.ms_closed_form(1.0, gs, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 10), st.floats(0, 10), st.floats(-10, 10))
def test_ms_is_one_only_without_broadening(gamma, gs, dw):
    m = ps.ms_closed_form(gamma, gs, dw)
    assert 0.0 < m <= 1.0
    if gs > 1e-6 * gamma or abs(dw) > 1e-3 * gamma:
        assert m < 1.0
