import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from epqed.dynamics import (amplitude_evolve, concurrence_phase_scan,
                            concurrence_series, excited_qubit_state,
                            late_decay_rate, max_concurrence,
                            rabi_peak_envelope, steady_populations_analytic,
                            trapped_population)
from epqed.errors import RateUndefinedError
from epqed.hilbert import SpaceLayout, cavity_ops, product_ket, qubit_lowering
from epqed.master import DensityMatrix, build_liouvillian, evolve
from epqed.params import ModelParams
from epqed.spectra import delta_omega_bic, delta_phi_bic


def ep(delta_phi, **kw):
    merged = dict(g=10.0, kappa=20.0, gamma=1.0)
    merged.update(kw)
    return ModelParams.from_delta_phi(delta_phi, **merged)


def test_decoupled_emitter_decays_freely():
    p = ModelParams(g=0.0, kappa=20.0, gamma=1.0, r_abs=0.0)
    t = np.linspace(0.0, 4.0, 41)
    series = amplitude_evolve(p, excited_qubit_state(1), t)
    assert_allclose(np.abs(series.amplitudes[:, 2]), np.exp(-t / 2), atol=1e-10)
    assert_allclose(series.qubit(), np.exp(-t), atol=1e-10)


def test_peak_transfer_population():
    # mirror phase pi more than triples the right-mode peak occupation
    t = np.linspace(0.0, 1.5, 3001)
    series = amplitude_evolve(ep(np.pi), excited_qubit_state(1), t)
    assert series.cavity_R.max() == pytest.approx(0.66, abs=0.02)
    dp = amplitude_evolve(ep(np.pi, r_abs=0.0), excited_qubit_state(1), t)
    assert series.cavity_R.max() > 3 * dp.cavity_R.max()


def test_matches_full_master_equation():
    p = ep(np.pi)
    t = np.linspace(0.0, 1.0, 21)
    amp = amplitude_evolve(p, excited_qubit_state(1), t, step=5e-5)
    lay = SpaceLayout(1, 2)
    lv = build_liouvillian(p, lay)
    rho0 = DensityMatrix.from_ket(product_ket(lay, (1,), 0, 0))
    run = evolve(lv, rho0, t, step=5e-5)
    c_l, c_r = cavity_ops(lay)
    sm = qubit_lowering(lay, 0)
    assert np.abs(run.expect(sm.conj().T @ sm).real - amp.qubit()).max() < 1e-8
    assert np.abs(run.expect(c_l.conj().T @ c_l).real - amp.cavity_L).max() < 1e-8
    assert np.abs(run.expect(c_r.conj().T @ c_r).real - amp.cavity_R).max() < 1e-8


def test_norm_bookkeeping():
    t = np.linspace(0.0, 2.0, 101)
    ideal = amplitude_evolve(ep(1.3, gamma=0.0), excited_qubit_state(1), t)
    assert np.abs(ideal.populations.sum(axis=1) + ideal.leaked_kappa - 1.0).max() <= 1e-8
    assert np.abs(ideal.leaked_gamma).max() == 0.0
    lossy = amplitude_evolve(ep(1.3), excited_qubit_state(1), t)
    assert np.abs(lossy.total - 1.0).max() <= 1e-8
    assert lossy.leaked_gamma[-1] > 0.0


def test_populations_depend_only_on_phase_difference():
    t = np.linspace(0.0, 1.0, 11)
    ref = amplitude_evolve(ep(0.8), excited_qubit_state(1), t)
    shifted = ModelParams(g=10.0, kappa=20.0, gamma=1.0,
                          phi_prop=0.8 + 2 * 1.7, phi_azim=1.7)
    got = amplitude_evolve(shifted, excited_qubit_state(1), t)
    assert_allclose(got.populations, ref.populations, atol=1e-10)


# ---------------------------------------------------------------------------
# trapping and closed-form steady populations
# ---------------------------------------------------------------------------

def test_closed_form_example():
    p_e, p_c, p_k = steady_populations_analytic(20.0, 20.0)
    assert p_e == pytest.approx(0.012346, abs=1e-6)
    assert p_c == pytest.approx(0.098765, abs=1e-6)
    assert p_k == pytest.approx(0.888889, abs=1e-6)


def test_closed_form_weak_coupling_limit():
    p_e, p_c, p_k = steady_populations_analytic(1e-8, 20.0)
    assert p_e == pytest.approx(1.0, abs=1e-12)
    assert p_c == pytest.approx(0.0, abs=1e-12)
    assert p_k == pytest.approx(0.0, abs=1e-12)


@given(g=st.floats(0.1, 100.0), kappa=st.floats(0.1, 100.0))
@settings(max_examples=100)
def test_closed_form_sums_to_one(g, kappa):
    assert sum(steady_populations_analytic(g, kappa)) == pytest.approx(1.0, abs=1e-12)


def test_closed_form_sum_is_algebraic_identity():
    for g, kappa in ((Fraction(3, 2), Fraction(7, 3)), (Fraction(20), Fraction(20))):
        denom = 8 * g * g + kappa * kappa
        total = kappa**4 / denom**2 + 8 * g**2 * kappa**2 / denom**2 + 8 * g**2 / denom
        assert total == 1


def test_trapped_population_matches_closed_form():
    for g in (10.0, 20.0, 40.0):
        p = ModelParams.from_delta_phi(0.0, g=g, kappa=20.0, gamma=0.0)
        plat = trapped_population(p)
        p_e, p_c, _ = steady_populations_analytic(g, 20.0)
        assert plat.converged
        assert plat.qubit == pytest.approx(p_e, abs=1e-3)
        assert plat.cavity == pytest.approx(p_c, abs=1e-3)


def test_reference_cavity_traps_nothing():
    p = ModelParams.from_delta_phi(0.0, g=20.0, kappa=20.0, gamma=0.0, r_abs=0.0)
    plat = trapped_population(p)
    assert plat.converged
    assert plat.components.max() < 1e-8


def test_bic_reverses_population_distribution():
    g = kappa = 20.0
    dphi = delta_phi_bic(g, kappa)
    p = ModelParams.from_delta_phi(dphi, g=g, kappa=kappa, gamma=0.0)
    plat = trapped_population(p)
    assert plat.qubit > plat.components[0]
    assert plat.qubit > plat.components[1]
    zero_phase = trapped_population(ModelParams.from_delta_phi(
        0.0, g=g, kappa=kappa, gamma=0.0))
    assert plat.qubit > zero_phase.qubit


def test_trapping_requires_ideal_emitter():
    with pytest.raises(ValueError):
        trapped_population(ep(0.0))


def test_bound_state_detuning_plateau():
    g, kappa = 10.0, 20.0
    dphi = np.pi / 2
    d0c = delta_omega_bic(g, kappa, dphi)
    p = ModelParams.from_delta_phi(dphi, g=g, kappa=kappa, gamma=0.0, omega0=d0c)
    plat = trapped_population(p)
    assert plat.components.sum() > 0.05
    dp = trapped_population(p.replace(r_abs=0.0))
    assert dp.components.max() < 1e-8


def test_ep_transparency_dynamics():
    # cooperativity 0.2: the emitter decays as if the cavity were absent
    gamma, g = 1.0, 1.0
    kappa = 8.0 * g * g / (0.2 * gamma)
    p = ModelParams.from_delta_phi(0.0, g=g, kappa=kappa, gamma=gamma)
    t = np.linspace(0.0, 5.0, 501)
    series = amplitude_evolve(p, excited_qubit_state(1), t)
    assert np.abs(series.qubit() - np.exp(-gamma * t)).max() < 0.01


# ---------------------------------------------------------------------------
# two-qubit concurrence
# ---------------------------------------------------------------------------

def test_concurrence_starts_at_zero():
    p = ep(np.pi, g=100.0)
    c = concurrence_series(p, np.linspace(0.0, 0.01, 5))
    assert c[0] == 0.0


def test_resonant_concurrence_bounded_by_half():
    p = ep(np.pi, g=100.0)
    c_max = max_concurrence(p, np.linspace(0.0, 0.5, 5001))
    assert c_max <= 0.5 + 1e-6
    assert c_max > 0.4


def test_phase_scan_prefers_equal_phases():
    p = ep(np.pi, g=100.0, omega0=232.0)
    t = np.linspace(0.0, 0.1, 2001)
    scan = concurrence_phase_scan(p, t, [0.0, np.pi / 3, 2 * np.pi / 3])
    assert scan[0] == max(scan)
    assert scan.shape == (3,)


def test_late_decay_rate_pure_exponential():
    t = np.linspace(0.0, 5.0, 200)
    assert late_decay_rate(t, np.exp(-3.0 * t), (1.0, 4.0)) == pytest.approx(3.0)


def test_late_decay_rate_rejects_nonpositive():
    t = np.linspace(0.0, 5.0, 50)
    y = np.exp(-t)
    y[30] = 0.0
    with pytest.raises(RateUndefinedError):
        late_decay_rate(t, y, (0.0, 5.0))
    with pytest.raises(RateUndefinedError):
        late_decay_rate(t, y, (4.9, 4.95))


def test_dp_concurrence_decays_at_gamma():
    p = ModelParams(g=100.0, kappa=20.0, gamma=1.0, r_abs=0.0)
    t = np.linspace(0.0, 10.0, 2001)
    c = concurrence_series(p, t)
    rate = late_decay_rate(t, c, (3.0, 10.0))
    assert rate == pytest.approx(1.0, rel=0.1)


def test_rabi_peak_envelope():
    t = np.linspace(0.0, 10.0, 1001)
    y = np.exp(-0.1 * t) * np.cos(4.0 * t) ** 2
    pk_t, pk_v = rabi_peak_envelope(t, y, (2.0, 8.0))
    assert len(pk_t) >= 6
    assert_allclose(pk_v, np.exp(-0.1 * pk_t), rtol=1e-3)
