"""Semiclassical working-point formulas against independent references."""

import numpy as np
import pytest

from cptsim import steady
from cptsim.params import ConfigError, DegenerateSteadyStateError, SystemParams

import oracles


def random_points(n, seed):
    rng = np.random.default_rng(seed)
    i = 10.0 ** rng.uniform(-2, 3, n)
    db = rng.uniform(-3, 3, n)
    return i, db


# ---------------------------------------------------------------------------
# closed forms


def test_absorption_anchor():
    # I=1, db=1: denominator 4, so A = C/4
    assert steady.absorption(1.0, 1.0, 100.0) == pytest.approx(25.0, rel=1e-14)


def test_phase_anchor_odd_in_detuning():
    i, db = 144.0, 1.0
    p = steady.nonlinear_phase(i, db, 100.0)
    assert p == pytest.approx(oracles.phase_closed(i, db, 100.0), rel=1e-14)
    assert steady.nonlinear_phase(i, -db, 100.0) == pytest.approx(-p, rel=1e-14)


def test_absorption_even_in_detuning():
    a_plus = steady.absorption(7.0, 0.9, 300.0)
    a_minus = steady.absorption(7.0, -0.9, 300.0)
    assert a_plus == pytest.approx(a_minus, rel=1e-15)


def test_closed_forms_random_grid():
    i, db = random_points(4000, seed=20260816)
    for c in (1.0, 100.0, 1000.0):
        a = steady.absorption(i, db, c)
        p = steady.nonlinear_phase(i, db, c)
        np.testing.assert_allclose(a, oracles.absorption_closed(i, db, c), rtol=1e-13)
        np.testing.assert_allclose(p, oracles.phase_closed(i, db, c), rtol=1e-13)


def test_phase_to_loss_ratio_identity():
    # phase/loss = (I - db^2)/db wherever both sides exist
    i, db = random_points(20000, seed=7)
    mask = np.abs(db) > 1e-6
    i, db = i[mask], db[mask]
    lhs = steady.nonlinear_phase(i, db, 42.0) / steady.absorption(i, db, 42.0)
    rhs = steady.figure_of_merit(i, db)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


def test_transparency_point():
    assert steady.absorption(5.0, 0.0, 100.0) == 0.0
    assert steady.nonlinear_phase(5.0, 0.0, 100.0) == 0.0
    assert steady.input_intensity(5.0, 0.0, 100.0, 0.7) == pytest.approx(
        5.0 * (1 + 0.49), rel=1e-14
    )


def test_input_intensity_matches_definition():
    i, db = random_points(500, seed=3)
    c, phi = 250.0, 1.3
    a = steady.absorption(i, db, c)
    p = steady.nonlinear_phase(i, db, c)
    expected = i * ((1 + a) ** 2 + (phi - p) ** 2)
    np.testing.assert_allclose(
        steady.input_intensity(i, db, c, phi), expected, rtol=1e-13
    )


# ---------------------------------------------------------------------------
# Bloch route vs closed forms


def test_bloch_matches_closed_forms():
    rng = np.random.default_rng(11)
    for _ in range(60):
        i = 10.0 ** rng.uniform(-2, 3)
        db = rng.uniform(-3, 3)
        st = steady.bloch_steady_state(np.sqrt(i), db)
        assert st.pop1 == pytest.approx(oracles.ground_population(i, db), abs=1e-12)
        assert st.pop2 == pytest.approx(oracles.ground_population(i, db), abs=1e-12)
        assert st.pope == pytest.approx(oracles.excited_population(i, db), abs=1e-12)
        assert st.j12 == pytest.approx(oracles.ground_coherence(i, db), abs=1e-12)
        assert st.p1 == pytest.approx(oracles.optical_coherence_1(i, db), abs=1e-12)
        assert st.residual < 1e-10


def test_bloch_populations_sum_to_one():
    st = steady.bloch_steady_state(3.0, 0.7)
    assert st.pop1 + st.pop2 + st.pope == pytest.approx(1.0, abs=1e-13)


def test_susceptibility_bridge():
    # loss and phase extracted from the optical coherence reproduce the
    # closed forms: A + i phase = -2iC <|1><e|> / drive
    rng = np.random.default_rng(5)
    for _ in range(40):
        i = 10.0 ** rng.uniform(-2, 3)
        db = rng.uniform(-3, 3)
        c = rng.choice([1.0, 100.0, 1000.0])
        st = steady.bloch_steady_state(np.sqrt(i), db)
        re, im = steady.susceptibility_from_bloch(st, np.sqrt(i), c)
        assert re == pytest.approx(oracles.absorption_closed(i, db, c), abs=1e-9 * c)
        assert im == pytest.approx(oracles.phase_closed(i, db, c), abs=1e-9 * c)


def test_degenerate_dark_manifold_raises():
    with pytest.raises(DegenerateSteadyStateError):
        steady.bloch_steady_state(0.0, 0.0, gamma0=0.0)


def test_exchange_rate_regularizes_zero_drive():
    st = steady.bloch_steady_state(0.0, 0.0, gamma0=1e-3)
    assert st.pop1 == pytest.approx(0.5, abs=1e-10)
    assert st.pope == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# derived quantities


def test_threshold_anchor():
    assert steady.threshold_delta(144.0, 100.0, 1.0) == pytest.approx(
        np.sqrt(2.0) * 1.44, rel=1e-12
    )


def test_threshold_rejects_zero_cooperativity():
    with pytest.raises(ConfigError):
        steady.threshold_delta(1.0, 0.0, 1.0)


def test_asymptotics_approach_closed_forms():
    db, c = 0.5, 800.0
    for i in (1e3, 1e4, 1e5):
        a_full = steady.absorption(i, db, c)
        p_full = steady.nonlinear_phase(i, db, c)
        a_asym, p_asym = steady.asymptotic_cpt(i, db, c)
        assert abs(a_full - a_asym) / a_full < 10.0 / i
        assert abs(p_full - p_asym) / abs(p_full) < 10.0 / i


def test_kerr_reference_values():
    a, p = steady.kerr_two_level(100.0, 2.0, 10.0)
    assert a == pytest.approx(0.5, rel=1e-14)
    assert p == pytest.approx(0.2, rel=1e-14)


def test_figure_of_merit_beats_kerr_scaling():
    # near the dark resonance the phase-to-loss ratio is (I - db^2)/db,
    # which grows with intensity; a Kerr medium is pinned to I/Delta
    i, db = 100.0, 0.5
    ratio_dark = steady.figure_of_merit(i, db)
    a_k, p_k = steady.kerr_two_level(100.0, i, 10.0)
    assert ratio_dark > p_k / a_k


def test_reflectivity_anchor():
    r = steady.reflectivity(1.0, 1.0, 100.0, 0.0)
    assert np.real(r) == pytest.approx(-24.0 / 26.0, rel=1e-12)
    assert np.imag(r) == pytest.approx(0.0, abs=1e-14)


def test_reflectivity_transparency_is_unity():
    assert steady.reflectivity(3.0, 0.0, 100.0, 0.0) == pytest.approx(1.0 + 0j)


def test_reflectivity_modes_conjugate():
    r1 = steady.reflectivity(2.0, 0.8, 50.0, 1.2, mode=1)
    r2 = steady.reflectivity(2.0, 0.8, 50.0, 1.2, mode=2)
    assert r2 == pytest.approx(np.conj(r1), rel=1e-14)


def test_mean_spin_first_order():
    jx, jy, jz = steady.mean_spin(144.0, 1.0, 1000)
    assert jx == pytest.approx(-500.0, rel=1e-12)
    assert jy == pytest.approx(500.0 / 144.0, rel=1e-12)
    assert jz == 0.0


def test_operating_point_flags():
    p = SystemParams(C=100.0, kappa=2.0, phi=1.0, delta_bar=1.0)
    op = steady.operating_point(p, 144.0)
    assert op.stable
    assert op.delta_s == pytest.approx(np.sqrt(2) * 1.44, rel=1e-12)
    p2 = SystemParams(C=100.0, kappa=2.0, phi=1.0, delta_bar=2.5)
    assert not steady.operating_point(p2, 144.0).stable


def test_operating_point_zero_cooperativity_always_stable():
    p = SystemParams(C=0.0, kappa=2.0, phi=1.0, delta_bar=2.0)
    op = steady.operating_point(p, 144.0)
    assert op.stable
    assert op.absorption == 0.0


# ---------------------------------------------------------------------------
# branch solving


def test_solve_branches_round_trip():
    c, phi = 100.0, 0.5
    rng = np.random.default_rng(23)
    for _ in range(25):
        db = rng.uniform(-2, 2)
        i_in = 10.0 ** rng.uniform(-1, 4)
        branches = steady.solve_branches(i_in, db, c, phi)
        assert branches, "no intracavity solution found"
        for i_sol, _ in branches:
            back = steady.input_intensity(i_sol, db, c, phi)
            assert back == pytest.approx(i_in, rel=1e-8)


def test_solve_branches_transparency_linear():
    # at zero detuning the medium is transparent: I = I_in/(1+phi^2)
    branches = steady.solve_branches(10.0, 0.0, 100.0, 1.0)
    assert len(branches) == 1
    i_sol, stable = branches[0]
    assert i_sol == pytest.approx(5.0, rel=1e-10)
    assert stable


def test_solve_branches_multistable_region():
    # strong cooperativity at moderate detuning folds the response
    found = 0
    for i_in in np.geomspace(1.0, 1e5, 120):
        n = len(steady.solve_branches(i_in, 1.0, 100.0, 0.0))
        found = max(found, n)
    assert found >= 3


def test_solve_branches_zero_input():
    assert steady.solve_branches(0.0, 1.0, 100.0, 0.0) == [(0.0, True)]
