"""Scenario configuration, time series, and attractor-time refinement."""

import math

import numpy as np
import pytest

from tavis_sim.dynamics import (ScenarioConfig, TimeSeries,
                                characteristic_times, locate_attractor_time,
                                prepare_initial, simulate)
from tavis_sim.errors import TruncationError
from tavis_sim.hilbert import QubitRegisterState, fidelity, reduce_to_qubits
from tavis_sim.model import ModelParams, evolve
from tavis_sim.states import BasinParams, CoherentParams, attractor_state

NBAR = 10.0
FOCK_DIM = 60  # comfortable margin for nbar = 10


def small_config(**overrides):
    """Two-qubit edge-of-basin scenario at modest photon number."""
    defaults = dict(
        model=ModelParams(num_qubits=2, fock_dim=FOCK_DIM),
        coherent=CoherentParams(nbar=NBAR, theta=0.0, fock_dim=FOCK_DIM),
        initial_qubits={"family": "basin", "a": [1.0 / math.sqrt(2.0), 0.0]},
        samples=200,
    )
    defaults.update(overrides)
    return ScenarioConfig(**defaults)


def test_characteristic_times_closed_form():
    t_c, t_r = characteristic_times(50.0, 1.0)
    assert t_c == pytest.approx(math.sqrt(2.0))
    assert t_r == pytest.approx(2.0 * math.pi * math.sqrt(50.0))
    # coupling rescales both
    t_c2, t_r2 = characteristic_times(50.0, 2.0)
    assert t_c2 == pytest.approx(t_c / 2.0)
    assert t_r2 == pytest.approx(t_r / 2.0)
    with pytest.raises(ValueError):
        characteristic_times(0.0, 1.0)
    with pytest.raises(ValueError):
        characteristic_times(50.0, 0.0)


def test_scenario_validation():
    with pytest.raises(ValueError):
        small_config(samples=1)
    with pytest.raises(ValueError):
        small_config(observables=("p_initial", "does_not_exist"))
    with pytest.raises(ValueError):
        small_config(attractor_sign=0)
    with pytest.raises(ValueError):  # fock_dim mismatch between model and field
        small_config(coherent=CoherentParams(nbar=NBAR, theta=0.0, fock_dim=61))
    with pytest.raises(ValueError):  # mixed_tangle needs exactly two qubits
        ScenarioConfig(
            model=ModelParams(num_qubits=1, fock_dim=FOCK_DIM),
            coherent=CoherentParams(nbar=NBAR, theta=0.0, fock_dim=FOCK_DIM),
            observables=("mixed_tangle",),
        )


def test_initial_family_resolution():
    config = small_config(initial_qubits={"family": "configuration", "config": "eg"})
    register = config.resolve_initial_qubits()
    assert abs(register.amplitudes[0b10]) == pytest.approx(1.0)

    config = small_config(initial_qubits={"family": "dicke", "k": 1})
    register = config.resolve_initial_qubits()
    assert abs(register.amplitudes[0b01]) == pytest.approx(1.0 / math.sqrt(2.0))

    config = small_config(initial_qubits={"family": "attractor"})
    register = config.resolve_initial_qubits()
    expected = attractor_state(2, config.coherent.theta, 1)
    assert np.max(np.abs(register.amplitudes - expected.amplitudes)) < 1e-12

    config = small_config(initial_qubits=None)
    register = config.resolve_initial_qubits()
    assert abs(register.amplitudes[0]) == pytest.approx(1.0)

    raw = QubitRegisterState(np.array([0.0, 0.0, 0.0, 1.0]), 2)
    config = small_config(initial_qubits=raw)
    assert config.resolve_initial_qubits() is raw


def test_basin_theta_defaults_to_field_phase():
    theta = 1.1
    config = small_config(
        coherent=CoherentParams(nbar=NBAR, theta=theta, fock_dim=FOCK_DIM),
        initial_qubits={"family": "basin", "a": [0.3, 0.1]},
    )
    register = config.resolve_initial_qubits()
    from tavis_sim.states import basin_state
    expected = basin_state(BasinParams(num_qubits=2, a=0.3 + 0.1j, theta=theta))
    assert np.max(np.abs(register.amplitudes - expected.amplitudes)) < 1e-12


def test_simulate_grid_and_columns():
    config = small_config(
        observables=("p_initial", "p_attractor", "entropy", "mixed_tangle",
                     "field_purity"),
        t_max_over_tr=0.5,
    )
    series = simulate(config)
    _, t_r = characteristic_times(NBAR, 1.0)
    assert series.times.size == config.samples
    assert series.times[0] == 0.0
    assert series.times[-1] == pytest.approx(0.5 * t_r)
    assert series.revival_time == pytest.approx(t_r)
    assert set(series.columns) == {"p_initial", "p_attractor_plus", "entropy",
                                   "mixed_tangle", "field_purity"}
    # probability-like columns stay in [0, 1]
    for name in ("p_initial", "p_attractor_plus", "mixed_tangle", "field_purity"):
        col = series.column(name)
        assert col.min() >= -1e-9 and col.max() <= 1.0 + 1e-9
    assert series.column("entropy").min() >= -1e-9


def test_simulate_initial_values():
    config = small_config(track_config="gg")
    series = simulate(config)
    # the edge basin member has |<gg|psi>|^2 = 1/2 at t = 0
    assert series.column("p_initial")[0] == pytest.approx(0.5, abs=1e-10)
    assert series.column("entropy")[0] == pytest.approx(0.0, abs=1e-8)


def test_simulate_matches_direct_evolution():
    config = small_config(samples=50, t_max_over_tr=0.3)
    series = simulate(config)
    blocks, psi0, _, t_r = prepare_initial(config)
    attractor = attractor_state(2, 0.0, 1)
    for j in (0, 17, 49):
        state = evolve(psi0, float(series.times[j]), blocks)
        rho_q = reduce_to_qubits(state)
        assert series.column("p_attractor_plus")[j] == pytest.approx(
            fidelity(attractor, rho_q), abs=1e-10)


def test_attractor_sign_selects_branch():
    config = small_config(attractor_sign=-1)
    series = simulate(config)
    assert "p_attractor_minus" in series.columns


def test_field_purity_equals_register_purity():
    config = small_config(observables=("field_purity",), samples=30,
                          t_max_over_tr=0.2)
    series = simulate(config)
    blocks, psi0, _, t_r = prepare_initial(config)
    state = evolve(psi0, float(series.times[11]), blocks)
    assert series.column("field_purity")[11] == pytest.approx(
        reduce_to_qubits(state).purity(), abs=1e-10)


def test_truncation_guard_on_initial_state():
    # nbar close enough to the truncation edge that the coherent tail fails
    with pytest.raises(TruncationError):
        ScenarioConfig(
            model=ModelParams(num_qubits=1, fock_dim=12),
            coherent=CoherentParams(nbar=10.0, theta=0.0, fock_dim=12),
        )


def test_locate_attractor_time_refines_beyond_grid():
    config = small_config(samples=400)
    _, t_r = characteristic_times(NBAR, 1.0)
    t_star, f_star = locate_attractor_time(config, (0.15 * t_r, 0.35 * t_r))
    # two-qubit attractor crossing sits near t_r/4
    assert abs(t_star - 0.25 * t_r) < 0.05 * t_r
    # the refined value can only improve on the best grid sample
    blocks, psi0, _, _ = prepare_initial(config)
    attractor = attractor_state(2, 0.0, 1)
    grid = np.linspace(0.15 * t_r, 0.35 * t_r, 400)
    best_grid = max(
        fidelity(attractor, reduce_to_qubits(evolve(psi0, float(t), blocks)))
        for t in grid)
    assert f_star >= best_grid - 1e-12


def test_locate_attractor_time_window_validation():
    config = small_config()
    _, t_r = characteristic_times(NBAR, 1.0)
    with pytest.raises(ValueError):
        locate_attractor_time(config, (0.5 * t_r, 0.4 * t_r))
    with pytest.raises(ValueError):
        locate_attractor_time(config, (-1.0, 0.4 * t_r))


def test_timeseries_validation():
    times = np.array([0.0, 1.0, 2.0])
    good = {"p_initial": np.array([0.1, 0.2, 0.3])}
    config = small_config()
    TimeSeries(times=times, columns=good, revival_time=1.0, config=config)
    with pytest.raises(ValueError):
        TimeSeries(times=np.array([0.0, 2.0, 1.0]), columns=good,
                   revival_time=1.0, config=config)
    with pytest.raises(ValueError):
        TimeSeries(times=times,
                   columns={"p_initial": np.array([0.1, 1.5, 0.3])},
                   revival_time=1.0, config=config)
