"""Scenario orchestration: timescales, trajectories, attractor-time search.

A scenario couples a register initial state with a coherent field of mean
photon number nbar and evolves exactly via the excitation-block
eigendecomposition.  Times are managed in units of the revival time
t_r = 2 pi sqrt(nbar)/lambda; the collapse time is t_c = sqrt(2)/lambda.

Observables are evaluated pointwise on exactly propagated states (no
integrator), so refining the time grid never changes values at shared
sample times and two runs of the same config are bitwise identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationError
from .hilbert import (PureState, QubitRegisterState, compose_state,
                      configuration_index, fidelity, reduce_to_qubits)
from .model import (ModelParams, build_blocks, boundary_occupancy, evolve,
                    evolve_many)
from .observables import (configuration_probability, mixed_tangle,
                          von_neumann_entropy)
from .states import (BasinParams, CoherentParams, attractor_state, basin_state,
                     coherent_field, dicke_state)

__all__ = [
    "ScenarioConfig",
    "TimeSeries",
    "characteristic_times",
    "prepare_initial",
    "simulate",
    "locate_attractor_time",
    "OBSERVABLE_NAMES",
]

#: observables simulate() knows how to compute
OBSERVABLE_NAMES = ("p_initial", "p_attractor", "entropy", "mixed_tangle",
                    "field_purity")

#: maximum initial probability allowed in truncation-boundary blocks
BOUNDARY_OCCUPANCY_TOL = 1e-8

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def characteristic_times(nbar: float, coupling: float):
    """Collapse and revival timescales (t_c, t_r).

    t_c = sqrt(2)/lambda and t_r = 2 pi sqrt(nbar)/lambda.
    """
    if nbar <= 0:
        raise ValueError("nbar must be positive")
    if coupling <= 0:
        raise ValueError("coupling must be positive")
    return math.sqrt(2.0) / coupling, 2.0 * math.pi * math.sqrt(nbar) / coupling


def _as_complex(value) -> complex:
    """Accept a number or an [re, im] pair (the JSON encoding of a complex)."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex value needs [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


@dataclass(frozen=True)
class ScenarioConfig:
    """Full specification of one simulation run.

    Parameters
    ----------
    model : ModelParams
    coherent : CoherentParams
        Must agree with ``model.fock_dim``.
    initial_qubits : QubitRegisterState or dict
        Either an explicit register state or a named-family specifier
        such as ``{"family": "basin", "a": [0.5, 0.0]}``,
        ``{"family": "attractor", "sign": "+"}``, ``{"family": "dicke",
        "k": 1}``, ``{"family": "configuration", "config": "gg"}`` or
        ``{"family": "raw", "amplitudes": [[re, im], ...]}``.  Family
        constructors inherit theta from the coherent field unless the
        specifier overrides it.
    t_max_over_tr : float
        Time horizon in units of the revival time.
    samples : int
        Number of equally spaced sample times including t = 0.
    observables : tuple of str
        Any of ``p_initial``, ``p_attractor``, ``entropy``,
        ``mixed_tangle`` (two qubits only), ``field_purity``.
    attractor_sign : int
        Branch (+1 or -1) used for the attractor-fidelity observable.
    track_config : int or str
        Configuration whose probability the ``p_initial`` column reports
        (default: all qubits in the ground state).
    """

    model: ModelParams
    coherent: CoherentParams
    initial_qubits: object = None
    t_max_over_tr: float = 1.1
    samples: int = 2000
    observables: tuple = ("p_initial", "p_attractor", "entropy")
    attractor_sign: int = 1
    track_config: object = 0

    def __post_init__(self):
        object.__setattr__(self, "observables", tuple(self.observables))
        if self.model.fock_dim != self.coherent.fock_dim:
            raise ValueError(
                f"model.fock_dim {self.model.fock_dim} != "
                f"coherent.fock_dim {self.coherent.fock_dim}"
            )
        if self.t_max_over_tr <= 0:
            raise ValueError("t_max_over_tr must be positive")
        if self.samples < 2:
            raise ValueError("samples must be at least 2")
        unknown = [n for n in self.observables if n not in OBSERVABLE_NAMES]
        if unknown:
            raise ValueError(f"unknown observables {unknown}; choose from {OBSERVABLE_NAMES}")
        if "mixed_tangle" in self.observables and self.model.num_qubits != 2:
            raise ValueError("mixed_tangle is only defined for two qubits")
        if self.attractor_sign not in (1, -1):
            raise ValueError("attractor_sign must be +1 or -1")

    def resolve_initial_qubits(self) -> QubitRegisterState:
        """Materialize the initial register state from its specifier."""
        spec = self.initial_qubits
        nq = self.model.num_qubits
        if spec is None:
            spec = {"family": "configuration", "config": 0}
        if isinstance(spec, QubitRegisterState):
            if spec.num_qubits != nq:
                raise ValueError(
                    f"initial state has {spec.num_qubits} qubits, model has {nq}"
                )
            return spec
        if not isinstance(spec, dict) or "family" not in spec:
            raise ValueError("initial_qubits must be a QubitRegisterState or a "
                             "dict with a 'family' key")
        family = spec["family"]
        theta = float(spec.get("theta", self.coherent.theta))
        if family == "configuration":
            config = spec.get("config", 0)
            amps = np.zeros(2 ** nq, dtype=complex)
            amps[configuration_index(config, nq)] = 1.0
            return QubitRegisterState(amps, nq)
        if family == "basin":
            a = _as_complex(spec.get("a", 0.0))
            return basin_state(BasinParams(num_qubits=nq, a=a, theta=theta))
        if family == "attractor":
            sign = spec.get("sign", "+")
            sign = {"+": 1, "-": -1, 1: 1, -1: -1}.get(sign)
            if sign is None:
                raise ValueError("attractor sign must be '+' or '-'")
            return attractor_state(nq, theta, sign)
        if family == "dicke":
            return dicke_state(nq, int(spec["k"]))
        if family == "raw":
            amps = np.array([_as_complex(v) for v in spec["amplitudes"]])
            return QubitRegisterState(amps, nq)
        raise ValueError(f"unknown initial-state family {family!r}")


@dataclass(frozen=True)
class TimeSeries:
    """Sampled trajectory of scalar observables.

    ``columns`` maps observable column names to arrays aligned with
    ``times``; ``revival_time`` is t_r for the run's nbar and coupling.
    """

    times: np.ndarray
    columns: dict
    revival_time: float
    config: ScenarioConfig

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if times.ndim != 1 or np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        for name, values in self.columns.items():
            if len(values) != times.size:
                raise ValueError(f"column {name!r} length mismatch")
            values = np.asarray(values, dtype=float)
            if name.startswith("p_") or name in ("mixed_tangle", "field_purity"):
                if values.min() < -1e-9 or values.max() > 1.0 + 1e-9:
                    raise ValueError(f"column {name!r} leaves [0, 1]")
            if name == "entropy" and values.min() < -1e-9:
                raise ValueError("entropy column is negative")

    def column(self, name: str) -> np.ndarray:
        return np.asarray(self.columns[name])


def prepare_initial(config: ScenarioConfig):
    """Blocks, initial joint state and timescales (t_c, t_r) for a scenario.

    Shared plumbing for ``simulate``, ``locate_attractor_time`` and the CLI's
    phase-space snapshots; raises a truncation error when the composed
    initial state already occupies truncation-boundary blocks.
    """
    blocks = build_blocks(config.model)
    register = config.resolve_initial_qubits()
    fld = coherent_field(config.coherent)
    psi0 = compose_state(register, fld, config.model.fock_dim)
    occupancy = boundary_occupancy(psi0, blocks)
    if occupancy >= BOUNDARY_OCCUPANCY_TOL:
        raise TruncationError(
            f"initial state puts probability {occupancy:.3e} in truncation-"
            f"boundary blocks; increase fock_dim"
        )
    t_c, t_r = characteristic_times(config.coherent.nbar, config.model.coupling)
    return blocks, psi0, t_c, t_r


def _attractor_column_name(sign: int) -> str:
    return "p_attractor_plus" if sign > 0 else "p_attractor_minus"


def simulate(config: ScenarioConfig) -> TimeSeries:
    """Evolve the scenario and record the selected observables.

    Returns
    -------
    TimeSeries
        One record per sample time over [0, t_max_over_tr * t_r].
    """
    blocks, psi0, _, t_r = prepare_initial(config)
    times = np.linspace(0.0, config.t_max_over_tr * t_r, config.samples)
    amplitudes = evolve_many(psi0, times, blocks)

    nq, fd = config.model.num_qubits, config.model.fock_dim
    attractor = None
    if "p_attractor" in config.observables:
        attractor = attractor_state(nq, config.coherent.theta, config.attractor_sign)

    columns = {}
    for name in config.observables:
        key = _attractor_column_name(config.attractor_sign) if name == "p_attractor" else name
        columns[key] = np.empty(config.samples)

    for j in range(config.samples):
        state = PureState(amplitudes[:, j], nq, fd)
        rho_q = reduce_to_qubits(state)
        for name in config.observables:
            if name == "p_initial":
                value = configuration_probability(state, config.track_config)
                columns["p_initial"][j] = value
            elif name == "p_attractor":
                columns[_attractor_column_name(config.attractor_sign)][j] = \
                    fidelity(attractor, rho_q)
            elif name == "entropy":
                columns["entropy"][j] = von_neumann_entropy(rho_q)
            elif name == "mixed_tangle":
                columns["mixed_tangle"][j] = mixed_tangle(rho_q)
            elif name == "field_purity":
                # Schmidt property: the field and register reductions of a
                # pure joint state share their nonzero spectrum.
                columns["field_purity"][j] = min(1.0, rho_q.purity())
    return TimeSeries(times=times, columns=columns, revival_time=t_r, config=config)


def locate_attractor_time(config: ScenarioConfig, window, resolution: float | None = None):
    """Search for the attractor-fidelity peak inside a time window.

    The fidelity is evaluated on the config's own sample grid restricted to
    the window, and the bracketing interval around the grid argmax is then
    refined by golden-section search down to ``resolution``.

    Parameters
    ----------
    config : ScenarioConfig
    window : (float, float)
        Search interval in absolute time units; must lie within the
        simulated range [0, t_max_over_tr * t_r].
    resolution : float, optional
        Final bracket width; defaults to 1e-6 * t_r.

    Returns
    -------
    (t_star, peak) : (float, float)
        Refined peak time and the fidelity value there.
    """
    blocks, psi0, _, t_r = prepare_initial(config)
    t_lo, t_hi = float(window[0]), float(window[1])
    t_max = config.t_max_over_tr * t_r
    if not (t_hi > t_lo):
        raise ValueError("search window is empty")
    if t_lo < 0 or t_hi > t_max * (1 + 1e-12):
        raise ValueError(
            f"window [{t_lo}, {t_hi}] outside the simulated range [0, {t_max}]"
        )
    if resolution is None:
        resolution = 1e-6 * t_r

    attractor = attractor_state(config.model.num_qubits, config.coherent.theta,
                                config.attractor_sign)

    def fidelity_at(t: float) -> float:
        state = evolve(psi0, t, blocks)
        return fidelity(attractor, reduce_to_qubits(state))

    grid = np.linspace(0.0, t_max, config.samples)
    selected = grid[(grid >= t_lo) & (grid <= t_hi)]
    if selected.size == 0:
        raise ValueError("search window contains no sample times")
    amplitudes = evolve_many(psi0, selected, blocks)
    values = np.array([
        fidelity(attractor, reduce_to_qubits(
            PureState(amplitudes[:, j], config.model.num_qubits, config.model.fock_dim)))
        for j in range(selected.size)
    ])
    best = int(np.argmax(values))
    left = selected[max(0, best - 1)]
    right = selected[min(selected.size - 1, best + 1)]
    best_t, best_f = float(selected[best]), float(values[best])

    # golden-section refinement of the bracket around the grid argmax
    x1 = right - _GOLDEN * (right - left)
    x2 = left + _GOLDEN * (right - left)
    f1, f2 = fidelity_at(x1), fidelity_at(x2)
    while (right - left) > resolution:
        if f1 < f2:
            left, x1, f1 = x1, x2, f2
            x2 = left + _GOLDEN * (right - left)
            f2 = fidelity_at(x2)
        else:
            right, x2, f2 = x2, x1, f1
            x1 = right - _GOLDEN * (right - left)
            f1 = fidelity_at(x1)
    t_star = 0.5 * (left + right)
    f_star = fidelity_at(t_star)
    if f_star < best_f:
        t_star, f_star = best_t, best_f
    return float(t_star), float(f_star)
