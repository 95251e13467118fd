"""Exact simulation of N qubits resonantly coupled to one quantized field mode.

The package models a register of two-level systems exchanging excitations
with a single bosonic mode under the rotating-wave approximation at exact
resonance.  Excitation-number conservation splits the joint Hilbert space
into blocks of dimension at most 2**N, so dynamics are computed exactly by
per-block diagonalization even for large photon numbers.

Main entry points
-----------------
- :func:`tavis_sim.dynamics.simulate` — time series of register observables.
- :func:`tavis_sim.dynamics.locate_attractor_time` — refine the time of
  closest approach to the product attractor state.
- :func:`tavis_sim.observables.q_function` — Husimi distribution of the field.
- :mod:`tavis_sim.cli` — the ``tavis-sim`` command-line interface.
"""

__version__ = "1.0.0"

from .errors import DimensionCapError, TavisSimError, TruncationError
from .hilbert import (DensityMatrix, PureState, QubitRegisterState,
                      compose_state, configuration_index, fidelity,
                      reduce_to_field, reduce_to_qubits)
from .model import (ExcitationBlock, ExcitationBlockSet, ModelParams,
                    build_blocks, dense_hamiltonian, evolve, evolve_many)
from .states import (BasinParams, CoherentParams, attractor_state,
                     basin_state, coherent_field, default_fock_dim,
                     dicke_state, field_cat_reference, general_two_qubit)
from .dynamics import (ScenarioConfig, TimeSeries, characteristic_times,
                       locate_attractor_time, prepare_initial, simulate)
from .observables import (QGrid, configuration_probability, default_q_ranges,
                          ghz_fidelity, grid_local_maxima, mixed_tangle,
                          pure_tangle, q_function, von_neumann_entropy)

__all__ = [
    "__version__",
    "TavisSimError", "TruncationError", "DimensionCapError",
    "QubitRegisterState", "PureState", "DensityMatrix",
    "compose_state", "configuration_index", "reduce_to_qubits",
    "reduce_to_field", "fidelity",
    "ModelParams", "ExcitationBlock", "ExcitationBlockSet",
    "build_blocks", "dense_hamiltonian", "evolve", "evolve_many",
    "CoherentParams", "BasinParams", "coherent_field", "dicke_state",
    "attractor_state", "basin_state", "general_two_qubit",
    "field_cat_reference", "default_fock_dim",
    "ScenarioConfig", "TimeSeries", "characteristic_times",
    "prepare_initial", "simulate", "locate_attractor_time",
    "QGrid", "configuration_probability", "von_neumann_entropy",
    "pure_tangle", "mixed_tangle", "ghz_fidelity", "q_function",
    "default_q_ranges", "grid_local_maxima",
]
