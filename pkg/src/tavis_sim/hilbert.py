"""State representations for a qubit register coupled to a single field mode.

The joint Hilbert space is (C^2)^{⊗N_q} ⊗ C^{fock_dim}.  A joint basis state
is indexed by

    index = q * fock_dim + n

where ``q`` is the qubit configuration bitstring (bit i = 1 ⇔ qubit i
excited, qubit 0 is the least significant bit) and ``n`` is the photon
number.  Configuration labels such as ``to qubit states |eg>`` list the
most-significant qubit first, so |eg> has qubit 1 excited (q = 2).

All objects here are immutable value types and every operation is a pure
function; everything is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PureState",
    "DensityMatrix",
    "QubitRegisterState",
    "compose_state",
    "configuration_index",
    "reduce_to_qubits",
    "reduce_to_field",
    "fidelity",
]

#: tolerance for algebraic identities (norms, traces, Hermiticity)
ALGEBRAIC_TOL = 1e-10
#: tolerance accepted on *inputs* (constructor guards)
INPUT_NORM_TOL = 1e-8
#: most-negative eigenvalue a density matrix may carry (numerical PSD)
PSD_TOL = -1e-9


def _as_complex_vector(values) -> np.ndarray:
    vec = np.asarray(values, dtype=complex)
    if vec.ndim != 1:
        raise ValueError(f"expected a 1-d amplitude vector, got shape {vec.shape}")
    return vec


@dataclass(frozen=True)
class QubitRegisterState:
    """Pure state of the bare qubit register.

    Parameters
    ----------
    amplitudes : sequence of complex
        2^{num_qubits} amplitudes ordered by configuration bitstring.
    num_qubits : int
        Number of qubits in the register.
    """

    amplitudes: np.ndarray
    num_qubits: int

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _as_complex_vector(self.amplitudes))
        if self.num_qubits < 0:
            raise ValueError("num_qubits must be nonnegative")
        expected = 2 ** self.num_qubits
        if self.amplitudes.size != expected:
            raise ValueError(
                f"register of {self.num_qubits} qubits needs {expected} amplitudes, "
                f"got {self.amplitudes.size}"
            )
        norm2 = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm2 - 1.0) > INPUT_NORM_TOL:
            raise ValueError(f"register state not normalized: |psi|^2 = {norm2!r}")

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class PureState:
    """Pure state of the joint qubits ⊗ field system.

    Parameters
    ----------
    amplitudes : sequence of complex
        2^{num_qubits} * fock_dim amplitudes, indexed q * fock_dim + n.
    num_qubits : int
    fock_dim : int
        Number of retained Fock levels (n_max + 1).
    """

    amplitudes: np.ndarray
    num_qubits: int
    fock_dim: int

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _as_complex_vector(self.amplitudes))
        if self.num_qubits < 0:
            raise ValueError("num_qubits must be nonnegative")
        if self.fock_dim < 1:
            raise ValueError("fock_dim must be positive")
        expected = (2 ** self.num_qubits) * self.fock_dim
        if self.amplitudes.size != expected:
            raise ValueError(
                f"joint state needs {expected} amplitudes "
                f"(2^{self.num_qubits} * {self.fock_dim}), got {self.amplitudes.size}"
            )
        norm2 = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm2 - 1.0) > INPUT_NORM_TOL:
            raise ValueError(f"joint state not normalized: |Psi|^2 = {norm2!r}")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to (configuration, photon-number)."""
        return self.amplitudes.reshape(2 ** self.num_qubits, self.fock_dim)


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced density matrix of one subsystem.

    Parameters
    ----------
    entries : square complex matrix
    subsystem : {"qubit-register", "field"}
    dimension : int
    """

    entries: np.ndarray
    subsystem: str
    dimension: int = field(default=0)

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        object.__setattr__(self, "entries", mat)
        if self.dimension == 0:
            object.__setattr__(self, "dimension", mat.shape[0])
        if self.dimension != mat.shape[0]:
            raise ValueError(
                f"declared dimension {self.dimension} != matrix size {mat.shape[0]}"
            )
        if self.subsystem not in ("qubit-register", "field"):
            raise ValueError(f"unknown subsystem tag {self.subsystem!r}")
        herm_defect = np.max(np.abs(mat - mat.conj().T))
        if herm_defect > ALGEBRAIC_TOL:
            raise ValueError(f"matrix not Hermitian: max defect {herm_defect:.3e}")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > ALGEBRAIC_TOL:
            raise ValueError(f"trace must be 1, got {tr!r}")
        lo = float(np.linalg.eigvalsh(mat)[0])
        if lo < PSD_TOL:
            raise ValueError(f"matrix not positive semidefinite: min eigenvalue {lo:.3e}")

    def eigenvalues(self) -> np.ndarray:
        """Ascending real eigenvalues."""
        return np.linalg.eigvalsh(self.entries)

    def purity(self) -> float:
        """Tr(rho^2)."""
        return float(np.sum(np.abs(self.entries) ** 2))


def configuration_index(config, num_qubits: int) -> int:
    """Resolve a configuration given as an int or an 'eg' string.

    String labels list the most-significant qubit first, so ``"eg"`` (qubit 1
    excited, qubit 0 ground) maps to index 2.
    """
    if isinstance(config, str):
        if len(config) != num_qubits or any(c not in "eg" for c in config):
            raise ValueError(
                f"configuration string must be {num_qubits} chars of 'e'/'g', got {config!r}"
            )
        q = 0
        for pos, char in enumerate(config):
            if char == "e":
                q |= 1 << (num_qubits - 1 - pos)
        return q
    q = int(config)
    if not 0 <= q < 2 ** num_qubits:
        raise ValueError(f"configuration index {q} out of range for {num_qubits} qubits")
    return q


def compose_state(qubits: QubitRegisterState, field_amplitudes,
                  fock_dim: int | None = None) -> PureState:
    """Tensor product of a register state with a field state.

    Parameters
    ----------
    qubits : QubitRegisterState
    field_amplitudes : sequence of complex
        Fock-basis amplitudes of the field, unit norm within 1e-8.
    fock_dim : int, optional
        Target Fock dimension.  Defaults to ``len(field_amplitudes)``; a
        shorter field vector is zero-padded, a longer one is an error.

    Returns
    -------
    PureState
        Amplitudes ``result[q * fock_dim + n] = qubits[q] * field[n]``.
    """
    fld = _as_complex_vector(field_amplitudes)
    if fock_dim is None:
        fock_dim = fld.size
    if fld.size > fock_dim:
        raise ValueError(
            f"field vector of length {fld.size} does not fit fock_dim {fock_dim}"
        )
    norm2 = float(np.vdot(fld, fld).real)
    if abs(norm2 - 1.0) > INPUT_NORM_TOL:
        raise ValueError(f"field state not normalized: |phi|^2 = {norm2!r}")
    if fld.size < fock_dim:
        fld = np.concatenate([fld, np.zeros(fock_dim - fld.size, dtype=complex)])
    joint = np.kron(qubits.amplitudes, fld)
    return PureState(joint, qubits.num_qubits, fock_dim)


def reduce_to_qubits(state: PureState) -> DensityMatrix:
    """Trace out the field: rho^Q[q, q'] = sum_n Psi[q,n] conj(Psi[q',n])."""
    a = state.as_matrix()
    rho = a @ a.conj().T
    return DensityMatrix(rho, "qubit-register", 2 ** state.num_qubits)


def reduce_to_field(state: PureState) -> DensityMatrix:
    """Trace out the qubits: rho^F[n, n'] = sum_q Psi[q,n] conj(Psi[q,n'])."""
    a = state.as_matrix()
    rho = a.T @ a.conj()
    return DensityMatrix(rho, "field", state.fock_dim)


def fidelity(reference, rho: DensityMatrix) -> float:
    """Overlap <ref| rho |ref> of a pure reference state with a density matrix.

    Parameters
    ----------
    reference : QubitRegisterState, PureState or sequence of complex
        Pure state of the same subsystem as ``rho``.
    rho : DensityMatrix

    Returns
    -------
    float
        Real overlap, clipped to [0, 1].  An imaginary residue above 1e-8
        indicates a logic error upstream and raises.
    """
    if isinstance(reference, (QubitRegisterState, PureState)):
        vec = reference.amplitudes
    else:
        vec = _as_complex_vector(reference)
    if vec.size != rho.dimension:
        raise ValueError(
            f"reference dimension {vec.size} != density matrix dimension {rho.dimension}"
        )
    value = complex(vec.conj() @ (rho.entries @ vec))
    if abs(value.imag) > 1e-8:
        raise ValueError(f"fidelity has non-negligible imaginary part: {value!r}")
    return float(min(1.0, max(0.0, value.real)))
