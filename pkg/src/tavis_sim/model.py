"""Resonant Tavis-Cummings Hamiltonian and exact unitary evolution.

With hbar = 1 the lab-frame Hamiltonian for N_q identical qubits resonantly
coupled (strength lambda) to one field mode of frequency omega reads

    H = omega a†a + (omega/2) sum_i sigma^z_i
        + lambda sum_i (a sigma^+_i + a† sigma^-_i).

At resonance the free part commutes with the coupling, so the interaction
frame keeps only the flip terms.  The total excitation number
a†a + sum_i sigma^+_i sigma^-_i is conserved, which splits the joint space
into blocks of size at most 2^{N_q}; each block is diagonalized once and
evolution is exact phase rotation in the block eigenbases.

``dense_hamiltonian`` builds the same operator by Kronecker products over
full single-system matrices.  It shares no index arithmetic with the block
construction and serves as an independent oracle for it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionCapError
from .hilbert import PureState

__all__ = [
    "ModelParams",
    "ExcitationBlock",
    "ExcitationBlockSet",
    "build_blocks",
    "block_hamiltonian",
    "dense_hamiltonian",
    "evolve",
    "evolve_many",
    "boundary_occupancy",
    "DEFAULT_DENSE_CAP",
]

#: default cap on the dense-oracle dimension 2^{N_q} * fock_dim
DEFAULT_DENSE_CAP = 4096
#: default cap on the block-diagonalized joint dimension
DEFAULT_BLOCK_CAP = 65536

_FRAMES = ("interaction", "lab")


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the resonant model.

    Parameters
    ----------
    num_qubits : int
    fock_dim : int
        Retained Fock levels (n_max + 1).
    coupling : float
        Qubit-field coupling lambda; sets the inverse time unit.
    omega : float
        Common qubit/field frequency (only enters in the lab frame).
    frame : {"interaction", "lab"}
    """

    num_qubits: int
    fock_dim: int
    coupling: float = 1.0
    omega: float = 0.0
    frame: str = "interaction"

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be a positive integer")
        if self.fock_dim < 1:
            raise ValueError("fock_dim must be a positive integer")
        if self.coupling <= 0:
            raise ValueError("coupling must be positive")
        if self.omega < 0:
            raise ValueError("omega must be nonnegative")
        if self.frame not in _FRAMES:
            raise ValueError(f"frame must be one of {_FRAMES}, got {self.frame!r}")

    @property
    def joint_dim(self) -> int:
        return (2 ** self.num_qubits) * self.fock_dim


@dataclass(frozen=True)
class ExcitationBlock:
    """One conserved-excitation block of the Hamiltonian.

    Attributes
    ----------
    excitation : int
        Total excitation number E = popcount(q) + n shared by the members.
    indices : ndarray of int
        Joint basis indices q * fock_dim + n belonging to the block.
    eigenvalues : ndarray of float
    eigenvectors : ndarray of complex
        Columns are eigenvectors in the block's own basis ordering.
    boundary : bool
        True when the block touches the Fock truncation boundary
        (E >= fock_dim - 1); such blocks may be dynamically incomplete.
    """

    excitation: int
    indices: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    boundary: bool


@dataclass(frozen=True)
class ExcitationBlockSet:
    """All excitation blocks for one ModelParams, ready for evolution."""

    params: ModelParams
    blocks: tuple

    @property
    def joint_dim(self) -> int:
        return self.params.joint_dim


def _block_members(params: ModelParams, excitation: int) -> list:
    """(q, n) pairs with popcount(q) + n = excitation and n < fock_dim."""
    members = []
    for q in range(2 ** params.num_qubits):
        n = excitation - bin(q).count("1")
        if 0 <= n < params.fock_dim:
            members.append((q, n))
    return members


def block_hamiltonian(params: ModelParams, members: list) -> np.ndarray:
    """Hamiltonian restricted to the given list of (q, n) basis states.

    Module-level (rather than inlined in ``build_blocks``) so verification
    harnesses can substitute a faulty builder and confirm the dense oracle
    catches it.
    """
    size = len(members)
    pos = {qn: i for i, qn in enumerate(members)}
    ham = np.zeros((size, size), dtype=complex)
    for i, (q, n) in enumerate(members):
        if n >= 1:
            for bit in range(params.num_qubits):
                if not (q >> bit) & 1:
                    j = pos.get(((q | (1 << bit)), n - 1))
                    if j is not None:
                        ham[j, i] += params.coupling * np.sqrt(n)
    ham = ham + ham.conj().T
    if params.frame == "lab":
        for i, (q, n) in enumerate(members):
            pop = bin(q).count("1")
            ham[i, i] += params.omega * (n + pop - params.num_qubits / 2.0)
    return ham


def build_blocks(params: ModelParams, cap: int = DEFAULT_BLOCK_CAP) -> ExcitationBlockSet:
    """Enumerate and diagonalize every conserved-excitation block.

    Parameters
    ----------
    params : ModelParams
    cap : int
        Guard on the joint dimension 2^{N_q} * fock_dim.

    Returns
    -------
    ExcitationBlockSet
        Blocks cover the joint basis exactly once; each carries the
        eigendecomposition of the restricted Hamiltonian.
    """
    if params.fock_dim < 2:
        raise ValueError("fock_dim must be at least 2")
    if params.joint_dim > cap:
        raise DimensionCapError(
            f"joint dimension {params.joint_dim} exceeds cap {cap}"
        )
    blocks = []
    max_excitation = params.fock_dim - 1 + params.num_qubits
    for excitation in range(max_excitation + 1):
        members = _block_members(params, excitation)
        if not members:
            continue
        ham = block_hamiltonian(params, members)
        eigenvalues, eigenvectors = np.linalg.eigh(ham)
        indices = np.array([q * params.fock_dim + n for q, n in members], dtype=np.intp)
        blocks.append(ExcitationBlock(
            excitation=excitation,
            indices=indices,
            eigenvalues=eigenvalues,
            eigenvectors=eigenvectors,
            boundary=excitation >= params.fock_dim - 1,
        ))
    return ExcitationBlockSet(params=params, blocks=tuple(blocks))


def dense_hamiltonian(params: ModelParams, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Full Hamiltonian matrix built from Kronecker products (oracle route).

    Parameters
    ----------
    params : ModelParams
    cap : int
        Maximum allowed joint dimension (default 4096).

    Returns
    -------
    ndarray
        Hermitian matrix of shape (joint_dim, joint_dim).
    """
    if params.joint_dim > cap:
        raise DimensionCapError(
            f"dense oracle dimension {params.joint_dim} exceeds cap {cap}"
        )
    nq, fd = params.num_qubits, params.fock_dim
    annihilate = np.diag(np.sqrt(np.arange(1, fd, dtype=float)), k=1)
    raise_qubit = np.array([[0.0, 0.0], [1.0, 0.0]])  # |e><g| with index 1 = e
    ham = np.zeros((params.joint_dim, params.joint_dim), dtype=complex)
    for i in range(nq):
        op = np.kron(np.eye(2 ** (nq - 1 - i)), np.kron(raise_qubit, np.eye(2 ** i)))
        ham += params.coupling * np.kron(op, annihilate)
    ham = ham + ham.conj().T
    if params.frame == "lab":
        ham += params.omega * np.kron(np.eye(2 ** nq), np.diag(np.arange(fd, dtype=float)))
        sz = np.diag([-1.0, 1.0])  # ground -> -1, excited -> +1
        for i in range(nq):
            op = np.kron(np.eye(2 ** (nq - 1 - i)), np.kron(sz, np.eye(2 ** i)))
            ham += (params.omega / 2.0) * np.kron(op, np.eye(fd))
    return ham


def _check_state_matches(state: PureState, blocks: ExcitationBlockSet):
    params = blocks.params
    if state.num_qubits != params.num_qubits or state.fock_dim != params.fock_dim:
        raise ValueError(
            f"state ({state.num_qubits} qubits, fock_dim {state.fock_dim}) does not "
            f"match blocks ({params.num_qubits} qubits, fock_dim {params.fock_dim})"
        )


def evolve(state: PureState, t: float, blocks: ExcitationBlockSet) -> PureState:
    """Evolve a pure state for time ``t`` (units of 1/lambda when lambda = 1).

    Each block's amplitudes are rotated by V diag(e^{-i E_k t}) V†.
    """
    _check_state_matches(state, blocks)
    out = np.array(state.amplitudes, dtype=complex)
    for block in blocks.blocks:
        sub = out[block.indices]
        weights = block.eigenvectors.conj().T @ sub
        out[block.indices] = block.eigenvectors @ (np.exp(-1j * block.eigenvalues * t) * weights)
    return PureState(out, state.num_qubits, state.fock_dim)


def evolve_many(state: PureState, times, blocks: ExcitationBlockSet) -> np.ndarray:
    """Evolved amplitudes at many times at once.

    Parameters
    ----------
    state : PureState
    times : sequence of float
    blocks : ExcitationBlockSet

    Returns
    -------
    ndarray
        Complex array of shape (joint_dim, len(times)); column j is the
        amplitude vector at times[j].  Identical, sample for sample, to
        calling ``evolve`` in a loop, but amortizes the block matvecs.
    """
    _check_state_matches(state, blocks)
    times = np.asarray(times, dtype=float)
    out = np.empty((state.dim, times.size), dtype=complex)
    for block in blocks.blocks:
        weights = block.eigenvectors.conj().T @ state.amplitudes[block.indices]
        phases = np.exp(-1j * np.outer(block.eigenvalues, times))
        out[block.indices, :] = block.eigenvectors @ (phases * weights[:, None])
    return out


def boundary_occupancy(state: PureState, blocks: ExcitationBlockSet) -> float:
    """Total probability the state carries in truncation-boundary blocks.

    Evolution is exact only when this is negligible for the initial state
    (conserved block populations can never migrate toward the cutoff).
    """
    _check_state_matches(state, blocks)
    total = 0.0
    for block in blocks.blocks:
        if block.boundary:
            sub = state.amplitudes[block.indices]
            total += float(np.vdot(sub, sub).real)
    return total
