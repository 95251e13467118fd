"""Constructors for the state families used throughout the simulations.

Field states: truncated coherent states |alpha> with alpha = sqrt(nbar) e^{-i theta}.
Register states: Dicke states, spin-coherent "attractor" states
(e^{-i theta}|e> ± i|g>)^{⊗N}/2^{N/2}, the basin-of-attraction family that
evolves into them, and the general two-qubit state.  The closed-form
two-lobe field reference expected at one quarter of the revival time is
also built here.

Everything is a pure constructor returning immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import TruncationError
from .hilbert import QubitRegisterState

__all__ = [
    "CoherentParams",
    "BasinParams",
    "default_fock_dim",
    "coherent_field",
    "dicke_state",
    "attractor_state",
    "basin_state",
    "general_two_qubit",
    "field_cat_reference",
]

#: maximum Poisson tail mass allowed beyond the Fock cutoff
TAIL_TOL = 1e-8


def default_fock_dim(nbar: float) -> int:
    """Fock dimension n_max + 1 with n_max = ceil(nbar + 12 sqrt(nbar)).

    Twelve Poisson standard deviations leave tail mass far below 1e-8
    (2.6e-22 at nbar = 50, where this gives fock_dim = 136).
    """
    if nbar < 0:
        raise ValueError("nbar must be nonnegative")
    return int(math.ceil(nbar + 12.0 * math.sqrt(nbar))) + 1


def _poisson_tail(nbar: float, fock_dim: int) -> float:
    """Poisson(nbar) mass at photon numbers >= fock_dim."""
    return float(gammainc(fock_dim, nbar))


@dataclass(frozen=True)
class CoherentParams:
    """Coherent field specification alpha = sqrt(nbar) e^{-i theta}.

    Parameters
    ----------
    nbar : float
        Mean photon number |alpha|^2.
    theta : float
        Field phase in radians.
    fock_dim : int
        Truncation; must keep the Poisson tail below 1e-8.
    """

    nbar: float
    theta: float
    fock_dim: int

    def __post_init__(self):
        if self.nbar < 0:
            raise ValueError("nbar must be nonnegative")
        if self.fock_dim < 1:
            raise ValueError("fock_dim must be positive")
        tail = _poisson_tail(self.nbar, self.fock_dim)
        if tail >= TAIL_TOL:
            raise TruncationError(
                f"Poisson tail beyond fock_dim ({tail:.3e}) exceeds {TAIL_TOL:.0e}; "
                f"need fock_dim > {self.nbar} + several sqrt({self.nbar})"
            )


def coherent_field(p: CoherentParams) -> np.ndarray:
    """Truncated, renormalized coherent-state Fock amplitudes.

    amplitude[n] = e^{-nbar/2} (sqrt(nbar) e^{-i theta})^n / sqrt(n!),
    evaluated in log space so large nbar never under/overflows.

    Returns
    -------
    ndarray
        Unit-norm complex vector of length ``p.fock_dim`` whose photon-number
        mean reproduces nbar to 1e-6 relative.
    """
    n = np.arange(p.fock_dim)
    if p.nbar == 0.0:
        amps = np.zeros(p.fock_dim, dtype=complex)
        amps[0] = 1.0
        return amps
    log_mag = -p.nbar / 2.0 + 0.5 * n * np.log(p.nbar) - 0.5 * gammaln(n + 1.0)
    amps = np.exp(log_mag) * np.exp(-1j * p.theta * n)
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise TruncationError("coherent amplitudes underflowed at this truncation")
    amps = amps / norm
    mean = float(np.sum(n * np.abs(amps) ** 2))
    if abs(mean - p.nbar) > 1e-6 * p.nbar:
        raise TruncationError(
            f"truncated mean photon number {mean} deviates from nbar {p.nbar}"
        )
    return amps


def dicke_state(num_qubits: int, k: int) -> QubitRegisterState:
    """Symmetrized register state with exactly ``k`` qubits in the ground state.

    Equal amplitude 1/sqrt(C(N_q, k)) on every configuration with
    N_q - k excited qubits.
    """
    if not 0 <= k <= num_qubits:
        raise ValueError(f"k must lie in [0, {num_qubits}], got {k}")
    amps = np.zeros(2 ** num_qubits, dtype=complex)
    weight = 1.0 / math.sqrt(math.comb(num_qubits, k))
    for q in range(2 ** num_qubits):
        if bin(q).count("1") == num_qubits - k:
            amps[q] = weight
    return QubitRegisterState(amps, num_qubits)


def attractor_state(num_qubits: int, theta: float, sign: int) -> QubitRegisterState:
    """Spin-coherent product state ((e^{-i theta}|e> ± i|g>)/sqrt(2))^{⊗N_q}.

    Parameters
    ----------
    num_qubits : int
    theta : float
        Phase matching the coherent field that stabilizes the state.
    sign : {+1, -1}
        Branch of the ± sign.

    Returns
    -------
    QubitRegisterState
        A product state: every single-qubit reduction is pure, so any
        register entanglement measure vanishes on it.
    """
    if num_qubits < 1:
        raise ValueError("num_qubits must be positive")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    single = np.array([sign * 1j, np.exp(-1j * theta)], dtype=complex) / np.sqrt(2.0)
    amps = reduce(np.kron, [single] * num_qubits)
    return QubitRegisterState(amps, num_qubits)


@dataclass(frozen=True)
class BasinParams:
    """Parameters of the basin-of-attraction register family.

    Parameters
    ----------
    num_qubits : int
    a : complex
        Even-sector amplitude, |a| <= 1/sqrt(2^{N_q - 1}).
    theta : float
        Phase matching the coherent field.
    """

    num_qubits: int
    a: complex
    theta: float = 0.0

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        limit = 1.0 / math.sqrt(2.0 ** (self.num_qubits - 1))
        if abs(self.a) > limit + 1e-12:
            raise ValueError(
                f"|a| = {abs(self.a)} exceeds the basin bound {limit} "
                f"for {self.num_qubits} qubits"
            )

    @property
    def odd_amplitude(self) -> float:
        """sqrt(1/2^{N_q-1} - |a|^2), the odd-sector configuration amplitude."""
        limit_sq = 1.0 / (2.0 ** (self.num_qubits - 1))
        return math.sqrt(max(0.0, limit_sq - abs(self.a) ** 2))


def basin_state(p: BasinParams) -> QubitRegisterState:
    """Register state that evolves into the + attractor.

    In the Dicke decomposition, component k (k qubits in the ground state)
    carries amplitude A_k e^{-i(N_q/2 - k) theta} sqrt(C(N_q, k)) with
    A_k = a for even k and sqrt(1/2^{N_q-1} - |a|^2) for odd k; per
    configuration that is A_k e^{-i(N_q/2 - k) theta}.  The norm is an
    exact identity: sum_k |A_k|^2 C(N_q,k) = 1.
    """
    amps = np.zeros(2 ** p.num_qubits, dtype=complex)
    odd = p.odd_amplitude
    for q in range(2 ** p.num_qubits):
        k = p.num_qubits - bin(q).count("1")
        base = p.a if k % 2 == 0 else odd
        amps[q] = base * np.exp(-1j * (p.num_qubits / 2.0 - k) * p.theta)
    return QubitRegisterState(amps, p.num_qubits)


def general_two_qubit(c_ee: complex, c_eg: complex,
                      c_ge: complex, c_gg: complex) -> QubitRegisterState:
    """Two-qubit state from its four configuration amplitudes.

    Labels list qubit 1 first: |eg> means qubit 1 excited, qubit 0 ground.
    """
    amps = np.zeros(4, dtype=complex)
    amps[0b11] = c_ee
    amps[0b10] = c_eg
    amps[0b01] = c_ge
    amps[0b00] = c_gg
    norm2 = float(np.vdot(amps, amps).real)
    if abs(norm2 - 1.0) > 1e-8:
        raise ValueError(f"amplitudes not normalized: sum |C|^2 = {norm2!r}")
    return QubitRegisterState(amps, 2)


def field_cat_reference(p: BasinParams, nbar: float, fock_dim: int) -> np.ndarray:
    """Closed-form two-lobe field reference at one quarter of the revival time.

    For a two-qubit register prepared in the basin family, the large-nbar
    analysis predicts the field disentangles at t_r/4 into

        e^{i theta} [ e^{+i pi nbar/2} (a - b) |alpha>
                    + e^{-i pi nbar/2} (a + b) |-alpha> ],

    with b = sqrt(1/2 - |a|^2) and alpha = sqrt(nbar) e^{-i theta}.  The
    two coherent components are not orthogonal at small nbar, so the result
    is normalized numerically after truncation.

    Returns
    -------
    ndarray
        Unit-norm Fock amplitude vector of length ``fock_dim``.
    """
    if p.num_qubits != 2:
        raise ValueError("the cat reference is defined for two qubits")
    base = coherent_field(CoherentParams(nbar=nbar, theta=p.theta, fock_dim=fock_dim))
    flipped = base * ((-1.0) ** np.arange(fock_dim))  # alpha -> -alpha
    b = p.odd_amplitude
    phase = np.exp(1j * p.theta)
    vec = phase * (np.exp(1j * np.pi * nbar / 2.0) * (p.a - b) * base
                   + np.exp(-1j * np.pi * nbar / 2.0) * (p.a + b) * flipped)
    norm = np.linalg.norm(vec)
    if norm < 1e-12:
        raise ValueError("cat reference vanishes for these parameters")
    return vec / norm
