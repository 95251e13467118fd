"""Scalar and phase-space diagnostics of qubit-field states.

Occupation probabilities, von Neumann entropy, the two-qubit tangle in its
pure-state and Wootters mixed-state forms, a GHZ-overlap diagnostic for
larger registers, and the Husimi function Q(beta) = <beta| rho^F |beta>
(no 1/pi prefactor, so 0 <= Q <= 1).

All functions are pure; Q-grid evaluation optionally parallelizes over row
chunks, capped by the TAVIS_SIM_THREADS environment variable.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import TruncationError
from .hilbert import (DensityMatrix, PureState, QubitRegisterState,
                      configuration_index)

__all__ = [
    "QGrid",
    "configuration_probability",
    "von_neumann_entropy",
    "pure_tangle",
    "mixed_tangle",
    "ghz_fidelity",
    "q_function",
    "default_q_ranges",
    "grid_local_maxima",
]

#: eigenvalues in [EIG_CLIP_TOL, 0) are treated as exact zeros
EIG_CLIP_TOL = -1e-9

_SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])
#: spin-flip operator sigma_y ⊗ sigma_y in the configuration basis
_SPIN_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y).real  # anti-diagonal (-1, 1, 1, -1)


def _worker_count() -> int:
    """Worker cap from TAVIS_SIM_THREADS (default 1: serial evaluation)."""
    raw = os.environ.get("TAVIS_SIM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def configuration_probability(state: PureState, config) -> float:
    """Probability of finding the register in one configuration.

    Parameters
    ----------
    state : PureState
    config : int or str
        Configuration bitstring index, or a string like ``"ge"`` listing
        qubit N-1 first.

    Returns
    -------
    float
        sum_n |Psi[config, n]|^2, in [0, 1].
    """
    q = configuration_index(config, state.num_qubits)
    row = state.as_matrix()[q]
    return float(min(1.0, np.vdot(row, row).real))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy -Tr(rho ln rho) in nats.

    Eigenvalues in [-1e-9, 0) are clipped to zero (0 ln 0 := 0); anything
    more negative is rejected as a non-positive matrix.
    """
    eigenvalues = rho.eigenvalues()
    if eigenvalues[0] < EIG_CLIP_TOL:
        raise ValueError(
            f"matrix not positive semidefinite: min eigenvalue {eigenvalues[0]:.3e}"
        )
    p = np.clip(eigenvalues, 0.0, None)
    p = p[p > 0.0]
    return max(0.0, float(-np.sum(p * np.log(p))))


def pure_tangle(qubits: QubitRegisterState) -> float:
    """Tangle of a pure two-qubit state: 4 |C_ee C_gg - C_eg C_ge|^2."""
    if qubits.num_qubits != 2:
        raise ValueError("pure_tangle is defined for exactly two qubits")
    a = qubits.amplitudes
    value = 4.0 * abs(a[0b11] * a[0b00] - a[0b10] * a[0b01]) ** 2
    return float(min(1.0, value))


def mixed_tangle(rho: DensityMatrix) -> float:
    """Squared Wootters concurrence of a two-qubit density matrix.

    The concurrence is C = max(0, mu_1 - mu_2 - mu_3 - mu_4) with mu_i the
    decreasing square roots of the eigenvalues of
    rho (sigma_y ⊗ sigma_y) rho* (sigma_y ⊗ sigma_y), conjugation taken
    elementwise in the configuration basis.  Returns tau = C^2.

    The mu_i are evaluated as the singular values of X^T (sigma_y ⊗ sigma_y) X
    for a factorization rho = X X†.  This is the same quantity exactly, but it
    sidesteps square-rooting near-zero eigenvalues, so projector inputs agree
    with the pure formula to machine precision instead of ~sqrt(eps).
    """
    if rho.subsystem != "qubit-register":
        raise ValueError("mixed_tangle expects a qubit-register density matrix")
    if rho.dimension != 4:
        raise ValueError("mixed_tangle is defined for exactly two qubits (4x4 matrix)")
    w, v = np.linalg.eigh(rho.entries)
    factor = v * np.sqrt(np.clip(w, 0.0, None))
    mu = np.linalg.svd(factor.T @ _SPIN_FLIP @ factor, compute_uv=False)
    concurrence = max(0.0, float(mu[0] - mu[1] - mu[2] - mu[3]))
    return float(min(1.0, concurrence ** 2))


def ghz_fidelity(rho: DensityMatrix) -> float:
    """Best overlap with a GHZ-type state (|e...e> + e^{i phi}|g...g>)/sqrt(2).

    Maximizing over the relative phase phi gives
    (rho_top + rho_bottom)/2 + |rho_corner| in the configuration basis.
    Defined for any register size; equals 1 only on GHZ states.
    """
    if rho.subsystem != "qubit-register":
        raise ValueError("ghz_fidelity expects a qubit-register density matrix")
    top = rho.dimension - 1
    value = 0.5 * (rho.entries[0, 0].real + rho.entries[top, top].real) \
        + abs(rho.entries[0, top])
    return float(min(1.0, max(0.0, value)))


@dataclass(frozen=True)
class QGrid:
    """Husimi function sampled on a rectangular grid of coherent labels.

    ``values[i, j]`` is Q at beta = re_axis[i] + 1j * im_axis[j]; all values
    lie in [0, 1] up to 1e-9 because Q here carries no 1/pi factor.
    """

    re_min: float
    re_max: float
    re_count: int
    im_min: float
    im_max: float
    im_count: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.re_count, self.im_count):
            raise ValueError(
                f"values shape {vals.shape} != ({self.re_count}, {self.im_count})"
            )
        if vals.min() < 0.0 or vals.max() > 1.0 + 1e-9:
            raise ValueError("Q values must lie in [0, 1 + 1e-9]")

    @property
    def re_axis(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.re_count)

    @property
    def im_axis(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.im_count)


def default_q_ranges(nbar: float):
    """Default square grid, 201 points per axis over [-1.5 sqrt(nbar), +1.5 sqrt(nbar)]."""
    half = 1.5 * np.sqrt(nbar)
    return (-half, half, 201), (-half, half, 201)


def _coherent_rows(betas: np.ndarray, fock_dim: int) -> np.ndarray:
    """Unit-norm truncated coherent vectors for a batch of labels (log-space)."""
    n = np.arange(fock_dim)
    mag = np.abs(betas)
    rows = np.empty((betas.size, fock_dim), dtype=complex)
    zero = mag == 0.0
    if np.any(zero):
        rows[zero] = 0.0
        rows[zero, 0] = 1.0
    nz = ~zero
    if np.any(nz):
        log_mag = (-0.5 * mag[nz, None] ** 2
                   + n[None, :] * np.log(mag[nz, None])
                   - 0.5 * gammaln(n + 1.0)[None, :])
        rows[nz] = np.exp(log_mag) * np.exp(1j * n[None, :] * np.angle(betas[nz, None]))
    norms = np.linalg.norm(rows, axis=1)
    if np.any(norms == 0.0):
        raise TruncationError(
            "grid exceeds the truncation-supported radius: a coherent label "
            "underflowed to zero norm at this fock_dim"
        )
    return rows / norms[:, None]


def q_function(rho_field: DensityMatrix, re_range, im_range) -> QGrid:
    """Husimi function of a field density matrix on a rectangular grid.

    Parameters
    ----------
    rho_field : DensityMatrix
        Field-subsystem density matrix.
    re_range, im_range : (min, max, count)
        Grid extents along the real and imaginary axes of beta.

    Returns
    -------
    QGrid
        Q(beta) = <beta| rho |beta> with |beta> truncated to the matrix
        dimension and renormalized.  Labels far outside the truncation
        radius still evaluate (their Q decays to ~0); only labels whose
        truncated vector underflows entirely raise a truncation error.
    """
    if rho_field.subsystem != "field":
        raise ValueError("q_function expects a field density matrix")
    re_min, re_max, re_count = re_range
    im_min, im_max, im_count = im_range
    if re_count < 1 or im_count < 1:
        raise ValueError("grid counts must be positive")
    re_axis = np.linspace(re_min, re_max, int(re_count))
    im_axis = np.linspace(im_min, im_max, int(im_count))
    rho_t = rho_field.entries.T
    values = np.empty((re_axis.size, im_axis.size), dtype=float)

    def fill_rows(i_lo: int, i_hi: int):
        for i in range(i_lo, i_hi):
            betas = re_axis[i] + 1j * im_axis
            rows = _coherent_rows(betas, rho_field.dimension)
            overlap = np.sum(rows.conj() * (rows @ rho_t), axis=1).real
            values[i] = np.clip(overlap, 0.0, None)

    workers = min(_worker_count(), re_axis.size)
    if workers == 1:
        fill_rows(0, re_axis.size)
    else:
        bounds = np.linspace(0, re_axis.size, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fill_rows, bounds[w], bounds[w + 1])
                       for w in range(workers)]
            for future in futures:
                future.result()

    return QGrid(re_min=float(re_min), re_max=float(re_max), re_count=int(re_count),
                 im_min=float(im_min), im_max=float(im_max), im_count=int(im_count),
                 values=values)


def grid_local_maxima(grid: QGrid, rel_cut: float = 0.1) -> list:
    """Interior grid points strictly exceeding all 8 neighbors and rel_cut * max.

    Returns
    -------
    list of (re, im, value)
        Sorted by descending value.
    """
    v = grid.values
    cut = rel_cut * float(v.max())
    peaks = []
    for i in range(1, v.shape[0] - 1):
        for j in range(1, v.shape[1] - 1):
            val = v[i, j]
            if val <= cut:
                continue
            patch = v[i - 1:i + 2, j - 1:j + 2].copy()
            patch[1, 1] = -np.inf
            if val > patch.max():
                peaks.append((float(grid.re_axis[i]), float(grid.im_axis[j]), float(val)))
    peaks.sort(key=lambda p: -p[2])
    return peaks
