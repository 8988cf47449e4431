"""Zero-temperature, at-most-one-photon reduction of the channel.

On span{|0>, |1>} the attenuator with coefficient ``c`` is an amplitude
damping channel. Two-qubit states are ordered ``|q_A q_S>`` with the ancilla
first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from ._tolerances import PSD_FLOOR, STATE_ATOL

__all__ = [
    "QubitState",
    "kraus_operators",
    "apply_amplitude_damping",
    "choi_state",
    "concurrence",
]

_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SYSY = np.kron(_SY, _SY)


@dataclass(frozen=True)
class QubitState:
    """Density matrix of one qubit (2x2) or of ancilla + system (4x4)."""

    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape not in ((2, 2), (4, 4)):
            raise ValueError(f"expected a 2x2 or 4x4 density matrix, got {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > STATE_ATOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > STATE_ATOL:
            raise ValueError(f"trace is {np.trace(rho).real}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -PSD_FLOOR:
            raise ValueError("density matrix has negative eigenvalues")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


StateLike = Union[QubitState, np.ndarray]


def _as_state(rho: StateLike) -> QubitState:
    return rho if isinstance(rho, QubitState) else QubitState(rho)


def _check_c(c: complex) -> complex:
    c = complex(c)
    if abs(c) > 1.0 + 1e-12:
        raise ValueError(f"|c| = {abs(c)} exceeds 1")
    return c


def kraus_operators(c: complex) -> Tuple[np.ndarray, np.ndarray]:
    c = _check_c(c)
    E0 = np.array([[1.0, 0.0], [0.0, c]], dtype=complex)
    E1 = np.array([[0.0, np.sqrt(max(1.0 - abs(c) ** 2, 0.0))], [0.0, 0.0]], dtype=complex)
    return E0, E1


def apply_amplitude_damping(rho: StateLike, c: complex) -> QubitState:
    state = _as_state(rho)
    if state.dim != 2:
        raise ValueError("amplitude damping acts on a single qubit")
    E0, E1 = kraus_operators(c)
    out = E0 @ state.rho @ E0.conj().T + E1 @ state.rho @ E1.conj().T
    return QubitState(out)


def choi_state(c: complex) -> QubitState:
    """Choi state of the damping channel, probe ``(|0_A 1_S> + |1_A 0_S>)/sqrt(2)``.

    The coherence ``<0_A 1_S|rho|1_A 0_S>`` is ``conj(c)/2``, which is the
    output of the damping with Kraus operator ``diag(1, conj(c))``. The two
    conventions differ by a local phase and share every entanglement value.
    """
    c = _check_c(c)
    a2 = abs(c) ** 2
    rho = 0.5 * np.array(
        [
            [1.0 - a2, 0, 0, 0],
            [0, a2, np.conj(c), 0],
            [0, c, 1.0, 0],
            [0, 0, 0, 0],
        ],
        dtype=complex,
    )
    return QubitState(rho)


def concurrence(rho: StateLike) -> float:
    """Wootters concurrence of a two-qubit state.

    The lambdas (square roots of the eigenvalues of ``rho rho~``) are taken as
    singular values of ``sqrt(rho) sqrt(rho~)``. This keeps them accurate to
    machine precision; square roots of tiny eigenvalues would amplify
    rounding to about 1e-9.
    """
    state = _as_state(rho)
    if state.dim != 4:
        raise ValueError("concurrence needs a two-qubit (4x4) state")
    w, v = np.linalg.eigh(state.rho)
    sqrt_r = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    sqrt_r_tilde = _SYSY @ sqrt_r.conj() @ _SYSY
    lam = np.linalg.svd(sqrt_r @ sqrt_r_tilde, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
