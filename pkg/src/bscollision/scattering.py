"""Beam-splitter scattering matrices and the channel coefficient c_L.

The system mode ``S`` meets a fresh environment mode at every step. Mode
indices of the (L+2)-dimensional matrices are ``S -> 0``, environment mode
``j -> j + 1`` (so the memory mode 0 sits at index 1).

Two routes give c_L = S_{S,S}(L):

* the reduced 2x2 matrix raised to the L-th power (:func:`c_series`), and
* the closed form in the eigenvalues of that matrix (:func:`c_closed_form`).

The full (L+2)-dimensional product (:func:`build_full_scattering`) is kept as
an oracle for both.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ._tolerances import DEGENERATE_GAP

__all__ = [
    "ChannelParams",
    "CoefficientSeries",
    "DegenerateSpectrumError",
    "build_step_matrix",
    "build_full_scattering",
    "reduced_step_matrix",
    "eigen_reduced",
    "is_degenerate",
    "c_closed_form",
    "c_series",
    "c_series_batch",
]

TWO_PI = 2.0 * np.pi


class DegenerateSpectrumError(ArithmeticError):
    """Raised when the reduced matrix has (numerically) coincident eigenvalues."""


@dataclass(frozen=True)
class ChannelParams:
    """The four knobs of the channel family.

    Parameters
    ----------
    r1 : float
        Reflectivity of the system-environment beam splitter, in [0, 1].
    r2 : float
        Reflectivity of the intra-environment beam splitter (memory), in [0, 1].
    phi : float
        Phase shift between consecutive collisions, in [0, 2*pi].
    n_T : float
        Mean thermal photon number of every environment mode, >= 0.
    """

    r1: float
    r2: float
    phi: float = 0.0
    n_T: float = 0.0

    def __post_init__(self):
        for name in ("r1", "r2", "phi", "n_T"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not 0.0 <= self.r1 <= 1.0:
            raise ValueError(f"r1 must lie in [0, 1], got {self.r1}")
        if not 0.0 <= self.r2 <= 1.0:
            raise ValueError(f"r2 must lie in [0, 1], got {self.r2}")
        # The closed endpoint 2*pi is accepted so that phase grids can include it.
        if not 0.0 <= self.phi <= TWO_PI:
            raise ValueError(f"phi must lie in [0, 2*pi], got {self.phi}")
        if self.n_T < 0.0:
            raise ValueError(f"n_T must be non-negative, got {self.n_T}")

    @property
    def t1(self) -> float:
        return float(np.sqrt(1.0 - self.r1**2))

    @property
    def t2(self) -> float:
        return float(np.sqrt(1.0 - self.r2**2))

    def replace(self, **changes) -> "ChannelParams":
        values = dict(r1=self.r1, r2=self.r2, phi=self.phi, n_T=self.n_T)
        values.update(changes)
        return ChannelParams(**values)

    def as_dict(self) -> dict:
        return dict(r1=self.r1, r2=self.r2, phi=self.phi, n_T=self.n_T)


@dataclass(frozen=True)
class CoefficientSeries:
    """The sequence c_0, ..., c_{L_max} for one parameter set."""

    params: ChannelParams
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a non-empty 1-d sequence")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def horizon(self) -> int:
        return self.values.size - 1

    @property
    def abs(self) -> np.ndarray:
        return np.abs(self.values)


def build_step_matrix(j: int, L: int, params: ChannelParams) -> np.ndarray:
    """Return the (L+2)x(L+2) unitary of collision ``j`` (1 <= j <= L).

    BS1 mixes ``S`` with memory mode 0, BS2 mixes mode 0 with the fresh mode
    ``j``, and the phase ``phi`` is picked up by ``S``.
    """
    if not 1 <= j <= L:
        raise ValueError(f"step index j={j} outside 1..{L}")
    r1, r2, t1, t2 = params.r1, params.r2, params.t1, params.t2
    e = np.exp(1j * params.phi)

    S = np.eye(L + 2, dtype=complex)
    idx = np.array([0, 1, j + 1])
    block = np.array(
        [
            [r1 * e, t1 * e, 0.0],
            [t1 * r2, -r1 * r2, t2],
            [t1 * t2, -r1 * t2, -r2],
        ]
    )
    S[np.ix_(idx, idx)] = block
    return S


def build_full_scattering(L: int, params: ChannelParams) -> np.ndarray:
    """Ordered product of the L step matrices, later collisions on the left.

    Only the (S, S) element enters the channel, and it does not depend on the
    ordering convention; the chronological order is the physical one.
    """
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    total = np.eye(L + 2, dtype=complex)
    for j in range(1, L + 1):
        total = build_step_matrix(j, L, params) @ total
    return total


def reduced_step_matrix(params: ChannelParams) -> np.ndarray:
    """The 2x2 matrix acting on (S, memory mode 0) while fresh modes are vacuum."""
    r1, r2, t1 = params.r1, params.r2, params.t1
    e = np.exp(1j * params.phi)
    return np.array([[r1 * e, t1 * e], [t1 * r2, -r1 * r2]], dtype=complex)


def eigen_reduced(params: ChannelParams) -> Tuple[complex, complex]:
    """Eigenvalues (lambda_plus, lambda_minus) of the reduced matrix.

    The principal branch of the complex square root is used. Callers who need
    to know about degeneracy should compare ``abs(lp - lm)`` against
    :data:`DEGENERATE_GAP`; :func:`c_closed_form` does this itself.
    """
    r1, r2 = params.r1, params.r2
    e = np.exp(1j * params.phi)
    trace = r1 * e - r1 * r2
    root = np.sqrt(complex(trace * trace + 4.0 * r2 * e))
    return complex(0.5 * (trace + root)), complex(0.5 * (trace - root))


def is_degenerate(params: ChannelParams) -> bool:
    lp, lm = eigen_reduced(params)
    return abs(lp - lm) < DEGENERATE_GAP


def c_closed_form(L: int, params: ChannelParams) -> complex:
    """c_L from the eigen-decomposition of the reduced matrix.

    Raises
    ------
    DegenerateSpectrumError
        If the two eigenvalues coincide; use :func:`c_series` instead.
    """
    if L < 0:
        raise ValueError(f"L must be >= 0, got {L}")
    lp, lm = eigen_reduced(params)
    gap = lp - lm
    if abs(gap) < DEGENERATE_GAP:
        raise DegenerateSpectrumError(
            f"|lambda+ - lambda-| = {abs(gap):.3e}; use c_series for these parameters"
        )
    if L == 0:
        return 1.0 + 0.0j
    a = params.r1 * np.exp(1j * params.phi)
    # c_L = a D_L - lp lm D_{L-1} with D_n = (lp^n - lm^n) / (lp - lm).
    return complex(a * _divided_power(lp, lm, L) - lp * lm * _divided_power(lp, lm, L - 1))


def _divided_power(lp: complex, lm: complex, n: int) -> complex:
    """(lp^n - lm^n) / (lp - lm) for n >= 0."""
    if n == 0:
        return 0.0
    gap = lp - lm
    if abs(gap) > 1e-3 * (abs(lp) + abs(lm)):
        return (lp**n - lm**n) / gap
    # Near a double root the difference of powers cancels; the symmetric sum
    # lp^{n-1} + lp^{n-2} lm + ... + lm^{n-1} does not.
    k = np.arange(n)
    return complex(np.sum(lp**k * lm ** (n - 1 - k)))


def c_series_batch(r1, r2, phi, L_max: int) -> np.ndarray:
    """Vectorised c_0..c_{L_max} for broadcastable parameter arrays.

    Returns an array of shape ``broadcast(r1, r2, phi).shape + (L_max + 1,)``.
    No validation is done here; :class:`ChannelParams` is the checked entry.
    """
    if L_max < 0:
        raise ValueError(f"L_max must be >= 0, got {L_max}")
    r1, r2, phi = np.broadcast_arrays(
        np.asarray(r1, float), np.asarray(r2, float), np.asarray(phi, float)
    )
    shape = r1.shape
    e = np.exp(1j * phi)
    t1 = np.sqrt(1.0 - r1**2)
    A = np.empty(shape + (2, 2), dtype=complex)
    A[..., 0, 0] = r1 * e
    A[..., 0, 1] = t1 * e
    A[..., 1, 0] = t1 * r2
    A[..., 1, 1] = -r1 * r2

    out = np.empty(shape + (L_max + 1,), dtype=complex)
    out[..., 0] = 1.0
    # Only the first row of A^L is needed: row_{L} = row_{L-1} @ A.
    row = np.zeros(shape + (2,), dtype=complex)
    row[..., 0] = 1.0
    for L in range(1, L_max + 1):
        row = np.einsum("...i,...ij->...j", row, A)
        out[..., L] = row[..., 0]
    return out


def c_series(L_max: int, params: ChannelParams) -> CoefficientSeries:
    """c_0..c_{L_max} by repeated multiplication with the reduced 2x2 matrix."""
    values = c_series_batch(params.r1, params.r2, params.phi, L_max)
    return CoefficientSeries(params=params, values=values)
