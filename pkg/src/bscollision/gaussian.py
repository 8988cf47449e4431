"""One- and two-mode Gaussian states and the induced thermal attenuator.

Conventions
-----------
Quadratures are ordered ``(x1, p1, x2, p2)`` with ``x = (a + a^dag)/sqrt(2)``;
covariances are symmetrically ordered, so the vacuum has covariance ``I/2``.
A coherent state ``|alpha>`` has mean ``sqrt(2) (Re alpha, Im alpha)``.

Single-mode squeezing follows ``cov = diag(e^{-2 xi}, e^{2 xi}) / 2``. The
two-mode squeezed vacuum is parameterised with ``cosh(xi)``/``sinh(xi)``
blocks, i.e. ``tmsv(xi)`` equals the usual two-mode squeezer with parameter
``xi/2``; its logarithmic negativity is exactly ``xi``.

The channel with coefficient ``c`` maps the mode annihilation operator to
``c a + (environment)``, so quadratures rotate by ``arg c`` and shrink by
``|c|`` while thermal noise ``(n_T + 1/2)(1 - |c|^2)`` is added.

Most numerical kernels here broadcast over leading axes so that witnesses can
evaluate whole trajectories at once; the public functions wrap them for
single :class:`GaussianState` objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._tolerances import PSD_FLOOR, STATE_ATOL

__all__ = [
    "GaussianState",
    "ChannelAction",
    "InvalidStateError",
    "symplectic_form",
    "vacuum",
    "thermal",
    "coherent",
    "squeezed_vacuum",
    "tmsv",
    "make_state",
    "channel_action",
    "apply_channel",
    "log_negativity",
    "fidelity",
    "relative_entropy",
    "von_neumann_entropy",
]

#: ``nu - 1/2`` below this marks a pure single-mode state.
PURE_EPS = 1e-12

_SIGMA_Z = np.diag([1.0, -1.0])


class InvalidStateError(ValueError):
    """The covariance matrix does not describe a physical state."""


def symplectic_form(n_modes: int) -> np.ndarray:
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), omega)


@dataclass(frozen=True)
class GaussianState:
    """Mean vector and covariance matrix of a 1- or 2-mode Gaussian state."""

    mean: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size not in (2, 4):
            raise InvalidStateError("only 1- and 2-mode states are supported")
        if cov.shape != (mean.size, mean.size):
            raise InvalidStateError(
                f"covariance shape {cov.shape} does not match mean of size {mean.size}"
            )
        if np.abs(cov - cov.T).max() > STATE_ATOL:
            raise InvalidStateError("covariance matrix is not symmetric")
        n = mean.size // 2
        bona_fide = cov + 0.5j * symplectic_form(n)
        if np.linalg.eigvalsh(bona_fide).min() < -PSD_FLOOR:
            raise InvalidStateError("covariance violates the uncertainty relation")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def isclose(self, other: "GaussianState", atol: float = 1e-10) -> bool:
        return (
            self.n_modes == other.n_modes
            and np.allclose(self.mean, other.mean, rtol=0.0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0.0, atol=atol)
        )


@dataclass(frozen=True)
class ChannelAction:
    """Phase-space action ``chi(z) -> chi(K z) exp(-z^T alpha z / 2)``."""

    K: np.ndarray
    alpha: np.ndarray


# -- states -----------------------------------------------------------------


def vacuum() -> GaussianState:
    return GaussianState(np.zeros(2), 0.5 * np.eye(2))


def thermal(n_T: float) -> GaussianState:
    if n_T < 0:
        raise ValueError(f"n_T must be non-negative, got {n_T}")
    return GaussianState(np.zeros(2), (n_T + 0.5) * np.eye(2))


def coherent(alpha: complex) -> GaussianState:
    alpha = complex(alpha)
    return GaussianState(np.sqrt(2.0) * np.array([alpha.real, alpha.imag]), 0.5 * np.eye(2))


def squeezed_vacuum(xi: float) -> GaussianState:
    return GaussianState(np.zeros(2), 0.5 * np.diag([np.exp(-2 * xi), np.exp(2 * xi)]))


def tmsv(xi: float) -> GaussianState:
    """Two-mode squeezed vacuum, modes ordered (ancilla A, system S)."""
    ch, sh = np.cosh(xi), np.sinh(xi)
    cov = 0.5 * np.block([[ch * np.eye(2), -sh * _SIGMA_Z], [-sh * _SIGMA_Z, ch * np.eye(2)]])
    return GaussianState(np.zeros(4), cov)


_KINDS = {
    "vacuum": lambda value: vacuum(),
    "thermal": thermal,
    "coherent": coherent,
    "squeezed_vacuum": squeezed_vacuum,
    "tmsv": tmsv,
}


def make_state(kind: str, value=None) -> GaussianState:
    """Build a named state; ``value`` is n_T, alpha or xi depending on ``kind``."""
    try:
        factory = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown state kind {kind!r}; choose from {sorted(_KINDS)}") from None
    if kind != "vacuum" and value is None:
        raise ValueError(f"state kind {kind!r} needs a parameter")
    return factory(value)


# -- channel ----------------------------------------------------------------


def _rotation(c) -> np.ndarray:
    """K^T for a stack of coefficients: quadrature map of ``a -> c a``."""
    c = np.asarray(c, dtype=complex)
    R = np.empty(c.shape + (2, 2))
    R[..., 0, 0] = c.real
    R[..., 0, 1] = -c.imag
    R[..., 1, 0] = c.imag
    R[..., 1, 1] = c.real
    return R


def channel_action(c: complex, n_T: float) -> ChannelAction:
    """K and alpha matrices of the attenuator with coefficient ``c``.

    ``|c| > 1`` is allowed so that intermediate maps can be analysed.
    """
    c = complex(c)
    K = np.array([[c.real, c.imag], [-c.imag, c.real]])
    alpha = (n_T + 0.5) * (1.0 - abs(c) ** 2) * np.eye(2)
    return ChannelAction(K=K, alpha=alpha)


def _apply_arrays(mean, cov, mode: int, c, n_T: float):
    """Broadcast the channel over a stack of coefficients ``c``.

    ``mean``/``cov`` describe one state; the result has leading shape ``c.shape``.
    """
    c = np.asarray(c, dtype=complex)
    dim = mean.shape[-1]
    R = _rotation(c)
    T = np.broadcast_to(np.eye(dim), c.shape + (dim, dim)).copy()
    sl = slice(2 * mode, 2 * mode + 2)
    T[..., sl, sl] = R
    out_mean = np.einsum("...ij,j->...i", T, mean)
    out_cov = T @ cov @ np.swapaxes(T, -1, -2)
    noise = (n_T + 0.5) * (1.0 - np.abs(c) ** 2)
    out_cov[..., sl, sl] += noise[..., None, None] * np.eye(2)
    return out_mean, out_cov


def apply_channel(state: GaussianState, mode: int, c: complex, n_T: float) -> GaussianState:
    """Send ``mode`` of ``state`` through the attenuator; other modes are untouched.

    Raises :class:`InvalidStateError` if the output is unphysical, which
    happens for ``|c| > 1``.
    """
    if not 0 <= mode < state.n_modes:
        raise ValueError(f"mode {mode} out of range for a {state.n_modes}-mode state")
    if n_T < 0:
        raise ValueError(f"n_T must be non-negative, got {n_T}")
    mean, cov = _apply_arrays(state.mean, state.cov, mode, complex(c), n_T)
    return GaussianState(mean, 0.5 * (cov + cov.T))


# -- figures of merit -------------------------------------------------------


def _log_negativity_cov(cov: np.ndarray) -> np.ndarray:
    A = cov[..., :2, :2]
    B = cov[..., 2:, 2:]
    C = cov[..., :2, 2:]
    sigma = np.linalg.det(A) + np.linalg.det(B) - 2.0 * np.linalg.det(C)
    det_v = np.linalg.det(cov)
    disc = sigma**2 - 4.0 * det_v
    if np.any(disc < -1e-10 * np.maximum(sigma**2, 1.0)):
        raise InvalidStateError("two-mode covariance has no real symplectic spectrum")
    disc = np.clip(disc, 0.0, None)
    # mu^2 = (sigma - sqrt(disc)) / 2 written without cancellation.
    mu2 = 2.0 * det_v / (sigma + np.sqrt(disc))
    return np.maximum(-0.5 * np.log(4.0 * mu2), 0.0)


def log_negativity(state: GaussianState) -> float:
    """Logarithmic negativity of a two-mode state, from its smallest
    partially transposed symplectic eigenvalue."""
    if state.n_modes != 2:
        raise ValueError("log_negativity needs a two-mode state")
    return float(_log_negativity_cov(state.cov))


def _fidelity_arrays(m1, V1, m2, V2) -> np.ndarray:
    Vs = V1 + V2
    big = 4.0 * np.linalg.det(Vs)
    small = (4.0 * np.linalg.det(V1) - 1.0) * (4.0 * np.linalg.det(V2) - 1.0)
    small = np.clip(small, 0.0, None)
    d = m2 - m1
    quad = np.einsum("...i,...i->...", d, np.linalg.solve(Vs, d[..., None])[..., 0])
    return 2.0 / (np.sqrt(big + small) - np.sqrt(small)) * np.exp(-0.5 * quad)


def fidelity(s1: GaussianState, s2: GaussianState) -> float:
    """Fidelity ``(Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2`` of two single-mode states."""
    if s1.n_modes != 1 or s2.n_modes != 1:
        raise ValueError("fidelity is implemented for single-mode states")
    if abs(np.linalg.det(s1.cov + s2.cov)) < 1e-300:
        raise InvalidStateError("V1 + V2 is singular")
    return float(_fidelity_arrays(s1.mean, s1.cov, s2.mean, s2.cov))


def _g(nu) -> np.ndarray:
    """(nu + 1/2) ln(nu + 1/2) - (nu - 1/2) ln(nu - 1/2), with 0 ln 0 = 0."""
    nu = np.asarray(nu, dtype=float)
    lo = np.clip(nu - 0.5, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(lo > 0, lo * np.log(np.where(lo > 0, lo, 1.0)), 0.0)
    return (nu + 0.5) * np.log(nu + 0.5) - tail


def von_neumann_entropy(state: GaussianState) -> float:
    if state.n_modes != 1:
        raise ValueError("von_neumann_entropy is implemented for single-mode states")
    nu = np.sqrt(np.linalg.det(state.cov))
    if nu < 0.5 - PSD_FLOOR:
        raise InvalidStateError(f"symplectic eigenvalue {nu} < 1/2")
    return float(_g(max(nu, 0.5)))


def _relative_entropy_arrays(m1, V1, m2, V2, atol: float = 1e-10) -> np.ndarray:
    """S(rho1 || rho2) = Tr rho1 (ln rho1 - ln rho2), broadcast over leading axes.

    With ``V2 = nu2 S S^T`` (Williamson form), ``rho2`` is a squeezed, displaced
    thermal state with ``n2 = nu2 - 1/2`` and ``ln rho2 = -ln(n2 + 1) + b/2 -
    (b nu2 / 2) (x - m2)^T V2^{-1} (x - m2)`` where ``b = ln((nu2 + 1/2)/n2)``.
    Taking the expectation in rho1 gives the expression below. A pure rho2
    gives +inf unless the states coincide.
    """
    nu1 = np.sqrt(np.clip(np.linalg.det(V1), 0.25, None))
    nu2 = np.sqrt(np.clip(np.linalg.det(V2), 0.25, None))
    d = m1 - m2
    V2inv = np.linalg.inv(V2)
    trace = np.einsum("...ij,...ji->...", V2inv, V1)
    quad = np.einsum("...i,...ij,...j->...", d, V2inv, d)

    n2 = nu2 - 0.5
    pure2 = n2 <= PURE_EPS
    safe_n2 = np.where(pure2, 1.0, n2)
    beta = np.log((nu2 + 0.5) / safe_n2)
    cross = np.log(safe_n2 + 1.0) - 0.5 * beta + 0.5 * beta * nu2 * (trace + quad)
    value = cross - _g(nu1)

    same = (
        np.all(np.abs(V1 - V2) <= atol, axis=(-2, -1))
        & np.all(np.abs(m1 - m2) <= atol, axis=-1)
    )
    value = np.where(pure2, np.where(same, 0.0, np.inf), value)
    return np.where(same & ~pure2, np.clip(value, 0.0, None), value)


def relative_entropy(s1: GaussianState, s2: GaussianState, reverse: bool = False) -> float:
    """Quantum relative entropy of two single-mode Gaussian states.

    By default this is ``S(s1 || s2) = Tr s1 (ln s1 - ln s2)``. With
    ``reverse=True`` the arguments swap roles, ``Tr s2 (ln s2 - ln s1)``.
    Returns ``inf`` when the state inside the logarithm is pure and differs
    from the other one.
    """
    if s1.n_modes != 1 or s2.n_modes != 1:
        raise ValueError("relative_entropy is implemented for single-mode states")
    if reverse:
        s1, s2 = s2, s1
    return float(_relative_entropy_arrays(s1.mean, s1.cov, s2.mean, s2.cov))
