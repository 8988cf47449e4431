"""Divisibility test and revival-based non-Markovianity witnesses.

Every witness evolves some probe through the channels ``E_1, ..., E_Lmax``,
records a scalar figure per step and flags the steps where it moves the
wrong way. Verdicts are always relative to the finite horizon ``L_max``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np

from . import gaussian as g
from .qubit import choi_state, concurrence
from .scattering import ChannelParams, CoefficientSeries, c_series
from ._tolerances import DEFAULT_LMAX, MONOTONE_TOL, SINGULAR_EPS

__all__ = [
    "Verdict",
    "WitnessSeries",
    "IntermediateMap",
    "SingularStepError",
    "intermediate_map",
    "classify_divisibility",
    "cp_divisibility",
    "coarse_grain",
    "entanglement_revival_witness",
    "concurrence_witness",
    "fidelity_witness",
    "relative_entropy_witness",
    "threshold_temperature",
    "WITNESS_KINDS",
]

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])


class Verdict(str, enum.Enum):
    MARKOVIAN = "markovian"
    NON_MARKOVIAN = "non_markovian"
    SINGULAR = "singular"

    @property
    def code(self) -> int:
        return {"markovian": 0, "non_markovian": 1, "singular": 2}[self.value]

    @classmethod
    def from_code(cls, code: int) -> "Verdict":
        return [cls.MARKOVIAN, cls.NON_MARKOVIAN, cls.SINGULAR][int(code)]


class SingularStepError(ArithmeticError):
    """The previous channel is not invertible (c_{L-1} = 0)."""


@dataclass(frozen=True)
class WitnessSeries:
    """Per-step values of one witness together with its verdict.

    ``violation_steps`` lists the L at which the monotonicity expected of a
    divisible process is broken; the verdict is non-Markovian exactly when it
    is non-empty. ``singular_steps`` (divisibility only) are steps whose
    intermediate map is undefined, and ``infinite_steps`` flags steps whose
    value is ``+inf`` (relative entropy against a pure state).
    """

    kind: str
    values: np.ndarray = field(repr=False)
    verdict: Verdict
    violation_steps: Tuple[int, ...]
    horizon: int
    singular_steps: Tuple[int, ...] = ()
    infinite_steps: Tuple[int, ...] = ()

    def __post_init__(self):
        if (self.verdict is Verdict.NON_MARKOVIAN) != bool(self.violation_steps):
            raise ValueError("verdict must be non_markovian iff there are violations")

    @property
    def is_markovian(self) -> bool:
        return self.verdict is Verdict.MARKOVIAN


@dataclass(frozen=True)
class IntermediateMap:
    """The map taking the output of step L-1 to the output of step L."""

    c_r: complex
    n_T: float
    M: np.ndarray = field(repr=False)
    eigenvalues: Tuple[float, float]
    closed_form: Tuple[float, float]

    @property
    def is_cp(self) -> bool:
        return min(self.eigenvalues) >= -1e-12


def intermediate_map(cL: complex, cLm1: complex, n_T: float) -> IntermediateMap:
    """CP test for ``E_L o E_{L-1}^{-1}``: it is CP iff ``M >= 0``.

    ``M = 2 alpha - sigma_y + K^T sigma_y K`` with K, alpha the phase-space
    action of an attenuator with coefficient ``c_r = c_L / c_{L-1}``.
    """
    if abs(cLm1) <= SINGULAR_EPS:
        raise SingularStepError("channel not invertible at this step: c_{L-1} = 0")
    return _map_from_ratio(complex(cL) / complex(cLm1), n_T)


def _map_from_ratio(c_r: complex, n_T: float) -> IntermediateMap:
    action = g.channel_action(c_r, n_T)
    K = action.K
    M = 2.0 * action.alpha - _SIGMA_Y + K.T @ _SIGMA_Y @ K
    numeric = np.linalg.eigvalsh(M)
    shrink = 1.0 - abs(c_r) ** 2
    closed = (2.0 * (n_T + 1.0) * shrink, 2.0 * n_T * shrink)
    return IntermediateMap(
        c_r=c_r,
        n_T=float(n_T),
        M=M,
        eigenvalues=(float(numeric[0]), float(numeric[1])),
        closed_form=closed,
    )


def _revivals(values: np.ndarray, tol: float, increasing: bool) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Steps L where ``values`` moves against the expected direction
    (``increasing=True``: expected non-decreasing).

    Values may be ``+inf``. Pairs are compared in the extended reals:
    finite -> inf is an increase and inf -> inf is no change. The indices of
    infinite values are returned as the second element.
    """
    values = np.asarray(values, dtype=float)
    if np.isnan(values).any():
        raise FloatingPointError("witness series contains NaN")
    prev, cur = values[:-1], values[1:]
    if increasing:
        prev, cur = cur, prev
    both_inf = np.isinf(prev) & np.isinf(cur)
    with np.errstate(invalid="ignore"):
        bad = ~both_inf & (cur - prev > tol)
    infinite = tuple(int(i) for i in np.flatnonzero(np.isinf(values)))
    return tuple(int(i) + 1 for i in np.flatnonzero(bad)), infinite


def _make_series(kind, values, violations, horizon, singular=(), infinite=()):
    if violations:
        verdict = Verdict.NON_MARKOVIAN
    elif singular:
        verdict = Verdict.SINGULAR
    else:
        verdict = Verdict.MARKOVIAN
    values = np.asarray(values)
    values.setflags(write=False)
    return WitnessSeries(
        kind=kind,
        values=values,
        verdict=verdict,
        violation_steps=tuple(violations),
        horizon=horizon,
        singular_steps=tuple(singular),
        infinite_steps=tuple(infinite),
    )


def _divisibility_steps(abs_c: np.ndarray, tol: float):
    """Violations and singular steps of ``|c_L| <= |c_{L-1}|``, relative tolerance.

    Step L is singular when ``|c_{L-1}| <= SINGULAR_EPS |c_L|`` with
    ``c_L != 0``: the ratio c_L / c_{L-1} is then numerically infinite. The
    guard is relative for the same reason the tolerance is, because |c_L|
    routinely decays below 1e-14 before the first revival. When both are
    zero nothing can revive and the step counts as divisible.

    Works on the last axis so that whole grids can be classified at once.
    """
    prev, cur = abs_c[..., :-1], abs_c[..., 1:]
    singular = (cur > 0.0) & (prev <= SINGULAR_EPS * cur)
    violation = ~singular & (cur > prev * (1.0 + tol))
    return violation, singular


def classify_divisibility(series: CoefficientSeries, tol: float = MONOTONE_TOL) -> WitnessSeries:
    """Markovian iff ``|c_L| <= |c_{L-1}|`` for every L within the horizon.

    The comparison is relative, ``|c_L| > (1 + tol) |c_{L-1}|`` counts as a
    violation, so late revivals stay visible after |c_L| has decayed by many
    orders of magnitude. A step with ``c_{L-1} = 0 != c_L`` has no
    intermediate map; it is reported as singular, never as a violation. When
    both vanish the step is trivially divisible.
    """
    if len(series) < 2:
        raise ValueError("need at least c_0 and c_1 to classify")
    abs_c = series.abs
    violation, singular = _divisibility_steps(abs_c, tol)
    return _make_series(
        "coefficient",
        abs_c,
        [int(i) + 1 for i in np.flatnonzero(violation)],
        series.horizon,
        singular=[int(i) + 1 for i in np.flatnonzero(singular)],
    )


def cp_divisibility(series: CoefficientSeries, n_T: float, tol: float = MONOTONE_TOL) -> WitnessSeries:
    """Same verdict as :func:`classify_divisibility`, obtained from the
    eigenvalues of M for every intermediate map.

    ``|c_r| > 1 + tol`` corresponds to ``lambda_min < -2 (n_T + 1)(2 tol + tol^2)``,
    which is the eigenvalue threshold used here.
    """
    values = series.values
    eig_tol = 2.0 * (n_T + 1.0) * (2.0 * tol + tol * tol)
    lam_min = np.full(len(values), np.nan)
    violations, singular = [], []
    for L in range(1, len(values)):
        prev, cur = abs(values[L - 1]), abs(values[L])
        if cur == 0.0:
            continue
        if prev <= SINGULAR_EPS * cur:
            singular.append(L)
            continue
        # Polar form: complex division overflows on subnormal operands.
        c_r = (cur / prev) * np.exp(1j * (np.angle(values[L]) - np.angle(values[L - 1])))
        m = _map_from_ratio(c_r, n_T)
        lam_min[L] = min(m.eigenvalues)
        if lam_min[L] < -eig_tol:
            violations.append(L)
    return _make_series("coefficient", lam_min, violations, series.horizon, singular=singular)


def coarse_grain(series: Union[CoefficientSeries, Sequence[float]], delta: int, inclusive: bool = True) -> np.ndarray:
    """Grain averages of ``|c_k|``: ``(1/delta) sum_{k=(n-1)delta}^{n delta} |c_k|``.

    With ``inclusive=True`` (default) both ends of every window are summed,
    i.e. ``delta + 1`` terms divided by ``delta``. ``inclusive=False`` drops
    the upper end and gives plain ``delta``-term means.
    """
    if int(delta) != delta or delta <= 0:
        raise ValueError(f"grain size must be a positive integer, got {delta}")
    delta = int(delta)
    if isinstance(series, CoefficientSeries):
        mags = series.abs
    else:
        mags = np.abs(np.asarray(series))
    if mags.size < delta:
        raise ValueError("series shorter than one grain")
    if inclusive:
        n_grains = (mags.size - 1) // delta
        width = delta + 1
    else:
        n_grains = mags.size // delta
        width = delta
    starts = np.arange(n_grains) * delta
    return np.array([mags[s : s + width].sum() / delta for s in starts])


# -- probe-based witnesses --------------------------------------------------


def _check_horizon(L_max: int) -> int:
    if int(L_max) != L_max or L_max < 1:
        raise ValueError(f"L_max must be a positive integer, got {L_max}")
    return int(L_max)


def entanglement_revival_witness(
    params: ChannelParams,
    L_max: int = DEFAULT_LMAX,
    xi: float = 1.0,
    tol: float = MONOTONE_TOL,
    series: CoefficientSeries = None,
) -> WitnessSeries:
    """Logarithmic negativity of ``tmsv(xi)`` with the system half in the channel."""
    if xi <= 0:
        raise ValueError(f"squeezing xi must be positive, got {xi}")
    series = series if series is not None else c_series(_check_horizon(L_max), params)
    probe = g.tmsv(xi)
    _, cov = g._apply_arrays(probe.mean, probe.cov, 1, series.values, params.n_T)
    e_n = g._log_negativity_cov(cov)
    violations, _ = _revivals(e_n, tol, increasing=False)
    return _make_series("entanglement", e_n, violations, series.horizon)


def concurrence_witness(
    params: ChannelParams,
    L_max: int = DEFAULT_LMAX,
    tol: float = MONOTONE_TOL,
    series: CoefficientSeries = None,
) -> WitnessSeries:
    """Concurrence of the single-photon Choi state; zero temperature only."""
    if params.n_T != 0:
        raise ValueError("the qubit reduction holds only for n_T = 0")
    series = series if series is not None else c_series(_check_horizon(L_max), params)
    values = np.array([concurrence(choi_state(_clip_unit(c))) for c in series.values])
    violations, _ = _revivals(values, tol, increasing=False)
    return _make_series("concurrence", values, violations, series.horizon)


def _clip_unit(c: complex) -> complex:
    # Rounding can push |c| a hair above 1 when r1 or r2 equals 1.
    a = abs(c)
    return c / a if a > 1.0 else c


def _probe_pair(xi1: float, xi2: float, probes: str):
    if xi1 == xi2:
        raise ValueError("probe parameters coincide; the two states are indistinguishable")
    if probes == "squeezed":
        return g.squeezed_vacuum(xi1), g.squeezed_vacuum(xi2)
    if probes == "coherent":
        return g.coherent(xi1), g.coherent(xi2)
    raise ValueError(f"probes must be 'squeezed' or 'coherent', got {probes!r}")


def _evolve_pair(params, L_max, xi1, xi2, probes, series):
    s1, s2 = _probe_pair(xi1, xi2, probes)
    series = series if series is not None else c_series(_check_horizon(L_max), params)
    c = series.values
    m1, V1 = g._apply_arrays(s1.mean, s1.cov, 0, c, params.n_T)
    m2, V2 = g._apply_arrays(s2.mean, s2.cov, 0, c, params.n_T)
    return series, (m1, V1), (m2, V2)


def fidelity_witness(
    params: ChannelParams,
    L_max: int = DEFAULT_LMAX,
    xi1: float = 1.0,
    xi2: float = 0.5,
    probes: str = "squeezed",
    tol: float = MONOTONE_TOL,
    series: CoefficientSeries = None,
) -> WitnessSeries:
    """Fidelity between two evolved probes; a divisible process never lowers it.

    ``probes='squeezed'`` uses squeezed vacua with parameters ``xi1``, ``xi2``;
    ``probes='coherent'`` uses coherent states with real amplitudes ``xi1``, ``xi2``.
    """
    series, (m1, V1), (m2, V2) = _evolve_pair(params, L_max, xi1, xi2, probes, series)
    values = g._fidelity_arrays(m1, V1, m2, V2)
    violations, _ = _revivals(values, tol, increasing=True)
    return _make_series("fidelity", values, violations, series.horizon)


def relative_entropy_witness(
    params: ChannelParams,
    L_max: int = DEFAULT_LMAX,
    xi1: float = 1.0,
    xi2: float = 0.5,
    probes: str = "squeezed",
    reverse: bool = False,
    tol: float = MONOTONE_TOL,
    series: CoefficientSeries = None,
) -> WitnessSeries:
    """Relative entropy ``S(rho1(L) || rho2(L))`` of two evolved probes.

    Steps where it is infinite (pure second argument, different first
    argument) are listed in ``infinite_steps``. They still take part in the
    monotonicity test: a jump from a finite value to ``+inf`` is a revival,
    as happens at r2 = 1 whenever |c_L| returns to 1.
    """
    series, (m1, V1), (m2, V2) = _evolve_pair(params, L_max, xi1, xi2, probes, series)
    if reverse:
        (m1, V1), (m2, V2) = (m2, V2), (m1, V1)
    values = g._relative_entropy_arrays(m1, V1, m2, V2)
    violations, infinite = _revivals(values, tol, increasing=False)
    return _make_series("relative_entropy", values, violations, series.horizon, infinite=infinite)


def threshold_temperature(r1: float) -> float:
    """Temperature above which entanglement revivals stop tracking divisibility."""
    if not 0.0 <= r1 <= 1.0:
        raise ValueError(f"r1 must lie in [0, 1], got {r1}")
    if r1 == 1.0:
        return float("inf")
    return r1**2 / (1.0 - r1**2)


WITNESS_KINDS = ("divisibility", "entanglement", "concurrence", "fidelity", "relative_entropy")
