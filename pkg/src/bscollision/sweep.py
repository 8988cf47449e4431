"""Region maps over two-parameter planes and their boundaries."""

from __future__ import annotations

import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import witnesses as w
from .scattering import ChannelParams, c_series, c_series_batch
from ._tolerances import DEFAULT_LMAX, MONOTONE_TOL

__all__ = [
    "Axis",
    "RegionMap",
    "Boundary",
    "scan",
    "evaluate_cell",
    "extract_boundary",
    "analytic_boundary",
    "phi_pi_boundary_r2",
    "second_step_boundary",
    "bisect_boundary",
    "default_workers",
    "PARAM_NAMES",
]

PARAM_NAMES = ("r1", "r2", "phi", "n_T")
_CHUNK = 4096


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    n_points: int

    def __post_init__(self):
        if self.name not in PARAM_NAMES:
            raise ValueError(f"unknown axis {self.name!r}; choose from {PARAM_NAMES}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError("an axis needs at least 2 points")
        if self.max < self.min:
            raise ValueError(f"axis {self.name}: max < min")
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "max", float(self.max))
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.n_points)

    @property
    def step(self) -> float:
        return (self.max - self.min) / (self.n_points - 1)

    @classmethod
    def parse(cls, text: str, default_points: int = 101) -> "Axis":
        """``"name:min:max"`` or ``"name:min:max:n"``."""
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ValueError(f"axis spec {text!r} must be name:min:max[:n]")
        n = int(parts[3]) if len(parts) == 4 else default_points
        return cls(parts[0], float(parts[1]), float(parts[2]), n)

    def as_dict(self) -> dict:
        return dict(name=self.name, min=self.min, max=self.max, n_points=self.n_points)


@dataclass(frozen=True)
class RegionMap:
    """Verdict codes on a grid; ``verdicts[i, j]`` belongs to
    ``(axis1.values[i], axis2.values[j])``. Codes: 0 markovian,
    1 non-Markovian, 2 singular."""

    axis1: Axis
    axis2: Axis
    verdicts: np.ndarray = field(repr=False)
    witness: str
    fixed: Dict[str, float]
    horizon: int
    options: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.verdicts, dtype=np.int8)
        if v.shape != (self.axis1.n_points, self.axis2.n_points):
            raise ValueError("verdict grid does not match the axes")
        if not np.isin(v, (0, 1, 2)).all():
            raise ValueError("verdict codes must be 0, 1 or 2")
        v.setflags(write=False)
        object.__setattr__(self, "verdicts", v)

    def __eq__(self, other):
        if not isinstance(other, RegionMap):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def to_dict(self) -> dict:
        return {
            "axis1": self.axis1.as_dict(),
            "axis2": self.axis2.as_dict(),
            "witness": self.witness,
            "fixed": dict(sorted(self.fixed.items())),
            "horizon": self.horizon,
            "options": dict(sorted(self.options.items())),
            "verdicts": self.verdicts.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RegionMap":
        return cls(
            axis1=Axis(**data["axis1"]),
            axis2=Axis(**data["axis2"]),
            verdicts=np.array(data["verdicts"], dtype=np.int8),
            witness=data["witness"],
            fixed=dict(data["fixed"]),
            horizon=int(data["horizon"]),
            options=dict(data.get("options", {})),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RegionMap":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """Long format: one row per cell, columns ``<axis1>,<axis2>,verdict``."""
        buf = io.StringIO()
        buf.write(f"{self.axis1.name},{self.axis2.name},verdict\n")
        for i, x in enumerate(self.axis1.values):
            for j, y in enumerate(self.axis2.values):
                buf.write(f"{float(x)!r},{float(y)!r},{int(self.verdicts[i, j])}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class Boundary:
    """Boundary polyline; ``skipped`` lists axis1 values without a transition."""

    points: np.ndarray
    skipped: Tuple[float, ...] = ()

    @property
    def empty(self) -> bool:
        return len(self.points) == 0

    def to_csv(self, names=("axis1", "axis2")) -> str:
        lines = [f"{names[0]},{names[1]}"]
        lines += [f"{float(x)!r},{float(y)!r}" for x, y in self.points]
        return "\n".join(lines) + "\n"


def _cell_params(fixed: Dict[str, float], **values) -> ChannelParams:
    merged = dict(fixed)
    merged.update(values)
    return ChannelParams(**{k: merged.get(k, 0.0) for k in PARAM_NAMES})


def evaluate_cell(
    params: ChannelParams,
    witness: str,
    L_max: int = DEFAULT_LMAX,
    tol: float = MONOTONE_TOL,
    **probe,
) -> w.WitnessSeries:
    """Run one witness at one parameter point."""
    if witness == "divisibility":
        return w.classify_divisibility(c_series(L_max, params), tol=tol)
    if witness == "entanglement":
        return w.entanglement_revival_witness(params, L_max, xi=probe.get("xi", 1.0), tol=tol)
    if witness == "concurrence":
        return w.concurrence_witness(params, L_max, tol=tol)
    if witness in ("fidelity", "relative_entropy"):
        fn = w.fidelity_witness if witness == "fidelity" else w.relative_entropy_witness
        kwargs = dict(
            xi1=probe.get("xi1", 1.0),
            xi2=probe.get("xi2", 0.5),
            probes=probe.get("probes", "squeezed"),
            tol=tol,
        )
        return fn(params, L_max, **kwargs)
    raise ValueError(f"unknown witness {witness!r}; choose from {w.WITNESS_KINDS}")


def _check_plane(axis1: Axis, axis2: Axis, fixed: Dict[str, float]):
    if axis1.name == axis2.name:
        raise ValueError("the two axes must name different parameters")
    for name in fixed:
        if name not in PARAM_NAMES:
            raise ValueError(f"unknown fixed parameter {name!r}")
    # Validates the corners; every interior point lies between them.
    for x in (axis1.min, axis1.max):
        for y in (axis2.min, axis2.max):
            _cell_params(fixed, **{axis1.name: x, axis2.name: y})


def _scan_divisibility(axis1, axis2, fixed, L_max, tol) -> np.ndarray:
    X, Y = np.meshgrid(axis1.values, axis2.values, indexing="ij")
    grid = {k: np.full(X.shape, float(fixed.get(k, 0.0))) for k in PARAM_NAMES}
    grid[axis1.name] = X
    grid[axis2.name] = Y
    flat = {k: v.reshape(-1) for k, v in grid.items()}
    codes = np.empty(X.size, dtype=np.int8)
    for start in range(0, X.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        c = c_series_batch(flat["r1"][sl], flat["r2"][sl], flat["phi"][sl], L_max)
        violation, singular = w._divisibility_steps(np.abs(c), tol)
        code = np.where(singular.any(axis=-1), 2, 0)
        codes[sl] = np.where(violation.any(axis=-1), 1, code)
    return codes.reshape(X.shape)


def _scan_row(args) -> List[int]:
    x, axis1_name, axis2, fixed, witness, L_max, tol, probe = args
    row = []
    for y in axis2.values:
        params = _cell_params(fixed, **{axis1_name: x, axis2.name: y})
        row.append(evaluate_cell(params, witness, L_max, tol, **probe).verdict.code)
    return row


def scan(
    axis1: Axis,
    axis2: Axis,
    fixed: Optional[Dict[str, float]] = None,
    witness: str = "divisibility",
    L_max: int = DEFAULT_LMAX,
    tol: float = MONOTONE_TOL,
    workers: Optional[int] = None,
    **probe,
) -> RegionMap:
    """Evaluate ``witness`` on every cell of the ``axis1 x axis2`` grid.

    ``fixed`` supplies the parameters that are not swept (missing ones are 0).
    Probe options (``xi``, ``xi1``, ``xi2``, ``probes``) are passed through to
    the witness. Rows are farmed out to ``workers`` processes when > 1; the
    result does not depend on the worker count.
    """
    fixed = {k: float(v) for k, v in (fixed or {}).items() if k not in (axis1.name, axis2.name)}
    _check_plane(axis1, axis2, fixed)
    if witness not in w.WITNESS_KINDS:
        raise ValueError(f"unknown witness {witness!r}; choose from {w.WITNESS_KINDS}")

    if witness == "divisibility":
        verdicts = _scan_divisibility(axis1, axis2, fixed, L_max, tol)
    else:
        jobs = [(x, axis1.name, axis2, fixed, witness, L_max, tol, probe) for x in axis1.values]
        if workers and workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_scan_row, jobs))
        else:
            rows = [_scan_row(job) for job in jobs]
        verdicts = np.array(rows, dtype=np.int8)

    options = {"tol": tol}
    if witness == "entanglement":
        options["xi"] = float(probe.get("xi", 1.0))
    elif witness in ("fidelity", "relative_entropy"):
        options["xi1"] = float(probe.get("xi1", 1.0))
        options["xi2"] = float(probe.get("xi2", 0.5))
        options["probes"] = probe.get("probes", "squeezed")
    return RegionMap(axis1, axis2, verdicts, witness, fixed, int(L_max), options)


def default_workers() -> int:
    """Worker count from ``BSCOLLISION_WORKERS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("BSCOLLISION_WORKERS", "1")))
    except ValueError:
        return 1


def extract_boundary(region: RegionMap) -> Boundary:
    """Per axis1 column, the axis2 midpoint between the last Markovian cell and
    the first non-Markovian cell above it.

    Columns without such a transition are reported in ``Boundary.skipped``;
    a map without both classes gives an empty boundary.
    """
    ys = region.axis2.values
    points, skipped = [], []
    for i, x in enumerate(region.axis1.values):
        col = region.verdicts[i]
        nm = np.flatnonzero(col == 1)
        if nm.size == 0:
            skipped.append(float(x))
            continue
        first = nm[0]
        below = np.flatnonzero(col[:first] == 0)
        if below.size == 0:
            skipped.append(float(x))
            continue
        points.append((float(x), 0.5 * (ys[below[-1]] + ys[first])))
    return Boundary(np.array(points, dtype=float).reshape(-1, 2), tuple(skipped))


def analytic_boundary(phi: float, value: float) -> float:
    """Reference closed-form boundaries for the two special phases.

    ``phi = 0``: returns ``r2 = 2 r1 / (1 + r1)`` for ``value = r1``.
    ``phi = pi``: returns ``r1 = 2 sqrt(r2) / (1 + r2)`` for ``value = r2``.

    The ``phi = pi`` curve is where the reduced matrix acquires a complex
    conjugate eigenvalue pair and agrees with the divisibility test.
    The ``phi = 0`` curve does *not* agree with the step matrix: there the
    test is first violated at L = 2, giving :func:`second_step_boundary`.
    """
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"reflectivity must lie in [0, 1], got {value}")
    if phi == 0.0:
        return 2.0 * value / (1.0 + value)
    if phi == np.pi:
        return 2.0 * np.sqrt(value) / (1.0 + value)
    raise ValueError("no closed form is available for phi other than 0 and pi")


def phi_pi_boundary_r2(r1: float) -> float:
    """Inverse of the ``phi = pi`` curve: r2 with ``2 sqrt(r2)/(1 + r2) = r1``."""
    if not 0.0 <= r1 <= 1.0:
        raise ValueError(f"r1 must lie in [0, 1], got {r1}")
    if r1 == 0.0:
        return 0.0
    return ((1.0 - np.sqrt(1.0 - r1 * r1)) / r1) ** 2


def second_step_boundary(r1: float) -> float:
    """Divisibility boundary at ``phi = 0``: ``r2 = r1 / (1 + r1)``.

    At ``phi = 0``, ``c_2 = r1^2 + (1 - r1^2) r2`` exceeds ``c_1 = r1`` exactly
    when ``r2 > r1 / (1 + r1)``; below that line ``|c_L|`` is monotone.
    """
    if not 0.0 <= r1 <= 1.0:
        raise ValueError(f"r1 must lie in [0, 1], got {r1}")
    return r1 / (1.0 + r1)


def bisect_boundary(
    witness: str,
    fixed: Dict[str, float],
    axis: str = "r2",
    lo: float = 0.0,
    hi: float = 1.0,
    L_max: int = DEFAULT_LMAX,
    tol: float = MONOTONE_TOL,
    xtol: float = 1e-6,
    **probe,
) -> float:
    """Smallest value of ``axis`` in ``[lo, hi]`` at which ``witness`` reports
    non-Markovian, assuming a single transition. Returns ``nan`` if ``hi`` is
    Markovian and ``lo`` if ``lo`` already is not."""

    def nm(value):
        params = _cell_params(fixed, **{axis: value})
        return evaluate_cell(params, witness, L_max, tol, **probe).verdict is w.Verdict.NON_MARKOVIAN

    if not nm(hi):
        return float("nan")
    if nm(lo):
        return float(lo)
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if nm(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
