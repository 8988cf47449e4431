"""Stroboscopic beam-splitter collision model of open-system dynamics.

Submodules
----------
scattering
    Step matrices and the channel coefficient c_L.
gaussian
    Gaussian states, the induced thermal attenuator, E_N, fidelity, entropy.
qubit
    Zero-temperature single-photon reduction (amplitude damping, concurrence).
witnesses
    Divisibility classification and revival witnesses.
sweep
    Region maps over parameter planes.
cli
    Command-line front end.
"""

from .scattering import (
    ChannelParams,
    CoefficientSeries,
    DegenerateSpectrumError,
    build_full_scattering,
    build_step_matrix,
    c_closed_form,
    c_series,
    eigen_reduced,
    reduced_step_matrix,
)
from .witnesses import (
    Verdict,
    WitnessSeries,
    classify_divisibility,
    coarse_grain,
    concurrence_witness,
    entanglement_revival_witness,
    fidelity_witness,
    intermediate_map,
    relative_entropy_witness,
    threshold_temperature,
)
from .sweep import Axis, RegionMap, analytic_boundary, extract_boundary, scan

__version__ = "0.1.0"
