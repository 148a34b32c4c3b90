"""Pair coherent states under postselected von Neumann measurement.

Closed-form series and brute-force Fock-grid oracles for squeezing,
photon correlations, entanglement witnesses, joint Wigner functions and
coherent-state teleportation fidelity.
"""

__version__ = "0.1.0"

from .measurement import MeasurementConfig, output_state, success_probability, weak_value
from .observables import MomentKind, MomentSet, closed_form_moments, oracle_moments
from .specfun import ConvergenceError, SeriesControl
from .teleport import TeleportConfig, avg_fidelity_closed, avg_fidelity_numeric, state_fidelity
from .twomode import PcsParams, TruncationError, TruncationSpec, TwoModeState, pcs_state
from .wigner import Axis, PhaseGrid, scaled_joint_wigner, wigner_cut_2d, wigner_cut_diag

__all__ = [
    "__version__",
    "Axis",
    "ConvergenceError",
    "MeasurementConfig",
    "MomentKind",
    "MomentSet",
    "PcsParams",
    "PhaseGrid",
    "SeriesControl",
    "TeleportConfig",
    "TruncationError",
    "TruncationSpec",
    "TwoModeState",
    "avg_fidelity_closed",
    "avg_fidelity_numeric",
    "closed_form_moments",
    "oracle_moments",
    "output_state",
    "pcs_state",
    "scaled_joint_wigner",
    "state_fidelity",
    "success_probability",
    "weak_value",
    "wigner_cut_2d",
    "wigner_cut_diag",
]
