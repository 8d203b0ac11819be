"""Divisibility of qubit and qudit dynamical maps (CP, P and D)."""
__version__ = "0.1.0"

from .engine import ClassifyOptions, DivisibilityReport, classify_timeline, propagator
from .gpc import GpcRates
from .mub import build_mubs
from .phasecov import PhaseCovRates
from .qubit_pauli import PauliRates
from .rates import rate_from_spec
from .verdict import Verdict

__all__ = ["ClassifyOptions", "DivisibilityReport", "GpcRates", "PauliRates", "PhaseCovRates",
           "Verdict", "build_mubs", "classify_timeline", "propagator", "rate_from_spec"]
