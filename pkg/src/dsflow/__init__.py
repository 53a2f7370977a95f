"""Locally constrained inverse curvature flow of axisymmetric spacelike graphs
in de Sitter space, with functional and inequality audits."""

__version__ = "0.1.0"

from .geometry import AmbientParams, ProfileGrid, compute_snapshot, admissibility_check
from .flow import FlowState, StopCriteria, Monitors, evolve, step
from .functionals import functional_record
from .verifier import af_check, heintze_karcher_gap, monotonicity_audit, slice_functionals

__all__ = [
    "AmbientParams", "ProfileGrid", "compute_snapshot", "admissibility_check",
    "FlowState", "StopCriteria", "Monitors", "evolve", "step", "functional_record",
    "af_check", "heintze_karcher_gap", "monotonicity_audit", "slice_functionals",
]
