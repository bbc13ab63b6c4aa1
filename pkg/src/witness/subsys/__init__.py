"""Witnessing subsystems: quotient-sum heuristic, exact MILP, label variants."""
from .core import (QSConfig, SubsystemResult, build_subsystem, certificate_to_subsystem,
                   check_witness, compute_K)
from .exact import milp_exact
from .io import read_mask, write_mask, write_result
from .labels import LabelMap
from .qs import initial_objective, invert, qs_heuristic

__all__ = [
    "LabelMap", "QSConfig", "SubsystemResult", "initial_objective", "invert", "qs_heuristic",
    "compute_K", "milp_exact", "certificate_to_subsystem", "check_witness", "build_subsystem",
    "write_result", "write_mask", "read_mask",
]
