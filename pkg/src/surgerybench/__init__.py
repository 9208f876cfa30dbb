"""Numerical and exact tools for positive-Ricci surgery on doubly warped necks."""

from . import errors, invariants6, neck_solver, plumbing, profiles, warp_core
from .neck_solver import NeckCertificate, SurgeryInput, solve_neck
from .profiles import solve_fc, solve_h0
from .warp_core import WarpProfilePair, ricci_at, ricci_components

__version__ = "0.1.0"

__all__ = [
    "errors", "invariants6", "neck_solver", "plumbing", "profiles", "warp_core",
    "NeckCertificate", "SurgeryInput", "solve_neck", "solve_fc", "solve_h0",
    "WarpProfilePair", "ricci_at", "ricci_components",
]
