"""Time-lane vectorized stencil kernels with counter instrumentation.

The package packs grid points of *consecutive time coordinates* into one
vector (space stride ``s`` between adjacent-time lanes), which removes the
alignment conflicts of spatial vectorization and keeps the per-vector data
reorganization cost fixed.  Alongside the vector kernels it ships scalar and
spatially-vectorized baselines, a counting backend that audits instruction
budgets, tile schedulers with a parallel wavefront executor, and a CLI.
"""

from .errors import AlignmentError, IllegalDependence, SizeError, UnsupportedError
from .grid import Grid
from .model import Dependence, ScheduleParams, StencilSpec, check_schedule, dependences, min_space_stride
from .vec import CountingBackend, Mask, OpCounters, SimdBackend, Vec, make_backend

__all__ = [
    "AlignmentError",
    "CountingBackend",
    "Dependence",
    "Grid",
    "IllegalDependence",
    "Mask",
    "OpCounters",
    "ScheduleParams",
    "SimdBackend",
    "SizeError",
    "StencilSpec",
    "UnsupportedError",
    "Vec",
    "check_schedule",
    "dependences",
    "make_backend",
    "min_space_stride",
]

__version__ = "0.1.0"
