"""Temporal (time-lane) stencil kernels.

Every kernel advances a grid ``steps`` time steps and matches the scalar
reference bit-exactly.  A band of vl consecutive time steps is processed per
sweep: scalar prologue triangles, an initial strided assembly of the input
vector pipeline, the steady vector loop, and scalar epilogue triangles.
Trailing ``steps % vl`` updates run through the scalar path.
"""

from dataclasses import dataclass

from ..model import ScheduleParams


@dataclass(frozen=True)
class KernelVariant:
    """Which steady-loop scheme a kernel run uses.

    scheme: "base" (rotate+blend) or "two_stride" (lane-group stagger, sl=2).
    single_array: Jacobi in-place mode, output plane sharing the input array.
    params: schedule override; None takes the catalog defaults.
    """

    scheme: str = "base"
    single_array: bool = False
    params: ScheduleParams | None = None

    def __post_init__(self):
        if self.scheme not in ("base", "two_stride"):
            raise ValueError("scheme must be 'base' or 'two_stride'")


from .kernels1d import gs1d_temporal, heat1d_temporal  # noqa: E402
from .kernels_nd import jacobi2d_temporal, jacobi3d_temporal, gs2d_temporal, gs3d_temporal  # noqa: E402
from .lcs import lcs_temporal  # noqa: E402
from .assemble import assemble_top_bottom, assemble_two_stride  # noqa: E402

__all__ = [
    "KernelVariant",
    "assemble_top_bottom",
    "assemble_two_stride",
    "gs1d_temporal",
    "gs2d_temporal",
    "gs3d_temporal",
    "heat1d_temporal",
    "jacobi2d_temporal",
    "jacobi3d_temporal",
    "lcs_temporal",
]
