"""The kernel catalog: every stencil this library ships, with its default
schedule parameters and minimum grid sizes.

The catalog is also expressible as a JSON config file (``load_catalog``);
entries there override or extend the built-in table.  Schema per kernel::

    {"dim": 1, "radius": 1, "shape": "star", "dependence_kind": "jacobi",
     "element_kind": "float64", "boundary": 0.0,
     "coefficients": {"-1": 0.25, "0": 0.5, "1": 0.25},   # offsets as CSV keys
     "birth": [2], "survive": [2, 3],                       # Life instead
     "s": 7, "sl": 2, "vl": 4}
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import ScheduleParams, StencilSpec

VL_F64 = 4
VL_I32 = 8


@dataclass(frozen=True)
class KernelEntry:
    spec: StencilSpec
    s: int
    sl: int
    vl: int

    def params(self, variant: str = "base") -> ScheduleParams:
        return ScheduleParams(self.s, self.sl if variant == "two_stride" else 0, self.vl)

    def min_extent(self) -> int:
        """Smallest vectorized-dimension extent with a non-empty steady loop."""
        return 4 * self.s * self.vl


def _star(dim, center, side):
    coeffs = {(0,) * dim: center}
    for ax in range(dim):
        for sign in (-1, 1):
            off = tuple(sign if i == ax else 0 for i in range(dim))
            coeffs[off] = side
    return coeffs


def _box9(weight):
    return {(i, j): weight for i in (-1, 0, 1) for j in (-1, 0, 1)}


DEFAULT_CATALOG: dict[str, KernelEntry] = {
    "heat1d": KernelEntry(
        StencilSpec("heat1d", 1, 1, "star", "jacobi",
                    coefficients=_star(1, 0.5, 0.25)),
        s=7, sl=2, vl=VL_F64,
    ),
    "heat2d": KernelEntry(
        StencilSpec("heat2d", 2, 1, "star", "jacobi",
                    coefficients=_star(2, 0.5, 0.125)),
        s=2, sl=2, vl=VL_F64,
    ),
    "jac2d9p": KernelEntry(
        StencilSpec("jac2d9p", 2, 1, "box", "jacobi",
                    coefficients=_box9(1.0 / 9.0)),
        s=2, sl=2, vl=VL_F64,
    ),
    "heat3d": KernelEntry(
        StencilSpec("heat3d", 3, 1, "star", "jacobi",
                    coefficients=_star(3, 0.4, 0.1)),
        s=2, sl=2, vl=VL_F64,
    ),
    "life": KernelEntry(
        StencilSpec("life", 2, 1, "box", "jacobi", element_kind="int32",
                    birth=frozenset({2}), survive=frozenset({2, 3}),
                    boundary=0),
        s=2, sl=0, vl=VL_I32,
    ),
    "gs1d": KernelEntry(
        StencilSpec("gs1d", 1, 1, "star", "gauss_seidel",
                    coefficients=_star(1, 0.5, 0.25)),
        s=7, sl=2, vl=VL_F64,
    ),
    "gs2d": KernelEntry(
        StencilSpec("gs2d", 2, 1, "star", "gauss_seidel",
                    coefficients=_star(2, 0.5, 0.125)),
        s=2, sl=0, vl=VL_F64,
    ),
    "gs3d": KernelEntry(
        StencilSpec("gs3d", 3, 1, "star", "gauss_seidel",
                    coefficients=_star(3, 0.4, 0.1)),
        s=2, sl=0, vl=VL_F64,
    ),
}

# LCS is catalogued separately: its "stencil" is the DP recurrence with the
# first sequence index playing the time role (s=1, int32 lanes).
LCS_PARAMS = ScheduleParams(s=1, sl=0, vl=VL_I32)

KERNEL_NAMES = list(DEFAULT_CATALOG) + ["lcs"]


def get(name: str) -> KernelEntry:
    try:
        return DEFAULT_CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown kernel {name!r}; known: {KERNEL_NAMES}") from None


def _parse_offset(key: str, dim: int):
    parts = tuple(int(p) for p in key.split(","))
    if len(parts) != dim:
        raise ValueError(f"offset {key!r} has arity {len(parts)}, expected {dim}")
    return parts


def load_catalog(path) -> dict[str, KernelEntry]:
    """Merge a JSON kernel config over the built-in catalog."""
    with open(path) as fh:
        raw = json.load(fh)
    table = dict(DEFAULT_CATALOG)
    for name, cfg in raw.get("kernels", raw).items():
        dim = int(cfg["dim"])
        coeffs = {
            _parse_offset(k, dim): float(v)
            for k, v in cfg.get("coefficients", {}).items()
        }
        spec = StencilSpec(
            name,
            dim,
            int(cfg.get("radius", 1)),
            cfg.get("shape", "star"),
            cfg.get("dependence_kind", "jacobi"),
            element_kind=cfg.get("element_kind", "float64"),
            coefficients=coeffs,
            birth=frozenset(cfg.get("birth", ())),
            survive=frozenset(cfg.get("survive", ())),
            boundary=cfg.get("boundary", 0.0),
        )
        vl = int(cfg.get("vl", VL_I32 if spec.element_kind == "int32" else VL_F64))
        table[name] = KernelEntry(spec, int(cfg.get("s", 2)), int(cfg.get("sl", 0)), vl)
    return table
