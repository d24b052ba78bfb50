"""Correctness and accounting harness.

``equivalence_matrix`` replays (kernel, variant, size, seed, steps) cells and
compares the time-lane kernels bit-exactly against the scalar references;
the first diverging cell is reported with the flat position and both bit
patterns, and every failure carries its replayable cell description.

``counter_assertions`` audits the instruction accounting against the fixed
per-output-vector budget.  Amortized figures are computed by differencing
two problem sizes, which cancels prologue/epilogue contributions exactly:

    per-vector = (count(N2) - count(N1)) / (vectors(N2) - vectors(N1))

Audited figures: plain 1D steady loop 3.5 reorganizations per output vector
(1 lane-crossing + 2.5 in-lane), two-stride 2.00 in-lane + 0.75
lane-crossing, the data-reorganization baseline exactly (2 in-lane, 1
lane-crossing), the multi-load baseline exactly 3 loads (1 aligned + 2
unaligned), one input element entering registers per output vector
(load-once), identical reorganization cost across 1D/2D/3D, and the
13-register budget of the s=7 two-stride steady loop.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .baselines import (
    datareorg_vectorized_1d3p,
    lcs_reference,
    multiload_vectorized,
    scalar_reference,
)
from .catalog import DEFAULT_CATALOG, get as catalog_get
from .grid import Grid
from .kernels import (
    KernelVariant,
    gs1d_temporal,
    gs2d_temporal,
    gs3d_temporal,
    heat1d_temporal,
    jacobi2d_temporal,
    jacobi3d_temporal,
    lcs_temporal,
)
from .vec import CountingBackend


def run_temporal(kernel: str, grid: Grid, steps: int,
                 variant: KernelVariant | None = None, backend=None) -> Grid:
    """Dispatch one named kernel (LCS excluded: different signature)."""
    if kernel.startswith("gs") and variant is not None and not variant.single_array:
        variant = KernelVariant(variant.scheme, True, variant.params)
    if kernel == "heat1d":
        return heat1d_temporal(grid, steps, variant, backend)
    if kernel == "gs1d":
        return gs1d_temporal(grid, steps, variant, backend)
    if kernel in ("heat2d", "jac2d9p", "life"):
        return jacobi2d_temporal(grid, steps, variant, backend, kernel=kernel)
    if kernel == "heat3d":
        return jacobi3d_temporal(grid, steps, variant, backend, kernel=kernel)
    if kernel == "gs2d":
        return gs2d_temporal(grid, steps, variant, backend)
    if kernel == "gs3d":
        return gs3d_temporal(grid, steps, variant, backend)
    raise KeyError(f"unknown kernel {kernel!r}")


@dataclass(frozen=True)
class Cell:
    kernel: str
    scheme: str
    single_array: bool
    size: tuple[int, ...]
    seed: int
    steps: int

    def describe(self):
        return (f"{self.kernel}[{self.scheme}{'/1arr' if self.single_array else ''}]"
                f" size={self.size} seed={self.seed} T={self.steps}")


@dataclass
class CellResult:
    cell: Cell
    ok: bool
    position: tuple | None = None
    got_bits: str | None = None
    want_bits: str | None = None


@dataclass
class MatrixReport:
    results: list[CellResult] = field(default_factory=list)
    first_divergence: int | None = None

    @property
    def passed(self) -> bool:
        return self.first_divergence is None

    def as_dict(self):
        return {
            "passed": self.passed,
            "cells": len(self.results),
            "first_divergence": self.first_divergence,
            "failures": [
                {
                    "cell": r.cell.describe(),
                    "position": list(r.position) if r.position else None,
                    "got_bits": r.got_bits,
                    "want_bits": r.want_bits,
                }
                for r in self.results
                if not r.ok
            ],
        }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=1)


def _bits(value, kind):
    if kind == "float64":
        return f"0x{np.float64(value).view(np.uint64):016x}"
    return f"0x{np.int32(value).view(np.uint32):08x}"


def equivalence_matrix(cells, runner=None) -> MatrixReport:
    """Run every cell; the runner override exists so fault injection can be
    tested against the harness itself."""
    runner = runner or run_temporal
    report = MatrixReport()
    for idx, cell in enumerate(cells):
        if cell.kernel == "lcs":
            rng = np.random.default_rng(cell.seed)
            a = rng.integers(0, 4, size=cell.size[0], dtype=np.int32)
            b = rng.integers(0, 4, size=cell.size[1], dtype=np.int32)
            want = lcs_reference(a, b)
            got = lcs_temporal(a, b)
            ok = got == want
            res = CellResult(cell, ok)
            if not ok:
                res.position = ()
                res.got_bits = _bits(got, "int32")
                res.want_bits = _bits(want, "int32")
        else:
            entry = catalog_get(cell.kernel)
            grid = Grid.random(cell.size, seed=cell.seed,
                               element_kind=entry.spec.element_kind, vl=entry.vl)
            variant = KernelVariant(cell.scheme, cell.single_array)
            got = runner(cell.kernel, grid, cell.steps, variant)
            want = scalar_reference(entry.spec, grid, cell.steps)
            same = got.interior == want.interior
            ok = bool(same.all())
            res = CellResult(cell, ok)
            if not ok:
                pos = tuple(int(i) for i in np.argwhere(~same)[0])
                res.position = pos
                res.got_bits = _bits(got.interior[pos], entry.spec.element_kind)
                res.want_bits = _bits(want.interior[pos], entry.spec.element_kind)
        report.results.append(res)
        if not res.ok and report.first_divergence is None:
            report.first_divergence = idx
    return report


def default_matrix(cells_per_kernel: int = 20, master_seed: int = 2024,
                   kernels=None) -> list[Cell]:
    """The acceptance matrix: random cells per kernel/variant with the
    steady-loop remainder classes (size mod 4*s*vl in {0, 1, vl-1}) and every
    steps-mod-vl class represented."""
    rng = np.random.default_rng(master_seed)
    caps = {
        "heat1d": 4096, "gs1d": 4096,
        "heat2d": 256, "jac2d9p": 256, "life": 256,
        "heat3d": 64, "gs2d": 256, "gs3d": 64,
    }
    heavy = {"gs2d": 160, "gs3d": 40, "heat3d": 48, "life": 192}
    out: list[Cell] = []
    names = kernels or (list(DEFAULT_CATALOG) + ["lcs"])
    for kernel in names:
        if kernel == "lcs":
            sizes = [(2000, 2000)]
            while len(sizes) < cells_per_kernel:
                sizes.append((int(rng.integers(1, 800)), int(rng.integers(1, 800))))
            for i, size in enumerate(sizes):
                out.append(Cell("lcs", "base", False, size, int(rng.integers(1 << 30)),
                                size[0]))
            continue
        entry = catalog_get(kernel)
        vl, s = entry.vl, entry.s
        lo = vl * (s + 1) + entry.sl + 1
        cap = caps[kernel]
        soft = heavy.get(kernel, cap)
        dim = entry.spec.dim
        schemes = ["base", "two_stride"] if dim == 1 else ["base"]
        jacobi = entry.spec.dependence_kind == "jacobi"
        singles = [False, True] if jacobi else [True]
        period = 4 * s * vl
        for i in range(cells_per_kernel):
            if i == 0:
                n0 = cap  # one cell at the size cap
            else:
                n0 = int(rng.integers(lo, soft + 1))
                if i < 4:  # pin the remainder classes the steady loop trims
                    n0 = max(lo, (n0 // period) * period) + (0, 1, vl - 1)[i % 3]
            size = (n0,) + tuple(
                int(rng.integers(max(vl, 8), soft + 1)) for _ in range(dim - 1)
            )
            steps = int(rng.integers(1, 3 * vl + 1))
            if i % (vl + 1) < vl:
                steps = max(1, (steps // vl) * vl + i % (vl + 1))
            if kernel in ("gs2d", "gs3d") and size[0] >= soft:
                steps = min(steps, vl)
            scheme = schemes[i % len(schemes)]
            single = singles[(i // 2) % len(singles)]
            out.append(
                Cell(kernel, scheme, single, size, int(rng.integers(1 << 30)), steps)
            )
    return out


# ---------------------------------------------------------------------------
# counter accounting
# ---------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    measured: float
    expected: float
    tol: float

    @property
    def ok(self) -> bool:
        return abs(self.measured - self.expected) <= self.tol

    def as_dict(self):
        return {"name": self.name, "measured": self.measured,
                "expected": self.expected, "tol": self.tol, "ok": self.ok}


@dataclass
class CounterReport:
    checks: list[Check] = field(default_factory=list)
    figures: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.ok for c in self.checks)

    def as_dict(self):
        return {"passed": self.passed,
                "checks": [c.as_dict() for c in self.checks],
                "figures": self.figures}

    def to_json(self):
        return json.dumps(self.as_dict(), indent=1)


def _amortized(kernel, scheme, n1, n2, steps, extra=()):
    """Per-output-vector counters by two-size differencing."""
    entry = catalog_get(kernel)
    deltas = []
    for n in (n1, n2):
        bk = CountingBackend(entry.vl,
                             np.float64 if entry.spec.element_kind == "float64" else np.int32)
        grid = Grid.random((n,) + tuple(extra), seed=11,
                           element_kind=entry.spec.element_kind, vl=entry.vl)
        run_temporal(kernel, grid, steps, KernelVariant(scheme), bk)
        deltas.append(bk.counters.snapshot())
    d = deltas[1] - deltas[0]
    nvec = d.output_vectors
    return {
        "vectors": nvec,
        "inlane": d.inlane_reorg / nvec,
        "xlane": d.xlane_reorg / nvec,
        "reorg_total": (d.inlane_reorg + d.xlane_reorg) / nvec,
        "elements_loaded": (d.vector_loads + d.strided_loads) * 4 / nvec
        if entry.vl == 4 else (d.vector_loads + d.strided_loads) * 8 / nvec,
        "stores": d.vector_stores / nvec,
    }


def counter_assertions(iterations: int = 4000) -> CounterReport:
    """Audit the instruction budgets; differencing spans at least
    ``iterations`` steady output vectors."""
    rep = CounterReport()
    span = max(iterations, 4000)
    n1, n2 = 512, 512 + ((span // 2 + 127) // 128) * 128  # T=8 -> 2 bands

    base = _amortized("heat1d", "base", n1, n2, 8)
    rep.figures["heat1d_base"] = base
    rep.checks.append(Check("heat1d base reorg/vector", base["reorg_total"], 3.5, 0.05))
    two = _amortized("heat1d", "two_stride", n1, n2, 8)
    rep.figures["heat1d_two_stride"] = two
    rep.checks.append(Check("heat1d two-stride in-lane/vector", two["inlane"], 2.00, 0.02))
    rep.checks.append(Check("heat1d two-stride lane-crossing/vector", two["xlane"], 0.75, 0.02))

    # load-once: one input element enters a register per output vector
    rep.checks.append(Check("heat1d base elements loaded/vector",
                            base["elements_loaded"], 1.0, 0.0))
    rep.checks.append(Check("heat1d two-stride elements loaded/vector",
                            two["elements_loaded"], 1.0, 0.0))

    # data-reorganization baseline: exactly (1 lane-crossing, 2 in-lane, 1 load)
    entry = catalog_get("heat1d")
    deltas = []
    for n in (512, 1024):
        bk = CountingBackend(4)
        datareorg_vectorized_1d3p(entry.spec, Grid.random((n,), seed=3), 6, bk)
        deltas.append(bk.counters.snapshot())
    d = deltas[1] - deltas[0]
    rep.figures["datareorg_1d3p"] = {
        "xlane": d.xlane_reorg / d.output_vectors,
        "inlane": d.inlane_reorg / d.output_vectors,
        "loads": d.vector_loads / d.output_vectors,
    }
    rep.checks.append(Check("datareorg 1D3P lane-crossing/vector",
                            d.xlane_reorg / d.output_vectors, 1.0, 0.0))
    rep.checks.append(Check("datareorg 1D3P in-lane/vector",
                            d.inlane_reorg / d.output_vectors, 2.0, 0.0))

    # multi-load baseline: exactly 3 loads/vector, 2 of them unaligned
    deltas = []
    for n in (512, 1024):
        bk = CountingBackend(4)
        multiload_vectorized(entry.spec, Grid.random((n,), seed=3), 6, bk)
        deltas.append(bk.counters.snapshot())
    d = deltas[1] - deltas[0]
    loads = (d.vector_loads + d.unaligned_loads) / d.output_vectors
    rep.figures["multiload_1d3p"] = {
        "loads": loads,
        "unaligned": d.unaligned_loads / d.output_vectors,
    }
    rep.checks.append(Check("multi-load 1D3P loads/vector", loads, 3.0, 0.0))
    rep.checks.append(Check("multi-load 1D3P unaligned/vector",
                            d.unaligned_loads / d.output_vectors, 2.0, 0.0))

    # fixedness across dimensionality at vl=4 (same base scheme everywhere)
    d2 = _amortized("heat2d", "base", 64, 128, 8, extra=(64,))
    d3 = _amortized("heat3d", "base", 24, 48, 4, extra=(24, 24))
    rep.figures["heat2d_base"] = d2
    rep.figures["heat3d_base"] = d3
    rep.checks.append(Check("heat2d reorg/vector == heat1d",
                            d2["reorg_total"], base["reorg_total"], 0.05))
    rep.checks.append(Check("heat3d reorg/vector == heat1d",
                            d3["reorg_total"], base["reorg_total"], 0.05))

    # register budget: the s=7 two-stride steady loop fits 13 registers
    bk = CountingBackend(4)
    heat1d_temporal(Grid.random((1024,), seed=5), 8, KernelVariant("two_stride"), bk)
    live = bk.max_live()
    rep.figures["heat1d_two_stride_live"] = live
    rep.checks.append(Check("heat1d s=7 two-stride live registers", live, 13.0, 0.0))
    bk = CountingBackend(4)
    heat1d_temporal(Grid.random((1024,), seed=5), 8, KernelVariant("base"), bk)
    rep.figures["heat1d_base_live"] = bk.max_live()
    return rep


def counter_report_json(kernel: str, scheme: str, iterations: int = 4000) -> str:
    """Per-kernel counter summary in the wire format used by the CLI."""
    entry = catalog_get(kernel)
    n1 = max(entry.vl * (entry.s + 1) + entry.sl + 1, 256)
    n2 = n1 + max(iterations, 512)
    extra = tuple([32] * (entry.spec.dim - 1))
    fig = _amortized(kernel, scheme, n1, n2, entry.vl, extra=extra)
    return json.dumps(
        {
            "kernel": kernel,
            "variant": scheme,
            "iterations": fig["vectors"],
            "per-output-vector": {
                "inlane": fig["inlane"],
                "xlane": fig["xlane"],
                "loads": fig["elements_loaded"],
                "stores": fig["stores"],
            },
        },
        indent=1,
    )
