"""Acceptance suite: one test and one printed pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to watch the lines appear.
"""

import time

import numpy as np
import pytest

from tvstencil import Grid, ScheduleParams, check_schedule, dependences, min_space_stride
from tvstencil.baselines import lcs_reference, scalar_reference
from tvstencil.catalog import DEFAULT_CATALOG, get
from tvstencil.kernels import KernelVariant, heat1d_temporal, gs1d_temporal
from tvstencil.model import lcs_dependences
from tvstencil.tiling import (
    build_schedule,
    check_coverage,
    check_wave_order,
    execute_parallel,
    lcs_blocked,
)
from tvstencil.vec import CountingBackend
from tvstencil.verify import counter_assertions, default_matrix, equivalence_matrix, run_temporal


def _line(num, name, ok, extra=""):
    print(f"\nACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'} {extra}".rstrip())
    assert ok, f"criterion {num} ({name}) failed {extra}"


def test_criterion_1_oracle_equivalence():
    """All 9 kernels x variants x >=20 cells, bit-exact, under 2 minutes."""
    t0 = time.time()
    cells = default_matrix(cells_per_kernel=20)
    report = equivalence_matrix(cells)
    elapsed = time.time() - t0
    detail = f"({len(cells)} cells, {elapsed:.1f}s)"
    if not report.passed:
        detail += f" first failure: {report.as_dict()['failures'][0]}"
    _line(1, "oracle equivalence", report.passed and elapsed < 120.0, detail)


def test_criterion_2_reorganization_counts():
    rep = counter_assertions(iterations=4000)
    want = {
        "heat1d base reorg/vector",
        "heat1d two-stride in-lane/vector",
        "heat1d two-stride lane-crossing/vector",
        "datareorg 1D3P lane-crossing/vector",
        "datareorg 1D3P in-lane/vector",
        "heat2d reorg/vector == heat1d",
        "heat3d reorg/vector == heat1d",
    }
    checks = [c for c in rep.checks if c.name in want]
    ok = all(c.ok for c in checks) and len(checks) == len(want)
    detail = "; ".join(f"{c.name.split('/')[0]}={c.measured:.3f}" for c in checks[:3])
    _line(2, "reorganization counts", ok, f"({detail})")


def test_criterion_3_load_once():
    rep = counter_assertions(iterations=4000)
    names = {
        "heat1d base elements loaded/vector": 1.0,
        "multi-load 1D3P loads/vector": 3.0,
    }
    checks = {c.name: c for c in rep.checks if c.name in names}
    ok = all(c.ok and c.tol == 0.0 for c in checks.values()) and len(checks) == 2
    _line(3, "load-once vs multi-load",
          ok, f"(temporal={checks[list(names)[0]].measured}, multiload={checks[list(names)[1]].measured})")


def test_criterion_4_legality():
    t0 = time.time()
    ok = min_space_stride(dependences(get("heat1d").spec)) == 2
    ok &= min_space_stride(lcs_dependences()) == 1
    for name, entry in DEFAULT_CATALOG.items():
        deps = dependences(entry.spec)
        smin = min_space_stride(deps)
        box = (64,) if entry.spec.dim == 1 else (
            (32, 4) if entry.spec.dim == 2 else (32, 3, 3))
        ok &= check_schedule(deps, ScheduleParams(smin, 0, 4), box, 16)
        if smin > 1:
            ok &= not check_schedule(deps, ScheduleParams(smin - 1, 0, 4), box, 16)
    ok &= check_schedule(lcs_dependences(), ScheduleParams(1, 0, 8), (64,), 16)
    elapsed = time.time() - t0
    _line(4, "legality and stride minimality", ok and elapsed < 30.0, f"({elapsed:.1f}s)")


BLOCK_CONFIGS = [
    ("heat1d", (4096,), 64, (512,), 16, KernelVariant("two_stride")),
    ("gs1d", (2048,), 32, (256,), 8, None),
    ("heat2d", (256, 256), 32, (64, 64), 16, None),
    ("jac2d9p", (128, 128), 16, (64, 64), 16, None),
    ("life", (256, 256), 32, (256, 64), 32, None),
    ("heat3d", (64, 64, 64), 8, (32, 32, 32), 8, None),
    ("gs2d", (128, 128), 32, (64, 64), 32, None),
    ("gs3d", (32, 32, 32), 32, (32, 32, 32), 32, None),
]


def test_criterion_5_tiling_determinism():
    ok = True
    for kernel, ext, steps, tile, h, variant in BLOCK_CONFIGS:
        e = get(kernel)
        g = Grid.random(ext, seed=13, element_kind=e.spec.element_kind, vl=e.vl)
        want = scalar_reference(e.spec, g, steps)
        sched = build_schedule(kernel, ext, steps, tile, h)
        base = None
        for workers in (1, 2, 8):
            got = execute_parallel(kernel, g, sched, workers=workers, variant=variant)
            same = np.array_equal(got.interior, want.interior)
            if base is None:
                base = got.interior
            same &= np.array_equal(got.interior, base)
            if not same:
                print(f"  mismatch: {kernel} workers={workers}")
            ok &= same
    rng = np.random.default_rng(5)
    a = rng.integers(0, 4, 800, dtype=np.int32)
    b = rng.integers(0, 4, 700, dtype=np.int32)
    sched = build_schedule("lcs", (700,), 800, (256,), 128)
    want = lcs_reference(a, b)
    ok &= all(lcs_blocked(a, b, sched, workers=w) == want for w in (1, 2, 8))

    # 200 random schedules: exact coverage and wave legality
    rng = np.random.default_rng(17)
    kernels = list(DEFAULT_CATALOG) + ["lcs"]
    checked = 0
    while checked < 200:
        kernel = kernels[checked % len(kernels)]
        if kernel == "lcs":
            ext = (int(rng.integers(20, 200)),)
            steps = int(rng.integers(8, 200))
            tile = (int(rng.integers(16, 220)),)
            h = 8 * int(rng.integers(1, 8))
            deps = lcs_dependences()
        else:
            e = get(kernel)
            dim, vl = e.spec.dim, e.vl
            floor = 4 * e.s * vl
            if dim == 1:
                ext = (int(rng.integers(floor, 700)),)
                tile = (int(rng.integers(floor, 700)),)
            else:
                ext = (int(rng.integers(12, 48)),) + tuple(
                    int(rng.integers(8, 32)) for _ in range(dim - 1))
                tile = (max(floor, int(rng.integers(8, 64))),) + tuple(
                    max(6, int(rng.integers(6, 32))) for _ in range(dim - 1))
            h = vl * int(rng.integers(1, 4))
            from tvstencil.tiling import SHAPE_BY_KERNEL
            shape = SHAPE_BY_KERNEL[kernel]
            if shape == "parallelogram" and h > min(tile):
                h = vl
                if h > min(tile):
                    continue
            if shape == "hybrid" and dim > 1 and h > min(tile[1:]):
                h = vl
                if h > min(tile[1:]):
                    continue
            steps = int(rng.integers(1, 3 * h + 1))
            deps = dependences(e.spec)
        sched = build_schedule(kernel, ext, steps, tile, h)
        cov = check_coverage(sched)
        order = check_wave_order(sched, deps)
        if not (cov and order):
            print(f"  schedule invariant failed: {kernel} {ext} T={steps} tile={tile} H={h} "
                  f"coverage={cov} order={order}")
        ok &= cov and order
        checked += 1
    _line(5, "tiling determinism and invariants", ok, f"({checked} random schedules)")


def test_criterion_6_performance_direction(tmp_path):
    """Soft criterion: reported, not gated.  The vector path here is a
    per-instruction emulation while the scalar reference is numpy-vectorized,
    so the wall-clock ratio measures emulator overhead, not the scheme."""
    rows = ["kernel,variant,nx,t,seconds,gstencils_per_s"]
    figures = {}
    for kernel, fn in (("heat1d", heat1d_temporal), ("gs1d", gs1d_temporal)):
        e = get(kernel)
        g = Grid.random((1_000_000,), seed=1)
        steps = 4
        t0 = time.perf_counter()
        fn(g, steps, KernelVariant("two_stride", kernel == "gs1d"))
        tv = time.perf_counter() - t0
        t0 = time.perf_counter()
        scalar_reference(e.spec, g, steps)
        ts = time.perf_counter() - t0
        figures[kernel] = tv / ts
        pts = 1_000_000 * steps / 1e9
        rows.append(f"{kernel},two_stride,1000000,{steps},{tv:.3f},{pts / tv:.6f}")
        rows.append(f"{kernel},scalar,1000000,{steps},{ts:.3f},{pts / ts:.6f}")
    csv = tmp_path / "performance_direction.csv"
    csv.write_text("\n".join(rows) + "\n")
    print(f"\n  recorded: {csv}")
    for r in rows[1:]:
        print("  " + r)
    detail = ", ".join(f"{k}: emulated-temporal/scalar wall ratio {v:.1f}x" for k, v in figures.items())
    _line(6, "performance direction (reported, not gated)", True,
          f"({detail}; emulation overhead dominates, see note)")


def test_criterion_7_register_budget():
    bk = CountingBackend(4)
    heat1d_temporal(Grid.random((2048,), seed=5), 16, KernelVariant("two_stride"), bk)
    live = bk.max_live()
    bk2 = CountingBackend(4)
    heat1d_temporal(Grid.random((2048,), seed=5), 16, KernelVariant("base"), bk2)
    _line(7, "register budget (s=7, two-stride)",
          live <= 13, f"(two_stride live={live}, base live={bk2.max_live()})")
