"""Verification harness: matrix reports, fault injection, counter audits."""

import json

import numpy as np

from tvstencil import Grid
from tvstencil.catalog import get
from tvstencil.kernels import KernelVariant
from tvstencil.verify import (
    Cell,
    counter_assertions,
    counter_report_json,
    default_matrix,
    equivalence_matrix,
    run_temporal,
)


def small_cells():
    return [
        Cell("heat1d", "base", False, (256,), 3, 8),
        Cell("heat1d", "two_stride", True, (300,), 4, 9),
        Cell("heat2d", "base", False, (32, 24), 5, 4),
        Cell("gs1d", "base", True, (256,), 6, 5),
        Cell("lcs", "base", False, (60, 70), 7, 60),
    ]


def test_matrix_passes_on_correct_kernels():
    rep = equivalence_matrix(small_cells())
    assert rep.passed and rep.first_divergence is None
    assert len(rep.results) == 5


def test_matrix_empty():
    rep = equivalence_matrix([])
    assert rep.passed and rep.results == []


def test_fault_injection_reports_counterexample():
    """An off-by-one stride in the kernel must surface as a FAIL with a
    replayable cell and both bit patterns."""

    def corrupted(kernel, grid, steps, variant=None, backend=None):
        out = run_temporal(kernel, grid, steps, variant, backend)
        out.interior[1] += 1e-9  # simulate a mis-stridden lane
        return out

    cells = [Cell("heat1d", "base", False, (256,), 3, 8)]
    rep = equivalence_matrix(cells, runner=corrupted)
    assert not rep.passed
    assert rep.first_divergence == 0
    failure = rep.as_dict()["failures"][0]
    assert failure["position"] == [1]
    assert failure["got_bits"] != failure["want_bits"]
    assert failure["got_bits"].startswith("0x")


def test_report_json_roundtrip():
    rep = equivalence_matrix(small_cells()[:2])
    doc = json.loads(rep.to_json())
    assert doc["passed"] is True and doc["cells"] == 2


def test_default_matrix_coverage_classes():
    cells = default_matrix(cells_per_kernel=20)
    assert len(cells) == 180
    for kernel in ("heat1d", "gs1d", "heat2d", "life", "gs3d"):
        sub = [c for c in cells if c.kernel == kernel]
        assert len(sub) == 20
        e = get(kernel)
        vl = e.vl
        assert {c.steps % vl for c in sub} == set(range(vl)) | {c.steps % vl for c in sub}
        mods = {c.steps % vl for c in sub}
        assert {0, 1, 2, 3} <= mods or vl == 8
        period = 4 * e.s * e.vl
        rems = {c.size[0] % period for c in sub}
        assert {0, 1, vl - 1} & rems
        # one cell at the size cap
        assert max(c.size[0] for c in sub) in (4096, 256, 64)
    lcs_cells = [c for c in cells if c.kernel == "lcs"]
    assert (2000, 2000) in {c.size for c in lcs_cells}


def test_counter_assertions_pass_and_report():
    rep = counter_assertions(iterations=4000)
    assert rep.passed
    names = {c.name for c in rep.checks}
    assert any("3.5" not in n and "reorg" in n for n in names)
    doc = rep.as_dict()
    assert doc["passed"] is True
    assert doc["figures"]["heat1d_two_stride_live"] <= 13


def test_counter_report_json_schema():
    doc = json.loads(counter_report_json("heat1d", "base", iterations=512))
    assert doc["kernel"] == "heat1d" and doc["variant"] == "base"
    pv = doc["per-output-vector"]
    assert set(pv) == {"inlane", "xlane", "loads", "stores"}
    assert pv["inlane"] + pv["xlane"] == 3.5
