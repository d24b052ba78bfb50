"""1D time-lane kernels against the scalar references."""

import numpy as np
import pytest

from tvstencil import Grid, SizeError, UnsupportedError
from tvstencil.baselines import scalar_reference
from tvstencil.catalog import get
from tvstencil.kernels import KernelVariant, gs1d_temporal, heat1d_temporal
from tvstencil.vec import CountingBackend

VARIANTS = [
    KernelVariant("base", False),
    KernelVariant("base", True),
    KernelVariant("two_stride", False),
    KernelVariant("two_stride", True),
]


def test_heat1d_zero_fixed_point():
    for var in VARIANTS:
        out = heat1d_temporal(Grid((256,), 1), 8, var)
        assert not out.interior.any()


def test_heat1d_constant_preserved():
    # coefficients sum to 1: a constant field with matching boundary is fixed
    g = Grid((256,), 1, boundary=3.25)
    g.interior[...] = 3.25
    for var in VARIANTS:
        out = heat1d_temporal(g, 8, var)
        assert np.all(out.interior == 3.25), var


def test_heat1d_seed42_bitexact():
    e = get("heat1d")
    g = Grid.random((256,), seed=42)
    want = scalar_reference(e.spec, g, 8)
    for var in VARIANTS:
        got = heat1d_temporal(g, 8, var)
        assert np.array_equal(got.interior, want.interior), var


@pytest.mark.parametrize("scheme", ["base", "two_stride"])
def test_heat1d_random_matrix(scheme):
    e = get("heat1d")
    rng = np.random.default_rng(99)
    for _ in range(8):
        nx = int(rng.integers(34, 1500))
        steps = int(rng.integers(1, 14))
        g = Grid.random((nx,), seed=int(rng.integers(1 << 30)))
        want = scalar_reference(e.spec, g, steps)
        got = heat1d_temporal(g, steps, KernelVariant(scheme))
        assert np.array_equal(got.interior, want.interior), (nx, steps)


def test_heat1d_remainder_classes():
    """Sizes hitting the group-trim and steps hitting the scalar tail."""
    e = get("heat1d")
    s, vl = e.s, e.vl
    period = 4 * s * vl
    for nx in (period, period + 1, period + vl - 1, 2 * period + 3):
        for steps in (vl, vl + 1, vl + 2, vl + 3, 1):
            g = Grid.random((nx,), seed=nx * 37 + steps)
            want = scalar_reference(e.spec, g, steps)
            got = heat1d_temporal(g, steps, KernelVariant("two_stride"))
            assert np.array_equal(got.interior, want.interior), (nx, steps)


def test_single_array_equals_two_array():
    g = Grid.random((777,), seed=5)
    a = heat1d_temporal(g, 12, KernelVariant("base", False))
    b = heat1d_temporal(g, 12, KernelVariant("base", True))
    assert np.array_equal(a.interior, b.interior)


def test_heat1d_size_error():
    with pytest.raises(SizeError):
        heat1d_temporal(Grid((16,), 1), 4)


def test_base_scheme_rejects_sl():
    from tvstencil.model import ScheduleParams

    with pytest.raises(UnsupportedError):
        heat1d_temporal(Grid((256,), 1), 4,
                        KernelVariant("base", params=ScheduleParams(7, 2, 4)))


def test_gs1d_bitexact_and_variants():
    e = get("gs1d")
    g = Grid.random((512,), seed=8)
    want = scalar_reference(e.spec, g, 8)
    for scheme in ("base", "two_stride"):
        got = gs1d_temporal(g, 8, KernelVariant(scheme, True))
        assert np.array_equal(got.interior, want.interior), scheme


def test_gs1d_zero_with_zero_boundary():
    out = gs1d_temporal(Grid((512,), 1), 8)
    assert not out.interior.any()


def test_gs1d_requires_inplace_flag():
    with pytest.raises(UnsupportedError):
        gs1d_temporal(Grid((512,), 1), 4, KernelVariant("base", False))


def test_load_once_one_element_per_vector():
    """Each interior input element is loaded exactly once per vl time steps:
    amortized, vl elements of bottom traffic per vl output vectors."""
    e = get("heat1d")
    deltas = []
    for nx in (512, 1024):
        bk = CountingBackend(4)
        heat1d_temporal(Grid.random((nx,), seed=2), 8, KernelVariant("base"), bk)
        deltas.append(bk.counters.snapshot())
    d = deltas[1] - deltas[0]
    elements = 4 * (d.vector_loads + d.strided_loads)
    assert elements == d.output_vectors


def test_steady_counts_both_variants():
    expect = {"base": (2.5, 1.0), "two_stride": (2.0, 0.75)}
    for scheme, (inl, xl) in expect.items():
        deltas = []
        for nx in (512, 1024):
            bk = CountingBackend(4)
            heat1d_temporal(Grid.random((nx,), seed=2), 8, KernelVariant(scheme), bk)
            deltas.append(bk.counters.snapshot())
        d = deltas[1] - deltas[0]
        assert d.inlane_reorg / d.output_vectors == inl
        assert d.xlane_reorg / d.output_vectors == xl


def test_register_budget_13():
    for scheme in ("base", "two_stride"):
        bk = CountingBackend(4)
        heat1d_temporal(Grid.random((1024,), seed=3), 8, KernelVariant(scheme), bk)
        assert bk.max_live() <= 13, scheme
