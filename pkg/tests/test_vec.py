"""Vector abstraction: op semantics, counting, backend equivalence."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tvstencil import AlignmentError, CountingBackend, SimdBackend
from tvstencil.vec import OpCounters


def both_backends(vl=4, dtype=np.float64):
    return SimdBackend(vl, dtype), CountingBackend(vl, dtype)


def test_vload_lane_order():
    bk = SimdBackend(4)
    mem = np.arange(1.0, 9.0)
    v = bk.vload(mem, 0)
    # lanes[0] is the lowest position: (pos3..pos0) = (4, 3, 2, 1)
    assert v.lanes.tolist() == [1, 2, 3, 4]


def test_vload_vstore_roundtrip_bitexact():
    bk = SimdBackend(4)
    mem = np.random.default_rng(0).uniform(-1, 1, 16)
    out = np.zeros(16)
    for idx in (0, 4, 8, 12):
        bk.vstore(bk.vload(mem, idx), out, idx)
    assert np.array_equal(mem, out)


def test_vload_misaligned_raises():
    bk = SimdBackend(4)
    with pytest.raises(AlignmentError):
        bk.vload(np.zeros(8), 2)
    with pytest.raises(AlignmentError):
        bk.vstore(bk.splat(0.0), np.zeros(8), 3)


def test_vloadset_gathers_addresses():
    bk = SimdBackend(4)
    rows = [np.arange(0.0, 40.0) + 100 * t for t in range(4)]
    s = 2
    v = bk.vloadset([(rows[3 - p], p * s) for p in range(4)])
    assert v.lanes.tolist() == [rows[3][0], rows[2][2], rows[1][4], rows[0][6]]


def test_vloadset_splat_and_stride0():
    bk = SimdBackend(4)
    mem = np.array([7.0, 8.0])
    v = bk.vloadset([(mem, 1)] * 4)
    assert v.lanes.tolist() == [8.0] * 4


def test_vrotate_moves_lanes_up():
    bk = SimdBackend(4)
    v = bk.from_lanes([1.0, 2.0, 3.0, 4.0])  # (pos3..pos0) = (4,3,2,1)
    r = bk.vrotate(v)
    # (d,c,b,a) -> (c,b,a,d) written high-to-low
    assert r.lanes.tolist() == [4.0, 1.0, 2.0, 3.0]


def test_vrotate_vl_times_identity_and_xlane_count():
    bk = CountingBackend(4)
    v = bk.from_lanes([1.0, 2.0, 3.0, 4.0])
    w = v
    for _ in range(4):
        w = bk.vrotate(w)
    assert np.array_equal(w.lanes, v.lanes)
    assert bk.counters.xlane_reorg == 4


def test_vrotate_splat_unchanged():
    bk = SimdBackend(4)
    v = bk.splat(5.0)
    assert np.array_equal(bk.vrotate(v).lanes, v.lanes)


def test_vblend_masks():
    bk = SimdBackend(4)
    a = bk.from_lanes([11.0, 12.0, 13.0, 14.0])
    b = bk.from_lanes([1.0, 2.0, 3.0, 4.0])
    assert bk.vblend(a, b, ()).lanes.tolist() == a.lanes.tolist()
    assert bk.vblend(a, b, (0, 1, 2, 3)).lanes.tolist() == b.lanes.tolist()
    assert bk.vblend(a, 9.0, (0,)).lanes.tolist() == [9.0, 12.0, 13.0, 14.0]


def test_blend_inserts_bottom_element():
    # rotated output (c,b,a,d) blended with e at position 0 -> (c,b,a,e)
    bk = SimdBackend(4)
    rot = bk.from_lanes([4.0, 1.0, 2.0, 3.0])
    res = bk.vblend(rot, 9.0, (0,))
    assert res.lanes.tolist() == [9.0, 1.0, 2.0, 3.0]


def test_inlane_permute_classification():
    bk = CountingBackend(4)
    v = bk.from_lanes([1.0, 2.0, 3.0, 4.0])
    w = bk.inlane_permute(v, (1, 0, 3, 2))  # swap within both 128-bit groups
    assert w.lanes.tolist() == [2.0, 1.0, 4.0, 3.0]
    assert bk.counters.inlane_reorg == 1 and bk.counters.xlane_reorg == 0
    with pytest.raises(ValueError):
        bk.inlane_permute(v, (2, 1, 0, 3))  # crosses the group boundary


def test_inlane_identity_elided():
    bk = CountingBackend(4)
    v = bk.from_lanes([1.0, 2.0, 3.0, 4.0])
    w = bk.inlane_permute(v, (0, 1, 2, 3))
    assert w is v
    assert bk.counters.inlane_reorg == 0


def test_xlane_permute_group_exchange():
    bk = CountingBackend(4)
    v = bk.from_lanes([1.0, 2.0, 3.0, 4.0])
    w = bk.xlane_permute(v, (2, 3, 0, 1))
    assert w.lanes.tolist() == [3.0, 4.0, 1.0, 2.0]
    assert bk.counters.xlane_reorg == 1


def test_lane_group_merge():
    bk = CountingBackend(4)
    a = bk.from_lanes([0.0, 1.0, 2.0, 3.0])
    b = bk.from_lanes([10.0, 11.0, 12.0, 13.0])
    m = bk.lane_group_merge(a, b, 0, 1)  # high <- a group0, low <- b group1
    assert m.lanes.tolist() == [12.0, 13.0, 0.0, 1.0]
    assert bk.counters.xlane_reorg == 1


def test_transpose4_values_and_counts():
    bk = CountingBackend(4)
    rows = [bk.from_lanes(np.arange(4 * i, 4 * i + 4, dtype=float)) for i in range(4)]
    cols = bk.transpose4(*rows)
    assert cols[0].lanes.tolist() == [0.0, 4.0, 8.0, 12.0]
    assert cols[3].lanes.tolist() == [3.0, 7.0, 11.0, 15.0]
    assert bk.counters.inlane_reorg == 8 and bk.counters.xlane_reorg == 4
    back = bk.transpose4(*cols)
    for r, b in zip(rows, back):
        assert np.array_equal(r.lanes, b.lanes)


def test_transpose4_diagonal_fixed_point():
    bk = SimdBackend(4)
    eye = [bk.from_lanes([float(i == j) for j in range(4)]) for i in range(4)]
    out = bk.transpose4(*eye)
    for i in range(4):
        assert np.array_equal(out[i].lanes, eye[i].lanes)


def test_arithmetic_examples():
    bk = SimdBackend(4)
    one = bk.splat(1.0)
    two = bk.splat(2.0)
    three = bk.splat(3.0)
    assert bk.vfma(one, two, three).lanes.tolist() == [5.0] * 4
    a = bk.from_lanes([1.0, 5.0, 3.0, 7.0])
    b = bk.from_lanes([4.0, 2.0, 6.0, 0.0])
    assert bk.vmax(a, b).lanes.tolist() == [4.0, 5.0, 6.0, 7.0]


def test_vcmpeq_mask_positions():
    bk = SimdBackend(4, np.int32)
    a = bk.from_lanes([1, 2, 3, 4])
    b = bk.from_lanes([1, 0, 3, 0])
    m = bk.vcmpeq(a, b)
    assert m.positions() == (0, 2)  # lanes ordered low to high


OPS = ["vadd", "vmul", "vfma", "vmax", "vrotate", "blend", "inlane", "xlane", "merge"]


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(OPS),
    st.lists(st.floats(-1e9, 1e9), min_size=12, max_size=12),
    st.integers(0, 2**32 - 1),
)
def test_backend_equivalence_float64(op, data, seed):
    """Counting backend lanes == plain backend lanes, bit for bit."""
    simd, count = both_backends()
    rng = np.random.default_rng(seed)
    vals = [np.array(data[i : i + 4]) for i in (0, 4, 8)]
    mask = tuple(int(i) for i in np.nonzero(rng.integers(0, 2, 4))[0])
    inpat = tuple(
        int(p) for p in (rng.integers(0, 2), rng.integers(0, 2),
                         2 + rng.integers(0, 2), 2 + rng.integers(0, 2))
    )
    xpat = tuple(int(p) for p in rng.permutation(4))
    groups = (int(rng.integers(0, 2)), int(rng.integers(0, 2)))
    outs = []
    for bk in (simd, count):
        a, b, c = (bk.from_lanes(v) for v in vals)
        if op == "vadd":
            r = bk.vadd(a, b)
        elif op == "vmul":
            r = bk.vmul(a, b)
        elif op == "vfma":
            r = bk.vfma(a, b, c)
        elif op == "vmax":
            r = bk.vmax(a, b)
        elif op == "vrotate":
            r = bk.vrotate(a)
        elif op == "blend":
            r = bk.vblend(a, b, mask)
        elif op == "inlane":
            r = bk.inlane_permute(a, inpat)
        elif op == "xlane":
            r = bk.xlane_permute(a, xpat)
        else:
            r = bk.lane_group_merge(a, b, *groups)
        outs.append(r.lanes.copy())
    assert np.array_equal(outs[0], outs[1])


def test_backend_equivalence_int32():
    simd, count = both_backends(8, np.int32)
    rng = np.random.default_rng(3)
    vals = rng.integers(-100, 100, size=(2, 8), dtype=np.int32)
    for bk in (simd, count):
        a = bk.from_lanes(vals[0])
        b = bk.from_lanes(vals[1])
        r = bk.vblend(bk.vmax(a, b), bk.vadd(a, b), bk.vcmpeq(a, b))
        if bk.counting:
            assert np.array_equal(r.lanes, expected)
        else:
            expected = r.lanes.copy()


def test_reorg_classification_total():
    """Every reorganization op lands in exactly one of inlane/xlane."""
    bk = CountingBackend(4)
    v = bk.from_lanes([1.0, 2.0, 3.0, 4.0])
    before = bk.counters.snapshot()
    bk.vrotate(v)
    bk.vblend(v, v, (1, 3))
    bk.inlane_permute(v, (1, 0, 3, 2))
    bk.xlane_permute(v, (3, 2, 1, 0))
    bk.lane_group_merge(v, v, 0, 0)
    d = bk.counters - before
    assert d.inlane_reorg == 2 and d.xlane_reorg == 3
    assert d.reorg_total() == 5


def test_counters_monotone_and_snapshot():
    bk = CountingBackend(4)
    v = bk.from_lanes([1.0, 2.0, 3.0, 4.0])
    seen = []
    for _ in range(5):
        bk.vadd(v, v)
        seen.append(bk.counters.arith_ops)
    assert seen == sorted(seen)
    snap = bk.counters.snapshot()
    bk.vadd(v, v)
    assert bk.counters.arith_ops == snap.arith_ops + 1


def test_opcounters_diff():
    a = OpCounters(vector_loads=5, arith_ops=10)
    b = OpCounters(vector_loads=2, arith_ops=4)
    d = a - b
    assert d.vector_loads == 3 and d.arith_ops == 6


def test_batched_ops_count_per_vector():
    bk = CountingBackend(4)
    row = np.arange(32.0)
    v = bk.vload_tiled(row, 0, 8)  # 8 vectors at once
    assert v.lanes.shape == (4, 8)
    assert bk.counters.vector_loads == 8
    bk.vrotate(v)
    assert bk.counters.xlane_reorg == 8


def test_max_live_simple_chain():
    bk = CountingBackend(4)
    a = bk.splat(1.0)
    b = bk.splat(2.0)
    c = bk.vadd(a, b)  # a, b live at entry
    d = bk.vadd(c, c)
    bk.vstore(d, np.zeros(4), 0)
    # peak: {a, b} at the first vadd entry, {a?, b?, c} dead afterwards
    assert bk.max_live() == 2
