"""Longest-common-subsequence length by time-lane vectorization.

The DP table lcs[x][y] (prefix lengths of A[:x] vs B[:y]) is a 1D
Gauss-Seidel-style stencil once the A index is viewed as the time dimension:
lcs[x][y] reads lcs[x-1][y], lcs[x-1][y-1] and lcs[x][y-1], so the space
stride only needs s >= 1.  Eight consecutive x-rows ride in one int32
vector; the table itself is never materialized, only the wavefront row
lcs[x_base][y] plus seven band-local scratch rows.

Per steady iteration (one y position) the lanes update independently:

    out = equal(A-lane, B-lane) ? diag + 1 : max(up, left)

where up is the current input vector, diag the previous one, left the
previous output vector, and the select runs through a mask blend.  B slides
through a lane window one position per iteration (a variable coefficient
stream); A is a per-band constant vector.  Output vectors recycle into
input vectors with the same rotate-and-insert cadence as the other kernels;
tops (finished lcs[x_base+8][y] values) store aligned once per eight
iterations over the wavefront row in place (writes trail reads by 8 cells).
"""

from __future__ import annotations

import numpy as np

from ..catalog import LCS_PARAMS
from ..vec import SimdBackend
from .assemble import GenericAssembler


def lcs_temporal(a, b, backend: SimdBackend | None = None) -> int:
    """LCS length of integer sequences ``a`` and ``b``."""
    a = np.asarray(a, dtype=np.int32)
    b = np.asarray(b, dtype=np.int32)
    if a.size == 0 or b.size == 0:
        return 0
    vl = LCS_PARAMS.vl
    bk = backend or SimdBackend(vl, np.int32)
    na, nb = len(a), len(b)
    off = vl - 1  # y=1 then sits on an aligned index
    width = off + nb + 2 * vl

    apad = np.zeros(off + na + vl + 1, dtype=np.int32)
    apad[off + 1 : off + 1 + na] = a
    bpad = np.full(width, np.int32(-(2**31)), dtype=np.int32)  # pad never matters
    bpad[off + 1 : off + 1 + nb] = b
    row = np.zeros(width, dtype=np.int32)  # lcs[x_base][y]; y<=0 boundary = 0
    scratch = [None] + [np.zeros(width, dtype=np.int32) for _ in range(vl)]

    bands, trailing = divmod(na, vl)
    down = tuple(range(1, vl)) + (0,)

    for band in range(bands):
        xb = band * vl
        rowk = lambda k: row if k == 0 else scratch[k]
        # scalar prologue triangles: row k covers y in [1, vl-k]
        for k in range(1, vl):
            _scalar_dp_row(rowk(k), rowk(k - 1), bpad, apad[off + xb + k], off, 1, vl - k + 1)

        groups = max(nb - vl, 0) // vl  # bottom reads row[q+vl] up to first pad
        q_end = 1 + groups * vl

        avec = bk.vloadset([(apad, off + xb + p + 1) for p in range(vl)])
        ones = bk.splat(1)
        in_prev = bk.vloadset([(rowk(p), off + 0 + (vl - 1 - p)) for p in range(vl)])
        in_cur = bk.vloadset([(rowk(p), off + 1 + (vl - 1 - p)) for p in range(vl)])
        out_prev = bk.vloadset([(rowk(p + 1), off + 0 + (vl - 1 - p)) for p in range(vl)])
        bwin = bk.vloadset([(bpad, off + 1 + (vl - 1 - p)) for p in range(vl)])
        asm = GenericAssembler(bk, stale=bwin)

        for g in range(groups):
            qg = 1 + g * vl
            bottom = bk.vload(row, off + qg + vl)
            asm.start_group(bottom)
            bblock = bk.vload(bpad, off + qg + vl)
            for i in range(vl):
                eq = bk.vcmpeq(avec, bwin)
                mx = bk.vmax(in_cur, out_prev)
                dp1 = bk.vadd(in_prev, ones)
                out = bk.vblend(mx, dp1, eq)
                bk.mark_output_vectors(1)
                newin = asm.feed(i, out)
                in_prev = in_cur
                in_cur = newin
                out_prev = out
                bwin = bk.vblend(bk.vrotate(bwin), bblock, (0,))
                bblock = bk.xlane_permute(bblock, down)
            bk.vstore(asm.finish_group(), rowk(vl), off + qg)

        # drain the live vectors so the scalar epilogue can read them
        q_last = q_end - 1
        for q, vec in ((q_last, in_prev), (q_last + 1, in_cur)):
            for p in range(1, vl):
                rowk(p)[off + q + (vl - 1 - p)] = vec.lanes[p]
        for p in range(vl):
            rowk(p + 1)[off + q_last + (vl - 1 - p)] = out_prev.lanes[p]
        for k in range(1, vl + 1):
            e_k = q_last + 1 + (vl - k)
            _scalar_dp_row(rowk(k), rowk(k - 1), bpad, apad[off + xb + k], off, e_k, nb + 1)
        row, scratch[vl] = scratch[vl], row
        row[: off + 1] = 0  # boundary column stays zero

    for t in range(trailing):
        _scalar_dp_row(scratch[1], row, bpad, apad[off + bands * vl + t + 1], off, 1, nb + 1)
        row, scratch[1] = scratch[1], row

    return int(row[off + nb])


def _scalar_dp_row(dst, src, bpad, a_val, off, y0, y1):
    """One DP row segment: dst = lcs[x] over [y0, y1) given src = lcs[x-1]."""
    for y in range(off + y0, off + y1):
        if bpad[y] == a_val:
            dst[y] = src[y - 1] + 1
        else:
            up = src[y]
            left = dst[y - 1]
            dst[y] = up if up >= left else left
