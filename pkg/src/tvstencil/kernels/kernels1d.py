"""One-dimensional time-lane kernels: 3-point Jacobi heat and Gauss-Seidel.

Band structure per vl time steps (0-based interior coordinates, time offsets
k relative to the band base):

* prologue: time t+k computed scalar for x in [0, (vl-k)*s + sl_k), where
  sl_k is the extra lane-group stagger for the low-group lanes;
* pipeline fill: the s+r live input vectors assembled with strided loads
  from the prologue rows;
* steady loop over x: one vectorized stencil application per x, the output
  recycled into the input vector for x+s by the group assembler; tops stored
  and bottoms loaded once per vl iterations;
* drain: the final live input vectors scattered back to the time rows
  (plus, for two_stride, the last two not-yet-consumed middle copies);
* epilogue: time t+k computed scalar for x in [x_last+1+offset(k), NX).

The intermediate time rows t+1..t+vl-1 are band-local scratch; only the t
and t+vl planes are real storage.  In single-array mode the t+vl plane *is*
the t plane: steady top stores trail the bottom loads by vl*s cells, so the
overwrite is safe, halving memory traffic for Jacobi.
"""

from __future__ import annotations

import numpy as np

from ..catalog import get as catalog_get
from ..errors import SizeError, UnsupportedError
from ..grid import Grid
from ..model import ScheduleParams
from ..vec import SimdBackend
from . import KernelVariant
from .assemble import BaseAssembler, TwoStrideAssembler


def _coeff_splats(bk, spec):
    """Coefficient constant registers, one per distinct value (a symmetric
    3-point stencil needs two, matching a real register allocation)."""
    pool = {}
    table = {}
    for off in spec.offsets():
        v = spec.coefficients[off]
        if v not in pool:
            pool[v] = bk.splat(v)
        table[off] = pool[v]
    return table


def _jacobi_row(spec, dst, src, off, lo, hi):
    """Scalar-path row segment: dst[lo:hi) at time k from src at time k-1."""
    if hi <= lo:
        return
    offs = spec.offsets()
    seg = lambda d: src[off + lo + d : off + hi + d]
    acc = spec.coefficients[offs[0]] * seg(offs[0][0])
    for o in offs[1:]:
        acc = spec.coefficients[o] * seg(o[0]) + acc
    dst[off + lo : off + hi] = acc


def _gs_row(spec, dst, src, off, lo, hi):
    """Scalar Gauss-Seidel row segment: the left tap reads dst (newest)."""
    offs = spec.offsets()
    cs = [spec.coefficients[o] for o in offs]
    for x in range(lo, hi):
        acc = cs[0] * dst[off + x + offs[0][0]]
        for c, o in zip(cs[1:], offs[1:]):
            acc = c * src[off + x + o[0]] + acc
        dst[off + x] = acc


def _resolve(name, grid, variant):
    entry = catalog_get(name)
    spec = entry.spec
    var = variant or KernelVariant()
    params = var.params or entry.params(var.scheme)
    if var.scheme == "two_stride" and params.sl == 0:
        params = ScheduleParams(params.s, entry.sl or 2, params.vl)
    if var.scheme == "base" and params.sl != 0:
        raise UnsupportedError("base scheme requires sl=0")
    if grid.dim != 1:
        raise SizeError("1D kernel on a non-1D grid")
    nx = grid.extents[0]
    if nx < params.vl * (params.s + 1) + params.sl:
        raise SizeError(f"NX={nx} below the steady-loop minimum for s={params.s}")
    return spec, var, params


def heat1d_temporal(grid: Grid, steps: int, variant: KernelVariant | None = None,
                    backend: SimdBackend | None = None) -> Grid:
    spec, var, params = _resolve("heat1d", grid, variant)
    bk = backend or SimdBackend(params.vl, grid.dtype)
    return _run_1d(spec, grid, steps, var, params, bk, gauss=False)


def gs1d_temporal(grid: Grid, steps: int, variant: KernelVariant | None = None,
                  backend: SimdBackend | None = None) -> Grid:
    spec, var, params = _resolve("gs1d", grid, variant)
    if variant is not None and not variant.single_array:
        raise UnsupportedError("Gauss-Seidel runs in place; single_array is implied")
    var = KernelVariant(var.scheme, True, var.params)
    bk = backend or SimdBackend(params.vl, grid.dtype)
    return _run_1d(spec, grid, steps, var, params, bk, gauss=True)


def _run_1d(spec, grid, steps, var, params, bk, gauss):
    vl, s, sl = params.vl, params.s, params.sl
    nx = grid.extents[0]
    out_grid = grid.copy()
    row_t = out_grid.data
    off = out_grid.offset
    if gauss or var.single_array:
        row_out = row_t
    else:
        row_out = np.full_like(row_t, grid.boundary)
    # band-local intermediate time rows t+1 .. t+vl-1
    scratch = [None] + [np.full_like(row_t, grid.boundary) for _ in range(vl - 1)]
    rowk = lambda k: row_t if k == 0 else (row_out if k == vl else scratch[k])
    row_seg = _gs_row if gauss else _jacobi_row
    coeff = _coeff_splats(bk, spec)
    offs = spec.offsets()

    def pro_width(k):
        # row t+k feeds input lanes (stagger sl for the low lane group) and,
        # at k = vl/2, the first sl recycled middle copies: extend by sl there
        return (vl - k) * s + (sl if k <= vl // 2 else 0)

    def off_out(k):  # space offset of the time-(t+k) member of an output
        return params.lane_offset(k - 1)

    full_bands, trailing = divmod(steps, vl)
    for _ in range(full_bands):
        # -- prologue triangles ------------------------------------------
        for k in range(1, vl):
            row_seg(spec, rowk(k), rowk(k - 1), off, 0, min(pro_width(k), nx))

        # -- input pipeline fill -----------------------------------------
        if gauss:
            ring = [_gather_input(bk, rowk, off, q, params) for q in range(0, s)]
            prev_out = _gather_prev_out(bk, rowk, off, params)
        else:
            ring = [_gather_input(bk, rowk, off, q, params) for q in range(-1, s)]

        n_steady = nx + 1 - vl * s - sl
        groups = max(n_steady, 0) // vl
        if var.scheme == "two_stride":
            asm = TwoStrideAssembler(
                bk,
                mb_init=bk.vloadset(
                    [(row_t, off + vl * s + sl), (row_t, off + vl * s + sl + 1),
                     (scratch[2], off + 2 * s), (scratch[2], off + 2 * s + 1)]
                ),
                stale=ring[0],
            )
        else:
            asm = BaseAssembler(bk, stale=ring[0])

        # -- steady loop ---------------------------------------------------
        for g in range(groups):
            gbase = g * vl
            if var.scheme == "two_stride":
                b0 = off + gbase + vl * s + sl
                bottom = bk.vloadset([(row_t, b0 + i) for i in range(vl)])
            else:
                bottom = bk.vload(row_t, off + gbase + vl * s)
            asm.start_group(bottom)
            bottom = None
            for i in range(vl):
                if gauss:
                    acc = bk.vmul(coeff[offs[0]], prev_out)
                    acc = bk.vfma(coeff[offs[1]], ring[0], acc)
                    out = bk.vfma(coeff[offs[2]], ring[1], acc)
                else:
                    acc = bk.vmul(coeff[offs[0]], ring[0])
                    ring[0] = None
                    acc = bk.vfma(coeff[offs[1]], ring[1], acc)
                    out = bk.vfma(coeff[offs[2]], ring[2], acc)
                acc = None
                bk.mark_output_vectors(1)
                if gauss:
                    prev_out = out
                newin = asm.feed(i, out)
                out = None
                ring.pop(0)
                ring.append(newin)
            top = asm.finish_group()
            bk.vstore(top, row_out, off + gbase)
            top = None

        # -- drain the pipeline back to the rows ---------------------------
        x_last = groups * vl - 1
        qs = range(x_last + 1, x_last + 1 + s) if gauss else range(x_last, x_last + s + 1)
        _scatter_ring(bk, ring, qs, rowk, off, params)
        for lane, vec in asm.drain():
            scratch[2][off + x_last - 1 + lane + 2 * s + sl] = vec.lanes[lane]
            vec = None
        # band-local registers are all dead past this point
        ring = None
        asm = None
        newin = None
        if gauss:
            prev_out = None

        # -- epilogue triangles ---------------------------------------------
        for k in range(1, vl + 1):
            row_seg(spec, rowk(k), rowk(k - 1), off, max(x_last + 1 + off_out(k), 0), nx)

        if row_out is not row_t:
            row_t, row_out = row_out, row_t

    # trailing steps through the scalar path
    for _ in range(trailing):
        if gauss:
            _gs_row(spec, row_t, row_t, off, 0, nx)
        else:
            _jacobi_row(spec, scratch[1] if vl > 1 else row_out, row_t, off, 0, nx)
            row_t, scratch[1] = scratch[1], row_t

    out_grid.data = row_t
    return out_grid


def _scatter_ring(bk, ring, qs, rowk, off, params):
    """Write the still-live input vectors back to their time rows so the
    scalar epilogue can read the in-register-only intermediate values."""
    for q, vec in zip(qs, ring):
        bk.vstoreset(
            vec,
            [(rowk(p), off + q + params.lane_offset(p)) for p in range(params.vl)],
        )


def _gather_input(bk, rowk, off, q, params):
    """Input vector for pipeline position q: lane p = time t+p value at
    q + lane_offset(p), read from the prologue rows."""
    return bk.vloadset(
        [(rowk(p), off + q + params.lane_offset(p)) for p in range(params.vl)]
    )


def _gather_prev_out(bk, rowk, off, params):
    """Gauss-Seidel seed: the virtual output vector of iteration -1, lane p =
    time t+p+1 value at -1 + lane_offset(p) (boundary halo for the top lane)."""
    vl = params.vl
    return bk.vloadset(
        [(rowk(p + 1), off - 1 + params.lane_offset(p)) for p in range(vl)]
    )
