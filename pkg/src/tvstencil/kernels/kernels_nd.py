"""Multi-dimensional time-lane kernels: Heat-2D/3D, 2D9P, Life, GS-2D/3D.

Only the outermost space dimension x can be skewed against time (the inner
time loop does not interchange with space loops), so x carries the time
lanes and the inner dimensions run inside each x-iteration.  Input vectors
cannot stay in registers across an inner sweep; they are persisted in
vector-major panels, one panel per pipeline position, holding the input
vector of every inner point contiguously (one aligned store to write, one
aligned load to read back).  A ring of s+r+1 panels covers the pipeline.

Jacobi kernels batch the entire inner space per x-iteration (inner points
are independent).  Gauss-Seidel kernels walk the inner dimensions
sequentially — the newest-value neighbor chains them — and take newest
x-neighbors from the previous x-iteration's raw output vectors, kept in a
two-slot output-panel ring, so no extra data reorganization is needed.

Group I/O (top stores, bottom loads) runs along the contiguous innermost
dimension through the same assembler as the 1D kernels, which keeps the
per-output-vector reorganization counts identical across dimensionality.
The two_stride scheme stays 1D-only: its middle-value recycling pairs values
across consecutive x-iterations, while the group I/O here pairs along the
inner dimension; composing them costs extra reorganizations and would break
the pinned counts.
"""

from __future__ import annotations

import numpy as np

from ..catalog import get as catalog_get
from ..errors import SizeError, UnsupportedError
from ..grid import Grid
from ..vec import SimdBackend, Vec
from . import KernelVariant
from .assemble import BaseAssembler, GenericAssembler


def jacobi2d_temporal(grid: Grid, steps: int, variant: KernelVariant | None = None,
                      backend: SimdBackend | None = None, kernel: str = "heat2d") -> Grid:
    return _run_nd(kernel, grid, steps, variant, backend, dim=2, gauss=False)


def jacobi3d_temporal(grid: Grid, steps: int, variant: KernelVariant | None = None,
                      backend: SimdBackend | None = None, kernel: str = "heat3d") -> Grid:
    return _run_nd(kernel, grid, steps, variant, backend, dim=3, gauss=False)


def gs2d_temporal(grid: Grid, steps: int, variant: KernelVariant | None = None,
                  backend: SimdBackend | None = None, kernel: str = "gs2d") -> Grid:
    return _run_nd(kernel, grid, steps, variant, backend, dim=2, gauss=True)


def gs3d_temporal(grid: Grid, steps: int, variant: KernelVariant | None = None,
                  backend: SimdBackend | None = None, kernel: str = "gs3d") -> Grid:
    return _run_nd(kernel, grid, steps, variant, backend, dim=3, gauss=True)


def _run_nd(kernel, grid, steps, variant, backend, dim, gauss):
    entry = catalog_get(kernel)
    spec = entry.spec
    var = variant or KernelVariant()
    if var.scheme == "two_stride":
        raise UnsupportedError("two_stride is 1D-only; see module docstring")
    params = var.params or entry.params("base")
    if gauss and variant is not None and not variant.single_array:
        raise UnsupportedError("Gauss-Seidel runs in place; single_array is implied")
    if grid.dim != dim or spec.dim != dim:
        raise SizeError(f"{kernel} expects a {spec.dim}D grid")
    if grid.extents[0] < params.vl * (params.s + 1):
        raise SizeError(
            f"NX={grid.extents[0]} below the steady-loop minimum for s={params.s}"
        )
    bk = backend or SimdBackend(params.vl, grid.dtype)
    if gauss:
        return _GsNd(spec, grid, params, bk).run(steps)
    return _JacobiNd(spec, grid, params, bk, var).run(steps)


class _NdBase:
    def __init__(self, spec, grid, params, bk):
        self.spec = spec
        self.params = params
        self.bk = bk
        self.vl = params.vl
        self.s = params.s
        self.r = spec.radius
        self.nx = grid.extents[0]
        self.inner = grid.extents[1:]
        self.off = grid.offset
        self.boundary = grid.boundary
        self.out_grid = grid.copy()
        self.dtype = grid.dtype
        # innermost extent padded to whole vector groups for the top/bottom I/O
        self.nzv = -(-self.inner[-1] // self.vl) * self.vl
        self.innerv = self.inner[:-1] + (self.nzv,)
        self.groups = self.nzv // self.vl
        self.ring_size = self.s + self.r + 1
        self.x_last = -1

    def make_planes(self):
        base = self.out_grid.data
        self.planes = [base]
        for _ in range(1, self.vl):
            self.planes.append(np.full_like(base, self.boundary))
        self.planes.append(base)  # single-array: t+vl plane aliases t

    def plane(self, k):
        return self.planes[k]

    def row(self, k, x):
        return self.plane(k)[self.off + x]

    def last_axis_rows(self, k, x):
        """Row(s) of plane k at x restricted to interior leading inner dims;
        the contiguous axis keeps its padding for group I/O."""
        arr = self.row(k, x)
        for e in self.inner[:-1]:
            arr = arr[self.off : self.off + e]
        return arr

    def prologue_width(self, k):
        return (self.vl - k) * self.s

    def epilogue_start(self, k):
        return self.x_last + 1 + self.params.lane_offset(k - 1)

    def inner_window(self, arr, shift=None, padded=True):
        ext = self.innerv if padded else self.inner
        sl = []
        for i, e in enumerate(ext):
            d = 0 if shift is None else shift[i]
            sl.append(slice(self.off + d, self.off + d + e))
        return arr[tuple(sl)]

    def alloc_panel(self):
        shape = tuple(self.off + e + self.off for e in self.innerv) + (self.vl,)
        return np.full(shape, self.boundary, dtype=self.dtype)

    def gather_panel(self, panel, q):
        """Pipeline fill: lane p of position q reads the t+p plane at
        x = q + lane_offset(p), one strided gather per panel."""
        sources = []
        for p in range(self.vl):
            mem = self.row(p, q + self.params.lane_offset(p))
            sources.append(
                (mem, tuple(slice(self.off, self.off + e) for e in self.innerv))
            )
        self.bk.vstore_block(self.bk.vloadset(sources), self.inner_window(panel))

    def scatter_panel(self, panel, q):
        """Drain a still-live panel back to the time planes for the epilogue."""
        data = self.inner_window(panel)
        for p in range(1, self.vl):
            self.inner_window(self.row(p, q + self.params.lane_offset(p)))[...] = data[..., p]

    def reset_row_pads(self, x):
        if self.nzv != self.inner[-1]:
            self.row(self.vl, x)[..., self.off + self.inner[-1] : self.off + self.nzv] = self.boundary

    def reset_panel_pads(self, panel):
        if self.nzv != self.inner[-1]:
            self.inner_window(panel)[..., self.inner[-1] :, :] = self.boundary

    def run(self, steps):
        bands, trailing = divmod(steps, self.vl)
        self.make_planes()
        for _ in range(bands):
            self.band()
            self.after_band()
        for _ in range(trailing):
            self.scalar_step()
        self.out_grid.data = self.planes[0]
        return self.out_grid

    def after_band(self):
        pass


class _JacobiNd(_NdBase):
    def __init__(self, spec, grid, params, bk, var):
        super().__init__(spec, grid, params, bk)
        self.single_array = var.single_array
        self.is_life = spec.is_life

    def make_planes(self):
        super().make_planes()
        if not self.single_array:
            self.planes[self.vl] = np.full_like(self.planes[0], self.boundary)

    def after_band(self):
        if not self.single_array:
            self.planes[0], self.planes[self.vl] = self.planes[self.vl], self.planes[0]

    def scalar_step(self):
        tmp = np.full_like(self.planes[0], self.boundary)
        for x in range(self.nx):
            self.plane_row_update(tmp, self.planes[0], x)
        self.planes[0] = tmp
        self.out_grid.data = tmp

    def plane_row_update(self, dstplane, srcplane, x):
        """Scalar-path update of one x-row, whole inner space vectorized."""
        spec = self.spec
        offs = spec.offsets()
        src = lambda o: self.inner_window(srcplane[self.off + x + o[0]], o[1:], padded=False)
        if self.is_life:
            n = src(offs[0]) + src(offs[1])
            for o in offs[2:]:
                n = n + src(o)
            alive = self.inner_window(srcplane[self.off + x], padded=False)
            out = np.zeros_like(alive)
            for b in sorted(spec.birth):
                out = np.where(n == b, np.int32(1), out)
            for sv in sorted(spec.survive - spec.birth):
                out = np.where(n == sv, alive, out)
        else:
            out = spec.coefficients[offs[0]] * src(offs[0])
            for o in offs[1:]:
                out = spec.coefficients[o] * src(o) + out
        self.inner_window(dstplane[self.off + x], padded=False)[...] = out

    def band(self):
        vl, s, r, bk = self.vl, self.s, self.r, self.bk
        spec = self.spec
        offs = spec.offsets()
        for k in range(1, vl):
            for x in range(min(self.prologue_width(k), self.nx)):
                self.plane_row_update(self.plane(k), self.plane(k - 1), x)
        ring = [self.alloc_panel() for _ in range(self.ring_size)]
        for q in range(-r, s):
            self.gather_panel(ring[q % self.ring_size], q)

        xg = max(self.nx + 1 - vl * s, 0) // vl * vl
        self.x_last = xg - 1
        brank = len(self.innerv)
        if self.is_life:
            one = bk.splat(1, brank)
            zero = bk.splat(0, brank)
            consts = {n: bk.splat(n, brank) for n in sorted(spec.birth | spec.survive)}
        else:
            coeff = {o: bk.splat(spec.coefficients[o], brank) for o in offs}
        asm = None
        halo_win = tuple(slice(self.off - r, self.off + e + r) for e in self.innerv)

        for x in range(xg):
            bottom = bk.vload_tiled(self.last_axis_rows(0, x + vl * s), self.off, self.groups)
            if asm is None:
                cls = BaseAssembler if vl == 4 else GenericAssembler
                asm = cls(bk, stale=bottom)
            asm.start_group(bottom)
            bottom = None

            blocks = {dx: bk.vload_block(ring[(x + dx) % self.ring_size][halo_win])
                      for dx in range(-r, r + 1)}
            tap = lambda o: bk.view(
                blocks[o[0]],
                tuple(slice(r + o[1 + j], r + o[1 + j] + self.innerv[j])
                      for j in range(len(self.innerv))),
            )
            if self.is_life:
                acc = bk.vadd(tap(offs[0]), tap(offs[1]))
                for o in offs[2:]:
                    acc = bk.vadd(acc, tap(o))
                outv = zero
                for b in sorted(spec.birth):
                    outv = bk.vblend(outv, one, bk.vcmpeq(acc, consts[b]))
                for sv in sorted(spec.survive - spec.birth):
                    outv = bk.vblend(outv, tap((0,) * spec.dim), bk.vcmpeq(acc, consts[sv]))
            else:
                outv = bk.vmul(coeff[offs[0]], tap(offs[0]))
                for o in offs[1:]:
                    outv = bk.vfma(coeff[o], tap(o), outv)
            blocks = None
            bk.mark_output_vectors(int(np.prod(outv.lanes.shape[1:])))

            newin = np.empty((vl,) + outv.lanes.shape[1:], dtype=outv.lanes.dtype)
            for gpos in range(vl):
                in_g = asm.feed(gpos, bk.view(outv, (Ellipsis, slice(gpos, None, vl))))
                newin[..., gpos::vl] = in_g.lanes
            outv = None
            bk.vstore_tiled(asm.finish_group(), self.last_axis_rows(vl, x), self.off)
            target = ring[(x + s) % self.ring_size]
            bk.vstore_block(Vec(newin), self.inner_window(target))
            self.reset_panel_pads(target)
            self.reset_row_pads(x)

        for q in range(self.x_last, self.x_last + s + 1):
            self.scatter_panel(ring[q % self.ring_size], q)
        for k in range(1, vl + 1):
            for x in range(max(self.epilogue_start(k), 0), self.nx):
                self.plane_row_update(self.plane(k), self.plane(k - 1), x)


class _GsNd(_NdBase):
    def run(self, steps):
        bands, trailing = divmod(steps, self.vl)
        self.make_planes()
        for _ in range(bands):
            self.band()
        for _ in range(trailing):
            for x in range(self.nx):
                self.gs_row(self.planes[0], self.planes[0], x)
        self.out_grid.data = self.planes[0]
        return self.out_grid

    def gs_row(self, dstplane, srcplane, x):
        """One x-row of the in-place sweep; lexicographically earlier taps
        read updated values, later taps previous-time values."""
        spec = self.spec
        offs = spec.offsets()
        cs = [spec.coefficients[o] for o in offs]
        off = self.off
        if len(self.inner) == 1:
            dl = dstplane[off + x - 1]
            d = dstplane[off + x]
            sc = srcplane[off + x]
            sr = srcplane[off + x + 1]
            for y in range(off, off + self.inner[0]):
                acc = cs[0] * dl[y]
                acc = cs[1] * d[y - 1] + acc
                acc = cs[2] * sc[y] + acc
                acc = cs[3] * sc[y + 1] + acc
                acc = cs[4] * sr[y] + acc
                d[y] = acc
        else:
            dl = dstplane[off + x - 1]
            d = dstplane[off + x]
            sc = srcplane[off + x]
            sr = srcplane[off + x + 1]
            for y in range(off, off + self.inner[0]):
                for z in range(off, off + self.inner[1]):
                    acc = cs[0] * dl[y, z]
                    acc = cs[1] * d[y - 1, z] + acc
                    acc = cs[2] * d[y, z - 1] + acc
                    acc = cs[3] * sc[y, z] + acc
                    acc = cs[4] * sc[y, z + 1] + acc
                    acc = cs[5] * sc[y + 1, z] + acc
                    acc = cs[6] * sr[y, z] + acc
                    d[y, z] = acc

    def gather_prev_out(self, dest):
        """Virtual output vectors of x = -1: lane p reads the t+p+1 plane at
        -1 + lane_offset(p) (the top lane lands on the boundary halo)."""
        sources = []
        for p in range(self.vl):
            mem = self.row(p + 1, -1 + self.params.lane_offset(p))
            sources.append(
                (mem, tuple(slice(self.off, self.off + e) for e in self.innerv))
            )
        self.bk.vstore_block(self.bk.vloadset(sources), self.inner_window(dest))

    def band(self):
        vl, s, r, bk = self.vl, self.s, self.r, self.bk
        spec = self.spec
        offs = spec.offsets()
        for k in range(1, vl):
            for x in range(min(self.prologue_width(k), self.nx)):
                self.gs_row(self.plane(k), self.plane(k - 1), x)
        ring = [self.alloc_panel() for _ in range(self.ring_size)]
        for q in range(0, s):
            self.gather_panel(ring[q % self.ring_size], q)
        o_prev = self.alloc_panel()
        o_cur = self.alloc_panel()
        self.gather_prev_out(o_prev)

        xg = max(self.nx + 1 - vl * s, 0) // vl * vl
        self.x_last = xg - 1
        coeff = {o: bk.splat(spec.coefficients[o]) for o in offs}
        bvec = bk.splat(self.boundary)
        asm = None
        leads = [(y,) for y in range(self.inner[0])] if len(self.inner) > 1 else [()]

        innermost_prev = (0,) * (spec.dim - 1) + (-1,)
        for x in range(xg):
            tgt = ring[(x + s) % self.ring_size]
            for lead in leads:
                brow = self.last_axis_rows(0, x + vl * s)
                trow = self.last_axis_rows(vl, x)
                if lead:
                    brow = brow[lead[0]]
                    trow = trow[lead[0]]
                # hoist one (..., vl) row view per tap out of the inner loop
                taps = []
                for o in offs:
                    if o == innermost_prev:
                        taps.append((coeff[o], None, 0))
                        continue
                    if o[0] == -1:
                        arr = o_prev
                    elif o[0] == 0 and any(c < 0 for c in o[1:]):
                        arr = o_cur
                    else:
                        arr = ring[(x + o[0]) % self.ring_size]
                    row = arr[self.off + lead[0] + o[1]] if lead else arr
                    taps.append((coeff[o], row, o[-1]))
                tgt_row = tgt[self.off + lead[0]] if lead else tgt
                ocur_row = o_cur[self.off + lead[0]] if lead else o_cur
                prev_out = bvec
                for g in range(self.groups):
                    zb = g * vl
                    bottom = bk.vload(brow, self.off + zb)
                    if asm is None:
                        cls = BaseAssembler if vl == 4 else GenericAssembler
                        asm = cls(bk, stale=bottom)
                    asm.start_group(bottom)
                    bottom = None
                    for i in range(vl):
                        zi = self.off + zb + i
                        acc = None
                        for c, row, dz in taps:
                            src = prev_out if row is None else bk.vload_block(row[zi + dz])
                            acc = bk.vmul(c, src) if acc is None else bk.vfma(c, src, acc)
                        bk.mark_output_vectors(1)
                        prev_out = acc
                        inv = asm.feed(i, acc)
                        bk.vstore_block(inv, tgt_row[zi])
                        bk.vstore_block(acc, ocur_row[zi])
                        acc = None
                        inv = None
                    bk.vstore(asm.finish_group(), trow, self.off + zb)
            self.reset_panel_pads(tgt)
            self.reset_panel_pads(o_cur)
            self.reset_row_pads(x)
            o_prev, o_cur = o_cur, o_prev

        for q in range(self.x_last + 1, self.x_last + 1 + s):
            self.scatter_panel(ring[q % self.ring_size], q)
        for k in range(1, vl + 1):
            for x in range(max(self.epilogue_start(k), 0), self.nx):
                self.gs_row(self.plane(k), self.plane(k - 1), x)
