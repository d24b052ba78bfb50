"""Iteration-space tiling and the parallel wavefront executor.

Shapes: diamond for 1D Jacobi (alternating shrinking/growing trapezoid
families), diamond-on-x + parallelogram-on-inner-dims for 2D/3D Jacobi,
parallelogram on all space dimensions for Gauss-Seidel, rectangles for LCS.
A tile owns, per time step, one clipped window per space dimension; windows
move by the per-dimension slope each step.  The union of tiles covers the
iteration space exactly once, and every inter-tile dependence points from an
earlier wave to a later one (both properties have exhaustive checkers below,
exercised by the test suite over random configurations).

Wave orders: band-then-family major for the diamond shapes (inner-dimension
tiles chain left to right within a wave family); bands overlap for the
parallelogram shape, where tile (band, k1..kd) runs in wave
(dim+1)*band + k1 + ... + kd — the classic pipelined wavefront; LCS
rectangles run in anti-diagonal waves.

Execution keeps the full time history of the grid (one plane per time
level), so tiles only ever read cells that some earlier wave (or an earlier
point of the same tile) produced, whatever the worker count.  1D tiles run
their vl-high slabs through the same time-lane machinery as the unblocked
kernels wherever the slab admits a steady loop, edges through the scalar
path; multi-dimensional tiles use the scalar engines (bit-identical by the
shared expression tree).
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import _diag_groups
from .catalog import LCS_PARAMS, get as catalog_get
from .errors import SizeError
from .grid import Grid
from .kernels import KernelVariant
from .kernels.assemble import BaseAssembler, TwoStrideAssembler
from .vec import SimdBackend


@dataclass(frozen=True)
class Tile:
    """Time range [t0, t1) and per-dimension moving windows: dimension d at
    time t covers [lo[d] + slope_lo[d]*(t-t0), hi[d] + slope_hi[d]*(t-t0)),
    clipped to the grid."""

    t0: int
    t1: int
    lo: tuple[int, ...]
    hi: tuple[int, ...]
    slope_lo: tuple[int, ...]
    slope_hi: tuple[int, ...]

    def windows(self, t: int, extents) -> list[tuple[int, int]]:
        out = []
        dt = t - self.t0
        for d, n in enumerate(extents):
            lo = max(self.lo[d] + self.slope_lo[d] * dt, 0)
            hi = min(self.hi[d] + self.slope_hi[d] * dt, n)
            out.append((lo, max(hi, lo)))
        return out

    def as_dict(self):
        return {
            "time": [self.t0, self.t1],
            "origin": list(self.lo),
            "extents": [h - l for l, h in zip(self.lo, self.hi)],
            "slope_lo": list(self.slope_lo),
            "slope_hi": list(self.slope_hi),
        }


@dataclass
class TileSchedule:
    shape: str
    extents: tuple[int, ...]
    steps: int
    space_tile: tuple[int, ...]
    time_height: int
    waves: list[list[Tile]] = field(default_factory=list)

    def tiles(self):
        for wave in self.waves:
            yield from wave

    def dump_json(self) -> str:
        return json.dumps(
            {
                "shape": self.shape,
                "extents": list(self.extents),
                "steps": self.steps,
                "space_tile": list(self.space_tile),
                "time_height": self.time_height,
                "waves": [[t.as_dict() for t in w] for w in self.waves],
            },
            indent=1,
        )


SHAPE_BY_KERNEL = {
    "heat1d": "diamond",
    "heat2d": "hybrid",
    "jac2d9p": "hybrid",
    "heat3d": "hybrid",
    "life": "hybrid",
    "gs1d": "parallelogram",
    "gs2d": "parallelogram",
    "gs3d": "parallelogram",
    "lcs": "rectangle",
}


def build_schedule(kernel: str, extents, steps: int, space_tile, time_height: int) -> TileSchedule:
    """Legal tile schedule for one kernel's dependence structure."""
    extents = tuple(int(e) for e in extents)
    space_tile = tuple(int(w) for w in space_tile)
    shape = SHAPE_BY_KERNEL[kernel]
    if kernel == "lcs":
        vl = LCS_PARAMS.vl
    else:
        entry = catalog_get(kernel)
        vl = entry.vl
        if space_tile[0] < 4 * entry.s * vl and shape in ("diamond", "hybrid"):
            raise SizeError(
                f"vectorized-dimension tile {space_tile[0]} below 4*s*vl = {4 * entry.s * vl}"
            )
    if time_height % vl or time_height <= 0:
        raise SizeError(f"time_height {time_height} must be a positive multiple of vl={vl}")
    if any(w <= 0 for w in space_tile) or len(space_tile) != len(extents):
        raise SizeError("bad space_tile")
    if shape == "parallelogram" and time_height > min(space_tile):
        raise SizeError("parallelogram tiling requires time_height <= every space tile")
    if shape == "hybrid" and len(extents) > 1 and time_height > min(space_tile[1:]):
        raise SizeError("hybrid tiling requires time_height <= inner space tiles")

    sched = TileSchedule(shape, extents, steps, space_tile, time_height)
    builder = {
        "diamond": _build_diamond,
        "hybrid": _build_diamond,  # hybrid = diamond on x, parallelogram inside
        "parallelogram": _build_parallelogram,
        "rectangle": _build_rectangle,
    }[shape]
    builder(sched)
    sched.waves = [w for w in sched.waves if w]
    return sched


def _inner_grid(extents, tiles, height):
    """Left-shifting parallelogram blocks per inner dimension: block k covers
    [k*W - dt, (k+1)*W - dt); one extra block plugs the right edge."""
    dims = []
    for n, w in zip(extents, tiles):
        nk = -(-n // w) + 1
        dims.append([(k, k * w, (k + 1) * w) for k in range(nk)])
    return dims


def _build_diamond(sched: TileSchedule):
    nx = sched.extents[0]
    wx = sched.space_tile[0]
    h = sched.time_height
    nkx = -(-nx // wx)
    inner = _inner_grid(sched.extents[1:], sched.space_tile[1:], h)
    nbands = -(-sched.steps // h)
    kmax = sum(len(d) for d in inner) + 1
    waves: dict[int, list[Tile]] = {}
    for b in range(nbands):
        t0, t1 = b * h, min((b + 1) * h, sched.steps)
        for fam in (0, 1):
            base_w = (2 * b + fam) * kmax
            for combo in _combos(inner):
                ksum = sum(k for k, _, _ in combo)
                ilo = tuple(lo for _, lo, _ in combo)
                ihi = tuple(hi for _, _, hi in combo)
                islo = tuple(-1 for _ in combo)
                for kx in range(-1 if fam else 0, nkx + 1):
                    if fam == 0:  # shrinking trapezoid
                        tile = Tile(t0, t1, (kx * wx,) + ilo, ((kx + 1) * wx,) + ihi,
                                    (1,) + islo, (-1,) + islo)
                    else:  # growing trapezoid filling the gap
                        c = (kx + 1) * wx
                        tile = Tile(t0, t1, (c,) + ilo, (c,) + ihi,
                                    (-1,) + islo, (1,) + islo)
                    if _nonempty(tile, sched.extents):
                        waves.setdefault(base_w + ksum, []).append(tile)
    sched.waves = [waves[w] for w in sorted(waves)]


def _build_parallelogram(sched: TileSchedule):
    h = sched.time_height
    dims = _inner_grid(sched.extents, sched.space_tile, h)
    nbands = -(-sched.steps // h)
    alpha = len(sched.extents) + 1
    waves: dict[int, list[Tile]] = {}
    for b in range(nbands):
        t0, t1 = b * h, min((b + 1) * h, sched.steps)
        for combo in _combos(dims):
            ksum = sum(k for k, _, _ in combo)
            tile = Tile(
                t0, t1,
                tuple(lo for _, lo, _ in combo),
                tuple(hi for _, _, hi in combo),
                tuple(-1 for _ in combo),
                tuple(-1 for _ in combo),
            )
            if _nonempty(tile, sched.extents):
                waves.setdefault(alpha * b + ksum, []).append(tile)
    sched.waves = [waves[w] for w in sorted(waves)]


def _build_rectangle(sched: TileSchedule):
    h = sched.time_height
    nbands = -(-sched.steps // h)
    waves: dict[int, list[Tile]] = {}
    for b in range(nbands):
        t0, t1 = b * h, min((b + 1) * h, sched.steps)
        for combo in _combos(_inner_grid(sched.extents, sched.space_tile, 0)):
            ksum = sum(k for k, _, _ in combo)
            tile = Tile(
                t0, t1,
                tuple(lo for _, lo, _ in combo),
                tuple(hi for _, _, hi in combo),
                tuple(0 for _ in combo),
                tuple(0 for _ in combo),
            )
            if _nonempty(tile, sched.extents):
                waves.setdefault(b + ksum, []).append(tile)
    sched.waves = [waves[w] for w in sorted(waves)]


def _combos(dims):
    if not dims:
        return [()]
    rest = _combos(dims[1:])
    return [(d,) + r for d in dims[0] for r in rest]


def _nonempty(tile: Tile, extents) -> bool:
    for t in range(tile.t0, tile.t1):
        if all(hi > lo for lo, hi in tile.windows(t, extents)):
            return True
    return False


# ---------------------------------------------------------------------------
# schedule invariants (exhaustive checkers, used by the test suite)
# ---------------------------------------------------------------------------

def coverage_map(schedule: TileSchedule):
    """Multiplicity of every iteration-space point across all tiles."""
    counts = np.zeros((schedule.steps,) + schedule.extents, dtype=np.int16)
    for tile in schedule.tiles():
        for t in range(tile.t0, min(tile.t1, schedule.steps)):
            win = tile.windows(t, schedule.extents)
            sl = (t,) + tuple(slice(lo, hi) for lo, hi in win)
            counts[sl] += 1
    return counts


def check_coverage(schedule: TileSchedule) -> bool:
    """Every point covered exactly once, no overlaps, no gaps."""
    return bool((coverage_map(schedule) == 1).all())


def check_wave_order(schedule: TileSchedule, deps) -> bool:
    """Every inter-tile dependence crosses from an earlier wave to a later
    one (same-tile sources are ordered by the in-tile sweep).  Exhaustive
    over points: fine for test-sized spaces."""
    tile_wave = {}
    owner = np.full((schedule.steps + 1,) + schedule.extents, -1, dtype=np.int32)
    tid = 0
    for w, wave in enumerate(schedule.waves):
        for tile in wave:
            tile_wave[tid] = w
            for t in range(tile.t0, min(tile.t1, schedule.steps)):
                sl = (t + 1,) + tuple(
                    slice(lo, hi) for lo, hi in tile.windows(t, schedule.extents)
                )
                owner[sl] = tid
            tid += 1
    if (owner[1:] < 0).any():
        return False  # gap: some point never computed
    wave_of = np.full(tid + 1, -1, dtype=np.int32)
    for i, w in tile_wave.items():
        wave_of[i] = w

    tid = 0
    dims = len(schedule.extents)
    for w, wave in enumerate(schedule.waves):
        for tile in wave:
            for t in range(tile.t0, min(tile.t1, schedule.steps)):
                win = tile.windows(t, schedule.extents)
                if any(hi <= lo for lo, hi in win):
                    continue
                for d in deps:
                    st = t + 1 - d.dt
                    if st < 1:
                        continue
                    src_sl = []
                    ok = True
                    for i in range(dims):
                        lo, hi = win[i]
                        slo = max(lo + d.dx[i], 0)
                        shi = min(hi + d.dx[i], schedule.extents[i])
                        if shi <= slo:
                            ok = False
                            break
                        src_sl.append(slice(slo, shi))
                    if not ok:
                        continue
                    src = owner[(st,) + tuple(src_sl)]
                    sw = wave_of[src]
                    if (sw > w).any():
                        return False
                    if ((sw == w) & (src != tid)).any():
                        return False
            tid += 1
    return True


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

MAX_HISTORY_ELEMS = 3 * 10**8


class _History:
    """Full time history: one padded plane per time level."""

    def __init__(self, grid: Grid, steps: int):
        total = (steps + 1) * grid.data.size
        if total > MAX_HISTORY_ELEMS:
            raise SizeError(
                f"blocked execution would need {total} elements of history; desk scale only"
            )
        self.off = grid.offset
        self.boundary = grid.boundary
        self.rows = [grid.data.copy()]
        for _ in range(steps):
            self.rows.append(np.full_like(grid.data, grid.boundary))


def execute_parallel(kernel: str, grid: Grid, schedule: TileSchedule, workers: int = 1,
                     variant: KernelVariant | None = None) -> Grid:
    """Run the schedule wave by wave, tiles of a wave in parallel; the result
    is bit-identical for any worker count and to the unblocked kernel."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    entry = catalog_get(kernel)
    spec = entry.spec
    hist = _History(grid, schedule.steps)
    if spec.dim == 1:
        engine = _Tile1D(spec, entry, hist, schedule, variant)
    else:
        engine = _TileND(spec, hist, schedule)
    if workers == 1:
        for wave in schedule.waves:
            for tile in wave:
                engine.run_tile(tile)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for wave in schedule.waves:
                list(pool.map(engine.run_tile, wave))
    out = grid.copy()
    out.data = hist.rows[schedule.steps]
    out.fill_halo()
    return out


def lcs_blocked(a, b, schedule: TileSchedule, workers: int = 1) -> int:
    """Rectangle-tiled LCS over the full DP table; anti-diagonal waves."""
    a = np.asarray(a, dtype=np.int32)
    b = np.asarray(b, dtype=np.int32)
    if a.size == 0 or b.size == 0:
        return 0
    table = np.zeros((len(a) + 1, len(b) + 1), dtype=np.int32)

    def run_tile(tile: Tile):
        x0, x1 = tile.t0 + 1, min(tile.t1, len(a)) + 1
        y0, y1 = tile.lo[0] + 1, min(tile.hi[0], len(b)) + 1
        for d in range(x0 + y0, x1 + y1 - 1):
            i0 = max(x0, d - (y1 - 1))
            i1 = min(x1 - 1, d - y0)
            if i0 > i1:
                continue
            i = np.arange(i0, i1 + 1)
            j = d - i
            eq = a[i - 1] == b[j - 1]
            table[i, j] = np.where(
                eq, table[i - 1, j - 1] + np.int32(1),
                np.maximum(table[i - 1, j], table[i, j - 1]),
            )

    if workers == 1:
        for wave in schedule.waves:
            for tile in wave:
                run_tile(tile)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for wave in schedule.waves:
                list(pool.map(run_tile, wave))
    return int(table[len(a), len(b)])


class _TileND:
    """Scalar tile engine for 2D/3D kernels over the time history."""

    def __init__(self, spec, hist, schedule):
        self.spec = spec
        self.hist = hist
        self.extents = schedule.extents
        self.gauss = spec.dependence_kind == "gauss_seidel"

    def run_tile(self, tile: Tile):
        spec = self.spec
        off = self.hist.off
        offs = spec.offsets()
        for t in range(tile.t0, tile.t1):
            win = tile.windows(t, self.extents)
            if any(hi <= lo for lo, hi in win):
                continue
            dst = self.hist.rows[t + 1]
            src = self.hist.rows[t]
            if self.gauss:
                # same values as the lexicographic in-place sweep: updated
                # cells of this very plane are read back through dst
                ext = tuple(hi - lo for lo, hi in win)
                coords, cuts = _diag_groups(ext)
                base = [coords[i] + off + win[i][0] for i in range(len(ext))]
                for d in range(len(cuts) - 1):
                    lo_i, hi_i = cuts[d], cuts[d + 1]
                    if lo_i == hi_i:
                        continue
                    idx = tuple(bc[lo_i:hi_i] for bc in base)
                    acc = None
                    for o in offs:
                        plane = dst if (o[0], *o[1:]) < (0,) * len(o) or _lexneg(o) else src
                        vals = plane[tuple(idx[i] + o[i] for i in range(len(ext)))]
                        acc = spec.coefficients[o] * vals if acc is None else spec.coefficients[o] * vals + acc
                    dst[idx] = acc
            else:
                sl = tuple(slice(off + lo, off + hi) for lo, hi in win)
                gather = lambda o: src[tuple(slice(off + lo + o[i], off + hi + o[i])
                                             for i, (lo, hi) in enumerate(win))]
                if spec.is_life:
                    n = gather(offs[0]) + gather(offs[1])
                    for o in offs[2:]:
                        n = n + gather(o)
                    alive = src[sl]
                    out = np.zeros_like(alive)
                    for bb in sorted(spec.birth):
                        out = np.where(n == bb, np.int32(1), out)
                    for sv in sorted(spec.survive - spec.birth):
                        out = np.where(n == sv, alive, out)
                else:
                    out = spec.coefficients[offs[0]] * gather(offs[0])
                    for o in offs[1:]:
                        out = spec.coefficients[o] * gather(o) + out
                dst[sl] = out


def _lexneg(off):
    for c in off:
        if c < 0:
            return True
        if c > 0:
            return False
    return False


class _Tile1D:
    """1D tile engine: vl-high slabs through the time-lane steady loop where
    the slab windows allow one, scalar rows at the slanted edges."""

    def __init__(self, spec, entry, hist, schedule, variant):
        self.spec = spec
        self.hist = hist
        self.nx = schedule.extents[0]
        var = variant or KernelVariant()
        self.params = var.params or entry.params(var.scheme)
        self.scheme = var.scheme
        self.gauss = spec.dependence_kind == "gauss_seidel"
        self.offs = spec.offsets()
        self.cs = [spec.coefficients[o] for o in self.offs]

    def run_tile(self, tile: Tile):
        vl = self.params.vl
        for tb in range(tile.t0, tile.t1, vl):
            if tb + vl <= tile.t1:
                self._slab(tile, tb)
            else:
                for t in range(tb, tile.t1):
                    lo, hi = tile.windows(t, (self.nx,))[0]
                    self._scalar_row(t, lo, hi)

    def _scalar_row(self, t, lo, hi):
        off = self.hist.off
        dst = self.hist.rows[t + 1]
        src = self.hist.rows[t]
        if hi <= lo:
            return
        if self.gauss:
            for x in range(off + lo, off + hi):
                acc = self.cs[0] * dst[x - 1]
                acc = self.cs[1] * src[x] + acc
                acc = self.cs[2] * src[x + 1] + acc
                dst[x] = acc
        else:
            seg = lambda d: src[off + lo + d : off + hi + d]
            acc = self.cs[0] * seg(-1)
            acc = self.cs[1] * seg(0) + acc
            acc = self.cs[2] * seg(1) + acc
            dst[off + lo : off + hi] = acc

    def _slab(self, tile: Tile, tb: int):
        """One vl-high slab: windowed analogue of the unblocked band.  Plane
        tb+k holds the points of time tb+k-1, so its tile window is the one
        at that point-time."""
        p = self.params
        vl, s, sl = p.vl, p.s, p.sl
        r = self.spec.radius
        win = [None] + [tile.windows(tb + k - 1, (self.nx,))[0] for k in range(1, vl + 1)]
        if any(hi <= lo for lo, hi in win[1:]):
            for k in range(1, vl + 1):
                self._scalar_row(tb + k - 1, *win[k])
            return
        # bottom loads read plane tb; inside the tile that plane is only
        # valid up to the previous slab's window (band boundaries see the
        # whole plane, earlier waves wrote all of it)
        bot_hi = self.nx if tb == tile.t0 else tile.windows(tb - 1, (self.nx,))[0][1]
        xl = max(lo for lo, _ in win[1:]) + r
        xl = -(-xl // vl) * vl  # stores must stay aligned
        xh = min(min(hi for _, hi in win[1:]) - (vl - 1) * s - sl,
                 bot_hi - vl * s - sl)
        groups = (xh - xl) // vl if xh > xl else 0
        if groups < 1 or xl + vl * s + sl >= min(hi for _, hi in win[1:]):
            for k in range(1, vl + 1):
                self._scalar_row(tb + k - 1, *win[k])
            return
        xh = xl + groups * vl
        off = self.hist.off
        rows = self.hist.rows
        bk = SimdBackend(vl, rows[0].dtype)

        # left edges, bottom-up, wide enough to feed the register fill (the
        # middle row also feeds the first sl recycled copies in two_stride)
        for k in range(1, vl):
            ext = sl if k == vl // 2 else 0
            self._scalar_row(
                tb + k - 1, win[k][0], min(xl + s + p.lane_offset(k) + ext, win[k][1])
            )
        self._scalar_row(tb + vl - 1, win[vl][0], xl)

        coeff = {}
        pool = {}
        for o in self.offs:
            v = self.spec.coefficients[o]
            if v not in pool:
                pool[v] = bk.splat(v)
            coeff[o] = pool[v]
        rowk = lambda k: rows[tb + k]
        gather = lambda q: bk.vloadset(
            [(rowk(pp), off + q + p.lane_offset(pp)) for pp in range(vl)]
        )
        if self.gauss:
            ring = [gather(q) for q in range(xl, xl + s)]
            prev_out = bk.vloadset(
                [(rowk(pp + 1), off + xl - 1 + p.lane_offset(pp)) for pp in range(vl)]
            )
        else:
            ring = [gather(q) for q in range(xl - r, xl + s)]
        if self.scheme == "two_stride":
            asm = TwoStrideAssembler(
                bk,
                mb_init=bk.vloadset(
                    [(rows[tb], off + xl + vl * s + sl), (rows[tb], off + xl + vl * s + sl + 1),
                     (rowk(2), off + xl + 2 * s), (rowk(2), off + xl + 2 * s + 1)]
                ),
                stale=ring[0],
            )
        else:
            asm = BaseAssembler(bk, stale=ring[0])

        for g in range(groups):
            gbase = xl + g * vl
            if self.scheme == "two_stride":
                bottom = bk.vloadset([(rows[tb], off + gbase + vl * s + sl + i) for i in range(vl)])
            else:
                bottom = bk.vload(rows[tb], off + gbase + vl * s)
            asm.start_group(bottom)
            for i in range(vl):
                if self.gauss:
                    acc = bk.vmul(coeff[self.offs[0]], prev_out)
                    acc = bk.vfma(coeff[self.offs[1]], ring[0], acc)
                    out = bk.vfma(coeff[self.offs[2]], ring[1], acc)
                    prev_out = out
                else:
                    acc = bk.vmul(coeff[self.offs[0]], ring[0])
                    acc = bk.vfma(coeff[self.offs[1]], ring[1], acc)
                    out = bk.vfma(coeff[self.offs[2]], ring[2], acc)
                newin = asm.feed(i, out)
                ring.pop(0)
                ring.append(newin)
            bk.vstore(asm.finish_group(), rows[tb + vl], off + gbase)

        x_last = xh - 1
        qs = range(x_last + 1, x_last + 1 + s) if self.gauss else range(x_last, x_last + s + 1)
        for q, vec in zip(qs, ring):
            for pp in range(vl):
                rowk(pp)[off + q + p.lane_offset(pp)] = vec.lanes[pp]
        for lane, vec in asm.drain():
            rowk(2)[off + x_last - 1 + lane + 2 * s + sl] = vec.lanes[lane]
        for k in range(1, vl + 1):
            self._scalar_row(tb + k - 1, max(x_last + 1 + p.lane_offset(k - 1), win[k][0]), win[k][1])
