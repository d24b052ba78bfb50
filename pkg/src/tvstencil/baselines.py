"""Reference implementations: the ground-truth scalar sweeps and the two
classic spatial-vectorization schemes used as comparison baselines.

Every float kernel in this package — scalar or vectorized — evaluates the
same expression tree per point: taps in sorted-offset order, first tap a
multiply, each further tap a mul+add pair.  That makes bit-exact equality
between paths a meaningful check, not a tolerance game.

The Gauss-Seidel oracles sweep in ascending lexicographic order in place.
The 2D/3D implementations walk anti-diagonal hyperplanes with numpy instead
of nested Python loops; every point still reads exactly the values the
lexicographic sweep would (already-updated predecessors, stale successors),
so the floats are identical.
"""

from __future__ import annotations

import numpy as np

from .errors import UnsupportedError
from .grid import Grid
from .model import StencilSpec
from .vec import SimdBackend


# ---------------------------------------------------------------------------
# scalar oracles
# ---------------------------------------------------------------------------

class _Padded:
    """Helper pairing a padded ndarray with its interior window."""

    def __init__(self, data, offset, extents):
        self.data = data
        self.offset = offset
        self.extents = extents

    def view(self, off=None):
        lo = [self.offset + (0 if off is None else off[i]) for i in range(len(self.extents))]
        return self.data[tuple(slice(lo[i], lo[i] + self.extents[i]) for i in range(len(self.extents)))]


def jacobi_plane_update(spec: StencilSpec, src: _Padded, dst: _Padded) -> None:
    """One Jacobi time step, whole plane, fixed expression order."""
    offs = spec.offsets()
    acc = spec.coefficients[offs[0]] * src.view(offs[0])
    for off in offs[1:]:
        acc = spec.coefficients[off] * src.view(off) + acc
    dst.view()[...] = acc


def life_plane_update(spec: StencilSpec, src: _Padded, dst: _Padded) -> None:
    offs = spec.offsets()
    n = src.view(offs[0]) + src.view(offs[1])
    for off in offs[2:]:
        n = n + src.view(off)
    alive = src.view()
    # B-then-S decision tree: count in birth-set -> 1, else in survive-set ->
    # keep state, else 0.  For B2S23 (birth {2}, survive {2,3}) this reduces
    # to: n==2 -> 1, n==3 -> current, else 0.
    out = np.zeros_like(alive)
    for b in sorted(spec.birth):
        out = np.where(n == b, np.int32(1), out)
    for sv in sorted(spec.survive - spec.birth):
        out = np.where(n == sv, alive, out)
    dst.view()[...] = out


def _as_padded(grid: Grid) -> _Padded:
    return _Padded(grid.data, grid.offset, grid.extents)


def _gs_sweep_1d(spec, data, off, nx):
    offs = spec.offsets()
    cs = [spec.coefficients[o] for o in offs]
    for x in range(off, off + nx):
        acc = cs[0] * data[x + offs[0][0]]
        for c, o in zip(cs[1:], offs[1:]):
            acc = c * data[x + o[0]] + acc
        data[x] = acc


def _diag_groups(extents):
    """Anti-diagonal index groups (coordinate arrays per diagonal sum)."""
    coords = np.indices(extents).reshape(len(extents), -1)
    key = coords.sum(axis=0)
    order = np.argsort(key, kind="stable")
    sorted_key = key[order]
    cuts = np.searchsorted(sorted_key, np.arange(sorted_key[-1] + 2))
    return coords[:, order], cuts


def _gs_sweep_nd(spec, data, offset, extents):
    offs = spec.offsets()
    cs = [spec.coefficients[o] for o in offs]
    coords, cuts = _diag_groups(extents)
    base = [coords[i] + offset for i in range(len(extents))]
    for d in range(len(cuts) - 1):
        lo, hi = cuts[d], cuts[d + 1]
        if lo == hi:
            continue
        idx = tuple(b[lo:hi] for b in base)
        gather = lambda o: data[tuple(idx[i] + o[i] for i in range(len(extents)))]
        acc = cs[0] * gather(offs[0])
        for c, o in zip(cs[1:], offs[1:]):
            acc = c * gather(o) + acc
        data[idx] = acc


def scalar_reference(spec: StencilSpec, grid: Grid, steps: int) -> Grid:
    """Ground-truth result after ``steps`` updates (out of place)."""
    cur = grid.copy()
    if spec.dependence_kind == "gauss_seidel":
        for _ in range(steps):
            if spec.dim == 1:
                _gs_sweep_1d(spec, cur.data, cur.offset, cur.extents[0])
            else:
                _gs_sweep_nd(spec, cur.data, cur.offset, cur.extents)
        return cur
    nxt = grid.alloc_like()
    update = life_plane_update if spec.is_life else jacobi_plane_update
    for _ in range(steps):
        update(spec, _as_padded(cur), _as_padded(nxt))
        cur, nxt = nxt, cur
    return cur


def lcs_reference(a, b) -> int:
    """Full-table LCS length by the classic quadratic DP, swept along
    anti-diagonals so numpy does the inner work.  Independent of the
    wavefront kernel by construction."""
    a = np.asarray(a, dtype=np.int32)
    b = np.asarray(b, dtype=np.int32)
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    table = np.zeros((n + 1, m + 1), dtype=np.int32)
    for d in range(2, n + m + 1):
        i0 = max(1, d - m)
        i1 = min(n, d - 1)
        if i0 > i1:
            continue
        i = np.arange(i0, i1 + 1)
        j = d - i
        eq = a[i - 1] == b[j - 1]
        table[i, j] = np.where(
            eq, table[i - 1, j - 1] + np.int32(1),
            np.maximum(table[i - 1, j], table[i, j - 1]),
        )
    return int(table[n, m])


# ---------------------------------------------------------------------------
# multi-load spatial vectorization (Jacobi only)
# ---------------------------------------------------------------------------

def multiload_vectorized(spec: StencilSpec, grid: Grid, steps: int, backend: SimdBackend | None = None) -> Grid:
    """Spatial vectorization that simply loads one vector per stencil tap;
    taps shifted along the contiguous dimension are unaligned loads.

    Matches ``scalar_reference`` bit-exactly; with the counting backend the
    1D3P steady loop shows exactly 3 loads per output vector (1 aligned, 2
    unaligned).
    """
    if spec.dependence_kind != "jacobi":
        raise UnsupportedError("multi-load vectorization requires a Jacobi stencil")
    bk = backend or SimdBackend(4 if spec.element_kind == "float64" else 8,
                                np.float64 if spec.element_kind == "float64" else np.int32)
    vl = bk.vl
    cur = grid.copy()
    nxt = grid.alloc_like()
    offs = spec.offsets()
    n = cur.extents[-1]
    ngroups, tail = divmod(n, vl)
    lead_shape = cur.extents[:-1]
    lead_index = np.ndindex(*lead_shape) if lead_shape else [()]
    lead_points = list(lead_index)
    off0 = cur.offset

    coeff = None if spec.is_life else {o: bk.splat(spec.coefficients[o], batched=True) for o in offs}
    one = bk.splat(1, batched=True) if spec.is_life else None
    zero = bk.splat(0, batched=True) if spec.is_life else None

    for _ in range(steps):
        for pt in lead_points:
            row_of = lambda o: cur.data[tuple(off0 + pt[i] + o[i] for i in range(len(pt)))]
            out_row = nxt.data[tuple(off0 + c for c in pt)]
            if ngroups:
                taps = []
                for o in offs:
                    row = row_of(o)
                    last = o[-1]
                    if last == 0:
                        taps.append((o, bk.vload_tiled(row, off0, ngroups)))
                    else:
                        taps.append((o, bk.vload_tiled_unaligned(row, off0 + last, ngroups)))
                if spec.is_life:
                    acc = bk.vadd(taps[0][1], taps[1][1])
                    for _, v in taps[2:]:
                        acc = bk.vadd(acc, v)
                    centre = bk.vload_tiled(row_of((0,) * spec.dim), off0, ngroups)
                    res = _life_rule(bk, spec, acc, centre, one, zero)
                else:
                    acc = bk.vmul(coeff[offs[0]], taps[0][1])
                    for o, v in taps[1:]:
                        acc = bk.vfma(coeff[o], v, acc)
                    res = acc
                bk.mark_output_vectors(ngroups)
                bk.vstore_tiled(res, out_row, off0)
            if tail:
                _scalar_tail(spec, cur, nxt, pt, ngroups * vl, n)
        cur, nxt = nxt, cur
    return cur


def _life_rule(bk, spec, counts, centre, one, zero):
    batched = counts.lanes.ndim > 1
    out = zero
    for b in sorted(spec.birth):
        out = bk.vblend(out, one, bk.vcmpeq(counts, bk.splat(b, batched)))
    for sv in sorted(spec.survive - spec.birth):
        out = bk.vblend(out, centre, bk.vcmpeq(counts, bk.splat(sv, batched)))
    return out


def _scalar_tail(spec, cur, nxt, pt, x0, x1):
    off = cur.offset
    offs = spec.offsets()
    for x in range(x0, x1):
        base = tuple(off + c for c in pt) + (off + x,)
        if spec.is_life:
            s = 0
            for o in offs:
                s += cur.data[tuple(base[i] + o[i] for i in range(len(o)))]
            alive = cur.data[base]
            v = 0
            for b in sorted(spec.birth):
                if s == b:
                    v = 1
            for sv in sorted(spec.survive - spec.birth):
                if s == sv:
                    v = alive
            nxt.data[base] = v
        else:
            acc = spec.coefficients[offs[0]] * cur.data[
                tuple(base[i] + offs[0][i] for i in range(len(offs[0])))
            ]
            for o in offs[1:]:
                acc = spec.coefficients[o] * cur.data[
                    tuple(base[i] + o[i] for i in range(len(o)))
                ] + acc
            nxt.data[base] = acc


# ---------------------------------------------------------------------------
# data-reorganization spatial vectorization, 1D3P only
# ---------------------------------------------------------------------------

_SHUF_NEIGHBOR = (1, 4, 3, 6)  # dest p <- {a,b}[...]: (a1, b0, a3, b2)


def datareorg_vectorized_1d3p(spec: StencilSpec, grid: Grid, steps: int, backend: SimdBackend | None = None) -> Grid:
    """Load each input element once; build the +/-1 neighbor vectors with
    register shuffles.  Steady cost per output vector: 1 aligned load, 1
    lane-crossing merge, 2 in-lane shuffles.
    """
    if spec.dim != 1 or spec.radius != 1 or spec.dependence_kind != "jacobi":
        raise UnsupportedError("data-reorganization baseline is 1D3P only")
    bk = backend or SimdBackend(4, np.float64)
    vl = bk.vl
    cur = grid.copy()
    nxt = grid.alloc_like()
    nx = cur.extents[0]
    off = cur.offset
    ngroups, tail = divmod(nx, vl)
    cl = bk.splat(spec.coefficients[(-1,)])
    cc = bk.splat(spec.coefficients[(0,)])
    cr = bk.splat(spec.coefficients[(1,)])

    for _ in range(steps):
        row = cur.data
        if ngroups:
            cvec = bk.vload(row, off)
            # carries a[x-2], a[x-1] (high half) across the group boundary
            shift = bk.vloadset([(row, off - 2), (row, off - 1), (row, off), (row, off + 1)])
            for g in range(ngroups):
                base = off + g * vl
                nxtv = bk.vload(row, base + vl)
                left = bk.inlane_permute(shift, _SHUF_NEIGHBOR, cvec)
                shift = bk.lane_group_merge(nxtv, cvec, 0, 1)
                right = bk.inlane_permute(cvec, _SHUF_NEIGHBOR, shift)
                acc = bk.vmul(cl, left)
                acc = bk.vfma(cc, cvec, acc)
                acc = bk.vfma(cr, right, acc)
                bk.mark_output_vectors(1)
                bk.vstore(acc, nxt.data, base)
                cvec = nxtv
        if tail:
            _scalar_tail(spec, cur, nxt, (), ngroups * vl, nx)
        cur, nxt = nxt, cur
    return cur
