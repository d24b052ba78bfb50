"""Fixed-lane vector values and the two interchangeable execution backends.

A ``Vec`` models one SIMD register of ``vl`` lanes.  Lane 0 is the lowest
position (first element in memory order).  A 256-bit register is split into
two 128-bit lane groups; data movement that stays inside a group is cheap
("in-lane"), movement across the group boundary is expensive
("lane-crossing").  For float64 a group holds 2 lanes (vl=4), for int32 it
holds 4 (vl=8).

``SimdBackend`` executes operations on numpy arrays and is the fast path.
``CountingBackend`` computes bit-identical values while tallying every
instruction into ``OpCounters`` and tracking the peak number of
simultaneously-live vector values (the register-pressure proxy).

Lanes may carry a trailing batch axis, shape ``(vl, B)``: the same register
operation applied to B independent vectors at once (the inner space loop of a
multi-dimensional kernel).  Counters then advance by B per call.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import AlignmentError

LANE_GROUP_BITS = 128


class Vec:
    """One vector register value; ``lanes[0]`` is the lowest position."""

    __slots__ = ("lanes", "_vid")

    def __init__(self, lanes):
        self.lanes = lanes
        self._vid = -1

    @property
    def vl(self):
        return self.lanes.shape[0]

    def __repr__(self):
        return f"Vec({self.lanes.tolist()})"


class Mask:
    """Per-lane boolean selector produced by vcmpeq (or built from positions)."""

    __slots__ = ("lanes", "_vid")

    def __init__(self, lanes):
        self.lanes = lanes
        self._vid = -1

    def positions(self):
        if self.lanes.ndim != 1:
            raise ValueError("positions() only defined for unbatched masks")
        return tuple(int(i) for i in np.nonzero(self.lanes)[0])


@dataclass
class OpCounters:
    """Per-run instruction tallies, one field per instruction category.

    ``output_vectors`` counts vectorized stencil evaluations and is the
    denominator for all per-vector amortized figures.
    """

    vector_loads: int = 0
    vector_stores: int = 0
    unaligned_loads: int = 0
    strided_loads: int = 0
    inlane_reorg: int = 0
    xlane_reorg: int = 0
    arith_ops: int = 0
    output_vectors: int = 0

    def snapshot(self) -> "OpCounters":
        return OpCounters(**{f.name: getattr(self, f.name) for f in fields(self)})

    def __sub__(self, other: "OpCounters") -> "OpCounters":
        return OpCounters(
            **{f.name: getattr(self, f.name) - getattr(other, f.name) for f in fields(self)}
        )

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def reorg_total(self) -> int:
        return self.inlane_reorg + self.xlane_reorg


def _group_lanes(vl: int, dtype) -> int:
    return LANE_GROUP_BITS // (np.dtype(dtype).itemsize * 8)


class SimdBackend:
    """Plain numpy execution of the vector vocabulary (no instrumentation)."""

    name = "simd"
    counting = False

    def __init__(self, vl: int, dtype=np.float64):
        if vl not in (4, 8):
            raise ValueError("vl must be 4 or 8")
        self.vl = vl
        self.dtype = np.dtype(dtype)
        self.group = _group_lanes(vl, self.dtype)
        if self.vl % self.group:
            raise ValueError("vl must be a multiple of the 128-bit lane group")
        self._pat_cache: dict = {}
        self._mask_cache: dict = {}
        self._roll = np.array([vl - 1] + list(range(vl - 1)), dtype=np.intp)

    # -- value constructors ------------------------------------------------

    def splat(self, value, batched: int = 0) -> Vec:
        """Broadcast one scalar into all lanes (register constant, uncounted).

        ``batched`` gives the number of batch axes to broadcast against
        (True counts as one).
        """
        shape = (self.vl,) + (1,) * int(batched)
        return Vec(np.full(shape, value, dtype=self.dtype))

    def from_lanes(self, values) -> Vec:
        arr = np.asarray(values, dtype=self.dtype)
        if arr.shape[0] != self.vl:
            raise ValueError("lane count mismatch")
        return Vec(arr.copy())

    # -- memory ------------------------------------------------------------

    def _check_aligned(self, idx: int):
        if idx % self.vl:
            raise AlignmentError(f"index {idx} not aligned to vl={self.vl}")

    def vload(self, mem, idx: int) -> Vec:
        self._check_aligned(idx)
        return Vec(mem[idx : idx + self.vl].copy())

    def vload_unaligned(self, mem, idx: int) -> Vec:
        return Vec(mem[idx : idx + self.vl].copy())

    def vstore(self, v: Vec, mem, idx: int) -> None:
        self._check_aligned(idx)
        mem[idx : idx + self.vl] = v.lanes

    def vloadset(self, sources) -> Vec:
        """Assemble one vector from vl arbitrary (array, index) addresses.

        ``index`` entries may be integer arrays, yielding a batched value.
        """
        lanes = np.stack([np.asarray(mem[idx]) for mem, idx in sources])
        if lanes.shape[0] != self.vl:
            raise ValueError("vloadset needs exactly vl sources")
        return Vec(lanes.astype(self.dtype, copy=False))

    def vstoreset(self, v: Vec, targets) -> None:
        """Scatter the vl lanes to arbitrary (array, index) addresses."""
        for p, (mem, idx) in enumerate(targets):
            mem[idx] = v.lanes[p]

    # Batched memory forms used by the inner space loops of 2D/3D kernels.
    # The last array axis is the contiguous one; each group of vl cells there
    # becomes one vector, and any leading axes become batch axes.

    def vload_tiled(self, row, start: int, n: int) -> Vec:
        """Load n consecutive aligned vectors along the last axis of ``row``;
        lanes (vl, *lead, n)."""
        self._check_aligned(start)
        seg = row[..., start : start + n * self.vl]
        seg = seg.reshape(seg.shape[:-1] + (n, self.vl))
        return Vec(np.moveaxis(seg, -1, 0).copy())

    def vload_tiled_unaligned(self, row, start: int, n: int) -> Vec:
        """vload_tiled without the alignment requirement (multi-load taps)."""
        seg = row[..., start : start + n * self.vl]
        seg = seg.reshape(seg.shape[:-1] + (n, self.vl))
        return Vec(np.moveaxis(seg, -1, 0).copy())

    def vstore_tiled(self, v: Vec, row, start: int) -> None:
        self._check_aligned(start)
        lanes = np.moveaxis(v.lanes, 0, -1)
        row[..., start : start + lanes.shape[-2] * self.vl] = lanes.reshape(
            lanes.shape[:-2] + (-1,)
        )

    def vload_block(self, region) -> Vec:
        """Load a region of a vector-major panel (..., vl): one aligned
        vector per panel cell; lanes (vl, *region.shape[:-1])."""
        if region.ndim == 1:
            return Vec(region.copy())
        return Vec(np.moveaxis(region, -1, 0).copy())

    def vstore_block(self, v: Vec, region) -> None:
        if region.ndim == 1:
            region[...] = v.lanes
        else:
            region[...] = np.moveaxis(v.lanes, 0, -1)

    def view(self, v: Vec, key) -> Vec:
        """Batch-axis slice of a batched value: bookkeeping for the register
        streams an inner space loop keeps (no instruction issued)."""
        return Vec(v.lanes[(slice(None),) + key])

    # -- reorganizations ----------------------------------------------------

    def vrotate(self, v: Vec) -> Vec:
        """Every lane one position higher; the top lane wraps to position 0."""
        return Vec(v.lanes[self._roll])

    def _maskarr(self, mask, ndim: int):
        if isinstance(mask, Mask):
            return mask.lanes
        key = (mask if isinstance(mask, tuple) else tuple(sorted(mask)))
        arr = self._mask_cache.get(key)
        if arr is None:
            arr = np.zeros(self.vl, dtype=bool)
            for p in key:
                arr[p] = True
            self._mask_cache[key] = arr
        if ndim > 1:
            return arr.reshape((self.vl,) + (1,) * (ndim - 1))
        return arr

    def vblend(self, a: Vec, b, mask) -> Vec:
        """Per-position select: mask positions take ``b``, the rest keep ``a``."""
        m = self._maskarr(mask, a.lanes.ndim)
        if isinstance(b, Vec):
            return Vec(np.where(m, b.lanes, a.lanes))
        return Vec(np.where(m, self.dtype.type(b), a.lanes))

    def _pattern(self, pattern, two: bool):
        key = (pattern, two)
        idx = self._pat_cache.get(key)
        if idx is None:
            idx = np.asarray(pattern, dtype=np.intp)
            if idx.shape[0] != self.vl:
                raise ValueError("pattern must list one source per lane")
            lim = 2 * self.vl if two else self.vl
            if idx.min() < 0 or idx.max() >= lim:
                raise ValueError("pattern source out of range")
            self._pat_cache[key] = idx
        return idx

    def _is_inlane(self, pattern, two: bool) -> bool:
        g = self.group
        return all((src % self.vl) // g == dst // g for dst, src in enumerate(pattern))

    def inlane_permute(self, v: Vec, pattern, w: Vec | None = None) -> Vec:
        """Permutation confined to 128-bit groups; two-source form reads ``w``
        through source indices vl..2vl-1 (shufpd-style)."""
        if not self._is_inlane(pattern, w is not None):
            raise ValueError(f"pattern {pattern} crosses a lane group")
        if pattern == tuple(range(self.vl)) and w is None:
            return v  # identity: elided, never issued
        idx = self._pattern(pattern, w is not None)
        src = v.lanes if w is None else np.concatenate([v.lanes, w.lanes], axis=0)
        return Vec(src[idx])

    def xlane_permute(self, v: Vec, pattern, w: Vec | None = None) -> Vec:
        """Unrestricted (lane-crossing) permutation, one- or two-source."""
        idx = self._pattern(pattern, w is not None)
        src = v.lanes if w is None else np.concatenate([v.lanes, w.lanes], axis=0)
        return Vec(src[idx])

    def lane_group_merge(self, hi_src: Vec, lo_src: Vec, hi_group: int, lo_group: int) -> Vec:
        """perm2f128: pick one whole 128-bit group from each operand.

        Result high group = group ``hi_group`` of ``hi_src``; low group =
        ``lo_group`` of ``lo_src``.  Lane-crossing by definition.
        """
        g = self.group
        hi = hi_src.lanes[hi_group * g : (hi_group + 1) * g]
        lo = lo_src.lanes[lo_group * g : (lo_group + 1) * g]
        return Vec(np.concatenate([lo, hi], axis=0))

    def transpose4(self, v0: Vec, v1: Vec, v2: Vec, v3: Vec):
        """4x4 in-register transpose (vl=4 only): 2 unpack stages + group swap."""
        if self.vl != 4:
            raise ValueError("transpose4 requires vl=4")
        m = np.stack([v0.lanes, v1.lanes, v2.lanes, v3.lanes])
        return tuple(Vec(m[:, j].copy()) for j in range(4))

    # -- arithmetic ----------------------------------------------------------

    def vadd(self, a: Vec, b: Vec) -> Vec:
        return Vec(a.lanes + b.lanes)

    def vmul(self, a: Vec, b: Vec) -> Vec:
        return Vec(a.lanes * b.lanes)

    def vfma(self, a: Vec, b: Vec, c: Vec) -> Vec:
        """a*b + c with the product rounded before the add (mul+add pair)."""
        return Vec(a.lanes * b.lanes + c.lanes)

    def vmax(self, a: Vec, b: Vec) -> Vec:
        return Vec(np.maximum(a.lanes, b.lanes))

    def vcmpeq(self, a: Vec, b: Vec) -> Mask:
        return Mask(a.lanes == b.lanes)

    # -- bookkeeping hooks (instrumented subclass only) ----------------------

    def mark_output_vectors(self, n: int) -> None:
        """Record that n vectorized stencil evaluations completed."""

    def counters_view(self):
        return None


def _batch(v: Vec) -> int:
    return 1 if v.lanes.ndim == 1 else int(np.prod(v.lanes.shape[1:]))


class CountingBackend(SimdBackend):
    """Same values as SimdBackend, plus instruction tallies and a register
    liveness trace.

    Every operation appends (result ids, operand ids) to a trace.
    ``max_live()`` then computes the peak number of simultaneously live
    values by static liveness analysis (a value lives from the instruction
    that produces it to the last instruction that reads it) — the register
    count an allocator would need for the recorded schedule.
    """

    name = "count"
    counting = True

    def __init__(self, vl: int, dtype=np.float64):
        super().__init__(vl, dtype)
        self.counters = OpCounters()
        self.trace: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
        self._next_vid = 0

    def counters_view(self):
        return self.counters

    def mark_output_vectors(self, n: int) -> None:
        self.counters.output_vectors += n

    def reset_trace(self):
        self.trace.clear()

    def max_live(self) -> int:
        """Peak live register count over the recorded instruction trace.

        Counted at instruction entry: a value lives from just after the
        instruction producing it through the last instruction reading it.  An
        operand dying at an instruction may share a register with that
        instruction's result (three-operand ISA semantics), so the two do not
        overlap.
        """
        birth: dict[int, int] = {}
        last: dict[int, int] = {}
        for idx, (outs, ins) in enumerate(self.trace):
            for o in outs:
                birth[o] = idx
                last[o] = idx
            for i in ins:
                last[i] = idx
        if not birth:
            return 0
        n = len(self.trace)
        delta = np.zeros(n + 2, dtype=np.int64)
        for v, b in birth.items():
            if last[v] > b:
                delta[b + 1] += 1
                delta[last[v] + 1] -= 1
        return int(np.cumsum(delta).max())

    def _rec(self, outs, ins):
        oids = []
        for o in outs:
            o._vid = self._next_vid
            self._next_vid += 1
            oids.append(o._vid)
        self.trace.append(
            (tuple(oids), tuple(i._vid for i in ins if getattr(i, "_vid", -1) >= 0))
        )

    # constant registers occupy the register file too, but cost no issued op

    def splat(self, value, batched: bool = False):
        v = super().splat(value, batched)
        self._rec((v,), ())
        return v

    def from_lanes(self, values):
        v = super().from_lanes(values)
        self._rec((v,), ())
        return v

    # memory

    def vload(self, mem, idx):
        v = super().vload(mem, idx)
        self._rec((v,), ())
        self.counters.vector_loads += _batch(v)
        return v

    def vload_unaligned(self, mem, idx):
        v = super().vload_unaligned(mem, idx)
        self._rec((v,), ())
        self.counters.unaligned_loads += _batch(v)
        return v

    def vstore(self, v, mem, idx):
        super().vstore(v, mem, idx)
        self._rec((), (v,))
        self.counters.vector_stores += _batch(v)

    def vloadset(self, sources):
        v = super().vloadset(sources)
        self._rec((v,), ())
        self.counters.strided_loads += _batch(v)
        return v

    def vstoreset(self, v, targets):
        super().vstoreset(v, targets)
        self._rec((), (v,))
        self.counters.vector_stores += _batch(v)

    def vload_tiled(self, row, start, n):
        v = super().vload_tiled(row, start, n)
        self._rec((v,), ())
        self.counters.vector_loads += _batch(v)
        return v

    def vload_tiled_unaligned(self, row, start, n):
        v = super().vload_tiled_unaligned(row, start, n)
        self._rec((v,), ())
        self.counters.unaligned_loads += _batch(v)
        return v

    def vstore_tiled(self, v, row, start):
        super().vstore_tiled(v, row, start)
        self._rec((), (v,))
        self.counters.vector_stores += _batch(v)

    def vload_block(self, region):
        v = super().vload_block(region)
        self._rec((v,), ())
        self.counters.vector_loads += _batch(v)
        return v

    def vstore_block(self, v, region):
        super().vstore_block(v, region)
        self._rec((), (v,))
        self.counters.vector_stores += _batch(v)

    # reorganizations

    def vrotate(self, v):
        r = super().vrotate(v)
        self._rec((r,), (v,))
        self.counters.xlane_reorg += _batch(v)
        return r

    def vblend(self, a, b, mask):
        r = super().vblend(a, b, mask)
        ins = (a, b, mask) if isinstance(b, Vec) else (a, mask)
        self._rec((r,), tuple(i for i in ins if isinstance(i, (Vec, Mask))))
        self.counters.inlane_reorg += _batch(a)
        return r

    def inlane_permute(self, v, pattern, w=None):
        r = super().inlane_permute(v, pattern, w)
        if r is v:  # identity, elided
            return r
        self._rec((r,), (v,) if w is None else (v, w))
        self.counters.inlane_reorg += _batch(v)
        return r

    def xlane_permute(self, v, pattern, w=None):
        r = super().xlane_permute(v, pattern, w)
        self._rec((r,), (v,) if w is None else (v, w))
        self.counters.xlane_reorg += _batch(v)
        return r

    def lane_group_merge(self, hi_src, lo_src, hi_group, lo_group):
        r = super().lane_group_merge(hi_src, lo_src, hi_group, lo_group)
        self._rec((r,), (hi_src, lo_src))
        self.counters.xlane_reorg += _batch(hi_src)
        return r

    def transpose4(self, v0, v1, v2, v3):
        out = super().transpose4(v0, v1, v2, v3)
        self._rec(out, (v0, v1, v2, v3))
        n = _batch(v0)
        self.counters.inlane_reorg += 8 * n
        self.counters.xlane_reorg += 4 * n
        return out

    # arithmetic

    def vadd(self, a, b):
        v = super().vadd(a, b)
        self._rec((v,), (a, b))
        self.counters.arith_ops += _batch(v)
        return v

    def vmul(self, a, b):
        v = super().vmul(a, b)
        self._rec((v,), (a, b))
        self.counters.arith_ops += _batch(v)
        return v

    def vfma(self, a, b, c):
        v = super().vfma(a, b, c)
        self._rec((v,), (a, b, c))
        self.counters.arith_ops += _batch(v)
        return v

    def vmax(self, a, b):
        v = super().vmax(a, b)
        self._rec((v,), (a, b))
        self.counters.arith_ops += _batch(v)
        return v

    def vcmpeq(self, a, b):
        m = super().vcmpeq(a, b)
        self._rec((m,), (a, b))
        self.counters.arith_ops += _batch(a)
        return m


def make_backend(name: str, vl: int, dtype=np.float64) -> SimdBackend:
    if name == "simd":
        return SimdBackend(vl, dtype)
    if name == "count":
        return CountingBackend(vl, dtype)
    raise ValueError(f"unknown backend {name!r}")
