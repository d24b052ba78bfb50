"""Steady-loop data reorganization: turning output vectors into the next
input vectors while draining finished values to the top vector and feeding
fresh bottom elements in.

Vectors here follow the time-lane layout.  An output vector at iteration x is

    lane p  =  value of time t+1+p at space x + lane_offset(p)

so lane vl-1 holds the finished newest-time value ("top") and after a rotate
and a bottom insertion the register becomes the input vector for iteration
x+s.  Tops of four consecutive iterations are collected into one register and
stored with a single aligned vector store; one bottom load per four
iterations supplies the four insertions.  All three drivers below keep that
I/O cadence; they differ in which reorganization instructions they spend.

``BaseAssembler`` (vl=4, float64) costs per 4 outputs: 4 lane-crossing
rotates + 10 in-lane ops (5 building the top vector, 5 consuming the bottom
vector) = 3.5 reorganizations per output vector.

``TwoStrideAssembler`` (vl=4, float64) staggers the low 128-bit lane group by
an extra stride sl=2 so the recycled middle value stays inside its lane
group.  Cost per 4 outputs: 8 in-lane two-source shuffles + 3 lane-crossing
group merges (two middle-bottom builds, one top merge) = 2.00 in-lane and
0.75 lane-crossing per output vector, and every per-iteration instruction is
in-lane.

``GenericAssembler`` handles vl=8 integer kernels with a straightforward
rotate/permute/blend sequence (3 lane-crossing + 2 in-lane per output); the
integer kernels carry no pinned instruction budget.

Lane values may be batched (vl, G): the same register schedule applied to G
independent groups at once, as the inner space loop of a 2D/3D kernel does.
"""

from __future__ import annotations

from ..vec import SimdBackend, Vec

# two-source in-lane shuffle patterns; sources 0..vl-1 pick the first
# operand, vl..2vl-1 the second (vl=4, 128-bit group = 2 lanes)
_SWAP_PAIRS = (1, 0, 3, 2)
_TOP_KEEP0_TAKE0 = (0, 4, 2, 7)  # top[0] kept, rotated-out top element -> pos1
_TM_PAIR = (1, 5, 3, 7)  # (a2_e, a2_o, a4_e, a4_o) from tm_partial/out pair
_IN_EVEN = (0, 4, 2, 6)  # input = (mb[0], out[0], mb[2], out[2])
_IN_ODD = (1, 4, 3, 6)  # input = (mb[1], out[0], mb[3], out[2])


class BaseAssembler:
    """Rotate-and-blend scheme following the plain temporal steady loop.

    Per group of four outputs (positions 0..3):

    ==  =====================================================================
    0   rot = rotate(out); top = blend(stale, rot, {0}); in = blend(rot, bt, {0})
    1   rot = rotate(out); top = shuf(top, rot); in = blend(rot, sw, {0})
    2   in = rotate(blend(out, sw, {3})); t = swap(out); top = blend(top, t, {2})
    3   in = rotate(blend(out, bt, {3})); top = blend(top, out, {3})
    ==  =====================================================================

    where ``sw = swap-within-groups(bt)`` is built once per group.  Tops for
    positions 0-1 are taken after the rotate (the finished value sits in the
    low group), for 2-3 before it (still in the high group), so every top and
    bottom touch stays in-lane; only the four rotates cross.
    """

    def __init__(self, bk: SimdBackend, stale: Vec):
        self.bk = bk
        self.top = stale  # dead register blended over at position 0
        self.bt = None
        self.sw = None

    def start_group(self, bottom: Vec) -> None:
        self.bt = bottom
        self.sw = self.bk.inlane_permute(bottom, _SWAP_PAIRS)

    def feed(self, i: int, out: Vec) -> Vec:
        bk = self.bk
        if i == 0:
            rot = bk.vrotate(out)
            self.top = bk.vblend(self.top, rot, (0,))
            return bk.vblend(rot, self.bt, (0,))
        if i == 1:
            rot = bk.vrotate(out)
            self.top = bk.inlane_permute(self.top, _TOP_KEEP0_TAKE0, rot)
            return bk.vblend(rot, self.sw, (0,))
        if i == 2:
            inv = bk.vrotate(bk.vblend(out, self.sw, (3,)))
            self.sw = None
            t = bk.inlane_permute(out, _SWAP_PAIRS)
            self.top = bk.vblend(self.top, t, (2,))
            return inv
        inv = bk.vrotate(bk.vblend(out, self.bt, (3,)))
        self.bt = None
        self.top = bk.vblend(self.top, out, (3,))
        return inv

    def finish_group(self) -> Vec:
        """The completed top vector; keep using the returned register as the
        stale blend base of the next group (the caller stores it first)."""
        return self.top

    def drain(self):
        return ()


class TwoStrideAssembler:
    """Lane-group-staggered scheme.  Output lanes read, low to high:

        (a1[x+3s+sl], a2[x+2s+sl], a3[x+s], a4[x])

    Each iteration copies the finished a4 and the staggered a2 out with one
    in-lane blend/shuffle (they sit in opposite lane groups) and builds the
    next input with one two-source in-lane shuffle against a middle-bottom
    register mb = (b, b, a2, a2).  Lane-crossing work is only the group
    merges: one mb per iteration pair, one top merge per group of four.  The
    a2 copied at iteration x is consumed exactly sl=2 iterations later, which
    is why the pair cadence works out.
    """

    def __init__(self, bk: SimdBackend, mb_init: Vec, stale: Vec):
        self.bk = bk
        self.mb = mb_init  # (b_even, b_odd, a2_even, a2_odd) for the next pair
        self.stale = stale  # dead register blended over at even positions
        self.bt = None
        self.tm_a = None
        self.tm_part = None
        self.tm_hold = None  # completed tm of positions 2-3, feeds next mb

    def start_group(self, bottom: Vec) -> None:
        """``bottom`` holds the four fresh oldest-time elements of this group
        (strided load in 1D: the sl stagger shifts it off alignment)."""
        self.bt = bottom
        if self.tm_hold is not None:
            # a2 values copied out at the previous positions 2-3 plus this
            # group's first two bottom elements
            self.mb = self.bk.lane_group_merge(self.tm_hold, bottom, 0, 0)
            self.tm_hold = None

    def feed(self, i: int, out: Vec) -> Vec:
        bk = self.bk
        if i % 2 == 0:
            base = self.stale if i == 0 and self.stale is not None else out
            self.stale = None
            self.tm_part = bk.vblend(base, out, (1, 3))
            return bk.inlane_permute(self.mb, _IN_EVEN, out)
        tm = bk.inlane_permute(self.tm_part, _TM_PAIR, out)
        self.tm_part = None
        inv = bk.inlane_permute(self.mb, _IN_ODD, out)
        self.mb = None  # register free before its replacement is built
        if i == 1:
            self.tm_a = tm
            self.mb = bk.lane_group_merge(tm, self.bt, 0, 1)
            self.bt = None
        else:
            self.tm_hold = tm
        return inv

    def finish_group(self) -> Vec:
        top = self.bk.lane_group_merge(self.tm_hold, self.tm_a, 1, 1)
        self.tm_a = None
        self.stale = top  # after the caller's store it is dead again
        return top

    def drain(self):
        """Not-yet-consumed a2 copies at loop exit: (lane, value-vector)
        pairs the epilogue must materialize (positions x+2s+sl for the last
        two iterations)."""
        if self.tm_hold is None:
            return ()
        return ((0, self.tm_hold), (1, self.tm_hold))


class GenericAssembler:
    """Plain sequence for vl=8 integer kernels: per output one rotate, one
    top extract+blend, one bottom insert, one bottom down-shift."""

    def __init__(self, bk: SimdBackend, stale: Vec):
        self.bk = bk
        self.top = stale
        self.bsh = None
        vl = bk.vl
        self._down = tuple(range(1, vl)) + (0,)
        self._take_top = [
            tuple((vl - 1) if j == i else j for j in range(vl)) for i in range(vl)
        ]

    def start_group(self, bottom: Vec) -> None:
        self.bsh = bottom

    def feed(self, i: int, out: Vec) -> Vec:
        bk = self.bk
        t = bk.xlane_permute(out, self._take_top[i])
        self.top = bk.vblend(self.top, t, (i,))
        rot = bk.vrotate(out)
        inv = bk.vblend(rot, self.bsh, (0,))
        self.bsh = bk.xlane_permute(self.bsh, self._down)
        return inv

    def finish_group(self) -> Vec:
        return self.top

    def drain(self):
        return ()


def assemble_top_bottom(bk: SimdBackend, outs, bottom: Vec):
    """Functional form of the base scheme: four output vectors plus one
    bottom vector in, the top vector and four input vectors out."""
    asm = BaseAssembler(bk, stale=bottom)
    asm.start_group(bottom)
    ins = [asm.feed(i, o) for i, o in enumerate(outs)]
    bk.mark_output_vectors(_nvec(outs[0], bk))
    return asm.finish_group(), ins


def assemble_two_stride(bk: SimdBackend, outs, mb: Vec, bottom: Vec):
    """Functional form of the two-stride scheme for one four-output group.

    ``mb`` must carry the a2 values copied two iterations earlier together
    with the first two bottom elements; ``bottom`` supplies all four fresh
    elements of this group.  Returns (top, inputs, mb_for_next_group).
    """
    asm = TwoStrideAssembler(bk, mb_init=mb, stale=None)
    asm.bt = bottom
    ins = [asm.feed(i, o) for i, o in enumerate(outs)]
    bk.mark_output_vectors(_nvec(outs[0], bk))
    top = asm.finish_group()
    nxt = asm.tm_hold
    return top, ins, nxt


def _nvec(v: Vec, bk: SimdBackend) -> int:
    n = 1
    for d in v.lanes.shape[1:]:
        n *= d
    return n
