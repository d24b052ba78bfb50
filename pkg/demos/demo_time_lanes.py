"""Walk through one steady-loop group of the 1D time-lane scheme, printing
the registers so the lane choreography is visible.

Lane values encode (time, x) as time*1000 + x: an output vector reading
(4000, 3007, 2016, 1023) holds the time-4 value at x=0, time-3 at x=7,
time-2 at x=16 (note the +2 lane-group stagger), and time-1 at x=23.
"""

import numpy as np

from tvstencil.kernels.assemble import TwoStrideAssembler, assemble_top_bottom
from tvstencil.vec import CountingBackend

S, SL, VL = 7, 2, 4


def enc(t, x):
    return float(1000 * t + x)


def out_vec(bk, x, sl):
    lanes = [enc(p + 1, x + (3 - p) * S + (sl if p < 2 else 0)) for p in range(VL)]
    return bk.from_lanes(lanes)


def show(label, vec):
    hi_to_lo = ", ".join(f"{int(v) // 1000}@x{int(v) % 1000}" for v in vec.lanes[::-1])
    print(f"  {label:<12s} (hi..lo) = {hi_to_lo}")


def main():
    print("=== plain scheme: rotate + blend, tops collected over 4 iterations ===")
    bk = CountingBackend(4)
    bottom = bk.from_lanes([enc(0, x + 4 * S) for x in range(4)])
    outs = [out_vec(bk, x, 0) for x in range(4)]
    before = bk.counters.snapshot()
    top, ins = assemble_top_bottom(bk, outs, bottom)
    d = bk.counters - before
    for x, (o, i) in enumerate(zip(outs, ins)):
        show(f"out[x={x}]", o)
        show(f"-> in[x={x + S}]", i)
    show("top store", top)
    print(f"  cost: {d.inlane_reorg} in-lane + {d.xlane_reorg} lane-crossing"
          f" for 4 outputs = {d.reorg_total() / 4} per vector\n")

    print("=== two-stride scheme: the lane-group stagger keeps the per-")
    print("    iteration work in-lane; only the group merges cross ===")
    bk = CountingBackend(4)
    asm = TwoStrideAssembler(
        bk,
        mb_init=bk.from_lanes([enc(0, 4 * S + SL), enc(0, 1 + 4 * S + SL),
                               enc(2, 2 * S), enc(2, 1 + 2 * S)]),
        stale=None,
    )
    for g in range(2):
        bt = bk.from_lanes([enc(0, 4 * g + i + 4 * S + SL) for i in range(4)])
        asm.start_group(bt)
        before = bk.counters.snapshot()
        for i in range(4):
            x = 4 * g + i
            iv = asm.feed(i, out_vec(bk, x, SL))
            if g == 1:
                show(f"in[x={x + S}]", iv)
        top = asm.finish_group()
        d = bk.counters - before
        if g == 1:
            show("top store", top)
            print(f"  steady group cost: {d.inlane_reorg} in-lane + "
                  f"{d.xlane_reorg} lane-crossing = "
                  f"{d.inlane_reorg / 4:.2f} + {d.xlane_reorg / 4:.2f} per vector")


if __name__ == "__main__":
    main()
