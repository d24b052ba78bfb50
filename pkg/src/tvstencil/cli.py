"""Command-line harness: correctness verification runs and benchmarks.

Benchmarks report Gstencils/s (billions of point updates per second,
interior points x steps / seconds) as the median of --reps repetitions after
one warm-up, and append CSV rows with a 64-bit FNV checksum of the final
grid dump so a saved run is self-verifying.

    tvstencil --mode verify --kernel all
    tvstencil --mode bench --kernel heat1d --nx 1000000 --t 64 --reps 5
    tvstencil --mode bench --kernel heat1d --tile 2048:32 --threads 8
    tvstencil --mode bench --kernel heat1d --backend count

A JSON config file (--config) may hold any of the long flag names; explicit
flags override it.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time

import numpy as np

from .baselines import (
    datareorg_vectorized_1d3p,
    lcs_reference,
    multiload_vectorized,
    scalar_reference,
)
from .catalog import DEFAULT_CATALOG, KERNEL_NAMES, get as catalog_get
from .grid import Grid, fnv1a64
from .kernels import KernelVariant, lcs_temporal
from .tiling import build_schedule, execute_parallel, lcs_blocked
from .verify import counter_assertions, counter_report_json, default_matrix, equivalence_matrix, run_temporal

CSV_HEADER = "kernel,variant,dim,nx,ny,nz,t,threads,tile,reps,gstencils_per_s,checksum"

# Desk-scale benchmark defaults; the paper-scale problem shapes parse fine
# but emulated runs at those sizes are impractical.
DEFAULT_SIZES = {1: (1_000_000,), 2: (512, 512), 3: (64, 64, 64)}
DEFAULT_TILES = {
    "heat1d": ((16384,), 128),
    "heat2d": ((256, 256), 64),
    "jac2d9p": ((256, 256), 64),
    "heat3d": ((32, 32, 32), 8),
    "life": ((256, 256), 32),
    "gs1d": ((2048,), 64),
    "gs2d": ((128, 128), 32),
    "gs3d": ((32, 32, 32), 32),
    "lcs": ((4096,), 4096),
}


def _parse_tile(text):
    """'WxHxD:T' -> (space extents tuple, time height)."""
    space, _, t = text.partition(":")
    dims = tuple(int(p) for p in space.split("x"))
    if not t:
        raise argparse.ArgumentTypeError("tile needs a :T time height")
    return dims, int(t)


def _parse_threads(text):
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tvstencil", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--mode", choices=("verify", "bench"), required=True)
    p.add_argument("--kernel", default="all",
                   help=f"one of {KERNEL_NAMES} or 'all'")
    p.add_argument("--variant", default="base",
                   choices=("base", "two-stride", "scalar", "multiload", "datareorg"))
    p.add_argument("--backend", default="simd", choices=("simd", "count"))
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--nz", type=int)
    p.add_argument("--t", type=int, dest="steps")
    p.add_argument("--tile", type=_parse_tile,
                   help="space extents and time height, e.g. 256x64:32")
    p.add_argument("--threads", type=_parse_threads, default=None,
                   help="worker count or sweep '1..8' (blocked runs)")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--csv", help="append benchmark rows to this file")
    p.add_argument("--dump", help="write the final grid dump here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cells", type=int, default=20,
                   help="verify-mode cells per kernel")
    p.add_argument("--config", help="JSON file with flag defaults")
    return p


def _apply_config(args, argv):
    if not args.config:
        return args
    with open(args.config) as fh:
        cfg = json.load(fh)
    passed = {a.split("=")[0].lstrip("-").replace("-", "_")
              for a in argv if a.startswith("--")}
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if attr == "t":
            attr = "steps"
            if "t" in passed:
                continue
        if attr in passed or not hasattr(args, attr):
            continue
        if attr == "tile" and isinstance(value, str):
            value = _parse_tile(value)
        if attr == "threads" and isinstance(value, (str, int)):
            value = _parse_threads(str(value))
        setattr(args, attr, value)
    return args


def _kernels(arg):
    if arg == "all":
        return KERNEL_NAMES
    if arg not in KERNEL_NAMES:
        raise SystemExit(f"unknown kernel {arg!r}; known: {KERNEL_NAMES}")
    return [arg]


def _verify(args) -> int:
    cells = default_matrix(cells_per_kernel=args.cells, kernels=_kernels(args.kernel))
    t0 = time.time()
    rep = equivalence_matrix(cells)
    print(f"equivalence: {len(cells)} cells, "
          f"{'PASS' if rep.passed else 'FAIL'} ({time.time() - t0:.1f}s)")
    if not rep.passed:
        print(json.dumps(rep.as_dict()["failures"][:5], indent=1))
    counters = counter_assertions()
    for c in counters.checks:
        print(f"  {'PASS' if c.ok else 'FAIL'} {c.name}: {c.measured:.4g} "
              f"(expect {c.expected} +-{c.tol})")
    ok = rep.passed and counters.passed
    print("verify:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


def _grid_size(args, dim):
    size = list(DEFAULT_SIZES[dim])
    for i, v in enumerate((args.nx, args.ny, args.nz)[:dim]):
        if v:
            size[i] = v
    return tuple(size)


def _bench_once(kernel, variant, grid, steps, tile, threads):
    entry = catalog_get(kernel)
    if variant == "scalar":
        out = scalar_reference(entry.spec, grid, steps)
    elif variant == "multiload":
        out = multiload_vectorized(entry.spec, grid, steps)
    elif variant == "datareorg":
        out = datareorg_vectorized_1d3p(entry.spec, grid, steps)
    elif tile is not None:
        sched = build_schedule(kernel, grid.extents, steps, tile[0], tile[1])
        out = execute_parallel(kernel, grid, sched, workers=threads,
                               variant=KernelVariant(variant))
    else:
        out = run_temporal(kernel, grid, steps, KernelVariant(variant))
    return out


def _bench(args) -> int:
    rows = []
    scheme = args.variant.replace("-", "_")
    for kernel in _kernels(args.kernel):
        if args.backend == "count":
            print(counter_report_json(kernel if kernel != "lcs" else "heat1d",
                                      "base" if scheme not in ("base", "two_stride") else scheme))
            continue
        threads_list = args.threads or [1]
        for threads in threads_list:
            if kernel == "lcs":
                rng = np.random.default_rng(args.seed)
                na = args.nx or 20000
                nb = args.ny or na
                a = rng.integers(0, 4, na, dtype=np.int32)
                b = rng.integers(0, 4, nb, dtype=np.int32)
                steps = na

                def run():
                    if args.tile or threads > 1:
                        tile = args.tile or ((4096,), 4096)
                        sched = build_schedule("lcs", (nb,), na, tile[0], tile[1])
                        return lcs_blocked(a, b, sched, workers=threads)
                    return lcs_temporal(a, b)

                run()  # warm-up
                times = []
                for _ in range(args.reps):
                    t0 = time.perf_counter()
                    val = run()
                    times.append(time.perf_counter() - t0)
                rate = na * nb / statistics.median(times) / 1e9
                check = val & 0xFFFFFFFFFFFFFFFF
                size = (na, nb, 0)
                dim = 2
            else:
                entry = catalog_get(kernel)
                size3 = _grid_size(args, entry.spec.dim) + (0, 0)
                size = size3[:3]
                dim = entry.spec.dim
                steps = args.steps or 64
                grid = Grid.random(size3[:dim], seed=args.seed,
                                   element_kind=entry.spec.element_kind, vl=entry.vl)
                use_threads = threads if (args.tile or threads > 1) else 1
                tile = args.tile or (DEFAULT_TILES[kernel] if use_threads > 1 else None)
                if tile:
                    tile = _fit_tile(tile, grid.extents, entry)
                _bench_once(kernel, scheme, grid, steps,
                            tile, use_threads)  # warm-up
                times = []
                out = None
                for _ in range(args.reps):
                    t0 = time.perf_counter()
                    out = _bench_once(kernel, scheme, grid, steps, tile, use_threads)
                    times.append(time.perf_counter() - t0)
                pts = 1
                for e in grid.extents:
                    pts *= e
                rate = pts * steps / statistics.median(times) / 1e9
                dump = out.dump_bytes()
                check = fnv1a64(dump)
                if args.dump:
                    out.dump(args.dump)
            tile_txt = ""
            if args.tile:
                tile_txt = "x".join(map(str, args.tile[0])) + f":{args.tile[1]}"
            row = (f"{kernel},{args.variant},{dim},{size[0]},{size[1] or ''},"
                   f"{size[2] or ''},{steps},{threads},{tile_txt},{args.reps},"
                   f"{rate:.6f},{check:016x}")
            rows.append(row)
            print(row)
    if args.csv:
        new = not _file_exists(args.csv)
        with open(args.csv, "a") as fh:
            if new:
                fh.write(CSV_HEADER + "\n")
            fh.write("\n".join(rows) + "\n")
    return 0


def _fit_tile(tile, extents, entry):
    """Scale a tile request down by powers of two until it fits the grid."""
    space, height = tile
    space = list(space[: len(extents)]) + [space[-1]] * (len(extents) - len(space))
    floor = 4 * entry.s * entry.vl
    for i, (w, n) in enumerate(zip(space, extents)):
        while w > n and (i > 0 or w // 2 >= floor):
            w //= 2
        space[i] = min(w, n) if i > 0 else w
    while height > entry.vl and height > min(space[1:] or [height]):
        height //= 2
    height = max(entry.vl, height // entry.vl * entry.vl)
    return tuple(space), height


def _file_exists(path):
    try:
        with open(path):
            return True
    except OSError:
        return False


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args = _apply_config(args, sys.argv[1:] if argv is None else argv)
    if args.mode == "verify":
        return _verify(args)
    return _bench(args)


if __name__ == "__main__":
    sys.exit(main())
