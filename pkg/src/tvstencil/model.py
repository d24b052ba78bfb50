"""Stencil problem definitions, dependence extraction, and schedule legality.

Sign convention for dependences: ``dx = x_source - x_target``.  A Jacobi
update reads only the previous time plane (dt=1 entries); a Gauss-Seidel
update also reads already-updated neighbors of the current sweep (dt=0
entries whose dx is lexicographically negative, i.e. the source precedes the
target in the ascending space sweep).

Time-lane vectorization packs lanes at consecutive time coordinates with a
space stride ``s`` between adjacent-time lanes.  It is legal exactly when
``s`` exceeds every rightward dependence slope ``dx/dt`` (evaluated in the
vectorized, outermost space dimension); ``check_schedule`` verifies this by
brute-force replay of the lane execution order on a small box.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import IllegalDependence

Offset = tuple[int, ...]


@dataclass(frozen=True)
class Dependence:
    """dt >= 0 time distance and dx = x_source - x_target per space dim."""

    dt: int
    dx: Offset

    def __post_init__(self):
        if self.dt < 0:
            raise ValueError("dt must be >= 0")
        if self.dt == 0 and not _lex_negative(self.dx):
            raise ValueError(f"dt=0 dependence {self.dx} must be lexicographically negative")


def _lex_negative(dx: Offset) -> bool:
    for c in dx:
        if c < 0:
            return True
        if c > 0:
            return False
    return False


@dataclass(frozen=True)
class ScheduleParams:
    """s: space stride between adjacent-time lanes; sl: extra stride between
    the two 128-bit lane groups; vl: lanes per vector."""

    s: int
    sl: int = 0
    vl: int = 4

    def __post_init__(self):
        if self.s < 1 or self.sl < 0:
            raise ValueError("require s >= 1 and sl >= 0")
        if self.vl not in (1, 4, 8):
            # vl=1 is the degenerate scalar order, accepted by the legality
            # checker; real kernels use 4 (float64) or 8 (int32).
            raise ValueError("vl must be 1 (scalar), 4, or 8")

    def lane_offset(self, p: int) -> int:
        """Space offset of lane position p relative to lane vl-1, in the
        vectorized dimension.  The low 128-bit group carries the extra sl."""
        off = (self.vl - 1 - p) * self.s
        if p < self.vl // 2:
            off += self.sl
        return off


@dataclass(frozen=True)
class StencilSpec:
    """A stencil problem: update pattern, dependence kind, and boundary rule.

    ``coefficients`` maps neighbor offsets to scalar weights for linear
    stencils; the Game-of-Life rule is carried in ``birth``/``survive``
    instead (``coefficients`` empty).
    """

    name: str
    dim: int
    radius: int
    shape: str  # "star" | "box"
    dependence_kind: str  # "jacobi" | "gauss_seidel"
    element_kind: str = "float64"  # "float64" | "int32"
    coefficients: Mapping[Offset, float] = field(default_factory=dict)
    birth: frozenset = frozenset()
    survive: frozenset = frozenset()
    boundary: float = 0.0

    def __post_init__(self):
        if not 1 <= self.dim <= 3:
            raise ValueError("dim must be 1..3")
        if self.radius < 1:
            raise ValueError("radius must be >= 1")
        if self.shape not in ("star", "box"):
            raise ValueError("shape must be star or box")
        if self.dependence_kind not in ("jacobi", "gauss_seidel"):
            raise ValueError("bad dependence_kind")
        if self.element_kind not in ("float64", "int32"):
            raise ValueError("bad element_kind")
        for off in self.coefficients:
            if len(off) != self.dim:
                raise ValueError(f"offset {off} has wrong arity")
            if max(abs(c) for c in off) > self.radius:
                raise ValueError(f"offset {off} exceeds radius {self.radius}")
            if self.shape == "star" and sum(1 for c in off if c) > 1:
                raise ValueError(f"offset {off} not on the star")
        if not (self.birth <= set(range(9)) and self.survive <= set(range(9))):
            raise ValueError("life rule sets must be subsets of 0..8")

    @property
    def is_life(self) -> bool:
        return bool(self.birth or self.survive)

    def offsets(self) -> list[Offset]:
        """Neighbor offsets in a fixed deterministic order (shared by the
        scalar oracle and every vector kernel, so the expression tree — and
        therefore float rounding — is identical on both paths)."""
        if self.is_life:
            full = [
                o
                for o in _box_offsets(self.dim, self.radius)
                if any(c for c in o)
            ]
            return sorted(full)
        return sorted(self.coefficients)


def _box_offsets(dim: int, r: int) -> list[Offset]:
    if dim == 1:
        return [(i,) for i in range(-r, r + 1)]
    inner = _box_offsets(dim - 1, r)
    return [(i,) + rest for i in range(-r, r + 1) for rest in inner]


def dependences(spec: StencilSpec) -> frozenset[Dependence]:
    """Every (dt, dx) pair implied by the update rule.

    Jacobi: all reads hit the previous plane -> (1, offset).  Gauss-Seidel:
    lexicographically earlier neighbors have already been updated this sweep
    -> (0, offset); the rest still hold previous-plane values -> (1, offset).
    """
    deps = set()
    for off in spec.offsets():
        if spec.dependence_kind == "jacobi":
            deps.add(Dependence(1, off))
        elif _lex_negative(off):
            deps.add(Dependence(0, off))
        else:
            deps.add(Dependence(1, off))
    if spec.dependence_kind == "jacobi" and (0,) * spec.dim not in spec.offsets():
        # box rules like Life still read the centre cell's previous value
        deps.add(Dependence(1, (0,) * spec.dim))
    return frozenset(deps)


def lcs_dependences() -> frozenset[Dependence]:
    """The LCS recurrence with the sequence-A index viewed as time:
    lcs[x][y] reads lcs[x-1][y], lcs[x-1][y-1], and lcs[x][y-1]."""
    return frozenset(
        {Dependence(1, (0,)), Dependence(1, (-1,)), Dependence(0, (-1,))}
    )


def min_space_stride(deps: frozenset[Dependence]) -> int:
    """Smallest integer s with s > max{dx/dt : dt >= 1, dx > 0}, dx taken in
    the outermost space dimension; 1 when no rightward slope exists.

    dt=0 entries are legalized by the sweep order, not by s; a dt=0 entry
    violating the sweep-order invariant admits no legal stride at all.
    """
    if not deps:
        raise ValueError("empty dependence set")
    best: Fraction | None = None
    for d in deps:
        if d.dt == 0:
            if not _lex_negative(d.dx):
                raise IllegalDependence(f"dt=0 dependence {d.dx} breaks the sweep order")
            continue
        dx0 = d.dx[0]
        if dx0 > 0:
            slope = Fraction(dx0, d.dt)
            if best is None or slope > best:
                best = slope
    if best is None:
        return 1
    return int(best) + 1  # smallest integer strictly above a rational


def check_schedule(
    deps: frozenset[Dependence],
    params: ScheduleParams,
    extent: tuple[int, ...],
    time_steps: int,
) -> bool:
    """Exhaustively replay the lane execution order on a small box and verify
    every dependence source completes strictly before its target.

    Points computed by the same vector instruction share one issue index, so
    a genuine dependence between same-issue lanes is reported as a conflict.
    ``vl=1`` degenerates to the scalar sweep order and is always legal for a
    well-formed dependence set.
    """
    nspace = len(extent)
    if time_steps * _prod(extent) > 10**6:
        raise ValueError("box too large for exhaustive checking")
    issue: dict[tuple, int] = {}
    clock = 0
    nx = extent[0]
    rest = _space_points(extent[1:])
    vl, s = params.vl, params.s

    for t0 in range(0, time_steps, vl):
        height = min(vl, time_steps - t0)
        if height < vl or vl == 1:
            # remainder rows (and the vl=1 degenerate case) run scalar
            for k in range(1, height + 1):
                for x in range(nx):
                    for pt in rest:
                        issue[(t0 + k, x) + pt] = clock
                        clock += 1
            continue
        # scalar prologue triangles: at t0+k the first (vl-k)*s + lane-group
        # shift columns are precomputed
        widths = [(vl - k) * s + params.sl for k in range(1, vl)]
        for k in range(1, vl):
            for x in range(min(widths[k - 1], nx)):
                for pt in rest:
                    issue[(t0 + k, x) + pt] = clock
                    clock += 1
        # steady skewed loop: iteration x computes one point per lane; the
        # time-(t0+k) point sits in lane k-1 at space offset lane_offset(k-1)
        lanes = [(k, params.lane_offset(k - 1)) for k in range(1, vl + 1)]
        top_off = params.lane_offset(0)  # oldest lane, largest offset
        for x in range(nx - top_off):
            for pt in rest:
                for k, off in lanes:
                    key = (t0 + k, x + off) + pt
                    if key not in issue:
                        issue[key] = clock
                clock += 1
        # scalar epilogue triangles: whatever the steady loop left uncovered
        for k in range(1, vl + 1):
            for x in range(nx):
                for pt in rest:
                    key = (t0 + k, x) + pt
                    if key not in issue:
                        issue[key] = clock
                        clock += 1

    for (t, x, *pt), when in issue.items():
        for d in deps:
            st = t - d.dt
            sx = x + d.dx[0]
            spt = tuple(pt[i] + d.dx[i + 1] for i in range(nspace - 1))
            if st < 1 or sx < 0 or sx >= nx:
                continue
            if any(c < 0 or c >= extent[i + 1] for i, c in enumerate(spt)):
                continue
            src = issue.get((st, sx) + spt)
            if src is None or src >= when:
                return False
    return True


def _prod(tup):
    out = 1
    for v in tup:
        out *= v
    return out


def _space_points(extent):
    if not extent:
        return [()]
    inner = _space_points(extent[1:])
    return [(i,) + rest for i in range(extent[0]) for rest in inner]
