"""Padded d-dimensional scalar fields with constant-value halos.

Interior points live at logical coordinates ``0 <= x_i < extents[i]``; a halo
of ``halo`` cells per face carries the constant boundary value.  Each axis is
stored with a leading offset that is a multiple of the vector length, so a
logical index ``x`` is "aligned" exactly when ``x % vl == 0`` — the padded
array index then is too.  The trailing pad leaves room for the read-ahead of
the vector kernels (bottom loads run up to one group past the interior).
"""

from __future__ import annotations

import struct

import numpy as np

_MAGIC = b"TSTN"
_VERSION = 1
_EKIND = {"float64": 0, "int32": 1}
_EKIND_REV = {v: k for k, v in _EKIND.items()}
_DTYPE = {"float64": np.float64, "int32": np.int32}


class Grid:
    """One time plane of a stencil field, halo included."""

    def __init__(self, extents, halo, boundary=0.0, element_kind="float64", vl=4):
        self.extents = tuple(int(e) for e in extents)
        if any(e < 1 for e in self.extents):
            raise ValueError("extents must be positive")
        self.halo = int(halo)
        self.boundary = boundary
        self.element_kind = element_kind
        self.vl = vl
        self.offset = vl if vl >= self.halo else vl * ((self.halo + vl - 1) // vl)
        shape = tuple(self.offset + e + self.halo + vl for e in self.extents)
        self.data = np.full(shape, boundary, dtype=_DTYPE[element_kind])

    @property
    def dim(self):
        return len(self.extents)

    @property
    def dtype(self):
        return self.data.dtype

    def _core(self, arr):
        sl = tuple(slice(self.offset, self.offset + e) for e in self.extents)
        return arr[sl]

    @property
    def interior(self):
        return self._core(self.data)

    def set_interior(self, values):
        arr = np.asarray(values, dtype=self.dtype)
        if arr.shape != self.extents:
            raise ValueError(f"shape {arr.shape} != extents {self.extents}")
        self._core(self.data)[...] = arr

    def fill_halo(self):
        """Reset every non-interior cell to the boundary constant."""
        interior = self.interior.copy()
        self.data[...] = self.boundary
        self._core(self.data)[...] = interior

    def copy(self) -> "Grid":
        g = Grid(self.extents, self.halo, self.boundary, self.element_kind, self.vl)
        g.data[...] = self.data
        return g

    def alloc_like(self) -> "Grid":
        """Fresh grid with the same geometry, interior zeroed, halo set."""
        return Grid(self.extents, self.halo, self.boundary, self.element_kind, self.vl)

    @classmethod
    def from_array(cls, values, halo=1, boundary=0.0, vl=4):
        arr = np.asarray(values)
        kind = "int32" if arr.dtype.kind in "iu" else "float64"
        g = cls(arr.shape, halo, boundary, kind, vl)
        g.set_interior(arr.astype(_DTYPE[kind]))
        return g

    @classmethod
    def random(cls, extents, halo=1, boundary=0.0, element_kind="float64", vl=4, seed=0):
        rng = np.random.default_rng(seed)
        g = cls(extents, halo, boundary, element_kind, vl)
        if element_kind == "float64":
            g.set_interior(rng.uniform(-1.0, 1.0, size=g.extents))
        else:
            g.set_interior(rng.integers(0, 2, size=g.extents, dtype=np.int32))
        return g

    # -- serialization -------------------------------------------------------

    def dump_bytes(self) -> bytes:
        head = _MAGIC + struct.pack(
            "<IBB", _VERSION, self.dim, _EKIND[self.element_kind]
        )
        head += struct.pack(f"<{self.dim}Q", *self.extents)
        head += struct.pack("<I", self.halo)
        return head + np.ascontiguousarray(self.interior).tobytes()

    def dump(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.dump_bytes())

    @classmethod
    def load(cls, path) -> "Grid":
        with open(path, "rb") as fh:
            raw = fh.read()
        if raw[:4] != _MAGIC:
            raise ValueError("bad magic")
        version, dim, ek = struct.unpack_from("<IBB", raw, 4)
        if version != _VERSION:
            raise ValueError(f"unsupported version {version}")
        pos = 10
        extents = struct.unpack_from(f"<{dim}Q", raw, pos)
        pos += 8 * dim
        (halo,) = struct.unpack_from("<I", raw, pos)
        pos += 4
        kind = _EKIND_REV[ek]
        payload = np.frombuffer(raw[pos:], dtype=_DTYPE[kind]).reshape(extents)
        return cls.from_array(payload, halo=halo)


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a over a byte string (benchmark result self-check)."""
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h
