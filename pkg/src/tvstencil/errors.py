"""Shared exception types."""


class AlignmentError(ValueError):
    """Vector load/store index not aligned to the vector length."""


class SizeError(ValueError):
    """Grid or tile too small for the requested kernel configuration."""


class UnsupportedError(ValueError):
    """Kernel/variant combination outside the supported matrix."""


class IllegalDependence(ValueError):
    """A same-time dependence that no space stride can legalize."""
