"""Numerical laboratory for the entanglement transition of weakly coupled
quantum-chaotic subsystems."""

try:
    from importlib.metadata import PackageNotFoundError, version

    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

__all__ = [
    "distributions",
    "dynamics",
    "ensembles",
    "harness",
    "linalg",
    "schmidt",
    "specfun",
    "theory",
    "tracy_widom",
]
