"""Kernel backend selection.

The compiled extension (kptau._speedups) and the numpy module
(_numpy_kernels) export the same four kernels.  Import-time selection
prefers the extension; the environment variable KPTAU_BACKEND forces a
choice ("ext" or "numpy"), raising if a forced extension is unavailable.
Estimators accept an explicit kernels module as well, which is how the
cross-backend agreement tests and the benchmark drive both at once.
"""

import os

from ..errors import ConfigError
from . import _numpy_kernels


def _try_ext():
    try:
        from kptau import _speedups
    except ImportError:
        return None
    return _speedups


_EXT = _try_ext()


def load_backend(name):
    """Fetch a kernels module by name ("ext" or "numpy")."""
    if name == "numpy":
        return _numpy_kernels
    if name == "ext":
        if _EXT is None:
            raise ConfigError(
                "compiled kernels requested but kptau._speedups is not "
                "importable (build the extension or use KPTAU_BACKEND=numpy)"
            )
        return _EXT
    raise ConfigError(f"unknown backend {name!r}; expected 'ext' or 'numpy'")


def _select():
    forced = os.environ.get("KPTAU_BACKEND")
    if forced:
        return load_backend(forced)
    return _EXT if _EXT is not None else _numpy_kernels


_ACTIVE = _select()


def active_kernels():
    """The kernels module chosen at import time."""
    return _ACTIVE


def active_backend():
    """Name of the active backend: "ext" or "numpy"."""
    return _ACTIVE.NAME


def available_backends():
    names = ["numpy"]
    if _EXT is not None:
        names.insert(0, "ext")
    return tuple(names)
