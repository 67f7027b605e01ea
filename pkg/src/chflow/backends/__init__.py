"""Hot-kernel backend selection.

Two interchangeable implementations of the per-step kernels exist:

* ``nb_kernels`` -- numba @njit loops (default when numba imports cleanly)
* ``np_kernels`` -- pure vectorized numpy

Selection is controlled by the environment variable ``CHFLOW_BACKEND``:
``auto`` (default), ``numba``, or ``numpy``.  Both backends evaluate the same
floating-point expression per node, so the produced *fields* agree bit for bit;
accumulated scalars may differ in the last ulp because the reduction trees
differ.  Reruns on a fixed backend are always bit-identical.
"""

from __future__ import annotations

import os

from . import np_kernels

_ACTIVE = None
_ACTIVE_NAME = None


def _load_numba():
    from . import nb_kernels  # deferred: numba import is slow

    return nb_kernels


def resolve_backend(name: str | None = None):
    """Return (module, name) for an explicitly requested or env-selected backend."""
    req = (name or os.environ.get("CHFLOW_BACKEND", "auto")).strip().lower()
    if req in ("auto", ""):
        try:
            return _load_numba(), "numba"
        except ImportError:
            return np_kernels, "numpy"
    if req == "numba":
        return _load_numba(), "numba"
    if req == "numpy":
        return np_kernels, "numpy"
    raise ValueError(f"unknown CHFLOW_BACKEND value {req!r} (use auto, numba, or numpy)")


def get_kernels(name: str | None = None):
    """Kernel module; the env-selected default is resolved once and cached."""
    global _ACTIVE, _ACTIVE_NAME
    if name is not None:
        return resolve_backend(name)[0]
    if _ACTIVE is None:
        _ACTIVE, _ACTIVE_NAME = resolve_backend()
    return _ACTIVE


def active_backend() -> str:
    get_kernels()
    return _ACTIVE_NAME
