"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when importable; otherwise, or
when the environment variable ``QUASISPEC_PURE_PYTHON`` is set to a non-empty
value other than ``0``, the numpy fallback is used.
"""

import os

from . import _fallback

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _fallback}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels


def _choose():
    if os.environ.get("QUASISPEC_PURE_PYTHON", "") not in ("", "0"):
        return "python"
    return "cython" if "cython" in BACKENDS else "python"


BACKEND = _choose()
kernels = BACKENDS[BACKEND]


def get_kernels(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return kernels
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
