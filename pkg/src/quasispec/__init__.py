"""Numerics for the almost Mathieu operator with periodic coupling.

The operator is ``(H u)_n = u_{n+1} + u_{n-1} + lambda * T(n) * cos(n omega + theta) u_n``
with ``T`` of period ``k``.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import (ConfigError, NumericRangeError, PrecisionExhausted,
                     QuasispecError, SmallDivisorError)

__all__ = [
    "BACKEND",
    "ConfigError",
    "NumericRangeError",
    "PrecisionExhausted",
    "QuasispecError",
    "SmallDivisorError",
    "__version__",
]
