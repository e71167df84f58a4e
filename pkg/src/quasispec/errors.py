"""Exception hierarchy shared by all quasispec modules."""


class QuasispecError(Exception):
    """Base class for errors raised by quasispec."""


class NumericRangeError(QuasispecError, ArithmeticError):
    """A computation produced non-finite values."""


class SmallDivisorError(QuasispecError):
    """A Fourier mode needed a divisor below the configured floor."""

    def __init__(self, mode, divisor, floor):
        self.mode = mode
        self.divisor = divisor
        self.floor = floor
        super().__init__(
            f"small divisor at mode n={mode}: |e^(i n step) - 1| = {divisor:.3e} < floor {floor:.1e}"
        )


class PrecisionExhausted(QuasispecError):
    """Exact-integer budget exceeded while constructing a frequency."""

    def __init__(self, message, achieved_level):
        self.achieved_level = achieved_level
        super().__init__(message)


class ConfigError(QuasispecError, ValueError):
    """Invalid experiment configuration."""
