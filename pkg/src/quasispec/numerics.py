"""Small deterministic kernels: 2x2 real matrices, interval unions and
trigonometric polynomials.

Everything here is immutable and float64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericRangeError

#: intervals closer than this are merged (absorbs roundoff at band edges)
MERGE_GAP = 1e-12


@dataclass(frozen=True, slots=True)
class Mat2:
    """Real 2x2 matrix ``[[a11, a12], [a21, a22]]``."""

    a11: float
    a12: float
    a21: float
    a22: float

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, arr) -> "Mat2":
        arr = np.asarray(arr, dtype=float)
        return cls(float(arr[0, 0]), float(arr[0, 1]), float(arr[1, 0]), float(arr[1, 1]))

    def to_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return compose(self, other)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a11 + other.a11, self.a12 + other.a12,
                    self.a21 + other.a21, self.a22 + other.a22)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.a11 - other.a11, self.a12 - other.a12,
                    self.a21 - other.a21, self.a22 - other.a22)

    def scale(self, c: float) -> "Mat2":
        return Mat2(c * self.a11, c * self.a12, c * self.a21, c * self.a22)

    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def trace(self) -> float:
        return self.a11 + self.a22

    def inverse(self) -> "Mat2":
        d = self.det()
        if d == 0.0:
            raise ZeroDivisionError("singular matrix")
        return Mat2(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)

    def apply(self, v: Sequence[float]) -> tuple[float, float]:
        x, y = v
        return (self.a11 * x + self.a12 * y, self.a21 * x + self.a22 * y)

    def max_abs_diff(self, other: "Mat2") -> float:
        return max(abs(self.a11 - other.a11), abs(self.a12 - other.a12),
                   abs(self.a21 - other.a21), abs(self.a22 - other.a22))

    def is_finite(self) -> bool:
        return all(math.isfinite(x) for x in (self.a11, self.a12, self.a21, self.a22))


def compose(a: Mat2, b: Mat2) -> Mat2:
    """Matrix product ``a @ b``.

    Raises NumericRangeError if the product leaves the float range.
    """
    out = Mat2(
        a.a11 * b.a11 + a.a12 * b.a21,
        a.a11 * b.a12 + a.a12 * b.a22,
        a.a21 * b.a11 + a.a22 * b.a21,
        a.a21 * b.a12 + a.a22 * b.a22,
    )
    if not out.is_finite():
        raise NumericRangeError(f"compose: non-finite product of {a} and {b}")
    return out


def schmidt_norm(m: Mat2) -> float:
    """Frobenius (Hilbert-Schmidt) norm; at least sqrt(2) for det-1 matrices."""
    return math.sqrt(m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22)


def rotation(angle: float) -> Mat2:
    c, s = math.cos(angle), math.sin(angle)
    return Mat2(c, -s, s, c)


@dataclass(frozen=True)
class ScaledMat2:
    """A matrix kept as ``mat * exp(log_scale)`` so long products never overflow."""

    mat: Mat2
    log_scale: float

    def log_norm(self) -> float:
        return self.log_scale + math.log(schmidt_norm(self.mat))

    def assemble(self) -> Mat2:
        """The product in plain form; raises NumericRangeError on overflow."""
        c = math.exp(self.log_scale) if self.log_scale < 709.0 else math.inf
        out = self.mat.scale(c)
        if not out.is_finite():
            raise NumericRangeError(f"product norm e^{self.log_norm():.1f} exceeds float range")
        return out

    def det_defect(self) -> float:
        """``|det - 1|`` of the assembled product, computed without overflow."""
        return abs(self.mat.det() * math.exp(2.0 * self.log_scale) - 1.0)

    def __matmul__(self, other: "ScaledMat2") -> "ScaledMat2":
        return ScaledMat2(self.mat @ other.mat, self.log_scale + other.log_scale).normalized()

    def normalized(self) -> "ScaledMat2":
        n = schmidt_norm(self.mat)
        if n == 0.0 or n < math.e:
            return self
        shift = math.floor(math.log(n))
        return ScaledMat2(self.mat.scale(math.exp(-shift)), self.log_scale + shift)

    def diff_norm(self, other: "ScaledMat2") -> tuple[float, float]:
        """Schmidt norm of ``self - other`` as ``(value, log_value)``."""
        s = max(self.log_scale, other.log_scale)
        d = (self.mat.scale(math.exp(self.log_scale - s))
             - other.mat.scale(math.exp(other.log_scale - s)))
        n = schmidt_norm(d)
        if n == 0.0:
            return 0.0, -math.inf
        log_value = s + math.log(n)
        return (math.exp(log_value) if log_value < 709.0 else math.inf), log_value


class IntervalUnion:
    """Sorted, pairwise disjoint union of closed intervals.

    Construction normalizes: intervals are sorted and any two whose gap is
    below ``MERGE_GAP`` are merged.
    """

    __slots__ = ("_lo", "_hi")

    def __init__(self, intervals: Iterable[Sequence[float]] = ()):
        pairs = sorted((float(lo), float(hi)) for lo, hi in intervals)
        lo_out: list[float] = []
        hi_out: list[float] = []
        for lo, hi in pairs:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"non-finite interval [{lo}, {hi}]")
            if hi < lo:
                raise ValueError(f"reversed interval [{lo}, {hi}]")
            if hi_out and lo - hi_out[-1] < MERGE_GAP:
                hi_out[-1] = max(hi_out[-1], hi)
            else:
                lo_out.append(lo)
                hi_out.append(hi)
        self._lo = np.array(lo_out, dtype=float)
        self._hi = np.array(hi_out, dtype=float)
        self._lo.flags.writeable = False
        self._hi.flags.writeable = False

    @classmethod
    def from_points(cls, points: Iterable[float]) -> "IntervalUnion":
        return cls((p, p) for p in points)

    @property
    def lo(self) -> np.ndarray:
        return self._lo

    @property
    def hi(self) -> np.ndarray:
        return self._hi

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return list(zip(self._lo.tolist(), self._hi.tolist()))

    def __len__(self) -> int:
        return len(self._lo)

    def __iter__(self):
        return iter(self.intervals)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return self.intervals == other.intervals

    def __repr__(self) -> str:
        if len(self) > 6:
            return f"IntervalUnion({len(self)} intervals, measure={self.measure():.6g})"
        return f"IntervalUnion({self.intervals})"

    def is_empty(self) -> bool:
        return len(self._lo) == 0

    def measure(self) -> float:
        return math.fsum((self._hi - self._lo).tolist())

    def scaled(self, c: float) -> "IntervalUnion":
        if c >= 0:
            return IntervalUnion(zip((c * self._lo).tolist(), (c * self._hi).tolist()))
        return IntervalUnion(zip((c * self._hi).tolist(), (c * self._lo).tolist()))

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.intervals + other.intervals)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        i = int(np.searchsorted(self._lo, x, side="right")) - 1
        return i >= 0 and x <= self._hi[i] + tol

    def distance_to(self, x) -> np.ndarray:
        """Distance from each point of ``x`` to this set (inf for the empty set)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.is_empty():
            return np.full(x.shape, math.inf)
        i = np.searchsorted(self._lo, x, side="right") - 1
        left = np.clip(i, 0, len(self._lo) - 1)
        right = np.clip(i + 1, 0, len(self._lo) - 1)
        d_left = np.where(i >= 0, np.maximum(x - self._hi[left], 0.0), math.inf)
        d_right = np.where(i + 1 < len(self._lo), self._lo[right] - x, math.inf)
        d = np.minimum(d_left, np.maximum(d_right, 0.0))
        return np.where(i < 0, self._lo[0] - x, d)

    def gap_midpoints(self) -> np.ndarray:
        return 0.5 * (self._hi[:-1] + self._lo[1:])


def union_measure(u: IntervalUnion) -> float:
    return u.measure()


def _directed_hausdorff(a: IntervalUnion, b: IntervalUnion) -> float:
    # dist(., b) restricted to a peaks at endpoints of a or at gap midpoints of b inside a
    mids = b.gap_midpoints()
    inside = np.array([a.contains(m) for m in mids.tolist()], dtype=bool)
    candidates = np.concatenate([a.lo, a.hi, mids[inside] if len(mids) else mids])
    return float(np.max(b.distance_to(candidates)))


def hausdorff_distance(a: IntervalUnion, b: IntervalUnion) -> float:
    """Symmetric Hausdorff distance between two closed interval unions.

    Returns ``inf`` when exactly one of them is empty, 0 when both are.
    """
    if a.is_empty() and b.is_empty():
        return 0.0
    if a.is_empty() or b.is_empty():
        return math.inf
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


class TrigPolynomial:
    """Finite Fourier series ``sum_{n=-N}^{N} c_n exp(i n phi)``.

    ``coeffs[j]`` holds the coefficient of mode ``n = j - N``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 1 or len(c) % 2 != 1:
            raise ValueError("coefficient array must have odd length 2N+1")
        c.flags.writeable = False
        self._c = c

    @classmethod
    def zero(cls, degree: int = 0) -> "TrigPolynomial":
        return cls(np.zeros(2 * degree + 1))

    @classmethod
    def from_modes(cls, modes: dict[int, complex]) -> "TrigPolynomial":
        degree = max((abs(n) for n in modes), default=0)
        c = np.zeros(2 * degree + 1, dtype=complex)
        for n, v in modes.items():
            c[n + degree] += v
        return cls(c)

    @classmethod
    def cosine(cls, amplitude: float = 1.0, phase: float = 0.0) -> "TrigPolynomial":
        """``amplitude * cos(phi + phase)``."""
        z = 0.5 * amplitude * complex(math.cos(phase), math.sin(phase))
        return cls([z.conjugate(), 0.0, z])

    @property
    def degree(self) -> int:
        return (len(self._c) - 1) // 2

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    def coefficient(self, n: int) -> complex:
        N = self.degree
        return complex(self._c[n + N]) if -N <= n <= N else 0j

    def modes(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)

    @property
    def is_real(self) -> bool:
        return bool(np.allclose(self._c, np.conj(self._c[::-1]), rtol=0.0,
                                atol=1e-14 * max(1.0, float(np.max(np.abs(self._c))))))

    def mean(self) -> complex:
        return complex(self._c[self.degree])

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        n = self.modes()
        vals = np.exp(1j * np.multiply.outer(phi, n)) @ self._c
        if self.is_real:
            vals = vals.real
        return vals if vals.ndim else vals.item()

    def shifted(self, delta: float) -> "TrigPolynomial":
        """The polynomial ``phi -> self(phi + delta)``."""
        return TrigPolynomial(self._c * np.exp(1j * self.modes() * delta))

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        N = max(self.degree, other.degree)
        c = np.zeros(2 * N + 1, dtype=complex)
        c[N - self.degree:N + self.degree + 1] += self._c
        c[N - other.degree:N + other.degree + 1] += other._c
        return TrigPolynomial(c)

    def __sub__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return self + TrigPolynomial(-other._c)

    def __repr__(self) -> str:
        return f"TrigPolynomial(degree={self.degree}, real={self.is_real})"
