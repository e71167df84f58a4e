"""Continued fractions of frequencies alpha = omega / 2pi in (0, 1).

Convergents are exact Python integers; the only floating quantity is alpha
itself when it is given as a float.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ConfigError, PrecisionExhausted

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SQRT2 = math.sqrt(2.0) - 1.0
DIGIT_BUDGET = 10 ** 6


@dataclass(frozen=True)
class ContinuedFraction:
    """``alpha = [a0; a1, a2, ...]`` with convergents ``p_i / q_i``, i = 0..n.

    ``quotients`` holds a1..an. ``convergents[0] = (a0, 1)``.
    ``exact`` is the exact value when known (rational input or a finite
    construction), ``alpha`` the float value.
    """

    a0: int
    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    alpha: float
    exact: Fraction | None = None
    terminated: bool = False
    halt_reason: str = "max_terms"

    @classmethod
    def from_quotients(cls, quotients: Sequence[int], a0: int = 0, *, alpha: float | None = None,
                       terminated: bool = False, halt_reason: str = "max_terms",
                       exact: Fraction | None = None) -> "ContinuedFraction":
        quotients = tuple(int(a) for a in quotients)
        if any(a < 1 for a in quotients):
            raise ValueError("partial quotients a_i (i >= 1) must be >= 1")
        conv = convergents(quotients, a0)
        p, q = conv[-1]
        if alpha is None:
            alpha = p / q
        return cls(a0, quotients, conv, float(alpha), exact, terminated, halt_reason)

    def __len__(self) -> int:
        return len(self.convergents)

    @property
    def q(self) -> list[int]:
        return [q for _, q in self.convergents]

    @property
    def p(self) -> list[int]:
        return [p for p, _ in self.convergents]

    def convergent(self, n: int) -> Fraction:
        p, q = self.convergents[n]
        return Fraction(p, q)

    def value(self) -> Fraction:
        """Exact value when known, otherwise the exact value of the float alpha."""
        return self.exact if self.exact is not None else Fraction(self.alpha)


def convergents(quotients: Sequence[int], a0: int = 0) -> tuple[tuple[int, int], ...]:
    p_prev, q_prev = 1, 0
    p, q = a0, 1
    out = [(p, q)]
    for a in quotients:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        out.append((p, q))
    return tuple(out)


def continued_fraction_expand(alpha, max_terms: int = 40, min_remainder: float = 1e-15) -> ContinuedFraction:
    """Partial quotients of alpha in (0, 1).

    A Fraction expands exactly and terminates. A float is expanded exactly as
    the binary number it is, halting at ``max_terms`` or once the remainder
    ``|alpha - p_n/q_n|`` drops below ``min_remainder``: further quotients
    would describe rounding noise rather than alpha.
    """
    exact_input = isinstance(alpha, (Fraction, int))
    x = Fraction(alpha)
    if not (0 < x < 1):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    quotients: list[int] = []
    r = x
    terminated = False
    reason = "max_terms"
    p_prev, q_prev, p, q = 1, 0, 0, 1
    while len(quotients) < max_terms:
        if r == 0:
            terminated = True
            reason = "terminated"
            break
        if not exact_input and q > 1 and abs(x - Fraction(p, q)) < min_remainder:
            reason = "precision"
            break
        y = 1 / r
        a = y.numerator // y.denominator
        quotients.append(a)
        r = y - a
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
    else:
        if r == 0:
            terminated, reason = True, "terminated"
    return ContinuedFraction.from_quotients(
        quotients, 0, alpha=float(alpha), terminated=terminated, halt_reason=reason,
        exact=x if exact_input else None)


def periodic_expansion(period: Sequence[int], terms: int, alpha: float) -> ContinuedFraction:
    """Continued fraction of a quadratic irrational with purely periodic quotients."""
    period = list(period)
    quotients = [period[i % len(period)] for i in range(terms)]
    return ContinuedFraction.from_quotients(quotients, 0, alpha=alpha, halt_reason="max_terms")


def beta_estimate(cf: ContinuedFraction) -> tuple[float, int]:
    """``max_n log(q_{n+1}) / q_n`` over the available convergents and the
    attaining n. A finite-data proxy for the limsup, never a claim about it."""
    qs = cf.q
    if len(qs) < 2:
        raise ValueError("need at least two convergents")
    best, arg = -math.inf, 0
    for n in range(len(qs) - 1):
        v = math.log(qs[n + 1]) / qs[n]
        if v > best:
            best, arg = v, n
    return best, arg


def approximation_quality(cf: ContinuedFraction, n: int) -> tuple[Fraction, Fraction]:
    """``(|alpha - p_n/q_n|, 1/(q_n q_{n+1}))`` in exact arithmetic.

    The bound is 0 at the last convergent of a terminated expansion.
    """
    err = abs(cf.value() - cf.convergent(n))
    qs = cf.q
    if n + 1 < len(qs):
        bound = Fraction(1, qs[n] * qs[n + 1])
    elif cf.terminated:
        bound = Fraction(0)
    else:
        bound = Fraction(1, qs[n] * qs[n])
    return err, bound


def liouville_construct(levels: int, first: int = 2, min_quotient: int = 2, strict: bool = False,
                        digit_budget: int = DIGIT_BUDGET) -> tuple[ContinuedFraction, float]:
    """Greedy continued fraction whose convergents satisfy
    ``1/(q_j q_{j+1}) <= j^(-q_j)`` for j = 1..levels.

    With ``strict`` the stronger ``1/(q_j q_{j+1}) <= q_j^(-1) j^(-q_j)`` is
    enforced instead. Quotients never go below ``min_quotient``. The returned
    float is the last convergent, used as a stand-in for the limit.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    quotients = [first]
    q_prev, q = 1, first
    for j in range(1, levels + 1):
        # j^q_j has about q_j log10(j) digits; q_j itself may be far beyond float range
        if j > 1 and math.log10(q) + math.log10(math.log10(j)) > math.log10(digit_budget):
            raise PrecisionExhausted(
                f"level {j} needs q_(j+1) >= {j}^q_{j} with q_{j} of {q.bit_length()} bits: "
                f"beyond the {digit_budget}-digit budget",
                achieved_level=j - 1)
        target = j ** q if strict else -(-(j ** q) // q)
        a = max(min_quotient, -(-(target - q_prev) // q))
        quotients.append(a)
        q_prev, q = q, a * q + q_prev
    cf = ContinuedFraction.from_quotients(quotients, 0, terminated=True, halt_reason="constructed")
    p_last, q_last = cf.convergents[-1]
    exact = Fraction(p_last, q_last)
    cf = ContinuedFraction(cf.a0, cf.quotients, cf.convergents, float(exact), exact, True, "constructed")
    return cf, float(exact)


def reducibility_comparison(beta: float, rho: float) -> dict:
    """Report ``rho`` against ``5 beta`` (user-supplied analytic radius)."""
    return {"beta": beta, "rho": rho, "five_beta": 5.0 * beta, "rho_exceeds_5beta": rho > 5.0 * beta > 0.0}


_CF_RE = re.compile(r"^cf:\[\s*([0-9,\s]*)\]$")


@dataclass(frozen=True)
class Frequency:
    """A parsed frequency: float alpha, exact value if rational, and its expansion."""

    text: str
    alpha: float
    exact: Fraction | None
    cf: ContinuedFraction


def parse_frequency(text: str, terms: int = 40) -> Frequency:
    """Parse ``golden``, ``sqrt2``, ``p/q``, ``cf:[a1,a2,...]``, ``liouville:N``
    (the greedy construction with N levels) or a decimal in (0, 1)."""
    s = str(text).strip()
    low = s.lower()
    if low.startswith("liouville:"):
        try:
            levels = int(low.split(":", 1)[1])
            cf, alpha = liouville_construct(levels)
        except (ValueError, PrecisionExhausted) as exc:
            raise ConfigError(f"bad Liouville frequency {text!r}: {exc}") from None
        return Frequency(s, alpha, cf.exact, cf)
    if low == "golden":
        return Frequency(s, GOLDEN, None, periodic_expansion([1], terms, GOLDEN))
    if low == "sqrt2":
        return Frequency(s, SQRT2, None, periodic_expansion([2], terms, SQRT2))
    m = _CF_RE.match(low)
    if m:
        try:
            quotients = [int(x) for x in m.group(1).split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"bad continued fraction {text!r}") from None
        if not quotients or any(a < 1 for a in quotients):
            raise ConfigError(f"continued fraction needs quotients >= 1: {text!r}")
        conv = convergents(quotients)
        exact = Fraction(*conv[-1])
        cf = ContinuedFraction(0, tuple(quotients), conv, float(exact), exact, True, "terminated")
        return Frequency(s, float(exact), exact, cf)
    try:
        if "/" in s:
            exact = Fraction(s)
            if not (0 < exact < 1):
                raise ConfigError(f"alpha must lie in (0, 1): {text!r}")
            return Frequency(s, float(exact), exact, continued_fraction_expand(exact, max_terms=10 ** 6))
        alpha = float(s)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"unrecognised frequency {text!r}") from None
    if not (0.0 < alpha < 1.0):
        raise ConfigError(f"alpha must lie in (0, 1): {text!r}")
    return Frequency(s, alpha, None, continued_fraction_expand(alpha, max_terms=terms))
