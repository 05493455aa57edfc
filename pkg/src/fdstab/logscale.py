"""Iterated-log arithmetic for constant chains of extreme magnitude.

The explicit constant chains compose exponentials: a Harnack constant h
with ln(h) ~ 1e144 is routine, the Hoelder exponent behaves like
exp(-mu ln h), and quantities downstream of 1/nu iterate further, so a
fixed number of log levels is not enough.  ``LogReal`` stores a positive
real x through a signed tower

    ln(x) = lnsign * E(lndepth, lnmag),   E(0, v) = v,  E(k, v) = exp(E(k-1, v))

normalized so that depth >= 1 implies lnmag > 700 (the value would not
fit one level down).  Multiplication, powers, and sums of positive terms
are supported at any depth; once magnitudes differ beyond float64
resolution the dominant term is returned, which is exact at working
precision.  Additions that would cancel two equal super-exponential
magnitudes of opposite sign are refused rather than guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# |ln x| below this is kept at depth 0; above, the plain value of x would
# overflow/underflow a float64
_LN_PLAIN_MAX = 700.0
# additive terms further apart than this (in ln units) do not change the
# dominant term at float64 resolution
_NEGLIGIBLE_GAP = 40.0


@dataclass(frozen=True)
class LogReal:
    """A positive real number in signed iterated-log representation."""

    lnsign: int   # sign of ln(x): +1, -1, or 0 for x == 1
    lndepth: int  # tower height of the stored magnitude
    lnmag: float  # nonnegative magnitude, > 700 whenever lndepth >= 1

    def __post_init__(self):
        if self.lndepth < 0:
            raise ValueError("lndepth must be >= 0")
        if not math.isfinite(self.lnmag) or self.lnmag < 0.0:
            raise ValueError(f"lnmag must be finite and >= 0, got {self.lnmag}")
        if self.lnsign not in (-1, 0, 1):
            raise ValueError("lnsign must be -1, 0 or +1")

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_float(x: float) -> "LogReal":
        if not (x > 0.0) or not math.isfinite(x):
            raise ValueError(f"LogReal requires a finite positive value, got {x}")
        return LogReal.from_ln(math.log(x))

    @staticmethod
    def from_ln(ln_x: float) -> "LogReal":
        """Build from a plain float ln(x)."""
        if not math.isfinite(ln_x):
            raise ValueError(f"ln(x) must be finite, got {ln_x}")
        if ln_x == 0.0:
            return LogReal(0, 0, 0.0)
        return LogReal(1 if ln_x > 0 else -1, 0, abs(ln_x))

    @staticmethod
    def _build(sign: int, depth: int, mag: float) -> "LogReal":
        """Normalize a tower representation to minimal depth."""
        if sign == 0 or mag == -math.inf:
            return LogReal(0, 0, 0.0)
        while depth >= 1 and mag <= _LN_PLAIN_MAX:
            mag = math.exp(mag)
            depth -= 1
        return LogReal(sign, depth, mag)

    @staticmethod
    def from_ln_deep(sign: int, ln_abs_ln_x: float) -> "LogReal":
        """Build from ln|ln x| when ln(x) = sign * exp(ln_abs_ln_x)."""
        return LogReal._build(sign, 1, ln_abs_ln_x)

    # -- the two tower primitives --------------------------------------

    def ln_signed(self) -> tuple[int, "LogReal"]:
        """(sign of ln x, |ln x| as a LogReal)."""
        if self.lnsign == 0:
            return (0, LogReal(0, 0, 0.0))
        if self.lndepth == 0:
            return (self.lnsign, LogReal.from_float(self.lnmag))
        # |ln x| = E(lndepth, lnmag) is the value whose own ln is
        # E(lndepth - 1, lnmag)
        return (self.lnsign, LogReal._build(1, self.lndepth - 1, self.lnmag))

    @staticmethod
    def exp_signed(sign: int, mag: "LogReal") -> "LogReal":
        """The positive real with ln = sign * mag (mag a positive LogReal)."""
        if sign == 0:
            return LogReal(0, 0, 0.0)
        if mag.lnsign < 0:
            # mag <= 1: exp(+-mag) is plain, possibly exactly 1
            if mag.lndepth >= 1 or mag.lnmag > _LN_PLAIN_MAX:
                return LogReal(0, 0, 0.0)
            return LogReal.from_ln(sign * math.exp(-mag.lnmag))
        if mag.lnsign == 0:
            return LogReal.from_ln(float(sign))
        # mag = E(lndepth + 1, lnmag) as a value
        return LogReal._build(sign, mag.lndepth + 1, mag.lnmag)

    @staticmethod
    def exp_of(t: "LogReal", sign: int = 1) -> "LogReal":
        """exp(sign * t) for a positive LogReal t."""
        return LogReal.exp_signed(sign, t)

    # -- conversions ---------------------------------------------------

    def ln_float(self) -> float:
        """ln(x) as a plain float; raises if it does not fit."""
        if self.lndepth >= 1:
            raise OverflowError("ln(x) exceeds float64 range")
        return self.lnsign * self.lnmag

    def ln_logreal(self) -> "LogReal":
        """ln(x) as a LogReal; requires x > 1."""
        sign, mag = self.ln_signed()
        if sign <= 0:
            raise ValueError("ln(x) as LogReal requires x > 1")
        return mag

    def to_float(self) -> float:
        ln_x = self.ln_float()
        if abs(ln_x) > _LN_PLAIN_MAX:
            raise OverflowError("value exceeds float64 range")
        return math.exp(ln_x)

    @property
    def representable(self) -> bool:
        return self.lndepth == 0 and self.lnmag <= _LN_PLAIN_MAX

    @property
    def log_representable(self) -> bool:
        return self.lndepth == 0

    def to_repr(self) -> dict:
        """Stable dictionary form for golden files and JSON export."""
        return {"lnsign": self.lnsign, "lndepth": self.lndepth, "lnmag": self.lnmag}

    # -- arithmetic ----------------------------------------------------

    def _plain_ln(self) -> float | None:
        """ln(x) as a float when that is safe for direct arithmetic."""
        if self.lndepth == 0 and self.lnmag < 4e307:
            return self.lnsign * self.lnmag
        return None

    def __mul__(self, other: "LogReal") -> "LogReal":
        la, lb = self._plain_ln(), other._plain_ln()
        if la is not None and lb is not None:
            return LogReal.from_ln(la + lb)
        s, m = _signed_add(*self.ln_signed(), *other.ln_signed())
        return LogReal.exp_signed(s, m)

    def __truediv__(self, other: "LogReal") -> "LogReal":
        la, lb = self._plain_ln(), other._plain_ln()
        if la is not None and lb is not None:
            return LogReal.from_ln(la - lb)
        so, mo = other.ln_signed()
        s, m = _signed_add(*self.ln_signed(), -so, mo)
        return LogReal.exp_signed(s, m)

    def powf(self, c: float) -> "LogReal":
        """x**c for a plain float exponent."""
        if c == 0.0:
            return LogReal(0, 0, 0.0)
        s, m = self.ln_signed()
        return LogReal.exp_signed(s * (1 if c > 0 else -1),
                                  m * LogReal.from_float(abs(c)))

    def pow_logreal(self, c: "LogReal") -> "LogReal":
        """x**c where the positive exponent c is itself a LogReal."""
        if c.lnsign == 0 and c.lndepth == 0 and c.lnmag == 0.0:
            return self
        s, m = self.ln_signed()
        return LogReal.exp_signed(s, m * c)

    def add(self, other: "LogReal") -> "LogReal":
        """x + y for positive reals, exact at float64 resolution."""
        a, b = (self, other) if not self.__lt__(other) else (other, self)
        # a >= b: a + b = a * (1 + b/a)
        ratio = b / a
        try:
            r = ratio.to_float()
        except OverflowError:
            return a
        if r < 1e-17:
            return a
        return a * LogReal.from_float(1.0 + r)

    def sub(self, other: "LogReal") -> "LogReal":
        """x - y for positive reals with x > y, exact at float64 resolution."""
        if not other.__lt__(self):
            raise ValueError("sub requires the left operand to be larger")
        ratio = other / self
        try:
            r = ratio.to_float()
        except OverflowError:
            return self
        if r < 1e-17:
            return self
        return self * LogReal.from_float(1.0 - r)

    # -- ordering -------------------------------------------------------

    def __lt__(self, other: "LogReal") -> bool:
        s1, k1, v1 = self.lnsign, self.lndepth, self.lnmag
        s2, k2, v2 = other.lnsign, other.lndepth, other.lnmag
        if s1 != s2:
            return s1 < s2
        if s1 == 0:
            return False
        if k1 != k2:
            return (k1 < k2) if s1 > 0 else (k1 > k2)
        return (v1 < v2) if s1 > 0 else (v1 > v2)

    def close_to(self, other: "LogReal", rel: float = 1e-12) -> bool:
        """Relative agreement of the leveled representations."""
        if self.lnsign != other.lnsign or self.lndepth != other.lndepth:
            return False
        if self.lnsign == 0:
            return True
        return abs(self.lnmag - other.lnmag) \
            <= rel * max(abs(self.lnmag), abs(other.lnmag), 1.0)


def _signed_add(s1: int, m1: LogReal, s2: int, m2: LogReal) -> tuple[int, LogReal]:
    """s1*m1 + s2*m2 for signed magnitudes carried as LogReal values."""
    zero = LogReal(0, 0, 0.0)
    if s1 == 0:
        return (s2, m2)
    if s2 == 0:
        return (s1, m1)
    try:
        t = s1 * m1.to_float() + s2 * m2.to_float()
        if t == 0.0:
            return (0, zero)
        if math.isfinite(t):
            return (1 if t > 0 else -1, LogReal.from_float(abs(t)))
    except OverflowError:
        pass
    if m2.__lt__(m1) or (not m1.__lt__(m2) and s1 == s2):
        big_s, big, small, small_s = s1, m1, m2, s2
    else:
        big_s, big, small, small_s = s2, m2, m1, s1
    ratio = small / big
    try:
        r = ratio.to_float()
    except OverflowError:
        return (big_s, big)
    if r < 1e-17:
        return (big_s, big)
    if big_s == small_s:
        return (big_s, big * LogReal.from_float(1.0 + r))
    if r == 1.0:
        return (0, zero)
    return (big_s, big * LogReal.from_float(1.0 - r))


ONE = LogReal(0, 0, 0.0)


def logreal(x: float) -> LogReal:
    return LogReal.from_float(x)
