"""Exact calculators for the explicit point-count bounds and thresholds.

Irrational quantities (square roots, d^{13/3}) are enclosed between two
rationals obtained from integer roots with directed rounding after scaling
by ``SCALE``.  Predicates built on top of them are three-valued so that
rounding can never flip a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import PreconditionError
from .field import prime_power

SCALE = 10**18

YES, NO, BOUNDARY = "yes", "no", "boundary"


def icbrt(n: int) -> int:
    """Floor of the real cube root of a non-negative integer."""
    if n < 0:
        raise ValueError("negative argument")
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + 2) // 3)
    while True:
        y = (2 * x + n // (x * x)) // 3
        if y >= x:
            break
        x = y
    while x**3 > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


@dataclass(frozen=True)
class Enclosure:
    """Rational interval [lower, upper] containing an exact real value."""

    lower: Fraction
    upper: Fraction

    @property
    def value(self) -> float:
        return float((self.lower + self.upper) / 2)

    def __add__(self, other):
        if isinstance(other, Enclosure):
            return Enclosure(self.lower + other.lower, self.upper + other.upper)
        return Enclosure(self.lower + other, self.upper + other)

    __radd__ = __add__

    def scale(self, c) -> Enclosure:
        """Multiply by a non-negative rational."""
        if c < 0:
            raise ValueError("scale factor must be non-negative")
        return Enclosure(self.lower * c, self.upper * c)

    def relative_width(self) -> float:
        if self.upper == 0:
            return 0.0
        return float((self.upper - self.lower) / abs(self.upper))

    def to_dict(self):
        return {"lower": str(self.lower), "upper": str(self.upper), "approx": self.value}


def exact(x) -> Enclosure:
    x = Fraction(x)
    return Enclosure(x, x)


def sqrt_enclosure(x) -> Enclosure:
    """Enclosure of the square root of a non-negative rational."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative argument")
    lo_n = x.numerator * SCALE**2 // x.denominator
    hi_n = -(-x.numerator * SCALE**2 // x.denominator)
    lo = math.isqrt(lo_n)
    hi = math.isqrt(hi_n)
    if hi * hi < hi_n:
        hi += 1
    return Enclosure(Fraction(lo, SCALE), Fraction(hi, SCALE))


@lru_cache(maxsize=None)
def d_13_3(d: int) -> Enclosure:
    """Enclosure of d^{13/3} as the real cube root of d^13."""
    n = d**13 * SCALE**3
    lo = icbrt(n)
    hi = lo if lo**3 == n else lo + 1
    return Enclosure(Fraction(lo, SCALE), Fraction(hi, SCALE))


def _check_de(d: int, e: int = 0):
    if not isinstance(d, int) or d < 1:
        raise PreconditionError(f"degree d must be an integer >= 1, got {d}")
    if not isinstance(e, int) or e < 0:
        raise PreconditionError(f"degree e must be an integer >= 0, got {e}")


@lru_cache(maxsize=None)
def _is_prime_power(q: int) -> bool:
    return prime_power(q) is not None


def _check_q(q: int):
    if not isinstance(q, int) or not _is_prime_power(q):
        raise PreconditionError(f"q must be a prime power, got {q}")


def alpha(d: int) -> int:
    return (d - 1) * (d - 2)


def beta(d: int, e: int) -> Enclosure:
    """5 d^{13/3} + d(d + e - 1)."""
    _check_de(d, e)
    return d_13_3(d).scale(5) + d * (d + e - 1)


def thm2_threshold(d: int, e: int) -> Enclosure:
    """(alpha + sqrt(alpha^2 + 4 beta))^2 / 4, enclosed."""
    a = alpha(d)
    b = beta(d, e)
    lo = (a + sqrt_enclosure(a * a + 4 * b.lower).lower) ** 2 / 4
    hi = (a + sqrt_enclosure(a * a + 4 * b.upper).upper) ** 2 / 4
    return Enclosure(lo, hi)


@lru_cache(maxsize=None)
def _beta_numerators(d: int, e: int) -> tuple[int, int]:
    """Integers (lo, hi) with lo/SCALE <= beta <= hi/SCALE."""
    b = beta(d, e)
    return (b.lower * SCALE).__floor__(), (b.upper * SCALE).__ceil__()


def thm2_satisfied(q: int, d: int, e: int) -> str:
    """Decide q > (alpha + sqrt(alpha^2 + 4 beta))^2 / 4 exactly.

    Equivalent to q - alpha sqrt(q) - beta > 0, i.e. q - beta > 0 and
    (q - beta)^2 > alpha^2 q.  The test is run with the upper and the lower
    end of the enclosure of beta; "boundary" is returned only when they
    disagree.
    """
    _check_de(d, e)
    _check_q(q)
    a2 = alpha(d) ** 2
    lo, hi = _beta_numerators(d, e)

    def holds(num):
        gap = q * SCALE - num
        return gap > 0 and gap * gap > a2 * q * SCALE * SCALE

    if holds(hi):
        return YES
    if not holds(lo):
        return NO
    return BOUNDARY


def thm3_threshold(d: int) -> Fraction:
    """(3d^4 - 4d^3 + 5d^2) / 2."""
    if not isinstance(d, int) or d < 1:
        raise PreconditionError(f"degree d must be an integer >= 1, got {d}")
    return Fraction(3 * d**4 - 4 * d**3 + 5 * d**2, 2)


def thm3_satisfied(q: int, d: int) -> bool:
    _check_q(q)
    return q > thm3_threshold(d)


def _q_half_power(q: int, exponent_times_two: int) -> Enclosure:
    """q^{m/2} for integer m, enclosed."""
    whole, half = divmod(exponent_times_two, 2)
    base = Fraction(q) ** whole
    if not half:
        return exact(base)
    return sqrt_enclosure(q).scale(base)


def lang_weil_rhs(d: int, r: int, q: int, C) -> Enclosure:
    """(d-1)(d-2) q^{r-1/2} + C q^{r-1}."""
    _check_de(d)
    return _q_half_power(q, 2 * r - 1).scale(alpha(d)) + Fraction(C) * Fraction(q) ** (r - 1)


def cafure_matera_rhs(d: int, n: int, q: int) -> Enclosure:
    """(d-1)(d-2) q^{n-3/2} + 5 d^{13/3} q^{n-2}."""
    _check_de(d)
    first = _q_half_power(q, 2 * n - 3).scale(alpha(d))
    return first + d_13_3(d).scale(5 * Fraction(q) ** (n - 2))


def schmidt_constant(d: int) -> int:
    """6 d^2 k^{2^k} with k = d(d+1)/2, as an exact integer."""
    _check_de(d)
    k = d * (d + 1) // 2
    return 6 * d * d * k ** (2**k)


def schmidt_rhs(d: int, n: int, q: int) -> Enclosure:
    """Lang-Weil right-hand side for a hypersurface with Schmidt's constant."""
    return lang_weil_rhs(d, n - 1, q, schmidt_constant(d))


def leep_yeomans_lower(d: int, q: int) -> int:
    """q + 1 - (d-1)(d-2)/2 * floor(2 sqrt q), with floor(2 sqrt q) = isqrt(4q)."""
    _check_de(d)
    _check_q(q)
    return q + 1 - (alpha(d) // 2) * math.isqrt(4 * q)


def bezout_rhs(d1: int, d2: int) -> int:
    return d1 * d2


def hypersurface_upper(d: int, n: int, q: int) -> int:
    """d q^{n-1}: the affine point bound for a degree-d hypersurface in F_q^n."""
    return d * q ** (n - 1)


def intersection_upper(d1: int, d2: int, n: int, q: int) -> int:
    """d1 d2 q^{n-2}: affine points on two hypersurfaces without a common factor."""
    return bezout_rhs(d1, d2) * q ** (n - 2)


def singular_upper(d: int, n: int, q: int) -> int:
    """d(d-1) q^{n-2}: the bound on singular affine zeros of an absolutely irreducible form."""
    return intersection_upper(d, d - 1, n, q)


def _jsonable(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return x


@dataclass
class ThresholdReport:
    d: int
    e: int
    alpha: int
    beta: Enclosure
    thm2_threshold: Enclosure
    thm3_threshold: Fraction

    def to_dict(self):
        return {"d": self.d, "e": self.e, "alpha": self.alpha,
                "beta": self.beta.to_dict(),
                "thm2_threshold": self.thm2_threshold.to_dict(),
                "thm3_threshold": _jsonable(self.thm3_threshold)}


def threshold_report(d: int, e: int = 0) -> ThresholdReport:
    return ThresholdReport(d, e, alpha(d), beta(d, e), thm2_threshold(d, e), thm3_threshold(d))


@dataclass
class DeviationReport:
    measured: int
    cafure_matera_rhs: Enclosure
    schmidt_rhs: Enclosure

    @property
    def within_cafure_matera(self) -> bool:
        return self.measured <= self.cafure_matera_rhs.upper

    def to_dict(self):
        # schmidt's constant is astronomically large; only its magnitude is reported
        return {"measured": self.measured,
                "cafure_matera_rhs": self.cafure_matera_rhs.to_dict(),
                "schmidt_rhs_log10": round(math.log10(self.schmidt_rhs.upper.numerator)
                                           - math.log10(self.schmidt_rhs.upper.denominator), 6),
                "within_cafure_matera": self.within_cafure_matera}


def deviation_report(N_affine: int, d: int, n: int, q: int) -> DeviationReport:
    return DeviationReport(abs(N_affine - q ** (n - 1)), cafure_matera_rhs(d, n, q), schmidt_rhs(d, n, q))
