"""Arbitrary-precision real enclosures and verified entire functions.

A :class:`RealBall` represents a real number by a rigorous enclosure: the
true value lies between the lower and upper endpoints.  The implementation
is backed by mpmath's outward-rounded interval type; midpoint and radius are
derived views.  All transcendental evaluation in the package goes through
this module, so a returned ball always *contains* the mathematical value.

The module also provides verified evaluations of the entire functions that
appear when a sine prefactor cancels a Laplace-transform pole:

    sinc(w)   = sin(w)/w          sincsq(w) = (sin(w)/w)^2

and their derivatives, via alternating power series with explicit remainder
enclosures near zero and direct interval evaluation elsewhere.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence, Tuple, Union

from mpmath import iv, mp

from .qseries import BigRational, rat

DEFAULT_PREC = 192


class PrecisionExhaustedError(ArithmeticError):
    """A requested error bound cannot be met at the working precision."""


def _use(prec: int) -> None:
    iv.prec = prec


def _mpf_to_rat(x) -> BigRational:
    """Exact rational value of a finite mpf (dyadic, hence exact)."""
    sign, man, exp, _ = x._mpf_
    if man == 0 and exp != 0:
        raise OverflowError("non-finite endpoint")
    v = rat(int(man))
    if exp >= 0:
        v = v * (1 << exp)
    else:
        v = v / (1 << -exp)
    return -v if sign else v


Number = Union[int, BigRational, "RealBall"]


class RealBall:
    """Enclosure of a real number: midpoint-radius view over interval endpoints."""

    __slots__ = ("val", "prec")

    def __init__(self, val, prec: int):
        object.__setattr__(self, "val", val)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("RealBall is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_int(cls, n: int, prec: int = DEFAULT_PREC) -> "RealBall":
        _use(prec)
        return cls(iv.mpf(n), prec)

    @classmethod
    def from_rational(cls, q, prec: int = DEFAULT_PREC) -> "RealBall":
        q = rat(q)
        _use(prec)
        return cls(iv.mpf(int(q.numerator)) / iv.mpf(int(q.denominator)), prec)

    @classmethod
    def from_endpoints(cls, lo, hi, prec: int = DEFAULT_PREC) -> "RealBall":
        _use(prec)
        return cls(iv.mpf([lo, hi]), prec)

    @classmethod
    def zero(cls, prec: int = DEFAULT_PREC) -> "RealBall":
        return cls.from_int(0, prec)

    @classmethod
    def pi(cls, prec: int = DEFAULT_PREC) -> "RealBall":
        _use(prec)
        return cls(+iv.pi, prec)

    # -- coercion ---------------------------------------------------------

    def _lift(self, other: Number) -> "RealBall":
        if isinstance(other, RealBall):
            return other
        if isinstance(other, int):
            return RealBall.from_int(other, self.prec)
        return RealBall.from_rational(other, self.prec)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: Number) -> "RealBall":
        o = self._lift(other)
        p = max(self.prec, o.prec)
        _use(p)
        return RealBall(self.val + o.val, p)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "RealBall":
        o = self._lift(other)
        p = max(self.prec, o.prec)
        _use(p)
        return RealBall(self.val - o.val, p)

    def __rsub__(self, other: Number) -> "RealBall":
        return self._lift(other) - self

    def __mul__(self, other: Number) -> "RealBall":
        o = self._lift(other)
        p = max(self.prec, o.prec)
        _use(p)
        return RealBall(self.val * o.val, p)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "RealBall":
        o = self._lift(other)
        p = max(self.prec, o.prec)
        _use(p)
        return RealBall(self.val / o.val, p)

    def __rtruediv__(self, other: Number) -> "RealBall":
        return self._lift(other) / self

    def __neg__(self) -> "RealBall":
        _use(self.prec)
        return RealBall(-self.val, self.prec)

    def __abs__(self) -> "RealBall":
        _use(self.prec)
        return RealBall(abs(self.val), self.prec)

    def __pow__(self, n: int) -> "RealBall":
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        _use(self.prec)
        return RealBall(self.val ** n, self.prec)

    # -- elementary functions ----------------------------------------------

    def exp(self) -> "RealBall":
        _use(self.prec)
        return RealBall(iv.exp(self.val), self.prec)

    def log(self) -> "RealBall":
        _use(self.prec)
        return RealBall(iv.log(self.val), self.prec)

    def sqrt(self) -> "RealBall":
        _use(self.prec)
        return RealBall(iv.sqrt(self.val), self.prec)

    def sin(self) -> "RealBall":
        _use(self.prec)
        return RealBall(iv.sin(self.val), self.prec)

    def cos(self) -> "RealBall":
        _use(self.prec)
        return RealBall(iv.cos(self.val), self.prec)

    # -- geometry -----------------------------------------------------------

    @property
    def lower(self):
        return mp.make_mpf(self.val._mpi_[0])

    @property
    def upper(self):
        return mp.make_mpf(self.val._mpi_[1])

    @property
    def midpoint(self):
        old = mp.prec
        mp.prec = self.prec
        try:
            return (self.lower + self.upper) / 2
        finally:
            mp.prec = old

    @property
    def radius(self):
        old = mp.prec
        mp.prec = self.prec
        try:
            mid = (self.lower + self.upper) / 2
            # outward-rounded half-width so [mid-rad, mid+rad] covers val
            return max(mp.fsub(self.upper, mid, rounding="u"),
                       mp.fsub(mid, self.lower, rounding="u"))
        finally:
            mp.prec = old

    def hull(self, other: "RealBall") -> "RealBall":
        p = max(self.prec, other.prec)
        _use(p)
        lo = min(self.lower, other.lower)
        hi = max(self.upper, other.upper)
        return RealBall(iv.mpf([lo, hi]), p)

    def widen_abs(self, bound: "RealBall") -> "RealBall":
        """Enlarge by +-bound.upper (bound must be a nonnegative enclosure)."""
        _use(max(self.prec, bound.prec))
        b = bound.upper
        if b < 0:
            raise ValueError("widen_abs needs a nonnegative bound")
        return RealBall(self.val + iv.mpf([-b, b]), self.prec)

    # -- predicates -----------------------------------------------------------

    def is_finite(self) -> bool:
        lo, hi = self.lower, self.upper
        return (-mp.inf < lo) and (hi < mp.inf)

    def contains_zero(self) -> bool:
        return self.lower <= 0 <= self.upper

    def is_positive(self) -> bool:
        return self.lower > 0

    def is_negative(self) -> bool:
        return self.upper < 0

    def contains_rational(self, q) -> bool:
        q = rat(q)
        return _mpf_to_rat(self.lower) <= q <= _mpf_to_rat(self.upper)

    def within_abs(self, eps) -> bool:
        """True iff the enclosure is contained in [-eps, +eps]."""
        eps = rat(eps) if not isinstance(eps, BigRational) else eps
        return (-eps <= _mpf_to_rat(self.lower)
                and _mpf_to_rat(self.upper) <= eps)

    def within_of(self, target, eps) -> bool:
        """True iff the enclosure is contained in [target-eps, target+eps]."""
        return (self - RealBall.from_rational(rat(target), self.prec)).within_abs(eps)

    def mag(self):
        """Upper bound of |x| over the enclosure (an mpf)."""
        return max(abs(self.lower), abs(self.upper))

    def mig(self):
        """Lower bound of |x| over the enclosure (an mpf, 0 if 0 is inside)."""
        if self.contains_zero():
            return mp.mpf(0)
        return min(abs(self.lower), abs(self.upper))

    # -- formatting --------------------------------------------------------

    def str_midrad(self, digits: int = None) -> str:
        digits = digits if digits is not None else max(6, int(self.prec * 0.30103) - 2)
        old = mp.prec
        mp.prec = self.prec + 16
        try:
            return f"{mp.nstr(self.midpoint, digits)} +/- {mp.nstr(self.radius, 3)}"
        finally:
            mp.prec = old

    def __repr__(self) -> str:
        return f"RealBall({self.str_midrad(12)}; prec={self.prec})"


# -------------------------------------------------------------------------
# helpers

def ball(x, prec: int = DEFAULT_PREC) -> RealBall:
    if isinstance(x, RealBall):
        return x
    if isinstance(x, int):
        return RealBall.from_int(x, prec)
    return RealBall.from_rational(x, prec)


def pi_pow(e: int, prec: int) -> RealBall:
    p = RealBall.pi(prec)
    return p ** e


def ball_sum(items: Iterable[RealBall], prec: int) -> RealBall:
    _use(prec)
    acc = iv.mpf(0)
    for it in items:
        acc = acc + it.val
    return RealBall(acc, prec)


def symmetric(bound: RealBall) -> RealBall:
    """The interval [-b, b] for b = bound.upper (nonnegative enclosures)."""
    b = bound.upper
    if b < 0:
        raise ValueError("symmetric() needs a nonnegative bound")
    _use(bound.prec)
    return RealBall(iv.mpf([-b, b]), bound.prec)


# -------------------------------------------------------------------------
# exact-coefficient series evaluation

def coeff_balls(items: Sequence[Tuple[int, BigRational]], prec: int):
    """Convert (index, rational) pairs to interval coefficients, descending."""
    _use(prec)
    out = []
    for m, c in sorted(items, reverse=True):
        c = rat(c)
        out.append((m, iv.mpf(int(c.numerator)) / iv.mpf(int(c.denominator))))
    return tuple(out)


def eval_terms(terms, x: RealBall, lo_cut: int = None) -> RealBall:
    """sum of c_m * x^m over prepared descending terms (x must be positive).

    Horner over the sparse index lattice; negative indices come out as the
    trailing power.  `lo_cut` drops indices below it (used to strip heads).
    """
    prec = x.prec
    _use(prec)
    xv = x.val
    acc = iv.mpf(0)
    prev = None
    last_m = None
    for m, cv in terms:
        if lo_cut is not None and m < lo_cut:
            break
        if prev is None:
            acc = cv
        else:
            gap = prev - m
            acc = acc * (xv ** gap) + cv
        prev = m
        last_m = m
    if last_m is None:
        return RealBall(iv.mpf(0), prec)
    if last_m:
        acc = acc * (xv ** last_m)
    return RealBall(acc, prec)


# -------------------------------------------------------------------------
# verified entire functions (power series with enclosed remainders)

def _alternating_sum(first_term, ratio_fn, w2, prec: int,
                     max_terms: int = 400) -> RealBall:
    """sum of t_j where t_{j+1} = t_j * ratio_fn(j) * w2, |ratio| * |w2| < 1.

    Terms must alternate in sign with strictly decreasing magnitude; the
    remainder after truncation is then enclosed by [0, next term].
    """
    _use(prec)
    acc = first_term
    t = first_term
    for j in range(max_terms):
        t = t * ratio_fn(j) * w2
        if mp.make_mpf(abs(t)._mpi_[1]) < mp.ldexp(1, -prec - 8):
            # remainder enclosed by the hull with the next (tiny) term
            lo = min(0, mp.make_mpf(t._mpi_[0]))
            hi = max(0, mp.make_mpf(t._mpi_[1]))
            return RealBall(acc + iv.mpf([lo, hi]), prec)
        acc = acc + t
    raise PrecisionExhaustedError("alternating series did not converge")


_SERIES_SWITCH = rat(5, 4)  # |w| below this uses the power series


def _near_zero(w: RealBall) -> bool:
    return w.mag() <= mp.mpf(1.25)


def sinc_ball(w: RealBall) -> RealBall:
    """sin(w)/w, entire."""
    prec = w.prec
    _use(prec)
    if not _near_zero(w):
        return w.sin() / w
    w2 = w.val * w.val
    one = iv.mpf(1)
    return _alternating_sum(one, lambda j: iv.mpf(-1) / ((2 * j + 2) * (2 * j + 3)),
                            w2, prec)


def sinc_prime_ball(w: RealBall) -> RealBall:
    """d/dw [sin(w)/w] = (w cos w - sin w)/w^2, entire."""
    prec = w.prec
    _use(prec)
    if not _near_zero(w):
        return (w.cos() * w - w.sin()) / (w * w)
    # series: sum_{j>=1} (-1)^j 2j w^{2j-1} / (2j+1)!
    first = iv.mpf(-1) * w.val / 3
    w2 = w.val * w.val

    def ratio(j):
        jj = j + 1  # current term index is jj, next is jj+1
        return iv.mpf(-(jj + 1)) / (jj * (2 * jj + 2) * (2 * jj + 3))
    return _alternating_sum(first, ratio, w2, prec)


def sincsq_ball(w: RealBall) -> RealBall:
    """(sin(w)/w)^2 = sum_j (-1)^j 2^{2j+1} w^{2j} / (2j+2)!, entire."""
    prec = w.prec
    _use(prec)
    if not _near_zero(w):
        s = w.sin() / w
        return s * s
    one = iv.mpf(1)
    return _alternating_sum(one, lambda j: iv.mpf(-4) / ((2 * j + 3) * (2 * j + 4)),
                            w.val * w.val, prec)


def sincsq_prime_ball(w: RealBall) -> RealBall:
    """d/dw (sin w / w)^2 = sum_{j>=1} (-1)^j 2^{2j+1} (2j) w^{2j-1}/(2j+2)!."""
    prec = w.prec
    _use(prec)
    if not _near_zero(w):
        s = w.sin()
        c = w.cos()
        return 2 * s * (w * c - s) / (w ** 3)
    first = iv.mpf(-2) * w.val / 3
    w2 = w.val * w.val

    def ratio(j):
        jj = j + 1
        return iv.mpf(-4 * (jj + 1)) / (jj * (2 * jj + 3) * (2 * jj + 4))
    return _alternating_sum(first, ratio, w2, prec)
