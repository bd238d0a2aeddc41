"""Truncated Laurent series in q^(1/2) with exact rational coefficients.

Every form in the toolkit lives on a single half-integer exponent lattice:
the integer index m encodes the monomial q^(m/2), with q = e^(2*pi*i*z), so
q^(1/2) = e^(pi*i*z).  Series with only integer powers of q simply occupy the
even indices.  Coefficients are exact arbitrary-precision rationals, zero
coefficients are never stored, and every series carries an explicit
truncation index: coefficients at index >= trunc_index are *unknown*, not
zero.  Truncation windows propagate pessimistically through arithmetic, so
any reported coefficient is exact.
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

try:
    from gmpy2 import mpq as BigRational
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as BigRational

#: Default truncation index (through q^120), leaving generous guard terms for
#: every certification in the package.  Overridable everywhere via `order`.
DEFAULT_ORDER = 240

RationalLike = Union[int, BigRational]


def rat(p: RationalLike, q: RationalLike = 1) -> BigRational:
    """Exact rational constructor (normalized, positive denominator)."""
    return BigRational(p, q)


def rat_str(c: BigRational) -> str:
    """Render a rational as 'num/den' (den always present)."""
    c = rat(c)
    return f"{c.numerator}/{c.denominator}"


class ZeroSeriesError(ValueError):
    """Inversion of a series with no nonzero coefficient in its window."""


class InsufficientOrderError(ValueError):
    """The operand's truncation window cannot justify the requested order."""


class TruncationError(KeyError):
    """A coefficient beyond the truncation window was requested."""


class QSeries:
    """Immutable truncated Laurent series on the q^(1/2) index lattice."""

    __slots__ = ("coeffs", "min_index", "trunc_index")

    def __init__(self, coeffs: Mapping[int, RationalLike], min_index: int,
                 trunc_index: int):
        if min_index > trunc_index:
            raise ValueError(f"min_index {min_index} > trunc_index {trunc_index}")
        clean: Dict[int, BigRational] = {}
        for m, c in coeffs.items():
            c = rat(c)
            if c == 0:
                continue
            if not (min_index <= m < trunc_index):
                raise ValueError(
                    f"coefficient index {m} outside window "
                    f"[{min_index}, {trunc_index})")
            clean[m] = c
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "min_index", min_index)
        object.__setattr__(self, "trunc_index", trunc_index)

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, trunc_index: int = DEFAULT_ORDER, min_index: int = 0) -> "QSeries":
        return cls({}, min_index, trunc_index)

    @classmethod
    def one(cls, trunc_index: int = DEFAULT_ORDER) -> "QSeries":
        return cls({0: 1}, 0, trunc_index)

    @classmethod
    def monomial(cls, m: int, c: RationalLike = 1,
                 trunc_index: int = DEFAULT_ORDER) -> "QSeries":
        return cls({m: c}, min(m, 0), trunc_index)

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[int, RationalLike]],
                   trunc_index: int = DEFAULT_ORDER) -> "QSeries":
        d: Dict[int, BigRational] = {}
        for m, c in terms:
            d[m] = d.get(m, rat(0)) + rat(c)
        mi = min((m for m in d), default=0)
        return cls(d, min(mi, 0), trunc_index)

    # ------------------------------------------------------------------
    # inspection

    def coefficient(self, m: int) -> BigRational:
        """Exact coefficient at index m; raises beyond the known window."""
        if m >= self.trunc_index:
            raise TruncationError(
                f"index {m} is at or beyond trunc_index {self.trunc_index}")
        return self.coeffs.get(m, rat(0))

    def lowest_term(self) -> Tuple[int, BigRational]:
        """(index, coefficient) of the lowest nonzero stored term."""
        if not self.coeffs:
            raise ZeroSeriesError("series has no nonzero coefficient in window")
        m = min(self.coeffs)
        return m, self.coeffs[m]

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self) -> Iterator[Tuple[int, BigRational]]:
        return iter(sorted(self.coeffs.items()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self.coeffs == other.coeffs
                and self.min_index == other.min_index
                and self.trunc_index == other.trunc_index)

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.min_index,
                     self.trunc_index))

    def agrees_with(self, other: "QSeries") -> bool:
        """Structural equality on the common certified window."""
        t = min(self.trunc_index, other.trunc_index)
        lo = min(self.min_index, other.min_index)
        return all(self.coeffs.get(m, 0) == other.coeffs.get(m, 0)
                   for m in range(lo, t))

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"QSeries(0; O(q^{self.trunc_index}/2))"
        parts = []
        for m, c in sorted(self.coeffs.items())[:8]:
            parts.append(f"{c}*q^({m}/2)")
        tail = " + ..." if len(self.coeffs) > 8 else ""
        return "QSeries(" + " + ".join(parts) + tail + ")"

    # ------------------------------------------------------------------
    # ring operations

    def _addsub(self, other: "QSeries", sign: int) -> "QSeries":
        trunc = min(self.trunc_index, other.trunc_index)
        mi = min(self.min_index, other.min_index)
        out = {m: c for m, c in self.coeffs.items() if m < trunc}
        for m, c in other.coeffs.items():
            if m >= trunc:
                continue
            s = out.get(m, rat(0)) + sign * c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return QSeries(out, mi, trunc)

    def __add__(self, other: "QSeries") -> "QSeries":
        return self._addsub(other, 1)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self._addsub(other, -1)

    def __neg__(self) -> "QSeries":
        return QSeries({m: -c for m, c in self.coeffs.items()},
                       self.min_index, self.trunc_index)

    def scale(self, c: RationalLike) -> "QSeries":
        c = rat(c)
        if c == 0:
            return QSeries({}, self.min_index, self.trunc_index)
        return QSeries({m: c * v for m, v in self.coeffs.items()},
                       self.min_index, self.trunc_index)

    def __mul__(self, other: "QSeries") -> "QSeries":
        # Tightest truncation justified by the operands: a coefficient of the
        # product at index m is certain only if every cross-term contributing
        # to it is certain.
        trunc = min(self.min_index + other.trunc_index,
                    self.trunc_index + other.min_index)
        mi = self.min_index + other.min_index
        out: Dict[int, BigRational] = {}
        for ma, ca in self.coeffs.items():
            for mb, cb in other.coeffs.items():
                m = ma + mb
                if m >= trunc:
                    continue
                s = out.get(m)
                out[m] = ca * cb if s is None else s + ca * cb
        return QSeries({m: c for m, c in out.items() if c != 0}, mi, trunc)

    def pow(self, n: int) -> "QSeries":
        if n < 0:
            raise ValueError("use invert() for negative powers")
        if n == 0:
            return QSeries.one(self.trunc_index)
        acc = None
        base = self
        while n:
            if n & 1:
                acc = base if acc is None else acc * base
            n >>= 1
            if n:
                base = base * base
        return acc

    __pow__ = pow

    # ------------------------------------------------------------------
    # the two structural operations

    def shift_T(self) -> "QSeries":
        """Substitution z -> z+1: the coefficient at index m picks up (-1)^m."""
        return QSeries({m: (c if m % 2 == 0 else -c)
                        for m, c in self.coeffs.items()},
                       self.min_index, self.trunc_index)

    def invert(self, order: int = DEFAULT_ORDER) -> "QSeries":
        """Multiplicative inverse, certified through index `order`.

        The product self * self.invert(order) equals 1 on every index below
        `order`.  Requires the leading nonzero coefficient to be inside the
        window and enough known coefficients to justify the result.
        """
        v, lead = self.lowest_term()
        # Coefficient j of the inverse (relative to its leading index -v)
        # consumes self's coefficients through index v + j; the top relative
        # index is order - 1 + v, hence the window requirement below.
        if self.trunc_index < order + v:
            raise InsufficientOrderError(
                f"trunc_index {self.trunc_index} cannot justify inverse "
                f"through index {order} (need >= {order + v})")
        nrel = order + v  # number of relative coefficients b_0 .. b_{nrel-1}
        a = [self.coeffs.get(v + j, rat(0)) for j in range(nrel)]
        b = [rat(0)] * nrel
        b[0] = 1 / rat(lead)
        inv_lead = b[0]
        for j in range(1, nrel):
            s = rat(0)
            for i in range(1, j + 1):
                if a[i] and b[j - i]:
                    s += a[i] * b[j - i]
            if s != 0:
                b[j] = -inv_lead * s
        return QSeries({-v + j: b[j] for j in range(nrel) if b[j] != 0},
                       -v, order)

    # ------------------------------------------------------------------
    # serialization

    def to_csv_rows(self) -> Iterator[Tuple[int, int, int]]:
        for m, c in self.items():
            yield m, int(c.numerator), int(c.denominator)

    def to_json_dict(self) -> Dict[str, str]:
        return {str(m): rat_str(c) for m, c in self.items()}


# ----------------------------------------------------------------------
# operation-style entry points

def qs_arith(op: str, a: QSeries, b: QSeries) -> QSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def qs_invert(a: QSeries, order: int = DEFAULT_ORDER) -> QSeries:
    return a.invert(order)


def qs_shift_T(a: QSeries) -> QSeries:
    return a.shift_T()
