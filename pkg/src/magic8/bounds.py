"""Provable majorants for the coefficient tails of every evaluated series.

Each named series F used by the evaluator is a finite arithmetic combination
of theta fourth powers, Eisenstein series, and 1/Delta.  For those atoms
there are classical closed-form bounds on absolute coefficient sums:

* theta:       sum |c_m| x^m <= 1 + 2x + 2x^4/(1-x);
* E_k:         sigma_1(n) <= n^2, sigma_3(n) <= zeta(3) n^3 <= 1.21 n^3,
               sigma_5(n) <= zeta(5) n^5 <= 1.04 n^5, with the Eulerian
               closed forms for sum n^s y^n;
* 1/Delta:     positive coefficients, so the sum is the Euler product
               x^-2 prod (1-x^2k)^-24, bounded by a finite product times an
               enclosed exponential remainder.

Majorants compose through sums and products (Cauchy), giving for every
series a verified bound M_F(x) >= sum_m |c_m| x^m on 0 < x < 1.  The unknown
coefficient tail beyond the truncation window is then controlled by

    sum_{m >= M} |c_m| x0^m  <=  (x0/x1)^M * M_F(x1)      for x0 < x1 < 1,

with the fixed comparison point x1 = 1/2; every evaluation point in the
package satisfies x0 < 0.32.  The certification report records the bound
actually used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .ball import RealBall, ball, eval_terms, coeff_balls, symmetric
from .qseries import BigRational, QSeries, rat

#: comparison point for geometric tail domination
X1 = rat(1, 2)


class Majorant:
    """Upper bound for sum_m |c_m| x^m of a series, valid on 0 < x < 1."""

    def value(self, x: RealBall) -> RealBall:
        raise NotImplementedError

    def __add__(self, other: "Majorant") -> "Majorant":
        return MajSum(self, other)

    def __mul__(self, other: "Majorant") -> "Majorant":
        return MajProd(self, other)


@dataclass(frozen=True)
class MajConst(Majorant):
    c: BigRational

    def value(self, x: RealBall) -> RealBall:
        return ball(abs(rat(self.c)), x.prec)


@dataclass(frozen=True)
class MajSum(Majorant):
    a: Majorant
    b: Majorant

    def value(self, x: RealBall) -> RealBall:
        return self.a.value(x) + self.b.value(x)


@dataclass(frozen=True)
class MajProd(Majorant):
    a: Majorant
    b: Majorant

    def value(self, x: RealBall) -> RealBall:
        return self.a.value(x) * self.b.value(x)


@dataclass(frozen=True)
class MajScale(Majorant):
    c: BigRational
    a: Majorant

    def value(self, x: RealBall) -> RealBall:
        return ball(abs(rat(self.c)), x.prec) * self.a.value(x)


@dataclass(frozen=True)
class MajPow(Majorant):
    a: Majorant
    n: int

    def value(self, x: RealBall) -> RealBall:
        return self.a.value(x) ** self.n


@dataclass(frozen=True)
class MajShift(Majorant):
    """x^j times another majorant (series multiplied by q^(j/2))."""
    j: int
    a: Majorant

    def value(self, x: RealBall) -> RealBall:
        return (x ** self.j) * self.a.value(x)


@dataclass(frozen=True)
class MajTheta(Majorant):
    def value(self, x: RealBall) -> RealBall:
        _check_unit(x)
        one = ball(1, x.prec)
        return one + 2 * x + 2 * (x ** 4) / (one - x)


def _eulerian_sum(s: int, y: RealBall) -> RealBall:
    """Closed form of sum_{n>=1} n^s y^n for s in {2, 3, 5}, 0 < y < 1."""
    one = ball(1, y.prec)
    if s == 2:
        return y * (one + y) / (one - y) ** 3
    if s == 3:
        return y * (one + 4 * y + y ** 2) / (one - y) ** 4
    if s == 5:
        return (y * (one + 26 * y + 66 * y ** 2 + 26 * y ** 3 + y ** 4)
                / (one - y) ** 6)
    raise ValueError(f"no Eulerian closed form wired for s={s}")


#: (multiplier bound, power) per Eisenstein weight: |coef(n)| <= mult * n^pow.
#: 1.21 >= zeta(3) and 1.04 >= zeta(5); sigma_1(n) <= n^2 directly.
_EIS_BOUNDS = {2: (rat(24), 2), 4: (rat(240) * rat(121, 100), 3),
               6: (rat(504) * rat(104, 100), 5)}


@dataclass(frozen=True)
class MajEisenstein(Majorant):
    k: int

    def value(self, x: RealBall) -> RealBall:
        _check_unit(x)
        mult, s = _EIS_BOUNDS[self.k]
        y = x * x  # integer q-powers sit on even indices
        return ball(1, x.prec) + ball(mult, x.prec) * _eulerian_sum(s, y)


@dataclass(frozen=True)
class MajInvDelta(Majorant):
    """x^-2 prod_k (1-x^2k)^-24; positive coefficients make this exact-in-spirit."""

    factors: int = 16

    def value(self, x: RealBall) -> RealBall:
        _check_unit(x)
        one = ball(1, x.prec)
        y = x * x
        prod = one
        yk = one
        for _ in range(self.factors):
            yk = yk * y
            prod = prod / (one - yk) ** 24
        # remaining factors: -24 sum_{k>K} log(1-y^k) <= 24 T with
        # T = y^{K+1} / ((1-y)(1-y^{K+1}))
        ynext = yk * y
        t = ynext / ((one - y) * (one - ynext))
        return prod * (24 * t).exp() / y


def _check_unit(x: RealBall) -> None:
    if not x.is_finite() or x.upper >= 1 or x.lower < 0:
        raise ValueError(f"majorant needs 0 <= x < 1, got {x!r}")


def majorant_of_uwpoly(terms: Dict[Tuple[int, int], BigRational]) -> Majorant:
    """sum |c_ab| * MajTheta^(4(a+b)) bounds any polynomial in U and W."""
    total = rat(0)
    deg = 0
    for (a, b), c in terms.items():
        total += abs(rat(c))
        deg = a + b
    return MajScale(total, MajPow(MajTheta(), 4 * deg))


# ----------------------------------------------------------------------
# series bundled with their majorants

@dataclass(eq=False)
class FormSeries:
    """An exact series plus a verified absolute-coefficient majorant."""

    label: str
    series: QSeries
    majorant: Majorant
    _cache: dict = field(default_factory=dict, repr=False)

    def _terms(self, prec: int):
        key = ("t", prec)
        if key not in self._cache:
            self._cache[key] = coeff_balls(list(self.series.coeffs.items()), prec)
        return self._cache[key]

    def _abs_terms(self, prec: int):
        key = ("a", prec)
        if key not in self._cache:
            self._cache[key] = coeff_balls(
                [(m, abs(c)) for m, c in self.series.coeffs.items()], prec)
        return self._cache[key]

    def tail_bound(self, x: RealBall) -> RealBall:
        """Upper bound of sum_{m >= trunc_index} |c_m| x^m (needs x < 1/2)."""
        prec = x.prec
        x1 = ball(X1, prec)
        if not (x.upper < 0.5 and x.lower >= 0):
            raise ValueError(f"tail bound requires 0 <= x < 1/2, got {x!r}")
        m = self.series.trunc_index
        return (x / x1) ** m * self.majorant.value(x1)

    def eval_ball(self, x: RealBall, lo_cut: Optional[int] = None) -> RealBall:
        """Enclosure of sum over *all* m >= lo_cut of c_m x^m at 0 < x < 1/2.

        Stored coefficients are summed exactly; the unknown tail enters as a
        symmetric enclosure from :meth:`tail_bound`.
        """
        main = eval_terms(self._terms(x.prec), x, lo_cut=lo_cut)
        return main.widen_abs(self.tail_bound(x))

    def abs_upper(self, x: RealBall, lo_cut: Optional[int] = None) -> RealBall:
        """Upper bound of sum_{m >= lo_cut} |c_m| x^m, tail included."""
        main = eval_terms(self._abs_terms(x.prec), x, lo_cut=lo_cut)
        return main + self.tail_bound(x)
