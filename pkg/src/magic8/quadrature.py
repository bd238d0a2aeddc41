"""Rigorous Gauss-Legendre panels with analytic error bounds.

Nodes and weights are *verified* enclosures: approximate Legendre roots are
polished by Newton iteration in plain arbitrary-precision arithmetic, then
each root is certified by an interval sign change of P_n across a small
bracket, and the weight 2/((1-x^2) P_n'(x)^2) is evaluated on the bracket.
The quadrature sum over node balls therefore contains the true Gauss rule.

The truncation error uses the classical analyticity argument.  If f is
analytic inside the Bernstein ellipse E_rho (semi-axes (rho +- 1/rho)/2) for
the panel and |f| <= M there, its Chebyshev coefficients satisfy
|a_k| <= 2 M rho^-k.  An n-point Gauss rule integrates degree 2n-1 exactly
and has positive weights summing to the interval length, so

    |I[f] - Q_n[f]| <= 4 * max|f - p_{2n-1}| <= 8 M rho^(-2n) rho/(rho-1),

scaled by the panel half-width.  With the fixed rho = 2 used here the bound
is 16 M 4^(-n) h.  Callers supply M as a sup bound of |f| over the bounding
rectangle of the mapped ellipse, which the panel constructor provides.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

from mpmath import iv, mp

from .ball import RealBall, PrecisionExhaustedError, ball
from .qseries import rat

#: fixed ellipse parameter: semi-axes 5/4 and 3/4 around the panel
RHO = 2
_ALPHA = rat(5, 4)
_BETA = rat(3, 4)

#: node counts tried per panel, smallest sufficient wins
N_LADDER = (16, 32, 48, 64, 80, 96, 128, 160)


def _legendre_pair(n: int, x):
    """(P_n(x), P_{n-1}(x)) by the three-term recurrence; works on mpf or iv."""
    p0, p1 = x * 0 + 1, x
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    return p1, p0


_rules: dict = {}


def gauss_legendre_rule(n: int, prec: int) -> Tuple[Tuple[RealBall, RealBall], ...]:
    """Verified (node, weight) enclosures of the n-point rule on [-1, 1]."""
    key = (n, prec)
    if key in _rules:
        return _rules[key]
    # The interval recurrence for P_n amplifies widths by roughly 2^n, so the
    # verification precision must grow with n to keep weights tight.
    work = prec + 2 * n + 64
    old = mp.prec
    mp.prec = work
    try:
        approx = []
        for i in range(n // 2 + n % 2):
            x = mp.cos(mp.pi * (i + 0.75) / (n + 0.5))
            for _ in range(60):
                pn, pn1 = _legendre_pair(n, x)
                dpn = n * (x * pn - pn1) / (x * x - 1)
                dx = pn / dpn
                x -= dx
                if abs(dx) < mp.ldexp(1, -work + 4):
                    break
            approx.append(x)
        pairs = []
        iv.prec = work
        for x in approx:
            delta = mp.ldexp(1, -prec - 2 * n - 16)
            node = None
            for _ in range(30):
                left, _ = _legendre_pair(n, iv.mpf(x - delta))
                right, _ = _legendre_pair(n, iv.mpf(x + delta))
                llo, lhi = mp.make_mpf(left._mpi_[0]), mp.make_mpf(left._mpi_[1])
                rlo, rhi = mp.make_mpf(right._mpi_[0]), mp.make_mpf(right._mpi_[1])
                if (lhi < 0 < rlo) or (rhi < 0 < llo):
                    node = iv.mpf([x - delta, x + delta])
                    break
                delta *= 8
            if node is None:
                raise PrecisionExhaustedError(
                    f"could not certify Legendre root near {x}")
            pn, pn1 = _legendre_pair(n, node)
            dpn = n * (node * pn - pn1) / (node * node - 1)
            w = 2 / ((1 - node * node) * dpn * dpn)
            pairs.append((RealBall(node, prec), RealBall(w, prec)))
        # mirror to the negative half (weights symmetric)
        full: List[Tuple[RealBall, RealBall]] = []
        for nd, w in pairs:
            full.append((nd, w))
            if nd.lower > 0 or nd.upper < 0:
                iv.prec = work
                full.append((RealBall(-nd.val, prec), w))
        total = sum((w for _, w in full), ball(0, prec))
        if not total.contains_rational(2):
            raise AssertionError("Gauss-Legendre weights failed the sum check")
        _rules[key] = tuple(full)
        return _rules[key]
    finally:
        mp.prec = old


@dataclass(frozen=True)
class PanelBound:
    """Bounding rectangle of the rho=2 Bernstein ellipse of a panel."""

    x_iv: RealBall   # real parts covered
    y_hi: RealBall   # top of the rectangle (imaginary direction)


def panel_rectangle(a, b, prec: int) -> PanelBound:
    a, b = rat(a), rat(b)
    h = (b - a) / 2
    c = (a + b) / 2
    lo = c - _ALPHA * h
    hi = c + _ALPHA * h
    return PanelBound(RealBall.from_endpoints(ball(lo, prec).lower,
                                              ball(hi, prec).upper, prec),
                      ball(_BETA * h, prec))


def integrate_panel(f: Callable[[RealBall], RealBall],
                    sup_bound: Callable[[PanelBound], RealBall],
                    a, b, prec: int, tol) -> RealBall:
    """Enclosure of the integral of f over [a, b] within absolute `tol`.

    `f` must be a ball extension of a function analytic inside the rho=2
    Bernstein ellipse of the panel, and `sup_bound` must bound sup |f| over
    the rectangle covering that ellipse.
    """
    a, b = rat(a), rat(b)
    h = ball(rat(b - a, 2), prec)
    c = rat(a + b, 2)
    rect = panel_rectangle(a, b, prec)
    m = sup_bound(rect)
    width = ball(b - a, prec)
    # a panel whose integrand is uniformly tiny needs no evaluations
    crude = (m * width).upper
    if crude <= tol:
        return RealBall.from_endpoints(-crude, crude, prec)
    for n in N_LADDER:
        err = (16 * m * h).upper * mp.ldexp(1, -2 * n)
        if err <= tol:
            rule = gauss_legendre_rule(n, prec)
            cb = ball(c, prec)
            acc = ball(0, prec)
            for node, w in rule:
                t = cb + h * node
                acc = acc + w * f(t)
            return (acc * h).widen_abs(RealBall.from_endpoints(0, err, prec))
    raise PrecisionExhaustedError(
        f"panel [{a}, {b}] cannot reach tol={tol} (sup bound {m.upper})")
