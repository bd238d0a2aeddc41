"""Certified evaluation: forms on the imaginary axis and magic functions.

Evaluation regimes
------------------
For t >= 1 a profile is summed directly from its exact series at
x = e^(-pi t); for t < 1 the modular-transformed representation at
x = e^(-pi/t) is used.  Both carry rigorous truncation-tail enclosures, and
the two regimes agree at the S-fixed point t = 1.

Laplace transforms
------------------
The continued transform of a profile splits three ways:

* (0, 1]:  rigorous Gauss-Legendre panels on the transformed representation,
  whose integrand vanishes super-exponentially at 0+ (the interval (0, eps)
  is absorbed by the analytic bound eps * sup |integrand|);
* [1, oo) decaying part: exact termwise integrals
  int_1^oo t^k e^(-at) dt = e^(-a) P_k(a) / a^(k+1) over the series tail,
  plus a proven remainder for the unknown coefficients;
* [1, oo) head part: the same closed forms for the finitely many n <= 0
  exponentials.  Heads are where the transform's poles at u in {0, 1, 2}
  live; the magic-function layer multiplies by the sine prefactor
  *analytically*, through entire sinc-type factors, so evaluation exactly at
  the root radii stays finite and tight.

Radial derivatives are analytic term-by-term (closed-form derivatives for
heads and tails, an extra -pi*t factor inside the quadrature); finite
differences appear only in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple

from mpmath import mp

from .ball import (RealBall, ball, pi_pow, sinc_ball, sinc_prime_ball,
                   sincsq_ball, sincsq_prime_ball, symmetric,
                   PrecisionExhaustedError)
from .profiles import (Head, LaplaceProfile, PiScalar, ProfileTerm,
                       DegenerateHeadError, build_profile, combine_profiles,
                       normalization_scalars)
from .qseries import DEFAULT_ORDER, rat
from .quadrature import PanelBound, integrate_panel

DEFAULT_PREC = 192


class NonpositiveTError(ValueError):
    """Imaginary-axis evaluation needs t > 0."""


class PoleAtUError(ArithmeticError):
    """Raw Laplace evaluation requested on top of a head pole."""


# ----------------------------------------------------------------------
# dual-regime evaluation of profiles

_FORM_SOURCES = ("psi", "phi", "chi", "psi_single", "psi_single_shifted",
                 "phi_plus_psi", "phi_minus_psi")


def _eval_terms_at(terms: Tuple[ProfileTerm, ...], t: RealBall,
                   x: RealBall, prec: int) -> RealBall:
    acc = ball(0, prec)
    for term in terms:
        v = term.fs.eval_ball(x)
        if term.k:
            v = v * t ** term.k
        acc = acc + term.c.to_ball(prec) * v
    return acc


def eval_profile_direct(profile: LaplaceProfile, t: RealBall,
                        prec: int) -> RealBall:
    x = (-RealBall.pi(prec) * t).exp()
    return _eval_terms_at(profile.full_terms, t, x, prec)


def eval_profile_smallt(profile: LaplaceProfile, t: RealBall,
                        prec: int) -> RealBall:
    x = (-RealBall.pi(prec) / t).exp()
    return _eval_terms_at(profile.smallt_terms, t, x, prec)


def eval_form_it(name: str, t, prec: int = DEFAULT_PREC,
                 order: int = DEFAULT_ORDER) -> RealBall:
    """Enclosure of the named form at z = it (dual regime, split at t = 1)."""
    if name not in _FORM_SOURCES:
        raise KeyError(f"no imaginary-axis evaluator for {name!r}; "
                       f"known: {', '.join(_FORM_SOURCES)}")
    profile = build_profile(name, order)
    t = t if isinstance(t, RealBall) else ball(rat(t), prec)
    if not t.is_finite() or t.lower <= 0:
        raise NonpositiveTError(f"need t > 0, got {t!r}")
    if t.lower >= 1:
        return eval_profile_direct(profile, t, prec)
    if t.upper <= 1:
        return eval_profile_smallt(profile, t, prec)
    lowpart = RealBall.from_endpoints(t.lower, 1, prec)
    highpart = RealBall.from_endpoints(1, t.upper, prec)
    return eval_profile_smallt(profile, lowpart, prec).hull(
        eval_profile_direct(profile, highpart, prec))


# ----------------------------------------------------------------------
# closed forms on [1, oo)

_PK = {0: (1,), 1: (1, 1), 2: (2, 2, 1), 3: (6, 6, 3, 1)}


def _upper_tail_integral(k: int, a: RealBall) -> RealBall:
    """int_1^oo t^k e^(-a t) dt = e^(-a) P_k(a) / a^(k+1) for a > 0."""
    poly = ball(0, a.prec)
    for c in reversed(_PK[k]):
        poly = poly * a + c
    return (-a).exp() * poly / a ** (k + 1)


def _tail_closed(profile: LaplaceProfile, u: RealBall, prec: int,
                 deriv: bool) -> RealBall:
    """Termwise [1, oo) integral of the decaying series part against
    e^(-pi u t), with a proven remainder for the unknown coefficients."""
    pi_b = RealBall.pi(prec)
    z = (-pi_b).exp()
    total = ball(0, prec)
    for term in profile.tail_terms:
        kk = term.k + 1 if deriv else term.k
        c = term.c.to_ball(prec)
        if deriv:
            c = -pi_b * c
        items = sorted(term.fs.series.coeffs.items())
        acc = ball(0, prec)
        prev_m: Optional[int] = None
        e_cur = None
        for m, coef in items:
            if m < 1:
                raise AssertionError("tail term contains a head index")
            if prev_m is None:
                e_cur = (-pi_b * (u + m)).exp()
            else:
                e_cur = e_cur * z ** (m - prev_m)
            prev_m = m
            a = pi_b * (u + m)
            poly = ball(0, prec)
            for pc in reversed(_PK[kk]):
                poly = poly * a + pc
            acc = acc + ball(coef, prec) * e_cur * poly / a ** (kk + 1)
        # unknown coefficients: Q_kk decreasing, so bound by its value at the
        # truncation index times the geometric coefficient tail
        m_tr = term.fs.series.trunc_index
        a0 = pi_b * (u + m_tr)
        poly0 = ball(0, prec)
        for pc in reversed(_PK[kk]):
            poly0 = poly0 * a0 + pc
        q0 = poly0 / a0 ** (kk + 1)
        rem = q0 * (-pi_b * u).exp() * term.fs.tail_bound(z)
        total = total + (c * acc).widen_abs(abs(c) * rem)
    return total


# ----------------------------------------------------------------------
# rigorous quadrature on (0, 1]

class _LowIntegrand:
    """Ball extension and rectangle sup bound of the (0,1] integrand."""

    def __init__(self, profile: LaplaceProfile, u: RealBall, prec: int,
                 deriv: bool):
        self.profile = profile
        self.u = u
        self.prec = prec
        self.deriv = deriv
        self.pi_b = RealBall.pi(prec)
        self.u_lo = ball(0, prec) if u.lower < 0 else \
            RealBall.from_endpoints(u.lower, u.lower, prec)

    def __call__(self, t: RealBall) -> RealBall:
        prec = self.prec
        x = (-self.pi_b / t).exp()
        acc = _eval_terms_at(self.profile.smallt_terms, t, x, prec)
        acc = acc * (-self.pi_b * self.u * t).exp()
        if self.deriv:
            acc = acc * (-self.pi_b * t)
        return acc

    def sup_bound(self, rect: PanelBound) -> RealBall:
        prec = self.prec
        x1 = RealBall.from_endpoints(rect.x_iv.lower, rect.x_iv.lower, prec)
        x2 = RealBall.from_endpoints(rect.x_iv.upper, rect.x_iv.upper, prec)
        zabs = (x2 ** 2 + rect.y_hi ** 2).sqrt()
        g_lo = x1 / (x2 ** 2 + rect.y_hi ** 2)
        g_lo = RealBall.from_endpoints(g_lo.lower, g_lo.lower, prec)
        xarg = (-self.pi_b * g_lo).exp()
        damp = (-self.pi_b * self.u_lo * x1).exp()
        acc = ball(0, prec)
        for term in self.profile.smallt_terms:
            v = term.fs.abs_upper(xarg)
            if term.k:
                v = v * zabs ** term.k
            acc = acc + term.c.abs_ball(prec) * v
        acc = acc * damp
        if self.deriv:
            acc = acc * self.pi_b * zabs
        return acc


def _low_integral(profile: LaplaceProfile, u: RealBall, prec: int,
                  deriv: bool, tol) -> RealBall:
    """Enclosure of int_0^1 (profile at it) e^(-pi u t) dt (times -pi t if
    deriv), via geometric panels plus the analytic cut near 0."""
    f = _LowIntegrand(profile, u, prec, deriv)
    # find the cut point: |integrand| on (0, eps] is bounded by its rectangle
    # bound with Re(1/z) >= 1/eps
    cut = None
    J = 4
    while J <= 64:
        eps = rat(1, 1 << (J + 1))
        eps_b = ball(eps, prec)
        xarg = (-f.pi_b / eps_b).exp()
        bound = ball(0, prec)
        for term in profile.smallt_terms:
            v = term.fs.abs_upper(xarg)
            if term.k:
                v = v * eps_b ** term.k
            bound = bound + term.c.abs_ball(prec) * v
        if deriv:
            bound = bound * f.pi_b * eps_b
        cut_bound = (bound * eps_b).upper
        if cut_bound <= tol / 4:
            cut = RealBall.from_endpoints(-cut_bound, cut_bound, prec)
            break
        J += 2
    if cut is None:
        raise PrecisionExhaustedError("cannot close the (0, eps) cut")
    total = cut
    tol_panel = (tol - tol / 4) / (J + 1)
    for j in range(J + 1):
        a = rat(1, 1 << (j + 1))
        b = rat(1, 1 << j)
        total = total + integrate_panel(f, f.sup_bound, a, b, prec, tol_panel)
    return total


def _low_tol(u: RealBall, prec: int):
    """Absolute quadrature tolerance scaled to the integral's magnitude.

    The (0,1] integral peaks like e^(-2 pi sqrt(u)); 56 guard bits keep the
    final enclosures far below every certification tolerance."""
    old = mp.prec
    mp.prec = 64
    try:
        u_lo = max(mp.mpf(0), mp.mpf(u.lower))
        scale = mp.exp(-2 * mp.pi * mp.sqrt(u_lo))
        return scale * mp.ldexp(1, -(prec - 56))
    finally:
        mp.prec = old


# ----------------------------------------------------------------------
# the continued Laplace transform (raw, no prefactor)

def laplace_eval(source, u, prec: int = DEFAULT_PREC,
                 order: int = DEFAULT_ORDER, deriv: bool = False) -> RealBall:
    """Enclosure of the continued transform int_0^oo profile(t) e^(-pi u t) dt.

    Valid away from the head poles; the magic-function layer handles those
    via the sine-prefactor cancellation.  `deriv` returns the u-derivative.
    """
    profile = source if isinstance(source, LaplaceProfile) \
        else build_profile(source, order)
    u = u if isinstance(u, RealBall) else ball(rat(u), prec)
    for h in profile.heads:
        if (u + h.n).contains_zero():
            raise PoleAtUError(f"u enclosure meets the pole at {-h.n}")
    pi_b = RealBall.pi(prec)
    total = _low_integral(profile, u, prec, deriv, _low_tol(u, prec))
    total = total + _tail_closed(profile, u, prec, deriv)
    for h in profile.heads:
        a = pi_b * (u + h.n)
        kk = h.k + 1 if deriv else h.k
        v = _upper_tail_integral(kk, a)
        c = h.c.to_ball(prec)
        if deriv:
            c = -pi_b * c
        total = total + c * v
    return total


# ----------------------------------------------------------------------
# prefactor-cancelled evaluation (the magic functions and g)

def _head_value(h: Head, u: RealBall, prec: int, prefactor: str,
                deriv: bool) -> RealBall:
    """prefactor(u) * c * int_1^oo t^k e^(-pi(u+n)t) dt, with the zero of the
    prefactor at u = -n cancelling the pole analytically (entire forms)."""
    pi_b = RealBall.pi(prec)
    s = u + h.n
    c = h.c.to_ball(prec)
    if prefactor == "sin2half":
        if h.n % 2 != 0:
            raise AssertionError("sin2half heads must sit at even n")
        w = pi_b * s / 2
        aw = sincsq_ball(w)
        ew = (-2 * w).exp()
        if h.k == 0:
            if not deriv:
                return c * 2 * w * aw * ew
            apw = sincsq_prime_ball(w)
            return c * pi_b * ew * (aw * (1 - 2 * w) + w * apw)
        if h.k == 1:
            if not deriv:
                return c * aw * ew * (1 + 2 * w)
            apw = sincsq_prime_ball(w)
            return c * (pi_b / 2) * ew * (apw * (1 + 2 * w) - 4 * w * aw)
        raise AssertionError(f"unsupported head power {h.k}")
    if prefactor == "sin":
        if h.k != 0:
            raise AssertionError("sin-prefactor heads have k = 0")
        sign = -1 if h.n % 2 else 1
        ps = pi_b * s
        es = (-ps).exp()
        if not deriv:
            return c * sign * sinc_ball(ps) * es
        return c * sign * pi_b * es * (sinc_prime_ball(ps) - sinc_ball(ps))
    raise AssertionError(f"unknown prefactor {prefactor!r}")


def _prefactor(prefactor: str, u: RealBall, prec: int,
               deriv: bool) -> RealBall:
    pi_b = RealBall.pi(prec)
    if prefactor == "sin2half":
        if not deriv:
            s = (pi_b * u / 2).sin()
            return 4 * s * s
        return 2 * pi_b * (pi_b * u).sin()
    if prefactor == "sin":
        if not deriv:
            return (pi_b * u).sin()
        return pi_b * (pi_b * u).cos()
    raise AssertionError(f"unknown prefactor {prefactor!r}")


def eval_at_u_pair(profile: LaplaceProfile, u, prec: int = DEFAULT_PREC
                   ) -> Tuple[RealBall, RealBall]:
    """(value, u-derivative) of prefactor(u) * (continued transform).

    The derivative is exact (product rule; heads through their entire
    closed forms, quadrature with the extra -pi t factor); the shared
    transform pieces are computed once.
    """
    u = u if isinstance(u, RealBall) else ball(rat(u), prec)
    tol = _low_tol(u, prec)
    tail = _tail_closed(profile, u, prec, False)
    low = _low_integral(profile, u, prec, False, tol)
    pref = _prefactor(profile.prefactor, u, prec, False)
    heads = ball(0, prec)
    for h in profile.heads:
        heads = heads + _head_value(h, u, prec, profile.prefactor, False)
    value = heads + pref * (tail + low)
    tail_d = _tail_closed(profile, u, prec, True)
    low_d = _low_integral(profile, u, prec, True, tol)
    pref_d = _prefactor(profile.prefactor, u, prec, True)
    heads_d = ball(0, prec)
    for h in profile.heads:
        heads_d = heads_d + _head_value(h, u, prec, profile.prefactor, True)
    deriv = heads_d + pref_d * (tail + low) + pref * (tail_d + low_d)
    return value, deriv


def eval_at_u(profile: LaplaceProfile, u, prec: int = DEFAULT_PREC,
              deriv: bool = False) -> RealBall:
    """prefactor(u) * (continued transform), as a function of u = r^2."""
    u = u if isinstance(u, RealBall) else ball(rat(u), prec)
    if deriv:
        return eval_at_u_pair(profile, u, prec)[1]
    tol = _low_tol(u, prec)
    tail = _tail_closed(profile, u, prec, False)
    low = _low_integral(profile, u, prec, False, tol)
    pref = _prefactor(profile.prefactor, u, prec, False)
    heads = ball(0, prec)
    for h in profile.heads:
        heads = heads + _head_value(h, u, prec, profile.prefactor, False)
    return heads + pref * (tail + low)


# ----------------------------------------------------------------------
# normalization and the magic bundle

@dataclass(frozen=True)
class MagicBundle:
    """Normalization scalars and the four assembled profiles."""

    c_plus: PiScalar
    c_minus: PiScalar
    profiles: Dict[str, LaplaceProfile]

    def profile(self, which: str) -> LaplaceProfile:
        return self.profiles[which]


@lru_cache(maxsize=None)
def normalize(order: int = DEFAULT_ORDER) -> MagicBundle:
    """Rescale phi so f_plus(0) = 1, then psi to match e^(2 pi t) heads.

    All scalars are exact pi-monomials computed from series constants; the
    closed forms pi/8640 and -1/(480 pi) serve as cross-checks in the test
    suite, not as definitions.
    """
    c_plus, c_minus = normalization_scalars(order)
    fplus = build_profile("phi", order).scale(c_plus)
    fplus = LaplaceProfile("fplus", fplus.prefactor, fplus.heads,
                           fplus.full_terms, fplus.tail_terms,
                           fplus.smallt_terms)
    fminus = build_profile("psi", order).scale(c_minus)
    fminus = LaplaceProfile("fminus", fminus.prefactor, fminus.heads,
                            fminus.full_terms, fminus.tail_terms,
                            fminus.smallt_terms)
    f = combine_profiles("f", fplus, fminus, +1)
    fhat = combine_profiles("fhat", fplus, fminus, -1)
    return MagicBundle(c_plus, c_minus,
                       {"fplus": fplus, "fminus": fminus, "f": f,
                        "fhat": fhat})


_MAGIC_NAMES = ("f", "fhat", "fplus", "fminus")


def magic_eval(which: str, r, prec: int = DEFAULT_PREC,
               order: int = DEFAULT_ORDER) -> RealBall:
    """Enclosure of the magic function (or an eigenfunction part) at radius r."""
    if which not in _MAGIC_NAMES:
        raise KeyError(f"unknown magic function {which!r}")
    r = r if isinstance(r, RealBall) else ball(rat(r), prec)
    return eval_at_u(normalize(order).profile(which), r * r, prec)


def magic_eval_u(which: str, u, prec: int = DEFAULT_PREC,
                 order: int = DEFAULT_ORDER, deriv: bool = False) -> RealBall:
    """Same as magic_eval but parametrized by u = r^2 (exact at the roots)."""
    return eval_at_u(normalize(order).profile(which), u, prec, deriv)


def magic_deriv(which: str, r, prec: int = DEFAULT_PREC,
                order: int = DEFAULT_ORDER) -> RealBall:
    """Radial derivative d/dr = 2r * d/du, analytic term by term."""
    if which not in _MAGIC_NAMES:
        raise KeyError(f"unknown magic function {which!r}")
    r = r if isinstance(r, RealBall) else ball(rat(r), prec)
    du = eval_at_u(normalize(order).profile(which), r * r, prec, deriv=True)
    return 2 * r * du


def g_eval(r, prec: int = DEFAULT_PREC, order: int = DEFAULT_ORDER) -> RealBall:
    """The single-root warm-up function g at radius r >= 0."""
    r = r if isinstance(r, RealBall) else ball(rat(r), prec)
    return eval_at_u(build_profile("psi_single_shifted", order), r * r, prec)


def g_eval_u(u, prec: int = DEFAULT_PREC, order: int = DEFAULT_ORDER) -> RealBall:
    return eval_at_u(build_profile("psi_single_shifted", order), u, prec)
