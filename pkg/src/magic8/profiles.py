"""Laplace profiles: dual-regime representations of forms on the imaginary axis.

A profile describes a function of t > 0 in three interlocking ways:

* ``full_terms``   -- sum of c * t^k * F(e^(-pi t)) over exact series F,
                      valid (and sharp) for t >= 1;
* ``smallt_terms`` -- the modular-transformed representation
                      sum of c * t^k * G(e^(-pi/t)), valid for t <= 1, whose
                      series have strictly positive lowest index, so the
                      function vanishes super-exponentially at 0+;
* ``heads``        -- the finitely many non-decaying exponentials
                      c * t^k * e^(-pi n t) with n <= 0, read off the series;
                      these drive poles of the Laplace transform and all
                      asymptotic domination arguments.

Coefficients are exact pi-monomials (rational times an integer power of pi),
so normalization and cancellation of leading exponentials happen exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from .ball import RealBall, ball, pi_pow
from .bounds import (FormSeries, MajInvDelta, MajEisenstein, MajProd,
                     MajScale, MajSum, majorant_of_uwpoly)
from .modforms import (ALPHA1, BETA1, PSI_POLY, QuasiProfile, SlashWord,
                       build_psi, build_single_root, inv_delta,
                       phi_component, series_over_delta)
from .qseries import DEFAULT_ORDER, BigRational, QSeries, rat


@dataclass(frozen=True)
class PiScalar:
    """An exact coefficient r * pi^e."""

    r: BigRational
    e: int

    def __post_init__(self):
        object.__setattr__(self, "r", rat(self.r))

    def __mul__(self, other: "PiScalar") -> "PiScalar":
        return PiScalar(self.r * other.r, self.e + other.e)

    def scale(self, c) -> "PiScalar":
        return PiScalar(self.r * rat(c), self.e)

    def __neg__(self) -> "PiScalar":
        return PiScalar(-self.r, self.e)

    def __add__(self, other: "PiScalar") -> "PiScalar":
        if other.e != self.e:
            raise ValueError("cannot add pi-monomials of different degree")
        return PiScalar(self.r + other.r, self.e)

    def divide(self, other: "PiScalar") -> "PiScalar":
        return PiScalar(self.r / other.r, self.e - other.e)

    def is_zero(self) -> bool:
        return self.r == 0

    @property
    def sign(self) -> int:
        return (self.r > 0) - (self.r < 0)

    def to_ball(self, prec: int) -> RealBall:
        b = ball(self.r, prec)
        return b * pi_pow(self.e, prec) if self.e else b

    def abs_ball(self, prec: int) -> RealBall:
        return abs(self.to_ball(prec))

    def __repr__(self):
        return f"{self.r}*pi^{self.e}" if self.e else f"{self.r}"


ONE = PiScalar(1, 0)


@dataclass(frozen=True)
class Head:
    """c * t^k * e^(-pi n t) with n <= 0."""

    k: int
    n: int
    c: PiScalar


@dataclass(frozen=True)
class ProfileTerm:
    """c * t^k * series(x) with x = e^(-pi t) or e^(-pi/t) by regime."""

    k: int
    c: PiScalar
    fs: FormSeries


@dataclass(frozen=True)
class LaplaceProfile:
    source: str
    prefactor: str  # 'sin2half' for 4 sin^2(pi u / 2), 'sin' for sin(pi u)
    heads: Tuple[Head, ...]
    full_terms: Tuple[ProfileTerm, ...]
    tail_terms: Tuple[ProfileTerm, ...]
    smallt_terms: Tuple[ProfileTerm, ...]

    def scale(self, c: PiScalar) -> "LaplaceProfile":
        return LaplaceProfile(
            self.source,
            self.prefactor,
            tuple(Head(h.k, h.n, c * h.c) for h in self.heads),
            tuple(ProfileTerm(t.k, c * t.c, t.fs) for t in self.full_terms),
            tuple(ProfileTerm(t.k, c * t.c, t.fs) for t in self.tail_terms),
            tuple(ProfileTerm(t.k, c * t.c, t.fs) for t in self.smallt_terms),
        )

    def pole_set(self) -> Tuple[int, ...]:
        return tuple(sorted({-h.n for h in self.heads}))


def combine_profiles(name: str, a: LaplaceProfile, b: LaplaceProfile,
                     sign: int) -> LaplaceProfile:
    """a + sign*b, merging heads with identical shape exactly."""
    if a.prefactor != b.prefactor:
        raise ValueError("profiles with different prefactors cannot combine")
    merged: Dict[Tuple[int, int, int], PiScalar] = {}
    for h in a.heads:
        merged[(h.k, h.n, h.c.e)] = h.c
    for h in b.heads:
        c = h.c if sign > 0 else -h.c
        key = (h.k, h.n, h.c.e)
        merged[key] = merged[key] + c if key in merged else c
    heads = tuple(Head(k, n, c) for (k, n, _), c in sorted(merged.items())
                  if not c.is_zero())

    def _cat(ta, tb):
        out = list(ta)
        for t in tb:
            out.append(ProfileTerm(t.k, t.c if sign > 0 else -t.c, t.fs))
        return tuple(out)

    return LaplaceProfile(name, a.prefactor, heads,
                          _cat(a.full_terms, b.full_terms),
                          _cat(a.tail_terms, b.tail_terms),
                          _cat(a.smallt_terms, b.smallt_terms))


# ----------------------------------------------------------------------
# form-series registry with majorants

def _subseries(s: QSeries, lo: int) -> QSeries:
    return QSeries({m: c for m, c in s.coeffs.items() if m >= lo},
                   max(s.min_index, lo), s.trunc_index)


_MAJ_INV_DELTA = MajInvDelta()
_MAJ_QUASI = MajSum(MajProd(MajEisenstein(2), MajEisenstein(4)),
                    MajEisenstein(6))


@lru_cache(maxsize=None)
def form_series(name: str, order: int = DEFAULT_ORDER) -> FormSeries:
    """Exact series plus verified majorant for every evaluated form."""
    if name == "psi":
        return FormSeries("psi", build_psi(order),
                          MajProd(majorant_of_uwpoly(PSI_POLY.terms),
                                  _MAJ_INV_DELTA))
    if name == "psi_oddflip":
        # shift_T(psi) - psi = -2 * (odd-index part of psi)
        psi = build_psi(order)
        return FormSeries("psi_oddflip", psi.shift_T() - psi,
                          MajScale(2, form_series("psi", order).majorant))
    if name == "psi_single":
        poly = BETA1.scale(2) - ALPHA1
        return FormSeries("psi_single", build_single_root(order).psi_single,
                          MajProd(majorant_of_uwpoly(poly.terms),
                                  _MAJ_INV_DELTA))
    if name == "psi_single_T":
        base = form_series("psi_single", order)
        return FormSeries("psi_single_T", base.series.shift_T(), base.majorant)
    if name == "psi_single_TS":
        poly = (BETA1.scale(2) - ALPHA1).slash(SlashWord.parse("TS"))
        num = poly.to_qseries(order + 2)
        return FormSeries("psi_single_TS", series_over_delta(num, order),
                          MajProd(majorant_of_uwpoly(poly.terms),
                                  _MAJ_INV_DELTA))
    if name == "A":
        return FormSeries("A", phi_component("A", order),
                          MajProd(MajProd(_MAJ_QUASI, _MAJ_QUASI),
                                  _MAJ_INV_DELTA))
    if name == "B":
        return FormSeries("B", phi_component("B", order),
                          MajProd(MajProd(MajEisenstein(4), _MAJ_QUASI),
                                  _MAJ_INV_DELTA))
    if name == "C":
        return FormSeries("C", phi_component("C", order),
                          MajProd(MajPow2(MajEisenstein(4)), _MAJ_INV_DELTA))
    if name.endswith("#tail"):
        base = form_series(name[:-5], order)
        return FormSeries(name, _subseries(base.series, 1), base.majorant)
    raise KeyError(f"unknown form series {name!r}")


def MajPow2(m):
    return MajProd(m, m)


# ----------------------------------------------------------------------
# profile builders

def _heads_from_series(fs: FormSeries, k: int, c: PiScalar) -> List[Head]:
    out = []
    for m, coef in sorted(fs.series.coeffs.items()):
        if m > 0:
            break
        out.append(Head(k, m, c.scale(coef)))
    return out


@lru_cache(maxsize=None)
def build_profile(source: str, order: int = DEFAULT_ORDER) -> LaplaceProfile:
    """Construct the dual-regime profile for a named source.

    The combined sources 'phi_plus_psi' and 'phi_minus_psi' are the
    *normalized* integrands of the magic function and its transform.
    """
    if source == "psi":
        fs = form_series("psi", order)
        return LaplaceProfile(
            "psi", "sin2half",
            tuple(_heads_from_series(fs, 0, ONE)),
            (ProfileTerm(0, ONE, fs),),
            (ProfileTerm(0, ONE, form_series("psi#tail", order)),),
            (ProfileTerm(2, ONE, form_series("psi_oddflip", order)),),
        )
    if source == "phi":
        a = form_series("A", order)
        b = form_series("B", order)
        c = form_series("C", order)
        heads = (_heads_from_series(b, 1, PiScalar(12, -1))
                 + _heads_from_series(c, 0, PiScalar(-36, -2)))
        return LaplaceProfile(
            "phi", "sin2half",
            tuple(sorted(heads, key=lambda h: (h.n, h.k))),
            (ProfileTerm(2, PiScalar(-1, 0), a),
             ProfileTerm(1, PiScalar(12, -1), b),
             ProfileTerm(0, PiScalar(-36, -2), c)),
            (ProfileTerm(2, PiScalar(-1, 0), form_series("A#tail", order)),
             ProfileTerm(1, PiScalar(12, -1), form_series("B#tail", order)),
             ProfileTerm(0, PiScalar(-36, -2), form_series("C#tail", order))),
            (ProfileTerm(2, PiScalar(-1, 0), a),),
        )
    if source == "chi":
        a = form_series("A", order)
        b = form_series("B", order)
        c = form_series("C", order)
        return LaplaceProfile(
            "chi", "sin2half", (),
            (ProfileTerm(0, ONE, a),),
            (ProfileTerm(0, ONE, form_series("A#tail", order)),),
            # chi(it) = -t^2 phi(i/t) expanded through the quasi components
            (ProfileTerm(0, ONE, a),
             ProfileTerm(1, PiScalar(-12, -1), b),
             ProfileTerm(2, PiScalar(36, -2), c)),
        )
    if source == "psi_single":
        fs = form_series("psi_single", order)
        return LaplaceProfile(
            "psi_single", "sin", tuple(_heads_from_series(fs, 0, ONE)),
            (ProfileTerm(0, ONE, fs),),
            (ProfileTerm(0, ONE, form_series("psi_single#tail", order)),),
            (ProfileTerm(2, PiScalar(-1, 0), fs),),
        )
    if source == "psi_single_shifted":
        fs = form_series("psi_single_T", order)
        return LaplaceProfile(
            "psi_single_shifted", "sin",
            tuple(_heads_from_series(fs, 0, ONE)),
            (ProfileTerm(0, ONE, fs),),
            (ProfileTerm(0, ONE,
                         form_series("psi_single_T#tail", order)),),
            (ProfileTerm(2, PiScalar(-1, 0),
                         form_series("psi_single_TS", order)),),
        )
    if source in ("phi_plus_psi", "phi_minus_psi"):
        sign = 1 if source == "phi_plus_psi" else -1
        c_plus, c_minus = normalization_scalars(order)
        fplus = build_profile("phi", order).scale(c_plus)
        fminus = build_profile("psi", order).scale(c_minus)
        return combine_profiles(source, fplus, fminus, sign)
    raise KeyError(f"unknown profile source {source!r}")


class DegenerateHeadError(ArithmeticError):
    """The normalizing t-linear head coefficient vanished."""


@lru_cache(maxsize=None)
def normalization_scalars(order: int = DEFAULT_ORDER) -> Tuple[PiScalar, PiScalar]:
    """(c_plus, c_minus): exact pi-monomials normalizing phi and psi.

    c_plus makes the t-linear head of phi equal 1 (so f_plus(0) = 1);
    c_minus equalizes the e^(2 pi t) head coefficients of c_plus*phi and
    c_minus*psi, which matches the radial derivatives at sqrt(2).
    """
    b0 = phi_component("B", order).coefficient(0)
    if b0 == 0:
        raise DegenerateHeadError("t-linear head coefficient vanished")
    c_plus = PiScalar(rat(1, 12 * b0), 1)
    a2_phi = PiScalar(-36 * phi_component("C", order).coefficient(-2), -2)
    a2_psi = PiScalar(build_psi(order).coefficient(-2), 0)
    c_minus = (c_plus * a2_phi).divide(a2_psi)
    return c_plus, c_minus


def quasiprofile_to_terms(qp: QuasiProfile, order: int) -> Tuple[ProfileTerm, ...]:
    """Adapter from the spec-level quasimodular profile to evaluator terms."""
    name_by_id = {"A": "A", "B": "B", "C": "C"}
    out = []
    for term in qp:
        # identify by lowest stored coefficient against the registry
        fs = None
        for nm in name_by_id.values():
            cand = form_series(nm, order)
            scale = None
            for m, c in term.series.coeffs.items():
                base = cand.series.coeffs.get(m)
                if base:
                    scale = c / base
                    break
            if scale is not None and cand.series.scale(scale).agrees_with(term.series):
                fs = FormSeries(f"{nm}*{scale}", term.series,
                                MajScale(scale, cand.majorant))
                break
        if fs is None:
            raise KeyError("quasiprofile term does not match a known component")
        out.append(ProfileTerm(term.t_power, PiScalar(term.sign, -term.pi_power), fs))
    return tuple(out)
