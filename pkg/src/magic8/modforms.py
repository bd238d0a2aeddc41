"""Exact construction of the named modular and quasimodular forms.

Everything here is computed in exact rational arithmetic on the shared
q^(1/2) index lattice of :mod:`magic8.qseries`:

* Eisenstein series E2, E4, E6 from divisor power sums;
* the discriminant Delta, both as (E4^3 - E6^2)/1728 and as the Euler
  product q*prod(1-q^n)^24;
* the level-2 generators U = theta^4, W = U|T, V = U - W, together with the
  weight-2k slash action of S and T on polynomials in U and W;
* the weight-10 bases used to build the single-root function psi_single and
  the double-root function psi;
* the depth-2 quasimodular combination chi = (E2*E4 - E6)^2 / Delta and the
  three-component profile for phi obtained from the E2 transformation law.

The slash action never touches an analytic variable: V is eliminated via
V = U - W, and S, T act on exponent pairs by the generator substitutions
U|T = W, W|T = U, U|S = -U, W|S = W - U.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Dict, Iterable, List, Sequence, Tuple

from .qseries import (DEFAULT_ORDER, BigRational, QSeries, rat)


class UnsupportedWeightError(ValueError):
    """Eisenstein weight outside {2, 4, 6}."""


class WeightMismatchError(ValueError):
    """Cusp expansions require a weight-10 numerator over Delta."""


# ----------------------------------------------------------------------
# divisor sums and Eisenstein series

def divisor_sigma(k: int, n: int) -> BigRational:
    """Exact sum of k-th powers of the divisors of n."""
    if k < 1 or n < 1:
        raise ValueError("divisor_sigma requires k, n >= 1")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** k
            e = n // d
            if e != d:
                total += e ** k
        d += 1
    return rat(total)


_EISENSTEIN_FACTOR = {2: (-24, 1), 4: (240, 3), 6: (-504, 5)}


@lru_cache(maxsize=None)
def eisenstein(k: int, order: int = DEFAULT_ORDER) -> QSeries:
    """Normalized Eisenstein series E_k as an integer-indexed q-series."""
    if k not in _EISENSTEIN_FACTOR:
        raise UnsupportedWeightError(f"no Eisenstein series of weight {k} here")
    if order < 1:
        raise ValueError("order must be >= 1")
    c, s = _EISENSTEIN_FACTOR[k]
    coeffs = {0: rat(1)}
    for n in range(1, (order - 1) // 2 + 1):
        coeffs[2 * n] = c * divisor_sigma(s, n)
    return QSeries(coeffs, 0, order)


# ----------------------------------------------------------------------
# Delta

@lru_cache(maxsize=None)
def _euler_product_pow24(order: int) -> QSeries:
    """prod_{n>=1} (1 - q^n)^24 on the even index lattice."""
    prod = QSeries.one(order)
    for n in range(1, (order - 1) // 2 + 1):
        prod = prod * QSeries({0: 1, 2 * n: -1}, 0, order)
    return prod.pow(24)


@lru_cache(maxsize=None)
def delta(order: int = DEFAULT_ORDER, method: str = "polynomial") -> QSeries:
    """The discriminant form; both methods agree exactly to `order`."""
    if order < 2:
        raise ValueError("order must be >= 2")
    if method == "polynomial":
        e4 = eisenstein(4, order)
        e6 = eisenstein(6, order)
        return (e4.pow(3) - e6.pow(2)).scale(rat(1, 1728))
    if method == "product":
        return _euler_product_pow24(order) * QSeries({2: 1}, 0, order)
    raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=None)
def inv_delta(order: int = DEFAULT_ORDER) -> QSeries:
    """1/Delta certified through index `order` (leading term q^-1)."""
    return delta(order + 2).invert(order)


# ----------------------------------------------------------------------
# level-2 generators

@lru_cache(maxsize=None)
def theta_series(order: int = DEFAULT_ORDER) -> QSeries:
    """theta(z) = sum over n of e^(pi*i*n^2*z) = 1 + 2q^(1/2) + 2q^2 + ..."""
    coeffs: Dict[int, BigRational] = {0: rat(1)}
    n = 1
    while n * n < order:
        coeffs[n * n] = rat(2)
        n += 1
    return QSeries(coeffs, 0, order)


@lru_cache(maxsize=None)
def theta_gamma2(which: str, order: int = DEFAULT_ORDER) -> QSeries:
    """The weight-2 forms U, V, W for the level-2 group."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if which == "U":
        return theta_series(order).pow(4)
    if which == "W":
        return theta_gamma2("U", order).shift_T()
    if which == "V":
        return theta_gamma2("U", order) - theta_gamma2("W", order)
    raise ValueError(f"unknown generator {which!r}")


# ----------------------------------------------------------------------
# polynomials in U and W with the slash action

_LETTERS = ("S", "T", "T^-1")


@dataclass(frozen=True)
class SlashWord:
    """A word over {S, T, T^-1}, applied to forms left to right.

    The word "TS" denotes the matrix product T*S, acting on a form f by
    f|TS = (f|T)|S, which matches sending the cusp at infinity to 1.
    """

    letters: Tuple[str, ...]

    def __post_init__(self):
        for ltr in self.letters:
            if ltr not in _LETTERS:
                raise ValueError(f"unknown letter {ltr!r}")

    @classmethod
    def parse(cls, text: str) -> "SlashWord":
        out: List[str] = []
        i = 0
        while i < len(text):
            ch = text[i]
            if ch == "S":
                out.append("S")
                i += 1
            elif ch == "T":
                if text[i + 1:i + 4] == "^-1":
                    out.append("T^-1")
                    i += 4
                else:
                    out.append("T")
                    i += 1
            elif ch in " *":
                i += 1
            else:
                raise ValueError(f"cannot parse slash word {text!r}")
        return cls(tuple(out))

    def __str__(self) -> str:
        return "".join(self.letters) or "1"


class UWPoly:
    """Homogeneous polynomial sum c_ab * U^a * W^b of weight 2(a+b)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Tuple[int, int], BigRational]):
        clean = {}
        degs = set()
        for (a, b), c in terms.items():
            c = rat(c)
            if c == 0:
                continue
            if a < 0 or b < 0:
                raise ValueError("negative exponent in UWPoly")
            degs.add(a + b)
            clean[(a, b)] = c
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous UWPoly: degrees {sorted(degs)}")
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("UWPoly is immutable")

    @property
    def degree(self) -> int:
        return next(iter(self.terms))[0] + next(iter(self.terms))[1] if self.terms else 0

    @property
    def weight(self) -> int:
        return 2 * self.degree

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, UWPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "UWPoly(0)"
        bits = [f"{c}*U^{a}*W^{b}" for (a, b), c in sorted(self.terms.items())]
        return "UWPoly(" + " + ".join(bits) + ")"

    def __add__(self, other: "UWPoly") -> "UWPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, rat(0)) + c
        return UWPoly(out)

    def __sub__(self, other: "UWPoly") -> "UWPoly":
        return self + other.scale(-1)

    def __neg__(self) -> "UWPoly":
        return self.scale(-1)

    def scale(self, c) -> "UWPoly":
        c = rat(c)
        return UWPoly({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other: "UWPoly") -> "UWPoly":
        out: Dict[Tuple[int, int], BigRational] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, rat(0)) + c1 * c2
        return UWPoly(out)

    # -- slash action -------------------------------------------------

    def slash_letter(self, letter: str) -> "UWPoly":
        if letter in ("T", "T^-1"):
            # U|T = W, W|T = U; T^2 fixes both, so T^-1 acts like T.
            return UWPoly({(b, a): c for (a, b), c in self.terms.items()})
        if letter == "S":
            # U|S = -U, W|S = W - U, extended multiplicatively.
            out: Dict[Tuple[int, int], BigRational] = {}
            for (a, b), c in self.terms.items():
                sign_a = -1 if a % 2 else 1
                # (W - U)^b expanded by binomials.
                for j in range(b + 1):
                    coeff = c * sign_a * _binomial(b, j)
                    if (b - j) % 2:
                        coeff = -coeff
                    k = (a + b - j, j)
                    out[k] = out.get(k, rat(0)) + coeff
            return UWPoly(out)
        raise ValueError(f"unknown letter {letter!r}")

    def slash(self, word: SlashWord) -> "UWPoly":
        p = self
        for letter in word.letters:
            p = p.slash_letter(letter)
        return p

    # -- expansion ----------------------------------------------------

    def to_qseries(self, order: int = DEFAULT_ORDER) -> QSeries:
        total = QSeries.zero(order)
        for (a, b), c in sorted(self.terms.items()):
            total = total + _uw_monomial(a, b, order).scale(c)
        return total


@lru_cache(maxsize=None)
def _binomial(n: int, k: int) -> BigRational:
    from math import comb
    return rat(comb(n, k))


@lru_cache(maxsize=None)
def _uw_monomial(a: int, b: int, order: int) -> QSeries:
    u = theta_gamma2("U", order)
    w = theta_gamma2("W", order)
    return u.pow(a) * w.pow(b) if a or b else QSeries.one(order)


def uw_slash(p: UWPoly, word: SlashWord) -> UWPoly:
    return p.slash(word)


# ----------------------------------------------------------------------
# cusp expansions of weight-10 polynomials over Delta

def series_over_delta(num: QSeries, order: int = DEFAULT_ORDER) -> QSeries:
    """num / Delta certified through index `order` (num.trunc must allow it)."""
    return num * inv_delta(order)


def cusp_expansion(p: UWPoly, word: SlashWord,
                   order: int = DEFAULT_ORDER) -> QSeries:
    """q-expansion of (p|word)/Delta, using the SL2(Z)-invariance of Delta."""
    if p.weight != 10:
        raise WeightMismatchError(
            f"cusp expansions need weight 10, got {p.weight}")
    num = p.slash(word).to_qseries(order + 2)
    return series_over_delta(num, order)


# ----------------------------------------------------------------------
# the weight-10 bases

ALPHA1 = UWPoly({(5, 0): 1, (3, 2): -6, (2, 3): 4})
BETA1 = UWPoly({(4, 1): 1, (3, 2): -3, (2, 3): 2})
GAMMA1 = UWPoly({(3, 2): -1, (2, 3): 4, (1, 4): -5, (0, 5): 2})

ALPHA2 = UWPoly({(4, 1): 2, (3, 2): -4, (2, 3): 1, (1, 4): 1})
BETA2 = UWPoly({(4, 1): 5, (3, 2): -10, (2, 3): 5, (0, 5): 1})

#: Numerator of psi: W^3 (5U^2 - 5UW + 2W^2), identical to -5*ALPHA2 + 2*BETA2.
PSI_POLY = UWPoly({(2, 3): 5, (1, 4): -5, (0, 5): 2})


@dataclass(frozen=True)
class SingleRootBasis:
    alpha: UWPoly
    beta: UWPoly
    gamma: UWPoly
    psi_single: QSeries


def build_single_root(order: int = DEFAULT_ORDER) -> SingleRootBasis:
    """The S-invariant weight-10 basis and psi_single = (2*beta - alpha)/Delta."""
    num = (BETA1.scale(2) - ALPHA1).to_qseries(order + 2)
    return SingleRootBasis(ALPHA1, BETA1, GAMMA1,
                           series_over_delta(num, order))


@lru_cache(maxsize=None)
def build_psi(order: int = DEFAULT_ORDER) -> QSeries:
    """psi = W^3(5U^2 - 5UW + 2W^2)/Delta = 2q^-1 + 288 + ..."""
    alt = BETA2.scale(2) - ALPHA2.scale(5)
    if alt != PSI_POLY:
        raise AssertionError("the two printed expressions for psi disagree")
    num = PSI_POLY.to_qseries(order + 2)
    return series_over_delta(num, order)


# ----------------------------------------------------------------------
# quasimodular machinery for phi

@dataclass(frozen=True)
class QuasiTerm:
    t_power: int
    pi_power: int
    sign: int
    series: QSeries


@dataclass(frozen=True)
class QuasiProfile:
    """A finite sum sign * t^k * pi^(-p) * series(e^(-2*pi*t)) on t > 0.

    Series live on the shared half-integer index lattice, so the evaluation
    point for index m is e^(-pi*m*t).
    """

    terms: Tuple[QuasiTerm, ...]

    def __iter__(self):
        return iter(self.terms)


@lru_cache(maxsize=None)
def quasi_numerator(order: int = DEFAULT_ORDER) -> QSeries:
    """E2*E4 - E6 = 720q + ..."""
    return eisenstein(2, order) * eisenstein(4, order) - eisenstein(6, order)


@lru_cache(maxsize=None)
def phi_component(which: str, order: int = DEFAULT_ORDER) -> QSeries:
    """The three series behind phi: A = (E2E4-E6)^2/D, B = E4(E2E4-E6)/D, C = E4^2/D."""
    n = quasi_numerator(order + 4)
    e4 = eisenstein(4, order + 4)
    if which == "A":
        num = n * n
    elif which == "B":
        num = e4 * n
    elif which == "C":
        num = e4 * e4
    else:
        raise ValueError(f"unknown phi component {which!r}")
    return series_over_delta(num, order)


def build_chi_phi(order: int = DEFAULT_ORDER) -> Tuple[QSeries, QuasiProfile]:
    """chi = (E2E4-E6)^2/Delta and the three-term profile for phi.

    Applying the transformation law E2(-1/z) = z^2 E2(z) - 6iz/pi inside
    chi = phi|S yields phi(it) = -t^2 A + (12t/pi) B - (36/pi^2) C with
    A, B, C as in :func:`phi_component`.
    """
    if order < 4:
        raise ValueError("order must be >= 4")
    a = phi_component("A", order)
    b = phi_component("B", order)
    c = phi_component("C", order)
    phi = QuasiProfile((
        QuasiTerm(2, 0, -1, a),
        QuasiTerm(1, 1, +1, b.scale(12)),
        QuasiTerm(0, 2, -1, c.scale(36)),
    ))
    return a, phi


# ----------------------------------------------------------------------
# exact linear algebra on the weight-10 monomial space

WEIGHT10_MONOMIALS: Tuple[Tuple[int, int], ...] = tuple(
    (5 - j, j) for j in range(6))


def _slash_matrix(word: SlashWord) -> List[List[BigRational]]:
    """Column i = coordinates of (monomial_i | word) in the monomial basis."""
    cols = []
    for (a, b) in WEIGHT10_MONOMIALS:
        img = UWPoly({(a, b): 1}).slash(word)
        cols.append([img.terms.get(mon, rat(0)) for mon in WEIGHT10_MONOMIALS])
    # transpose into row-major matrix acting on coordinate vectors
    return [[cols[j][i] for j in range(6)] for i in range(6)]


def rational_nullspace(matrix: Sequence[Sequence[BigRational]]
                       ) -> List[List[BigRational]]:
    """Exact nullspace basis of a small rational matrix."""
    rows = [list(map(rat, r)) for r in matrix]
    ncols = len(rows[0]) if rows else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [rat(0)] * ncols
        vec[fc] = rat(1)
        for ri, pc in enumerate(pivots):
            vec[pc] = -rows[ri][fc]
        basis.append(vec)
    return basis


def s_invariant_weight10_basis() -> List[UWPoly]:
    """Nullspace of (slash_S - I) on the 6-dim weight-10 monomial space."""
    m = _slash_matrix(SlashWord(("S",)))
    for i in range(6):
        m[i][i] -= 1
    return [_vec_to_poly(v) for v in rational_nullspace(m)]


def double_root_weight10_basis() -> List[UWPoly]:
    """Solutions of p = p|T + p|S on the weight-10 monomial space."""
    mt = _slash_matrix(SlashWord(("T",)))
    ms = _slash_matrix(SlashWord(("S",)))
    m = [[(1 if i == j else 0) - mt[i][j] - ms[i][j] for j in range(6)]
         for i in range(6)]
    return [_vec_to_poly(v) for v in rational_nullspace(m)]


def _vec_to_poly(vec: Sequence[BigRational]) -> UWPoly:
    return UWPoly({mon: c for mon, c in zip(WEIGHT10_MONOMIALS, vec)})


def in_span(p: UWPoly, basis: Iterable[UWPoly]) -> bool:
    """Exact membership of p in the rational span of the given polynomials."""
    vecs = [[b.terms.get(mon, rat(0)) for mon in WEIGHT10_MONOMIALS]
            for b in basis]
    target = [p.terms.get(mon, rat(0)) for mon in WEIGHT10_MONOMIALS]
    # Solve vecs^T x = target by elimination on the augmented system.
    rows = [[vecs[j][i] for j in range(len(vecs))] + [target[i]]
            for i in range(6)]
    n = len(vecs)
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, 6) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(6):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
        r += 1
    # Consistent iff no row reduces to (0 ... 0 | nonzero).
    return all(any(v != 0 for v in row[:-1]) or row[-1] == 0 for row in rows)


# ----------------------------------------------------------------------
# named-form registry (CLI surface)

_STRAIGHT_FORMS = {
    "E2": lambda order: eisenstein(2, order),
    "E4": lambda order: eisenstein(4, order),
    "E6": lambda order: eisenstein(6, order),
    "Delta": lambda order: delta(order),
    "U": lambda order: theta_gamma2("U", order),
    "V": lambda order: theta_gamma2("V", order),
    "W": lambda order: theta_gamma2("W", order),
    "psi": lambda order: build_psi(order),
    "chi": lambda order: phi_component("A", order),
    "phiA": lambda order: phi_component("A", order),
    "phiB": lambda order: phi_component("B", order),
    "phiC": lambda order: phi_component("C", order),
}

_OVER_DELTA_FORMS = {
    "alpha1": ALPHA1, "beta1": BETA1, "gamma1": GAMMA1,
    "alpha2": ALPHA2, "beta2": BETA2,
}

FORM_NAMES = tuple(sorted(list(_STRAIGHT_FORMS) + list(_OVER_DELTA_FORMS)
                          + ["psi_single"]))


def named_form_series(name: str, order: int = DEFAULT_ORDER) -> QSeries:
    """Expansion of a named form.

    The weight-10 basis names (alpha1 ... beta2) expand the weakly modular
    weight -2 objects p/Delta, matching the printed tables; psi and
    psi_single already include the division by Delta.
    """
    if name in _STRAIGHT_FORMS:
        return _STRAIGHT_FORMS[name](order)
    if name in _OVER_DELTA_FORMS:
        num = _OVER_DELTA_FORMS[name].to_qseries(order + 2)
        return series_over_delta(num, order)
    if name == "psi_single":
        return build_single_root(order).psi_single
    raise KeyError(f"unknown form {name!r}; known: {', '.join(FORM_NAMES)}")
