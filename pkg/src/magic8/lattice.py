"""Exact geometry of the Z^d, D_d, and E8 lattices.

Bases, Gram matrices, covolumes and duals are exact rationals.  Norm shells
come from exhaustive coordinate enumeration inside the provable search box
|x_i| <= sqrt(max_norm) (organized as a per-coordinate dynamic program, which
visits exactly the points in the box).  The checkerboard D_d keeps the points
of Z^d with even coordinate sum, and E8 is the union of D8 with its translate
by the deep-hole representative (1/2, ..., 1/2); the closest-vector decoder
follows that union structure and is exact on rational targets.

Only the packing density is transcendental; it is returned as an enclosure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Dict, List, Optional, Sequence, Tuple

from .ball import RealBall, ball, pi_pow
from .qseries import BigRational, rat

Vector = Tuple[BigRational, ...]


class BadDimensionError(ValueError):
    """Dimension incompatible with the requested lattice family."""


class UnsupportedLatticeError(ValueError):
    """The exact decoder only covers Z^d, D_d, and E8."""


@dataclass(frozen=True)
class NormShell:
    squared_norm: BigRational
    count: int
    representatives: Optional[Tuple[Vector, ...]] = None


class LatticeBasis:
    """Rows are generators; `kind` tags the family for exact decoding."""

    __slots__ = ("rows", "name", "kind", "d")

    def __init__(self, rows: Sequence[Sequence[BigRational]], name: str,
                 kind: Optional[str]):
        rows = tuple(tuple(rat(v) for v in row) for row in rows)
        d = len(rows)
        if any(len(r) != d for r in rows):
            raise ValueError("basis must be square")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("LatticeBasis is immutable")

    def determinant(self) -> BigRational:
        m = [list(r) for r in self.rows]
        n = self.d
        det = rat(1)
        for c in range(n):
            piv = next((i for i in range(c, n) if m[i][c] != 0), None)
            if piv is None:
                return rat(0)
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                det = -det
            det *= m[c][c]
            inv = 1 / m[c][c]
            for i in range(c + 1, n):
                if m[i][c] != 0:
                    f = m[i][c] * inv
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return det

    def covolume(self) -> BigRational:
        return abs(self.determinant())

    def gram(self) -> Tuple[Tuple[BigRational, ...], ...]:
        return tuple(tuple(sum(a * b for a, b in zip(r1, r2))
                           for r2 in self.rows) for r1 in self.rows)

    def inverse(self) -> Tuple[Tuple[BigRational, ...], ...]:
        n = self.d
        aug = [list(r) + [rat(1) if i == j else rat(0) for j in range(n)]
               for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next(i for i in range(c, n) if aug[i][c] != 0)
            aug[c], aug[piv] = aug[piv], aug[c]
            inv = 1 / aug[c][c]
            aug[c] = [v * inv for v in aug[c]]
            for i in range(n):
                if i != c and aug[i][c] != 0:
                    f = aug[i][c]
                    aug[i] = [vi - f * vc for vi, vc in zip(aug[i], aug[c])]
        return tuple(tuple(row[n:]) for row in aug)

    def coords_of(self, x: Sequence[BigRational]) -> Vector:
        """Coordinates c with c . rows = x (exact)."""
        inv = self.inverse()
        return tuple(sum(rat(x[i]) * inv[i][j] for i in range(self.d))
                     for j in range(self.d))

    def is_member(self, x: Sequence[BigRational]) -> bool:
        """Membership in the *generated* lattice (integer coordinates)."""
        return all(c.denominator == 1 for c in self.coords_of(x))


def make_lattice(name: str, d: int) -> LatticeBasis:
    if d < 1:
        raise BadDimensionError("dimension must be >= 1")
    if name == "Zd":
        rows = [[rat(1) if i == j else rat(0) for j in range(d)]
                for i in range(d)]
        return LatticeBasis(rows, f"Z{d}", "Z")
    if name == "Dd":
        if d == 1:
            return LatticeBasis([[rat(2)]], "D1", "D")
        rows = []
        for i in range(d - 1):
            row = [rat(0)] * d
            row[i], row[i + 1] = rat(1), rat(-1)
            rows.append(row)
        last = [rat(0)] * d
        last[d - 2], last[d - 1] = rat(1), rat(1)
        rows.append(last)
        return LatticeBasis(rows, f"D{d}", "D")
    if name == "E8":
        if d != 8:
            raise BadDimensionError("E8 lives in dimension 8")
        rows = [[rat(2)] + [rat(0)] * 7]
        for i in range(7):
            row = [rat(0)] * 8
            row[i], row[i + 1] = rat(-1), rat(1)
            rows.append(row)
        rows[-1] = [rat(1, 2)] * 8  # glue vector plugging the deep holes
        basis = LatticeBasis(rows, "E8", "E8")
        if basis.covolume() != 1:
            raise AssertionError("E8 basis must have covolume 1")
        return basis
    raise ValueError(f"unknown lattice family {name!r}")


def dual_basis(basis: LatticeBasis) -> LatticeBasis:
    """Generators of the dual lattice: inverse transpose of the basis."""
    inv = basis.inverse()
    rows = [tuple(inv[i][j] for i in range(basis.d)) for j in range(basis.d)]
    kind = basis.kind if basis.kind in ("Z", "E8") else None  # self-dual only
    return LatticeBasis(rows, basis.name + "*", kind)


# ----------------------------------------------------------------------
# membership for the three families (independent of any basis)

def family_member(kind: str, x: Sequence[BigRational]) -> bool:
    x = [rat(v) for v in x]
    if kind == "Z":
        return all(v.denominator == 1 for v in x)
    if kind == "D":
        return (all(v.denominator == 1 for v in x)
                and sum(x) % 2 == 0)
    if kind == "E8":
        if len(x) != 8:
            return False
        ints = all(v.denominator == 1 for v in x)
        halves = all(v.denominator == 2 for v in x)
        if not (ints or halves):
            return False
        s = sum(x)
        return s.denominator == 1 and s % 2 == 0
    raise UnsupportedLatticeError(kind)


# ----------------------------------------------------------------------
# shell enumeration (exhaustive, integer dynamic program over coordinates)

@lru_cache(maxsize=None)
def _int_hist(d: int, max_norm: int) -> Tuple[Tuple[int, int, int], ...]:
    """(norm, parity of coordinate sum, count) for all of Z^d with |x|^2 <= max_norm."""
    states = {(0, 0): 1}
    for _ in range(d):
        nxt: Dict[Tuple[int, int], int] = {}
        for (n, p), cnt in states.items():
            amax = isqrt(max_norm - n)
            for a in range(-amax, amax + 1):
                key = (n + a * a, (p + a) & 1)
                nxt[key] = nxt.get(key, 0) + cnt
        states = nxt
    return tuple((n, p, c) for (n, p), c in sorted(states.items()))


@lru_cache(maxsize=None)
def _glue_hist(max_quad_norm: int) -> Tuple[Tuple[int, int, int], ...]:
    """Histogram for (Z + 1/2)^8 by quadrupled norm and parity of sum(a_i)
    where x_i = a_i + 1/2; x is in D8 + glue iff that parity is even."""
    states = {(0, 0): 1}
    for _ in range(8):
        nxt: Dict[Tuple[int, int], int] = {}
        for (n, p), cnt in states.items():
            cmax = isqrt(max_quad_norm - n)
            c = 1
            while c <= cmax:
                for cc in (c, -c):
                    a = (cc - 1) // 2
                    key = (n + cc * cc, (p + a) & 1)
                    nxt[key] = nxt.get(key, 0) + cnt
                c += 2
        states = nxt
    return tuple((n, p, c) for (n, p), c in sorted(states.items()))


def _shell_counts(kind: str, d: int, max_norm: BigRational) -> Dict[BigRational, int]:
    counts: Dict[BigRational, int] = {}
    if kind in ("Z", "D"):
        bound = int(rat(max_norm))
        for n, p, c in _int_hist(d, bound):
            if kind == "D" and p != 0:
                continue
            if n <= max_norm:
                counts[rat(n)] = counts.get(rat(n), 0) + c
        return counts
    if kind == "E8":
        bound = int(rat(max_norm))
        for n, p, c in _int_hist(8, bound):
            if p == 0 and n <= max_norm:
                counts[rat(n)] = counts.get(rat(n), 0) + c
        for qn, p, c in _glue_hist(int(4 * rat(max_norm))):
            if p == 0 and rat(qn, 4) <= max_norm:
                counts[rat(qn, 4)] = counts.get(rat(qn, 4), 0) + c
        return counts
    raise UnsupportedLatticeError(kind)


def _representatives(kind: str, d: int, norm: BigRational,
                     cap: int) -> Tuple[Vector, ...]:
    """Collect up to `cap` vectors of the exact squared norm by enumeration."""
    reps: List[Vector] = []
    target4 = int(4 * rat(norm))
    offsets = (0,) if kind in ("Z", "D") else (0, 1)

    def rec(prefix: List[int], remaining4: int, offset: int):
        if len(reps) >= cap:
            return
        i = len(prefix)
        if i == d:
            if remaining4 != 0:
                return
            if kind == "D" and sum(prefix) % 2 != 0:
                return
            if kind == "E8":
                if offset == 0 and sum(prefix) % 2 != 0:
                    return
                if offset == 1 and sum((c - 1) // 2 for c in prefix) % 2 != 0:
                    return
            reps.append(tuple(rat(c, 2) for c in prefix))
            return
        cmax = isqrt(remaining4)
        start = offset  # doubled coordinates share the offset parity
        cands = sorted(set(c for c in range(-cmax - 1, cmax + 2)
                           if (c - start) % 2 == 0 and c * c <= remaining4))
        for c in cands:
            rec(prefix + [c], remaining4 - c * c, offset)

    for off in offsets:
        rec([], target4, off)
    return tuple(sorted(reps)[:cap])


def enumerate_shells(basis: LatticeBasis, max_norm,
                     with_representatives: bool = False,
                     rep_cap: int = 64) -> List[NormShell]:
    """Complete nonempty shells with squared norm <= max_norm."""
    max_norm = rat(max_norm)
    if max_norm < 0:
        raise ValueError("max_norm must be >= 0")
    if basis.kind not in ("Z", "D", "E8"):
        raise UnsupportedLatticeError(str(basis.kind))
    counts = _shell_counts(basis.kind, basis.d, max_norm)
    shells = []
    for norm in sorted(counts):
        reps = (_representatives(basis.kind, basis.d, norm, rep_cap)
                if with_representatives else None)
        shells.append(NormShell(norm, counts[norm], reps))
    return shells


def min_norm(basis: LatticeBasis) -> BigRational:
    """Smallest nonzero squared norm, by enumeration up to a row-norm bound."""
    bound = min(sum(v * v for v in row) for row in basis.rows)
    shells = enumerate_shells(basis, bound)
    for sh in shells:
        if sh.squared_norm > 0:
            return sh.squared_norm
    raise AssertionError("no nonzero shell found below a basis row norm")


# ----------------------------------------------------------------------
# density

def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def packing_density(basis: LatticeBasis, prec: int = 192) -> RealBall:
    """Enclosure of the sphere-packing density of the lattice.

    The packing radius is half the minimal vector length; the density is the
    ball volume pi^(d/2) r^d / (d/2)! divided by the covolume.
    """
    d = basis.d
    mn = min_norm(basis)            # r^2 = mn / 4
    covol = basis.covolume()
    r2 = rat(mn, 4)
    if d % 2 == 0:
        k = d // 2
        rational_part = r2 ** k / (rat(_factorial(k)) * covol)
        return pi_pow(k, prec) * ball(rational_part, prec)
    # odd d: (d/2)! = Gamma(d/2 + 1) = sqrt(pi) * d!! / 2^((d+1)/2), and the
    # sqrt(pi) cancels against pi^(d/2) = pi^((d-1)/2) * sqrt(pi).
    k = (d - 1) // 2
    rational_part = (r2 ** k) * (1 << ((d + 1) // 2)) / (rat(_double_factorial(d)) * covol)
    sqrt_r2 = ball(r2, prec).sqrt()
    return pi_pow(k, prec) * sqrt_r2 * ball(rational_part, prec)


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


# ----------------------------------------------------------------------
# exact closest-vector decoding

_SCAN_LIMIT_DIM = 10


def _candidate_ints(x: BigRational) -> List[int]:
    """Integers within (x - 3/2, x + 3/2): a provable superset of any
    per-coordinate value taken by a nearest parity-constrained point."""
    x = rat(x)
    lo_edge = x - rat(3, 2)
    lo = int(lo_edge) if lo_edge.denominator == 1 else None
    import math
    fl = _floor(lo_edge)
    start = fl + 1  # strictly greater than x - 3/2
    out = []
    c = start
    while c < x + rat(3, 2):
        out.append(c)
        c += 1
    return out


def _floor(x: BigRational) -> int:
    x = rat(x)
    n, d = int(x.numerator), int(x.denominator)
    return n // d


def _round_half_down(x: BigRational) -> int:
    """Nearest integer; exact halves go down (the lex-smaller choice)."""
    f = _floor(x)
    return f + 1 if x - f > rat(1, 2) else f


def _nearest_parity_scan(x: Sequence[BigRational], want_even: bool
                         ) -> Tuple[Vector, BigRational]:
    """All-minimizer scan over the 3^d candidate box with a parity filter."""
    cands = [_candidate_ints(v) for v in x]
    best: Optional[Tuple[BigRational, Tuple[int, ...]]] = None

    def rec(i: int, prefix: List[int], dist: BigRational):
        nonlocal best
        if best is not None and dist > best[0]:
            return
        if i == len(x):
            if (sum(prefix) % 2 == 0) != want_even:
                return
            key = (dist, tuple(prefix))
            if best is None or key < best:
                best = key
            return
        for c in sorted(cands[i]):
            rec(i + 1, prefix + [c], dist + (rat(c) - rat(x[i])) ** 2)

    rec(0, [], rat(0))
    if best is None:
        raise AssertionError("parity scan found no candidate")
    return tuple(rat(c) for c in best[1]), best[0]


def _nearest_parity_fast(x: Sequence[BigRational], want_even: bool
                         ) -> Tuple[Vector, BigRational]:
    """Conway-Sloane style decoder: round, then repair parity at the
    coordinate with the largest residual.  Exact distances; used beyond the
    scan dimension limit (ties may then resolve non-lexicographically)."""
    rounded = [_round_half_down(rat(v)) for v in x]
    if (sum(rounded) % 2 == 0) == want_even:
        v = tuple(rat(c) for c in rounded)
        return v, sum((a - rat(b)) ** 2 for a, b in zip(v, x))
    best = None
    for i in range(len(x)):
        for delta in (-1, 1):
            cand = list(rounded)
            cand[i] += delta
            dist = sum((rat(c) - rat(v)) ** 2 for c, v in zip(cand, x))
            key = (dist, tuple(cand))
            if best is None or key < best:
                best = key
    return tuple(rat(c) for c in best[1]), best[0]


def closest_vector(basis: LatticeBasis, x: Sequence[BigRational]
                   ) -> Tuple[Vector, BigRational]:
    """Exact nearest lattice vector and its squared distance.

    Ties are broken by the lexicographically smallest vector (guaranteed for
    d <= 10; the repair decoder takes over beyond that).
    """
    kind = basis.kind
    x = [rat(v) for v in x]
    if kind == "Z":
        v = tuple(rat(_round_half_down(vi)) for vi in x)
        return v, sum((a - b) ** 2 for a, b in zip(v, x))
    if kind == "D":
        decode = (_nearest_parity_scan if basis.d <= _SCAN_LIMIT_DIM
                  else _nearest_parity_fast)
        return decode(x, want_even=True)
    if kind == "E8":
        half = rat(1, 2)
        v0, d0 = _nearest_parity_scan(x, want_even=True)
        shifted = [vi - half for vi in x]
        v1i, _ = _nearest_parity_scan(shifted, want_even=True)
        v1 = tuple(c + half for c in v1i)
        d1 = sum((a - b) ** 2 for a, b in zip(v1, x))
        if d1 < d0 or (d1 == d0 and v1 < v0):
            return v1, d1
        return v0, d0
    raise UnsupportedLatticeError(str(kind))


# ----------------------------------------------------------------------
# holes of the checkerboard lattice

@dataclass(frozen=True)
class HolePair:
    shallow_point: Vector
    shallow_dist2: BigRational
    deep_point: Vector
    deep_dist2: BigRational


def holes_dd(d: int) -> HolePair:
    """Representative shallow and deep holes of D_d with certified distances."""
    if d < 3:
        raise BadDimensionError("holes of D_d need d >= 3")
    basis = make_lattice("Dd", d)
    shallow = tuple([rat(1)] + [rat(0)] * (d - 1))
    deep = tuple([rat(1, 2)] * d)
    _, ds = closest_vector(basis, shallow)
    _, dd = closest_vector(basis, deep)
    if ds != 1:
        raise AssertionError(f"shallow hole distance^2 {ds} != 1")
    if dd != rat(d, 4):
        raise AssertionError(f"deep hole distance^2 {dd} != {rat(d,4)}")
    return HolePair(shallow, ds, deep, dd)


# ----------------------------------------------------------------------
# distance-squared slices (figure-style grids)

def slice_grid(basis: LatticeBasis, u: Sequence[BigRational],
               v: Sequence[BigRational], extent, step
               ) -> List[Tuple[BigRational, BigRational, BigRational]]:
    """dist^2 to the lattice over the plane s*u + t*v, |s|,|t| <= extent."""
    extent, step = rat(extent), rat(step)
    if step <= 0 or extent <= 0:
        raise ValueError("extent and step must be positive")
    out = []
    s = -extent
    while s <= extent:
        t = -extent
        while t <= extent:
            pt = [s * rat(a) + t * rat(b) for a, b in zip(u, v)]
            _, d2 = closest_vector(basis, pt)
            out.append((s, t, d2))
            t += step
        s += step
    return out
