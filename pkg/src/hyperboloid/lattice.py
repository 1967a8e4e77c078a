"""Exact enumeration of x1^2 + x2^2 - x3^2 = n^2 and the smoothed window sums.

Everything in this module is evaluated literally from the defining sums, so it
serves as the ground truth against which the reparameterized evaluations in
`transform` are checked.  Summation is exactly rounded (math.fsum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import divisors, factorize
from .weights import WeightSystem

_INT_CAP = 2**63


class Overflow(OverflowError):
    """Intermediate value left the supported integer range."""


@dataclass(frozen=True)
class Triple:
    x1: int
    x2: int
    x3: int

    def check(self, n: int) -> None:
        if self.x1**2 + self.x2**2 - self.x3**2 != n * n or self.x3 % 2 != 0:
            raise ValueError(f"{self} is not a window solution for n={n}")


@dataclass(frozen=True)
class SolutionSet:
    n: int
    window: tuple[int, int]
    triples: tuple[Triple, ...]


def _sqrt_exact(m: int) -> int | None:
    r = math.isqrt(m)
    return r if r * r == m else None


def two_square_reps_loop(N: int) -> list[tuple[int, int]]:
    """All signed (x1, x2) with x1^2 + x2^2 = N by scanning x1 in [0, sqrt(N)]."""
    if N < 0:
        return []
    if N == 0:
        return [(0, 0)]
    out = set()
    for x1 in range(math.isqrt(N) + 1):
        x2 = _sqrt_exact(N - x1 * x1)
        if x2 is not None:
            out.update({(x1, x2), (x1, -x2), (-x1, x2), (-x1, -x2)})
    return sorted(out)


def _sqrt_minus_one(p: int) -> int:
    """A square root of -1 modulo a prime p = 1 mod 4."""
    for u in range(2, p):
        z = pow(u, (p - 1) // 2, p)
        if z == p - 1:
            return pow(u, (p - 1) // 4, p)
    raise ArithmeticError(f"no quadratic nonresidue found modulo {p}")


def _cornacchia_prime(p: int) -> tuple[int, int]:
    """One (r, s) with r^2 + s^2 = p for a prime p = 1 mod 4."""
    x0 = _sqrt_minus_one(p)
    if x0 < p // 2:
        x0 = p - x0
    a, b = p, x0
    limit = math.isqrt(p)
    while b > limit:
        a, b = b, a % b
    s = _sqrt_exact(p - b * b)
    if s is None:
        raise ArithmeticError(f"Cornacchia descent failed for {p}")
    return b, s


def two_square_reps_factored(N: int) -> list[tuple[int, int]]:
    """All signed (x1, x2) with x1^2 + x2^2 = N via Gaussian-integer composition."""
    if N < 0:
        return []
    if N == 0:
        return [(0, 0)]
    fac = factorize(N)
    base = 1
    two_exp = 0
    split_primes = []
    for p, e in fac.factors:
        if p == 2:
            two_exp = e
        elif p % 4 == 3:
            if e % 2 == 1:
                return []
            base *= p ** (e // 2)
        else:
            split_primes.append((p, e))
    gaussians = [(base, 0)]
    for _ in range(two_exp):
        gaussians = [(x - y, x + y) for (x, y) in gaussians]
    for p, e in split_primes:
        r, s = _cornacchia_prime(p)
        choices = []
        for k in range(e + 1):
            x, y = 1, 0
            for _ in range(k):
                x, y = x * r - y * s, x * s + y * r
            for _ in range(e - k):
                x, y = x * r + y * s, y * r - x * s
            choices.append((x, y))
        gaussians = [
            (gx * cx - gy * cy, gx * cy + gy * cx)
            for (gx, gy) in gaussians
            for (cx, cy) in choices
        ]
    out = set()
    for x, y in gaussians:
        out.update(
            {
                (x, y),
                (-x, y),
                (x, -y),
                (-x, -y),
                (y, x),
                (-y, x),
                (y, -x),
                (-y, -x),
            }
        )
    return sorted(out)


def two_square_reps(N: int) -> list[tuple[int, int]]:
    """Complete signed representation list x1^2 + x2^2 = N (factorization path)."""
    if N > 2 * 10**18:
        raise Overflow(f"N = {N} exceeds the supported range")
    return two_square_reps_factored(N)


def r2_count(N: int) -> int:
    """Number of signed representations of N as a sum of two squares."""
    if N < 0:
        return 0
    if N == 0:
        return 1
    count = 4
    for p, e in factorize(N).factors:
        if p % 4 == 3:
            if e % 2 == 1:
                return 0
        elif p % 4 == 1:
            count *= e + 1
    return count


def _x3_range(w: WeightSystem, lo: float | None, hi: float | None) -> range:
    lo = w.M if lo is None else lo
    hi = 2.0 * w.M if hi is None else hi
    start = int(math.ceil(lo))
    start += start % 2  # first even x3 in the window
    return range(start, int(math.floor(hi)) + 1, 2)


def _check_range(w: WeightSystem) -> None:
    if w.n * w.n + 4 * int(w.M) ** 2 + 4 * int(w.M) + 1 > _INT_CAP:
        raise Overflow(f"n^2 + x3^2 exceeds 2^63 for n={w.n}, M={w.M}")


def smoothed_sum_S(
    w: WeightSystem, x3_lo: float | None = None, x3_hi: float | None = None
) -> float:
    """Sum of phi1(x1) phi2(x2) phi3(x3) over solutions with x3 even, all signs.

    phi1 vanishes on non-positive arguments, so only the positive-quadrant
    representations contribute; the enumeration walks even x3 across the phi3
    window and expands n^2 + x3^2 into two squares.
    """
    _check_range(w)
    phi1_cache: dict[int, float] = {}

    def phi1(v: int) -> float:
        r = phi1_cache.get(v)
        if r is None:
            r = w.phi1_s(v)
            phi1_cache[v] = r
        return r

    terms = []
    nn = w.n * w.n
    for x3 in _x3_range(w, x3_lo, x3_hi):
        w3 = w.phi3_s(x3)
        if w3 == 0.0:
            continue
        for x1, x2 in two_square_reps(nn + x3 * x3):
            if x1 >= 1 and x2 >= 1:
                t = phi1(x1) * phi1(x2)
                if t != 0.0:
                    terms.append(t * w3)
    return math.fsum(terms)


def smoothed_sum_S1(
    w: WeightSystem, x3_lo: float | None = None, x3_hi: float | None = None
) -> float:
    """Same as smoothed_sum_S but restricted to odd x2 (and even x3)."""
    _check_range(w)
    terms = []
    nn = w.n * w.n
    for x3 in _x3_range(w, x3_lo, x3_hi):
        w3 = w.phi3_s(x3)
        if w3 == 0.0:
            continue
        for x1, x2 in two_square_reps(nn + x3 * x3):
            if x1 >= 1 and x2 >= 1 and x2 % 2 == 1:
                t = w.phi1_s(x1) * w.phi1_s(x2)
                if t != 0.0:
                    terms.append(t * w3)
    return math.fsum(terms)


@dataclass(frozen=True)
class S1Split:
    """The odd-x2 sum split at a1 = gcd(a, n-2c) vs a2 = gcd(a, n+2c).

    sharp carries the indicator a1 > a2 and flat its complement a2 >= a1;
    the minus/plus entries replace the indicator with the smooth sandwich
    weights phi_minus/phi_plus of the ratio.
    """

    sharp: float
    flat: float
    sharp_minus: float
    sharp_plus: float
    flat_minus: float
    flat_plus: float

    @property
    def total(self) -> float:
        return self.sharp + self.flat


def s1_split_direct(w: WeightSystem) -> S1Split:
    """Evaluate the divisor-sum form of S1: x1 = 2c, a | (n-2c)(n+2c).

    For each admissible odd a the partner b = (n^2-4c^2)/a reconstructs
    x2 = (a+b)/2 and x3 = (a-b)/2; the weights cut the sums to finitely many
    terms and force x2 odd, x3 even automatically.
    """
    _check_range(w)
    n = w.n
    acc = {k: [] for k in ("sh", "fl", "shm", "shp", "flm", "flp")}
    c_hi = int(math.ceil(w.X))
    for c in range(1, c_hi + 1):
        w1 = w.phi1_s(2 * c)
        if w1 == 0.0:
            continue
        disc = n * n - 4 * c * c
        for d in divisors(abs(disc)):
            for a in (d, -d):
                b = disc // a
                x2 = (a + b) // 2
                x3 = (a - b) // 2
                w2 = w.phi1_s(x2)
                if w2 == 0.0:
                    continue
                w3 = w.phi3_s(x3)
                if w3 == 0.0:
                    continue
                wgt = w1 * w2 * w3
                a1 = math.gcd(a, n - 2 * c)
                a2 = math.gcd(a, n + 2 * c)
                if a1 > a2:
                    acc["sh"].append(wgt)
                else:
                    acc["fl"].append(wgt)
                ratio = a1 / a2
                acc["shm"].append(wgt * w.phi_minus_s(ratio))
                acc["shp"].append(wgt * w.phi_plus_s(ratio))
                acc["flm"].append(wgt * w.phi_minus_s(1.0 / ratio))
                acc["flp"].append(wgt * w.phi_plus_s(1.0 / ratio))
    return S1Split(
        sharp=math.fsum(acc["sh"]),
        flat=math.fsum(acc["fl"]),
        sharp_minus=math.fsum(acc["shm"]),
        sharp_plus=math.fsum(acc["shp"]),
        flat_minus=math.fsum(acc["flm"]),
        flat_plus=math.fsum(acc["flp"]),
    )


def s1_sharp_pm_direct(w: WeightSystem, sign: str, part: str = "sharp") -> float:
    """Smooth-sandwich bound of the sharp (or flat) split, sign in {minus, plus}."""
    split = s1_split_direct(w)
    key = {
        ("sharp", "minus"): split.sharp_minus,
        ("sharp", "plus"): split.sharp_plus,
        ("flat", "minus"): split.flat_minus,
        ("flat", "plus"): split.flat_plus,
    }.get((part, sign))
    if key is None:
        raise ValueError(f"unknown part/sign combination ({part}, {sign})")
    return key


def all_signs_window_count(w: WeightSystem) -> float:
    """Sum of phi3(x3) * r2(n^2 + x3^2) over even x3: all sign choices of x1, x2."""
    _check_range(w)
    terms = []
    nn = w.n * w.n
    for x3 in _x3_range(w, None, None):
        w3 = w.phi3_s(x3)
        if w3 != 0.0:
            terms.append(w3 * r2_count(nn + x3 * x3))
    return math.fsum(terms)


def enumerate_solutions(n: int, x3_lo: int, x3_hi: int) -> SolutionSet:
    """All solutions with even x3 in [x3_lo, x3_hi], all signs of x1 and x2."""
    triples = []
    nn = n * n
    start = x3_lo + (x3_lo % 2)
    for x3 in range(start, x3_hi + 1, 2):
        target = nn + x3 * x3
        if target > 2 * 10**18:
            raise Overflow(f"n^2 + x3^2 = {target} exceeds the supported range")
        for x1, x2 in two_square_reps(target):
            triples.append(Triple(x1, x2, x3))
    return SolutionSet(n=n, window=(x3_lo, x3_hi), triples=tuple(triples))
