"""Exact singular series P(n) and the truncated-Dirichlet-series check.

P(n) is the arithmetic factor of the main-term prediction: a double divisor
sum with per-prime Euler factors, exact in rational arithmetic.  For
square-free n it collapses to the product of (1 - (p-1)/(p^2(p+1))) over the
primes dividing n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import divisors, factorize, mult_funcs, prime_sieve, totient_sieve

# Euler-Mascheroni constant to 30 significant digits.
EULER_GAMMA = 0.577215664901532860606512090082

# Truncation point of the free-prime log sum; the tail is below 1/PRIME_CUTOFF.
PRIME_CUTOFF = 10**7


class EvenInput(ValueError):
    """The singular series is defined for odd n only."""


class NotSquarefree(ValueError):
    """The product form requires square-free n."""


class BadCoprimality(ValueError):
    """The partial-sum constants require gcd(beta2, 2*beta1) = 1."""


@dataclass(frozen=True)
class SingularSeries:
    n: int
    value: Fraction
    via: str

    def __post_init__(self) -> None:
        if not 0 < self.value <= 1:
            raise AssertionError(f"P({self.n}) = {self.value} outside (0, 1]")


def singular_series(n: int) -> SingularSeries:
    """P(n) by the defining double divisor sum, exact."""
    if n % 2 == 0:
        raise EvenInput(f"n = {n} must be odd")
    total = Fraction(0)
    for f in divisors(n):
        nf = n // f
        for g in divisors(nf):
            m = nf // g
            term = Fraction(1, f * g)
            for p in factorize(g).primes:
                if m % p == 0:
                    term *= 1 - Fraction(2, p) - Fraction(p - 1, p * (p + 1))
                else:
                    term *= 1 - Fraction(p - 1, p * (p + 1))
            for p in factorize(m).primes:
                if g % p != 0:
                    term *= 1 - Fraction(2, p)
            total += term
    return SingularSeries(n=n, value=total, via="general")


def singular_series_squarefree(n: int) -> SingularSeries:
    """P(n) = prod over p | n of (1 - (p-1)/(p^2(p+1))); square-free n only."""
    if n % 2 == 0:
        raise EvenInput(f"n = {n} must be odd")
    fac = factorize(n)
    if any(e > 1 for _, e in fac.factors):
        raise NotSquarefree(f"n = {n} has a square factor")
    value = Fraction(1)
    for p in fac.primes:
        value *= 1 - Fraction(p - 1, p * p * (p + 1))
    return SingularSeries(n=n, value=value, via="squarefree_product")


def main_term_predict(n: int, M: float, phi_hat0: float) -> float:
    """Predicted all-signs window count: (32/pi) P(n) log(n) M phi_hat0.

    Advisory range n^(7/8) <= M <= n: outside it the prediction is still
    returned but carries no asymptotic meaning at any scale.
    """
    if phi_hat0 <= 0:
        raise ValueError("phi_hat0 must be positive")
    if not (n ** (7.0 / 8.0) <= M <= n):
        import warnings

        warnings.warn(
            f"M = {M} outside the advisory window [n^(7/8), n] for n = {n}",
            stacklevel=2,
        )
    p_n = singular_series(n).value
    return 32.0 / math.pi * float(p_n) * math.log(n) * M * phi_hat0


@dataclass(frozen=True)
class PerronCheck:
    beta1: int
    beta2: int
    Z: float
    direct: float
    predicted: float

    @property
    def error(self) -> float:
        return self.direct - self.predicted


_prime_log_sum_cache: dict[int, float] = {}


def _free_prime_log_sum(cutoff: int = PRIME_CUTOFF) -> float:
    """sum over primes p <= cutoff of log(p)/(p^2-1); tail is about 1/cutoff."""
    cached = _prime_log_sum_cache.get(cutoff)
    if cached is None:
        import numpy as np

        ps = prime_sieve(cutoff).astype(np.float64)
        cached = float(np.sum(np.log(ps) / (ps * ps - 1.0)))
        _prime_log_sum_cache[cutoff] = cached
    return cached


_totient_cache: dict[str, object] = {}


def _totients(limit: int):
    tab = _totient_cache.get("tab")
    if tab is None or len(tab) <= limit:
        tab = totient_sieve(limit)
        _totient_cache["tab"] = tab
    return tab


def phi_partial_sum_check(beta1: int, beta2: int, Z: float) -> PerronCheck:
    """Compare the partial sum of phi(a*beta2)/(a^2*beta2) with its residue.

    direct: exact terms over a <= Z with gcd(a, 2*beta1) = 1, each rounded
    once and summed exactly.  predicted: P1 * (S1 + gamma + log Z) where
    P1 = (6/pi^2) * prod_{p | 2 b1 b2} p/(p+1) and S1 collects log p/(p-1)
    over p | 2 b1 plus log p/(p^2-1) over the remaining primes.
    """
    if Z < 2:
        raise ValueError("Z must be at least 2")
    f1 = factorize(beta1)
    f2 = factorize(beta2)
    if beta1 % 2 == 0 or any(e > 1 for _, e in f1.factors + f2.factors):
        raise ValueError("beta1 must be odd square-free, beta2 square-free")
    if math.gcd(beta2, 2 * beta1) != 1:
        raise BadCoprimality(f"gcd({beta2}, 2*{beta1}) != 1")

    z_int = int(Z)
    tab = _totients(max(z_int * beta2, 2 * beta2))
    terms = []
    for a in range(1, z_int + 1, 2):  # odd a only: gcd(a, 2 beta1) needs odd a
        if beta1 > 1 and math.gcd(a, beta1) != 1:
            continue
        terms.append(int(tab[a * beta2]) / (a * a * beta2))
    direct = math.fsum(terms)

    shared = {2} | set(f1.primes) | set(f2.primes)
    p1 = 6.0 / math.pi**2
    for p in sorted(shared):
        p1 *= p / (p + 1.0)
    s1 = math.fsum(math.log(p) / (p - 1.0) for p in sorted({2} | set(f1.primes)))
    s1 += _free_prime_log_sum() - math.fsum(
        math.log(p) / (p * p - 1.0) for p in sorted(shared)
    )
    predicted = p1 * (s1 + EULER_GAMMA + math.log(Z))
    return PerronCheck(beta1=beta1, beta2=beta2, Z=Z, direct=direct, predicted=predicted)
