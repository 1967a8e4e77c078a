"""Integer factorization, divisor enumeration and multiplicative functions.

Everything here is exact.  Rational values (sigma_{-1}, the singular series)
are carried by `fractions.Fraction`, which already guarantees a reduced
numerator/denominator pair with positive denominator.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

ExactRational = Fraction

# Deterministic Miller-Rabin witness set, valid for all n < 3.3 * 10^24,
# comfortably covering the 2^63 input cap.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_LIMIT = 10**6


class NotInvertible(ArithmeticError):
    """Raised when a modular inverse is requested for gcd(a, m) > 1."""


def _small_primes(limit: int = 1010) -> tuple[int, ...]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return tuple(i for i, v in enumerate(sieve) if v)


# Primes up to 1009 suffice for trial division of any n < 10^6.
_PRIMES_1K = _small_primes()


def is_prime(n: int) -> bool:
    """Deterministic primality test for 0 <= n < 2^64 (Miller-Rabin witnesses)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    """Return a nontrivial factor of composite odd n (Brent-cycle Pollard rho)."""
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition: value == prod(p**e), primes strictly increasing."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factor list for {self.value}")
            prod *= p**e
            last = p
        if prod != self.value or self.value < 1:
            raise ValueError(f"factor list does not recompose {self.value}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0


def factorize(n: int, _seed: int = 0xD1E5) -> Factorization:
    """Factor 1 <= n <= 2^63: trial division below 10^6, Pollard-Brent above."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    if n > 2**63:
        raise OverflowError(f"factorize input {n} exceeds the 2^63 cap")
    if n == 1:
        return Factorization(1, ())
    value = n
    fac: dict[int, int] = {}

    def strip(m: int, p: int) -> int:
        while m % p == 0:
            fac[p] = fac.get(p, 0) + 1
            m //= p
        return m

    if n < _TRIAL_LIMIT:
        for p in _PRIMES_1K:
            if p * p > n:
                break
            n = strip(n, p)
        if n > 1:
            fac[n] = fac.get(n, 0) + 1
        return Factorization(value, tuple(sorted(fac.items())))

    for p in _PRIMES_1K[:200]:
        if p * p > n:
            break
        n = strip(n, p)

    rng = random.Random(_seed ^ value)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            fac[m] = fac.get(m, 0) + 1
            continue
        d = _pollard_brent(m, rng)
        stack.append(d)
        stack.append(m // d)
    return Factorization(value, tuple(sorted(fac.items())))


def divisors(n: int | Factorization) -> list[int]:
    """All positive divisors of n, ascending."""
    f = n if isinstance(n, Factorization) else factorize(n)
    divs = [1]
    for p, e in f.factors:
        pk = 1
        block = []
        for _ in range(e):
            pk *= p
            block.extend(d * pk for d in divs)
        divs.extend(block)
    return sorted(divs)


class MultFuncs(NamedTuple):
    mu: int
    phi: int
    tau: int
    sigma_minus1: Fraction


def mult_funcs(n: int | Factorization) -> MultFuncs:
    """Moebius mu, Euler phi, divisor count d and sigma_{-1}, all exact."""
    f = n if isinstance(n, Factorization) else factorize(n)
    mu = 1
    phi = 1
    tau = 1
    sig = Fraction(1)
    for p, e in f.factors:
        mu = 0 if e > 1 else -mu
        phi *= (p - 1) * p ** (e - 1)
        tau *= e + 1
        sig *= Fraction(p ** (e + 1) - 1, p**e * (p - 1))
    return MultFuncs(mu, phi, tau, sig)


def mobius(n: int | Factorization) -> int:
    return mult_funcs(n).mu


def euler_phi(n: int | Factorization) -> int:
    return mult_funcs(n).phi


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m in [0, m); m = 1 gives 0."""
    if m < 1:
        raise ValueError("modulus must be positive")
    try:
        return pow(a, -1, m)
    except ValueError as exc:
        raise NotInvertible(f"{a} is not invertible modulo {m}") from exc


def totient_sieve(limit: int):
    """Euler phi for 0..limit as an int64 numpy array (phi[0] = 0)."""
    import numpy as np

    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:  # p prime
            phi[p::p] -= phi[p::p] // p
    return phi


def prime_sieve(limit: int):
    """All primes up to limit as an int64 numpy array."""
    import numpy as np

    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def random_60bit(rng: random.Random) -> int:
    return rng.randrange(1 << 59, 1 << 60)


def iter_coprime_divisor_pairs(n: int) -> Iterator[tuple[int, int]]:
    """All ordered pairs (d1, d2) with d1*d2 | n and gcd(d1, d2) = 1."""
    for d1 in divisors(n):
        for d2 in divisors(n // d1):
            if math.gcd(d1, d2) == 1:
                yield d1, d2
