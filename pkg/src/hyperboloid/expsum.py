"""Exact Kloosterman and Ramanujan sums and the Weil-bound margin.

S(a, b; c) = sum over invertible residues g mod c of e((a*g + b*g^{-1})/c).
The sum is real (pair g with -g), so values are returned as a real part plus
an imaginary residual that doubles as a correctness diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .arith import factorize, mult_funcs

_TWO_PI = 2.0 * math.pi


class WeilViolation(AssertionError):
    """A Kloosterman value exceeded its Weil bound: implementation bug."""


@dataclass(frozen=True)
class KloostermanValue:
    real_part: float
    modulus: int
    residual_imag: float

    def __post_init__(self) -> None:
        if abs(self.residual_imag) > 1e-9 * self.modulus:
            raise AssertionError(
                f"Kloosterman sum mod {self.modulus} has imaginary residual "
                f"{self.residual_imag:.3e}; the gamma <-> -gamma pairing failed"
            )

    def __float__(self) -> float:
        return self.real_part


@lru_cache(maxsize=4096)
def _unit_inverse_pairs(c: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    units = tuple(g for g in range(1, c + 1) if math.gcd(g, c) == 1) if c > 1 else (0,)
    if c == 1:
        return (0,), (0,)
    invs = tuple(pow(g, -1, c) for g in units)
    return units, invs


def kloosterman(a: int, b: int, c: int) -> KloostermanValue:
    """Evaluate S(a, b; c) by direct summation over the phi(c) units."""
    if c < 1:
        raise ValueError("modulus must be positive")
    if c == 1:
        return KloostermanValue(1.0, 1, 0.0)
    units, invs = _unit_inverse_pairs(c)
    a %= c
    b %= c
    re = 0.0
    im = 0.0
    cre = 0.0
    cim = 0.0
    for g, gi in zip(units, invs):
        # exact residue reduction before the trig call keeps the angle small
        t = _TWO_PI * ((a * g + b * gi) % c) / c
        y = math.cos(t) - cre
        s = re + y
        cre = (s - re) - y
        re = s
        y = math.sin(t) - cim
        s = im + y
        cim = (s - im) - y
        im = s
    return KloostermanValue(re, c, im)


def ramanujan(q: int, n: int, check: bool = False) -> int:
    """Ramanujan sum S(0, n; q) via mu(q/(n,q)) * phi(q) / phi(q/(n,q)).

    With check=True the closed form is re-derived by direct summation and
    asserted equal (debug path).
    """
    if q < 1:
        raise ValueError("modulus must be positive")
    g = math.gcd(n, q) if n != 0 else q
    d = q // g
    mu_d, phi_d, _, _ = mult_funcs(d)
    phi_q = mult_funcs(q).phi
    value = mu_d * phi_q // phi_d
    if check:
        direct = kloosterman(0, n, q).real_part
        if abs(direct - value) > 1e-6:
            raise AssertionError(
                f"Ramanujan closed form {value} != direct sum {direct} "
                f"for (q, n) = ({q}, {n})"
            )
    return value


def weil_bound(a: int, b: int, c: int) -> float:
    """The sharp Weil bound d(c) * gcd(a, b, c)^(1/2) * c^(1/2)."""
    g = math.gcd(math.gcd(abs(a), abs(b)), c)
    if g == 0:
        g = c
    tau = mult_funcs(factorize(c)).tau
    return tau * math.sqrt(g) * math.sqrt(c)


def weil_margin(a: int, b: int, c: int) -> tuple[float, float, float]:
    """Return (bound, |S(a,b;c)|, slack); slack < 0 signals a bug."""
    bound = weil_bound(a, b, c)
    value = abs(kloosterman(a, b, c).real_part)
    slack = bound - value
    if slack < -1e-6:
        raise WeilViolation(
            f"S({a},{b};{c}) = {value} exceeds Weil bound {bound}"
        )
    return bound, value, slack


def weil_slack_scan(c_max: int, a_max: int, b_max: int) -> float:
    """Minimum Weil slack over 1 <= c <= c_max, 0 <= a <= a_max, |b| <= b_max.

    Vectorized batch path for the exhaustive scan: for each modulus the grid
    of sums is a pair of complex matrix products over the unit group.
    S(-a, -b; c) = S(a, b; c), so the a >= 0 half covers the full signed grid.
    """
    import numpy as np

    min_slack = math.inf
    a_all = np.arange(0, a_max + 1, dtype=np.int64)
    b_all = np.arange(-b_max, b_max + 1, dtype=np.int64)
    for c in range(1, c_max + 1):
        units, invs = _unit_inverse_pairs(c)
        g_arr = np.asarray(units, dtype=np.int64)
        gi_arr = np.asarray(invs, dtype=np.int64)
        ea = np.exp(2j * np.pi * np.outer(a_all % c, g_arr) / c)
        eb = np.exp(2j * np.pi * np.outer(b_all % c, gi_arr) / c)
        if c == 1:
            values = np.ones((a_all.size, b_all.size))
        else:
            values = np.abs(ea @ eb.T)
        tau = mult_funcs(factorize(c)).tau
        gcd_ab = np.gcd(np.gcd.outer(a_all, b_all), c)
        gcd_ab[gcd_ab == 0] = c
        bounds = tau * np.sqrt(gcd_ab.astype(np.float64)) * math.sqrt(c)
        slack = (bounds - values).min()
        if slack < min_slack:
            min_slack = float(slack)
        if min_slack < -1e-6:
            raise WeilViolation(f"Weil bound violated at modulus {c}")
    return min_slack
