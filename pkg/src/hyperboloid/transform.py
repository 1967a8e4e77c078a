"""Nine-index divisor reparameterization and its Poisson/Kloosterman dual.

The lower-sandwich window sum over solutions is rearranged exactly into a
nested divisor sum over a nine-tuple (e, g, s, v1, v2, beta1, beta2, m1, m2)
with inner sums over alpha2, alpha1 and a residue class of k.  Poisson
summation in (alpha1, k) turns each inner block into a lattice of Kloosterman
sums against 2-D Fourier integrals of the weight window.  Both routes are
implemented here and checked against each other and against the direct
evaluations in `lattice`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numpy.polynomial.legendre import leggauss

from .arith import divisors, mobius
from .expsum import kloosterman
from .weights import QuadratureFailure, WeightSystem, canonical_profile_mass


@dataclass(frozen=True)
class ChainIndex:
    """One node of the divisor chain with its divisibility/coprimality laws."""

    e: int
    g: int
    s: int
    v1: int
    v2: int
    beta1: int
    beta2: int
    m1: int
    m2: int

    def __post_init__(self) -> None:
        e, g, s, v1, v2, b1, b2, m1, m2 = (
            self.e, self.g, self.s, self.v1, self.v2,
            self.beta1, self.beta2, self.m1, self.m2,
        )
        ok = (
            min(e, g, s, v1, v2, b1, b2, m1, m2) >= 1
            and e % g == 0
            and g % s == 0
            and (g // s) % v1 == 0
            and (g // s) % v2 == 0
            and math.gcd(v1, v2) == 1
            and (g // s) % (v1 * b2) == 0
            and (g // s) % (v2 * b1) == 0
            and math.gcd(b2 * v1, b1 * v2) == 1
            and math.gcd(m1, m2) == 1
            and math.gcd(m1, g // (b1 * v2 * s)) == 1
            and math.gcd(m2, g // (b2 * v1 * s)) == 1
        )
        if not ok:
            raise ValueError(f"invalid chain index {self}")

    def validate_for(self, n: int) -> None:
        base = self.e * self.s * self.v1 * self.v2
        if n % self.e or n % base or (n // base) % (self.m1 * self.m2):
            raise ValueError(f"{self} incompatible with n = {n}")

    # the derived block parameters of the inner (alpha1, k) sums
    @property
    def A(self) -> int:
        return self.beta1 * self.m1 * self.m2 * self.v1 * self.v2 * self.s * self.e

    @property
    def B(self) -> int:
        return self.m1 * self.m2 * self.v1 * self.v2 * self.e * self.g

    @property
    def C(self) -> int:
        return self.beta1 * self.s

    @property
    def D(self) -> int:
        return self.m1 * self.m2 * self.v1 * self.v2 * self.beta1**2 * self.s**2 * self.e

    def E_for(self, n: int) -> int:
        den = self.m1 * self.m2 * self.v1 * self.v2 * self.s * self.e
        if (2 * n) % den:
            raise ValueError(f"2n/{den} not integral for n = {n}")
        return 2 * n // den

    @property
    def mobius_weight(self) -> int:
        return mobius(self.m1 * self.beta1 * self.v2 * self.s) * mobius(
            self.m2 * self.beta2 * self.v1 * self.s
        )


def enumerate_chain(n: int) -> Iterator[ChainIndex]:
    """All chain indices for odd n, each exactly once."""
    if n < 1 or n % 2 == 0:
        raise ValueError("chain enumeration requires odd n >= 1")
    for e in divisors(n):
        rem_e = n // e
        for g in divisors(e):
            for s in divisors(math.gcd(g, rem_e)):
                gs = g // s
                rem_s = rem_e // s
                for v1 in divisors(math.gcd(gs, rem_s)):
                    for v2 in divisors(math.gcd(gs, rem_s // v1)):
                        if math.gcd(v1, v2) != 1:
                            continue
                        rem_v = rem_s // (v1 * v2)
                        for beta2 in divisors(gs // v1):
                            for beta1 in divisors(gs // v2):
                                if math.gcd(beta2 * v1, beta1 * v2) != 1:
                                    continue
                                g_co1 = g // (beta1 * v2 * s)
                                g_co2 = g // (beta2 * v1 * s)
                                for m1 in divisors(rem_v):
                                    if math.gcd(m1, g_co1) != 1:
                                        continue
                                    for m2 in divisors(rem_v // m1):
                                        if math.gcd(m2, m1) != 1:
                                            continue
                                        if math.gcd(m2, g_co2) != 1:
                                            continue
                                        yield ChainIndex(
                                            e, g, s, v1, v2, beta1, beta2, m1, m2
                                        )


@dataclass(frozen=True)
class TParams:
    """Parameters of one inner block: chain node, parity labels mu/nu, alpha2."""

    chain: ChainIndex
    mu: int
    nu: int
    alpha2: int

    def __post_init__(self) -> None:
        if self.mu not in (1, 2) or self.nu not in (1, 2):
            raise ValueError("mu and nu must be 1 or 2")
        if self.alpha2 < 1 or math.gcd(self.alpha2, 2 * self.chain.beta1) != 1:
            raise ValueError(f"alpha2 = {self.alpha2} must be odd and coprime to beta1")

    @property
    def modulus(self) -> int:
        return self.alpha2 * self.chain.beta2

    @property
    def G(self) -> int:
        c = self.chain
        return self.mu * self.nu * c.m1 * c.m2 * c.v1 * c.v2 * c.beta1 * c.s * c.e

    def alpha2_limit(self, w: WeightSystem) -> float:
        c = self.chain
        return 2.0 * math.sqrt(w.X) / (c.v2 * c.m1 * math.sqrt(c.e * c.g))


# ---- exact lattice-side evaluation of the inner blocks ----


def _lattice_block(
    w: WeightSystem,
    ci: ChainIndex,
    alpha2: int,
    mu: int,
    nu: int,
    parity: bool,
    m_coprime: bool = False,
) -> float:
    """Inner double sum over (alpha1, k) for one chain node and one alpha2.

    parity=True restricts alpha1 and k to odd values (the raw chain block,
    which also requires mu = nu = 1); parity=False evaluates the mu/nu block
    with no parity constraints.  Loops are truncated exactly by the weight
    supports, never by analytic bounds.

    m_coprime=True additionally requires gcd(alpha1, m1 v2) = 1.  Together
    with gcd(alpha2, m2 v1) = 1 at the caller this keeps the two inner
    gcd-cofactors d1 = alpha1 v1 m2 and d2 = alpha2 v2 m1 coprime, which the
    rearranged sum is built on; without these the Moebius cancellation
    mis-counts solutions whose d1, d2 share a prime (first visible at n = 105
    through a shared m-factor, and at n = 135 through a shared v-factor).
    The mu/nu blocks fed into the dual-sum identity keep the unrestricted
    convention.
    """
    n = w.n
    A, B, C, D, g = ci.A, ci.B, ci.C, ci.D, ci.g
    E = ci.E_for(n)
    c = alpha2 * ci.beta2
    muv = mu * nu
    xb = alpha2 * mu * B
    x_hi = int((2.0 * w.X + 2.0 * w.M) // xb)
    lo_sum = w.M + 0.5 * w.Y
    den = 2 * g * alpha2
    terms: list[float] = []
    phi1_cache: dict[int, float] = {}

    for x in range(1, x_hi + 1):
        if parity and x % 2 == 0:
            continue
        if math.gcd(x, c) != 1:
            continue
        if m_coprime and math.gcd(x, ci.m1 * ci.v2) != 1:
            continue
        if mu * ci.v1 * ci.m2 * x <= alpha2 * ci.v2 * ci.m1:
            continue  # phi_minus argument <= 1
        if xb * x <= lo_sum:
            continue  # F2 + F3 below the joint support
        w4 = w.phi_minus_s(mu * ci.v1 * ci.m2 * x / (alpha2 * ci.v2 * ci.m1))
        if w4 == 0.0:
            continue
        g1 = muv * A * x
        k_lo = int(math.floor((0.5 * w.Y - n) / g1)) - 1
        k_hi = int(math.ceil((2.0 * w.X - n) / g1)) + 1
        if c == 1:
            k0, step = k_lo, 1
        else:
            r = (-E * pow(muv * x * ci.beta1 % c, -1, c)) % c
            k0 = k_lo + (r - k_lo) % c
            step = c
        if parity:
            # step is odd (c odd), so one extra step fixes the parity of k0
            if k0 % 2 == 0:
                k0 += step
            step *= 2
        base = alpha2 * xb * g * x  # = alpha2^2 * mu * B * g * x
        for k in range(k0, k_hi + 1, step):
            f1 = n + g1 * k
            w1 = phi1_cache.get(f1)
            if w1 is None:
                w1 = w.phi1_s(f1)
                phi1_cache[f1] = w1
            if w1 == 0.0:
                continue
            p_num = 2 * n * nu * C * k + muv * nu * D * x * k * k
            w2 = w.phi1_s((base - p_num) / den)
            if w2 == 0.0:
                continue
            w3 = w.phi3_s((base + p_num) / den)
            if w3 == 0.0:
                continue
            terms.append(w1 * w2 * w3 * w4)
    return math.fsum(terms)


def t_direct(w: WeightSystem, p: TParams) -> float:
    """The (mu, nu) block as a finite double sum over alpha1 and k."""
    p.chain.validate_for(w.n)
    return _lattice_block(w, p.chain, p.alpha2, p.mu, p.nu, parity=False)


def chain_alpha2_block(
    w: WeightSystem, ci: ChainIndex, alpha2: int, m_coprime: bool = True
) -> float:
    """Odd-odd inner block of the chain at one alpha2 (no Moebius factor)."""
    ci.validate_for(w.n)
    return _lattice_block(w, ci, alpha2, 1, 1, parity=True, m_coprime=m_coprime)


def s1_sharp_minus_chain(w: WeightSystem) -> float:
    """Evaluate the lower-sandwich sum through the full divisor chain.

    Must agree with lattice.s1_sharp_pm_direct(w, "minus"): the chain is an
    exact rearrangement, so the two evaluations differ only by rounding.
    The inner sums carry gcd(alpha2, m2 v1) = 1 and gcd(alpha1, m1 v2) = 1
    (see _lattice_block): these keep d1 = alpha1 v1 m2 and d2 = alpha2 v2 m1
    coprime, which the rearrangement requires.
    """
    span = 2.0 * w.X + 2.0 * w.M
    terms: list[float] = []
    for ci in enumerate_chain(w.n):
        mw = ci.mobius_weight
        if mw == 0:
            continue
        vm = ci.v2 * ci.m1
        wm = ci.v1 * ci.m2
        alpha2 = 1
        while True:
            x_min = alpha2 * vm // wm + 1
            if alpha2 * ci.B * x_min > span:
                break
            if (
                math.gcd(alpha2, 2 * ci.beta1) == 1
                and math.gcd(alpha2, ci.m2 * ci.v1) == 1
            ):
                block = _lattice_block(
                    w, ci, alpha2, 1, 1, parity=True, m_coprime=True
                )
                if block != 0.0:
                    terms.append(mw * block)
            alpha2 += 2  # even alpha2 never coprime to 2*beta1
    return math.fsum(terms)


# ---- 2-D Fourier integrals of the weight window ----


def _support_box(w: WeightSystem, p: TParams) -> tuple[float, float, float, float] | None:
    ci = p.chain
    xb = p.alpha2 * p.mu * ci.B
    x_hi = (2.0 * w.X + 2.0 * w.M) / xb
    x_lo = max(
        (w.M + 0.5 * w.Y) / xb,
        p.alpha2 * ci.v2 * ci.m1 / (p.mu * ci.v1 * ci.m2),
    )
    if x_lo >= x_hi:
        return None
    g1_lo = p.mu * p.nu * ci.A * x_lo
    y_lo = (0.5 * w.Y - w.n) / g1_lo
    y_hi = (2.0 * w.X - w.n) / g1_lo
    return x_lo, x_hi, y_lo, y_hi


def _phi_grid(
    w: WeightSystem, p: TParams, xs: np.ndarray, ys: np.ndarray
) -> np.ndarray:
    """Weight window on the tensor grid xs x ys (vectorized)."""
    ci = p.chain
    mu, nu, a2 = p.mu, p.nu, p.alpha2
    xcol = xs[:, None]
    yrow = ys[None, :]
    f1 = w.n + mu * nu * ci.A * xcol * yrow
    pmix = (2.0 * w.n * nu * ci.C * yrow + mu * nu * nu * ci.D * xcol * yrow**2) / (
        2.0 * ci.g * a2
    )
    lead = 0.5 * a2 * mu * ci.B * xcol
    vals = w.phi1(f1)
    vals *= w.phi1(lead - pmix)
    vals *= w.phi3(lead + pmix)
    vals *= w.phi_minus(mu * ci.v1 * ci.m2 * xs / (a2 * ci.v2 * ci.m1))[:, None]
    return vals


def _panel_nodes(edges: np.ndarray, gx, gw):
    """Gauss-Legendre nodes/weights on a (possibly graded) panel mesh."""
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    weights = (half[:, None] * gw[None, :]).ravel()
    return nodes, weights


def _quantile_edges(probes: np.ndarray, density: np.ndarray, n_panels: int):
    """Panel edges equidistributing the given density along the probes."""
    cum = np.concatenate(
        ([0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(probes)))
    )
    targets = np.linspace(0.0, cum[-1], n_panels + 1)
    return np.interp(targets, cum, probes)


def _strip_mesh(w: WeightSystem, p: TParams, a: float, b: float, wmax: int, lmax: int):
    """Mesh hints for the x-strip [a, b]: graded x-density, y-box, y panels.

    The admissible |y| shrinks like 1/x, so each strip carries its own tight
    y-range (taken at its left edge) and its own worst-case y-feature density
    (taken at its right edge); oscillation adds a panel per two wavelengths.
    """
    ci = p.chain
    mu, nu, a2 = p.mu, p.nu, p.alpha2
    c = p.modulus
    half_y = 0.5 * w.Y
    g1_left = mu * nu * ci.A * a
    y_lo = (0.5 * w.Y - w.n) / g1_left
    y_hi = (2.0 * w.X - w.n) / g1_left
    probes = np.linspace(a, b, 129)
    ybig = max(abs(y_lo), abs(y_hi)) * a / probes
    d_rise_x = 0.5 * a2 * mu * ci.B + mu * nu * nu * ci.D * ybig**2 / (2.0 * ci.g * a2)
    feat = np.minimum(half_y / d_rise_x, half_y / (mu * nu * ci.A * ybig))
    feat = np.minimum(feat, 0.5 * a2 * ci.v2 * ci.m1 / (mu * ci.v1 * ci.m2))
    dens_x = np.maximum(1.0 / feat, wmax / (2.0 * c))
    d1_dy = mu * nu * ci.A * b
    d2_dy = (
        2.0 * w.n * nu * ci.C
        + 2.0 * mu * nu * nu * ci.D * b * max(abs(y_lo), abs(y_hi))
    ) / (2.0 * ci.g * a2)
    dens_y = max(d1_dy / half_y, d2_dy / half_y, lmax / (2.0 * c))
    ny = max(4, int(math.ceil((y_hi - y_lo) * dens_y)))
    nx = max(
        4,
        int(math.ceil(np.trapezoid(dens_x, probes)))
        if hasattr(np, "trapezoid")
        else int(math.ceil(np.trapz(dens_x, probes))),
    )
    return probes, dens_x, nx, y_lo, y_hi, ny


def _y_transform(
    grid: np.ndarray,
    lfreqs: np.ndarray,
    y_lo: float,
    h: float,
    frac: np.ndarray,
    c: int,
) -> np.ndarray:
    """Contract the weight grid against e(-l y / c) over uniform y-panels.

    y_{i,q} = y_lo + h (i + frac_q) factorizes the kernel into a per-panel
    geometric progression (a chirp-z transform over the panel index, all
    consecutive l at once) and a small per-offset correction.
    """
    from scipy.signal import czt

    nx = grid.shape[0]
    order = frac.size
    n_panels = grid.shape[1] // order
    nl = lfreqs.size
    l_min = int(lfreqs[0])
    g3 = grid.reshape(nx, n_panels, order).transpose(0, 2, 1)
    if nl >= 32 and n_panels >= 32:
        ratio = np.exp((-2j * np.pi / c) * h)
        pre = ratio ** (l_min * np.arange(n_panels))
        spectral = czt(g3 * pre, m=nl, w=ratio, axis=-1)  # (nx, order, nl)
    else:
        kernel = np.exp(
            (-2j * np.pi / c) * h * np.arange(n_panels)[:, None] * lfreqs[None, :]
        )
        spectral = g3.astype(np.complex128) @ kernel
    offset = np.exp((-2j * np.pi / c) * (y_lo + h * frac[:, None]) * lfreqs[None, :])
    return np.einsum("xqL,qL->xL", spectral, offset)


def fourier_integral_batch(
    w: WeightSystem,
    p: TParams,
    wfreqs: np.ndarray,
    lfreqs: np.ndarray,
    tol: float = 1e-10,
    node_budget: int = 2**27,
    order: int = 12,
) -> np.ndarray:
    """All I(w, l) over the frequency grid at once, to absolute tolerance tol.

    lfreqs must be consecutive integers (the dual-sum use case).  The support
    is cut into geometric x-strips, each integrated on a tensor
    Gauss-Legendre mesh over its own tight y-box; every frequency pair shares
    one weight-grid evaluation per strip, the y-contraction is a chirp-z
    transform, and the x-contraction a matrix product.  Each strip refines
    (x-grading preserved) until its whole batch of integrals is converged.
    """
    p.chain.validate_for(w.n)
    wfreqs = np.atleast_1d(np.asarray(wfreqs, dtype=np.int64))
    lfreqs = np.atleast_1d(np.asarray(lfreqs, dtype=np.int64))
    if lfreqs.size > 1 and np.any(np.diff(lfreqs) != 1):
        raise ValueError("lfreqs must be consecutive")
    box = _support_box(w, p)
    if box is None:
        return np.zeros((wfreqs.size, lfreqs.size), dtype=np.complex128)
    x_lo, x_hi = box[0], box[1]
    c = p.modulus
    wmax = int(np.abs(wfreqs).max())
    lmax = int(np.abs(lfreqs).max())
    n_strips = min(16, max(1, int(math.ceil(math.log(x_hi / x_lo) / math.log(1.5)))))
    strip_edges = np.geomspace(x_lo, x_hi, n_strips + 1)
    strip_tol = tol / n_strips
    gx, gw = leggauss(order)
    frac = 0.5 * (gx + 1.0)
    total = np.zeros((wfreqs.size, lfreqs.size), dtype=np.complex128)
    used = 0
    for a, b in zip(strip_edges[:-1], strip_edges[1:]):
        probes, dens_x, nx, y_lo, y_hi, ny = _strip_mesh(w, p, a, b, wmax, lmax)
        prev = None
        while True:
            used += nx * ny * order * order
            if used > node_budget:
                raise QuadratureFailure(
                    f"2-D Fourier quadrature exceeded {node_budget} nodes"
                )
            h = (y_hi - y_lo) / ny
            xs, wx = _panel_nodes(_quantile_edges(probes, dens_x, nx), gx, gw)
            ys, wy = _panel_nodes(np.linspace(y_lo, y_hi, ny + 1), gx, gw)
            grid = _phi_grid(w, p, xs, ys) * wx[:, None] * wy[None, :]
            zmat = _y_transform(grid, lfreqs, y_lo, h, frac, c)
            ex = np.exp((-2j * np.pi / c) * wfreqs[:, None] * xs[None, :])
            cur = ex @ zmat
            if prev is not None and np.abs(cur - prev).max() < strip_tol:
                total += cur
                break
            prev = cur
            nx = int(math.ceil(1.5 * nx))
            ny = int(math.ceil(1.5 * ny))
    return total


def fourier_integral_full(
    w: WeightSystem, p: TParams, wfreq: int, lfreq: int, tol: float = 1e-10
) -> complex:
    return complex(fourier_integral_batch(w, p, [wfreq], [lfreq], tol=tol)[0, 0])


def fourier_integral_I(
    w: WeightSystem, p: TParams, wfreq: int, lfreq: int, tol: float = 1e-10
) -> float:
    """Real part of the 2-D Fourier integral I(wfreq, lfreq; alpha2*beta2)."""
    return fourier_integral_full(w, p, wfreq, lfreq, tol=tol).real


# ---- the dual (Poisson/Kloosterman) evaluation ----


@dataclass(frozen=True)
class PoissonDetail:
    """Dual-sum total and its (w=0/l=0) partition bookkeeping."""

    total: float
    t00: float
    t01: float
    t10: float
    t11: float
    imag_residual: float
    w_cut: int
    l_cut: int
    modulus: int

    @property
    def parts_sum(self) -> float:
        return self.t00 + self.t01 + self.t10 + self.t11


def _dual_box_sum(w, p, w_cut: int, l_cut: int, tol: float):
    ci = p.chain
    c = p.modulus
    E = ci.E_for(w.n)
    ws = np.arange(-w_cut, w_cut + 1, dtype=np.int64)
    ls = np.arange(-l_cut, l_cut + 1, dtype=np.int64)
    ivals = fourier_integral_batch(w, p, ws, ls, tol=tol)
    if c == 1:
        kmat = np.ones((ws.size, ls.size))
    else:
        inv_b = pow(p.mu * p.nu * ci.beta1 % c, -1, c)
        cache: dict[tuple[int, int], float] = {}
        kmat = np.empty((ws.size, ls.size))
        for i, wv in enumerate(ws):
            wr = int(wv) % c
            for j, lv in enumerate(ls):
                key = (wr, (-int(lv) * E * inv_b) % c)
                val = cache.get(key)
                if val is None:
                    val = kloosterman(key[0], key[1], c).real_part
                    cache[key] = val
                kmat[i, j] = val
    return ws, ls, kmat * ivals / (c * c)


def t_poisson_detail(
    w: WeightSystem,
    p: TParams,
    safety: float = 10.0,
    tol: float = 1e-10,
    tail_rtol: float = 1e-8,
) -> PoissonDetail:
    """Evaluate the dual series over an adaptively extended frequency box.

    The base box keeps |w| <= safety * m1 m2 v1 v2 e g beta2 alpha2^2 / Y and
    |l| <= safety * beta1 beta2 s n / (g Y), the decay cutoffs scaled by the
    truncation multiplier.  Because the window transforms decay only
    root-exponentially, the box then grows geometrically until the dual sum
    moves by less than tail_rtol relatively; at asymptotic scales the base
    box alone would suffice.
    """
    if safety < 1.0:
        raise ValueError("safety must be >= 1")
    p.chain.validate_for(w.n)
    ci = p.chain
    w_cut = max(
        1,
        int(
            safety * ci.m1 * ci.m2 * ci.v1 * ci.v2 * ci.e * ci.g * ci.beta2
            * p.alpha2**2 / w.Y
        ),
    )
    l_cut = max(1, int(safety * ci.beta1 * ci.beta2 * ci.s * w.n / (ci.g * w.Y)))
    prev_total = None
    for _ in range(24):
        ws, ls, contrib = _dual_box_sum(w, p, w_cut, l_cut, tol)
        total = float(contrib.sum().real)
        if prev_total is not None and abs(total - prev_total) <= max(
            tail_rtol * abs(total), 1e-12
        ):
            break
        prev_total = total
        w_cut = int(math.ceil(1.6 * w_cut))
        l_cut = int(math.ceil(1.6 * l_cut))
    else:
        raise QuadratureFailure("dual series failed to stabilize")

    w0 = np.nonzero(ws == 0)[0][0]
    l0 = np.nonzero(ls == 0)[0][0]
    mask_w = ws[:, None] != 0
    mask_l = ls[None, :] != 0
    t00 = float(contrib[w0, l0].real)
    t01 = float(contrib[~mask_w & mask_l].sum().real)
    t10 = float(contrib[mask_w & ~mask_l].sum().real)
    t11 = float(contrib[mask_w & mask_l].sum().real)
    imag = float(np.abs(contrib.sum().imag))
    return PoissonDetail(
        total=t00 + t01 + t10 + t11,
        t00=t00,
        t01=t01,
        t10=t10,
        t11=t11,
        imag_residual=imag,
        w_cut=int(ws.max()),
        l_cut=int(ls.max()),
        modulus=p.modulus,
    )


def t_poisson(
    w: WeightSystem, p: TParams, safety: float = 10.0, tol: float = 1e-10
) -> float:
    """Dual-series value of the (mu, nu) block; equals t_direct identically."""
    return t_poisson_detail(w, p, safety=safety, tol=tol).total


# ---- change of variables (sigma, tau) and the main-term normalization ----


def _tensor_integral_2d(f2, a, b, c, d, tol, n0, node_budget=2**24, order=12):
    gx, gw = leggauss(order)
    nx, ny = n0
    prev = None
    while True:
        if nx * ny * order * order > node_budget:
            raise QuadratureFailure("2-D quadrature exceeded its node budget")
        xs, wx = _panel_nodes(np.linspace(a, b, nx + 1), gx, gw)
        ys, wy = _panel_nodes(np.linspace(c, d, ny + 1), gx, gw)
        cur = float(wx @ f2(xs, ys) @ wy)
        if prev is not None and abs(cur - prev) < tol:
            return cur
        prev = cur
        nx *= 2
        ny *= 2


def i00_sigma_tau(w: WeightSystem, p: TParams, tol: float = 1e-10) -> float:
    """I(0, 0) after the change of variables sigma = F2, tau = F3.

    The inverse map contributes 1/(G * sqrt(n^2 - sigma^2 + tau^2)); writing
    sigma = sqrt(n^2 + tau^2) sin(theta) removes the square-root edge, leaving
    a smooth integrand over [M, 2M] x [0, pi/2].
    """
    p.chain.validate_for(w.n)
    ci = p.chain
    kappa = p.alpha2**2 * ci.m1**2 * ci.v2**2 * ci.e * ci.g
    n = w.n

    def f2(taus: np.ndarray, thetas: np.ndarray) -> np.ndarray:
        r = np.sqrt(n * n + taus * taus)[:, None]
        sin_t = np.sin(thetas)[None, :]
        cos_t = np.cos(thetas)[None, :]
        sigma = r * sin_t
        vals = w.phi1(r * cos_t)
        vals *= w.phi1(sigma)
        vals *= w.phi3(taus)[:, None]
        vals *= w.phi_minus((sigma + taus[:, None]) / kappa)
        return vals

    raw = _tensor_integral_2d(
        f2, w.M, 2.0 * w.M, 0.0, 0.5 * math.pi, tol * p.G, (16, 16)
    )
    return raw / p.G


def y_root_residual(w: WeightSystem, p: TParams, sigma: float, tau: float) -> float:
    """Back-substitution residual of the reconstructed (x, y) at (sigma, tau).

    Relative error of F2, F3 against the requested sigma, tau; the root of the
    k-quadratic with the window-compatible sign is the only admissible one.
    """
    ci = p.chain
    mu, nu, a2 = p.mu, p.nu, p.alpha2
    disc = w.n * w.n - sigma * sigma + tau * tau
    if disc < 0 or sigma + tau == 0:
        raise ValueError("requested point is outside the admissible region")
    x = (sigma + tau) / (a2 * mu * ci.B)
    y = ci.g * a2 * (-w.n + math.sqrt(disc)) / (nu * ci.beta1 * ci.s * (sigma + tau))
    pmix = (2.0 * w.n * nu * ci.C * y + mu * nu * nu * ci.D * x * y * y) / (
        2.0 * ci.g * a2
    )
    lead = 0.5 * a2 * mu * ci.B * x
    f2 = lead - pmix
    f3 = lead + pmix
    return max(abs(f2 - sigma) / (abs(sigma) + 1e-30), abs(f3 - tau) / (abs(tau) + 1e-30))


@dataclass(frozen=True)
class I00Check:
    lhs: float
    rhs_main: float
    ratio: float


def i00_identity_check(w: WeightSystem, p: TParams, tol: float = 1e-10) -> I00Check:
    """Report I(0,0) against the reference main-term form 2 pi Phi_hat(0) M / G.

    The ratio is reported, never asserted: the direct integral runs over the
    positive-sigma half-range and the positive square-root branch, which
    evaluates to about a quarter of the reference constant (pi/2 versus 2 pi)
    before boundary-smoothing corrections.
    """
    lhs = fourier_integral_I(w, p, 0, 0, tol=tol)
    rhs_main = 2.0 * math.pi * canonical_profile_mass() * w.M / p.G
    return I00Check(lhs=lhs, rhs_main=rhs_main, ratio=lhs / rhs_main)
