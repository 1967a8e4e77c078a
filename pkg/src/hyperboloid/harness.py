"""Command-line front end: counting, verification batteries, sweeps, reports.

The only module with side effects.  Reports are written atomically (temp file
plus rename) as CSV or JSON lines with the fixed column set
n,M,Y,measured,predicted,ratio,P_n,wall_ms; floats carry 12 significant
digits.  Exit code 0 means every requested verification passed its stated
tolerance; failures additionally emit a JSON summary on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import tempfile
import time
from dataclasses import dataclass, field, replace

from . import expsum, lattice, singular, transform, weights
from .arith import factorize, random_60bit
from .weights import build_weight_system, canonical_profile_mass

DESK_TRIPLES = ((9, 4.0, 2.0), (15, 8.0, 4.0), (105, 32.0, 8.0))


@dataclass(frozen=True)
class RunConfig:
    command: str
    n_list: tuple[int, ...] = ()
    m_exponent: float = 0.9
    y_policy: str = "M_over_log3"
    y_fixed: float | None = None
    safety: float = 10.0
    seed: int = 0
    threads: int = 1
    output_path: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class SweepRecord:
    n: int
    M: float
    Y: float
    measured: float
    predicted: float
    ratio: float
    p_n: str
    wall_ms: int
    error: str | None = None


def _window_for(n: int, cfg: RunConfig) -> tuple[float, float]:
    M = max(1.0, min(float(n), float(n) ** cfg.m_exponent))
    if cfg.y_policy == "fixed":
        if cfg.y_fixed is None:
            raise ValueError("y_policy=fixed requires --Y")
        Y = cfg.y_fixed
    elif cfg.y_policy == "M_over_log3":
        Y = M / math.log(n) ** 3 if n > 1 else 1.0
    else:
        raise ValueError(f"unknown y_policy {cfg.y_policy!r}")
    Y = min(max(Y, 1.0), M)
    return M, Y


def _sweep_one(n: int, cfg: RunConfig) -> SweepRecord:
    start = time.perf_counter()
    try:
        M, Y = _window_for(n, cfg)
        w = build_weight_system(n, M, Y)
        measured = lattice.all_signs_window_count(w)
        p_n = singular.singular_series(n).value
        predicted = singular.main_term_predict(n, M, canonical_profile_mass())
        ratio = measured / predicted
        wall = int(round(1000.0 * (time.perf_counter() - start)))
        return SweepRecord(
            n=n,
            M=M,
            Y=Y,
            measured=measured,
            predicted=predicted,
            ratio=ratio,
            p_n=f"{p_n.numerator}/{p_n.denominator}",
            wall_ms=wall,
        )
    except Exception as exc:
        wall = int(round(1000.0 * (time.perf_counter() - start)))
        nan = float("nan")
        return SweepRecord(
            n=n, M=nan, Y=nan, measured=nan, predicted=nan, ratio=nan,
            p_n="nan", wall_ms=wall, error=f"{type(exc).__name__}: {exc}",
        )


def run_sweep(cfg: RunConfig) -> list[SweepRecord]:
    """One record per requested n; per-record failures are captured, not raised."""
    if cfg.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(lambda n: _sweep_one(n, cfg), cfg.n_list))
    return [_sweep_one(n, cfg) for n in cfg.n_list]


_CSV_HEADER = "n,M,Y,measured,predicted,ratio,P_n,wall_ms"


def _f12(v: float) -> str:
    return f"{v:.12g}"


def emit_report(records: list[SweepRecord], cfg: RunConfig) -> str:
    """Write the sweep report atomically; returns the output path."""
    path = cfg.output_path or "sweep.csv"
    lines = []
    if cfg.format == "csv":
        lines.append(_CSV_HEADER)
        for r in records:
            lines.append(
                f"{r.n},{_f12(r.M)},{_f12(r.Y)},{_f12(r.measured)},"
                f"{_f12(r.predicted)},{_f12(r.ratio)},{r.p_n},{r.wall_ms}"
            )
    elif cfg.format == "jsonl":
        for r in records:
            lines.append(
                json.dumps(
                    {
                        "n": r.n,
                        "M": float(_f12(r.M)),
                        "Y": float(_f12(r.Y)),
                        "measured": float(_f12(r.measured)),
                        "predicted": float(_f12(r.predicted)),
                        "ratio": float(_f12(r.ratio)),
                        "P_n": r.p_n,
                        "wall_ms": r.wall_ms,
                    }
                )
            )
    else:
        raise ValueError(f"unknown format {cfg.format!r}")
    payload = "\n".join(lines) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sweep-", text=True)
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


# ---- verification battery ----


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def _rel(a: float, b: float) -> float:
    return abs(a - b) / (abs(b) + 1e-30)


def check_exact_identities(triples=DESK_TRIPLES) -> list[CheckResult]:
    """S = 2 S1, the sharp/flat decomposition and the sandwich inequalities."""
    out = []
    for n, M, Y in triples:
        w = build_weight_system(n, M, Y)
        s = lattice.smoothed_sum_S(w)
        s1 = lattice.smoothed_sum_S1(w)
        split = lattice.s1_split_direct(w)
        r1 = _rel(s, 2.0 * s1)
        out.append(
            CheckResult(
                f"S=2*S1 at (n,M,Y)=({n},{M:g},{Y:g})", r1 <= 1e-12, f"rel={r1:.2e}"
            )
        )
        r2 = _rel(split.total, s1)
        out.append(
            CheckResult(
                f"S1=sharp+flat at ({n},{M:g},{Y:g})", r2 <= 1e-12, f"rel={r2:.2e}"
            )
        )
        eps = 1e-12 * (abs(split.sharp) + 1.0)
        sandwich = (
            split.sharp_minus <= split.sharp + eps
            and split.sharp <= split.sharp_plus + eps
        )
        out.append(
            CheckResult(
                f"sandwich at ({n},{M:g},{Y:g})",
                sandwich,
                f"{split.sharp_minus:.6f} <= {split.sharp:.6f} <= {split.sharp_plus:.6f}",
            )
        )
    return out


def check_chain(triples=DESK_TRIPLES, tol: float = 1e-9) -> list[CheckResult]:
    """The nine-index rearrangement against the direct divisor-sum evaluation."""
    out = []
    for n, M, Y in triples:
        w = build_weight_system(n, M, Y)
        direct = lattice.s1_sharp_pm_direct(w, "minus")
        chained = transform.s1_sharp_minus_chain(w)
        r = _rel(chained, direct)
        out.append(
            CheckResult(
                f"chain equality at (n,M,Y)=({n},{M:g},{Y:g})",
                r <= tol,
                f"direct={direct:.9g} chain={chained:.9g} rel={r:.2e}",
            )
        )
    return out


def check_poisson(
    n: int = 15,
    M: float = 8.0,
    Y: float = 4.0,
    alpha2s=(1, 3, 5),
    safety: float = 10.0,
    tol: float = 1e-6,
) -> list[CheckResult]:
    """The two-variable dual-sum identity block by block at the all-ones node."""
    w = build_weight_system(n, M, Y)
    ones = transform.ChainIndex(1, 1, 1, 1, 1, 1, 1, 1, 1)
    out = []
    for alpha2 in alpha2s:
        for mu in (1, 2):
            for nu in (1, 2):
                p = transform.TParams(chain=ones, mu=mu, nu=nu, alpha2=alpha2)
                direct = transform.t_direct(w, p)
                dual = transform.t_poisson(w, p, safety=safety)
                err = abs(dual - direct) / (abs(direct) + 1e-30)
                out.append(
                    CheckResult(
                        f"poisson mu={mu} nu={nu} alpha2={alpha2}",
                        err <= tol,
                        f"direct={direct:.9g} dual={dual:.9g} rel={err:.2e}",
                    )
                )
    return out


def check_jacobian(points=None, tol: float = 1e-8) -> list[CheckResult]:
    """(x, y)- versus (sigma, tau)-quadrature of the zero-frequency integral."""
    if points is None:
        ones = transform.ChainIndex(1, 1, 1, 1, 1, 1, 1, 1, 1)
        n3 = transform.ChainIndex(3, 3, 1, 1, 1, 1, 1, 1, 1)
        points = [
            (15, 8.0, 4.0, ones, 1, 1, 1),
            (15, 8.0, 4.0, ones, 2, 1, 1),
            (15, 8.0, 2.0, ones, 1, 2, 3),
            (9, 4.0, 2.0, ones, 1, 1, 1),
            (105, 32.0, 8.0, n3, 1, 1, 1),
        ]
    out = []
    for n, M, Y, chain, mu, nu, alpha2 in points:
        w = build_weight_system(n, M, Y)
        p = transform.TParams(chain=chain, mu=mu, nu=nu, alpha2=alpha2)
        lhs = transform.fourier_integral_I(w, p, 0, 0)
        rhs = transform.i00_sigma_tau(w, p)
        r = _rel(lhs, rhs)
        out.append(
            CheckResult(
                f"jacobian n={n} mu={mu} nu={nu} alpha2={alpha2}",
                r <= tol,
                f"xy={lhs:.10g} sigma-tau={rhs:.10g} rel={r:.2e}",
            )
        )
    return out


def check_weil(c_max: int = 300, ab_max: int = 50) -> list[CheckResult]:
    slack = expsum.weil_slack_scan(c_max, ab_max, ab_max)
    return [
        CheckResult(
            f"weil slack >= 0 for c<={c_max}, |a|,|b|<={ab_max}",
            slack >= 0.0,
            f"min slack={slack:.6f}",
        )
    ]


def check_ramanujan(q_max: int = 200, n_max: int = 200) -> list[CheckResult]:
    import numpy as np

    for q in range(1, q_max + 1):
        units = np.array(
            [g for g in range(1, q + 1) if math.gcd(g, q) == 1]
            if q > 1
            else [0],
            dtype=np.int64,
        )
        ns = np.arange(-n_max, n_max + 1, dtype=np.int64)
        direct = np.cos(2.0 * np.pi * np.outer(ns, units) / q).sum(axis=1)
        for idx, n in enumerate(ns):
            closed = expsum.ramanujan(q, int(n))
            if abs(direct[idx] - closed) > 1e-6:
                return [
                    CheckResult(
                        "ramanujan closed form",
                        False,
                        f"mismatch at (q,n)=({q},{n}): {direct[idx]} vs {closed}",
                    )
                ]
    return [
        CheckResult(
            f"ramanujan closed form = direct sum, q<={q_max}, |n|<={n_max}", True, "ok"
        )
    ]


def check_singular(limit: int = 10**4) -> list[CheckResult]:
    from fractions import Fraction

    out = []
    p3 = singular.singular_series(3).value
    p15 = singular.singular_series(15).value
    out.append(
        CheckResult(
            "P(3)=17/18 and P(15)=1241/1350",
            p3 == Fraction(17, 18) and p15 == Fraction(1241, 1350),
            f"P(3)={p3}, P(15)={p15}",
        )
    )
    bad = None
    for n in range(1, limit + 1, 2):
        v = singular.singular_series(n).value
        if not 0 < v <= 1:
            bad = f"P({n})={v} outside (0,1]"
            break
        fac = factorize(n)
        if all(e == 1 for _, e in fac.factors):
            if singular.singular_series_squarefree(n).value != v:
                bad = f"product form mismatch at n={n}"
                break
    out.append(
        CheckResult(
            f"singular series exact/positive on odd n<={limit}", bad is None, bad or "ok"
        )
    )
    return out


def check_perron() -> list[CheckResult]:
    out = []
    ladder = (10**2, 10**3, 10**4, 10**5)
    for b1, b2 in ((1, 1), (3, 1), (1, 5), (3, 5)):
        errs = [abs(singular.phi_partial_sum_check(b1, b2, z).error) for z in ladder]
        mono = all(errs[i + 1] <= errs[i] for i in range(len(errs) - 1))
        ok = mono
        if (b1, b2) == (1, 1):
            ok = ok and all(e <= 5.0 / math.sqrt(z) for e, z in zip(errs, ladder))
        out.append(
            CheckResult(
                f"perron errors at (b1,b2)=({b1},{b2})",
                ok,
                " ".join(f"{e:.2e}" for e in errs),
            )
        )
    return out


def check_two_squares(seed: int = 0, dense: int = 10**5, n_random: int = 10**3):
    rng = random.Random(seed)
    for N in range(dense + 1):
        if lattice.two_square_reps_loop(N) != lattice.two_square_reps_factored(N):
            return [CheckResult("two-square oracle equivalence", False, f"N={N}")]
    for _ in range(n_random):
        N = rng.randrange(1, 10**12)
        if lattice.two_square_reps_loop(N) != lattice.two_square_reps_factored(N):
            return [CheckResult("two-square oracle equivalence", False, f"N={N}")]
    ok12 = len(lattice.two_square_reps(25)) == 12
    return [
        CheckResult(
            f"two-square equivalence to {dense} + {n_random} random; r2(25)=12",
            ok12,
            "ok" if ok12 else "r2(25) != 12",
        )
    ]


def selftest(cfg: RunConfig) -> list[CheckResult]:
    """Full verification battery; mirrors the acceptance suite."""
    results = []
    results += check_exact_identities()
    results += check_chain()
    results += check_poisson(safety=cfg.safety)
    results += check_jacobian()
    results += check_weil()
    results += check_ramanujan()
    results += check_singular()
    results += check_perron()
    results += check_two_squares(seed=cfg.seed)
    return results


def _report_results(results: list[CheckResult]) -> int:
    failures = []
    for r in results:
        tag = "PASS" if r.ok else "FAIL"
        print(f"{tag}  {r.name}  [{r.detail}]")
        if not r.ok:
            failures.append({"check": r.name, "detail": r.detail})
    if failures:
        print(json.dumps({"failures": failures}), file=sys.stderr)
        return 1
    return 0


# ---- CLI ----


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--n", type=int, action="append", help="target n (repeatable)")
    sp.add_argument("--n-list", type=str, help="path to a file with one n per line")
    sp.add_argument("--m-exp", type=float, default=0.9, help="M = n^m_exp")
    sp.add_argument("--M", type=float, help="explicit M (overrides --m-exp)")
    sp.add_argument("--y-policy", choices=("M_over_log3", "fixed"), default="M_over_log3")
    sp.add_argument("--Y", type=float, help="explicit Y (y-policy fixed)")
    sp.add_argument("--safety", type=float, default=10.0)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=str)
    sp.add_argument("--format", choices=("csv", "jsonl"), default="csv")


def _gather_n(args) -> tuple[int, ...]:
    ns = list(args.n or [])
    if args.n_list:
        with open(args.n_list) as fh:
            ns.extend(int(line) for line in fh if line.strip())
    return tuple(ns)


def _cfg_from(args, command: str) -> RunConfig:
    y_policy = args.y_policy
    y_fixed = args.Y
    if y_fixed is not None:
        y_policy = "fixed"
    return RunConfig(
        command=command,
        n_list=_gather_n(args),
        m_exponent=args.m_exp,
        y_policy=y_policy,
        y_fixed=y_fixed,
        safety=args.safety,
        seed=args.seed,
        threads=max(1, args.threads),
        output_path=args.out,
        format=args.format,
    )


def _window_args(args, n: int) -> tuple[float, float]:
    M = args.M if args.M is not None else max(1.0, min(float(n), float(n) ** args.m_exp))
    Y = args.Y if args.Y is not None else max(1.0, min(M, M / 2.0))
    return M, Y


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hyperboloid",
        description="windowed lattice counts on x1^2+x2^2-x3^2=n^2 and their verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (
        "factor",
        "kloosterman",
        "count",
        "singular-series",
        "perron-check",
        "verify-chain",
        "verify-poisson",
        "sweep",
        "selftest",
    ):
        sp = sub.add_parser(name)
        _add_common(sp)
        if name == "kloosterman":
            sp.add_argument("--a", type=int, required=True)
            sp.add_argument("--b", type=int, required=True)
            sp.add_argument("--c", type=int, required=True)
            sp.add_argument("--weil", action="store_true")
        if name == "perron-check":
            sp.add_argument("--beta1", type=int, default=1)
            sp.add_argument("--beta2", type=int, default=1)
            sp.add_argument("--Z", type=float, default=1e4)
    args = parser.parse_args(argv)
    cmd = args.command

    if cmd == "factor":
        ns = _gather_n(args)
        if not ns:
            parser.error("factor requires --n")
        for n in ns:
            fac = factorize(n)
            txt = " * ".join(
                f"{p}^{e}" if e > 1 else f"{p}" for p, e in fac.factors
            )
            print(f"{n} = {txt or 1}")
        return 0

    if cmd == "kloosterman":
        val = expsum.kloosterman(args.a, args.b, args.c)
        print(f"S({args.a},{args.b};{args.c}) = {val.real_part:.12g}"
              f"  (imag residual {val.residual_imag:.2e})")
        if args.weil:
            bound, value, slack = expsum.weil_margin(args.a, args.b, args.c)
            print(f"weil bound = {bound:.12g}  |S| = {value:.12g}  slack = {slack:.12g}")
        return 0

    if cmd == "count":
        ns = _gather_n(args)
        if not ns:
            parser.error("count requires --n")
        for n in ns:
            M, Y = _window_args(args, n)
            w = build_weight_system(n, M, Y)
            s = lattice.smoothed_sum_S(w)
            s1 = lattice.smoothed_sum_S1(w)
            split = lattice.s1_split_direct(w)
            allsigns = lattice.all_signs_window_count(w)
            print(
                f"n={n} M={M:g} Y={Y:g}: S={s:.12g} S1={s1:.12g} "
                f"sharp={split.sharp:.12g} flat={split.flat:.12g} "
                f"sharp_minus={split.sharp_minus:.12g} sharp_plus={split.sharp_plus:.12g} "
                f"all_signs={allsigns:.12g}"
            )
        return 0

    if cmd == "singular-series":
        ns = _gather_n(args)
        if not ns:
            parser.error("singular-series requires --n")
        for n in ns:
            v = singular.singular_series(n).value
            line = f"P({n}) = {v.numerator}/{v.denominator} = {float(v):.12g}"
            fac = factorize(n)
            if all(e == 1 for _, e in fac.factors):
                vp = singular.singular_series_squarefree(n).value
                line += f"  (product form {vp.numerator}/{vp.denominator})"
            print(line)
        return 0

    if cmd == "perron-check":
        chk = singular.phi_partial_sum_check(args.beta1, args.beta2, args.Z)
        print(
            f"beta1={chk.beta1} beta2={chk.beta2} Z={chk.Z:g}: direct={chk.direct:.12g} "
            f"predicted={chk.predicted:.12g} error={chk.error:.6e} "
            f"(5/sqrt(Z) = {5.0 / math.sqrt(chk.Z):.6e})"
        )
        return 0

    if cmd == "verify-chain":
        ns = _gather_n(args)
        triples = DESK_TRIPLES if not ns else tuple(
            (n, *_window_args(args, n)) for n in ns
        )
        return _report_results(check_exact_identities(triples) + check_chain(triples))

    if cmd == "verify-poisson":
        ns = _gather_n(args) or (15,)
        results = []
        for n in ns:
            M, Y = _window_args(args, n)
            results += check_poisson(n=n, M=M, Y=Y, safety=args.safety)
        return _report_results(results)

    if cmd == "sweep":
        cfg = _cfg_from(args, "sweep")
        if not cfg.n_list:
            parser.error("sweep requires --n or --n-list")
        records = run_sweep(cfg)
        path = emit_report(records, cfg)
        failures = [
            {"n": r.n, "error": r.error} for r in records if r.error is not None
        ]
        print(f"wrote {len(records)} records to {path}")
        if failures:
            print(json.dumps({"failures": failures}), file=sys.stderr)
            return 1
        return 0

    if cmd == "selftest":
        cfg = _cfg_from(args, "selftest")
        return _report_results(selftest(cfg))

    parser.error(f"unknown command {cmd}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
