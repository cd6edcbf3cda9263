"""Command line entry point.

Subcommands: eval, altsum, bell, constants, verify, report, explore.
Every invocation is deterministic given its configuration: identical
commands produce byte-identical stdout.  Exit codes: 0 success,
1 verification failure, 2 usage or domain error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from mpmath import mp, mpf

from .asymptotics import build_model, model_ids, run_report, sigma_q_model
from .config import Config, load_config, parse_grid
from .constants import ConstantsContext, constant_ids, named_constant
from .convolution import (
    alternating_sum_direct,
    alternating_sum_via_kernel,
    alternating_sums_at,
    kk_sign_probe,
    plain_sums_at,
    tq_sum,
    validate_qset,
    verify_convolution,
)
from .errors import CapacityError, DomainError, VerificationError
from .functions import evaluate, function_ids, get_function, sieve_values
from .series import SERIES_CAP, bell_coeffs, convolve, reciprocal_coeffs
from .sieve import SpfTable, build_spf

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3


# --- formatting ---


def _fmt_exact(v) -> str:
    """ints plain, rationals as num/den."""
    if isinstance(v, int):
        return str(v)
    num, den = int(v.numerator), int(v.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def _fmt_real(v, digits: int = 15) -> str:
    return mp.nstr(mpf(v), digits)


def _fraction_to_mpf(v: Fraction) -> mpf:
    return mpf(v.numerator) / v.denominator


# --- configuration plumbing ---


def _add_common(sub: argparse.ArgumentParser) -> None:
    g = sub.add_argument_group("configuration")
    g.add_argument("--config", metavar="FILE", help="key=value config file")
    g.add_argument("--sieve-cap", type=int, metavar="N")
    g.add_argument("--prime-limit", type=int, metavar="N")
    g.add_argument("--precision-bits", type=int, metavar="N")
    g.add_argument("--format", choices=("plain", "csv", "json"), dest="output_format")


def _config_of(args: argparse.Namespace) -> Config:
    grid = getattr(args, "grid", None)
    return load_config(
        args.config,
        sieve_cap=args.sieve_cap,
        prime_limit=args.prime_limit,
        precision_bits=args.precision_bits,
        output_format=args.output_format,
        grid=parse_grid(grid) if grid is not None else None,
    )


def _table_for(x: int, cfg: Config) -> SpfTable:
    if x > cfg.sieve_cap:
        raise CapacityError(f"x = {x} exceeds configured sieve cap {cfg.sieve_cap}")
    return build_spf(x, cap=cfg.sieve_cap)


# --- subcommands ---


def cmd_eval(args: argparse.Namespace, cfg: Config) -> int:
    f = get_function(args.function)
    print(_fmt_exact(evaluate(f, args.n)))
    return EXIT_OK


def cmd_altsum(args: argparse.Namespace, cfg: Config) -> int:
    f = get_function(args.function)
    table = _table_for(args.x, cfg)
    if args.q is not None:
        qs = validate_qset([int(tok) for tok in args.q.split(",")])
        print(_fmt_exact(tq_sum(f, qs, args.x, table)))
        return EXIT_OK
    if args.mode in ("direct", "both"):
        d = alternating_sum_direct(f, args.x, table)
        print(_fmt_exact(d) if args.mode == "direct" else f"direct {_fmt_exact(d)}")
    if args.mode in ("kernel", "both"):
        k = alternating_sum_via_kernel(f, args.x, table)
        print(_fmt_exact(k) if args.mode == "kernel" else f"kernel {_fmt_exact(k)}")
    return EXIT_OK


def cmd_bell(args: argparse.Namespace, cfg: Config) -> int:
    if args.n > SERIES_CAP:
        raise CapacityError(f"order {args.n} exceeds series cap {SERIES_CAP}")
    if args.reciprocal:
        # the b coefficients driving the kernel for the reciprocal function:
        # invert the local series of 1/f
        f = get_function("1/" + args.function)
        series = reciprocal_coeffs(bell_coeffs(f, args.n))
    else:
        series = bell_coeffs(get_function(args.function), args.n)
    print(" / ".join(f"{nu} {c}" for nu, c in enumerate(series.coeffs)))
    return EXIT_OK


def cmd_constants(args: argparse.Namespace, cfg: Config) -> int:
    if args.list:
        for cid in constant_ids():
            print(cid)
        return EXIT_OK
    if args.id is None:
        raise DomainError("constants needs --id or --list")
    ctx = ConstantsContext(cfg.prime_limit, cfg.precision_bits)
    result = named_constant(args.id, ctx)
    print(f"{args.id} {result.formatted()}")
    return EXIT_OK


def _has_formal_zero(fid: str) -> bool:
    # structural zeros at prime powers rule out the pointwise reciprocal
    f = get_function(fid)
    return any(f.rule(p, nu) == 0 for p in (2, 3) for nu in range(1, 9))


def _verify_one(fid: str, mode: str, table: SpfTable, xc: int) -> tuple[list[str], bool]:
    """Exact checks for one function id; returns (report lines, all passed).

    Pure integer/rational arithmetic throughout, safe to run on worker
    threads."""
    lines: list[str] = []
    ok = True

    def record(name: str, passed: bool, detail: str = "") -> None:
        nonlocal ok
        ok = ok and passed
        tail = f": {detail}" if detail and not passed else ""
        lines.append(f"{'ok' if passed else 'FAIL'} {fid} {name}{tail}")

    f = get_function(fid)
    record("convolution identity", verify_convolution(f, xc, table))

    if mode == "alternating":
        for x in (10**3, 10**4, 10**5):
            if x > xc:
                continue
            d = alternating_sum_direct(f, x, table)
            k = alternating_sum_via_kernel(f, x, table)
            record(f"direct=kernel x={x}", d == k, f"{d} != {k}")
    else:
        vals = sieve_values(f, min(512, xc), table)
        bad = [n for n in range(1, len(vals)) if vals[n] != evaluate(f, n, table)]
        record("sieve=evaluate n<=512", not bad, f"first mismatch n={bad[0] if bad else ''}")

    a = bell_coeffs(f, 128)
    conv = convolve(a, reciprocal_coeffs(a), 128)
    identity = [Fraction(1)] + [Fraction(0)] * 128
    record("series reciprocal identity N=128", conv == identity)
    return lines, ok


def cmd_verify(args: argparse.Namespace, cfg: Config) -> int:
    if args.function == "all":
        fids = list(function_ids())
        fids += ["1/" + fid for fid in fids if not _has_formal_zero(fid)]
    else:
        fids = [args.function]
        get_function(args.function)  # surface unknown ids as usage errors
    xc = min(10**5, cfg.sieve_cap)
    table = build_spf(xc, cap=cfg.sieve_cap)
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(lambda fid: _verify_one(fid, args.mode, table, xc), fids))
    else:
        results = [_verify_one(fid, args.mode, table, xc) for fid in fids]
    all_ok = True
    for lines, ok in results:
        all_ok = all_ok and ok
        for line in lines:
            print(line)
    return EXIT_OK if all_ok else EXIT_VERIFY


def _report_functions(args: argparse.Namespace) -> list[str]:
    raw: list[str] = []
    for entry in args.function or ["all"]:
        raw.extend(tok.strip() for tok in entry.split(","))
    if "all" in raw:
        return model_ids(args.mode)
    for fid in raw:
        build_model(fid, args.mode)  # unknown model ids -> usage error now
    return raw


def _render_reports_csv(reports) -> None:
    print("function,mode,x,exact,predicted,residual,normalized")
    for r in reports:
        for i, x in enumerate(r.grid):
            row = (
                r.function_id,
                r.mode,
                str(x),
                _fmt_exact(r.exact[i]),
                _fmt_real(r.predicted[i]),
                _fmt_real(r.residual[i]),
                _fmt_real(r.normalized[i]),
            )
            print(",".join(row))
    summary = [
        {"function": r.function_id, "mode": r.mode, "fitted_exponent": r.fitted_exponent}
        for r in reports
    ]
    # stdout stays pure CSV; the fit summary rides on stderr
    print(json.dumps({"summaries": summary}), file=sys.stderr)


def _render_reports_json(reports) -> None:
    docs = []
    for r in reports:
        docs.append(
            {
                "function": r.function_id,
                "mode": r.mode,
                "fitted_exponent": r.fitted_exponent,
                "rows": [
                    {
                        "x": x,
                        "exact": _fmt_exact(r.exact[i]),
                        "predicted": _fmt_real(r.predicted[i]),
                        "residual": _fmt_real(r.residual[i]),
                        "normalized": _fmt_real(r.normalized[i]),
                    }
                    for i, x in enumerate(r.grid)
                ],
            }
        )
    print(json.dumps({"reports": docs}, indent=2))


def _render_reports_plain(reports) -> None:
    for r in reports:
        fit = "none" if r.fitted_exponent is None else f"{r.fitted_exponent:.4f}"
        print(f"# {r.function_id} {r.mode} fitted_exponent={fit}")
        for i, x in enumerate(r.grid):
            print(
                f"{x} exact={_fmt_exact(r.exact[i])}"
                f" predicted={_fmt_real(r.predicted[i], 10)}"
                f" residual={_fmt_real(r.residual[i], 10)}"
                f" normalized={_fmt_real(r.normalized[i], 10)}"
            )


def cmd_report(args: argparse.Namespace, cfg: Config) -> int:
    fids = _report_functions(args)
    grid = list(cfg.grid)
    table = _table_for(grid[-1], cfg)
    ctx = ConstantsContext(cfg.prime_limit, cfg.precision_bits)

    def sums_for(fid: str) -> dict:
        f = get_function(fid)
        at = alternating_sums_at if args.mode == "alternating" else plain_sums_at
        return at(f, grid, table)

    if args.jobs > 1:
        # workers do the exact arithmetic; mpmath runs on this thread only
        with ThreadPoolExecutor(max_workers=args.jobs) as ex:
            presums = dict(zip(fids, ex.map(sums_for, fids)))
    else:
        presums = {fid: None for fid in fids}
    reports = [
        run_report(fid, args.mode, grid, table, ctx, sums=presums[fid]) for fid in fids
    ]
    if cfg.output_format == "csv":
        _render_reports_csv(reports)
    elif cfg.output_format == "json":
        _render_reports_json(reports)
    else:
        _render_reports_plain(reports)
    return EXIT_OK


def _explore_series_growth(fid: str, order: int) -> None:
    """Reciprocal coefficient data: the scaled column |b_nu| 2^nu tracks
    whether sum |b_nu| 2^nu could converge; emitted as data, never asserted."""
    series = reciprocal_coeffs(bell_coeffs(get_function(fid), order))
    print("nu b scaled ratio")
    prev = None
    for nu, b in enumerate(series.coeffs):
        scaled = _fmt_real(_fraction_to_mpf(abs(b)) * 2**nu, 10)
        ratio = "-" if not prev else _fmt_real(_fraction_to_mpf(abs(b) / abs(prev)), 10)
        print(f"{nu} {b} {scaled} {ratio}")
        prev = b if b else prev


def _explore_kk_sign(grid: list[int], cfg: Config) -> None:
    table = _table_for(grid[-1], cfg)
    print("x ratio")
    for x, r in kk_sign_probe(grid, table):
        print(f"{x} {_fmt_real(_fraction_to_mpf(r), 12)}")


def _explore_tau_e(grid: list[int], cfg: Config) -> None:
    f = get_function("tau_e")
    table = _table_for(grid[-1], cfg)
    alt = alternating_sums_at(f, grid, table)
    plain = plain_sums_at(f, grid, table)
    ctx = ConstantsContext(cfg.prime_limit, cfg.precision_bits)
    k = named_constant("K", ctx).value
    limit = 2 / (1 + k) - 1
    print("x alt plain ratio limit")
    for x in grid:
        ratio = _fmt_real(mpf(int(alt[x])) / int(plain[x]), 12)
        print(f"{x} {alt[x]} {plain[x]} {ratio} {_fmt_real(limit, 12)}")


def cmd_explore(args: argparse.Namespace, cfg: Config) -> int:
    if args.topic in ("sigma_star", "phi_star"):
        _explore_series_growth("1/" + args.topic, args.n)
        return EXIT_OK
    grid = sorted(set(parse_grid(args.grid))) if args.grid else [10**k for k in range(1, 7)]
    grid = [x for x in grid if x <= cfg.sieve_cap]
    if not grid:
        raise CapacityError("every grid point exceeds the sieve cap")
    if args.topic == "kk_sign":
        _explore_kk_sign(grid, cfg)
    else:
        _explore_tau_e(grid, cfg)
    return EXIT_OK


# --- parser assembly ---


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altsum",
        description="Exact alternating sums of multiplicative functions, "
        "their kernels, constants, and asymptotic reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a function at one argument")
    p.add_argument("function", help="function id, or 1/<id> for the reciprocal")
    p.add_argument("n", type=int)
    _add_common(p)
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("altsum", help="exact alternating (or Q-signed) sum up to x")
    p.add_argument("--function", required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--mode", choices=("direct", "kernel", "both"), default="direct")
    p.add_argument("--q", help="comma-separated primes; switches to the t_Q-signed sum")
    _add_common(p)
    p.set_defaults(run=cmd_altsum)

    p = sub.add_parser("bell", help="local series coefficients at p=2")
    p.add_argument("--function", required=True)
    p.add_argument("--n", type=int, default=8, help="highest order (default 8)")
    p.add_argument(
        "--reciprocal",
        action="store_true",
        help="invert the local series of the reciprocal function 1/<function>",
    )
    _add_common(p)
    p.set_defaults(run=cmd_bell)

    p = sub.add_parser("constants", help="named Euler-product constants")
    p.add_argument("--id", help="constant id")
    p.add_argument("--list", action="store_true", help="list known ids")
    _add_common(p)
    p.set_defaults(run=cmd_constants)

    p = sub.add_parser("verify", help="exact identity checks; exit 1 on any failure")
    p.add_argument("--function", required=True, help="function id or 'all'")
    p.add_argument("--mode", choices=("alternating", "plain"), default="alternating")
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("report", help="exact sums against main-term models")
    p.add_argument(
        "--function",
        action="append",
        help="model id, comma list, or 'all' (default all)",
    )
    p.add_argument("--mode", choices=("alternating", "plain"), default="alternating")
    p.add_argument("--grid", help="grid spec: a:b for 2^a..2^b, or explicit x1,x2,...")
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    p.set_defaults(run=cmd_report)

    p = sub.add_parser("explore", help="data series for the open questions")
    p.add_argument(
        "--topic", required=True, choices=("sigma_star", "phi_star", "kk_sign", "tau_e")
    )
    p.add_argument("--n", type=int, default=48, help="series order for the *_star topics")
    p.add_argument("--grid", help="grid for kk_sign / tau_e (default decades to 10^6)")
    _add_common(p)
    p.set_defaults(run=cmd_explore)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_of(args)
        return args.run(args, cfg)
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
