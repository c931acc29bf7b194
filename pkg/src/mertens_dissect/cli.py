"""Batch CLI: every computation behind subcommands with deterministic,
machine-readable output (table, CSV, or JSON with decimal strings).

Exit codes: 0 success, 1 internal failure / failed verify, 2 usage or
domain error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from importlib import resources

from mpmath import mp, mpf

from . import __version__, coefficients, dissection, primes, uniform
from .prime_zeta import _small_primes, mertens_beta, mertens_diagnostics
from .errors import DomainError, MertensError, ResourceError
from .numerics import DEFAULT_DIGITS, PrecisionContext, format_real

JSON_SCHEMA = "mertens-dissect/1"
DEFAULT_FIXTURE = "envelopes.json"
ENVELOPE_MARGIN = 1.25


def _ctx(args) -> PrecisionContext:
    return PrecisionContext(digits=args.digits)


def _fmt(value, digits: int) -> str:
    return format_real(value, digits)


def _emit(args, command: str, params: dict, columns: list, rows: list) -> None:
    if args.output == "json":
        payload = {
            "schema": JSON_SCHEMA,
            "command": command,
            "params": params,
            "rows": rows,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif args.output == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        sys.stdout.write(buf.getvalue())
    else:
        widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) if rows else len(c) for c in columns}
        print("  ".join(c.ljust(widths[c]) for c in columns))
        for row in rows:
            print("  ".join(str(row[c]).ljust(widths[c]) for c in columns))


def _load_table(args, limit: int) -> primes.PrimeTable:
    path = getattr(args, "cache", None)
    if path and os.path.exists(path):
        table = primes.load_prime_cache(path)
        if table.limit >= limit:
            return table
    table = primes.sieve(limit)
    if path:
        primes.save_prime_cache(table, path)
    return table


def cmd_constants(args) -> int:
    ctx = _ctx(args)
    mc = mertens_beta(ctx)
    eta = coefficients.eta_p(2, ctx)
    with ctx.workprec():
        e_gb = mp.e ** (mpf(mc.gamma) - mpf(mc.beta))
        e_g = mp.e**mp.euler
    d = ctx.digits
    rows = [
        {"name": "gamma", "value": _fmt(mc.gamma, d), "description": "Euler-Mascheroni constant"},
        {"name": "beta", "value": _fmt(mc.beta, d), "description": "Mertens' constant"},
        {"name": "beta_minus_gamma", "value": _fmt(mc.beta_minus_gamma, d),
         "description": "-sum_{j>=2} Z(j)/j"},
        {"name": "eta", "value": _fmt(eta, d), "description": "lim c_k 2^k (= alpha_2)"},
        {"name": "exp_gamma_minus_beta", "value": _fmt(ctx.round(e_gb), d),
         "description": "sum_m c_m"},
        {"name": "exp_gamma", "value": _fmt(ctx.round(e_g), d), "description": "e^gamma"},
    ]
    _emit(args, "constants", {"digits": d}, ["name", "value", "description"], rows)
    return 0


def cmd_coefficients(args) -> int:
    ctx = _ctx(args)
    d = ctx.digits
    if args.source == "partition":
        values = [coefficients.c_partition(k, ctx=ctx) for k in range(args.K + 1)]
    else:
        values = coefficients.c_recursive(args.K, ctx=ctx).values
    rows = [{"k": k, "c_k": _fmt(v, d)} for k, v in enumerate(values)]
    _emit(args, "coefficients", {"K": args.K, "digits": d, "source": args.source},
          ["k", "c_k"], rows)
    return 0


def cmd_expansion(args) -> int:
    ctx = _ctx(args)
    d = ctx.digits
    remainders = coefficients.expansion_remainder(args.kmax, args.q, ctx)
    below = [p for p in _small_primes() if p < args.q]
    rows = [
        {"k": f"alpha_{p}", "value": _fmt(coefficients.alpha_p(p, ctx), d)} for p in below
    ]
    rows += [{"k": str(k), "value": _fmt(r, d)} for k, r in enumerate(remainders, start=1)]
    _emit(args, "expansion", {"q": args.q, "kmax": args.kmax, "digits": d},
          ["k", "value"], rows)
    return 0


def cmd_dissect(args) -> int:
    ctx = _ctx(args)
    d = ctx.digits
    table = _load_table(args, args.x)
    s = int(args.s) if args.s == int(args.s) else args.s
    routes = ["newton", "partition", "brute"] if args.route == "all" else [args.route]
    rows = []
    for route in routes:
        if route == "brute":
            if s != 1:
                if args.route == "brute":
                    raise DomainError("brute route only supports s=1")
                continue
            res = dissection.smooth_sum_brute(args.k, args.x, table)
        elif route == "partition":
            res = dissection.smooth_sum_partition(args.k, args.x, s, table, ctx, args.exact)
        else:
            res = dissection.smooth_sum_newton(args.k, args.x, s, table, ctx, args.exact)
        if res.exact:
            value = f"{res.value.numerator}/{res.value.denominator}"
        else:
            value = _fmt(res.value, d)
        rows.append(
            {
                "k": res.k,
                "x": res.x,
                "s": res.s,
                "route": res.route,
                "value": value,
                "term_count": res.term_count if res.term_count is not None else "",
            }
        )
    _emit(args, "dissect",
          {"k": args.k, "x": args.x, "s": args.s, "digits": d, "exact": args.exact},
          ["k", "x", "s", "route", "value", "term_count"], rows)
    return 0


def cmd_resum(args) -> int:
    ctx = _ctx(args)
    d = ctx.digits
    table = _load_table(args, args.x)
    res = dissection.dissection_resum(args.x, args.K, table, ctx)
    rows = [
        {"quantity": "partial_resum", "value": _fmt(res.partial_resum, d)},
        {"quantity": "mertens_product", "value": _fmt(res.mertens_product, d)},
        {"quantity": "eg_logx", "value": _fmt(res.eg_logx, d)},
        {"quantity": "resum_gap", "value": _fmt(res.resum_gap, d)},
        {"quantity": "product_ratio", "value": _fmt(res.product_ratio, d)},
    ]
    _emit(args, "resum", {"x": args.x, "K": res.K, "digits": d},
          ["quantity", "value"], rows)
    return 0


def cmd_uniform(args) -> int:
    ctx = _ctx(args)
    d = ctx.digits
    table = _load_table(args, args.x)
    tables = primes.factor_tables(args.x)
    est = uniform.uniform_estimate(args.k, args.x, ctx)
    smooth = dissection.smooth_sum_newton(args.k, args.x, 1, table, ctx).value
    ss = uniform.sathe_selberg_estimate(args.k, args.x, tables, ctx)
    fr = dissection.friable_ratio(args.k, args.x, table, tables, ctx=ctx)
    with ctx.workprec():
        smooth_ratio = ctx.round(mpf(est) / mpf(smooth))
    rows = [
        {"quantity": "r", "value": _fmt(ss.r, d)},
        {"quantity": "uniform_estimate", "value": _fmt(est, d)},
        {"quantity": "smooth_sum", "value": _fmt(smooth, d)},
        {"quantity": "uniform_ratio", "value": _fmt(smooth_ratio, d)},
        {"quantity": "sathe_selberg_estimate", "value": _fmt(ss.estimate, d)},
        {"quantity": "bounded_sum", "value": _fmt(ss.exact, d)},
        {"quantity": "sathe_selberg_ratio", "value": _fmt(ss.ratio, d)},
        {"quantity": "friable_ratio", "value": _fmt(fr.ratio, d)},
        {"quantity": "friable_limit_factor", "value": _fmt(fr.limit_factor, d)},
    ]
    _emit(args, "uniform", {"k": args.k, "x": args.x, "digits": d},
          ["quantity", "value"], rows)
    return 0


def cmd_contour(args) -> int:
    ctx = _ctx(args)
    d = ctx.digits
    table = _load_table(args, args.x)
    if args.M is not None:
        spec = uniform.ContourSpec(k=args.k, x=args.x, radius=args.r or 0.25, nodes=args.M)
        res = uniform.contour_extract(spec, table, ctx)
    else:
        res = uniform.contour_extract_auto(args.k, args.x, table, ctx, radius=args.r)
    rows = [
        {"quantity": "value", "value": _fmt(res.value, d)},
        {"quantity": "imag_residual", "value": _fmt(res.imag_residual, d)},
        {"quantity": "radius", "value": str(res.radius)},
        {"quantity": "nodes", "value": str(res.nodes)},
    ]
    _emit(args, "contour", {"k": args.k, "x": args.x, "digits": d},
          ["quantity", "value"], rows)
    return 0


# ---------------------------------------------------------------------------
# verify: invariant matrix + regression envelopes


def _fixture_path(args) -> str:
    if args.fixture:
        return args.fixture
    return str(resources.files("mertens_dissect").joinpath("data", DEFAULT_FIXTURE))


def compute_envelopes(ctx: PrecisionContext, xmax: int = 10**7) -> dict:
    """Empirical O(1) envelopes, recorded with a margin; these are the
    regression values the analysis leaves unquantified."""
    table = primes.sieve(xmax)
    consts = mertens_beta(ctx)
    out = {}
    with ctx.workprec():
        xs = [10**e for e in range(2, 7)]
        firsts = [abs(mpf(mertens_diagnostics(x, table, consts, ctx).first_error))
                  for x in xs]
        out["mertens_first_error_max_1e2_1e6"] = max(firsts) * ENVELOPE_MARGIN
        diag6 = mertens_diagnostics(10**6, table, consts, ctx)
        out["mertens_product_ratio_dev_1e6"] = abs(mpf(diag6.product_ratio) - 1) * ENVELOPE_MARGIN

        c = coefficients.c_recursive(6, ctx=ctx)
        for k in (2, 3):
            errs = []
            for x in [10**e for e in range(3, 8) if 10**e <= xmax]:
                est = dissection.theorem_main_term(k, x, c, consts, table, ctx)
                errs.append(abs(mpf(est.scaled_error)))
            out[f"scaled_error_k{k}_max"] = max(errs) * ENVELOPE_MARGIN

        res = dissection.dissection_resum(10**4, 40, table, ctx)
        out["resum_gap_x1e4_K40"] = mpf(res.resum_gap) * ENVELOPE_MARGIN + mpf(10) ** (-40)

        ctx120 = PrecisionContext(digits=120)
        eta = coefficients.eta_p(2, ctx120)
        craw = coefficients._c_raw(60, ctx120.work_dps)
        with mp.workdps(130):
            scaled = [abs(craw[k] * mpf(2) ** k - mpf(eta)) * (mpf(3) / 2) ** k
                      for k in range(10, 61)]
        out["ck_2k_remainder_scaled_max_k10_60"] = max(scaled) * ENVELOPE_MARGIN
    return {k: format_real(v, 20) for k, v in out.items()}


def _verify_checks(ctx: PrecisionContext, envelopes: dict):
    """Yield (name, passed, detail) tuples for the verify matrix."""
    table = primes.sieve(10**6)
    consts = mertens_beta(ctx)
    tol = mpf(10) ** (-(ctx.digits - 10))

    with ctx.workprec():
        # constants against their independent routes
        yield ("beta_five_digits", abs(mpf(consts.beta) - mpf("0.26149")) < mpf("1e-5"),
               _fmt(consts.beta, 12))
        yield ("gamma_five_digits", abs(mpf(consts.gamma) - mpf("0.57721")) < mpf("1e-5"),
               _fmt(consts.gamma, 12))
        eta = coefficients.eta_p(2, ctx)
        yield ("eta_five_digits", abs(mpf(eta) - mpf("0.71206")) < mpf("1e-5"), _fmt(eta, 12))

        # route equivalence at a spot point
        b = dissection.smooth_sum_brute(3, 30, table)
        n = dissection.smooth_sum_newton(3, 30, 1, table, ctx, exact=True)
        p = dissection.smooth_sum_partition(3, 30, 1, table, ctx, exact=True)
        yield ("route_equivalence_k3_x30", b.value == n.value == p.value,
               f"{b.value}")

        # generating-function identity sum c_m = e^{gamma-beta}
        c = coefficients.c_recursive(40, ctx=ctx)
        total = mp.fsum(mpf(v) for v in c.values)
        target = mp.e ** (mpf(consts.gamma) - mpf(consts.beta))
        yield ("sum_cm_eq_exp_gamma_minus_beta", abs(total - target) < mpf("1e-10"),
               _fmt(abs(total - target), 6))

        # induced recursion residuals
        worst = mpf(0)
        for q in (2, 3, 5, 7, 11, 13):
            series = coefficients.induced_series(q, 20, ctx=ctx)
            worst = max(worst, mpf(coefficients.induced_recursion_check(series, ctx)))
        yield ("induced_recursion_q_le_13", worst < mpf(10) ** (-(ctx.digits - 10)),
               _fmt(worst, 6))

        # analytic-factor identity eta(r) = e^{r gamma} Gamma(r+1) nu(r)
        worst = mpf(0)
        for i in range(5):
            r = mpf("0.38") * i
            lhs = mpf(uniform.eta_fn(r, ctx).value)
            rhs = mp.e ** (r * mp.euler) * mp.gamma(r + 1) * mpf(uniform.nu(r, ctx).value)
            worst = max(worst, abs(lhs - rhs))
        yield ("eta_nu_gamma_identity", worst < tol, _fmt(worst, 6))

        # contour extraction against the brute oracle
        cres = uniform.contour_extract_auto(2, 10, table, ctx, radius=0.5)
        bres = dissection.smooth_sum_brute(2, 10, table)
        dev = abs(mpf(cres.value) - mpf(bres.value.numerator) / bres.value.denominator)
        yield ("contour_matches_brute_k2_x10", dev < mpf("1e-12"), _fmt(dev, 6))

        # regression envelopes (recorded empirical O(1) constants)
        diag = mertens_diagnostics(10**6, table, consts, ctx)
        checks = [
            ("envelope_first_error",
             abs(mpf(diag.first_error)), "mertens_first_error_max_1e2_1e6"),
            ("envelope_product_ratio",
             abs(mpf(diag.product_ratio) - 1), "mertens_product_ratio_dev_1e6"),
        ]
        cseries = coefficients.c_recursive(6, ctx=ctx)
        for k in (2, 3):
            est = dissection.theorem_main_term(k, 10**6, cseries, consts, table, ctx)
            checks.append((f"envelope_scaled_error_k{k}_x1e6",
                           abs(mpf(est.scaled_error)), f"scaled_error_k{k}_max"))
        res = dissection.dissection_resum(10**4, 40, table, ctx)
        checks.append(("envelope_resum_gap", mpf(res.resum_gap), "resum_gap_x1e4_K40"))
        for name, value, key in checks:
            if key not in envelopes:
                yield (name, False, f"missing envelope {key}; run verify --seed-regression")
                continue
            bound = mpf(envelopes[key])
            yield (name, value <= bound, f"{_fmt(value, 6)} <= {_fmt(bound, 6)}")


def cmd_verify(args) -> int:
    ctx = _ctx(args)
    path = _fixture_path(args)
    if args.seed_regression:
        envelopes = compute_envelopes(ctx)
        with open(path, "w") as fh:
            json.dump({"schema": JSON_SCHEMA, "digits": ctx.digits, "envelopes": envelopes},
                      fh, indent=2, sort_keys=True)
        print(f"seeded {len(envelopes)} regression envelopes -> {path}")
        return 0
    if os.path.exists(path):
        with open(path) as fh:
            envelopes = json.load(fh)["envelopes"]
    else:
        envelopes = {}
    rows = []
    ok = True
    for name, passed, detail in _verify_checks(ctx, envelopes):
        ok &= passed
        rows.append({"check": name, "status": "PASS" if passed else "FAIL", "detail": detail})
    _emit(args, "verify", {"digits": ctx.digits, "fixture": path},
          ["check", "status", "detail"], rows)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=DEFAULT_DIGITS,
                        help="decimal digits of working precision (env MERTENS_DIGITS)")
    common.add_argument("--output", choices=["table", "csv", "json"], default="table")

    cache = argparse.ArgumentParser(add_help=False)
    cache.add_argument("--cache", default=None, metavar="PATH",
                       help="opt-in binary prime-table cache file")

    parser = argparse.ArgumentParser(
        prog="mertens-dissect",
        description="Dissection of Mertens' prime product: coefficients, smooth sums, "
                    "expansion constants, and uniform estimates at arbitrary precision.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("constants", parents=[common]).set_defaults(func=cmd_constants)

    p = sub.add_parser("coefficients", parents=[common])
    p.add_argument("--K", type=int, default=10)
    p.add_argument("--source", choices=["recursion", "partition"], default="recursion")
    p.set_defaults(func=cmd_coefficients)

    p = sub.add_parser("expansion", parents=[common])
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--kmax", type=int, default=40)
    p.set_defaults(func=cmd_expansion)

    p = sub.add_parser("dissect", parents=[common, cache])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--route", choices=["newton", "partition", "brute", "all"], default="all")
    p.add_argument("--exact", action="store_true", help="exact rational arithmetic")
    p.set_defaults(func=cmd_dissect)

    p = sub.add_parser("resum", parents=[common, cache])
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--K", type=int, default=None)
    p.set_defaults(func=cmd_resum)

    p = sub.add_parser("uniform", parents=[common, cache])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.set_defaults(func=cmd_uniform)

    p = sub.add_parser("contour", parents=[common, cache])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--M", type=int, default=None)
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--fixture", default=None, metavar="PATH")
    p.add_argument("--seed-regression", action="store_true",
                   help="record the empirical envelope values to the fixture file")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, MertensError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
