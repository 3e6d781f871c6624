"""Command-line front end.

Subcommands: coeffs, sums, expsum, arcs, variance, verify, fit.
Exit codes: 0 success, 1 precondition or parse failure, 2 resource
refusal (a computation that policy says must come from the cache).

Reports land at --out <base>: <base>.csv (tabular), <base>.json
(config echo + scalar results), <base>.meta.json (execution details:
threads, backend, timing -- the one file allowed to differ between
otherwise identical runs).  Without --out a one-line summary is
printed and nothing is written.
"""

import argparse
import dataclasses
import math
import statistics
import sys
import time

from . import __version__, arcs, coefficients, expsum, kernels, reports, sums
from . import experiments
from .errors import ResourceLimitError, ShiftsumError

CACHE_MANDATE = 100_000
DEFAULT_CACHE_DIR = ".shiftsum-cache"


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; our contract reserves
    # 2 for resource refusals, so remap usage errors to exit 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _add_common(p):
    p.add_argument("--cache-dir", default=DEFAULT_CACHE_DIR)
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    top = _Parser(prog="shiftsum", description=__doc__)
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True,
                             parser_class=_Parser)

    p = sub.add_parser("coeffs", help="build and cache coefficient tables")
    p.add_argument("--form", default="delta12")
    p.add_argument("--n-max", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("sums", help="shifted convolution sums")
    p.add_argument("--form", default="delta12")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--h-max", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--weight", default=None,
                   choices=["gl2_lambda", "gl3_sym2"])
    _add_common(p)
    p.set_defaults(func=cmd_sums)

    p = sub.add_parser("expsum", help="exponential sum grids")
    p.add_argument("--form", default="delta12")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--grid-exp", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_expsum)

    p = sub.add_parser("arcs", help="Farey dissections and arc decompositions")
    p.add_argument("--form", default="delta12")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--x", type=int, default=None)
    p.add_argument("--h-max", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--grid-exp", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_arcs)

    p = sub.add_parser("variance", help="short-interval variance grid")
    p.add_argument("--form", default="delta12")
    p.add_argument("--x-min-exp", type=int, required=True)
    p.add_argument("--x-max-exp", type=int, required=True)
    p.add_argument("--delta-exp", type=float, default=0.5)
    p.add_argument("--hk", default="0/1")
    p.add_argument("--max-mode", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("verify", help="empirical bound checks")
    p.add_argument("--theorem", required=True,
                   choices=["main", "gl3", "weighted"])
    p.add_argument("--config", default=None)
    p.add_argument("--x-min-exp", type=int, default=None)
    p.add_argument("--x-max-exp", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--weight", default=None,
                   choices=["", "gl2_lambda", "gl3_sym2"])
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fit", help="exponent fits of measured growth")
    p.add_argument("--theorem", required=True,
                   choices=["fclass", "partialsum", "gridmax"])
    p.add_argument("--form", default="delta12")
    p.add_argument("--x-min-exp", type=int, required=True)
    p.add_argument("--x-max-exp", type=int, required=True)
    p.add_argument("--theta", type=float, default=0.5,
                   help="window-radius exponent for --theorem fclass")
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    return top


# ----------------------------------------------------------------------
# table resolution and the cache mandate
# ----------------------------------------------------------------------

def _tau_table(n_needed, cache_dir, allow_compute):
    hit = coefficients.find_tau_cache(cache_dir, n_needed)
    if hit is not None:
        return coefficients.load_tau_cache(hit, n_needed)
    if not allow_compute and n_needed > CACHE_MANDATE:
        raise ResourceLimitError(
            f"tau(1..{n_needed}) is not cached under {cache_dir!r}; "
            f"run: shiftsum coeffs --n-max {n_needed} --cache-dir {cache_dir}")
    return coefficients.compute_tau(n_needed, cache_dir=cache_dir)


def _resolve_form(form, n_needed, cache_dir, allow_compute=False):
    """Coefficient table for a --form value, long enough for n_needed."""
    if form == "delta12":
        return coefficients.normalize_gl2(
            _tau_table(n_needed, cache_dir, allow_compute))
    if form == "sym2":
        base = _tau_table(n_needed, cache_dir, allow_compute)
        return coefficients.sym2_from_tau(base, n_needed)
    if form.startswith("user:"):
        table = coefficients.load_user_coefficients(form[5:])
        if table.n_max < n_needed:
            raise ShiftsumError(
                f"user table reaches {table.n_max}, need {n_needed}")
        return table
    raise ShiftsumError(f"unknown form {form!r}")


def _shift_count(args, X):
    if args.h_max is not None:
        return args.h_max
    if args.theta is not None:
        return int(float(X) ** args.theta)
    return int(math.isqrt(X))


def _echo(args, **extra):
    skip = {"func", "command", "out", "threads"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    cfg["command"] = args.command
    cfg.update(extra)
    return cfg


def _emit(args, config, results, fieldnames=None, rows=None, comments=(),
          trailers=(), t0=None):
    if args.out:
        reports.write_json_report(args.out + ".json", config, results)
        if fieldnames is not None:
            reports.write_csv_report(args.out + ".csv", comments, fieldnames,
                                     rows, trailers)
        reports.write_meta(args.out + ".meta.json",
                           threads=args.threads, backend=kernels.BACKEND,
                           runtime_s=None if t0 is None else time.monotonic() - t0)


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_coeffs(args):
    t0 = time.monotonic()
    if args.n_max < 1:
        raise ShiftsumError("--n-max must be >= 1")
    if args.form == "delta12":
        tau = coefficients.compute_tau(args.n_max, cache_dir=args.cache_dir)
        table = coefficients.normalize_gl2(tau)
        hecke = coefficients.verify_hecke(tau, trials=0, seed=args.seed)
        print(f"coeffs kind={table.kind} n_max={table.n_max} "
              f"hecke={'ok' if hecke.passed else 'FAIL'} "
              f"mode={hecke.mode} pairs={hecke.pairs_checked} "
              f"prime_powers={hecke.prime_powers_checked}")
        if not hecke.passed:
            raise ShiftsumError(f"Hecke check failed at {hecke.first_failure}")
        results = {"kind": table.kind, "n_max": table.n_max,
                   "hecke_mode": hecke.mode,
                   "hecke_pairs": hecke.pairs_checked,
                   "hecke_prime_powers": hecke.prime_powers_checked}
    elif args.form == "sym2":
        base = _tau_table(args.n_max, args.cache_dir, allow_compute=True)
        table = coefficients.sym2_from_tau(base, args.n_max)
        print(f"coeffs kind={table.kind} n_max={table.n_max}")
        results = {"kind": table.kind, "n_max": table.n_max}
    elif args.form.startswith("user:"):
        table = coefficients.load_user_coefficients(args.form[5:])
        print(f"coeffs kind={table.kind} n_max={table.n_max} "
              f"label={table.label}")
        results = {"kind": table.kind, "n_max": table.n_max,
                   "label": table.label}
    else:
        raise ShiftsumError(f"unknown form {args.form!r}")
    if args.out:
        coefficients.save_coefficients(table, args.out)
        reports.write_meta(args.out + ".meta.json", threads=args.threads,
                           backend=kernels.BACKEND,
                           runtime_s=time.monotonic() - t0)
    return 0


def cmd_sums(args):
    t0 = time.monotonic()
    kernels.set_threads(args.threads)
    X = args.x
    H = _shift_count(args, X)
    f = _resolve_form(args.form, 2 * X, args.cache_dir)
    weight = None
    if args.weight == "gl2_lambda":
        weight = _resolve_form("delta12", max(2 * H, 2), args.cache_dir)
    elif args.weight == "gl3_sym2":
        weight = _resolve_form("sym2", max(H, 1), args.cache_dir)
    res = sums.averaged_shifted_sum(
        sums.ShiftedSumSpec(f=f, g=f, X=X, H=H, weight=weight))
    print(f"sums X={X} H={H} aggregate_re={res.aggregate.real!r} "
          f"abs={res.abs_aggregate!r}")
    config = _echo(args, H=H)
    results = {"X": X, "H": H,
               "aggregate": reports.complex_pair(res.aggregate),
               "abs_aggregate": res.abs_aggregate}
    rows = [(h + 1, res.per_h[h].real, res.per_h[h].imag) for h in range(H)]
    _emit(args, config, results, fieldnames=("h", "re", "im"), rows=rows,
          comments=sorted(config.items()),
          trailers=(("aggregate_re", res.aggregate.real),
                    ("aggregate_im", res.aggregate.imag),
                    ("abs_aggregate", res.abs_aggregate)),
          t0=t0)
    return 0


def cmd_expsum(args):
    t0 = time.monotonic()
    kernels.set_threads(args.threads)
    X = args.x
    G = 1 << args.grid_exp
    f = _resolve_form(args.form, 2 * X, args.cache_dir)
    grid = expsum.exp_sum_grid(f, X, G)
    lhs, rhs = expsum.parseval_pair(grid, f)
    rel = abs(lhs - rhs) / rhs if rhs else 0.0
    zero_mode = float(grid.values[0].real)
    print(f"expsum X={X} G={G} parseval_rel={rel:.3e} "
          f"zero_mode={zero_mode!r}")
    config = _echo(args, G=G)
    results = {"X": X, "G": G, "parseval_grid": lhs, "parseval_window": rhs,
               "zero_mode": zero_mode}
    if args.out:
        expsum.write_grid(args.out + ".grid", grid)
    _emit(args, config, results, t0=t0)
    return 0


def cmd_arcs(args):
    t0 = time.monotonic()
    kernels.set_threads(args.threads)
    dis = arcs.dirichlet_dissection(args.q)
    config = _echo(args)
    if args.x is None:
        rows = [(a.a, a.q, a.lo.numerator, a.lo.denominator,
                 a.hi.numerator, a.hi.denominator) for a in dis.arcs]
        total = sum(a.length for a in dis.arcs)
        print(f"arcs Q={args.q} count={len(dis.arcs)} total_length={total}")
        results = {"Q": args.q, "arc_count": len(dis.arcs),
                   "total_length": str(total)}
        _emit(args, config, results,
              fieldnames=("a", "q", "lo_num", "lo_den", "hi_num", "hi_den"),
              rows=rows, comments=sorted(config.items()), t0=t0)
        return 0
    X = args.x
    H = _shift_count(args, X)
    G = 1 << (args.grid_exp if args.grid_exp is not None
              else (8 * X - 1).bit_length())
    f = _resolve_form(args.form, 2 * X, args.cache_dir)
    rep = arcs.arc_decomposed_average(f, f, X, H, args.q, G)
    direct = sums.averaged_shifted_sum(
        sums.ShiftedSumSpec(f=f, g=f, X=X, H=H)).aggregate
    drift = abs(rep.total - direct) / max(abs(direct), 1e-300)
    print(f"arcs Q={args.q} X={X} H={H} G={G} "
          f"major={rep.major.abs_value!r} minor={abs(rep.minor_total)!r} "
          f"recombine_rel={drift:.3e}")
    config = _echo(args, H=H, G=G)
    results = {"Q": args.q, "X": X, "H": H, "G": G,
               "major": reports.complex_pair(rep.major.value),
               "minor_total": reports.complex_pair(rep.minor_total),
               "total": reports.complex_pair(rep.total),
               "direct": reports.complex_pair(direct),
               "l1_integral": rep.l1_integral}
    rows = [(c.a, c.q, c.value.real, c.value.imag, c.abs_value)
            for c in rep.per_arc]
    _emit(args, config, results,
          fieldnames=("a", "q", "re", "im", "abs"), rows=rows,
          comments=sorted(config.items()), t0=t0)
    return 0


def _parse_hk(text):
    try:
        h_s, _, k_s = text.partition("/")
        h, k = int(h_s), int(k_s) if k_s else 1
    except ValueError:
        raise ShiftsumError(f"--hk expects h/k, got {text!r}") from None
    return h, k


def cmd_variance(args):
    t0 = time.monotonic()
    kernels.set_threads(args.threads)
    h, k = _parse_hk(args.hk)
    if not 0.0 < args.delta_exp <= 0.5:
        raise ShiftsumError("--delta-exp must lie in (0, 0.5]")
    n_needed = (1 << (args.x_max_exp + 1)) + int(
        (1 << args.x_max_exp) ** args.delta_exp)
    f = _resolve_form(args.form, n_needed, args.cache_dir)
    rows = []
    ratios = []
    for e in range(args.x_min_exp, args.x_max_exp + 1):
        M = 1 << e
        delta = float(M) ** args.delta_exp
        pt = arcs.short_interval_variance(f, M, delta, h=h, k=k,
                                          max_mode=args.max_mode)
        ref = M * delta * math.log(M) ** 2
        ratio = pt.variance / ref
        ratios.append(ratio)
        rows.append((M, pt.Delta, h, k, "max" if pt.max_mode else "fixed",
                     pt.variance, ratio))
    med = statistics.median(ratios)
    print(f"variance hk={h}/{k} rows={len(rows)} "
          f"ratio_median={med!r} ratio_max={max(ratios)!r}")
    config = _echo(args, h=h, k=k)
    results = {"rows": len(rows), "ratio_median": med,
               "ratio_max": max(ratios), "ratios": ratios}
    _emit(args, config, results,
          fieldnames=("M", "Delta", "h", "k", "mode", "variance",
                      "ratio_to_MDeltaLog2M"),
          rows=rows, comments=sorted(config.items()), t0=t0)
    return 0


def cmd_verify(args):
    t0 = time.monotonic()
    kernels.set_threads(args.threads)
    cfg = (experiments.read_config(args.config) if args.config
           else experiments.BoundCheckConfig())
    updates = {"theorem": args.theorem, "seed": args.seed}
    for name in ("x_min_exp", "x_max_exp", "theta", "weight"):
        v = getattr(args, name)
        if v is not None:
            updates[name] = v
    cfg = dataclasses.replace(cfg, **updates)
    cfg.validate()
    x_top = 1 << (cfg.x_max_exp + 1)
    if args.theorem == "main":
        lam = _resolve_form("delta12", x_top, args.cache_dir)
        rep = experiments.check_theorem_main(cfg, lam, lam)
    elif args.theorem == "gl3":
        sym2 = _resolve_form("sym2", x_top, args.cache_dir)
        lam = _resolve_form("delta12", x_top, args.cache_dir)
        rep = experiments.check_corollary_gl3(cfg, sym2, lam)
    else:
        lam = _resolve_form("delta12", x_top, args.cache_dir)
        wkind = cfg.weight or "gl2_lambda"
        h_top = int(float(x_top // 2) ** cfg.theta)
        if wkind == "gl2_lambda":
            wt = _resolve_form("delta12", max(2, h_top), args.cache_dir)
        else:
            wt = _resolve_form("sym2", max(2, h_top), args.cache_dir)
        rep = experiments.check_weighted(cfg, lam, lam, wt)
    slope = None if rep.fit is None else rep.fit.slope
    print(f"verify theorem={rep.theorem} rows={len(rep.rows)} "
          f"slope={'n/a' if slope is None else repr(slope)} "
          f"threshold={rep.slope_threshold} verdict={rep.verdict}")
    config = _echo(args, **{f"cfg_{k}": v for k, v in
                            sorted(vars(cfg).items())})
    results = {
        "theorem": rep.theorem, "verdict": rep.verdict,
        "slope_threshold": rep.slope_threshold,
        "fit": None if rep.fit is None else {
            "slope": rep.fit.slope, "intercept": rep.fit.intercept,
            "r_squared": rep.fit.r_squared, "n_points": rep.fit.n_points},
        "rows": [[r.X, r.H, r.Q, r.lhs, r.rhs, r.ratio, r.alpha]
                 for r in rep.rows],
    }
    rows = [(r.X, r.H, r.Q, r.lhs, r.rhs, r.ratio, r.alpha) for r in rep.rows]
    _emit(args, config, results,
          fieldnames=("X", "H", "Q", "lhs", "rhs", "ratio", "alpha"),
          rows=rows, comments=sorted(config.items()),
          trailers=(("verdict", rep.verdict),), t0=t0)
    return 0


def cmd_fit(args):
    t0 = time.monotonic()
    kernels.set_threads(args.threads)
    xs = [1 << e for e in range(args.x_min_exp, args.x_max_exp + 1)]
    if args.theorem == "fclass":
        n_needed = 2 * xs[-1] + int(xs[-1] ** args.theta * 8) + 1
        f = _resolve_form(args.form, n_needed, args.cache_dir)
        rep = experiments.fclass_membership(f, xs, a_rule=args.theta)
        print(f"fit fclass b_hat={rep.b_hat.slope!r} "
              f"a2_hat={rep.a2_hat.slope!r} log_power={rep.log_power}")
        config = _echo(args)
        results = {"b_hat": rep.b_hat.slope, "a2_hat": rep.a2_hat.slope,
                   "log_power": rep.log_power,
                   "b_r2": rep.b_hat.r_squared, "a2_r2": rep.a2_hat.r_squared}
        rows = [(st.X, st.A, st.variance_integral, st.second_moment)
                for st in rep.rows]
        _emit(args, config, results,
              fieldnames=("X", "A", "variance_integral", "second_moment"),
              rows=rows, comments=sorted(config.items()), t0=t0)
        return 0
    mode = "zero" if args.theorem == "partialsum" else "grid"
    ref = 1.0 / 3.0 if mode == "zero" else 0.5
    f = _resolve_form(args.form, xs[-1], args.cache_dir)
    rep = expsum.uniform_bound_scan(f, xs, reference_exponent=ref, mode=mode)
    print(f"fit {args.theorem} slope={rep.fit.slope!r} "
          f"r2={rep.fit.r_squared!r}")
    config = _echo(args, mode=mode)
    results = {"slope": rep.fit.slope, "intercept": rep.fit.intercept,
               "r_squared": rep.fit.r_squared,
               "reference_exponent": rep.exponent}
    rows = list(rep.rows)
    _emit(args, config, results,
          fieldnames=("X", "max_abs", "ratio_to_reference"),
          rows=rows, comments=sorted(config.items()), t0=t0)
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 0
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"shiftsum: resource refusal: {exc}", file=sys.stderr)
        return 2
    except ShiftsumError as exc:
        print(f"shiftsum: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"shiftsum: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
