"""``gwm``: command-line access to the walk-maximum statistics.

Subcommands
-----------
stats      P(M=0), E M and Var M at one drift or over a grid
compare    terms and values of the zeta and Spitzer routes side by side
crossover  the drift where both series decay at the same rate
jk         the moment sums J_k
mc         Monte Carlo estimates

Exit codes: 0 success, 2 domain or usage error, 3 tolerance not met,
4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Callable

from . import gauss_walk as gw
from .errors import DomainError, GwmError, HorizonTooSmall, RemainderUnbounded, ToleranceNotMet
from .mc_oracle import McConfig, simulate_max
from .series import Precision, SeriesEval

EXIT_OK, EXIT_DOMAIN, EXIT_TOLERANCE, EXIT_INTERNAL = 0, 2, 3, 4
STATISTICS = ("p_zero", "mean", "variance")
ROUTE_TAGS = {"zeta": "zeta_series", "spitzer": "spitzer", "extended": "extended",
              "asymptotic": "asymptotic"}
STATS_ROUTES: dict[str, Callable] = {
    "zeta": gw.stats_zeta,
    "spitzer": gw.stats_spitzer,
    "extended": gw.stats_extended,
    "asymptotic": lambda beta, prec: gw.asymptotic_stats(beta),
}
RESULT_COLUMNS = ["beta", "statistic", "method", "value", "terms", "tail_bound"]
COMPARE_COLUMNS = ["beta", "stat", "method", "value", "terms", "tail_bound", "decay_ratio"]
MC_COLUMNS = ["beta", "statistic", "method", "value", "std_error", "paths", "horizon"]


class UsageError(Exception):
    pass


def _num(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return f"{float(x):.12g}"


def _json_num(x):
    if x is None or x == "":
        return None
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    x = float(f"{float(x):.12g}")
    return x if math.isfinite(x) else None


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (DomainError, UsageError)):
        return EXIT_DOMAIN
    if isinstance(exc, (ToleranceNotMet, RemainderUnbounded, HorizonTooSmall)):
        return EXIT_TOLERANCE
    return EXIT_INTERNAL


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` to a list of drifts, ``stop`` included."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"--beta-grid expects start:stop:step, got {text!r}") from None
    if not step > 0:
        raise UsageError("--beta-grid step must be positive")
    if not stop >= start:
        raise UsageError("--beta-grid stop must not be below start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    grid = [round(start + i * step, 12) for i in range(count)]
    for b in grid:
        gw.Drift(b)
    return grid


def _betas(args) -> list[float]:
    if args.beta_grid is not None and args.beta is not None:
        raise UsageError("give either --beta or --beta-grid, not both")
    if args.beta_grid is not None:
        return parse_grid(args.beta_grid)
    if args.beta is None:
        raise UsageError("one of --beta or --beta-grid is required")
    return [gw._beta(args.beta)]


def _precision(args) -> Precision:
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    return Precision(args.tol)


def _emit(rows: list[dict], columns: list[str], fmt: str, out) -> None:
    if fmt == "json":
        json.dump([{c: _json_num(r[c]) if c not in ("statistic", "stat", "method")
                    else r[c] for c in columns} for r in rows], out, indent=2)
        out.write("\n")
        return
    text = [[r[c] if c in ("statistic", "stat", "method") else _num(r[c]) for c in columns]
            for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(text)
        out.write(buf.getvalue())
        return
    widths = [max(len(c), *(len(t[i]) for t in text)) if text else len(c)
              for i, c in enumerate(columns)]
    out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
    for t in text:
        out.write("  ".join(v.ljust(w) for v, w in zip(t, widths)).rstrip() + "\n")


def _failure(beta, exc, route, err) -> None:
    print(f"gwm: {route} route failed at beta={beta}: {exc}", file=err)


def _stats_rows(beta: float, method: str, prec: Precision) -> list[dict]:
    if method == "auto":
        ws = gw.stats_auto(beta, prec)
    else:
        ws = STATS_ROUTES[method](beta, prec)
    rows = []
    for stat in STATISTICS:
        ev = ws.diagnostics[stat]
        rows.append({"beta": beta, "statistic": stat, "method": ws.method, "value": ev.value,
                     "terms": ev.terms_used, "tail_bound": ev.tail_bound})
    if "j0" in ws.diagnostics:
        j0 = ws.diagnostics["j0"]
        rows.append({"beta": beta, "statistic": "minus_log_p_zero", "method": ws.method,
                     "value": j0.value, "terms": j0.terms_used, "tail_bound": j0.tail_bound})
    return rows


def _failed_rows(beta, method, stats) -> list[dict]:
    tag = ROUTE_TAGS.get(method, method)
    return [{"beta": beta, "statistic": s, "stat": s, "method": tag, "value": math.nan,
             "terms": "", "tail_bound": "", "decay_ratio": ""} for s in stats]


def run_stats(args, out, err) -> int:
    prec = _precision(args)
    methods = ["zeta", "spitzer"] if args.method == "both" else [args.method]
    rows, code = [], EXIT_OK
    for beta in _betas(args):
        for method in methods:
            try:
                rows.extend(_stats_rows(beta, method, prec))
            except GwmError as exc:
                _failure(beta, exc, ROUTE_TAGS.get(method, method), err)
                rows.extend(_failed_rows(beta, method, STATISTICS))
                code = max(code, _exit_code(exc))
    _emit(rows, RESULT_COLUMNS, args.format, out)
    return code


def run_compare(args, out, err) -> int:
    """Both routes at every grid point; failures are flagged and skipped."""
    prec = _precision(args)
    rows = []
    for beta in _betas(args):
        ratios = {"zeta_series": beta * beta / (4.0 * math.pi),
                  "spitzer": math.exp(-0.5 * beta * beta)}
        for method in ("zeta", "spitzer"):
            tag = ROUTE_TAGS[method]
            try:
                ws = STATS_ROUTES[method](beta, prec)
            except GwmError as exc:
                _failure(beta, exc, tag, err)
                for r in _failed_rows(beta, method, STATISTICS):
                    r["decay_ratio"] = ratios[tag]
                    rows.append(r)
                continue
            for stat in STATISTICS:
                ev = ws.diagnostics[stat]
                rows.append({"beta": beta, "stat": stat, "method": tag, "value": ev.value,
                             "terms": ev.terms_used, "tail_bound": ev.tail_bound,
                             "decay_ratio": ratios[tag]})
    _emit(rows, COMPARE_COLUMNS, args.format, out)
    return EXIT_OK


def run_crossover(args, out, err) -> int:
    x0, beta0, common = gw.decay_crossover()
    rows = [{"beta": beta0, "statistic": name, "method": "bisection_newton", "value": v,
             "terms": "", "tail_bound": 1e-12 * scale}
            for name, v, scale in (("x0", x0, 1.0), ("beta0", beta0, 1.0 / beta0),
                                   ("common_ratio", common, common))]
    _emit(rows, RESULT_COLUMNS, args.format, out)
    return EXIT_OK


def _jk_eval(k: int, beta: float, method: str, prec: Precision) -> tuple[str, SeriesEval]:
    if method == "auto":
        method = "zeta" if gw.auto_method(beta) == "zeta_series" else "spitzer"
    if method == "zeta":
        return "zeta_series", gw.jk_zeta(k, beta, prec)
    if method == "spitzer":
        return "spitzer", gw.jk_spitzer(k, beta, prec)
    raise UsageError(f"jk supports --method zeta, spitzer, auto or both, not {method!r}")


def run_jk(args, out, err) -> int:
    prec = _precision(args)
    if args.k is None:
        raise UsageError("jk needs --k")
    k = gw._moment_order(args.k)
    methods = ["zeta", "spitzer"] if args.method == "both" else [args.method]
    columns = RESULT_COLUMNS + (["discrepancy"] if args.method == "both" else [])
    rows, code = [], EXIT_OK
    for beta in _betas(args):
        found = []
        for method in methods:
            try:
                tag, ev = _jk_eval(k, beta, method, prec)
            except GwmError as exc:
                _failure(beta, exc, ROUTE_TAGS.get(method, method), err)
                found.append({"beta": beta, "statistic": f"J_{k}", "method":
                              ROUTE_TAGS.get(method, method), "value": math.nan,
                              "terms": "", "tail_bound": ""})
                code = max(code, _exit_code(exc))
                continue
            found.append({"beta": beta, "statistic": f"J_{k}", "method": tag,
                          "value": ev.value, "terms": ev.terms_used, "tail_bound": ev.tail_bound})
        if args.method == "both":
            diff = found[0]["value"] - found[1]["value"]
            for r in found:
                r["discrepancy"] = diff
        rows.extend(found)
    _emit(rows, columns, args.format, out)
    return code


def run_mc(args, out, err) -> int:
    if args.paths is None or args.paths < 1:
        raise UsageError("--paths must be a positive integer")
    horizon = args.horizon
    if horizon != "auto":
        try:
            horizon = int(horizon)
        except ValueError:
            raise UsageError("--horizon must be a positive integer or 'auto'") from None
    rows, code = [], EXIT_OK
    for beta in _betas(args):
        try:
            est = simulate_max(McConfig(gw.Drift(beta), args.paths, seed=args.seed,
                                        horizon=horizon))
        except GwmError as exc:
            _failure(beta, exc, "monte_carlo", err)
            code = max(code, _exit_code(exc))
            continue
        print(f"gwm: beta={beta}: {est.truncation_note}", file=err)
        for stat, v, se in (("p_zero", est.p_zero_hat, est.se_pzero),
                            ("mean", est.mean_hat, est.se_mean),
                            ("variance", est.var_hat, est.se_var)):
            rows.append({"beta": beta, "statistic": stat, "method": "monte_carlo", "value": v,
                         "std_error": se, "paths": est.paths, "horizon": est.horizon_used})
    _emit(rows, MC_COLUMNS, args.format, out)
    return code


COMMANDS = {"stats": run_stats, "compare": run_compare, "crossover": run_crossover,
            "jk": run_jk, "mc": run_mc}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gwm", description="Maximum of the Gaussian random walk with drift -beta.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {"stats": "P(M=0), E M and Var M", "compare": "zeta vs Spitzer convergence table",
             "crossover": "equal-decay drift", "jk": "moment sums J_k", "mc": "Monte Carlo"}
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--beta", type=float)
        p.add_argument("--beta-grid", metavar="START:STOP:STEP")
        p.add_argument("--method", default="auto",
                       choices=["zeta", "spitzer", "extended", "asymptotic", "auto", "both"])
        p.add_argument("--k", type=int)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--format", default="table", choices=["table", "csv", "json"])
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--paths", type=int, default=100_000)
        p.add_argument("--horizon", default="auto")
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out, err)
    except (UsageError, GwmError) as exc:
        print(f"gwm: error: {exc}", file=err)
        return _exit_code(exc)
    except Exception as exc:  # noqa: BLE001
        print(f"gwm: internal error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
