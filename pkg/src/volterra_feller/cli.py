"""Command line front end.

Subcommands
-----------
test        boundary verdicts from an INI config ([model], [kernel], [test])
scale       tabulate the scale function p and test function v on a state grid
resolvent   resolvent-of-the-first-kind summary and hypothesis checks
approx      fractional-kernel approximation error table (inline flags only)
simulate    Monte Carlo boundary-hit statistics
crosscheck  analytic verdicts compared against Monte Carlo hit fractions

Config format
-------------
INI with sections [model], [kernel], [test], [sim], [output].  Keys are
lower case; unknown sections or keys in a section the subcommand reads are
errors.  Sections a subcommand does not read may be present (one file can
drive several subcommands) and are ignored.

Every run echoes its fully resolved configuration: JSON output carries it
under the "config" key, CSV output as leading '# ' comment lines in INI
form.  Stripping the '# ' prefixes reconstructs a config that reproduces
the run byte for byte.

CSV uses '.' as the decimal separator, '\\n' line endings, and always
emits a header row.

Exit codes: 0 when at least one verdict is decisive (or the subcommand
produces no verdicts), 2 when every verdict is inconclusive, 1 on errors.
"""

import argparse
import configparser
import csv
import io
import json
import math
import sys

from .errors import NumericError, PreconditionError
from .feller import (
    Verdict,
    _interval_span,
    bounded_interval_test,
    family_test,
    necessary_test,
    sufficient_test,
    sup_inf_test,
)
from .fracapprox import (
    QuadratureScheme,
    TruncationScheme,
    approximation_error,
    gaussian_quadrature_kernel,
    geometric_nodes,
    truncation_kernel,
)
from .kernels import ConstantKernel, SumOfExponentialsKernel, TruncatedFractionalKernel
from .resolvent import check_hypotheses, solve_resolvent
from .scale import CIRModel, JacobiModel, PowerModel, ScaleContext
from .simulate import SimConfig, simulate, verdict_crosscheck

__all__ = ["main", "build_parser"]

_SECTIONS = ("model", "kernel", "test", "sim", "output")
_REQUIRED = object()


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1 like any other error, not argparse's 2
    def error(self, message):
        raise CliError(message)


# -- config reading ----------------------------------------------------------


def _read_config(path):
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise CliError(f"cannot parse config {path}: {exc}")
    for section in cp.sections():
        if section not in _SECTIONS:
            raise CliError(f"unknown section [{section}] in {path}")
    return {section: dict(cp.items(section)) for section in cp.sections()}


def _take(sec, section, key, cast=str, default=_REQUIRED):
    if key in sec:
        raw = sec.pop(key)
        try:
            return cast(raw)
        except (TypeError, ValueError):
            raise CliError(f"bad value for '{key}' in [{section}]: {raw!r}")
    if default is _REQUIRED:
        raise CliError(f"missing required key '{key}' in [{section}]")
    return default


def _no_leftovers(sec, section):
    if sec:
        raise CliError(f"unknown key '{sorted(sec)[0]}' in [{section}]")


def _floats(raw):
    parts = [p for p in str(raw).replace(",", " ").split() if p]
    if not parts:
        raise ValueError("empty list")
    return [float(p) for p in parts]


def _float_list_echo(values):
    return ", ".join(repr(float(v)) for v in values)


# -- model / kernel builders -------------------------------------------------


def _build_model(cfg):
    sec = dict(cfg.get("model") or {})
    if not sec:
        raise CliError("config needs a [model] section")
    family = _take(sec, "model", "family")
    if family == "cir":
        kw = {k: _take(sec, "model", k, float) for k in ("kappa", "theta", "sigma", "x0")}
        model = CIRModel(**kw)
    elif family == "jacobi":
        kw = {k: _take(sec, "model", k, float)
              for k in ("a", "b", "kappa", "theta", "sigma", "x0")}
        model = JacobiModel(**kw)
    elif family == "power":
        kw = {k: _take(sec, "model", k, float) for k in ("alpha", "delta", "sigma", "x0")}
        model = PowerModel(**kw)
    else:
        raise CliError(f"unknown model family {family!r}")
    _no_leftovers(sec, "model")
    echo = {"family": family}
    echo.update(kw)
    return model, echo


def _build_kernel(cfg):
    sec = dict(cfg.get("kernel") or {})
    if not sec:
        raise CliError("config needs a [kernel] section")
    kind = _take(sec, "kernel", "kind")
    if kind == "constant":
        level = _take(sec, "kernel", "level", float)
        kernel = ConstantKernel(level)
        echo = {"kind": kind, "level": level}
    elif kind == "sumexp":
        weights = _take(sec, "kernel", "weights", _floats)
        rates = _take(sec, "kernel", "rates", _floats)
        kernel = SumOfExponentialsKernel(weights=tuple(weights), rates=tuple(rates))
        echo = {"kind": kind, "weights": _float_list_echo(weights),
                "rates": _float_list_echo(rates)}
    elif kind == "truncfrac":
        alpha = _take(sec, "kernel", "alpha", float)
        cap = _take(sec, "kernel", "t", float)
        kernel = TruncatedFractionalKernel(alpha, cap)
        echo = {"kind": kind, "alpha": alpha, "t": cap}
    else:
        raise CliError(f"unknown kernel kind {kind!r}")
    _no_leftovers(sec, "kernel")
    return kernel, echo


# -- output writing ----------------------------------------------------------


def _sanitize(obj):
    # JSON has no inf/nan literals; keep the payload strictly valid
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _ini_lines(echo):
    lines = []
    for section in sorted(echo):
        lines.append(f"[{section}]")
        for key in sorted(echo[section]):
            value = echo[section][key]
            if value is None:
                continue
            lines.append(f"{key} = {_csv_cell(value)}")
    return lines


def _resolve_output(cfg, args):
    sec = dict(cfg.get("output") or {}) if cfg is not None else {}
    fmt = _take(sec, "output", "format", str, "json")
    path = _take(sec, "output", "path", str, None)
    _no_leftovers(sec, "output")
    if getattr(args, "format", None):
        fmt = args.format
    if getattr(args, "out", None):
        path = args.out
    if fmt not in ("json", "csv"):
        raise CliError(f"output format must be 'json' or 'csv', got {fmt!r}")
    return {"format": fmt, "path": path}


def _write(echo, payload, rows, columns, out_cfg):
    if out_cfg["format"] == "json":
        obj = {"config": echo}
        obj.update(payload)
        text = json.dumps(_sanitize(obj), indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        for line in _ini_lines(echo):
            buf.write("# " + line + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(col)) for col in columns])
        text = buf.getvalue()
    if out_cfg["path"]:
        with open(out_cfg["path"], "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- verdict helpers ---------------------------------------------------------

_VERDICT_COLUMNS = ("boundary", "verdict", "theorem", "quantity", "value",
                    "threshold", "assumptions")


def _verdict_dicts(verdicts):
    out = []
    for bv in verdicts:
        out.append({
            "boundary": bv.boundary.value,
            "verdict": bv.verdict.value,
            "theorem": bv.theorem,
            "evidence": [
                {"quantity": q, "value": v, "threshold": t} for q, v, t in bv.evidence
            ],
            "assumptions_checked": list(bv.assumptions_checked),
        })
    return out


def _verdict_rows(verdicts):
    rows = []
    for bv in verdicts:
        assumptions = ";".join(bv.assumptions_checked)
        evidence = bv.evidence or (("", "", ""),)
        for quantity, value, threshold in evidence:
            rows.append({
                "boundary": bv.boundary.value,
                "verdict": bv.verdict.value,
                "theorem": bv.theorem,
                "quantity": quantity,
                "value": value,
                "threshold": threshold,
                "assumptions": assumptions,
            })
    return rows


def _verdict_exit_code(verdicts):
    if verdicts and all(bv.verdict is Verdict.INCONCLUSIVE for bv in verdicts):
        return 2
    return 0


def _run_verdicts(cfg, model, kernel):
    sec = dict(cfg.get("test") or {})
    name = _take(sec, "test", "name", str, "family")
    quad_tol = _take(sec, "test", "quad_tol", float, 1e-9)
    max_panels = _take(sec, "test", "max_panels", int, 4096)
    c = _take(sec, "test", "c", float, None)
    echo = {"name": name, "quad_tol": quad_tol, "max_panels": max_panels}
    if name == "family":
        _no_leftovers(sec, "test")
        verdicts = family_test(model, kernel)
        return verdicts, echo
    ctx = ScaleContext(model, kernel, c=c, quad_tol=quad_tol, max_panels=max_panels)
    echo["c"] = ctx.c
    if name == "necessary":
        eps = _take(sec, "test", "eps_shift", float, None)
        _no_leftovers(sec, "test")
        verdict = necessary_test(ctx, eps_shift=eps)
        echo["eps_shift"] = eps if eps is not None else 1e-6 * _interval_span(model)
    elif name == "sufficient":
        n_stages = _take(sec, "test", "n_stages", int, 8)
        _no_leftovers(sec, "test")
        verdict = sufficient_test(ctx, n_stages=n_stages)
        echo["n_stages"] = n_stages
    elif name == "bounded_interval":
        _no_leftovers(sec, "test")
        verdict = bounded_interval_test(ctx)
    elif name == "sup_inf":
        _no_leftovers(sec, "test")
        verdict = sup_inf_test(ctx)
    else:
        raise CliError(f"unknown test name {name!r}")
    return [verdict], echo


def _sim_config(cfg, for_crosscheck=False):
    sec = dict(cfg.get("sim") or {})
    if not sec:
        raise CliError("config needs a [sim] section")
    kw = {
        "dt": _take(sec, "sim", "dt", float),
        "horizon": _take(sec, "sim", "horizon", float),
        "n_paths": _take(sec, "sim", "n_paths", int),
        "scheme": _take(sec, "sim", "scheme", str, "conv_euler"),
        "seed": _take(sec, "sim", "seed", int, 0),
        "blowup_cap": _take(sec, "sim", "blowup_cap", float, 1e6),
    }
    hit_eps = _take(sec, "sim", "hit_eps", float, None)
    if hit_eps is not None:
        kw["hit_eps"] = hit_eps
    tols = {}
    if for_crosscheck:
        tols["leak_tol"] = _take(sec, "sim", "leak_tol", float, 0.02)
        tols["floor_tol"] = _take(sec, "sim", "floor_tol", float, 0.05)
    _no_leftovers(sec, "sim")
    config = SimConfig(**kw)
    echo = dict(kw)
    echo.update(tols)
    return config, tols, echo


# -- subcommands -------------------------------------------------------------


def _cmd_test(args):
    cfg = _read_config(args.config)
    out_cfg = _resolve_output(cfg, args)
    model, m_echo = _build_model(cfg)
    kernel, k_echo = _build_kernel(cfg)
    verdicts, t_echo = _run_verdicts(cfg, model, kernel)
    echo = {"model": m_echo, "kernel": k_echo, "test": t_echo, "output": out_cfg}
    _write(echo, {"verdicts": _verdict_dicts(verdicts)},
           _verdict_rows(verdicts), _VERDICT_COLUMNS, out_cfg)
    return _verdict_exit_code(verdicts)


def _cmd_scale(args):
    cfg = _read_config(args.config)
    out_cfg = _resolve_output(cfg, args)
    model, m_echo = _build_model(cfg)
    kernel, k_echo = _build_kernel(cfg)
    sec = dict(cfg.get("test") or {})
    xs = _take(sec, "test", "x_grid", _floats)
    beta = _take(sec, "test", "beta", float, 0.0)
    gamma = _take(sec, "test", "gamma", float, 0.0)
    quad_tol = _take(sec, "test", "quad_tol", float, 1e-9)
    max_panels = _take(sec, "test", "max_panels", int, 4096)
    c = _take(sec, "test", "c", float, None)
    _take(sec, "test", "name", str, "scale")
    _no_leftovers(sec, "test")
    ctx = ScaleContext(model, kernel, c=c, beta=beta, gamma=gamma,
                       quad_tol=quad_tol, max_panels=max_panels)
    rows = [{"x": float(x), "p": ctx.scale(x), "v": ctx.v(x)} for x in xs]
    t_echo = {"x_grid": _float_list_echo(xs), "beta": beta, "gamma": gamma,
              "quad_tol": quad_tol, "max_panels": max_panels, "c": ctx.c}
    echo = {"model": m_echo, "kernel": k_echo, "test": t_echo, "output": out_cfg}
    _write(echo, {"rows": rows}, rows, ("x", "p", "v"), out_cfg)
    return 0


def _cmd_resolvent(args):
    cfg = _read_config(args.config)
    out_cfg = _resolve_output(cfg, args)
    kernel, k_echo = _build_kernel(cfg)
    sec = dict(cfg.get("sim") or {})
    if not sec:
        raise CliError("config needs a [sim] section with dt and horizon")
    dt = _take(sec, "sim", "dt", float)
    horizon = _take(sec, "sim", "horizon", float)
    for key in ("n_paths", "scheme", "seed", "hit_eps", "blowup_cap"):
        sec.pop(key, None)
    _no_leftovers(sec, "sim")
    tsec = dict(cfg.get("test") or {})
    tol = _take(tsec, "test", "tol", float, None)
    _no_leftovers(tsec, "test")
    grid = solve_resolvent(kernel, dt, horizon)
    report = check_hypotheses(grid, tol=tol)
    row = {
        "atom": grid.atom,
        "density_at_0": float(grid.density[0]),
        "kl_residual": grid.kl_residual,
        "tol": report.tol,
        "density_nonnegative": report.density_nonnegative,
        "density_min": report.density_min,
        "kprime_conv_nonpositive": report.kprime_conv_nonpositive,
        "kprime_conv_max": report.kprime_conv_max,
        "kprime_conv_nondecreasing": report.kprime_conv_nondecreasing,
        "kprime_conv_min_increment": report.kprime_conv_min_increment,
        "passed": report.passed,
    }
    echo = {"kernel": k_echo, "sim": {"dt": dt, "horizon": horizon},
            "test": {"tol": report.tol}, "output": out_cfg}
    _write(echo, {"resolvent": row}, [row], tuple(row.keys()), out_cfg)
    return 0


def _cmd_approx(args):
    out_cfg = _resolve_output(None, args)
    t_grid = _floats(args.t_grid)
    a_echo = {"alpha": args.alpha, "scheme": args.scheme,
              "t_grid": _float_list_echo(t_grid)}
    if args.scheme == "truncation":
        if args.T is None:
            raise CliError("--scheme truncation needs --T")
        scheme = TruncationScheme(args.alpha, args.T)
        kernel = truncation_kernel(scheme)
        a_echo["t"] = args.T
    else:
        if args.intervals is None:
            raise CliError(f"--scheme {args.scheme} needs --intervals")
        nodes = geometric_nodes(args.intervals, ratio=args.ratio, xi1=args.xi1)
        weight = "fractional" if args.scheme == "fractional" else "geometric_bb2"
        scheme = QuadratureScheme(args.alpha, nodes, q=args.q, weight=weight)
        kernel = gaussian_quadrature_kernel(scheme)
        a_echo.update({"intervals": args.intervals, "q": args.q,
                       "ratio": args.ratio, "xi1": args.xi1})
    k0, kp0 = kernel.k0_kprime0()
    a_echo["k0"] = float(k0)
    a_echo["kprime0"] = float(kp0)
    rows = approximation_error(scheme, t_grid)
    echo = {"approx": a_echo, "output": out_cfg}
    _write(echo, {"rows": rows}, rows,
           ("t", "approx", "exact", "abs_error", "rel_error"), out_cfg)
    return 0


def _cmd_simulate(args):
    cfg = _read_config(args.config)
    out_cfg = _resolve_output(cfg, args)
    model, m_echo = _build_model(cfg)
    kernel, k_echo = _build_kernel(cfg)
    config, _, s_echo = _sim_config(cfg)
    report = simulate(model, kernel, config)
    row = report.as_dict()
    echo = {"model": m_echo, "kernel": k_echo, "sim": s_echo, "output": out_cfg}
    _write(echo, {"report": row}, [row], tuple(row.keys()), out_cfg)
    return 0


def _cmd_crosscheck(args):
    cfg = _read_config(args.config)
    out_cfg = _resolve_output(cfg, args)
    model, m_echo = _build_model(cfg)
    kernel, k_echo = _build_kernel(cfg)
    verdicts, t_echo = _run_verdicts(cfg, model, kernel)
    config, tols, s_echo = _sim_config(cfg, for_crosscheck=True)
    report = simulate(model, kernel, config)
    result = verdict_crosscheck(verdicts, report, **tols)
    rows = [dict(check, consistent=result["consistent"]) for check in result["checks"]]
    payload = {
        "verdicts": _verdict_dicts(verdicts),
        "report": report.as_dict(),
        "crosscheck": result,
    }
    echo = {"model": m_echo, "kernel": k_echo, "test": t_echo, "sim": s_echo,
            "output": out_cfg}
    _write(echo, payload, rows,
           ("verdict", "boundary", "theorem", "observed", "tolerance", "status",
            "consistent"), out_cfg)
    return _verdict_exit_code(verdicts)


# -- parser ------------------------------------------------------------------


def _add_output_flags(sub):
    sub.add_argument("--format", choices=("json", "csv"), default=None,
                     help="output format (overrides [output] format)")
    sub.add_argument("--out", default=None, metavar="PATH",
                     help="output file (overrides [output] path; default stdout)")


def _add_config_command(subparsers, name, help_text, func):
    sub = subparsers.add_parser(name, help=help_text, description=help_text)
    sub.add_argument("--config", required=True, metavar="PATH",
                     help="INI config file")
    _add_output_flags(sub)
    sub.set_defaults(func=func)
    return sub


def build_parser():
    parser = _Parser(
        prog="volterra-feller",
        description="Boundary attainment tests for one-dimensional stochastic "
                    "Volterra equations with nonsingular kernels.",
        epilog="Exit codes: 0 decisive or informational, 2 every verdict "
               "inconclusive, 1 error.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    _add_config_command(subparsers, "test",
                        "Run the boundary test named in [test] and print verdicts.",
                        _cmd_test)
    _add_config_command(subparsers, "scale",
                        "Tabulate the scale function p and test function v on x_grid.",
                        _cmd_scale)
    _add_config_command(subparsers, "resolvent",
                        "Solve for the resolvent density and check the standing "
                        "hypotheses.", _cmd_resolvent)
    approx = subparsers.add_parser(
        "approx",
        help="Compare a fractional-kernel approximation against the exact kernel.",
        description="Compare a fractional-kernel approximation against the "
                    "exact kernel on a lag grid.  Configured entirely by flags.",
    )
    approx.add_argument("--alpha", type=float, required=True,
                        help="fractional index in (0, 1)")
    approx.add_argument("--scheme",
                        choices=("truncation", "fractional", "geometric_bb2"),
                        default="truncation",
                        help="approximation scheme (default truncation)")
    approx.add_argument("--T", type=float, default=None,
                        help="rate-domain truncation cap (truncation scheme)")
    approx.add_argument("--intervals", type=int, default=None, metavar="N",
                        help="number of geometric quadrature intervals")
    approx.add_argument("--q", type=int, default=1,
                        help="Gauss nodes per interval (default 1)")
    approx.add_argument("--ratio", type=float, default=6.4,
                        help="geometric ladder ratio (default 6.4)")
    approx.add_argument("--xi1", type=float, default=1.0,
                        help="first ladder breakpoint (default 1.0)")
    approx.add_argument("--t-grid", default="0.01,0.1,1.0,10.0", metavar="LAGS",
                        help="comma-separated lags (default 0.01,0.1,1.0,10.0)")
    _add_output_flags(approx)
    approx.set_defaults(func=_cmd_approx)
    _add_config_command(subparsers, "simulate",
                        "Simulate paths and report boundary-hit statistics.",
                        _cmd_simulate)
    _add_config_command(subparsers, "crosscheck",
                        "Run the configured test, simulate, and compare the two.",
                        _cmd_crosscheck)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, PreconditionError, NumericError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
