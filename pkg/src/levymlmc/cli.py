"""Config-driven experiment runner.

Verbs:

    rate-sweep      per level n: median/IQR of |U_1| raw and normalized by
                    the sharp rate, plus log-log rate fits
    limit-compare   KS distance, quantiles and characteristic-function
                    table between normalized terminal errors and limit-law
                    draws (plus the coupled gap statistic for C3)
    measure-audit   truncated-moment ratios against their small-cutoff
                    limits on a log grid of cutoffs, with the
                    double-integration identity residuals
    dump-path       node times and Y values of one simulated path

Outputs are CSV with one header row, floats at 17 significant digits, no
timestamps: a given (config, seed) produces byte-identical files whatever
--threads is.  Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import rng, runner
from .config import ConfigError, ExperimentConfig, load_config
from .measure import QuadratureError, fubini_check, tail_stats, xlog_integral
from .paths import sample_path
from .scheme import GridSpec, RegimeError, make_case_params
from .stats import empirical_cf, ks_distance, rate_fit

_ECF_GRID = (0.5, 1.0, 2.0)
_AUDIT_BETAS = tuple(10.0**-k for k in range(1, 7))


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    v = float(value)
    if math.isnan(v):
        return "nan"
    return f"{v:.17g}"


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if not isinstance(v, str) else v for v in row) + "\n")


def _quantiles(sample, qs=(0.05, 0.25, 0.5, 0.75, 0.95)):
    return [float(np.quantile(sample, q)) for q in qs]


def _dump_path(config: ExperimentConfig, case, n: int, out_path: str) -> None:
    model = config.build_model()
    grid = GridSpec(n, config.m)
    gen = rng.substream(config.seed, rng.ROLE_PATH, 0)
    path = sample_path(model, case, grid, config.small_jump_mode, gen)
    rows = [
        (idx, idx / grid.n_cells, y)
        for idx, y in enumerate(path.y_at_nodes)
    ]
    _write_csv(out_path, ("node_index", "time", "y_value"), rows)


def cmd_rate_sweep(config: ExperimentConfig, threads: int, out_dir: str) -> None:
    model = config.build_model()
    coeff = config.build_coefficient()
    case_id = config.resolve_case(model)
    x0 = config.coefficient.x0

    header = (
        "row_type", "case", "n", "m", "paths", "u_nm", "beta_n",
        "median_abs_u1", "iqr_abs_u1", "median_norm_u1", "iqr_norm_u1",
        "slope", "intercept", "r_squared",
    )
    rows = []
    med_raw, med_norm = [], []
    for n in config.n_levels:
        case = make_case_params(model, case_id, n, config.m, config.model.alpha)
        grid = GridSpec(n, config.m)
        normalized = runner.terminal_errors(
            model, case, grid, coeff, x0, config.paths, config.seed,
            mode=config.small_jump_mode, threads=threads,
        )
        raw = np.abs(normalized) / case.u_nm
        normed = np.abs(normalized)
        q_raw = np.quantile(raw, [0.25, 0.5, 0.75])
        q_norm = np.quantile(normed, [0.25, 0.5, 0.75])
        med_raw.append(float(q_raw[1]))
        med_norm.append(float(q_norm[1]))
        rows.append((
            "level", case_id, n, config.m, config.paths, case.u_nm, case.beta_n,
            q_raw[1], q_raw[2] - q_raw[0], q_norm[1], q_norm[2] - q_norm[0],
            None, None, None,
        ))
        if config.emit_paths:
            _dump_path(config, case, n, os.path.join(out_dir, f"path_n{n}.csv"))

    for label, stats in (("fit_raw", med_raw), ("fit_normalized", med_norm)):
        if len(config.n_levels) >= 2 and all(s > 0 for s in stats):
            fit = rate_fit(config.n_levels, stats)
            rows.append((
                label, case_id, None, config.m, config.paths, None, None,
                None, None, None, None, fit.slope, fit.intercept, fit.r_squared,
            ))
        else:
            rows.append((
                label, case_id, None, config.m, config.paths, None, None,
                None, None, None, None, None, None, None,
            ))
    _write_csv(os.path.join(out_dir, "rate_sweep.csv"), header, rows)


def cmd_limit_compare(config: ExperimentConfig, threads: int, out_dir: str) -> None:
    model = config.build_model()
    coeff = config.build_coefficient()
    case_id = config.resolve_case(model)
    x0 = config.coefficient.x0
    n_top = config.n_levels[-1]
    case_top = make_case_params(model, case_id, n_top, config.m, config.model.alpha)

    limit_draws = runner.limit_terminals(
        model, case_top, coeff, x0, config.m, config.limit_samples, config.seed,
        config.n_ref, beta_floor=case_top.beta_n, mode=config.small_jump_mode,
        threads=threads,
    )

    header = (
        "row_type", "case", "n", "m", "paths", "limit_samples", "ks_distance",
        "coupled_mean_gap",
        "q05_emp", "q25_emp", "q50_emp", "q75_emp", "q95_emp",
        "q05_lim", "q25_lim", "q50_lim", "q75_lim", "q95_lim",
    )
    rows = []
    top_sample = None
    for n in config.n_levels:
        case = make_case_params(model, case_id, n, config.m, config.model.alpha)
        grid = GridSpec(n, config.m)
        emp = runner.terminal_errors(
            model, case, grid, coeff, x0, config.paths, config.seed,
            mode=config.small_jump_mode, threads=threads,
        )
        if n == n_top:
            top_sample = emp
        ks = ks_distance(emp, limit_draws)
        gap = None
        if case_id == "C3":
            gap = float(np.mean(runner.coupled_limit_gap(
                model, case, grid, coeff, x0, config.paths, config.seed,
                mode=config.small_jump_mode, threads=threads,
            )))
        rows.append((
            "level", case_id, n, config.m, config.paths, config.limit_samples,
            ks, gap, *_quantiles(emp), *_quantiles(limit_draws),
        ))
    _write_csv(os.path.join(out_dir, "limit_compare.csv"), header, rows)

    cf_emp = empirical_cf(top_sample, _ECF_GRID)
    cf_lim = empirical_cf(limit_draws, _ECF_GRID)
    cf_rows = [
        ("ecf", u, ce.real, ce.imag, cl.real, cl.imag)
        for u, ce, cl in zip(_ECF_GRID, cf_emp, cf_lim)
    ]
    _write_csv(
        os.path.join(out_dir, "limit_cf.csv"),
        ("row_type", "u", "emp_re", "emp_im", "limit_re", "limit_im"),
        cf_rows,
    )


def cmd_measure_audit(config: ExperimentConfig, threads: int, out_dir: str) -> None:
    model = config.build_model()
    alpha = config.model.alpha
    p = model.jump_bound_p

    header = (
        "beta", "alpha", "theta_beta", "theta_scale_ratio", "c_ratio", "rho_ratio",
        "dplus_ratio", "dminus_ratio", "d_prime", "xlog_ratio",
        "fubini_res_abs_pos", "fubini_res_abs_neg",
        "fubini_res_xlog_pos", "fubini_res_xlog_neg",
    )

    if hasattr(model, "theta_plus_const"):
        th_p, th_m = model.theta_plus_const, model.theta_minus_const
    else:
        # H2 constants of the tempered model: 2C/Y split evenly
        th_p = th_m = model.c / model.y
    theta = th_p + th_m
    th_prime = th_p - th_m

    def dplus_ratio(ts):
        if th_p == 0:
            return float("nan")
        if alpha > 1:
            return ts.beta ** (alpha - 1.0) * ts.d_plus / (alpha * th_p / (alpha - 1.0))
        if alpha == 1:
            return ts.d_plus / math.log(1.0 / ts.beta) / th_p
        return ts.d_plus / model.moment_plus(0.0, p, 1.0)

    def dminus_ratio(ts):
        if th_m == 0:
            return float("nan")
        if alpha > 1:
            return ts.beta ** (alpha - 1.0) * ts.d_minus / (alpha * th_m / (alpha - 1.0))
        if alpha == 1:
            return ts.d_minus / math.log(1.0 / ts.beta) / th_m
        return ts.d_minus / model.moment_minus(0.0, p, 1.0)

    rows = []
    for beta in _AUDIT_BETAS:
        ts = tail_stats(model, beta, alpha)
        theta_ratio = beta**alpha * ts.theta / theta
        c_ratio = ts.c_beta * beta ** (alpha - 2.0) / (alpha * theta / (2.0 - alpha))
        rho_ratio = ts.rho / math.log(1.0 / beta) / (alpha * theta)
        if alpha == 1.0 and th_prime != 0.0:
            xlog_ratio = xlog_integral(model, beta, 1.0) / math.log(1.0 / beta) ** 2 / (
                -th_prime / 2.0
            )
        else:
            xlog_ratio = float("nan")
        res = []
        for variant in ("abs_pos", "abs_neg", "xlog_pos", "xlog_neg"):
            gamma = 2.0
            lhs, rhs = fubini_check(model, beta, 1.0, gamma, variant)
            res.append(abs(lhs - rhs) / max(abs(lhs), 1e-300))
        rows.append((
            beta, alpha, ts.theta, theta_ratio, c_ratio, rho_ratio,
            dplus_ratio(ts), dminus_ratio(ts), ts.d_prime, xlog_ratio, *res,
        ))
    _write_csv(os.path.join(out_dir, "measure_audit.csv"), header, rows)


def cmd_dump_path(config: ExperimentConfig, threads: int, out_dir: str) -> None:
    model = config.build_model()
    case_id = config.resolve_case(model)
    n = config.n_levels[-1]
    case = make_case_params(model, case_id, n, config.m, config.model.alpha)
    _dump_path(config, case, n, os.path.join(out_dir, f"path_n{n}.csv"))


_COMMANDS = {
    "rate-sweep": cmd_rate_sweep,
    "limit-compare": cmd_limit_compare,
    "measure-audit": cmd_measure_audit,
    "dump-path": cmd_dump_path,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="levymlmc",
        description="Two-level Euler error experiments for pure-jump Levy SDEs",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="experiment config file")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")
    parser.add_argument("--out", default=None, help="override the output directory")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = ExperimentConfig(
                **{**config.__dict__, "seed": args.seed}
            )
        out_dir = args.out if args.out is not None else config.output_dir
        os.makedirs(out_dir, exist_ok=True)
        # fail fast on an unclassifiable model before any simulation
        config.resolve_case(config.build_model())
    except (ConfigError, RegimeError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        _COMMANDS[args.command](config, max(args.threads, 1), out_dir)
    except (QuadratureError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except RegimeError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
