"""Command-line front end.

Subcommands: ``bound``, ``certify``, ``solve``, and the Monte Carlo family
``mc recovery``, ``mc phase``, ``mc smin``, ``mc sumtail``,
``mc concentration``, ``mc gram``. Flags use long names only. Every mc run
writes a JSON manifest into the output directory that suffices to reproduce
it exactly.

Exit status: 0 success, 1 domain/validation error, 2 I/O error,
3 solver non-convergence.
"""

import argparse
import os
import sys
import time

import numpy as np

from . import __version__
from . import bounds as bounds_mod
from . import ensembles, experiments, fileio
from .certify import fuchs_certificate
from .solver import SolverOptions, basis_pursuit

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2
EXIT_NO_CONVERGENCE = 3

#: flags that take no value; config files give them true/false
_BOOL_FLAGS = {"csv", "svg", "bernoulli-refinement"}


class CLIUsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIUsageError(message)


def _parse_int_list(text):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise CLIUsageError(f"expected comma-separated integers, got {text!r}") from exc


def _parse_float_list(text):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise CLIUsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _parse_signs(text):
    """Sign tokens: '+' / '-' / a real number / 're:im'. Either a compact
    run like '+-+' or a comma-separated list."""
    text = text.strip()
    if text == "":
        return np.zeros(0)
    if set(text) <= {"+", "-"}:
        return np.array([1.0 if ch == "+" else -1.0 for ch in text])
    values = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok == "+":
            values.append(1.0)
        elif tok == "-":
            values.append(-1.0)
        elif ":" in tok:
            re_part, _, im_part = tok.partition(":")
            values.append(complex(float(re_part), float(im_part)))
        else:
            values.append(float(tok))
    return np.array(values)


def _ensemble_from_name(name):
    if name == "gaussian":
        return ensembles.gaussian()
    if name == "bernoulli":
        return ensembles.bernoulli()
    raise CLIUsageError(f"unknown ensemble {name!r}")


def _load_config(path):
    pairs = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise fileio.FileFormatError(
                    f"{path}:{lineno}: expected key=value, got {line!r}")
            pairs[key.strip()] = value.strip()
    return pairs


def _inject_config(argv):
    """Replace --config FILE with the file's key=value pairs, spliced in
    after the subcommand words so explicit flags still win."""
    argv = list(argv)
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise CLIUsageError("--config requires a file argument")
    pairs = _load_config(argv[i + 1])
    del argv[i:i + 2]
    tokens = []
    for key, value in pairs.items():
        if key in _BOOL_FLAGS:
            if value.lower() in ("true", "1", "yes"):
                tokens.append(f"--{key}")
            elif value.lower() not in ("false", "0", "no"):
                raise CLIUsageError(f"config flag {key!r} must be boolean, got {value!r}")
        else:
            tokens.extend([f"--{key}", value])
    j = 0
    while j < len(argv) and not argv[j].startswith("-"):
        j += 1
    return argv[:j] + tokens + argv[j:]


def build_parser():
    parser = _Parser(prog="sparselab", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="evaluate a measurement bound",
                       description="Print the smallest integer m satisfying "
                                   "the selected bound.")
    p.add_argument("--theorem", required=True, choices=bounds_mod.THEOREMS)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--N", type=int)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--c", type=float, help="subgaussian constant (subgaussian_2_5)")
    p.add_argument("--ctilde", type=float, help="concentration constant")
    p.add_argument("--delta", type=float, help="Gram deviation (gram_E_2)")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("certify", help="run the exact-recovery certificate",
                       description="Support indices are zero-based.")
    p.add_argument("--matrix", required=True)
    p.add_argument("--support", required=True,
                   help="comma-separated zero-based column indices ('' for empty)")
    p.add_argument("--signs", required=True,
                   help="one unit-modulus token per index: +, -, number, or re:im")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("solve", help="minimize ||z||_1 subject to Az = y")
    p.add_argument("--matrix", required=True)
    p.add_argument("--rhs", required=True, help="right-hand side vector file (n x 1)")
    p.add_argument("--feas-tol", type=float, default=1e-8)
    p.add_argument("--obj-tol", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=50000)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--support-threshold", type=float, default=1e-6)
    p.add_argument("--out", help="directory to write solution.mtx into")
    p.set_defaults(func=_cmd_solve)

    mc = sub.add_parser("mc", help="Monte Carlo experiments")
    mcsub = mc.add_subparsers(dest="mc_command", required=True)

    def common(q, ensemble=True):
        if ensemble:
            q.add_argument("--ensemble", choices=("gaussian", "bernoulli"),
                           default="gaussian")
        q.add_argument("--trials", type=int, required=True)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--out", default=".", help="output directory")
        q.add_argument("--csv", action="store_true", help="write CSV tables")

    p = mcsub.add_parser("recovery", help="empirical recovery probability")
    common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--mode", choices=experiments.MODES, default="certificate")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_mc_recovery)

    p = mcsub.add_parser("phase", help="recovery-rate grid over (m, s)")
    common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--s-values", required=True, help="comma-separated sparsities")
    p.add_argument("--m-values", required=True, help="comma-separated measurement counts")
    p.add_argument("--mode", choices=experiments.MODES, default="certificate")
    p.add_argument("--overlay", choices=bounds_mod.THEOREMS,
                   help="measurement bound drawn over the grid")
    p.add_argument("--eps", type=float, help="failure probability for the overlay")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--svg", action="store_true", help="write phase.svg heatmap")
    p.set_defaults(func=_cmd_mc_phase)

    p = mcsub.add_parser("smin", help="smallest-singular-value tail check")
    common(p, ensemble=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--r-values", required=True, help="comma-separated slack values")
    p.set_defaults(func=_cmd_mc_smin)

    p = mcsub.add_parser("sumtail", help="weighted-sum tail check")
    common(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--coeffs", help="comma-separated coefficient vector")
    group.add_argument("--unit-coeffs", type=int,
                       help="use M coefficients 1/sqrt(M) (unit l2 norm)")
    p.add_argument("--t-values", required=True, help="comma-separated thresholds")
    p.set_defaults(func=_cmd_mc_sumtail)

    p = mcsub.add_parser("concentration", help="norm-concentration check")
    common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--t-values", required=True, help="comma-separated thresholds")
    p.add_argument("--bernoulli-refinement", action="store_true",
                   help="also check the sharper +-1-entry bound (t in (0,1))")
    p.set_defaults(func=_cmd_mc_concentration)

    p = mcsub.add_parser("gram", help="Gram-conditioning rate at the bound's m")
    common(p)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=_cmd_mc_gram)

    return parser


def _cmd_bound(args):
    params = bounds_mod.BoundParams(s=args.s, N=args.N, eps=args.eps, c=args.c,
                                    c_tilde=args.ctilde, delta=args.delta)
    result = bounds_mod.min_measurements(args.theorem, params)
    print(result.m)
    return EXIT_OK


def _cmd_certify(args):
    A = fileio.read_matrix(args.matrix)
    support = _parse_int_list(args.support)
    signs = _parse_signs(args.signs)
    result = fuchs_certificate(A, support, signs)
    print(f"holds={str(result.holds).lower()} max_corr={result.max_correlation:g}")
    return EXIT_OK


def _cmd_solve(args):
    A = fileio.read_matrix(args.matrix)
    y = fileio.read_vector(args.rhs)
    opts = SolverOptions(feasibility_tolerance=args.feas_tol,
                         objective_tolerance=args.obj_tol,
                         max_iterations=args.max_iters,
                         step_parameter=args.step,
                         support_threshold=args.support_threshold)
    report = basis_pursuit(A, y, opts)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        fileio.write_vector(os.path.join(args.out, "solution.mtx"), report.z)
    print(f"converged={str(report.converged).lower()} "
          f"iterations={report.iterations} objective={report.objective:.10g} "
          f"residual={report.feasibility_residual:.3e}")
    return EXIT_OK if report.converged else EXIT_NO_CONVERGENCE


_RATE_SCHEMA = ("successes", "trials", "rate", "wilson_low", "wilson_high")


def _rate_record(estimate):
    return {"successes": estimate.successes, "trials": estimate.trials,
            "rate": estimate.rate, "wilson_low": estimate.wilson_low,
            "wilson_high": estimate.wilson_high}


def _finish_mc(args, name, started, outputs):
    os.makedirs(args.out, exist_ok=True)
    parameters = {k: v for k, v in vars(args).items()
                  if k not in ("func", "command", "mc_command")}
    manifest = fileio.RunManifest(
        command=f"mc {name}", parameters=parameters, master_seed=args.seed,
        version=__version__, duration_seconds=time.monotonic() - started,
        outputs=tuple(outputs),
    )
    path = os.path.join(args.out, f"mc-{name}-manifest.json")
    fileio.write_manifest(path, manifest)


def _cmd_mc_recovery(args):
    started = time.monotonic()
    cfg = experiments.ExperimentConfig(
        ensemble=_ensemble_from_name(args.ensemble),
        signal=experiments.default_signal(args.N, args.s),
        m=args.m, trials=args.trials, master_seed=args.seed,
        mode=args.mode, workers=args.workers,
    )
    estimate, records = experiments.recovery_probability(cfg, return_trials=True)
    outputs = []
    if args.csv:
        os.makedirs(args.out, exist_ok=True)
        rate_path = os.path.join(args.out, "rate.csv")
        fileio.write_csv(rate_path, [_rate_record(estimate)], _RATE_SCHEMA)
        trials_path = os.path.join(args.out, "trials.csv")
        fileio.write_csv(trials_path, records,
                         ("index", "success", "certificate_holds", "max_correlation",
                          "sigma_min", "solver_recovered", "recovery_error"))
        outputs = [rate_path, trials_path]
    _finish_mc(args, "recovery", started, outputs)
    print(f"rate={estimate.rate:.6g} successes={estimate.successes}/{estimate.trials} "
          f"wilson=[{estimate.wilson_low:.6g},{estimate.wilson_high:.6g}]")
    return EXIT_OK


def _cmd_mc_phase(args):
    started = time.monotonic()
    grid = experiments.phase_grid(
        ensemble=_ensemble_from_name(args.ensemble), N=args.N,
        s_values=_parse_int_list(args.s_values),
        m_values=_parse_int_list(args.m_values),
        trials=args.trials, master_seed=args.seed, mode=args.mode,
        overlay_bound=args.overlay, overlay_eps=args.eps, workers=args.workers,
    )
    outputs = []
    os.makedirs(args.out, exist_ok=True)
    if args.csv:
        records = []
        for i_s, s in enumerate(grid.s_values):
            overlay = grid.overlay_m[i_s] if grid.overlay_m is not None else None
            for i_m, m in enumerate(grid.m_values):
                rec = {"m": m, "s": s, "overlay_m": overlay}
                rec.update(_rate_record(grid.cells[i_s][i_m]))
                records.append(rec)
        path = os.path.join(args.out, "phase.csv")
        fileio.write_csv(path, records, ("m", "s") + _RATE_SCHEMA + ("overlay_m",))
        outputs.append(path)
    if args.svg:
        path = os.path.join(args.out, "phase.svg")
        fileio.write_phase_svg(path, grid)
        outputs.append(path)
    _finish_mc(args, "phase", started, outputs)
    print(f"phase grid {len(grid.s_values)}x{len(grid.m_values)} cells "
          f"trials={args.trials} outputs={len(outputs)}")
    return EXIT_OK


def _print_tail_rows(label, rows):
    for row in rows:
        print(f"{label}={row.threshold:g} frequency={row.frequency:.6g} "
              f"bound={row.bound:.6g} within_bound={str(row.within_bound).lower()}")
    print(f"all_within_bounds={str(all(r.within_bound for r in rows)).lower()}")


_TAIL_SCHEMA = ("threshold", "frequency", "bound", "slack", "within_bound")


def _cmd_mc_smin(args):
    started = time.monotonic()
    rows = experiments.verify_smin_tail(args.m, args.s,
                                        _parse_float_list(args.r_values),
                                        args.trials, args.seed)
    outputs = []
    if args.csv:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "smin.csv")
        fileio.write_csv(path, rows, _TAIL_SCHEMA)
        outputs.append(path)
    _finish_mc(args, "smin", started, outputs)
    _print_tail_rows("r", rows)
    return EXIT_OK


def _cmd_mc_sumtail(args):
    started = time.monotonic()
    if args.unit_coeffs is not None:
        if args.unit_coeffs < 1:
            raise CLIUsageError("--unit-coeffs must be positive")
        coeffs = np.full(args.unit_coeffs, 1.0 / np.sqrt(args.unit_coeffs))
    else:
        coeffs = np.array(_parse_float_list(args.coeffs))
    rows = experiments.verify_sum_tail(_ensemble_from_name(args.ensemble), coeffs,
                                       _parse_float_list(args.t_values),
                                       args.trials, args.seed)
    outputs = []
    if args.csv:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "sumtail.csv")
        fileio.write_csv(path, rows, _TAIL_SCHEMA)
        outputs.append(path)
    _finish_mc(args, "sumtail", started, outputs)
    _print_tail_rows("t", rows)
    return EXIT_OK


def _cmd_mc_concentration(args):
    started = time.monotonic()
    rows = experiments.verify_concentration(
        _ensemble_from_name(args.ensemble), args.m, args.N,
        _parse_float_list(args.t_values), args.trials, args.seed,
        use_bernoulli_refinement=args.bernoulli_refinement,
    )
    outputs = []
    if args.csv:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "concentration.csv")
        fileio.write_csv(path, rows,
                         ("t", "frequency", "bound_subgaussian", "bound_bernoulli",
                          "slack", "within_subgaussian", "within_bernoulli"))
        outputs.append(path)
    _finish_mc(args, "concentration", started, outputs)
    ok = all(r.within_subgaussian and (r.within_bernoulli is not False) for r in rows)
    for row in rows:
        extra = ""
        if row.bound_bernoulli is not None:
            extra = (f" bound_bernoulli={row.bound_bernoulli:.6g} "
                     f"within_bernoulli={str(row.within_bernoulli).lower()}")
        print(f"t={row.t:g} frequency={row.frequency:.6g} "
              f"bound={row.bound_subgaussian:.6g} "
              f"within_bound={str(row.within_subgaussian).lower()}{extra}")
    print(f"all_within_bounds={str(ok).lower()}")
    return EXIT_OK


def _cmd_mc_gram(args):
    started = time.monotonic()
    check = experiments.verify_gram(_ensemble_from_name(args.ensemble), args.s,
                                    args.delta, args.eps, args.trials, args.seed)
    outputs = []
    if args.csv:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "gram.csv")
        record = {"m": check.m, "delta": check.delta, "eps": check.eps}
        record.update(_rate_record(check.estimate))
        fileio.write_csv(path, [record], ("m", "delta", "eps") + _RATE_SCHEMA)
        outputs.append(path)
    _finish_mc(args, "gram", started, outputs)
    est = check.estimate
    print(f"m={check.m} rate={est.rate:.6g} successes={est.successes}/{est.trials} "
          f"wilson=[{est.wilson_low:.6g},{est.wilson_high:.6g}]")
    return EXIT_OK


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        argv = _inject_config(argv)
        parser = build_parser()
        args = parser.parse_args(argv)
        return args.func(args)
    except (fileio.FileFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except bounds_mod.NonpositiveDenominatorError as exc:
        print(f"NonpositiveDenominator: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, IndexError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
