"""Command-line interface.

Subcommands::

    fracbeam solve CONFIG      load-displacement and midspan stress CSVs
    fracbeam sweep CONFIG      w_bar over the alpha x lf grid at every load level
    fracbeam converge CONFIG   mesh-convergence table of w_bar over (lf, N_inf, alpha)
    fracbeam validate          built-in validations 1-3 with a pass/fail summary
    fracbeam oracle CONFIG     classical (integer-order) reference run

Exit status is 0 on success, 1 when a validation fails, 2 for configuration
errors and 3 for solver errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import threading
from pathlib import Path

from .config import BeamConfig, load_config
from .errors import ConfigError, DomainError, SolverError
from .post import (
    load_displacement_header,
    load_displacement_rows,
    midplane_sigma_bar,
    stress_rows,
    write_csv,
)
from .solver import solve
from .validation.classical import classical_oracle
from .validation.suite import (
    ConvergenceGrid,
    calibrate_table_load,
    map_ordered,
    run_convergence,
    run_validation_1,
    run_validation_2,
    run_validation_3,
    write_reports,
)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3

_print_lock = threading.Lock()


def _hook(verbose: bool, tag: str = ""):
    if not verbose:
        return None

    def report(step, it, res):
        with _print_lock:
            print(f"{tag}step {step:3d} iter {it:2d} residual {res:.6e}", file=sys.stderr)

    return report


def _output_dir(args, cfg: BeamConfig | None = None) -> Path:
    if args.output is not None:
        return Path(args.output)
    return Path(cfg.output_dir if cfg is not None else "results")


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    out = _output_dir(args, cfg)
    sol = solve(cfg, hook=_hook(args.verbose))
    ld = write_csv(out / "load_displacement.csv", load_displacement_header(cfg), load_displacement_rows(sol))
    st = write_csv(out / "stress_midspan.csv", ["x3_over_h", "sigma_bar"], stress_rows(sol))
    print(f"w_bar(L/2) = {sol.w_bar()[-1]:.10g}")
    print(f"wrote {ld}\nwrote {st}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    out = _output_dir(args, cfg)
    keys = [(lf, a) for lf in cfg.sweep_lf_ratios for a in cfg.sweep_alphas]

    def run(key):
        lf, a = key
        case = cfg.replace(alpha=a, lf_ratio=lf)
        sol = solve(case, hook=_hook(args.verbose, f"[lf={lf:g} alpha={a:g}] "))
        sig = midplane_sigma_bar(sol)
        return [(lf, a, *row[:3], sig) for row in load_displacement_rows(sol)]

    rows = [r for block in map_ordered(run, keys, args.threads) for r in block]
    load_col = "P_bar" if cfg.load_kind == "point" else "q_bar"
    header = ["lf_over_L", "alpha", "load_factor", load_col, "w_bar_mid", "sigma_bar_mid_final"]
    path = write_csv(out / "sweep.csv", header, rows)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = load_config(args.config)
    out = _output_dir(args, cfg)
    q0 = args.q0 if args.q0 is not None else calibrate_table_load(config=cfg)
    grid = ConvergenceGrid(
        alphas=cfg.sweep_alphas,
        lf_ratios=cfg.sweep_lf_ratios,
        n_infs=cfg.sweep_n_inf,
        bc=cfg.bc,
        q0=q0,
        strict_floor=not args.exact_horizon,
        config=cfg,
    )
    table = run_convergence(grid, threads=args.threads)
    t = write_csv(out / "convergence.csv", table.header(), table.rows())
    d = write_csv(out / "convergence_deltas.csv", table.header(), table.delta_rows())
    c = write_csv(
        out / "calibration.csv",
        ["q0_N_per_m", "q_bar", "calibrated", "strict_floor"],
        [(q0, q0 * cfg.L / cfg.h, "yes" if args.q0 is None else "no", str(grid.strict_floor).lower())],
    )
    print(f"q0 = {q0:.10g} N/m (q_bar = {q0 * cfg.L / cfg.h:.6g})")
    print(f"wrote {t}\nwrote {d}\nwrote {c}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.config) if args.config else BeamConfig()
    out = _output_dir(args, cfg)
    reports = [
        run_validation_1(cfg, threads=args.threads),
        run_validation_2(cfg),
        run_validation_3(cfg, threads=args.threads),
    ]
    for r in reports:
        print(r.summary_line())
    print(f"wrote {write_reports(reports, out)}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_oracle(args) -> int:
    cfg = load_config(args.config).replace(alpha=1.0)
    out = _output_dir(args, cfg)
    beam, steps = classical_oracle(cfg)
    full = cfg.load_si * cfg.L / cfg.h
    rows = [
        (s.load_factor, s.load_factor * full, beam.deflection(s.X, 0.5 * cfg.L) / cfg.h, s.iterations) for s in steps
    ]
    path = write_csv(out / "oracle_load_displacement.csv", load_displacement_header(cfg), rows)
    print(f"w_bar(L/2) = {rows[-1][2]:.10g}\nwrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="output directory (overrides [output] directory)")
    common.add_argument("-v", "--verbose", action="store_true", help="log every Newton iteration to stderr")
    common.add_argument("-j", "--threads", type=int, default=1, metavar="N", help="concurrent solves (default 1)")

    parser = argparse.ArgumentParser(prog="fracbeam", description="Fractional-order nonlocal beam solver.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve one configured case")
    p.add_argument("config")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", parents=[common], help="alpha x lf grid at the configured load")
    p.add_argument("config")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("converge", parents=[common], help="mesh-convergence table over (lf, N_inf, alpha)")
    p.add_argument("config")
    p.add_argument("--q0", type=float, help="UDL in N/m; calibrated against the classical oracle when omitted")
    p.add_argument(
        "--exact-horizon",
        action="store_true",
        help="integrate the exact clipped horizon instead of counting whole elements from the host element",
    )
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("validate", parents=[common], help="run validations 1-3")
    p.add_argument("--config", help="base configuration (defaults otherwise)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", parents=[common], help="classical integer-order reference run")
    p.add_argument("config")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        msg = f"solver error: {exc}"
        if exc.step is not None:
            msg += f" (load step {exc.step})"
        print(msg, file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
