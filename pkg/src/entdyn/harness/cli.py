"""Command-line entry point.

Exit codes: 0 success, 1 verification failure (or no sudden death found),
2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..entanglement import LAW_TOL, NoSuddenDeathError, concurrence, esd_threshold, evolved_gamma
from ..states import scenario_state
from ..tomography import (
    TomographyError,
    clip_to_density,
    fidelity,
    linear_inversion,
    mle_reconstruct,
    read_counts_csv,
    simulate_counts,
    write_counts_csv,
)
from .config import AmplitudeChannelConfig, ConfigError, SweepConfig, load_config
from .emit import emit_csv, emit_svg, rows_to_csv
from .sweep import channel_family, evolved_state, point_seed, run_sweep
from .verify import run_all

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def x_label(cfg: SweepConfig) -> str:
    if isinstance(cfg.channel, AmplitudeChannelConfig):
        return "total reflectivity epsilon"
    if cfg.channel.direct:
        return "dephasing t (kappa = 1 - t)"
    return "quartz retardation (units of center wavelength)"


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    rows = run_sweep(cfg)
    out = cfg.outputs
    if out.csv_path is not None:
        emit_csv(rows, out.csv_path)
        print(f"wrote {out.csv_path} ({len(rows)} rows)")
    else:
        sys.stdout.write(rows_to_csv(rows))
    if out.svg_path is not None and rows:
        emit_svg(rows, out.svg_path, x_label(cfg), f"{cfg.scenario.kind.value} sweep")
        print(f"wrote {out.svg_path}")
    if cfg.scenario.is_pure:
        bad = [r for r in rows if abs(r.c_left - r.c_right) >= LAW_TOL]
        law = "factorization equality"
    else:
        bad = [r for r in rows if r.c_left > r.c_right + LAW_TOL]
        law = "mixed bound"
    if bad:
        print(f"FAIL: {law} violated at {len(bad)} grid point(s)", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_tomo(args) -> int:
    cfg = load_config(args.config)
    if cfg.tomography is None and args.counts_in is None:
        raise ConfigError(f"{args.config}: tomography section is required for 'tomo'")
    grid = cfg.channel.grid
    if not 0 <= args.index < len(grid):
        raise ConfigError(f"--index {args.index} outside grid of {len(grid)} point(s)")
    param = grid[args.index]
    truth = evolved_state(cfg, param)
    tomo = cfg.tomography
    estimator = args.estimator or (tomo.estimator if tomo else "mle")
    if args.counts_in is not None:
        rec = read_counts_csv(args.counts_in)
    else:
        rho0 = scenario_state(cfg.scenario)
        seed = point_seed(tomo.seed, args.index)
        if isinstance(cfg.channel, AmplitudeChannelConfig):
            rec = simulate_counts(rho0, None, tomo.n_total, seed, tomo.noise, epsilon=param)
        else:
            rec = simulate_counts(rho0, channel_family(cfg)(param), tomo.n_total, seed, tomo.noise)
    if args.counts_out is not None:
        write_counts_csv(rec, args.counts_out)
        print(f"wrote {args.counts_out}")
    if estimator == "mle":
        est = mle_reconstruct(rec)
    else:
        est = clip_to_density(linear_inversion(rec))
    print(f"param            {param:.10g}")
    print(f"estimator        {estimator}")
    print(f"fidelity         {fidelity(truth, est):.10f}")
    print(f"concurrence true {concurrence(truth).concurrence:.10f}")
    print(f"concurrence est  {concurrence(est).concurrence:.10f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.samples < 1 or args.seed < 0:
        raise ConfigError("--samples must be >= 1 and --seed >= 0")
    ok = True
    for res in run_all(args.samples, args.seed):
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: {res.detail}")
        ok &= res.passed
    return EXIT_OK if ok else EXIT_FAIL


def cmd_esd(args) -> int:
    cfg = load_config(args.config)
    rho0 = scenario_state(cfg.scenario)
    family = channel_family(cfg)
    grid = cfg.channel.grid
    # first grid interval where Gamma drops from positive to <= 0; later
    # revivals do not matter for the sudden-death point
    gammas = [evolved_gamma(rho0, family, t) for t in grid]
    bracket = next(
        ((grid[i - 1], grid[i]) for i in range(1, len(grid)) if gammas[i - 1] > 0.0 >= gammas[i]),
        (grid[0], grid[-1]),
    )
    try:
        t_star = esd_threshold(rho0, family, bracket)
    except NoSuddenDeathError as exc:
        print(f"no ESD in range: {exc}")
        return EXIT_FAIL
    print(f"threshold {t_star:.10g}")
    print(f"gamma at threshold {evolved_gamma(rho0, family, t_star):.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entdyn",
        description="Two-qubit entanglement dynamics through one-sided noisy channels.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("sweep", help="run a channel sweep and write CSV/SVG")
    p.add_argument("--config", required=True, type=Path, help="JSON sweep config")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tomo", help="simulate tomography at one grid point and reconstruct")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--index", type=int, default=0, help="grid point to use (default 0)")
    p.add_argument("--estimator", choices=("mle", "linear"), default=None)
    p.add_argument("--counts-out", type=Path, default=None, help="write the simulated count record as CSV")
    p.add_argument("--counts-in", type=Path, default=None, help="reconstruct from a count-record CSV")
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("verify", help="run the seeded property suites")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("esd", help="locate the entanglement sudden-death point of a sweep")
    p.add_argument("--config", required=True, type=Path)
    p.set_defaults(func=cmd_esd)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, usage errors exit 2
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, TomographyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
