"""Command-line interface.

Subcommands: ``simulate`` (write a panel CSV), ``hurst`` (estimate H
from one subject), ``effects`` (estimate mu/sigma2 at known H), and
``experiment`` (replicated grid study writing CSV tables, SVG
histograms and a manifest).

Results go to stdout (JSON) or to files; logs and progress go to
stderr.  Exit codes: 0 success, 2 flag/config/input validation, 3
simulation failure, 4 estimation or data-consistency failure, 5 output
location not writable.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .effects import confidence_intervals, estimate_effects
from .errors import ConfigError, FracmixError, PanelFormatError
from .experiment import CellSummary, run_experiment
from .gram import SamplingGrid, build_gram
from .hurst import FILTERS, estimate_h, named_filter, validate_filter
from .panel import EffectsLaw, simulate_panel
from .panel_io import (
    dumps_result,
    format_real,
    load_experiment_config,
    read_panel_csv,
    write_panel_csv,
)
from .rng import RngStream
from .svg import write_histogram_svg

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SIMULATION = 3
EXIT_ESTIMATION = 4
EXIT_OUTPUT = 5


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fail(code: int, message: str) -> "_CliError":
    return _CliError(code, message)


def _parse_filter(text: str):
    if "," in text:
        try:
            return validate_filter([float(v) for v in text.split(",")])
        except ValueError as exc:
            raise _fail(EXIT_USAGE, f"--filter: {exc}") from None
    try:
        return named_filter(text)
    except KeyError:
        raise _fail(
            EXIT_USAGE,
            f"--filter: unknown filter {text!r}; use one of {sorted(FILTERS)} "
            "or a comma-separated coefficient list",
        ) from None


def cmd_simulate(args) -> int:
    if not 0.0 < args.hurst < 1.0:
        raise _fail(EXIT_USAGE, f"--hurst must lie in (0, 1), got {args.hurst}")
    if args.subjects < 1:
        raise _fail(EXIT_USAGE, f"--subjects must be >= 1, got {args.subjects}")
    if args.n_obs < 1:
        raise _fail(EXIT_USAGE, f"--n-obs must be >= 1, got {args.n_obs}")
    if args.horizon <= 0.0:
        raise _fail(EXIT_USAGE, f"--horizon must be positive, got {args.horizon}")
    if args.sigma2 < 0.0:
        raise _fail(EXIT_USAGE, f"--sigma2 must be >= 0, got {args.sigma2}")
    if args.seed < 0:
        raise _fail(EXIT_USAGE, f"--seed must be >= 0, got {args.seed}")
    grid = SamplingGrid.uniform(args.n_obs, args.horizon)
    try:
        # uniform grids take the FFT sampler; it falls back to the exact
        # one if the embedding degenerates
        panel = simulate_panel(
            args.subjects,
            grid,
            args.hurst,
            EffectsLaw(args.mu, args.sigma2),
            RngStream(args.seed),
            noise="fast",
        )
    except FracmixError as exc:
        raise _fail(EXIT_SIMULATION, f"simulation failed: {exc}") from None
    try:
        write_panel_csv(args.out, panel)
    except OSError as exc:
        raise _fail(EXIT_OUTPUT, f"--out: cannot write {args.out}: {exc}") from None
    print(f"seed: {args.seed}", file=sys.stderr)
    print(f"grid: {' '.join(format_real(t) for t in grid.times)}", file=sys.stderr)
    return EXIT_OK


def cmd_hurst(args) -> int:
    filt = _parse_filter(args.filter)
    if args.k <= 0:
        raise _fail(EXIT_USAGE, f"--k must be positive, got {args.k}")
    panel = _read_panel(args.input)
    if not 1 <= args.subject <= panel.n_subjects:
        raise _fail(
            EXIT_USAGE,
            f"--subject {args.subject} out of range; panel has {panel.n_subjects} subjects",
        )
    if not panel.grid.is_uniform:
        raise _fail(EXIT_ESTIMATION, "hurst estimation needs a uniform time grid")
    try:
        est = estimate_h(panel.y[args.subject - 1], panel.grid.horizon, args.k, filt)
    except FracmixError as exc:
        raise _fail(EXIT_ESTIMATION, f"estimation failed: {exc}") from None
    document = {
        "h_hat": est.h_hat,
        "asym_std": est.asym_std,
        "n": est.n,
        "k": est.k,
        "filter": list(est.filter.coeffs),
        "filter_order": est.filter.order,
        "subject": args.subject,
    }
    sys.stdout.write(dumps_result(document))
    return EXIT_OK


def cmd_effects(args) -> int:
    if not 0.0 < args.level < 1.0:
        raise _fail(EXIT_USAGE, f"--level must lie in (0, 1), got {args.level}")
    if not 0.0 < args.hurst < 1.0:
        raise _fail(EXIT_USAGE, f"--hurst must lie in (0, 1), got {args.hurst}")
    panel = _read_panel(args.input)
    if panel.n_subjects < 2:
        raise _fail(EXIT_ESTIMATION, "effects estimation needs at least two subjects")
    try:
        gram = build_gram(panel.grid, args.hurst)
        est = estimate_effects(panel, gram)
        ci_mu, ci_sigma2 = confidence_intervals(est, args.level)
    except FracmixError as exc:
        raise _fail(EXIT_ESTIMATION, f"estimation failed: {exc}") from None
    document = {
        "mu_hat": est.mu_hat,
        "sigma2_hat": est.sigma2_hat,
        "sigma2_hat_clamped": max(est.sigma2_hat, 0.0),
        "q": est.q,
        "beta_hat": est.beta_hat,
        "n_subjects": est.n_subjects,
        "n_obs": len(panel.grid),
        "hurst": args.hurst,
        "exact_std_basis": "plug-in",
        "exact_std_mu": est.exact_std_mu,
        "exact_std_sigma2": est.exact_std_sigma2,
        "level": args.level,
        "ci_mu": list(ci_mu),
        "ci_sigma2": list(ci_sigma2),
    }
    sys.stdout.write(dumps_result(document))
    return EXIT_OK


def _read_panel(path):
    try:
        return read_panel_csv(path)
    except OSError as exc:
        raise _fail(EXIT_USAGE, f"--input: cannot read {path}: {exc}") from None
    except PanelFormatError as exc:
        raise _fail(EXIT_ESTIMATION, f"--input: {exc}") from None


def cmd_experiment(args) -> int:
    try:
        cfg = load_experiment_config(args.config)
    except OSError as exc:
        raise _fail(EXIT_USAGE, f"--config: cannot read {args.config}: {exc}") from None
    except ConfigError as exc:
        raise _fail(EXIT_USAGE, f"--config: {exc}") from None
    out = args.out
    try:
        os.makedirs(out, exist_ok=True)
        probe = os.path.join(out, ".write-probe")
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        raise _fail(EXIT_OUTPUT, f"--out: directory {out} not writable: {exc}") from None
    print(
        f"running {len(cfg.cells())} cells x {cfg.replications} replications "
        f"(base seed {cfg.base_seed})",
        file=sys.stderr,
    )
    summaries = run_experiment(cfg)
    _write_tables(out, cfg, summaries)
    _write_histograms(out, summaries)
    manifest = {
        "base_seed": cfg.base_seed,
        "config": {
            "h_list": list(cfg.h_list),
            "subjects_list": list(cfg.subjects_list),
            "n_obs_list": list(cfg.n_obs_list),
            "horizon": cfg.horizon,
            "mu0": cfg.mu0,
            "sigma20": cfg.sigma20,
            "replications": cfg.replications,
            "k": cfg.k,
            "filter": list(cfg.filter.coeffs),
            "estimate_hurst": cfg.estimate_hurst,
        },
    }
    with open(os.path.join(out, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(dumps_result(manifest))
    print(f"wrote tables, histograms and manifest to {out}", file=sys.stderr)
    return EXIT_OK


def _write_tables(out, cfg, summaries: list[CellSummary]) -> None:
    columns = [
        "H",
        "N",
        "mean_mu",
        "exact_std_mu",
        "emp_std_mu",
        "mean_sigma2",
        "exact_std_sigma2",
        "emp_std_sigma2",
    ]
    for n_obs in cfg.n_obs_list:
        rows = [s for s in summaries if s.n_obs == n_obs]
        path = os.path.join(out, f"table_n{n_obs}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(columns) + "\n")
            for s in rows:
                fields = [
                    format(s.h, "g"),
                    str(s.n_subjects),
                    format_real(s.mean_mu_hat),
                    format_real(s.exact_std_mu),
                    format_real(s.emp_std_mu),
                    format_real(s.mean_sigma2_hat),
                    format_real(s.exact_std_sigma2),
                    format_real(s.emp_std_sigma2),
                ]
                fh.write(",".join(fields) + "\n")


_PARAM_LABELS = {"mu": "mu estimate", "sigma2": "sigma2 estimate", "hurst": "H estimate"}


def _write_histograms(out, summaries: list[CellSummary]) -> None:
    for s in summaries:
        for param, hist in s.histograms.items():
            name = f"hist_{format(s.h, 'g')}_{s.n_subjects}_{s.n_obs}_{param}.svg"
            title = f"{_PARAM_LABELS[param]} (H={format(s.h, 'g')}, N={s.n_subjects}, n={s.n_obs})"
            write_histogram_svg(
                os.path.join(out, name), hist.edges, hist.counts, title, _PARAM_LABELS[param]
            )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracmix",
        description="Simulation and inference for fractional diffusion panels "
        "with Gaussian random drift effects.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a panel and write it as CSV")
    p.add_argument("--hurst", type=float, required=True, help="Hurst exponent in (0, 1)")
    p.add_argument("--subjects", type=int, required=True, help="number of subjects N")
    p.add_argument("--n-obs", type=int, required=True, help="observations per subject n")
    p.add_argument("--horizon", type=float, required=True, help="time horizon T")
    p.add_argument("--mu", type=float, required=True, help="mean of the random drift rate")
    p.add_argument("--sigma2", type=float, required=True, help="variance of the random drift rate")
    p.add_argument("--seed", type=int, required=True, help="RNG seed")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("hurst", help="estimate the Hurst exponent from one subject")
    p.add_argument("--input", required=True, help="panel CSV path")
    p.add_argument("--subject", type=int, default=1, help="1-based subject index (default 1)")
    p.add_argument("--k", type=float, default=2.0, help="variation power (default 2)")
    p.add_argument(
        "--filter",
        default="diff2",
        help="named filter (diff2, diff3) or comma-separated coefficients",
    )
    p.set_defaults(func=cmd_hurst)

    p = sub.add_parser("effects", help="estimate the random-effect mean and variance")
    p.add_argument("--input", required=True, help="panel CSV path")
    p.add_argument("--hurst", type=float, required=True, help="known Hurst exponent")
    p.add_argument("--level", type=float, default=0.95, help="confidence level (default 0.95)")
    p.set_defaults(func=cmd_effects)

    p = sub.add_parser("experiment", help="run a replicated experiment grid")
    p.add_argument("--config", required=True, help="key = value config file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except FracmixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
