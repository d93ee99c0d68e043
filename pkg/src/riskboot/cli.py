"""Command line interface.

Three subcommands:

  estimate   load return or price files, bootstrap the requested measures
             and write the report tables
  synth      write a synthetic return file in the ingest CSV schema
  validate   check the estimators against their closed-form and quadrature
             oracles and report pass/fail per check

Exit codes: 0 success, 1 estimation or validation failure, 2 bad input or
configuration. Every source of randomness flows from one master seed, which
may come from --seed, from the RISKBOOT_SEED environment variable or from
the command's default; the seed and where it came from are always echoed in
the run metadata.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from . import __version__
from .bootstrap import BootstrapConfig, Measure, run_grid
from .ingest import (
    IngestError,
    drop_zero_returns,
    load_prices,
    load_returns,
    log_returns,
    summary_stats,
)
from .measures import (
    MIN_RISK_AVERSION,
    LossSample,
    Position,
    QuantileMethod,
    expected_shortfall,
    spectral_risk_measure,
    spectral_weights,
    to_losses,
    validate_weighting,
    value_at_risk,
)
from .report import (
    MEAN_COLUMN,
    build_measure_table,
    build_summary_table,
    figure_csv,
    to_csv,
    to_kv,
    to_text,
    weight_curves,
)
from .synthetic import (
    Normal,
    SkewedMix,
    StudentT,
    SyntheticSpec,
    generate,
    normal_es_oracle,
    normal_quantile,
    normal_var_oracle,
    srm_quadrature_oracle,
)

SEED_ENV_VAR = "RISKBOOT_SEED"

_QUANTILE_METHODS = {
    "order": QuantileMethod.ORDER_STATISTIC,
    "interp": QuantileMethod.LINEAR_INTERPOLATION,
}


class ConfigError(ValueError):
    """Bad command configuration; carries every problem, not just the first."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


# ----------------------------------------------------------------------
# shared helpers
# ----------------------------------------------------------------------

def _resolve_seed(flag_value, default, problems):
    """Seed precedence: explicit flag, then environment, then default."""
    if flag_value is not None:
        return flag_value, "flag"
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is not None:
        try:
            return int(raw), "env"
        except ValueError:
            problems.append(f"cannot parse {SEED_ENV_VAR}={raw!r} as an integer seed")
            return default, "env"
    return default, "default"


def _parse_float_list(text, flag, problems):
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(float(token))
        except ValueError:
            problems.append(f"{flag}: cannot parse {token!r} as a number")
    if not values:
        problems.append(f"{flag}: no usable values in {text!r}")
    if len(set(values)) != len(values):
        problems.append(f"{flag}: duplicate values in {text!r}")
    return values


def _check_seed(seed, problems):
    if not 0 <= seed < 2 ** 64:
        problems.append(f"seed must fit in an unsigned 64-bit integer, got {seed}")


def _fmt_num(x) -> str:
    return f"{x:g}"


# ----------------------------------------------------------------------
# estimate
# ----------------------------------------------------------------------

def _estimate_config(args):
    problems = []

    if not args.input:
        problems.append("at least one --input file is required")
    for path in args.input or ():
        if not os.path.isfile(path):
            problems.append(f"--input {path}: file not found")

    labels = list(args.label or ())
    if labels and len(labels) != len(args.input or ()):
        problems.append(
            f"got {len(labels)} --label values for {len(args.input or ())} --input files")
    if not labels:
        labels = [Path(p).stem for p in (args.input or ())]
    if len(set(labels)) != len(labels):
        problems.append(f"contract labels must be unique, got {labels}")
    if MEAN_COLUMN in labels:
        problems.append(f"contract label {MEAN_COLUMN!r} is reserved for the row-mean column")

    if bool(args.price_col) == bool(args.return_col):
        problems.append("exactly one of --price-col and --return-col is required")

    measures = []
    for token in args.measure.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token not in ("var", "es", "srm"):
            problems.append(f"--measure: unknown measure {token!r}, expected var, es or srm")
        elif Measure(token) in measures:
            problems.append(f"--measure: duplicate measure {token!r}")
        else:
            measures.append(Measure(token))
    if not measures:
        problems.append(f"--measure: no usable measures in {args.measure!r}")

    alphas = _parse_float_list(args.alpha, "--alpha", problems)
    for a in alphas:
        if not 0.0 < a < 1.0:
            problems.append(f"--alpha: confidence level {a:g} must lie strictly between 0 and 1")
    aras = _parse_float_list(args.ara, "--ara", problems)
    for k in aras:
        if k < MIN_RISK_AVERSION:
            problems.append(
                f"--ara: risk aversion {k:g} is below {MIN_RISK_AVERSION:g}; "
                "such weights are numerically flat, use the plain mean instead")

    if args.resamples < 2:
        problems.append(f"--resamples must be at least 2, got {args.resamples}")
    if not 0.0 < args.ci_coverage < 1.0:
        problems.append(f"--ci-coverage must lie strictly between 0 and 1, got {args.ci_coverage:g}")
    if args.workers < 1:
        problems.append(f"--workers must be at least 1, got {args.workers}")

    seed, seed_source = _resolve_seed(args.seed, 0, problems)
    _check_seed(seed, problems)

    if problems:
        raise ConfigError(problems)

    positions = {
        "long": [Position.LONG],
        "short": [Position.SHORT],
        "both": [Position.LONG, Position.SHORT],
    }[args.position]
    return labels, measures, alphas, aras, positions, seed, seed_source


def _load_series(args, labels):
    series = []
    for path, label in zip(args.input, labels):
        if args.price_col:
            prices = load_prices(path, date_col=args.date_col, price_col=args.price_col,
                                 date_format=args.date_format, label=label)
            one = log_returns(prices)
        else:
            one = load_returns(path, date_col=args.date_col, return_col=args.return_col,
                               date_format=args.date_format, label=label)
        if args.drop_zero_returns:
            one = drop_zero_returns(one)
        series.append(one)
    return series


def _metadata_lines(args, seed, seed_source, labels, measures, alphas, aras,
                    positions, failed):
    return [
        "command = estimate",
        f"version = {__version__}",
        f"seed = {seed}",
        f"seed_source = {seed_source}",
        f"resamples = {args.resamples}",
        f"ci_coverage = {_fmt_num(args.ci_coverage)}",
        f"quantile_method = {args.quantile_method}",
        f"measures = {','.join(m.value for m in measures)}",
        f"alphas = {','.join(_fmt_num(a) for a in alphas)}",
        f"aras = {','.join(_fmt_num(k) for k in aras)}",
        f"positions = {','.join(p.value for p in positions)}",
        f"workers = {args.workers}",
        f"format = {args.format}",
        f"inputs = {','.join(args.input)}",
        f"labels = {','.join(labels)}",
        f"failed_cells = {failed}",
    ]


def _cmd_estimate(args) -> int:
    labels, measures, alphas, aras, positions, seed, seed_source = _estimate_config(args)
    series = _load_series(args, labels)

    stats_pairs = [(s.label, summary_stats(s)) for s in series]
    samples = [to_losses(s, position) for s in series for position in positions]

    grid_params = {}
    for measure in measures:
        grid_params[measure] = aras if measure is Measure.SRM else alphas
    config = BootstrapConfig(
        resamples=args.resamples,
        master_seed=seed,
        quantile_method=_QUANTILE_METHODS[args.quantile_method],
        ci_coverage=args.ci_coverage)

    print(f"[config] seed={seed} seed_source={seed_source} resamples={args.resamples} "
          f"workers={args.workers} cells={len(samples) * sum(len(v) for v in grid_params.values())}")
    grid = run_grid(samples, grid_params, config, workers=args.workers)
    for cell in grid.failed:
        print(f"[warn] cell failed: {cell.sample_label} {cell.position.value} "
              f"{cell.measure.value}({_fmt_num(cell.parameter)}): {cell.error}",
              file=sys.stderr)

    tables = [build_summary_table(stats_pairs)]
    for measure in measures:
        tables.append(build_measure_table(grid, measure, grid_params[measure],
                                          ci_coverage=args.ci_coverage))

    render = {"text": to_text, "csv": to_csv, "kv": to_kv}[args.format]
    extension = {"text": "txt", "csv": "csv", "kv": "kv"}[args.format]
    metadata = _metadata_lines(args, seed, seed_source, labels, measures, alphas,
                               aras, positions, len(grid.failed))

    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for table in tables:
            path = out_dir / f"{table.name}.{extension}"
            path.write_text(render(table), encoding="utf-8")
            print(f"[write] {path}")
        if args.figure1:
            path = out_dir / "figure1.csv"
            path.write_text(figure_csv(weight_curves(aras)), encoding="utf-8")
            print(f"[write] {path}")
        path = out_dir / "run.kv"
        path.write_text("\n".join(metadata) + "\n", encoding="utf-8")
        print(f"[write] {path}")
    else:
        for line in metadata:
            print(f"[meta] {line}")
        for table in tables:
            print()
            print(render(table), end="")
        if args.figure1:
            print()
            print(figure_csv(weight_curves(aras)), end="")

    if grid.failed:
        print(f"RESULT failed_cells={len(grid.failed)}")
        return 1
    print("RESULT ok")
    return 0


# ----------------------------------------------------------------------
# synth
# ----------------------------------------------------------------------

def _synth_family(args, problems):
    try:
        if args.dist == "normal":
            return Normal(mu=args.mu, sigma=args.sigma)
        if args.dist == "t":
            if args.dof is None:
                problems.append("--dist t requires --dof")
                return None
            return StudentT(dof=args.dof, scale=args.scale)
        return SkewedMix(mu=args.mu, sigma=args.sigma, weight=args.weight,
                         shift=args.shift, widen=args.widen)
    except ValueError as exc:
        problems.append(str(exc))
        return None


def _cmd_synth(args) -> int:
    problems = []
    if args.n < 1:
        problems.append(f"--n must be at least 1, got {args.n}")
    seed, seed_source = _resolve_seed(args.seed, 0, problems)
    _check_seed(seed, problems)
    family = _synth_family(args, problems)
    if problems:
        raise ConfigError(problems)

    spec = SyntheticSpec(family=family, n=args.n, seed=seed, label=args.label)
    series = generate(spec)
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["date", "return"])
        for d, r in zip(series.dates, series.returns):
            writer.writerow([d.isoformat(), repr(float(r))])
    print(f"[config] dist={series.label} n={args.n} seed={seed} seed_source={seed_source}")
    print(f"[write] {out}")
    print("RESULT ok")
    return 0


# ----------------------------------------------------------------------
# validate
# ----------------------------------------------------------------------

def _cmd_validate(args) -> int:
    problems = []
    if args.n < 100:
        problems.append(f"--n must be at least 100 for the oracle checks, got {args.n}")
    if args.tolerance_scale < 0.0:
        problems.append(f"--tolerance-scale must be nonnegative, got {args.tolerance_scale:g}")
    seed, seed_source = _resolve_seed(args.seed, 7, problems)
    _check_seed(seed, problems)
    selected = set()
    for token in args.measure.split(","):
        token = token.strip().lower()
        if token and token not in ("var", "es", "srm"):
            problems.append(f"--measure: unknown measure {token!r}")
        elif token:
            selected.add(token)
    if not selected:
        problems.append(f"--measure: no usable measures in {args.measure!r}")
    if problems:
        raise ConfigError(problems)

    method = _QUANTILE_METHODS[args.quantile_method]
    print(f"[config] n={args.n} seed={seed} seed_source={seed_source} "
          f"tolerance_scale={_fmt_num(args.tolerance_scale)} measures={','.join(sorted(selected))}")
    series = generate(SyntheticSpec(family=Normal(0.0, 1.0), n=args.n, seed=seed))
    losses = to_losses(series, Position.LONG)

    checks = []  # (name, observed, reference, tolerance)
    scale = args.tolerance_scale
    if "var" in selected:
        checks.append(("var_0.99_vs_normal_oracle",
                       value_at_risk(losses, 0.99, method),
                       normal_var_oracle(0.99), 0.01 * scale))
    if "es" in selected:
        checks.append(("es_0.99_vs_normal_oracle",
                       expected_shortfall(losses, 0.99),
                       normal_es_oracle(0.99), 0.015 * scale))
    if "srm" in selected:
        for k in (5.0, 20.0, 80.0):
            checks.append((f"srm_k{k:g}_vs_quadrature_oracle",
                           spectral_risk_measure(losses, k),
                           srm_quadrature_oracle(normal_quantile, k, panels=args.panels),
                           0.01 * scale))
        report = validate_weighting(spectral_weights(losses.n, 20.0))
        checks.append(("weights_total_mass", report.total_mass, 1.0, 1e-12 * scale))

    failures = 0
    for name, observed, reference, tolerance in checks:
        rel = abs(observed - reference) / abs(reference)
        status = "PASS" if rel <= tolerance else "FAIL"
        failures += status == "FAIL"
        print(f"[{status}] {name} observed={observed!r} reference={reference!r} "
              f"rel_err={rel:.3e} tol={tolerance:.3e}")

    if failures:
        print(f"RESULT failed_checks={failures}")
        return 1
    print("RESULT ok")
    return 0


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskboot",
        description="Non-parametric VaR, expected shortfall and spectral risk "
                    "measures with bootstrap precision diagnostics.")
    parser.add_argument("--version", action="version", version=f"riskboot {__version__}")
    sub = parser.add_subparsers(dest="command")

    est = sub.add_parser("estimate", help="estimate measures from return or price files")
    est.add_argument("--input", action="append", metavar="FILE",
                     help="input CSV; repeat for several contracts")
    est.add_argument("--label", action="append", metavar="NAME",
                     help="contract label per --input; defaults to the file stem")
    est.add_argument("--date-col", default="date")
    est.add_argument("--price-col", default=None,
                     help="settlement price column; log returns are computed")
    est.add_argument("--return-col", default=None,
                     help="pre-computed return column; used as-is")
    est.add_argument("--date-format", default="%Y-%m-%d")
    est.add_argument("--position", choices=("long", "short", "both"), default="both")
    est.add_argument("--measure", default="var,es,srm",
                     help="comma list from var, es, srm (default: all)")
    est.add_argument("--alpha", default="0.90,0.95,0.99",
                     help="comma list of confidence levels for var and es")
    est.add_argument("--ara", default="5,10,20,40,80",
                     help="comma list of risk-aversion coefficients for srm")
    est.add_argument("--resamples", type=int, default=5000)
    est.add_argument("--ci-coverage", type=float, default=0.90)
    est.add_argument("--seed", type=int, default=None,
                     help=f"master seed; falls back to ${SEED_ENV_VAR}, then 0")
    est.add_argument("--quantile-method", choices=("order", "interp"), default="order")
    est.add_argument("--workers", type=int, default=1)
    est.add_argument("--format", choices=("text", "csv", "kv"), default="text")
    est.add_argument("--out", default=None, metavar="DIR",
                     help="write one file per table here instead of stdout")
    est.add_argument("--figure1", action="store_true",
                     help="also emit the weight-curve data over p in [0.8, 1]")
    est.add_argument("--drop-zero-returns", action="store_true",
                     help="drop returns that are exactly zero, e.g. holiday padding")

    syn = sub.add_parser("synth", help="write a synthetic return file")
    syn.add_argument("--dist", choices=("normal", "t", "skewmix"), required=True)
    syn.add_argument("--mu", type=float, default=0.0)
    syn.add_argument("--sigma", type=float, default=1.0)
    syn.add_argument("--dof", type=float, default=None, help="degrees of freedom for --dist t")
    syn.add_argument("--scale", type=float, default=1.0, help="scale for --dist t")
    syn.add_argument("--weight", type=float, default=0.1, help="contamination weight for skewmix")
    syn.add_argument("--shift", type=float, default=-3.0, help="contaminant shift in sigmas")
    syn.add_argument("--widen", type=float, default=3.0, help="contaminant sigma multiplier")
    syn.add_argument("--n", type=int, required=True)
    syn.add_argument("--seed", type=int, default=None)
    syn.add_argument("--label", default="")
    syn.add_argument("--out", required=True, metavar="FILE")

    val = sub.add_parser("validate", help="check estimators against their oracles")
    val.add_argument("--n", type=int, default=500_000)
    val.add_argument("--seed", type=int, default=None)
    val.add_argument("--measure", default="var,es,srm")
    val.add_argument("--tolerance-scale", type=float, default=1.0,
                     help="multiplies every tolerance; 0 forces failure")
    val.add_argument("--quantile-method", choices=("order", "interp"), default="order")
    val.add_argument("--panels", type=int, default=200)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help(sys.stderr)
        return 2
    try:
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "synth":
            return _cmd_synth(args)
        return _cmd_validate(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except IngestError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
