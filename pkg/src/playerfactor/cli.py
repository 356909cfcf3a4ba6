"""Command-line comparison pipeline.

`compare` runs the requested clustering methods on a telemetry CSV or a
synthetic population and writes plot-ready artifacts (report.json, per-method
basis CSVs, assignment histogram). `generate` materializes a synthetic
population to CSV; `validate` checks a CSV against a schedule.

Exit codes: 0 success, 2 configuration error, 3 ingestion/data error,
4 numerical failure. Identical configurations produce byte-identical output
files; wall times are printed to the console only.
"""

import functools
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from ._kernels import BACKEND
from .archetypes import archetypal_analysis
from .errors import (
    ConfigurationError,
    NumericalError,
    ParseError,
    ValidationError,
)
from .factorizers import METHODS, FactorizationResult, SolverOptions, cmeans, kmeans, nmf, pca
from .telemetry import (
    DEFAULT_SCHEDULE,
    ExpansionSchedule,
    LegalityReport,
    TelemetryMatrix,
    default_synthetic_spec,
    generate_population,
    hard_assign,
    interpolate_missing,
    legality_report,
    load_schedule,
    load_synthetic_spec,
    load_telemetry,
)

_RUNNERS = {
    "kmeans": kmeans,
    "cmeans": cmeans,
    "nmf": nmf,
    "pca": pca,
    "archetypal": archetypal_analysis,
}


@dataclass(frozen=True)
class RunConfig:
    """One comparison run: data source, method subset, and solver knobs."""

    output_dir: str
    input_csv: str | None = None
    schedule_csv: str | None = None
    synthetic_spec: str | None = None
    methods: tuple[str, ...] = METHODS
    k: int = 8
    seed: int = 0
    max_iterations: int = 300
    tolerance: float = 1e-6
    fuzzifier_m: float = 2.0
    center_pca: bool = False


@dataclass
class MethodReport:
    method: str
    skipped: bool = False
    skip_reason: str | None = None
    result: FactorizationResult | None = None
    legality: LegalityReport | None = None
    histogram: np.ndarray | None = None
    wall_time_ms: float = 0.0


@dataclass
class ComparisonReport:
    source: str
    days: int
    players: int
    k: int
    seed: int
    schedule: ExpansionSchedule
    config: RunConfig
    kernel_backend: str
    entries: tuple[MethodReport, ...]


def _validate_config(config: RunConfig) -> tuple[str, ...]:
    if (config.input_csv is None) == (config.synthetic_spec is None):
        raise ConfigurationError(
            "input: provide exactly one of a telemetry CSV or a synthetic spec")
    methods = tuple(m for m in METHODS if m in config.methods)
    unknown = set(config.methods) - set(METHODS)
    if unknown:
        raise ConfigurationError(f"methods: unknown method(s) {sorted(unknown)}")
    if not methods:
        raise ConfigurationError("methods: at least one method is required")
    if config.k < 2:
        raise ConfigurationError(f"k: must be >= 2, got {config.k}")
    return methods


def _load_input(config: RunConfig) -> tuple[TelemetryMatrix, ExpansionSchedule, str]:
    if config.synthetic_spec is not None:
        spec = load_synthetic_spec(config.synthetic_spec)
        T, _ = generate_population(spec)
        return T, spec.schedule, f"synthetic:{config.synthetic_spec}"
    schedule = DEFAULT_SCHEDULE
    if config.schedule_csv is not None:
        schedule = load_schedule(config.schedule_csv)
    T = load_telemetry(config.input_csv, schedule)
    return T, schedule, f"csv:{config.input_csv}"


def run_compare(config: RunConfig) -> ComparisonReport:
    """Run every requested method on the (interpolated) input, compute
    legality and hard assignments, and write all artifacts to the output
    directory."""
    methods = _validate_config(config)
    T, schedule, source = _load_input(config)
    T = interpolate_missing(T)
    V = T.matrix

    opts = SolverOptions(
        k=config.k,
        max_iterations=config.max_iterations,
        tolerance=config.tolerance,
        fuzzifier_m=config.fuzzifier_m,
        center_pca=config.center_pca,
        seed=config.seed,
    )
    entries = []
    for name in methods:
        if name == "nmf" and V.min() < 0.0:
            entries.append(MethodReport(
                name, skipped=True,
                skip_reason="input matrix contains negative entries"))
            continue
        t0 = time.perf_counter()
        result = _RUNNERS[name](V, opts)
        wall_ms = (time.perf_counter() - t0) * 1000.0
        basis = result.W if result.centering is None \
            else result.W + result.centering[:, None]
        legality = legality_report(basis, schedule, T.day_axis)
        _, histogram = hard_assign(V, result)
        entries.append(MethodReport(
            name, result=result, legality=legality,
            histogram=histogram, wall_time_ms=wall_ms))

    report = ComparisonReport(
        source=source, days=T.days, players=T.players, k=config.k,
        seed=config.seed, schedule=schedule, config=config,
        kernel_backend=BACKEND, entries=tuple(entries))
    _write_artifacts(report, T)
    return report


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def export_basis_vectors(result: FactorizationResult, day_axis, path) -> None:
    """Plot-ready CSV of the basis vectors: day_index, basis_0..basis_{k-1}."""
    W = result.W
    k = W.shape[1]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("day_index," + ",".join(f"basis_{j}" for j in range(k)) + "\n")
        for r, day in enumerate(np.asarray(day_axis)):
            fh.write(str(int(day)) + "," + ",".join(_fmt(W[r, j]) for j in range(k)) + "\n")


def export_assignment_histogram(report: ComparisonReport, path) -> None:
    """CSV of hard-assignment counts: method, cluster_index, count."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("method,cluster_index,count\n")
        for entry in report.entries:
            if entry.histogram is None:
                continue
            for j, count in enumerate(entry.histogram):
                fh.write(f"{entry.method},{j},{int(count)}\n")


def _legality_dict(legality: LegalityReport) -> dict:
    return {
        "aggregate_legality": legality.aggregate_legality,
        "vectors": [
            {
                "monotonicity_violations": v.monotonicity_violations,
                "range_violations": v.range_violations,
                "is_legal": v.is_legal,
            }
            for v in legality.per_vector
        ],
    }


def _report_dict(report: ComparisonReport) -> dict:
    # wall times are deliberately absent: output files must be byte-identical
    # across reruns of the same configuration
    results: dict = {}
    for entry in report.entries:
        if entry.skipped:
            results[entry.method] = {"skipped": True, "skip_reason": entry.skip_reason}
            continue
        res = entry.result
        results[entry.method] = {
            "skipped": False,
            "reconstruction_error": res.reconstruction_error,
            "iterations": res.iterations,
            "converged": res.converged,
            "legality": _legality_dict(entry.legality),
            "histogram": [int(c) for c in entry.histogram],
        }
    return {
        "source": report.source,
        "dataset": {"days": report.days, "players": report.players},
        "error_metric": "frobenius_norm",
        "k": report.k,
        "seed": report.seed,
        "methods": [e.method for e in report.entries],
        "solver": {
            "max_iterations": report.config.max_iterations,
            "tolerance": report.config.tolerance,
            "fuzzifier_m": report.config.fuzzifier_m,
            "center_pca": report.config.center_pca,
        },
        "schedule": [[d, c] for d, c in report.schedule.breakpoints],
        "kernel_backend": report.kernel_backend,
        "results": results,
    }


def _write_artifacts(report: ComparisonReport, T: TelemetryMatrix) -> None:
    out = Path(report.config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_report_dict(report), fh, indent=2)
        fh.write("\n")
    for entry in report.entries:
        if entry.result is not None:
            export_basis_vectors(entry.result, T.day_axis, out / f"basis_{entry.method}.csv")
    export_assignment_histogram(report, out / "histogram.csv")


def _echo_report(report: ComparisonReport) -> None:
    click.echo(f"source: {report.source}")
    click.echo(f"dataset: {report.days} days x {report.players} players, "
               f"k={report.k}, seed={report.seed}, kernels={report.kernel_backend}")
    header = f"{'method':<12}{'error':>18}{'iters':>8}{'conv':>6}{'legal':>7}{'ms':>10}"
    click.echo(header)
    for e in report.entries:
        if e.skipped:
            click.echo(f"{e.method:<12}  skipped: {e.skip_reason}")
            continue
        click.echo(
            f"{e.method:<12}{e.result.reconstruction_error:>18.6f}"
            f"{e.result.iterations:>8}{str(e.result.converged):>6}"
            f"{e.legality.aggregate_legality:>7.2f}{e.wall_time_ms:>10.1f}")


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigurationError as exc:
            click.echo(f"configuration error: {exc}", err=True)
            sys.exit(2)
        except (ParseError, ValidationError, OSError) as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(3)
        except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(4)
    return wrapper


@click.group()
def main():
    """Compare matrix-factorization player-clustering methods on
    level-per-day telemetry."""


@main.command()
@click.option("--input", "input_csv", type=str, default=None,
              help="Telemetry CSV (player_id,day_index,level).")
@click.option("--schedule", "schedule_csv", type=str, default=None,
              help="Expansion schedule CSV (day_index,level_cap).")
@click.option("--synthetic", "synthetic_spec", type=str, default=None,
              help="Synthetic population spec (INI).")
@click.option("--k", type=int, default=8, show_default=True,
              help="Number of basis vectors.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--methods", type=str, default=",".join(METHODS), show_default=True,
              help="Comma-separated method subset.")
@click.option("--out", "output_dir", type=str, required=True,
              help="Output directory for report and CSVs.")
@click.option("--max-iterations", type=int, default=300, show_default=True)
@click.option("--tolerance", type=float, default=1e-6, show_default=True)
@click.option("--fuzzifier-m", type=float, default=2.0, show_default=True)
@click.option("--center-pca", is_flag=True, default=False)
@_exit_codes
def compare(input_csv, schedule_csv, synthetic_spec, k, seed, methods,
            output_dir, max_iterations, tolerance, fuzzifier_m, center_pca):
    """Run the method comparison and write artifacts to --out."""
    config = RunConfig(
        output_dir=output_dir,
        input_csv=input_csv,
        schedule_csv=schedule_csv,
        synthetic_spec=synthetic_spec,
        methods=tuple(m.strip() for m in methods.split(",") if m.strip()),
        k=k,
        seed=seed,
        max_iterations=max_iterations,
        tolerance=tolerance,
        fuzzifier_m=fuzzifier_m,
        center_pca=center_pca,
    )
    report = run_compare(config)
    _echo_report(report)
    click.echo(f"artifacts written to {output_dir}")


@main.command()
@click.option("--spec", "spec_path", type=str, default=None,
              help="Synthetic spec INI (omit for the built-in default).")
@click.option("--out", "output_dir", type=str, required=True)
@_exit_codes
def generate(spec_path, output_dir):
    """Generate a synthetic population and write it as telemetry CSV."""
    spec = load_synthetic_spec(spec_path) if spec_path else default_synthetic_spec()
    T, planted = generate_population(spec)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "telemetry.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("player_id,day_index,level\n")
        days = T.day_axis
        for c, pid in enumerate(T.player_ids):
            obs = np.flatnonzero(T.observed_mask[:, c])
            fh.write("".join(
                f"{pid},{int(days[r])},{_fmt(T.matrix[r, c])}\n" for r in obs))

    with open(out / "schedule.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("day_index,level_cap\n")
        for day, cap in spec.schedule.breakpoints:
            fh.write(f"{day},{cap}\n")

    with open(out / "planted.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("player_id,column_index,curve\n")
        for curve, col in zip(spec.archetype_curves, planted):
            fh.write(f"{T.player_ids[col]},{col},{curve.name}\n")

    resolved = {
        "n_players": spec.n_players,
        "days": spec.days,
        "seed": spec.seed,
        "mixture_shrink": spec.mixture_shrink,
        "missing_fraction": spec.missing_fraction,
        "schedule": [[d, c] for d, c in spec.schedule.breakpoints],
        "curves": {c.name: [list(p) for p in c.phases] for c in spec.archetype_curves},
    }
    with open(out / "spec_resolved.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(resolved, fh, indent=2)
        fh.write("\n")

    click.echo(f"generated {T.days} days x {T.players} players "
               f"({T.observed_mask.sum()} observations, {spec.k} planted curves)")
    click.echo(f"artifacts written to {output_dir}")


@main.command()
@click.option("--input", "input_csv", type=str, required=True,
              help="Telemetry CSV to check.")
@click.option("--schedule", "schedule_csv", type=str, default=None)
@_exit_codes
def validate(input_csv, schedule_csv):
    """Ingest a telemetry CSV and report per-player legality."""
    schedule = load_schedule(schedule_csv) if schedule_csv else DEFAULT_SCHEDULE
    T = load_telemetry(input_csv, schedule)
    T = interpolate_missing(T)
    legality = legality_report(T.matrix, schedule, T.day_axis)
    illegal = [
        (T.player_ids[j], v)
        for j, v in enumerate(legality.per_vector) if not v.is_legal
    ]
    click.echo(f"{T.days} days x {T.players} players, "
               f"{int(T.observed_mask.sum())} observed cells")
    click.echo(f"legal players: {T.players - len(illegal)}/{T.players} "
               f"(aggregate {legality.aggregate_legality:.4f})")
    for pid, v in illegal[:10]:
        click.echo(f"  {pid}: {v.monotonicity_violations} level drops, "
                   f"{v.range_violations} out-of-range entries")
    if len(illegal) > 10:
        click.echo(f"  ... and {len(illegal) - 10} more")


if __name__ == "__main__":
    main()
