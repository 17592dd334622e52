import logging
from dataclasses import asdict
from pathlib import Path

import click

from ehvikit.cli.output import emit, handle_errors, output_options, to_csv, to_json
from ehvikit.cli.schemas import (
    HistoryRowSchema,
    KrigingModelSchema,
    SpeedMetadataSchema,
    SpeedRowSchema,
)
from ehvikit.core.decomposition import PARTITION_METHODS
from ehvikit.core.errors import ProblemEvaluationError
from ehvikit.core.parser import parse_vector
from ehvikit.models.schemas import RunConfig
from ehvikit.services import mobgo
from ehvikit.services.benchmarks import dtlz, parse_problem_name, reference_point
from ehvikit.services.speed import bench_speed

logger = logging.getLogger(__name__)


@click.command("bench-speed")
@click.option("--d", "d_list", type=int, multiple=True, required=True)
@click.option("--n", "n_list", type=int, multiple=True, required=True)
@click.option(
    "--kind",
    type=click.Choice(["concave_spherical", "convex_spherical"]),
    default="concave_spherical",
    show_default=True,
)
@click.option("--reps", type=int, default=None, help="Fronts timed per (d, n) cell.")
@click.option(
    "--algorithm",
    "method",
    type=click.Choice(PARTITION_METHODS),
    default="auto",
    show_default=True,
)
@click.option("--workers", type=int, default=1, show_default=True)
@output_options
@click.pass_obj
@handle_errors
def bench_speed_command(
    settings, d_list, n_list, kind, reps, method, workers, seed, fmt, out
):
    """Time exact EHVI on random fronts of growing size.

    With --out, run metadata goes to a ``.meta.json`` file next to it.
    """
    report = bench_speed(
        d_list,
        n_list,
        kind=kind,
        reps=reps or settings.BENCH_REPS,
        seed=seed,
        method=method,
        workers=workers,
        mu=settings.BENCH_MU,
        sigma=settings.BENCH_SIGMA,
    )
    rows = SpeedRowSchema(many=True).dump([asdict(row) for row in report.rows])
    if fmt == "json":
        emit(to_json(rows), out)
    else:
        header = list(SpeedRowSchema().fields)
        emit(to_csv(header, [[row[key] for key in header] for row in rows]), out)

    if out is not None:
        metadata = {
            "machine": report.machine,
            "timestamp": report.timestamp,
            "slopes": {str(d): slope for d, slope in report.slopes().items()},
        }
        emit(to_json(SpeedMetadataSchema().dump(metadata)), f"{out}.meta.json")


def _write_run(result: mobgo.RunResult, cfg: RunConfig, out_dir: Path, dump_models):
    archive = result.archive
    header = [f"x_{i + 1}" for i in range(archive.m)]
    header += [f"y_{k + 1}" for k in range(archive.d)]
    rows = [list(x) + list(y) for x, y in zip(archive.xs, archive.ys)]
    emit(to_csv(header, rows), out_dir / "archive.csv")

    history = HistoryRowSchema(many=True).dump(
        [{"g": g, "hv": hv} for g, hv in result.history]
    )
    history_rows = [[row["g"], row["hv"]] for row in history]
    emit(to_csv(["g", "hv"], history_rows), out_dir / "history.csv")
    emit(to_json(cfg.model_dump(mode="json")), out_dir / "config.json")

    if dump_models and result.models:
        models = KrigingModelSchema(many=True).dump([m.to_dict() for m in result.models])
        emit(to_json(models), out_dir / "models.json")


@click.command("mobgo-run")
@click.option("--problem", required=True, help="Benchmark name, e.g. 'dtlz2'.")
@click.option("--m", "m", type=int, required=True, help="Decision variables.")
@click.option("--d", "d", type=int, default=3, show_default=True, help="Objectives.")
@click.option(
    "--criterion", type=click.Choice(["ehvi", "poi"]), default="ehvi", show_default=True
)
@click.option("--eta", type=int, default=30, show_default=True, help="Initial sample size.")
@click.option("--tc", type=int, default=300, show_default=True, help="Evaluation budget.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--ref",
    default=None,
    help="Reference point in the maximization sense; the benchmark's default if omitted.",
)
@click.option("--inner-budget", type=int, default=None)
@click.option("--kriging-budget", type=int, default=None)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--dump-models", is_flag=True, help="Also write the final models.")
@click.option("--baseline", is_flag=True, help="Spend the budget on one LHS instead.")
@click.pass_obj
@handle_errors
def mobgo_run_command(
    settings,
    problem,
    m,
    d,
    criterion,
    eta,
    tc,
    seed,
    ref,
    inner_budget,
    kriging_budget,
    out_dir,
    dump_models,
    baseline,
):
    """Run MOBGO (or the LHS baseline) on a DTLZ benchmark.

    Writes archive.csv, history.csv and config.json into the output
    directory, plus models.json with --dump-models.
    """
    problem_id = parse_problem_name(problem)
    ref_point = parse_vector(ref) if ref else reference_point(problem_id, d)
    cfg = RunConfig(
        eta=eta,
        tc=tc,
        criterion=criterion,
        ref_point=[float(v) for v in ref_point],
        inner_budget=inner_budget or settings.INNER_BUDGET,
        seed=seed,
        kriging_budget=kriging_budget or settings.KRIGING_BUDGET,
        nugget=settings.KRIGING_NUGGET,
        variance_floor=settings.VARIANCE_FLOOR,
        fit_workers=settings.FIT_WORKERS,
    )
    benchmark = dtlz(problem_id, m, d)
    out_dir = Path(out_dir)

    try:
        if baseline:
            result = mobgo.run_lhs_baseline(benchmark, cfg)
        else:
            result = mobgo.run(benchmark, cfg)
    except ProblemEvaluationError as e:
        if e.archive is not None:
            partial = mobgo.RunResult(archive=e.archive, history=e.history or [])
            _write_run(partial, cfg, out_dir, dump_models=False)
            logger.warning(f"Partial archive of {e.archive.g} evaluations written")
        raise

    _write_run(result, cfg, out_dir, dump_models)
    click.echo(f"{benchmark.name} m={m} d={d}: final HV {result.final_hv!r}")
