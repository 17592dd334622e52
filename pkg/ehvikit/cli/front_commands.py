import logging
import math

import click
import numpy as np

from ehvikit.cli.output import emit, handle_errors, output_options, to_csv, to_json
from ehvikit.cli.schemas import DecompositionSchema, McReportSchema, ValueSchema
from ehvikit.core.criteria import GaussPred, ehvi, poi
from ehvikit.core.decomposition import PARTITION_METHODS, decomposition_stats, partition
from ehvikit.core.hypervolume import hvi, hypervolume
from ehvikit.core.montecarlo import mc_ehvi, mc_poi
from ehvikit.core.parser import load_front, parse_vector
from ehvikit.models.schemas import FrontSpec
from ehvikit.services.benchmarks import random_front

logger = logging.getLogger(__name__)

front_argument = click.argument("front_file", type=click.Path(dir_okay=False))
ref_option = click.option(
    "--ref", required=True, help="Reference point, e.g. '0,0' or '[0, 0]'."
)
method_option = click.option(
    "--method",
    type=click.Choice(PARTITION_METHODS),
    default="auto",
    show_default=True,
    help="Partitioning algorithm.",
)
prediction_options = [
    click.option("--mu", required=True, help="Predictive means, e.g. '2.5,2'."),
    click.option("--sigma", required=True, help="Predictive standard deviations."),
]


def with_prediction(func):
    for option in reversed(prediction_options):
        func = option(func)
    return func


def _emit_value(quantity: str, value: float, fmt: str, out: str | None):
    if fmt == "json":
        emit(to_json(ValueSchema().dump({"quantity": quantity, "value": value})), out)
    else:
        emit(to_csv(None, [[value]]), out)


@click.command("decompose")
@front_argument
@ref_option
@method_option
@output_options
@handle_errors
def decompose_command(front_file, ref, method, seed, fmt, out):
    """Partition the non-dominated space of a front into boxes."""
    front = load_front(front_file)
    r = parse_vector(ref)
    boxes = partition(front, r, method)
    stats = decomposition_stats(front, r, method, boxes=boxes)
    if fmt == "json":
        payload = {
            "n": stats.n,
            "d": stats.d,
            "method": method,
            "local_lower_bounds": stats.lower_bounds,
            "boxes": [{"lower": b.lower, "upper": b.upper} for b in boxes.boxes],
        }
        emit(to_json(DecompositionSchema().dump(payload)), out)
    else:
        d = front.dim
        header = [f"l_{i + 1}" for i in range(d)] + [f"u_{i + 1}" for i in range(d)]
        emit(to_csv(header, np.hstack((boxes.lower, boxes.upper)).tolist()), out)


@click.command("hv")
@front_argument
@ref_option
@output_options
@handle_errors
def hv_command(front_file, ref, seed, fmt, out):
    """Hypervolume of a front."""
    front = load_front(front_file)
    _emit_value("hv", hypervolume(front, parse_vector(ref)), fmt, out)


@click.command("hvi")
@front_argument
@ref_option
@click.option("--point", required=True, help="Objective vector to add.")
@output_options
@handle_errors
def hvi_command(front_file, ref, point, seed, fmt, out):
    """Hypervolume improvement of one point."""
    front = load_front(front_file)
    _emit_value("hvi", hvi(parse_vector(point), front, parse_vector(ref)), fmt, out)


@click.command("ehvi")
@front_argument
@ref_option
@with_prediction
@method_option
@output_options
@handle_errors
def ehvi_command(front_file, ref, mu, sigma, method, seed, fmt, out):
    """Exact expected hypervolume improvement."""
    front = load_front(front_file)
    pred = GaussPred(parse_vector(mu), parse_vector(sigma))
    _emit_value("ehvi", ehvi(pred, front, parse_vector(ref), method), fmt, out)


@click.command("poi")
@front_argument
@with_prediction
@output_options
@handle_errors
def poi_command(front_file, mu, sigma, seed, fmt, out):
    """Exact probability of improvement (no reference point)."""
    front = load_front(front_file)
    pred = GaussPred(parse_vector(mu), parse_vector(sigma))
    _emit_value("poi", poi(pred, front), fmt, out)


def _z_score(exact: float, estimate: float, std_error: float) -> float:
    # Equal up to rounding means z = 0.
    if math.isclose(exact, estimate, rel_tol=1e-9, abs_tol=1e-12):
        return 0.0
    if std_error > 0:
        return (exact - estimate) / std_error
    return math.inf


@click.command("mc-validate")
@front_argument
@click.option("--ref", default=None, help="Reference point (EHVI only).")
@with_prediction
@click.option(
    "--criterion", type=click.Choice(["ehvi", "poi"]), default="ehvi", show_default=True
)
@click.option("--samples", type=int, default=None, help="Monte Carlo sample count.")
@click.option(
    "--workers", type=click.IntRange(min=1), default=None, help="Parallel sampling workers."
)
@output_options
@click.pass_obj
@handle_errors
def mc_validate_command(
    settings, front_file, ref, mu, sigma, criterion, samples, workers, seed, fmt, out
):
    """Compare an exact criterion with its Monte Carlo estimate.

    Exits with status 1 when |z| exceeds the configured threshold.
    """
    front = load_front(front_file)
    pred = GaussPred(parse_vector(mu), parse_vector(sigma))
    samples = settings.MC_SAMPLES if samples is None else samples
    workers = settings.MC_WORKERS if workers is None else workers

    sampling = {"workers": workers, "chunk_size": settings.MC_CHUNK_SIZE}

    if criterion == "ehvi":
        if ref is None:
            raise ValueError("--ref is required for EHVI")
        r = parse_vector(ref)
        exact = ehvi(pred, front, r)
        estimate = mc_ehvi(pred, front, r, samples, seed, **sampling)
    else:
        exact = poi(pred, front)
        estimate = mc_poi(pred, front, samples, seed, **sampling)

    z = _z_score(exact, estimate.value, estimate.std_error)
    report = {
        "criterion": criterion,
        "exact": exact,
        "estimate": estimate.value,
        "std_error": estimate.std_error,
        "samples": estimate.samples,
        "z_score": z,
        "seed": seed,
        "workers": workers,
    }
    if fmt == "json":
        emit(to_json(McReportSchema().dump(report)), out)
    else:
        header = list(McReportSchema().fields)
        emit(to_csv(header, [[report[key] for key in header]]), out)

    logger.info(
        f"{criterion}: exact {exact:.10g}, MC {estimate.value:.10g} ± "
        f"{estimate.std_error:.3g}, z = {z:.3f}"
    )
    if abs(z) > settings.Z_THRESHOLD:
        logger.error(f"|z| = {abs(z):.3f} exceeds {settings.Z_THRESHOLD}")
        raise click.exceptions.Exit(1)


@click.command("gen-front")
@click.option(
    "--kind",
    type=click.Choice(["concave_spherical", "convex_spherical"]),
    default="concave_spherical",
    show_default=True,
)
@click.option("--d", "d", type=int, required=True, help="Objective count.")
@click.option("--n", "n", type=int, required=True, help="Front size.")
@click.option("--radius", type=float, default=1.0, show_default=True)
@output_options
@handle_errors
def gen_front_command(kind, d, n, radius, seed, fmt, out):
    """Generate a random mutually non-dominated front."""
    front = random_front(FrontSpec(kind=kind, d=d, n=n, seed=seed, radius=radius))
    if fmt == "json":
        emit(to_json(front.points.tolist()), out)
    else:
        emit(to_csv(None, front.points.tolist()), out)
