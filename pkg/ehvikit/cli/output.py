import csv
import functools
import io
import json
import logging
import numbers
from pathlib import Path
from typing import Iterable, Sequence

import click
from marshmallow import ValidationError as SchemaValidationError
from pydantic import ValidationError

logger = logging.getLogger(__name__)


def format_number(value) -> str:
    """Locale-independent text for a number; ±∞ become 'inf' / '-inf'."""
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, numbers.Integral):
        return str(int(value))
    return repr(float(value))


def to_csv(header: Sequence[str] | None, rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if header:
        writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buffer.getvalue()


def to_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def emit(text: str, out: str | None):
    """Writes ``text`` to ``out`` or to standard output."""
    if out is None:
        click.echo(text, nl=False)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")


def output_options(func):
    """Shared --seed, --format and --out flags."""
    func = click.option(
        "--out",
        type=click.Path(dir_okay=False),
        default=None,
        help="Output file; standard output when omitted.",
    )(func)
    func = click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "json"]),
        default="csv",
        show_default=True,
        help="Output format.",
    )(func)
    func = click.option(
        "--seed", type=int, default=0, show_default=True, help="Random seed."
    )(func)
    return func


def handle_errors(func):
    """Turns input errors into a logged message and exit status 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ValidationError, SchemaValidationError, ValueError) as e:
            logger.error(f"{func.__name__.replace('_', '-')} failed: {e}")
            raise click.ClickException(str(e)) from e

    return wrapper
