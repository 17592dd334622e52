import csv
import io
import json
import logging
import re
from pathlib import Path
from typing import List

import numpy as np

from ehvikit.core.errors import EhviKitError, FrontFileError
from ehvikit.core.pareto import ParetoApprox, nd_filter

logger = logging.getLogger(__name__)


def _to_float(value) -> float:
    # Accepts numbers and the literals inf / -inf used by every writer here.
    if isinstance(value, bool):
        raise ValueError(f"{value!r} is not a number")
    return float(value.strip() if isinstance(value, str) else value)


def _rectangular(rows: List[list], source: str) -> np.ndarray:
    if not rows:
        raise FrontFileError(f"{source}: no points found")
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise FrontFileError(f"{source}: rows have different lengths {sorted(widths)}")
    try:
        return np.array([[_to_float(v) for v in row] for row in rows], dtype=float)
    except (TypeError, ValueError) as e:
        raise FrontFileError(f"{source}: non-numeric entry ({e})") from e


def parse_front_json(text: str, source: str = "<json>") -> np.ndarray:
    """
    Parses a JSON array of arrays, one objective vector per inner array.

    Args:
        text: The JSON document.
        source: Name used in error messages.

    Returns:
        An (n, d) float array.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        logger.error(f"{source}: invalid JSON: {e}")
        raise FrontFileError(f"{source}: invalid JSON ({e})") from e
    if not isinstance(data, list) or not all(isinstance(row, list) for row in data):
        raise FrontFileError(f"{source}: expected an array of arrays")
    return _rectangular(data, source)


def parse_front_csv(text: str, source: str = "<csv>") -> np.ndarray:
    """Parses CSV with one point per line; blank lines and '#' comments are skipped."""
    rows = [
        row
        for row in csv.reader(io.StringIO(text))
        if row and not row[0].lstrip().startswith("#")
    ]
    return _rectangular(rows, source)


def load_front(path: str | Path) -> ParetoApprox:
    """
    Reads a front file (.json, otherwise CSV) and returns its non-dominated subset.

    Dominated or duplicate rows are dropped with a warning.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Cannot read front file {path}: {e}")
        raise FrontFileError(f"Cannot read front file {path}: {e}") from e

    if path.suffix.lower() == ".json":
        points = parse_front_json(text, str(path))
    else:
        points = parse_front_csv(text, str(path))
    if not np.all(np.isfinite(points)):
        raise FrontFileError(f"{path}: front points must be finite")
    try:
        front = nd_filter(points)
    except EhviKitError as e:
        raise FrontFileError(f"{path}: {e}") from e
    if front.n < len(points):
        logger.warning(f"{path}: dropped {len(points) - front.n} dominated or duplicate points")
    return front


def parse_vector(text: str) -> np.ndarray:
    """Parses '2.5,2', '[2.5, 2]' or '-inf,-inf' into a float vector."""
    stripped = text.strip()
    try:
        if stripped.startswith("["):
            values = json.loads(re.sub(r"(-?inf)", r'"\1"', stripped))
            values = [_to_float(v) for v in values]
        else:
            values = [_to_float(v) for v in stripped.split(",") if v.strip()]
    except (TypeError, ValueError) as e:
        logger.error(f"Cannot parse vector '{text}': {e}")
        raise EhviKitError(f"Cannot parse vector '{text}': {e}") from e
    if not values:
        raise EhviKitError(f"Empty vector '{text}'")
    return np.array(values, dtype=float)
