"""Matrix Market / CSV readers and writers, plus stable JSON emission."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from .errors import InvalidInput
from .matrix_core import as_matrix


def read_matrix_market(path):
    """Read a real Matrix Market file (array or coordinate) as a dense array."""
    path = Path(path)
    try:
        data = scipy.io.mmread(str(path))
    except (OSError, ValueError) as exc:
        raise InvalidInput(f"{path}: cannot parse Matrix Market data ({exc})") from exc
    if scipy.sparse.issparse(data):
        data = data.toarray()
    return as_matrix(data, str(path))


def write_matrix_market(path, A, fmt="array", comment=""):
    """Write ``A`` with 17 significant digits.

    ``fmt="array"`` stores every entry column-major; ``fmt="coordinate"``
    stores the nonzeros only.
    """
    A = as_matrix(A)
    if fmt == "array":
        target = A
    elif fmt == "coordinate":
        target = scipy.sparse.coo_matrix(A)
    else:
        raise ValueError(f"unknown Matrix Market format {fmt!r}")
    scipy.io.mmwrite(str(path), target, comment=comment, precision=17)


def read_csv_matrix(path, delimiter=","):
    """Dense matrix from a headerless CSV file."""
    try:
        data = np.loadtxt(str(path), delimiter=delimiter, ndmin=2)
    except (OSError, ValueError) as exc:
        raise InvalidInput(f"{path}: cannot parse CSV matrix ({exc})") from exc
    return as_matrix(data, str(path))


def read_matrix(path):
    """Dispatch on suffix: ``.mtx``/``.mm`` -> Matrix Market, else CSV."""
    suffix = Path(path).suffix.lower()
    if suffix in (".mtx", ".mm"):
        return read_matrix_market(path)
    return read_csv_matrix(path)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no inf/nan; null marks an unbounded or undefined value
        return x if math.isfinite(x) else None
    return obj


def dumps(obj):
    """Deterministic JSON text: insertion-ordered keys, round-trip floats."""
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"
