"""
Series and report file I/O.

Series files are CSV with one numeric value per row, or several columns of
which one is selected by name or 0-based index. A header row is optional and
detected by whether the first row parses as numbers.
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from ar_bridge.core.errors import DomainError, InsufficientDataError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _has_header(path: Path) -> bool:
    first = pd.read_csv(path, header=None, nrows=1, dtype=str)
    if first.empty:
        return False
    values = pd.to_numeric(first.iloc[0], errors="coerce")
    return bool(values.isna().any())


def read_series(path: PathLike, col: Optional[str] = None) -> np.ndarray:
    """Read one numeric column; ``col`` is a header name or a 0-based index."""
    path = Path(path)
    try:
        frame = pd.read_csv(path, header=0 if _has_header(path) else None, skip_blank_lines=True)
    except FileNotFoundError:
        raise DomainError(f"no such file: {path}", path=str(path))
    except pd.errors.EmptyDataError:
        raise InsufficientDataError(f"{path} holds no data", path=str(path))

    if col is None:
        if frame.shape[1] != 1:
            raise DomainError(
                f"{path} has {frame.shape[1]} columns; choose one with --col", columns=list(map(str, frame.columns))
            )
        column = frame.iloc[:, 0]
    elif col in map(str, frame.columns):
        column = frame[[c for c in frame.columns if str(c) == col][0]]
    elif col.isdigit() and int(col) < frame.shape[1]:
        column = frame.iloc[:, int(col)]
    else:
        raise DomainError(f"column {col!r} not found in {path}", column=col)

    if column.isna().any():
        rows = [int(i) for i in column.index[column.isna()][:5]]
        raise DomainError(f"{path} has missing values", rows=rows)
    values = pd.to_numeric(column, errors="coerce")
    if values.isna().any():
        rows = [int(i) for i in column.index[values.isna()][:5]]
        raise DomainError(f"{path} has non-numeric values", rows=rows)
    logger.debug(f"read {values.size} values from {path}")
    return values.to_numpy(dtype=float)


def atomic_write(path: PathLike, text: str) -> None:
    """Write through a temporary file in the target directory and rename it into place."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def series_to_csv(values, name: str = "x") -> str:
    return pd.DataFrame({name: np.asarray(values, dtype=float)}).to_csv(
        index=False, lineterminator="\n", float_format="%.17g"
    )
