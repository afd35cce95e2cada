"""Matrix file I/O: MatrixMarket dense array format and headerless CSV.

Format is inferred from the file extension (.mtx / .csv) unless given
explicitly.  MatrixMarket files use the dense "array" layout with
column-major values; CSV files are one row per line, comma separated.
Writes are deterministic (17 significant digits), so identical matrices
produce byte-identical files.
"""

from pathlib import Path

import numpy as np
import scipy.io

from .errors import DimensionError
from .linalg import as_matrix

__all__ = ["read_matrix", "write_matrix", "infer_format"]

FORMATS = ("mtx", "csv")


def infer_format(path, fmt: str | None = None) -> str:
    if fmt is not None:
        if fmt not in FORMATS:
            raise ValueError(f"unknown matrix format {fmt!r}; expected one of {FORMATS}")
        return fmt
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix in FORMATS:
        return suffix
    raise ValueError(f"cannot infer matrix format from {path!r}; pass an explicit format")


def write_matrix(path, a, fmt: str | None = None) -> None:
    a = as_matrix(a)
    fmt = infer_format(path, fmt)
    if fmt == "mtx":
        # Pass an open handle: scipy appends ".mtx" to bare filenames.
        with open(path, "wb") as fh:
            scipy.io.mmwrite(fh, a, comment="", precision=17, symmetry="general")
    else:
        np.savetxt(path, a, delimiter=",", fmt="%.17g")


def read_matrix(path, fmt: str | None = None) -> np.ndarray:
    fmt = infer_format(path, fmt)
    if fmt == "mtx":
        with open(path, "rb") as fh:
            a = scipy.io.mmread(fh)
        if hasattr(a, "toarray"):  # coordinate-format file
            a = a.toarray()
    else:
        a = np.loadtxt(path, delimiter=",", ndmin=2)
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError(f"{path}: expected a 2-D matrix, got shape {a.shape}")
    return as_matrix(a)
