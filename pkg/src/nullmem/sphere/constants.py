"""Loader for the generated operator-constants table (see :mod:`.oracle`)."""

from functools import lru_cache

import numpy as np

from ..errors import ResolutionError
from .oracle import TABLE_PATH, TABLE_VERSION


@lru_cache(maxsize=None)
def _table():
    text = TABLE_PATH.read_text()
    header = text.splitlines()[0]
    if f"version {TABLE_VERSION}" not in header:
        raise RuntimeError(f"operator constants table has unexpected header: {header!r}")
    rows = np.loadtxt(TABLE_PATH, comments="#")
    if not np.array_equal(rows[:, 0], np.arange(len(rows))):
        raise RuntimeError("operator constants table rows are not consecutive degrees")
    rows.setflags(write=False)
    return rows


def _column(col, L):
    rows = _table()
    if L >= len(rows):
        raise ResolutionError(
            f"band limit {L} exceeds the constants table (l <= {len(rows) - 1}); "
            "regenerate with python -m nullmem.sphere.oracle --lmax N", field="band_limit")
    return rows[: L + 1, col]


def lambda_e(L):
    """``lambda_e[l]`` for ``0 <= l <= L`` (entries l < 2 are 0)."""
    return _column(1, L)


def lambda_b(L):
    return _column(2, L)


def mu(L):
    """Zonal-kernel eigenvalues ``mu[l]``."""
    return _column(3, L)


def table_lmax():
    return len(_table()) - 1
